"""Party subsets, admissible partitions and party-label parsing.

An admissible k-partition splits all n parties into k disjoint blocks,
block i seeded by designated party i; every undesignated party joins
exactly one block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .registers import RegisterShape

__all__ = [
    "PartitionSpec",
    "enumerate_admissible_partitions",
    "random_partition",
    "party_name",
    "parse_parties",
]


def party_name(index: int) -> str:
    """A, B, C, ... for the first 26 parties, then P26, P27, ..."""
    if 0 <= index < 26:
        return chr(ord("A") + index)
    return f"P{index}"


def parse_parties(text: str) -> tuple[int, ...]:
    """Parse 'A,B' or '0,1' into party indices (order preserved)."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.isdigit():
            out.append(int(tok))
        elif len(tok) == 1 and tok.upper().isalpha():
            out.append(ord(tok.upper()) - ord("A"))
        elif tok.upper().startswith("P") and tok[1:].isdigit():
            out.append(int(tok[1:]))
        else:
            raise ValueError(f"cannot parse party label {tok!r}")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate party in {text!r}")
    return tuple(out)


@dataclass(frozen=True)
class PartitionSpec:
    """Disjoint party blocks plus the ordered designated parties.

    For admissible partitions block i contains designated[i] and the
    blocks cover every party of the register.
    """

    shape: RegisterShape
    blocks: tuple[tuple[int, ...], ...]
    designated: tuple[int, ...]

    def __init__(self, shape: RegisterShape, blocks, designated=()) -> None:
        blocks = tuple(tuple(sorted(int(p) for p in b)) for b in blocks)
        designated = tuple(int(p) for p in designated)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            if seen & set(b):
                raise ValueError(f"blocks are not disjoint: {blocks}")
            seen |= set(b)
        if any(p < 0 or p >= shape.n_parties for p in seen):
            raise ValueError("block party index out of range")
        if len(set(designated)) != len(designated):
            raise ValueError("designated parties must be distinct")
        for d in designated:
            if sum(d in b for b in blocks) > 1:
                raise ValueError("designated party appears in more than one block")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "designated", designated)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def covers_all(self) -> bool:
        return sum(len(b) for b in self.blocks) == self.shape.n_parties

    def is_admissible(self) -> bool:
        """One designated party per block, blocks covering every party."""
        if len(self.designated) != len(self.blocks) or not self.covers_all():
            return False
        return all(d in b for d, b in zip(self.designated, self.blocks))

    def label(self) -> str:
        return "|".join("".join(party_name(p) for p in b) for b in self.blocks)


def enumerate_admissible_partitions(shape: RegisterShape, designated,
                                    k: int | None = None) -> list[PartitionSpec]:
    """All admissible k-partitions seeded by the designated parties.

    Every undesignated party is assigned to one of the k designated
    blocks, so the count is k^(n-k). Deterministic order: assignments
    iterate in mixed-radix order over the sorted undesignated parties.
    """
    designated = tuple(int(p) for p in designated)
    if len(set(designated)) != len(designated):
        raise ValueError("designated parties must be distinct")
    if k is None:
        k = len(designated)
    if k != len(designated):
        raise ValueError(f"k={k} does not match {len(designated)} designated parties")
    if not 2 <= k <= shape.n_parties:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={shape.n_parties}")
    if any(p < 0 or p >= shape.n_parties for p in designated):
        raise ValueError("designated party out of range")

    free = sorted(set(range(shape.n_parties)) - set(designated))
    out = []
    for assign in itertools.product(range(k), repeat=len(free)):
        blocks = [[d] for d in designated]
        for party, slot in zip(free, assign):
            blocks[slot].append(party)
        out.append(PartitionSpec(shape, blocks, designated))
    return out


def random_partition(shape: RegisterShape, rng, max_blocks: int | None = None) -> PartitionSpec:
    """Uniform random assignment of parties to 1..max_blocks labeled blocks."""
    n = shape.n_parties
    if max_blocks is None:
        max_blocks = n
    nb = int(rng.integers(1, max_blocks + 1))
    while True:
        labels = rng.integers(0, nb, size=n)
        groups: dict[int, list[int]] = {}
        for party, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(party)
        blocks = [tuple(v) for _, v in sorted(groups.items())]
        if blocks:
            return PartitionSpec(shape, blocks)
