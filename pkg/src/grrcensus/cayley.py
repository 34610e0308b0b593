"""Inverse-closed connection sets and Cayley graphs.

An inverse-closed subset of G is fixed by c(G) free binary choices: one per
element of order at most 2 and one per pair {x, x^-1}. The canonical index of
a set is the integer whose bit k records choice k, with the order-<=2 slots
first (by element index) and then the pair slots (keyed by the smaller element
of the pair). Indices 0..2^c(G)-1 therefore enumerate every set exactly once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .groups import BudgetError, FiniteGroup, GroupError, bits_to_list

DEFAULT_MAX_C = 30


@dataclass(frozen=True)
class ConnectionSet:
    """An inverse-closed subset of ``parent`` stored as a bit vector."""

    parent: FiniteGroup = field(compare=False, repr=False)
    bits: int

    @classmethod
    def from_elements(cls, G: FiniteGroup, elements) -> "ConnectionSet":
        bits = 0
        for g in elements:
            if not 0 <= g < G.order:
                raise IndexError(f"element {g} not in group of order {G.order}")
            bits |= 1 << g
        S = cls(G, bits)
        if not S.is_inverse_closed():
            raise GroupError("connection set is not inverse-closed")
        return S

    @classmethod
    def from_hex(cls, G: FiniteGroup, text: str) -> "ConnectionSet":
        bits = int(text, 16)
        if bits >> G.order:
            raise ValueError("hex bit vector has bits beyond the group order")
        S = cls(G, bits)
        if not S.is_inverse_closed():
            raise GroupError("connection set is not inverse-closed")
        return S

    def elements(self) -> list[int]:
        return bits_to_list(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, g: int) -> bool:
        return bool(self.bits >> g & 1)

    def is_inverse_closed(self) -> bool:
        inv = self.parent.inv
        return all(self.bits >> inv[g] & 1 for g in self.elements())

    def to_hex(self) -> str:
        return format(self.bits, f"0{max(1, (self.parent.order + 3) // 4)}x")


class SetCodec:
    """Bijection between inverse-closed subsets of G and 0..2^c(G)-1."""

    def __init__(self, G: FiniteGroup):
        self.group = G
        slots = [1 << g for g in range(G.order) if G.elem_order[g] <= 2]
        for g in range(G.order):
            h = G.inv[g]
            if g < h:
                slots.append((1 << g) | (1 << h))
        self.slots: tuple[int, ...] = tuple(slots)
        self.c = len(slots)
        self.size = 1 << self.c
        self._slot_of = {}
        for k, mask in enumerate(slots):
            for g in bits_to_list(mask):
                self._slot_of[g] = k

    def decode_bits(self, index: int) -> int:
        bits = 0
        k = 0
        while index:
            if index & 1:
                bits |= self.slots[k]
            index >>= 1
            k += 1
        return bits

    def decode(self, index: int) -> ConnectionSet:
        if not 0 <= index < self.size:
            raise IndexError(f"index {index} outside [0, {self.size})")
        return ConnectionSet(self.group, self.decode_bits(index))

    def encode(self, S: ConnectionSet) -> int:
        if not S.is_inverse_closed():
            raise GroupError("cannot encode a set that is not inverse-closed")
        index = 0
        for g in S.elements():
            index |= 1 << self._slot_of[g]
        return index

    def slot_of(self, g: int) -> int:
        return self._slot_of[g]


def enumerate_inverse_closed(G: FiniteGroup, max_c: int = DEFAULT_MAX_C) -> Iterator[ConnectionSet]:
    """Every inverse-closed subset of G, in canonical index order."""
    codec = SetCodec(G)
    if codec.c > max_c:
        raise BudgetError(f"c(G) = {codec.c} exceeds enumeration budget {max_c}")
    # index = hi << half | lo, so the bit vector is an OR of two table entries
    half = codec.c // 2
    low = _subset_unions(codec.slots[:half])
    high = _subset_unions(codec.slots[half:])
    make = ConnectionSet
    for h in high:
        for lo in low:
            yield make(G, h | lo)


def _subset_unions(masks) -> list[int]:
    """OR of every subset of ``masks``, indexed by the subset's bit pattern."""
    out = [0]
    for m in masks:
        out += [x | m for x in out]
    return out


def partition_range(G: FiniteGroup, worker_count: int) -> list[tuple[int, int]]:
    """Split [0, 2^c(G)) into ``worker_count`` near-equal contiguous blocks."""
    return split_range(0, SetCodec(G).size, worker_count)


def split_range(start: int, end: int, parts: int) -> list[tuple[int, int]]:
    if parts < 1:
        raise ValueError("worker_count must be >= 1")
    total = end - start
    q, r = divmod(total, parts)
    out = []
    lo = start
    for k in range(parts):
        hi = lo + q + (1 if k < r else 0)
        out.append((lo, hi))
        lo = hi
    return out


@dataclass(frozen=True)
class CayleyGraph:
    """Γ(G, S): vertices are group elements, {r, t} is an edge iff t·r^-1 ∈ S."""

    group: FiniteGroup = field(repr=False)
    connection_set: ConnectionSet
    adjacency: tuple[int, ...] = field(repr=False)
    dropped_loop: bool = False

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def degree(self) -> int:
        return self.adjacency[0].bit_count() if self.adjacency else 0

    def has_edge(self, r: int, t: int) -> bool:
        return bool(self.adjacency[r] >> t & 1)

    def neighbours(self, r: int) -> list[int]:
        return bits_to_list(self.adjacency[r])


def adjacency_from_bits(G: FiniteGroup, bits: int) -> tuple[int, ...]:
    """Adjacency rows of Γ(G, S) for S given as a bit vector (identity ignored)."""
    t = G.table
    elems = bits_to_list(bits & ~1)
    rows = []
    for r in range(G.order):
        row = 0
        for s in elems:
            row |= 1 << t[s][r]
        rows.append(row)
    return tuple(rows)


def build_graph(G: FiniteGroup, S: ConnectionSet) -> CayleyGraph:
    if not S.is_inverse_closed():
        raise GroupError("build_graph needs an inverse-closed connection set")
    return CayleyGraph(G, S, adjacency_from_bits(G, S.bits), dropped_loop=bool(S.bits & 1))


def right_translation(G: FiniteGroup, g: int) -> tuple[int, ...]:
    """The vertex permutation r -> r·g, as an image tuple."""
    if not 0 <= g < G.order:
        raise IndexError(f"element {g} not in group of order {G.order}")
    return tuple(G.table[r][g] for r in range(G.order))
