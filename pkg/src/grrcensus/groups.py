"""Finite groups stored as dense Cayley tables.

Elements are the integers ``0..n-1`` and the identity is always ``0``.
Every constructor documents how it lays out its elements so that labels,
connection-set indices and census output are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

DEFAULT_MAX_ORDER = 64


class GroupError(ValueError):
    """Invalid group construction or a structural precondition failure."""


class BudgetError(RuntimeError):
    """A computation was asked to run beyond its configured size budget."""


def _element_orders(table: Sequence[Sequence[int]]) -> tuple[int, ...]:
    orders = []
    for g in range(len(table)):
        k, x = 1, g
        while x != 0:
            x = table[x][g]
            k += 1
        orders.append(k)
    return tuple(orders)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``table[g][h]`` is the index of ``g*h``. Construction checks the identity
    and inverse laws; associativity is checked by :meth:`check_axioms`.
    """

    table: tuple[tuple[int, ...], ...]
    label: str = "G"
    inv: tuple[int, ...] = field(init=False)
    elem_order: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise GroupError("a group needs at least one element")
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        inv = [-1] * n
        for g, row in enumerate(table):
            if len(row) != n:
                raise GroupError("multiplication table is not square")
            if row[0] != g or table[0][g] != g:
                raise GroupError(f"0 is not a two-sided identity (fails at {g})")
            if sorted(row) != list(range(n)):
                raise GroupError(f"row {g} is not a permutation")
            h = row.index(0)
            if table[h][g] != 0:
                raise GroupError(f"element {g} has no two-sided inverse")
            inv[g] = h
        object.__setattr__(self, "inv", tuple(inv))
        object.__setattr__(self, "elem_order", _element_orders(table))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def __len__(self) -> int:
        return len(self.table)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label!r}, order={self.order})"

    def mul(self, g: int, h: int) -> int:
        n = self.order
        if not (0 <= g < n and 0 <= h < n):
            raise IndexError(f"element index out of range for group of order {n}")
        return self.table[g][h]

    def power(self, g: int, k: int) -> int:
        k %= self.elem_order[g]
        x = 0
        for _ in range(k):
            x = self.table[x][g]
        return x

    def conj(self, g: int, h: int) -> int:
        """Return ``h^-1 g h``."""
        t = self.table
        return t[t[self.inv[h]][g]][h]

    def check_axioms(self, samples: int | None = None, seed: int = 0) -> None:
        """Verify associativity, exhaustively or on ``samples`` random triples."""
        t, n = self.table, self.order
        if samples is None:
            triples: Iterable[tuple[int, int, int]] = (
                (a, b, c) for a in range(n) for b in range(n) for c in range(n))
        else:
            import random
            rng = random.Random(seed)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(samples))
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError(f"associativity fails at ({a}, {b}, {c})")

    def is_abelian(self) -> bool:
        t, n = self.table, self.order
        return all(t[a][b] == t[b][a] for a in range(n) for b in range(a + 1, n))

    def exponent(self) -> int:
        return math.lcm(*self.elem_order)

    def all(self) -> "GroupElementSet":
        return GroupElementSet(self, (1 << self.order) - 1)

    def subset(self, elements: Iterable[int]) -> "GroupElementSet":
        return GroupElementSet.from_elements(self, elements)


@dataclass(frozen=True)
class GroupElementSet:
    """A subset of a group stored as a bit vector (bit g set iff g is a member)."""

    parent: FiniteGroup = field(compare=False, repr=False)
    bits: int

    @classmethod
    def from_elements(cls, parent: FiniteGroup, elements: Iterable[int]) -> "GroupElementSet":
        bits = 0
        for g in elements:
            if not 0 <= g < parent.order:
                raise IndexError(f"element {g} not in group of order {parent.order}")
            bits |= 1 << g
        return cls(parent, bits)

    def __contains__(self, g: int) -> bool:
        return bool(self.bits >> g & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def elements(self) -> list[int]:
        return bits_to_list(self.bits)

    def is_inverse_closed(self) -> bool:
        inv = self.parent.inv
        return all(self.bits >> inv[g] & 1 for g in self.elements())

    def is_subgroup(self) -> bool:
        if not self.bits & 1:
            return False
        t = self.parent.table
        elems = self.elements()
        return all(self.bits >> t[a][b] & 1 for a in elems for b in elems)


def bits_to_list(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


@dataclass(frozen=True)
class GroupAutomorphism:
    """An automorphism given by the image of every element."""

    parent: FiniteGroup = field(compare=False, repr=False)
    images: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.images[g]

    def then(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """Apply ``self`` first and ``other`` second."""
        return GroupAutomorphism(self.parent, tuple(other.images[x] for x in self.images))

    def inverse(self) -> "GroupAutomorphism":
        out = [0] * len(self.images)
        for g, h in enumerate(self.images):
            out[h] = g
        return GroupAutomorphism(self.parent, tuple(out))

    def is_identity(self) -> bool:
        return all(g == h for g, h in enumerate(self.images))


def is_automorphism(G: FiniteGroup, images: Sequence[int]) -> bool:
    n = G.order
    if len(images) != n or sorted(images) != list(range(n)) or images[0] != 0:
        return False
    t = G.table
    return all(images[t[g][h]] == t[images[g]][images[h]]
               for g in range(n) for h in range(n))


@dataclass(frozen=True)
class DicDecomposition:
    """Witness that a group is ``Dic(A, y, x)``."""

    A: GroupElementSet
    y: int
    x: int

    @property
    def parent(self) -> FiniteGroup:
        return self.A.parent


# ---------------------------------------------------------------- constructors

def cyclic(n: int) -> FiniteGroup:
    """Cyclic group of order n; element k is a^k."""
    if n < 1:
        raise GroupError("cyclic group order must be >= 1")
    return FiniteGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)),
                       label=f"C{n}")


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; index k + n*e encodes r^k s^e."""
    if n < 3:
        raise GroupError("dihedral(n) needs n >= 3 (order 2n)")
    table = []
    for e in (0, 1):
        for a in range(n):
            row = []
            for f in (0, 1):
                for b in range(n):
                    k = (a - b) % n if e else (a + b) % n
                    row.append(k + n * ((e + f) % 2))
            table.append(tuple(row))
    return FiniteGroup(tuple(table), label=f"D{n}")


def elementary_abelian(k: int) -> FiniteGroup:
    """C2^k; element indices are bit vectors and the product is XOR."""
    if k < 0:
        raise GroupError("rank must be >= 0")
    n = 1 << k
    return FiniteGroup(tuple(tuple(i ^ j for j in range(n)) for i in range(n)),
                       label=f"EA{k}")


def direct_product(G: FiniteGroup, H: FiniteGroup, label: str | None = None) -> FiniteGroup:
    """G x H; the pair (g, h) has index g*|H| + h."""
    m = H.order
    tg, th = G.table, H.table
    table = tuple(
        tuple(tg[g1][g2] * m + th[h1][h2] for g2 in range(G.order) for h2 in range(m))
        for g1 in range(G.order) for h1 in range(m))
    return FiniteGroup(table, label=label or f"{G.label}x{H.label}")


def semidirect_product(N: FiniteGroup, H: FiniteGroup, action: Sequence[Sequence[int]],
                       label: str | None = None) -> FiniteGroup:
    """N ⋊ H where ``action[h]`` is the automorphism of N induced by h.

    The pair (n, h) has index h*|N| + n and (n1,h1)(n2,h2) = (n1·h1(n2), h1h2).
    """
    m = N.order
    act = [tuple(a) for a in action]
    if len(act) != H.order:
        raise GroupError("need one automorphism per element of H")
    for a in act:
        if not is_automorphism(N, a):
            raise GroupError("action contains a non-automorphism")
    for h1 in range(H.order):
        for h2 in range(H.order):
            h = H.table[h1][h2]
            if any(act[h][x] != act[h1][act[h2][x]] for x in range(m)):
                raise GroupError("action is not a homomorphism H -> Aut(N)")
    tn, th = N.table, H.table
    table = tuple(
        tuple(th[h1][h2] * m + tn[n1][act[h1][n2]] for h2 in range(H.order) for n2 in range(m))
        for h1 in range(H.order) for n1 in range(m))
    return FiniteGroup(table, label=label or f"{N.label}:{H.label}")


def dic(A: FiniteGroup, y: int, label: str | None = None) -> tuple[FiniteGroup, DicDecomposition]:
    """Generalised dicyclic group <A, x | x^2 = y, a^x = a^-1>.

    Index a (< |A|) is the element a of A and index |A| + a is a·x.
    """
    if not A.is_abelian():
        raise GroupError("Dic(A, y): A must be abelian")
    if A.order % 2:
        raise GroupError("Dic(A, y): A must have even order")
    if A.exponent() <= 2:
        raise GroupError("Dic(A, y): A must have exponent > 2")
    if not 0 <= y < A.order or A.elem_order[y] != 2:
        raise GroupError(f"Dic(A, y): y = {y} is not an involution of A")
    m = A.order
    ta, inv = A.table, A.inv
    table = []
    for e in (0, 1):
        for a in range(m):
            row = []
            for f in (0, 1):
                for b in range(m):
                    if not e:
                        row.append(ta[a][b] + m * f)
                    elif not f:
                        row.append(ta[a][inv[b]] + m)
                    else:
                        row.append(ta[ta[a][inv[b]]][y])
            table.append(tuple(row))
    G = FiniteGroup(tuple(table), label=label or f"Dic({A.label};y={y})")
    return G, DicDecomposition(GroupElementSet(G, (1 << m) - 1), y, m)


def quaternion() -> FiniteGroup:
    """Q8 as Dic(C4, a^2): indices 0..3 are 1,i,-1,-i and 4..7 are those times j."""
    G, _ = dic(cyclic(4), 2, label="Q8")
    return G


# --------------------------------------------------------------- substructure

def subgroup_closure(G: FiniteGroup, gens: Iterable[int]) -> int:
    """Bitmask of the subgroup generated by ``gens``."""
    t = G.table
    gens = [g for g in gens if g]
    members = 1
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = t[x][g]
                if not members >> y & 1:
                    members |= 1 << y
                    nxt.append(y)
        frontier = nxt
    return members


def conjugacy_classes(G: FiniteGroup) -> list[int]:
    seen = 0
    classes = []
    for g in range(G.order):
        if seen >> g & 1:
            continue
        cls = 0
        for h in range(G.order):
            cls |= 1 << G.conj(g, h)
        seen |= cls
        classes.append(cls)
    return classes


def _product_set(G: FiniteGroup, a: int, b: int) -> int:
    t = G.table
    out = 0
    for x in bits_to_list(a):
        row = t[x]
        for y in bits_to_list(b):
            out |= 1 << row[y]
    return out


def normal_subgroups(G: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> list[GroupElementSet]:
    """All normal subgroups, sorted by size and then by bit vector.

    Every normal subgroup is the join of the normal closures of the conjugacy
    classes it contains, so closing those under products finds them all.
    """
    if G.order > max_order:
        raise BudgetError(f"normal_subgroups: order {G.order} exceeds budget {max_order}")
    closures = {subgroup_closure(G, bits_to_list(c)) for c in conjugacy_classes(G)}
    found = set(closures) | {1}
    frontier = list(found)
    while frontier:
        nxt = []
        for a in frontier:
            for b in closures:
                c = _product_set(G, a, b)
                if c not in found:
                    found.add(c)
                    nxt.append(c)
        frontier = nxt
    return [GroupElementSet(G, b) for b in sorted(found, key=lambda b: (b.bit_count(), b))]


def is_normal(G: FiniteGroup, N: GroupElementSet) -> bool:
    if not N.is_subgroup():
        return False
    return all(N.bits >> G.conj(n, g) & 1 for n in N.elements() for g in range(G.order))


def induced_subgroup(G: FiniteGroup, H: GroupElementSet, label: str | None = None
                     ) -> tuple[FiniteGroup, list[int]]:
    """The subgroup H as a standalone group plus the map new index -> old index.

    Elements keep their relative order from G, so 0 stays the identity.
    """
    elems = H.elements()
    pos = {g: i for i, g in enumerate(elems)}
    t = G.table
    table = tuple(tuple(pos[t[a][b]] for b in elems) for a in elems)
    return FiniteGroup(table, label=label or f"{G.label}[{len(elems)}]"), elems


def quotient_group(G: FiniteGroup, N: GroupElementSet) -> tuple[FiniteGroup, tuple[int, ...], tuple[int, ...]]:
    """G/N on coset indices 0..b-1 (index 0 is N itself).

    Cosets are ordered by their minimal element, which is also the chosen
    representative. Returns (quotient, coset_of, representatives).
    """
    if not is_normal(G, N):
        raise GroupError("quotient_group: N is not a normal subgroup")
    n_elems = N.elements()
    t = G.table
    coset_of = [-1] * G.order
    reps = []
    for g in range(G.order):
        if coset_of[g] >= 0:
            continue
        idx = len(reps)
        reps.append(g)
        for m in n_elems:
            coset_of[t[g][m]] = idx
    table = tuple(tuple(coset_of[t[a][b]] for b in reps) for a in reps)
    Q = FiniteGroup(table, label=f"{G.label}/{len(n_elems)}")
    return Q, tuple(coset_of), tuple(reps)


def involution_part(G: FiniteGroup, X: GroupElementSet) -> GroupElementSet:
    """I(X): members of X of order at most 2."""
    bits = 0
    for g in X.elements():
        if G.elem_order[g] <= 2:
            bits |= 1 << g
    return GroupElementSet(G, bits)


def c_value(G: FiniteGroup, X: GroupElementSet) -> int:
    """c(X) = (|X| + |I(X)|) / 2 for an inverse-closed X."""
    if not X.is_inverse_closed():
        raise GroupError("c_value needs an inverse-closed set")
    return (len(X) + len(involution_part(G, X))) // 2


def is_abelian_exp_gt2(G: FiniteGroup) -> bool:
    return G.is_abelian() and max(G.elem_order) > 2


# --------------------------------------------------------------- automorphisms

def generating_chain(G: FiniteGroup) -> list[int]:
    """Greedy generating sequence: each new generator enlarges the subgroup
    as much as possible, so the chain has length at most log2|G|."""
    gens: list[int] = []
    current = 1
    full = (1 << G.order) - 1
    while current != full:
        best, best_bits = -1, current
        for g in range(G.order):
            if current >> g & 1:
                continue
            bits = subgroup_closure(G, gens + [g])
            if bits.bit_count() > best_bits.bit_count():
                best, best_bits = g, bits
        gens.append(best)
        current = best_bits
    return gens


def _extend_homomorphism(G: FiniteGroup, H: FiniteGroup, gens: Sequence[int],
                         images: Sequence[int]) -> list[int] | None:
    """Extend gens -> images to a homomorphism on <gens>; None on conflict."""
    tg, th = G.table, H.table
    phi = [-1] * G.order
    phi[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in zip(gens, images):
                y = tg[x][g]
                im = th[phi[x]][h]
                if phi[y] < 0:
                    phi[y] = im
                    nxt.append(y)
                elif phi[y] != im:
                    return None
        frontier = nxt
    return phi


def _homomorphisms(G: FiniteGroup, H: FiniteGroup, injective: bool) -> Iterator[list[int]]:
    chain = generating_chain(G)
    by_order: dict[int, list[int]] = {}
    for h in range(H.order):
        by_order.setdefault(H.elem_order[h], []).append(h)
    tg, th = G.table, H.table

    def rec(k: int, images: list[int]) -> Iterator[list[int]]:
        if k == len(chain):
            phi = _extend_homomorphism(G, H, chain, images)
            if phi is None or (injective and len(set(phi)) != G.order):
                return
            if all(phi[tg[a][b]] == th[phi[a]][phi[b]]
                   for a in range(G.order) for b in range(G.order)):
                yield phi
            return
        g = chain[k]
        targets = by_order.get(G.elem_order[g], []) if injective else range(H.order)
        for h in targets:
            images.append(h)
            if _extend_homomorphism(G, H, chain[:k + 1], images) is not None:
                yield from rec(k + 1, images)
            images.pop()

    yield from rec(0, [])


def automorphism_group(G: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> list[GroupAutomorphism]:
    """Every automorphism of G, identity first."""
    if G.order > max_order:
        raise BudgetError(f"automorphism_group: order {G.order} exceeds budget {max_order}")
    auts = [GroupAutomorphism(G, tuple(phi)) for phi in _homomorphisms(G, G, injective=True)]
    auts.sort(key=lambda a: a.images)
    if G.order > 1:
        assert len(auts) <= 2 ** (math.log2(G.order) ** 2) + 1e-9
    return auts


def is_isomorphic(G: FiniteGroup, H: FiniteGroup) -> bool:
    if G.order != H.order or sorted(G.elem_order) != sorted(H.elem_order):
        return False
    return next(_homomorphisms(G, H, injective=True), None) is not None


# -------------------------------------------------------- dicyclic structure

def index_two_subgroups(G: FiniteGroup) -> list[int]:
    if G.order % 2:
        return []
    squares = subgroup_closure(G, {G.table[g][g] for g in range(G.order)})
    # commutators as well, so that the quotient is elementary abelian
    t, inv = G.table, G.inv
    comms = {t[t[inv[a]][inv[b]]][t[a][b]] for a in range(G.order) for b in range(G.order)}
    Q = subgroup_closure(G, bits_to_list(squares) + list(comms))
    Qset = GroupElementSet(G, Q)
    V, coset_of, reps = quotient_group(G, Qset)
    basis = generating_chain(V)
    # coordinates of each element of V over the basis
    coords = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for v in frontier:
            for k, b in enumerate(basis):
                w = V.table[v][b]
                if w not in coords:
                    coords[w] = coords[v] ^ (1 << k)
                    nxt.append(w)
        frontier = nxt
    out = []
    for functional in range(1, 1 << len(basis)):
        bits = 0
        for g in range(G.order):
            if (coords[coset_of[g]] & functional).bit_count() % 2 == 0:
                bits |= 1 << g
        out.append(bits)
    return sorted(out)


def is_generalized_dicyclic(G: FiniteGroup) -> list[DicDecomposition]:
    """One decomposition (A, y, x) per abelian index-2 subgroup A that works."""
    out = []
    t = G.table
    for bits in index_two_subgroups(G):
        A = GroupElementSet(G, bits)
        elems = A.elements()
        if any(t[a][b] != t[b][a] for a in elems for b in elems):
            continue
        if max(G.elem_order[a] for a in elems) <= 2:
            continue
        x = next(g for g in range(G.order) if not bits >> g & 1)
        y = t[x][x]
        if G.elem_order[y] != 2:
            continue
        if all(G.conj(a, x) == G.inv[a] for a in elems):
            out.append(DicDecomposition(A, y, x))
    return out


def bar_iota(d: DicDecomposition) -> GroupAutomorphism:
    """Automorphism fixing A pointwise and sending a·x to a·x^-1."""
    G = d.parent
    # a·x^-1 = (a·x)·x^-2 = (a·x)·y since y is an involution
    images = tuple(g if g in d.A else G.table[g][d.y] for g in range(G.order))
    if not is_automorphism(G, images):
        raise GroupError("bar_iota: decomposition witness does not give an automorphism")
    return GroupAutomorphism(G, images)


def inversion_map(G: FiniteGroup) -> tuple[int, ...]:
    return G.inv


def is_q8_times_elementary(G: FiniteGroup) -> bool:
    """Whether G is isomorphic to Q8 x C2^l for some l >= 0."""
    n = G.order
    if n < 8 or n & (n - 1):
        return False
    ref = quaternion()
    ell = n.bit_length() - 4
    if ell:
        ref = direct_product(ref, elementary_abelian(ell))
    return is_isomorphic(G, ref)


# ----------------------------------------------------------- named catalog

def alternating4() -> FiniteGroup:
    """A4 = C2^2 ⋊ C3 with the generator cycling the three involutions."""
    V = elementary_abelian(2)
    rot = (0, 2, 3, 1)
    act = [(0, 1, 2, 3), rot, tuple(rot[rot[i]] for i in range(4))]
    return semidirect_product(V, cyclic(3), act, label="A4")


def _cyclic_by_c2(n: int, k: int, label: str) -> FiniteGroup:
    return semidirect_product(cyclic(n), cyclic(2),
                              [tuple(range(n)), tuple((k * i) % n for i in range(n))],
                              label=label)


def semidihedral(n: int) -> FiniteGroup:
    """Semidihedral group of order n = 2^m >= 16: C_{n/2} ⋊ C2, a -> a^(n/4 - 1)."""
    if n < 16 or n & (n - 1):
        raise GroupError("semidihedral order must be a power of two >= 16")
    return _cyclic_by_c2(n // 2, n // 4 - 1, f"SD{n}")


def modular(n: int) -> FiniteGroup:
    """Modular group of order n = 2^m >= 16: C_{n/2} ⋊ C2, a -> a^(n/4 + 1)."""
    if n < 16 or n & (n - 1):
        raise GroupError("modular group order must be a power of two >= 16")
    return _cyclic_by_c2(n // 2, n // 4 + 1, f"M{n}")


def pauli() -> FiniteGroup:
    """Pauli group (central product C4∘D4) as (C4 x C2) ⋊ C2.

    With C4 x C2 = <i> x <X>, the outer generator Z fixes i and sends X to -X.
    """
    base = direct_product(cyclic(4), cyclic(2))
    # index of (a, b) is 2a + b; (a, b) -> (a + 2b, b)
    flip = tuple(2 * ((g // 2 + 2 * (g % 2)) % 4) + g % 2 for g in range(8))
    return semidirect_product(base, cyclic(2), [tuple(range(8)), flip], label="Pauli")


def c2sq_by_c4() -> FiniteGroup:
    """(C2 x C2) ⋊ C4 with the generator swapping the two C2 factors."""
    V = elementary_abelian(2)
    swap = (0, 2, 1, 3)
    ident = (0, 1, 2, 3)
    return semidirect_product(V, cyclic(4), [ident, swap, ident, swap], label="EA2sC4")


def c4_by_c4() -> FiniteGroup:
    """C4 ⋊ C4 with the generator inverting the normal C4.

    This is the group <x, y | x^4 = y^4 = (xy)^4 = 1, x^2 = y^2> of order 16.
    """
    inv4 = (0, 3, 2, 1)
    ident = (0, 1, 2, 3)
    return semidirect_product(cyclic(4), cyclic(4), [ident, inv4, ident, inv4], label="C4sC4")
