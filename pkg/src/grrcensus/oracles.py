"""Brute-force oracles for the counting lemmas behind the census bounds.

Every oracle computes an exact count by exhaustion and compares it with the
stated bound, after first testing the structural shapes under which the bound
is allowed to fail. Outcomes are one of

* ``BOUND_HOLDS``: no exceptional shape applies and the count obeys the bound;
* ``EXCEPTIONAL``: an exceptional shape applies (the witness records which);
* ``VIOLATION``: neither, i.e. a counterexample to the counting statement.

Bounds of the form ``q·|N|`` are compared as exact rationals and bounds of
the form ``2^e`` are compared exactly through integer powers.

Coset conventions: for a normal subgroup N of R the cosets are numbered
0..b-1 as in :func:`groups.quotient_group`, coset 0 is N itself, and
``reps[k]`` is the chosen representative of coset k (``reps[0]`` is the
identity). A vertex u of coset i is written ``u = reps[i]·k_u`` with k_u in N.
"""
from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import groups as gr
from .cayley import SetCodec, adjacency_from_bits
from .groups import (BudgetError, DicDecomposition, FiniteGroup, GroupAutomorphism,
                     GroupElementSet, bits_to_list)

BOUND_HOLDS = "BOUND_HOLDS"
EXCEPTIONAL = "EXCEPTIONAL"
VIOLATION = "VIOLATION"

MAX_EXHAUSTIVE_C = 24
CHUNK = 1 << 18
THREE_QUARTERS = Fraction(3, 4)
LARGE_ORBIT_RATE = Fraction(1, 50)


class PreconditionError(ValueError):
    """The inputs do not satisfy the hypotheses of the counting statement."""


class OracleMismatch(AssertionError):
    """Two independent computations of the same quantity disagree."""


@dataclass(frozen=True)
class TrichotomyOutcome:
    lemma_id: str
    case_tag: str
    exact_count: int
    bound_value: Fraction | None = None
    bound_log2: Fraction | None = None
    exceptional_witness: dict | None = None
    readings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.case_tag == BOUND_HOLDS and not self.within_bound():
            raise OracleMismatch(f"{self.lemma_id}: BOUND_HOLDS with count above the bound")

    @property
    def holds(self) -> bool:
        return self.case_tag != VIOLATION

    @property
    def clause(self) -> str:
        return self.exceptional_witness["clause"] if self.exceptional_witness else ""

    def within_bound(self) -> bool:
        if self.bound_value is not None:
            return self.exact_count <= self.bound_value
        if self.bound_log2 is not None:
            return pow2_at_least(self.exact_count, self.bound_log2)
        return True

    def bound_text(self) -> str:
        if self.bound_value is not None:
            return str(self.bound_value)
        if self.bound_log2 is not None:
            return f"2^{self.bound_log2}"
        return ""


def pow2_at_least(count: int, exponent: Fraction) -> bool:
    """Exactly decide count <= 2^exponent for a rational exponent."""
    if count <= 0:
        return True
    p, q = exponent.numerator, exponent.denominator
    if p >= 0:
        return count ** q <= 1 << p
    return count ** q << -p <= 1


def _verdict(lemma_id: str, count: int, clauses: list[dict], *, bound_value=None,
             bound_log2=None, readings=None) -> TrichotomyOutcome:
    readings = dict(readings or {})
    if clauses:
        tag = EXCEPTIONAL
        witness = dict(clauses[0])
        if len(clauses) > 1:
            witness["also"] = [c["clause"] for c in clauses[1:]]
    else:
        witness = None
        ok = count <= bound_value if bound_value is not None else pow2_at_least(count, bound_log2)
        tag = BOUND_HOLDS if ok else VIOLATION
    return TrichotomyOutcome(lemma_id, tag, count, bound_value, bound_log2, witness, readings)


def _as_images(G: FiniteGroup, alpha) -> tuple[int, ...]:
    images = alpha.images if isinstance(alpha, GroupAutomorphism) else tuple(alpha)
    if not gr.is_automorphism(G, images):
        raise PreconditionError("alpha is not an automorphism of N")
    return images


def _check_element(G: FiniteGroup, t: int, name: str = "t"):
    if not 0 <= t < G.order:
        raise PreconditionError(f"{name} = {t} is not an element of {G.label}")


# ------------------------------------------------------------ product counts

def product_equation_count(N: FiniteGroup, alpha, t: int) -> TrichotomyOutcome:
    """Count {n in N : n·alpha(n) = t} against 3|N|/4.

    Exceptional shape: N abelian, t = 1 and alpha inverts every element.
    """
    a = _as_images(N, alpha)
    _check_element(N, t)
    clauses = []
    if N.is_abelian() and t == 0 and a == N.inv:
        clauses.append({"clause": "abelian-inversion", "t": t})
    count = sum(1 for n in range(N.order) if N.table[n][a[n]] == t)
    return _verdict("icecream", count, clauses, bound_value=THREE_QUARTERS * N.order)


def quotient_equation_count(N: FiniteGroup, alpha, t: int) -> TrichotomyOutcome:
    """Count {n in N : n·alpha(n)^-1 = t} against 3|N|/4.

    Exceptional shape: t = 1 and alpha is the identity.
    """
    a = _as_images(N, alpha)
    _check_element(N, t)
    clauses = []
    if t == 0 and all(g == h for g, h in enumerate(a)):
        clauses.append({"clause": "identity", "t": t})
    count = sum(1 for n in range(N.order) if N.table[n][N.inv[a[n]]] == t)
    return _verdict("gelato", count, clauses, bound_value=THREE_QUARTERS * N.order)


icecream_count = product_equation_count
gelato_count = quotient_equation_count


def product_counts_all_t(N: FiniteGroup, alpha_images: Sequence[int], invert: bool) -> list[int]:
    """Counts for every t at once (vectorised sweep helper)."""
    tab = np.asarray(N.table)
    a = np.asarray(alpha_images)
    if invert:
        a = np.asarray(N.inv)[a]
    vals = tab[np.arange(N.order), a]
    return np.bincount(vals, minlength=N.order).tolist()


# ------------------------------------------------- exhaustive set enumeration

def _index_chunks(c: int) -> Iterator[np.ndarray]:
    size = 1 << c
    for lo in range(0, size, CHUNK):
        yield np.arange(lo, min(size, lo + CHUNK), dtype=np.uint64)


def _decode_chunk(slots: Sequence[int], idx: np.ndarray) -> np.ndarray:
    bits = np.zeros(len(idx), dtype=np.uint64)
    for k, mask in enumerate(slots):
        bits |= ((idx >> np.uint64(k)) & np.uint64(1)) * np.uint64(mask)
    return bits


def _image_bits(bits: np.ndarray, perm: Sequence[int], domain: Iterable[int] | None = None) -> np.ndarray:
    out = np.zeros_like(bits)
    one = np.uint64(1)
    for g in (range(len(perm)) if domain is None else domain):
        out |= ((bits >> np.uint64(g)) & one) << np.uint64(perm[g])
    return out


def _check_budget(c: int, max_c: int):
    if c > max_c:
        raise BudgetError(f"exhaustive count needs 2^{c} sets, budget is c <= {max_c}")


def count_invariant_sets(T: FiniteGroup, perm: Sequence[int], max_c: int = MAX_EXHAUSTIVE_C) -> int:
    """Number of inverse-closed X of T with X^perm = X, by exhaustion."""
    if T.order > 64:
        raise BudgetError("exhaustive counts are limited to groups of order <= 64")
    codec = SetCodec(T)
    _check_budget(codec.c, max_c)
    total = 0
    for idx in _index_chunks(codec.c):
        bits = _decode_chunk(codec.slots, idx)
        total += int(np.count_nonzero(_image_bits(bits, perm) == bits))
    return total


def count_invariant_sets_by_orbits(T: FiniteGroup, perm: Sequence[int]) -> int:
    """Same count via orbits: X must be a union of orbits of <perm, inversion>."""
    seen = [False] * T.order
    orbits = 0
    for start in range(T.order):
        if seen[start]:
            continue
        orbits += 1
        stack = [start]
        seen[start] = True
        while stack:
            g = stack.pop()
            for h in (perm[g], T.inv[g]):
                if not seen[h]:
                    seen[h] = True
                    stack.append(h)
    return 1 << orbits


# ---------------------------------------------------- index-2 twisted maps

def _coset_parts(T: FiniteGroup, N: GroupElementSet, gamma: int, t: int):
    if N.parent is not T:
        N = GroupElementSet(T, N.bits)
    if not N.is_subgroup() or 2 * len(N) != T.order:
        raise PreconditionError("N must be a subgroup of index 2 in T")
    if gamma in N:
        raise PreconditionError("gamma must lie outside N")
    if t not in N:
        raise PreconditionError("t must lie in N")
    return N


def _restriction_images(T: FiniteGroup, N: GroupElementSet, restriction: Mapping[int, int]) -> dict:
    elems = N.elements()
    images = {n: restriction[n] for n in elems} if all(n in restriction for n in elems) else None
    if images is None or sorted(images.values()) != elems:
        raise PreconditionError("the restriction must permute N")
    return images


def twisted_map(T: FiniteGroup, N: GroupElementSet, gamma: int, t: int,
                restriction: Mapping[int, int], twist: Sequence[int] | None = None) -> tuple[int, ...]:
    """alpha_t on T: restriction on N and gamma·n -> gamma·t·twist(n) on gamma·N."""
    images = _restriction_images(T, N, restriction)
    tab = T.table
    out = [0] * T.order
    gi = T.inv[gamma]
    for g in range(T.order):
        if g in N:
            out[g] = images[g]
        else:
            n = tab[gi][g]
            m = n if twist is None else twist[n]
            out[g] = tab[tab[gamma][t]][m]
    return tuple(out)


def restriction_identity(N: GroupElementSet) -> dict[int, int]:
    return {n: n for n in N}


def restriction_inversion(N: GroupElementSet) -> dict[int, int]:
    inv = N.parent.inv
    return {n: inv[n] for n in N}


def restriction_bar_iota(dec: DicDecomposition) -> dict[int, int]:
    """Fix A pointwise and send each g of N outside A to g·y."""
    T = dec.parent
    N = dicyclic_subgroup(dec)
    return {n: n if n in dec.A else T.table[n][dec.y] for n in N}


def _fixes_or_inverts(T: FiniteGroup, perm: Sequence[int], elems: Iterable[int]) -> bool:
    return all(perm[g] in (g, T.inv[g]) for g in elems)


def _is_elementary_2(G: FiniteGroup, elems: Iterable[int]) -> bool:
    return all(G.elem_order[g] <= 2 for g in elems)


def _squares(G: FiniteGroup, elems: Iterable[int]) -> set[int]:
    return {G.table[g][g] for g in elems}


def _is_c4_times_elementary(G: FiniteGroup, elems: list[int]) -> bool:
    """Abelian of exponent 4 with a single non-identity square."""
    t = G.table
    if any(t[a][b] != t[b][a] for a in elems for b in elems):
        return False
    if max(G.elem_order[g] for g in elems) != 4:
        return False
    return len(_squares(G, elems)) == 2


def _inverts_all(G: FiniteGroup, x: int, elems: Iterable[int]) -> bool:
    return all(G.conj(a, x) == G.inv[a] for a in elems)


def _is_abelian_set(G: FiniteGroup, elems: list[int]) -> bool:
    t = G.table
    return all(t[a][b] == t[b][a] for a in elems for b in elems)


def _is_dic_over(T: FiniteGroup, A: list[int], y: int, x: int) -> bool:
    """Whether T = Dic(A, y, x) for an index-2 subgroup A of T."""
    Aset = set(A)
    return (2 * len(A) == T.order and x not in Aset and y in Aset
            and _is_abelian_set(T, A) and max(T.elem_order[a] for a in A) > 2
            and T.elem_order[y] == 2 and T.table[x][x] == y and _inverts_all(T, x, A))


def _log2_bound(c: int, n: int, denom: int) -> Fraction:
    return Fraction(c) - Fraction(n, denom)


def _finish_twisted(lemma_id: str, T: FiniteGroup, N: GroupElementSet, perm: tuple[int, ...],
                    restriction: Mapping[int, int], clauses: list[dict], bound_log2: Fraction,
                    max_c: int, readings: dict | None = None) -> TrichotomyOutcome:
    count = count_invariant_sets(T, perm, max_c)
    readings = dict(readings or {})
    within = pow2_at_least(count, bound_log2)
    readings["within_bound"] = within
    # An exceptional shape excuses a count above the bound only together with
    # its rider: a fix-or-invert restriction must extend to all of T.
    if clauses and _fixes_or_inverts(T, restriction, N):
        ext = _fixes_or_inverts(T, perm, range(T.order))
        readings["fix_or_invert_extends"] = ext
        if not ext and not within:
            return TrichotomyOutcome(lemma_id, VIOLATION, count, None, bound_log2,
                                     dict(clauses[0], extension_failed=True), readings)
    return _verdict(lemma_id, count, clauses, bound_log2=bound_log2, readings=readings)


def twisted_invariant_count(T: FiniteGroup, N: GroupElementSet, gamma: int, t: int,
                            restriction: Mapping[int, int],
                            max_c: int = MAX_EXHAUSTIVE_C) -> TrichotomyOutcome:
    """Inverse-closed sets invariant under gamma·n -> gamma·t·n.

    Bound 2^(c(T) - |N|/16) unless T = C4 x C2^l with t its only non-identity
    square and N elementary abelian, or T = Dic(N, gamma^2, gamma) with
    t = gamma^2 of order 2, or t = 1.
    """
    N = _coset_parts(T, N, gamma, t)
    perm = twisted_map(T, N, gamma, t, restriction)
    elems = N.elements()
    clauses = []
    everything = list(range(T.order))
    if (T.is_abelian() and T.exponent() == 4 and _squares(T, everything) == {0, t} and t != 0
            and _is_elementary_2(T, elems)):
        clauses.append({"clause": "C4xC2^l", "t": t})
    g2 = T.table[gamma][gamma]
    if T.elem_order[t] == 2 and t == g2 and _is_dic_over(T, elems, g2, gamma):
        clauses.append({"clause": "dicyclic", "t": t, "gamma": gamma})
    if t == 0:
        clauses.append({"clause": "t=1"})
    c = SetCodec(T).c
    return _finish_twisted("aux1", T, N, perm, restriction, clauses,
                           _log2_bound(c, len(N), 16), max_c)


def _side_condition_aux2(T: FiniteGroup, N: GroupElementSet, gamma: int, perm) -> bool:
    if T.elem_order[gamma] == 2:
        return True
    return all(perm[g] == g for g in range(T.order) if g not in N and T.elem_order[g] == 2)


def inverted_twist_invariant_count(T: FiniteGroup, N: GroupElementSet, gamma: int, t: int,
                                   restriction: Mapping[int, int],
                                   max_c: int = MAX_EXHAUSTIVE_C) -> TrichotomyOutcome:
    """Inverse-closed sets invariant under gamma·n -> gamma·t·n^-1, N abelian.

    Bound 2^(c(T) - |N|/24) unless T is abelian with t = gamma^-2, or
    T = Q8 x C2^l over N = C4 x C2^l, or t = gamma^2 with T = (C4 ⋊ C4) x C2^l
    over N = C4 x C2^(l+1).
    """
    N = _coset_parts(T, N, gamma, t)
    elems = N.elements()
    if not _is_abelian_set(T, elems) or max(T.elem_order[n] for n in elems) <= 2:
        raise PreconditionError("N must be abelian of exponent greater than 2")
    perm = twisted_map(T, N, gamma, t, restriction, twist=T.inv)
    if not _side_condition_aux2(T, N, gamma, perm):
        raise PreconditionError("gamma has order > 2 and an involution of gamma·N is moved")
    clauses = []
    g2 = T.table[gamma][gamma]
    if T.is_abelian() and t == T.inv[g2]:
        clauses.append({"clause": "abelian", "t": t})
    if _is_c4_times_elementary(T, elems) and gr.is_q8_times_elementary(T):
        clauses.append({"clause": "Q8xC2^l"})
    readings = {}
    if T.order >= 16 and _is_c4_times_elementary(T, elems):
        ell = (T.order // 16).bit_length() - 1
        if 16 << ell == T.order:
            ref = gr.c4_by_c4()
            if ell:
                ref = gr.direct_product(ref, gr.elementary_abelian(ell))
            if gr.is_isomorphic(T, ref):
                # the group shape alone, without the condition on t
                readings["c4sc4_shape"] = True
                if t == g2:
                    clauses.append({"clause": "C4sC4xC2^l", "t": t})
    c = SetCodec(T).c
    return _finish_twisted("aux2", T, N, perm, restriction, clauses,
                           _log2_bound(c, len(N), 24), max_c, readings)


def dicyclic_subgroup(dec: DicDecomposition) -> GroupElementSet:
    """The subgroup <A, x> of the ambient group of ``dec``."""
    T = dec.parent
    return GroupElementSet(T, gr.subgroup_closure(T, dec.A.elements() + [dec.x]))


def dicyclic_twist_invariant_count(T: FiniteGroup, dec: DicDecomposition, gamma: int, t: int,
                                   restriction: Mapping[int, int],
                                   max_c: int = MAX_EXHAUSTIVE_C) -> TrichotomyOutcome:
    """Inverse-closed sets invariant under gamma·n -> gamma·t·bar_iota(n), N = Dic(A, y, x).

    Bound 2^(c - |N|/24) unless gamma^2 = y = t with gamma inverting A, or
    t = 1 with <gamma, A> abelian and T = Dic(<gamma, A>, y, x). The base c is
    reported both as c(T) (which decides the verdict) and as c(gamma·N).
    """
    if dec.parent is not T:
        raise PreconditionError("the decomposition must live in T")
    A = dec.A.elements()
    if not _is_dic_over_sub(T, A, dec.y, dec.x):
        raise PreconditionError("(A, y, x) is not a generalised dicyclic decomposition")
    N = _coset_parts(T, dicyclic_subgroup(dec), gamma, t)
    if any((restriction[a] in dec.A) != (a in dec.A) for a in N):
        raise PreconditionError("the restriction must preserve A and x·A")
    iota = [g if g in dec.A or g not in N else T.table[g][dec.y] for g in range(T.order)]
    perm = twisted_map(T, N, gamma, t, restriction, twist=iota)
    clauses = []
    y = dec.y
    if T.table[gamma][gamma] == y == t and _inverts_all(T, gamma, A):
        clauses.append({"clause": "gamma^2=y=t", "t": t})
    if t == 0:
        H = bits_to_list(gr.subgroup_closure(T, A + [gamma]))
        if _is_abelian_set(T, H) and _is_dic_over(T, H, y, dec.x):
            clauses.append({"clause": "t=1,dicyclic", "gamma": gamma})
    c_T = SetCodec(T).c
    coset = GroupElementSet(T, ((1 << T.order) - 1) & ~N.bits)
    c_coset = gr.c_value(T, coset)
    alt = _log2_bound(c_coset, len(N), 24)
    out = _finish_twisted("aux3", T, N, perm, restriction, clauses,
                          _log2_bound(c_T, len(N), 24), max_c)
    readings = dict(out.readings)
    readings["coset_base_log2"] = str(alt)
    readings["coset_base_holds"] = pow2_at_least(out.exact_count, alt)
    return TrichotomyOutcome(out.lemma_id, out.case_tag, out.exact_count, out.bound_value,
                             out.bound_log2, out.exceptional_witness, readings)


def _is_dic_over_sub(T: FiniteGroup, A: list[int], y: int, x: int) -> bool:
    Aset = set(A)
    return (x not in Aset and y in Aset and _is_abelian_set(T, A)
            and max(T.elem_order[a] for a in A) > 2 and T.elem_order[y] == 2
            and T.table[x][x] == y and _inverts_all(T, x, A))


alpha_invariant_count_aux1 = twisted_invariant_count
alpha_invariant_count_aux2 = inverted_twist_invariant_count
alpha_invariant_count_aux3 = dicyclic_twist_invariant_count


def dicyclic_index_two(T: FiniteGroup) -> list[DicDecomposition]:
    """Decompositions (A, y, x), inside T, of index-2 subgroups of T."""
    out = []
    for bits in gr.index_two_subgroups(T):
        sub, emb = gr.induced_subgroup(T, GroupElementSet(T, bits))
        for d in gr.is_generalized_dicyclic(sub):
            A = GroupElementSet(T, sum(1 << emb[a] for a in d.A))
            out.append(DicDecomposition(A, emb[d.y], emb[d.x]))
    return out


# ------------------------------------------------------ intersection counts

def _perm_check(n: int, p: Sequence[int], name: str) -> tuple[int, ...]:
    p = tuple(p)
    if sorted(p) != list(range(n)):
        raise PreconditionError(f"{name} is not a permutation of 0..{n - 1}")
    return p


def antisymmetry_witness(f: Sequence[int], g: Sequence[int]) -> list[int] | None:
    """The zero rows I of F - G when that matrix is antisymmetric, else None.

    F and G are the permutation matrices (F[x][f(x)] = 1).
    """
    n = len(f)
    A = np.zeros((n, n), dtype=np.int64)
    A[np.arange(n), list(f)] += 1
    A[np.arange(n), list(g)] -= 1
    if not (A + A.T == 0).all():
        return None
    return [x for x in range(n) if not A[x].any()]


def verify_witness(f: Sequence[int], g: Sequence[int], I: Sequence[int]) -> bool:
    """I is f- and g-invariant, f = g on I and f = g^-1 off I."""
    Iset = set(I)
    ginv = [0] * len(g)
    for x, y in enumerate(g):
        ginv[y] = x
    return (all(f[x] in Iset and g[x] in Iset and f[x] == g[x] for x in I)
            and all(f[x] == ginv[x] for x in range(len(f)) if x not in Iset))


def equal_intersection_count(f: Sequence[int], g: Sequence[int], max_size: int = MAX_EXHAUSTIVE_C) -> int:
    """Number of subsets S of {0..n-1} with |S ∩ S^f| = |S ∩ S^g|."""
    n = len(f)
    _check_budget(n, max_size)
    total = 0
    for bits in _index_chunks(n):
        a = np.bitwise_count(bits & _image_bits(bits, f))
        b = np.bitwise_count(bits & _image_bits(bits, g))
        total += int(np.count_nonzero(a == b))
    return total


def intersection_trichotomy(X_size: int, f: Sequence[int], g: Sequence[int],
                            max_size: int = MAX_EXHAUSTIVE_C) -> TrichotomyOutcome:
    """|{S : |S ∩ S^f| = |S ∩ S^g|}| <= (3/4)·2^n unless F - G is antisymmetric."""
    f = _perm_check(X_size, f, "f")
    g = _perm_check(X_size, g, "g")
    clauses = []
    I = antisymmetry_witness(f, g)
    readings = {}
    if I is not None:
        ok = verify_witness(f, g, I)
        if not ok:
            raise OracleMismatch("antisymmetry witness fails the structural check")
        clauses.append({"clause": "antisymmetric", "I": I})
    count = equal_intersection_count(f, g, max_size)
    readings["all_subsets_equal"] = count == 1 << X_size
    if I is not None and not readings["all_subsets_equal"]:
        raise OracleMismatch("antisymmetric F - G but some subset breaks the equality")
    return _verdict("trichotomy", count, clauses,
                    bound_value=THREE_QUARTERS * (1 << X_size), readings=readings)


# ------------------------------------------------------------ sigma and psi

class SigmaContext:
    """R with a normal subgroup N and coset representatives (reps[0] = identity)."""

    def __init__(self, R: FiniteGroup, N: GroupElementSet, reps: Sequence[int] | None = None):
        if N.parent is not R:
            N = GroupElementSet(R, N.bits)
        if not gr.is_normal(R, N):
            raise PreconditionError("N must be normal in R")
        if len(N) in (1, R.order):
            raise PreconditionError("N must be a non-identity proper subgroup")
        self.group = R
        self.normal = N
        self.quotient, self.coset_of, default = gr.quotient_group(R, N)
        reps = tuple(default if reps is None else reps)
        if len(reps) != len(default) or reps[0] != 0:
            raise PreconditionError("need one representative per coset, identity first")
        if any(self.coset_of[r] != k for k, r in enumerate(reps)):
            raise PreconditionError("representative k must lie in coset k")
        self.reps = reps
        self.b = len(reps)
        self.coset_bits = [0] * self.b
        for g in range(R.order):
            self.coset_bits[self.coset_of[g]] |= 1 << g
        self.codec = SetCodec(R)

    def decompose(self, u: int) -> tuple[int, int]:
        """(i, k_u) with u = reps[i]·k_u."""
        i = self.coset_of[u]
        return i, self.group.table[self.group.inv[self.reps[i]]][u]

    def shifted_coset(self, i: int, j: int) -> int:
        """Index of the coset j·i^-1."""
        Q = self.quotient
        return Q.table[j][Q.inv[i]]

    def _check(self, u: int, j: int):
        i = self.coset_of[u]
        if i == 0:
            raise PreconditionError("u must lie outside N")
        if not 0 <= j < self.b or j in (0, i):
            raise PreconditionError("j must differ from coset 0 and from the coset of u")


def sigma(ctx: SigmaContext, S, u: int, j: int) -> GroupElementSet:
    """Common neighbours of the identity and u inside coset j.

    Computed as S_j ∩ S_{j·i^-1}·(reps[i]·k_u) and checked against the
    adjacency of the Cayley graph.
    """
    ctx._check(u, j)
    R = ctx.group
    bits = S.bits if hasattr(S, "bits") else S
    i, k = ctx.decompose(u)
    g_u = R.table[ctx.reps[i]][k]
    source = bits & ctx.coset_bits[ctx.shifted_coset(i, j)]
    moved = 0
    for s in bits_to_list(source):
        moved |= 1 << R.table[s][g_u]
    formula = bits & ctx.coset_bits[j] & moved
    adj = adjacency_from_bits(R, bits)
    direct = adj[0] & adj[u] & ctx.coset_bits[j]
    if formula != direct:
        raise OracleMismatch(f"sigma formula {formula:#x} != common neighbours {direct:#x}")
    return GroupElementSet(R, formula)


class SigmaTable:
    """|sigma(S, u, j)| for every inverse-closed S of R, as numpy arrays."""

    def __init__(self, ctx: SigmaContext, max_c: int = MAX_EXHAUSTIVE_C):
        _check_budget(ctx.codec.c, max_c)
        if ctx.group.order > 64:
            raise BudgetError("sigma tables are limited to groups of order <= 64")
        self.ctx = ctx
        idx = np.arange(ctx.codec.size, dtype=np.uint64)
        self.bits = _decode_chunk(ctx.codec.slots, idx)
        self._cache: dict[tuple[int, int], np.ndarray] = {}

    def sizes(self, u: int, j: int) -> np.ndarray:
        key = (u, j)
        if key not in self._cache:
            ctx = self.ctx
            ctx._check(u, j)
            R = ctx.group
            i = ctx.coset_of[u]
            src = bits_to_list(ctx.coset_bits[ctx.shifted_coset(i, j)])
            perm = [0] * R.order
            for s in src:
                perm[s] = R.table[s][u]
            moved = _image_bits(self.bits, perm, domain=src)
            self._cache[key] = np.bitwise_count(self.bits & np.uint64(ctx.coset_bits[j]) & moved)
        return self._cache[key]

    def agree_mask(self, vertices: Sequence[int], js: Iterable[int]) -> np.ndarray:
        mask = np.ones(len(self.bits), dtype=bool)
        for j in js:
            first = self.sizes(vertices[0], j)
            for w in vertices[1:]:
                mask &= self.sizes(w, j) == first
        return mask


def _inverts_N(ctx: SigmaContext, g: int) -> bool:
    return _inverts_all(ctx.group, g, ctx.normal.elements())


def pair_clauses(ctx: SigmaContext, u: int, v: int, j: int,
                 require_even_i: bool = True) -> list[dict]:
    """Structural shapes under which |Psi({u, v}, j)| may exceed 3/4·2^c(R).

    ``require_even_i=False`` drops the parity condition on o(i) from the two
    order-two shapes (used to classify counterexamples to the stated list).
    """
    R, Q = ctx.group, ctx.quotient
    t, inv = R.table, R.inv
    i, k_u = ctx.decompose(u)
    _, k_v = ctx.decompose(v)
    ji = ctx.shifted_coset(i, j)
    o_j, o_ji, o_i = Q.elem_order[j], Q.elem_order[ji], Q.elem_order[i]
    N_elems = ctx.normal.elements()
    out = []
    if Q.table[j][j] == i:
        gj, gi = ctx.reps[j], ctx.reps[i]
        ybar = t[inv[t[gj][gj]]][gi]
        conj = t[t[inv[ybar]][inv[gj]]][ybar]

        def moved(k):
            return t[t[conj][k]][gj]
        central = all(t[w][n] == t[n][w] for w in (u, v) for n in N_elems)
        if k_u == moved(k_v) and k_v == moved(k_u) and central:
            out.append({"clause": "square", "ybar": ybar})
    diff1, diff2 = t[inv[k_v]][k_u], t[inv[k_u]][k_v]
    abelian = _is_abelian_set(R, N_elems)
    for name, cond, rep in (("order-two-j", o_ji > 2 and o_j == 2, ctx.reps[j]),
                            ("order-two-ji", o_ji == 2 and o_j > 2, ctx.reps[ji])):
        if (cond and (o_i % 2 == 0 or not require_even_i) and R.elem_order[rep] == 4
                and t[rep][rep] == diff1 == diff2 and abelian and _inverts_N(ctx, rep)):
            out.append({"clause": name, "rep": rep})
    if o_ji == 2 and o_j == 2:
        out.append({"clause": "both-order-two"})
    return out


def psi_count(ctx: SigmaContext, vertices: Sequence[int], j: int | None = None,
              table: SigmaTable | None = None, max_c: int = MAX_EXHAUSTIVE_C) -> TrichotomyOutcome:
    """Exhaustive size of Psi(vertices, j) with its bound check.

    With a coset index j the bound is 3/4·2^c(R). A pair may instead fall in
    one of the structural shapes of :func:`pair_clauses`; a triple is only
    excused when j and j·i^-1 both have order 2. With ``j=None`` the count is
    the intersection over every admissible j and the bound is
    2^(c(R) - |R|/(50|N|)), which needs o(i) odd for a pair and R/N not an
    elementary abelian 2-group for a triple.
    """
    vertices = list(vertices)
    if len(vertices) not in (2, 3) or len(set(vertices)) != len(vertices):
        raise PreconditionError("need two or three distinct vertices")
    i = ctx.coset_of[vertices[0]]
    if i == 0 or any(ctx.coset_of[w] != i for w in vertices):
        raise PreconditionError("vertices must share a coset other than N")
    table = table or SigmaTable(ctx, max_c)
    c = ctx.codec.c
    Q = ctx.quotient
    if j is None:
        js = [k for k in range(ctx.b) if k not in (0, i)]
        if len(vertices) == 2 and Q.elem_order[i] % 2 == 0:
            raise PreconditionError("the pair bound over all cosets needs o(i) odd")
        if len(vertices) == 3 and _is_elementary_2(Q, range(Q.order)):
            raise PreconditionError("the triple bound needs R/N not elementary abelian of exponent 2")
        count = int(np.count_nonzero(table.agree_mask(vertices, js)))
        rate = LARGE_ORBIT_RATE * Fraction(ctx.group.order, len(ctx.normal))
        return _verdict("psi-all", count, [], bound_log2=Fraction(c) - rate,
                        readings={"i": i, "js": js})
    ctx._check(vertices[0], j)
    count = int(np.count_nonzero(table.agree_mask(vertices, [j])))
    if len(vertices) == 2:
        clauses = pair_clauses(ctx, vertices[0], vertices[1], j)
    else:
        ji = ctx.shifted_coset(i, j)
        clauses = ([{"clause": "both-order-two"}]
                   if Q.elem_order[j] == 2 and Q.elem_order[ji] == 2 else [])
    bound = THREE_QUARTERS * (1 << c)
    readings = {"i": i, "j": j, "within_bound": count <= bound}
    if len(vertices) == 2 and not clauses:
        relaxed = pair_clauses(ctx, vertices[0], vertices[1], j, require_even_i=False)
        if relaxed:
            readings["shape_without_parity"] = relaxed[0]["clause"]
    return _verdict("psi", count, clauses, bound_value=bound, readings=readings)


# ------------------------------------------------------------------- sweeps

SWEEP_COLUMNS = ("lemma_id", "group", "parameters", "outcome", "count", "bound", "exceptional_clause")


@dataclass(frozen=True)
class SweepRow:
    lemma_id: str
    group: str
    parameters: str
    outcome: str
    count: int
    bound: str
    exceptional_clause: str

    @classmethod
    def of(cls, group: str, parameters: str, out: TrichotomyOutcome) -> "SweepRow":
        clause = out.clause
        if out.case_tag == VIOLATION and not clause:
            near = out.readings.get("shape_without_parity") or (
                "C4sC4xC2^l" if out.readings.get("c4sc4_shape") else "")
            clause = f"none;nearest={near}" if near else "none"
        return cls(out.lemma_id, group, parameters, out.case_tag, out.exact_count,
                   out.bound_text(), clause)

    def as_tuple(self) -> tuple:
        return (self.lemma_id, self.group, self.parameters, self.outcome,
                self.count, self.bound, self.exceptional_clause)


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(r.as_tuple())
    return buf.getvalue()


def _catalog(max_order: int, min_order: int = 1) -> list[FiniteGroup]:
    from .catalog import catalog_groups
    return catalog_groups(max_order, min_order)


def sweep_equation_counts(groups: Iterable[FiniteGroup], inverse: bool) -> Iterator[SweepRow]:
    """Every automorphism and every t; fast vectorised counts, verdict per (alpha, t)."""
    lemma = "gelato" if inverse else "icecream"
    fn = quotient_equation_count if inverse else product_equation_count
    for N in groups:
        auts = gr.automorphism_group(N)
        for k, a in enumerate(auts):
            counts = product_counts_all_t(N, a.images, inverse)
            for t in range(N.order):
                exceptional = (t == 0 and a.is_identity()) if inverse else (
                    t == 0 and a.images == N.inv and N.is_abelian())
                bound = THREE_QUARTERS * N.order
                if exceptional or counts[t] > bound:
                    # rare path: recompute with the scalar oracle
                    out = fn(N, a, t)
                    if out.exact_count != counts[t]:
                        raise OracleMismatch(f"{lemma}: vectorised count differs on {N.label}")
                else:
                    out = TrichotomyOutcome(lemma, BOUND_HOLDS, counts[t], bound)
                yield SweepRow.of(N.label, f"aut={k};t={t}", out)


def sweep_icecream(max_order: int = 16) -> Iterator[SweepRow]:
    return sweep_equation_counts(_catalog(max_order), inverse=False)


def sweep_gelato(max_order: int = 16) -> Iterator[SweepRow]:
    return sweep_equation_counts(_catalog(max_order), inverse=True)


def _index_two(T: FiniteGroup) -> list[GroupElementSet]:
    return [GroupElementSet(T, b) for b in gr.index_two_subgroups(T)]


def _restrictions(T: FiniteGroup, N: GroupElementSet) -> list[tuple[str, dict]]:
    out = [("id", restriction_identity(N)), ("inv", restriction_inversion(N))]
    for d in dicyclic_index_two(T):
        if dicyclic_subgroup(d).bits == N.bits:
            out.append((f"iota(A={d.A.bits:x})", restriction_bar_iota(d)))
    return out


def sweep_aux1(max_order: int = 16) -> Iterator[SweepRow]:
    for T in _catalog(max_order, 2):
        for N in _index_two(T):
            restr = _restrictions(T, N)
            for gamma in range(T.order):
                if gamma in N:
                    continue
                for t in N:
                    for name, r in restr:
                        out = twisted_invariant_count(T, N, gamma, t, r)
                        yield SweepRow.of(T.label, f"N={N.bits:x};gamma={gamma};t={t};r={name}", out)


def sweep_aux2(max_order: int = 16) -> Iterator[SweepRow]:
    for T in _catalog(max_order, 2):
        for N in _index_two(T):
            elems = N.elements()
            if not _is_abelian_set(T, elems) or max(T.elem_order[n] for n in elems) <= 2:
                continue
            restr = _restrictions(T, N)
            for gamma in range(T.order):
                if gamma in N:
                    continue
                for t in N:
                    for name, r in restr:
                        try:
                            out = inverted_twist_invariant_count(T, N, gamma, t, r)
                        except PreconditionError:
                            continue
                        yield SweepRow.of(T.label, f"N={N.bits:x};gamma={gamma};t={t};r={name}", out)


def sweep_aux3(max_order: int = 16) -> Iterator[SweepRow]:
    for T in _catalog(max_order, 2):
        for d in dicyclic_index_two(T):
            N = dicyclic_subgroup(d)
            restr = [("id", restriction_identity(N)), ("inv", restriction_inversion(N)),
                     ("iota", restriction_bar_iota(d))]
            for gamma in range(T.order):
                if gamma in N:
                    continue
                for t in N:
                    for name, r in restr:
                        out = dicyclic_twist_invariant_count(T, d, gamma, t, r)
                        params = (f"A={d.A.bits:x};x={d.x};gamma={gamma};t={t};r={name};"
                                  f"coset_base_holds={out.readings['coset_base_holds']}")
                        yield SweepRow.of(T.label, params, out)


def twelve_point_pair() -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Permutations of 12 points with |S ∩ S^f| = |S ∩ S^g| for every S."""
    from .perm import from_cycles
    f = from_cycles(12, [(1, 2, 3, 4, 5), (6, 7, 8), (9, 10, 11, 12)], offset=1)
    g = from_cycles(12, [(1, 5, 4, 3, 2), (6, 7, 8), (9, 12, 11, 10)], offset=1)
    return f, g


def random_perm_pair(rng: random.Random, n: int, structured: bool) -> tuple[list[int], list[int]]:
    """A random pair; ``structured`` pairs agree on some cycles of f and invert on the rest."""
    f = list(range(n))
    rng.shuffle(f)
    if not structured:
        g = list(range(n))
        rng.shuffle(g)
        return f, g
    g = [0] * n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        while not seen[f[cyc[-1]]]:
            cyc.append(f[cyc[-1]])
            seen[cyc[-1]] = True
        same = rng.random() < 0.5
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if same:
                g[a] = b
            else:
                g[b] = a
    return f, g


def sweep_trichotomy(count: int = 1000, seed: int = 0, sizes: tuple[int, int] = (6, 14)) -> Iterator[SweepRow]:
    rng = random.Random(seed)
    f, g = twelve_point_pair()
    yield SweepRow.of("X12", "example", intersection_trichotomy(12, f, g))
    for k in range(count):
        n = rng.randint(*sizes)
        structured = k % 2 == 1
        f, g = random_perm_pair(rng, n, structured)
        yield SweepRow.of(f"X{n}", f"k={k};structured={structured}", intersection_trichotomy(n, f, g))


def sigma_pairs(max_order: int = 12, max_c: int = 12) -> list[SigmaContext]:
    out = []
    for R in _catalog(max_order, 4):
        if SetCodec(R).c > max_c:
            continue
        for N in gr.normal_subgroups(R):
            if 1 < len(N) < R.order:
                out.append(SigmaContext(R, N))
    return out


def random_sigma_instance(rng: random.Random, ctx: SigmaContext, random_reps: bool = True):
    """(context, S bits, u, j) with u and j drawn uniformly from the admissible choices."""
    if random_reps:
        reps = [0] + [rng.choice(bits_to_list(ctx.coset_bits[k])) for k in range(1, ctx.b)]
        ctx = SigmaContext(ctx.group, ctx.normal, reps)
    S = ctx.codec.decode_bits(rng.randrange(ctx.codec.size))
    while True:
        u = rng.randrange(ctx.group.order)
        i = ctx.coset_of[u]
        js = [j for j in range(ctx.b) if j not in (0, i)]
        if i and js:
            return ctx, S, u, rng.choice(js)


def sweep_sigma(count: int = 1000, seed: int = 0, max_order: int = 12) -> Iterator[SweepRow]:
    rng = random.Random(seed)
    contexts = [ctx for ctx in sigma_pairs(max_order) if ctx.b >= 3]
    for k in range(count):
        ctx, S, u, j = random_sigma_instance(rng, contexts[k % len(contexts)])
        size = len(sigma(ctx, S, u, j))
        out = TrichotomyOutcome("sigma", BOUND_HOLDS, size)
        yield SweepRow.of(ctx.group.label, f"N={ctx.normal.bits:x};S={S:x};u={u};j={j}", out)


def sweep_psi(max_order: int = 12, max_c: int = 12) -> Iterator[SweepRow]:
    """All pairs (and triples when |N| is small) in every coset, every j, plus intersections."""
    for ctx in sigma_pairs(max_order, max_c):
        if ctx.b < 3:
            continue
        table = SigmaTable(ctx)
        label = f"{ctx.group.label}/N={ctx.normal.bits:x}"
        Q = ctx.quotient
        for i in range(1, ctx.b):
            coset = bits_to_list(ctx.coset_bits[i])
            js = [j for j in range(ctx.b) if j not in (0, i)]
            for size in (2, 3):
                for vs in itertools.combinations(coset, size):
                    for j in js:
                        out = psi_count(ctx, vs, j, table)
                        yield SweepRow.of(label, f"i={i};v={','.join(map(str, vs))};j={j}", out)
                    pair_ok = size == 2 and Q.elem_order[i] % 2 == 1
                    triple_ok = size == 3 and not _is_elementary_2(Q, range(Q.order))
                    if pair_ok or triple_ok:
                        out = psi_count(ctx, vs, None, table)
                        yield SweepRow.of(label, f"i={i};v={','.join(map(str, vs))};j=all", out)


def run_sweep(name: str, max_order: int | None = None, seed: int = 0) -> list[SweepRow]:
    if name == "icecream":
        return list(sweep_icecream(max_order or 16))
    if name == "gelato":
        return list(sweep_gelato(max_order or 16))
    if name == "aux1":
        return list(sweep_aux1(max_order or 16))
    if name == "aux2":
        return list(sweep_aux2(max_order or 16))
    if name == "aux3":
        return list(sweep_aux3(max_order or 16))
    if name == "trichotomy":
        return list(sweep_trichotomy(seed=seed))
    if name == "sigma":
        return list(sweep_sigma(seed=seed, max_order=max_order or 12))
    if name == "psi":
        return list(sweep_psi(max_order or 12))
    raise ValueError(f"unknown lemma {name!r}")


LEMMA_NAMES = ("icecream", "gelato", "aux1", "aux2", "aux3", "trichotomy", "sigma", "psi")
