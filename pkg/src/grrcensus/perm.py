"""Permutation groups and graph automorphism search.

Permutations are image tuples: ``p[v]`` is the image of ``v``. Products follow
the right-action convention, so ``compose(p, q)`` applies p first and then q.

Automorphism groups are found by individualisation and colour refinement.
Along a base b_1, b_2, ... the search collects, level by level from the
bottom up, generators of each pointwise stabiliser; for each level every
candidate image of the base point is either already in the orbit of the
generators found so far or is tested by a depth-first search. The group order
is the product of the level orbit lengths, so it is exact without listing
elements. Optional constraints restrict the search to subgroups of the
automorphism group (for instance the normaliser of a semiregular subgroup).
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .groups import BudgetError, FiniteGroup, GroupElementSet, bits_to_list, generating_chain

Perm = tuple[int, ...]

DEFAULT_MAX_DEGREE = 40
DEFAULT_ROUNDS = 2
ELEMENT_CAP = 2_000_000


# ------------------------------------------------------------- permutations

def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """p first, then q."""
    return tuple(q[x] for x in p)


def invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def from_cycles(n: int, cycles: Iterable[Sequence[int]], offset: int = 0) -> Perm:
    """Build a permutation of {0..n-1} from cycles; ``offset=1`` reads 1-based cycles."""
    img = list(range(n))
    for cyc in cycles:
        cyc = [c - offset for c in cyc]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    if sorted(img) != list(range(n)):
        raise ValueError("cycles do not describe a permutation")
    return tuple(img)


def cycles_of(p: Perm) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


def map_mask(mask: int, p: Perm) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << p[low.bit_length() - 1]
        mask ^= low
    return out


def is_graph_automorphism(adj: Sequence[int], p: Perm) -> bool:
    return all(map_mask(adj[v], p) == adj[p[v]] for v in range(len(adj)))


# ------------------------------------------------------------------ groups

class PermGroup:
    """A permutation group given by generators.

    The element list is built on first use by closing the generators under
    composition. When the order is known from a search it is kept and the
    elements are never needed for :attr:`order`.
    """

    def __init__(self, degree: int, generators: Iterable[Perm] = (), order: int | None = None):
        self.degree = degree
        gens = []
        for g in generators:
            g = tuple(g)
            if len(g) != degree:
                raise ValueError("generator has the wrong degree")
            if not is_identity(g) and g not in gens:
                gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._order = order
        self._elements: list[Perm] | None = None

    @classmethod
    def from_elements(cls, degree: int, elements: Iterable[Perm]) -> "PermGroup":
        elems = sorted({tuple(e) for e in elements} | {identity_perm(degree)})
        G = cls(degree, elems, order=len(elems))
        G._elements = elems
        return G

    @property
    def elements(self) -> list[Perm]:
        if self._elements is None:
            ident = identity_perm(self.degree)
            seen = {ident}
            frontier = [ident]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in self.generators:
                        y = compose(x, g)
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
                            if len(seen) > ELEMENT_CAP:
                                raise BudgetError("permutation group too large to list")
                frontier = nxt
            self._elements = sorted(seen)
            if self._order is not None and self._order != len(seen):
                raise AssertionError("closure size disagrees with the recorded order")
            self._order = len(seen)
        return self._elements

    @property
    def order(self) -> int:
        if self._order is None:
            return len(self.elements)
        return self._order

    def __contains__(self, p: Perm) -> bool:
        return tuple(p) in set(self.elements)

    def orbit(self, v: int) -> list[int]:
        return sorted(_orbit(v, self.generators))

    def orbits(self) -> list[list[int]]:
        seen = 0
        out = []
        for v in range(self.degree):
            if not seen >> v & 1:
                orb = self.orbit(v)
                for w in orb:
                    seen |= 1 << w
                out.append(orb)
        return out

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order}, gens={len(self.generators)})"


def _orbit(v: int, gens: Sequence[Perm]) -> set[int]:
    orb = {v}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g[x]
                if y not in orb:
                    orb.add(y)
                    nxt.append(y)
        frontier = nxt
    return orb


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append(from_cycles(n, [[0, 1]]))
    if n >= 3:
        gens.append(from_cycles(n, [list(range(n))]))
    order = 1
    for k in range(2, n + 1):
        order *= k
    return PermGroup(n, gens, order=order)


def regular_representation(G: FiniteGroup, subgroup: GroupElementSet | None = None) -> PermGroup:
    """Right-regular action r -> r·n of G (or of a subgroup) on the elements of G."""
    members = subgroup.elements() if subgroup is not None else list(range(G.order))
    t = G.table
    perms = [tuple(t[r][n] for r in range(G.order)) for n in members]
    return PermGroup.from_elements(G.order, perms)


# --------------------------------------------------------------- refinement

def refine(adj: Sequence[int], colors: Sequence[int], rounds: int | None = DEFAULT_ROUNDS
           ) -> tuple[list[int], tuple]:
    """Colour refinement by neighbour-colour counts.

    Returns the new colouring (colours are ranks of the refinement keys, so
    the labels are a function of the isomorphism type of the coloured graph)
    and a trace that two colourings must share to be related by an
    automorphism. ``rounds=None`` refines until the partition is stable.
    """
    n = len(adj)
    colors = list(colors)
    trace = []
    ncells = len(set(colors))
    done = 0
    while rounds is None or done < rounds:
        cells: dict[int, int] = {}
        for v, c in enumerate(colors):
            cells[c] = cells.get(c, 0) | (1 << v)
        masks = [cells[c] for c in sorted(cells)]
        keys = [(colors[v],) + tuple((adj[v] & m).bit_count() for m in masks) for v in range(n)]
        counts = Counter(keys)
        uniq = sorted(counts)
        rank = {k: i for i, k in enumerate(uniq)}
        colors = [rank[k] for k in keys]
        trace.append(tuple((k, counts[k]) for k in uniq))
        done += 1
        if len(uniq) == ncells:
            break
        ncells = len(uniq)
    return colors, tuple(trace)


def _individualize(adj, colors, v, rounds, cache=None):
    if cache is not None:
        key = (tuple(colors), v)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = _individualize(adj, colors, v, rounds)
        return hit
    colors = list(colors)
    colors[v] = max(colors) + 1
    colors, trace = refine(adj, colors, rounds)
    return tuple(colors), trace


# -------------------------------------------------------------- constraints

class Constraint:
    """Restricts the search to a subgroup of the automorphism group.

    ``propagate`` receives a partial map (list, -1 for unmapped) that was just
    extended by a -> b and returns the pairs it forces, or None when the
    extension cannot lie in the subgroup. ``accepts`` checks a full map.
    """

    priority: Sequence[int] | None = None

    def propagate(self, fwd: list[int], a: int, b: int) -> list[tuple[int, int]] | None:
        return []

    def accepts(self, p: Perm) -> bool:
        return True


class CosetPreserving(Constraint):
    """Maps that send every block of a partition to itself."""

    def __init__(self, block_of: Sequence[int]):
        self.block_of = tuple(block_of)

    def propagate(self, fwd, a, b):
        return [] if self.block_of[a] == self.block_of[b] else None

    def accepts(self, p):
        return all(self.block_of[v] == self.block_of[p[v]] for v in range(len(p)))


class NormalizesRegular(Constraint):
    """Maps f with f(0) = 0 normalising the right-regular copy of a subgroup N.

    Such an f satisfies f(y·n) = f(y)·f(n) for all y and all n in N, and that
    rule is used to force images during the search.
    """

    def __init__(self, G: FiniteGroup, N: GroupElementSet):
        self.table = G.table
        self.elem_order = G.elem_order
        self.nbits = N.bits
        self.n_elems = N.elements()
        nset = self.n_elems
        others = [g for g in range(G.order) if not N.bits >> g & 1]
        self.priority = nset[1:] + others

    def propagate(self, fwd, a, b):
        t, nbits = self.table, self.nbits
        a_in = nbits >> a & 1
        if a_in != (nbits >> b & 1):
            return None
        # f restricted to N is an automorphism of N; outside N orders may change
        if a_in and self.elem_order[a] != self.elem_order[b]:
            return None
        forced = []
        for u, v in enumerate(fwd):
            if v < 0:
                continue
            if a_in:
                forced.append((t[u][a], t[v][b]))
            if nbits >> u & 1:
                forced.append((t[a][u], t[b][v]))
        if a_in:
            forced.append((t[a][a], t[b][b]))
        return forced

    def accepts(self, p):
        t = self.table
        if p[0] != 0:
            return False
        for n in self.n_elems:
            fn = p[n]
            if not self.nbits >> fn & 1:
                return False
            for y in range(len(p)):
                if p[t[y][n]] != t[p[y]][fn]:
                    return False
        return True


# ------------------------------------------------------------------ search

@dataclass
class SearchResult:
    generators: list[Perm]
    order: int
    base: list[int]
    nodes: int = 0

    def group(self, degree: int) -> PermGroup:
        return PermGroup(degree, self.generators, order=self.order)


class _Search:
    def __init__(self, adj: Sequence[int], fixed: Sequence[int], constraints: Sequence[Constraint],
                 rounds: int | None, known: Sequence[Perm], cache: dict | None = None):
        self.adj = tuple(adj)
        self.cache = {} if cache is None else cache
        self.n = n = len(adj)
        self.rounds = rounds
        self.constraints = list(constraints)
        self.nodes = 0
        priority = None
        for c in self.constraints:
            if c.priority is not None:
                priority = list(c.priority)
        start = self.cache.get(None)
        if start is None:
            colors, trace = refine(self.adj, [0] * n, rounds)
            start = self.cache[None] = (tuple(colors), trace)
        colors, trace = start
        base: list[int] = []
        lcolors = [colors]
        ltrace = [trace]
        for v in fixed:
            colors, trace = _individualize(self.adj, colors, v, rounds, self.cache)
            base.append(v)
            lcolors.append(colors)
            ltrace.append(trace)
        while len(set(colors)) < n:
            v = self._choose(colors, base, priority)
            colors, trace = _individualize(self.adj, colors, v, rounds, self.cache)
            base.append(v)
            lcolors.append(colors)
            ltrace.append(trace)
        self.base = base
        self.nfixed = len(fixed)
        self.lcolors = lcolors
        self.ltrace = ltrace
        # left colours are discrete at the bottom: colour -> vertex
        self.leaf_vertex = {c: v for v, c in enumerate(lcolors[-1])}
        self.known = [tuple(k) for k in known]

    @staticmethod
    def _choose(colors, base, priority):
        size = Counter(colors)
        if priority is not None:
            for v in priority:
                if size[colors[v]] > 1 and v not in base:
                    return v
        best = None
        for v, c in enumerate(colors):
            if size[c] > 1 and (best is None or (size[c], c) < (size[colors[best]], colors[best])):
                best = v
        return best

    # partial maps -----------------------------------------------------
    def _extend(self, fwd: list[int], used: int, a: int, b: int, lcol, rcol):
        """Add a -> b plus everything it forces; None on contradiction."""
        adj = self.adj
        queue = [(a, b)]
        while queue:
            a, b = queue.pop()
            if fwd[a] >= 0:
                if fwd[a] != b:
                    return None
                continue
            if used >> b & 1 or lcol[a] != rcol[b]:
                return None
            adj_a, adj_b = adj[a], adj[b]
            for u, v in enumerate(fwd):
                if v >= 0 and (adj_a >> u & 1) != (adj_b >> v & 1):
                    return None
            fwd[a] = b
            used |= 1 << b
            for c in self.constraints:
                forced = c.propagate(fwd, a, b)
                if forced is None:
                    return None
                queue.extend(forced)
        # pairs forced at coarser levels must still match the finer colours
        if any(v >= 0 and lcol[u] != rcol[v] for u, v in enumerate(fwd)):
            return None
        return fwd, used

    def _leaf(self, fwd: list[int], rcol) -> Perm | None:
        if min(fwd) < 0:
            rvertex = {c: v for v, c in enumerate(rcol)}
            lcol = self.lcolors[-1]
            p = tuple(fwd[v] if fwd[v] >= 0 else rvertex[lcol[v]] for v in range(self.n))
        else:
            p = tuple(fwd)
        if len(set(p)) != self.n or not is_graph_automorphism(self.adj, p):
            return None
        if not all(c.accepts(p) for c in self.constraints):
            return None
        return p

    def _dfs(self, level: int, fwd: list[int], used: int, rcol) -> Perm | None:
        self.nodes += 1
        if level == len(self.base) or min(fwd) >= 0:
            return self._leaf(fwd, rcol)
        b = self.base[level]
        lnext = self.lcolors[level + 1]
        tnext = self.ltrace[level + 1]
        if fwd[b] >= 0:
            cands = [fwd[b]]
        else:
            target = self.lcolors[level][b]
            cands = [w for w, c in enumerate(rcol) if c == target and not used >> w & 1]
        for w in cands:
            r2, tr = _individualize(self.adj, rcol, w, self.rounds, self.cache)
            if tr != tnext:
                continue
            ext = self._extend(list(fwd), used, b, w, lnext, r2)
            if ext is None:
                continue
            found = self._dfs(level + 1, ext[0], ext[1], r2)
            if found is not None:
                return found
        return None

    def find(self, level: int, w: int) -> Perm | None:
        """An element fixing base[:level] pointwise and mapping base[level] to w."""
        fwd = [-1] * self.n
        used = 0
        rcol = self.lcolors[level]
        for v in self.base[:level]:
            ext = self._extend(fwd, used, v, v, rcol, rcol)
            if ext is None:
                return None
            fwd, used = ext
        b = self.base[level]
        if fwd[b] >= 0:
            # b is already forced to itself by the fixed prefix
            return None
        r2, tr = _individualize(self.adj, rcol, w, self.rounds, self.cache)
        if tr != self.ltrace[level + 1]:
            return None
        ext = self._extend(fwd, used, b, w, self.lcolors[level + 1], r2)
        if ext is None:
            return None
        return self._dfs(level + 1, ext[0], ext[1], r2)

    def run(self, first_only: bool = False) -> SearchResult:
        gens: list[Perm] = []
        order = 1
        base = self.base
        for level in reversed(range(self.nfixed, len(base))):
            b = base[level]
            prefix = base[:level]
            level_gens = [g for g in gens + self.known if all(g[v] == v for v in prefix)]
            orbit = _orbit(b, level_gens)
            target = self.lcolors[level][b]
            cell = [w for w, c in enumerate(self.lcolors[level]) if c == target]
            for w in cell:
                if w in orbit:
                    continue
                g = self.find(level, w)
                if g is not None:
                    gens.append(g)
                    if first_only:
                        return SearchResult(gens, 0, list(base), self.nodes)
                    level_gens.append(g)
                    orbit = _orbit(b, level_gens)
            order *= len(orbit)
        return SearchResult(gens, order, list(base), self.nodes)


def automorphism_search(adj: Sequence[int], fixed: Sequence[int] = (),
                        constraints: Sequence[Constraint] = (), first_only: bool = False,
                        rounds: int | None = DEFAULT_ROUNDS, known: Sequence[Perm] = (),
                        cache: dict | None = None) -> SearchResult:
    """Generators and order of the automorphisms of ``adj`` that fix ``fixed``
    pointwise and satisfy every constraint.

    With ``first_only`` the search stops at the first nontrivial element
    (``order`` is then 0 if one was found and 1 otherwise). ``known`` may list
    elements already known to be in the group; they only speed up the search.
    Searches on the same graph and with the same ``rounds`` may share a
    ``cache`` dict of refinement results.
    """
    s = _Search(adj, fixed, constraints, rounds, known, cache)
    res = s.run(first_only)
    if first_only and not res.generators:
        res.order = 1
    return res


def graph_automorphisms(graph, rounds: int | None = DEFAULT_ROUNDS,
                        max_degree: int = DEFAULT_MAX_DEGREE) -> PermGroup:
    """The full automorphism group of a graph.

    ``graph`` is a :class:`~grrcensus.cayley.CayleyGraph` or a sequence of
    adjacency bit masks. For Cayley graphs the right translations are seeded
    as known automorphisms.
    """
    known: list[Perm] = []
    if hasattr(graph, "adjacency"):
        adj = graph.adjacency
        G = graph.group
        known = [tuple(G.table[r][g] for r in range(G.order)) for g in generating_chain(G)]
    else:
        adj = tuple(graph)
    if len(adj) > max_degree:
        raise BudgetError(f"graph on {len(adj)} vertices exceeds budget {max_degree}")
    if not adj:
        return PermGroup(0, [], order=1)
    res = automorphism_search(adj, (), (), rounds=rounds, known=known)
    for g in res.generators:
        assert is_graph_automorphism(adj, g)
    return PermGroup(len(adj), res.generators + known, order=res.order)


def brute_force_automorphisms(adj: Sequence[int]) -> list[Perm]:
    """All automorphisms by trying every permutation (small graphs only)."""
    n = len(adj)
    if n > 9:
        raise BudgetError("brute force is limited to 9 vertices")
    return [p for p in itertools.permutations(range(n)) if is_graph_automorphism(adj, p)]


def is_grr(G: FiniteGroup, S) -> bool:
    """Whether Γ(G, S) has automorphism group exactly the right-regular G."""
    from .cayley import build_graph
    graph = build_graph(G, S)
    res = automorphism_search(graph.adjacency, fixed=(0,), first_only=True)
    return not res.generators


# ------------------------------------------------------- subgroup queries

def point_stabilizer(P: PermGroup, v: int) -> PermGroup:
    return PermGroup.from_elements(P.degree, [p for p in P.elements if p[v] == v])


def normalizer_of_regular_subgroup(P: PermGroup, H: PermGroup) -> PermGroup:
    """{p in P : p^-1 H p = H}, by filtering the elements of P."""
    pset = set(P.elements)
    hset = set(H.elements)
    if not hset <= pset:
        raise ValueError("H is not a subgroup of P")
    out = []
    for p in P.elements:
        pinv = invert(p)
        if all(compose(compose(pinv, h), p) in hset for h in H.generators):
            out.append(p)
    return PermGroup.from_elements(P.degree, out)


def conjugation_action_on_N(f: Perm, N_reg: PermGroup, G: FiniteGroup) -> dict[int, int] | None:
    """ι_f as a map n -> m with ρ_m = f^-1 ρ_n f, or None when f does not
    normalise N_reg. The result is checked to be an automorphism of N."""
    n_elems = sorted({h[0] for h in N_reg.elements})
    members = set(n_elems)
    finv = invert(f)
    t = G.table
    out = {}
    for n in n_elems:
        rho_n = tuple(t[r][n] for r in range(G.order))
        conj = compose(compose(finv, rho_n), f)
        m = conj[0]
        if m not in members or any(conj[r] != t[r][m] for r in range(G.order)):
            return None
        out[n] = m
    for a in n_elems:
        for b in n_elems:
            if out[t[a][b]] != t[out[a]][out[b]]:
                raise AssertionError("conjugation action is not a homomorphism")
    return out


def orbit_fixing_subgroup(P: PermGroup, orbits: Sequence[GroupElementSet | Iterable[int]]) -> PermGroup:
    """Elements of P leaving every block of the partition ``orbits`` invariant."""
    block_of = [-1] * P.degree
    for k, orb in enumerate(orbits):
        elems = orb.elements() if isinstance(orb, GroupElementSet) else list(orb)
        for v in elems:
            if block_of[v] >= 0:
                raise ValueError("orbits overlap")
            block_of[v] = k
    if min(block_of, default=0) < 0:
        raise ValueError("orbits do not cover the vertex set")
    return PermGroup.from_elements(
        P.degree, [p for p in P.elements if all(block_of[p[v]] == block_of[v] for v in range(P.degree))])
