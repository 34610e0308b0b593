"""Exhaustive classification of connection sets by their automorphisms.

For a group R and a normal subgroup N, every inverse-closed S is sorted by the
automorphisms of Γ(R, S) that fix the identity vertex and normalise the
right-regular copy of N (the group P1 below):

* ``s_N``   P1 is nontrivial;
* ``s_N1``  additionally some nontrivial group automorphism of R preserves S
  (equivalently the normaliser of the regular R in Aut Γ is larger than R);
* ``t_N``   in s_N but not s_N1, and some f in P1 maps some x outside {x, x^-1};
* ``u_N``   the rest of s_N;
* ``t_N1`` .. ``t_N4`` split t_N by how f acts on the cosets of N and on N.

The counts are compared with the closed-form upper bounds in
:func:`check_bounds`.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

from . import groups as gr
from .cayley import SetCodec, split_range
from .groups import BudgetError, FiniteGroup, GroupElementSet, GroupError
from .perm import (CosetPreserving, NormalizesRegular, PermGroup, Perm, _orbit, automorphism_search)

CHECKPOINT_VERSION = 1
CHECKPOINT_EVERY = 1 << 14
DEFAULT_WITNESS_K = 4
TOLERANCE = 1e-6

COUNT_FIELDS = (
    "total_sets", "grr_count", "s_N", "s_N1", "t_N", "t_N1", "t_N2", "t_N3", "t_N4", "u_N",
    "fixes_orbits_count", "fixes_orbits_gated", "r_normalizer_count",
    "odd_orbit_count", "large_orbit_count",
)
WITNESS_STRATA = ("s_N1", "t_N1", "t_N2", "t_N3", "t_N4", "u_N", "fixes_orbits")


def _witness_key(index: int) -> int:
    digest = hashlib.blake2b(index.to_bytes(16, "big"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass
class StratumCounts:
    """Counts for one (R, N) pair; ``witnesses`` keeps, per stratum, the k
    enumeration indices with the smallest hash key, so merging is order-free."""

    total_sets: int = 0
    grr_count: int = 0
    s_N: int = 0
    s_N1: int = 0
    t_N: int = 0
    t_N1: int = 0
    t_N2: int = 0
    t_N3: int = 0
    t_N4: int = 0
    u_N: int = 0
    fixes_orbits_count: int = 0
    fixes_orbits_gated: int = 0
    r_normalizer_count: int = 0
    odd_orbit_count: int = 0
    large_orbit_count: int = 0
    witness_k: int = DEFAULT_WITNESS_K
    witnesses: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def note_witness(self, stratum: str, index: int) -> None:
        lst = self.witnesses.setdefault(stratum, [])
        entry = (_witness_key(index), index)
        if entry in lst:
            return
        lst.append(entry)
        lst.sort()
        del lst[self.witness_k:]

    def merge(self, other: "StratumCounts") -> None:
        for name in COUNT_FIELDS:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        for stratum, lst in other.witnesses.items():
            mine = self.witnesses.setdefault(stratum, [])
            merged = sorted(set(mine) | set(lst))
            mine[:] = merged[:self.witness_k]

    def counts(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in COUNT_FIELDS}

    def witness_indices(self, stratum: str) -> list[int]:
        return sorted(i for _, i in self.witnesses.get(stratum, []))

    def check_invariants(self) -> None:
        """The strata partition s_N and the T pieces partition t_N."""
        assert self.s_N == self.s_N1 + self.t_N + self.u_N, self.counts()
        assert self.t_N == self.t_N1 + self.t_N2 + self.t_N3 + self.t_N4, self.counts()

    def to_state(self) -> dict:
        return {"counts": self.counts(), "witness_k": self.witness_k,
                "witnesses": {k: [list(p) for p in v] for k, v in sorted(self.witnesses.items())}}

    @classmethod
    def from_state(cls, state: dict) -> "StratumCounts":
        sc = cls(witness_k=state["witness_k"], **state["counts"])
        sc.witnesses = {k: [tuple(p) for p in v] for k, v in state["witnesses"].items()}
        return sc


@dataclass
class SetClassification:
    """Stratum membership of one connection set for one normal subgroup."""

    grr: bool
    r_normalizer: bool
    p1_order: int = 1
    s_N: bool = False
    s_N1: bool = False
    t_N: bool = False
    t_N1: bool = False
    t_N2: bool = False
    t_N3: bool = False
    t_N4: bool = False
    u_N: bool = False
    fixes_orbits: bool = False
    odd_orbit: bool = False
    large_orbit: bool = False
    p1_generators: list[Perm] = field(default_factory=list, repr=False)

    @property
    def stratum(self) -> str | None:
        for name in ("s_N1", "t_N1", "t_N2", "t_N3", "t_N4", "u_N"):
            if getattr(self, name):
                return name
        return None


# ------------------------------------------------------------ group data

def excluded_family(G: FiniteGroup) -> bool:
    """Abelian of exponent > 2, or generalised dicyclic."""
    return gr.is_abelian_exp_gt2(G) or bool(gr.is_generalized_dicyclic(G))


class NormalData:
    """Everything about one normal subgroup N that the classification needs."""

    def __init__(self, G: FiniteGroup, N: GroupElementSet):
        if not gr.is_normal(G, N):
            raise GroupError("N is not a normal subgroup")
        self.N = N
        self.bits = N.bits
        self.elems = N.elements()
        self.order = len(self.elems)
        self.Q, self.coset_of, self.reps = gr.quotient_group(G, N)
        Ngrp, emb = gr.induced_subgroup(G, N)
        self.abelian = Ngrp.is_abelian()
        self.inv = G.inv
        self.constraint = NormalizesRegular(G, N)
        self.coset_constraint = CosetPreserving(self.coset_of)
        self.quotient_elementary_2 = self.Q.exponent() <= 2
        self.odd_cosets = [i for i in range(1, self.Q.order) if self.Q.elem_order[i] % 2]
        self.special: list[tuple[int, ...]] = []
        if gr.is_abelian_exp_gt2(Ngrp):
            self.branch = "abelian"
            self.special = [tuple(G.inv[n] for n in self.elems)]
        else:
            decs = gr.is_generalized_dicyclic(Ngrp)
            if decs:
                self.branch = "q8" if gr.is_q8_times_elementary(Ngrp) else "dicyclic"
                for d in decs:
                    img = gr.bar_iota(d).images
                    self.special.append(tuple(emb[img[k]] for k in range(len(emb))))
            else:
                self.branch = "generic"

    def iota(self, f: Perm) -> tuple[int, ...]:
        """Restriction of f to N; for f fixing 0 and normalising N_reg this is ι_f."""
        return tuple(f[n] for n in self.elems)

    def violates_branch(self, iota: Sequence[int]) -> bool:
        """Whether ι (not the identity) breaks the conjugation pattern allowed
        for N: inversion for abelian N of exponent > 2, the automorphism
        fixing A and inverting outside it for generalised dicyclic N."""
        if all(a == b for a, b in zip(iota, self.elems)):
            return False
        if self.branch == "generic":
            return True
        if self.branch in ("abelian", "dicyclic"):
            return tuple(iota) != self.special[0]
        return any(all(iota[k] != s[k] for s in self.special) for k in range(len(self.elems)))


class GroupContext:
    """Per-group data shared by every set of the enumeration."""

    def __init__(self, G: FiniteGroup, normals: Sequence[GroupElementSet],
                 rounds: int | None = None):
        self.G = G
        self.codec = SetCodec(G)
        self.rounds = rounds
        self.c = self.codec.c
        self.excluded = excluded_family(G)
        self.normals = [NormalData(G, N) for N in normals]
        t = G.table
        self.slot_rows = []
        for mask in self.codec.slots:
            elems = [g for g in gr.bits_to_list(mask) if g]
            self.slot_rows.append(tuple(
                sum(1 << t[s][r] for s in elems) for r in range(G.order)))
        # nontrivial automorphisms of R as cycle masks on the slot bits
        self.aut_cycles = []
        for a in gr.automorphism_group(G):
            if a.is_identity():
                continue
            slot_perm = [self.codec.slot_of(a.images[gr.bits_to_list(m)[0]])
                         for m in self.codec.slots]
            seen = 0
            cycles = []
            for k in range(self.c):
                if seen >> k & 1:
                    continue
                cyc = 0
                j = k
                while not cyc >> j & 1:
                    cyc |= 1 << j
                    j = slot_perm[j]
                seen |= cyc
                if cyc.bit_count() > 1:
                    cycles.append(cyc)
            self.aut_cycles.append(tuple(cycles))

    def adjacency(self, index: int) -> tuple[int, ...]:
        rows = [0] * self.G.order
        k = 0
        while index:
            if index & 1:
                for r, m in enumerate(self.slot_rows[k]):
                    rows[r] |= m
            index >>= 1
            k += 1
        return tuple(rows)

    def r_normalizer(self, index: int) -> bool:
        """Some nontrivial automorphism of R maps the set onto itself."""
        for cycles in self.aut_cycles:
            if all((index & m) in (0, m) for m in cycles):
                return True
        return False

    def classify(self, index: int) -> list[SetClassification]:
        adj = self.adjacency(index)
        rnorm = self.r_normalizer(index)
        cache: dict = {}
        probe = automorphism_search(adj, (0,), first_only=True, rounds=self.rounds, cache=cache)
        grr = not probe.generators
        if grr:
            return [SetClassification(True, rnorm) for _ in self.normals]
        return [self._classify_nontrivial(nd, adj, rnorm, cache) for nd in self.normals]

    def _classify_nontrivial(self, nd: NormalData, adj, rnorm: bool, cache: dict) -> SetClassification:
        rec = SetClassification(False, rnorm)
        if nd.odd_cosets or not nd.quotient_elementary_2:
            fs = automorphism_search(adj, (0,), [nd.coset_constraint], rounds=self.rounds,
                                     cache=cache)
            rec.odd_orbit, rec.large_orbit = _coset_orbit_flags(nd, fs.generators, self.G.order)
        res = automorphism_search(adj, (0,), [nd.constraint], rounds=self.rounds, cache=cache)
        rec.p1_order = res.order
        rec.p1_generators = res.generators
        if res.order == 1:
            return rec
        rec.s_N = True
        gens = res.generators
        coset_perms = [_coset_perm(nd, g) for g in gens]
        image = PermGroup(nd.Q.order, coset_perms)
        rec.fixes_orbits = res.order > image.order
        if rnorm:
            rec.s_N1 = True
            return rec
        inv = self.G.inv
        rec.t_N = any(g[x] != x and g[x] != inv[x] for g in gens for x in range(len(g)))
        qinv = nd.Q.inv
        if any(p[c] != c and p[c] != qinv[c] for p in coset_perms for c in range(len(p))):
            rec.t_N1 = True
        elif self._bad_conjugation(nd, gens):
            rec.t_N2 = True
        elif self._swaps_without_inverting(nd, gens, coset_perms, res.order):
            rec.t_N3 = True
        elif rec.t_N:
            rec.t_N4 = True
        rec.u_N = not rec.t_N
        return rec

    @staticmethod
    def _bad_conjugation(nd: NormalData, gens: Sequence[Perm]) -> bool:
        # the restrictions to N form a group; close it and test every member
        pos = {n: k for k, n in enumerate(nd.elems)}
        restr = [tuple(pos[x] for x in nd.iota(g)) for g in gens]
        image = PermGroup(nd.order, restr)
        return any(nd.violates_branch([nd.elems[k] for k in p]) for p in image.elements)

    def _swaps_without_inverting(self, nd: NormalData, gens, coset_perms, order: int) -> bool:
        moving = [p for p in coset_perms if any(p[c] != c for c in range(len(p)))]
        if not moving:
            return False
        if not nd.abelian:
            return True
        inv, coset_of = self.G.inv, nd.coset_of
        for f in PermGroup(self.G.order, gens, order=order).elements:
            for x in range(len(f)):
                if coset_of[f[x]] != coset_of[x] and f[x] != inv[x]:
                    return True
        return False


def _coset_perm(nd: NormalData, f: Perm) -> tuple[int, ...]:
    return tuple(nd.coset_of[f[r]] for r in nd.reps)


def _coset_orbit_flags(nd: NormalData, gens: Sequence[Perm], n: int) -> tuple[bool, bool]:
    odd = large = False
    seen = 0
    for v in range(n):
        if seen >> v & 1 or nd.coset_of[v] == 0:
            continue
        orb = _orbit(v, gens)
        for w in orb:
            seen |= 1 << w
        if len(orb) > 1 and nd.coset_of[v] in nd.odd_cosets:
            odd = True
        if len(orb) >= 3 and not nd.quotient_elementary_2:
            large = True
    return odd, large


# ------------------------------------------------------------ public API

def classify_set(G: FiniteGroup, N: GroupElementSet, S, rounds: int | None = None) -> SetClassification:
    """Stratum membership of the connection set S for the normal subgroup N."""
    if len(N) in (1, G.order):
        raise GroupError("N must be a non-identity proper normal subgroup")
    ctx = GroupContext(G, [N], rounds=rounds)
    return ctx.classify(ctx.codec.encode(S))[0]


def _tally(ctx: GroupContext, lo: int, hi: int, witness_k: int) -> list[StratumCounts]:
    out = [StratumCounts(witness_k=witness_k) for _ in ctx.normals]
    for index in range(lo, hi):
        recs = ctx.classify(index)
        for sc, rec in zip(out, recs):
            sc.total_sets += 1
            sc.grr_count += rec.grr
            sc.r_normalizer_count += rec.r_normalizer
            sc.odd_orbit_count += rec.odd_orbit
            sc.large_orbit_count += rec.large_orbit
            if rec.fixes_orbits:
                sc.fixes_orbits_count += 1
                sc.fixes_orbits_gated += not rec.r_normalizer
                sc.note_witness("fixes_orbits", index)
            if not rec.s_N:
                continue
            sc.s_N += 1
            sc.t_N += rec.t_N
            name = rec.stratum
            setattr(sc, name, getattr(sc, name) + 1)
            sc.note_witness(name, index)
    return out


_CTX_CACHE: dict = {}


def _context_for(table, label, normal_bits, rounds) -> GroupContext:
    key = (label, hash(table), tuple(normal_bits), rounds)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        G = FiniteGroup(table, label=label)
        ctx = GroupContext(G, [GroupElementSet(G, b) for b in normal_bits], rounds=rounds)
        _CTX_CACHE.clear()
        _CTX_CACHE[key] = ctx
    return ctx


def _work(args) -> list[dict]:
    table, label, normal_bits, rounds, lo, hi, witness_k = args
    ctx = _context_for(table, label, normal_bits, rounds)
    return [sc.to_state() for sc in _tally(ctx, lo, hi, witness_k)]


def _checkpoint_header(G: FiniteGroup, normals: Sequence[GroupElementSet], c: int) -> dict:
    return {"group": G.label, "normal_subgroups": [N.elements() for N in normals],
            "c_value": c, "version": CHECKPOINT_VERSION}


def _content_hash(header: dict, resume: int, states: list[dict]) -> str:
    blob = json.dumps({"header": header, "resume_index": resume, "partial": states},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class CheckpointError(ValueError):
    """The checkpoint file is corrupt or belongs to a different census."""


def write_checkpoint(path: str, header: dict, resume: int, counts: list[StratumCounts]) -> None:
    states = [sc.to_state() for sc in counts]
    payload = {"header": dict(header, hash=_content_hash(header, resume, states)),
               "resume_index": resume, "partial": states}
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    os.replace(tmp, path)


def read_checkpoint(path: str, header: dict) -> tuple[int, list[StratumCounts]]:
    try:
        with open(path) as fh:
            payload = json.load(fh)
        stored = dict(payload["header"])
        digest = stored.pop("hash")
        resume = payload["resume_index"]
        states = payload["partial"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"unreadable checkpoint: {exc}") from None
    if digest != _content_hash(stored, resume, states):
        raise CheckpointError("checkpoint hash mismatch")
    if stored != header:
        raise CheckpointError("checkpoint belongs to a different census")
    return resume, [StratumCounts.from_state(s) for s in states]


def run_census_multi(G: FiniteGroup, normals: Sequence[GroupElementSet], worker_count: int = 1,
                     checkpoint: str | None = None, witness_k: int = DEFAULT_WITNESS_K,
                     max_c: int = 30, rounds: int | None = None,
                     checkpoint_every: int = CHECKPOINT_EVERY,
                     stop_after_chunks: int | None = None) -> list[StratumCounts]:
    """Census over every inverse-closed set for several normal subgroups at once.

    The index range is processed in chunks of ``checkpoint_every``; each chunk
    is split among the workers and the checkpoint (if any) is rewritten after
    it. ``stop_after_chunks`` ends the run early, as an interruption would.
    """
    codec = SetCodec(G)
    if codec.c > max_c:
        raise BudgetError(f"c(G) = {codec.c} exceeds census budget {max_c}")
    for N in normals:
        if len(N) in (1, G.order):
            raise GroupError("N must be a non-identity proper normal subgroup")
        if not gr.is_normal(G, N):
            raise GroupError("N is not a normal subgroup")
    header = _checkpoint_header(G, normals, codec.c)
    totals = [StratumCounts(witness_k=witness_k) for _ in normals]
    start = 0
    if checkpoint and os.path.exists(checkpoint):
        start, totals = read_checkpoint(checkpoint, header)
    normal_bits = [N.bits for N in normals]
    pool = None
    if worker_count > 1:
        import multiprocessing
        pool = multiprocessing.get_context("fork").Pool(worker_count)
    try:
        chunks = 0
        lo = start
        while lo < codec.size:
            hi = min(codec.size, lo + checkpoint_every)
            jobs = [(G.table, G.label, normal_bits, rounds, a, b, witness_k)
                    for a, b in split_range(lo, hi, worker_count) if b > a]
            results = pool.map(_work, jobs) if pool else [_work(j) for j in jobs]
            for states in results:
                for total, state in zip(totals, states):
                    total.merge(StratumCounts.from_state(state))
            lo = hi
            if checkpoint:
                write_checkpoint(checkpoint, header, lo, totals)
            chunks += 1
            if stop_after_chunks is not None and chunks >= stop_after_chunks:
                break
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return totals


def run_census(G: FiniteGroup, N: GroupElementSet, worker_count: int = 1,
               checkpoint: str | None = None, **kwargs) -> StratumCounts:
    return run_census_multi(G, [N], worker_count, checkpoint, **kwargs)[0]


def proper_normal_subgroups(G: FiniteGroup) -> list[GroupElementSet]:
    return [N for N in gr.normal_subgroups(G) if 1 < len(N) < G.order]


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class BoundRecord:
    bound_id: str
    count: int
    lhs_log2: float
    rhs_exponent: float
    slack: float
    holds: bool
    vacuous: bool
    applicable: bool = True
    reason: str = ""

    def to_dict(self) -> dict:
        # records gated off report holds = null; the raw comparison is kept
        return {"bound_id": self.bound_id, "count": self.count,
                "lhs_log2": _json_float(self.lhs_log2),
                "rhs_exponent": _json_float(self.rhs_exponent), "slack": _json_float(self.slack),
                "holds": self.holds if self.applicable else None,
                "raw_holds": self.holds, "vacuous": self.vacuous,
                "applicable": self.applicable, "reason": self.reason}


def _json_float(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return round(x, 9)


def _record(bound_id, count, rhs, c, applicable=True, reason=""):
    lhs = math.log2(count) if count else -math.inf
    holds = (count == 0) or lhs <= rhs + TOLERANCE
    return BoundRecord(bound_id, count, lhs, rhs, rhs - lhs, holds, rhs >= c, applicable, reason)


def bound_exponents(G: FiniteGroup, N: GroupElementSet, c: int) -> dict[str, float]:
    """Right-hand exponents (log2 of the upper bounds) for one (R, N) pair."""
    r, n = G.order, len(N)
    L, ln = math.log2(r), math.log2(n)
    return {
        "stabilizer": c - n / 96 + 2 * L + L * L + 3,
        "orbit_fixing": c - r / (192 * n) + L * L + 3,
        "orbit_fixing_sqrt": c - math.sqrt(r) / 192 + 2 * L + L * L + 3,
        "coset_moving": c - n / 2 + 2 * L - ln + ln * ln + 2,
        "bad_conjugation": c - n / 96 + ln * ln,
        "coset_inverting": c - n / 8 + L + ln * ln,
        "element_moving": c - n / 24 + L + 2,
        "extra_automorphism": c - r / 96 + L * L,
        "orbit_fixing_2quotient": c - r / 192 + L * L + 2,
        "odd_coset_orbit": c - 0.02 * r / n + math.log2(r * n / 2),
        "large_coset_orbit": c - 0.02 * r / n + math.log2(r * n * n / 6),
    }


def check_bounds(G: FiniteGroup, N: GroupElementSet, counts: StratumCounts) -> list[BoundRecord]:
    """One record per inequality; records that need R outside the excluded
    families are kept but marked not applicable when R is excluded."""
    c = SetCodec(G).c
    e = bound_exponents(G, N, c)
    excluded = excluded_family(G)
    Q, _, _ = gr.quotient_group(G, N)
    elem2 = Q.exponent() <= 2
    fam = dict(applicable=not excluded, reason="excluded family" if excluded else "")
    gated_main = counts.s_N - counts.s_N1
    recs = [
        _record("stabilizer_gated", gated_main, e["stabilizer"], c),
        _record("stabilizer", counts.s_N, e["stabilizer"], c, **fam),
        _record("orbit_fixing_gated", counts.fixes_orbits_gated, e["orbit_fixing"], c),
        _record("orbit_fixing", counts.fixes_orbits_count, e["orbit_fixing"], c, **fam),
        _record("orbit_fixing_sqrt_gated", counts.fixes_orbits_gated, e["orbit_fixing_sqrt"], c),
        _record("orbit_fixing_sqrt", counts.fixes_orbits_count, e["orbit_fixing_sqrt"], c, **fam),
        _record("coset_moving", counts.t_N1, e["coset_moving"], c, **fam),
        _record("bad_conjugation", counts.t_N2, e["bad_conjugation"], c, **fam),
        _record("coset_inverting", counts.t_N3, e["coset_inverting"], c, **fam),
        _record("element_moving", counts.t_N4, e["element_moving"], c, **fam),
        _record("extra_automorphism", counts.r_normalizer_count, e["extra_automorphism"], c, **fam),
    ]
    if elem2:
        recs.append(_record("orbit_fixing_2quotient", counts.fixes_orbits_count,
                            e["orbit_fixing_2quotient"], c, **fam))
    else:
        recs.append(_record("orbit_fixing_2quotient", counts.fixes_orbits_count,
                            e["orbit_fixing_2quotient"], c, applicable=False,
                            reason="quotient not elementary abelian 2-group"))
    u_lhs = math.log2(counts.u_N) if counts.u_N else -math.inf
    recs.append(BoundRecord("unresolved_empty", counts.u_N, u_lhs, -math.inf,
                            math.inf if counts.u_N == 0 else -math.inf, counts.u_N == 0,
                            False, **fam))
    recs.append(_record("odd_coset_orbit", counts.odd_orbit_count, e["odd_coset_orbit"], c))
    recs.append(_record("large_coset_orbit", counts.large_orbit_count, e["large_coset_orbit"], c,
                        applicable=not elem2,
                        reason="quotient is elementary abelian 2-group" if elem2 else ""))
    return recs


def bounds_hold(records: Sequence[BoundRecord]) -> bool:
    return all(r.holds for r in records if r.applicable)


# --------------------------------------------------------------- reports

def census_report(G: FiniteGroup, N: GroupElementSet, counts: StratumCounts,
                  records: Sequence[BoundRecord]) -> dict:
    n = G.order
    width = max(1, (n + 3) // 4)
    codec = SetCodec(G)
    return {
        "group": G.label,
        "order": n,
        "normal_subgroup": N.elements(),
        "c_value": codec.c,
        "counts": counts.counts(),
        "bounds": [r.to_dict() for r in records],
        "witnesses": {s: [format(codec.decode_bits(i), f"0{width}x")
                          for i in counts.witness_indices(s)]
                      for s in WITNESS_STRATA if counts.witnesses.get(s)},
    }


CSV_COLUMNS = ("group", "order", "normal_subgroup", "c_value", "bound_id", "count", "lhs_log2",
               "rhs_exponent", "slack", "holds", "vacuous", "applicable", "reason")


def csv_rows(report: dict) -> list[list]:
    rows = []
    nsub = " ".join(str(x) for x in report["normal_subgroup"])
    for b in report["bounds"]:
        rows.append([report["group"], report["order"], nsub, report["c_value"], b["bound_id"],
                     b["count"], b["lhs_log2"], b["rhs_exponent"], b["slack"], b["holds"],
                     b["vacuous"], b["applicable"], b["reason"]])
    return rows


@dataclass(frozen=True)
class DensityRow:
    group: str
    order: int
    total_sets: int
    grr_count: int

    @property
    def density(self) -> float:
        return self.grr_count / self.total_sets if self.total_sets else 0.0


def grr_count(G: FiniteGroup, rounds: int | None = None) -> tuple[int, int]:
    """(number of sets, number giving a GRR) over all inverse-closed sets."""
    codec = SetCodec(G)
    ctx = GroupContext(G, [], rounds=rounds)
    grrs = 0
    for index in range(codec.size):
        adj = ctx.adjacency(index)
        if not automorphism_search(adj, (0,), first_only=True, rounds=rounds).generators:
            grrs += 1
    return codec.size, grrs


def grr_density_report(group_list: Sequence[FiniteGroup], max_c: int = 30) -> list[DensityRow]:
    rows = []
    for G in group_list:
        if SetCodec(G).c > max_c:
            raise BudgetError(f"{G.label}: c(G) exceeds budget {max_c}")
        total, grrs = grr_count(G)
        rows.append(DensityRow(G.label, G.order, total, grrs))
    return rows
