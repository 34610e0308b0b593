"""Command-line front end.

Exit codes: 0 on success, 1 when a bound or lemma check fails, 2 on usage or
budget errors.
"""
from __future__ import annotations

import argparse
import collections
import csv
import datetime
import io
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from . import groups as gr
from .catalog import catalog_groups
from .cayley import ConnectionSet, SetCodec
from .census import (CSV_COLUMNS, bounds_hold, census_report, check_bounds, csv_rows,
                     excluded_family, grr_density_report, proper_normal_subgroups,
                     run_census_multi)
from .groups import BudgetError, GroupError, GroupElementSet
from .oracles import LEMMA_NAMES, VIOLATION, run_sweep, rows_to_csv
from .parse import SpecSyntaxError, parse_group_spec
from .perm import graph_automorphisms
from .cayley import build_graph

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
DEFAULT_MAX_C = 30
BUDGET_ENV = "GRR_CENSUS_BUDGET_C"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    group_spec: str | None = None
    normal_subgroup_selector: str = "all"
    worker_count: int = 1
    max_order: int = gr.DEFAULT_MAX_ORDER
    max_c: int = DEFAULT_MAX_C
    output: str | None = None
    output_format: str = "json"
    checkpoint_path: str | None = None
    seed: int = 0
    lemma: str | None = None
    connection_set: str | None = None
    orders: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.worker_count < 1 or self.max_order < 1 or self.max_c < 1:
            raise UsageError("worker count and budgets must be positive")
        if not 0 <= self.seed < 1 << 64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.output_format not in ("json", "csv"):
            raise UsageError("format must be json or csv")

    def public(self) -> dict:
        """The fields recorded in every report."""
        return {"command": self.command, "group_spec": self.group_spec,
                "normal": self.normal_subgroup_selector, "jobs": self.worker_count,
                "max_order": self.max_order, "max_c": self.max_c, "seed": self.seed,
                "lemma": self.lemma, "set": self.connection_set,
                "orders": list(self.orders) if self.orders else None}


def _header() -> dict:
    now = datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0)
    return {"tool": "grrcensus", "version": __version__, "timestamp": now.isoformat()}


def _document(config: RunConfig, body: dict) -> dict:
    return {"header": _header(), "config": config.public(), **body}


def _emit(config: RunConfig, doc: dict, csv_text: str | None = None) -> None:
    if config.output_format == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(doc, indent=2) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_group(config: RunConfig) -> gr.FiniteGroup:
    if not config.group_spec:
        raise UsageError("a group spec is required")
    G = parse_group_spec(config.group_spec)
    if G.order > config.max_order:
        raise BudgetError(f"group order {G.order} exceeds the order budget {config.max_order}")
    return G


def select_normals(G: gr.FiniteGroup, selector: str) -> list[GroupElementSet]:
    """``all``, an index into the proper normal subgroups, or ``gens=a,b,...``."""
    normals = proper_normal_subgroups(G)
    if selector == "all":
        return normals
    if selector.startswith("gens="):
        try:
            gens = [int(x) for x in selector[5:].split(",") if x]
        except ValueError:
            raise UsageError(f"bad generator list {selector!r}") from None
        if any(not 0 <= g < G.order for g in gens):
            raise UsageError("generator outside the group")
        N = GroupElementSet(G, gr.subgroup_closure(G, gens))
        if not gr.is_normal(G, N) or len(N) in (1, G.order):
            raise UsageError("generators must give a non-identity proper normal subgroup")
        return [N]
    try:
        k = int(selector)
    except ValueError:
        raise UsageError(f"bad normal-subgroup selector {selector!r}") from None
    if not 0 <= k < len(normals):
        raise UsageError(f"normal subgroup index {k} outside 0..{len(normals) - 1}")
    return [normals[k]]


def parse_set(G: gr.FiniteGroup, text: str) -> ConnectionSet:
    """``0x``-prefixed hex bit vector, or a comma-separated element list."""
    text = text.strip()
    if text.lower().startswith("0x"):
        return ConnectionSet.from_hex(G, text[2:])
    try:
        elems = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"bad connection set {text!r}") from None
    return ConnectionSet.from_elements(G, elems)


# ------------------------------------------------------------------ commands

def cmd_group_info(config: RunConfig) -> int:
    G = _load_group(config)
    decs = gr.is_generalized_dicyclic(G)
    body = {
        "group": G.label, "order": G.order, "c_value": SetCodec(G).c,
        "abelian": G.is_abelian(), "exponent": G.exponent(),
        "abelian_exponent_gt2": gr.is_abelian_exp_gt2(G),
        "generalized_dicyclic": [{"A": d.A.elements(), "y": d.y, "x": d.x} for d in decs],
        "excluded_family": excluded_family(G),
        "element_orders": list(G.elem_order),
        "proper_normal_subgroups": [N.elements() for N in proper_normal_subgroups(G)],
        "automorphism_group_order": len(gr.automorphism_group(G)) if G.order <= 32 else None,
    }
    _emit(config, _document(config, body))
    return EXIT_OK


def cmd_grr_check(config: RunConfig) -> int:
    G = _load_group(config)
    if config.connection_set is None:
        raise UsageError("grr-check needs --set")
    S = parse_set(G, config.connection_set)
    aut = graph_automorphisms(build_graph(G, S))
    body = {"group": G.label, "set": S.elements(), "set_hex": S.to_hex(),
            "automorphism_group_order": aut.order, "is_grr": aut.order == G.order,
            "excluded_family": excluded_family(G)}
    _emit(config, _document(config, body))
    return EXIT_OK


def cmd_census(config: RunConfig) -> int:
    G = _load_group(config)
    c = SetCodec(G).c
    if c > config.max_c:
        raise BudgetError(f"c({G.label}) = {c} exceeds the enumeration budget {config.max_c}")
    normals = select_normals(G, config.normal_subgroup_selector)
    if not normals:
        raise UsageError(f"{G.label} has no non-identity proper normal subgroup")
    totals = run_census_multi(G, normals, config.worker_count, config.checkpoint_path,
                              max_c=config.max_c)
    reports = []
    ok = True
    for N, counts in zip(normals, totals):
        counts.check_invariants()
        records = check_bounds(G, N, counts)
        ok &= bounds_hold(records)
        reports.append(census_report(G, N, counts, records))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        w.writerows(csv_rows(rep))
    _emit(config, _document(config, {"reports": reports, "all_bounds_hold": ok}), buf.getvalue())
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_verify_lemma(config: RunConfig) -> int:
    if config.lemma not in LEMMA_NAMES:
        raise UsageError(f"unknown lemma {config.lemma!r}; choose from {', '.join(LEMMA_NAMES)}")
    max_order = config.extra.get("max_order_given") and config.max_order
    rows = run_sweep(config.lemma, max_order or None, config.seed)
    outcomes = collections.Counter(r.outcome for r in rows)
    clauses = collections.Counter(f"{r.outcome}:{r.exceptional_clause}" for r in rows)
    bad = [r for r in rows if r.outcome == VIOLATION]
    body = {"lemma": config.lemma, "instances": len(rows),
            "outcomes": dict(sorted(outcomes.items())),
            "clauses": dict(sorted(clauses.items())),
            "violations": [dict(zip(("lemma_id", "group", "parameters", "outcome", "count",
                                     "bound", "exceptional_clause"), r.as_tuple()))
                           for r in bad]}
    _emit(config, _document(config, body), rows_to_csv(rows))
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_density_report(config: RunConfig) -> int:
    if config.orders is None:
        raise UsageError("density-report needs --orders a..b")
    lo, hi = config.orders
    if hi > config.max_order:
        raise BudgetError(f"order {hi} exceeds the order budget {config.max_order}")
    groups = catalog_groups(hi, lo)
    within = [G for G in groups if SetCodec(G).c <= config.max_c]
    skipped = [G.label for G in groups if SetCodec(G).c > config.max_c]
    rows = grr_density_report(within, config.max_c)
    body = {"rows": [{"group": r.group, "order": r.order, "total_sets": r.total_sets,
                      "grr_count": r.grr_count, "density": round(r.density, 9)} for r in rows],
            "skipped_over_budget": skipped}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("group", "order", "total_sets", "grr_count", "density"))
    for r in body["rows"]:
        w.writerow(tuple(r.values()))
    _emit(config, _document(config, body), buf.getvalue())
    return EXIT_OK


COMMANDS = {
    "group-info": cmd_group_info,
    "grr-check": cmd_grr_check,
    "census": cmd_census,
    "verify-lemma": cmd_verify_lemma,
    "density-report": cmd_density_report,
}


def run(config: RunConfig) -> int:
    try:
        return COMMANDS[config.command](config)
    except (UsageError, SpecSyntaxError, GroupError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


# -------------------------------------------------------------------- parsing

def _orders(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a..b") from None
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("need 1 <= a <= b")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grr-census", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        if group:
            sp.add_argument("group_spec")
        sp.add_argument("--out")
        sp.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
        sp.add_argument("--max-order", type=int, default=None)
        sp.add_argument("--max-c", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("group-info", help="structure of one group"))
    sp = sub.add_parser("grr-check", help="is one Cayley graph a GRR")
    common(sp)
    sp.add_argument("--set", dest="connection_set", required=True)
    sp = sub.add_parser("census", help="exhaustive strata census with bound checks")
    common(sp)
    sp.add_argument("--normal", default="all")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--checkpoint")
    sp = sub.add_parser("verify-lemma", help="brute-force sweep of one counting statement")
    sp.add_argument("lemma", choices=LEMMA_NAMES)
    common(sp, group=False)
    sp = sub.add_parser("density-report", help="GRR density for catalog groups")
    common(sp, group=False)
    sp.add_argument("--orders", type=_orders, required=True)
    return p


def config_from_args(ns: argparse.Namespace, environ=os.environ) -> RunConfig:
    max_c = ns.max_c
    if max_c is None and environ.get(BUDGET_ENV):
        try:
            max_c = int(environ[BUDGET_ENV])
        except ValueError:
            raise UsageError(f"{BUDGET_ENV} must be an integer") from None
    return RunConfig(
        command=ns.command,
        group_spec=getattr(ns, "group_spec", None),
        normal_subgroup_selector=getattr(ns, "normal", "all"),
        worker_count=getattr(ns, "jobs", 1),
        max_order=ns.max_order or gr.DEFAULT_MAX_ORDER,
        max_c=max_c or DEFAULT_MAX_C,
        output=ns.out,
        output_format=ns.output_format,
        checkpoint_path=getattr(ns, "checkpoint", None),
        seed=ns.seed,
        lemma=getattr(ns, "lemma", None),
        connection_set=getattr(ns, "connection_set", None),
        orders=getattr(ns, "orders", None),
        extra={"max_order_given": ns.max_order is not None},
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = config_from_args(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
