"""A fixed list of small groups used by sweeps, reports and tests."""
from __future__ import annotations

from .groups import FiniteGroup
from .parse import parse_group_spec

# One spec per isomorphism type, ordered by group order. Every group of order
# at most 16 is present; orders 17-24 are a partial selection.
CATALOG_SPECS: tuple[str, ...] = (
    "C1", "C2", "C3", "C4", "EA2", "C5", "C6", "D3", "C7",
    "C8", "C4xC2", "EA3", "D4", "Q8",
    "C9", "C3xC3", "C10", "D5", "C11",
    "C12", "C6xC2", "D6", "A4", "Dic(C6)", "C13", "C14", "D7", "C15",
    "C16", "C4xC4", "C8xC2", "C4xEA2", "EA4", "D8", "Q8xC2", "D4xC2",
    "SD16", "M16", "Pauli", "EA2sC4", "Dic(C8)", "Dic(C4xC2;y=1)",
    "C17", "C18", "C6xC3", "D9", "D3xC3", "C19",
    "C20", "C10xC2", "D10", "Dic(C10)", "C21", "C22", "D11", "C23",
    "C24", "C12xC2", "C6xEA2", "D12", "D6xC2", "A4xC2", "Q8xC3", "Dic(C12)",
)


def catalog_groups(max_order: int = 24, min_order: int = 1) -> list[FiniteGroup]:
    """Catalog groups with min_order <= |G| <= max_order, in catalog order."""
    out = []
    for spec in CATALOG_SPECS:
        G = parse_group_spec(spec)
        if min_order <= G.order <= max_order:
            out.append(G)
    return out
