"""Parser for the compact group notation used by the CLI and config files.

Grammar (no whitespace)::

    product := factor ('x' factor)*          left-associative direct product
    factor  := 'C' n | 'D' n | 'EA' k | 'Q8' | 'A4' | 'SD' n | 'M' n
             | 'Pauli' | 'EA2sC4' | 'C4sC4' | 'Dic(' product [';y=' index] ')'

``Dic(...)`` needs an explicit ``y`` only when the base has several involutions.
"""
from __future__ import annotations

from . import groups as gr
from .groups import FiniteGroup, GroupError


class SpecSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.pos = pos


_NAMED = {
    "Q8": gr.quaternion,
    "A4": gr.alternating4,
    "Pauli": gr.pauli,
    "EA2sC4": gr.c2sq_by_c4,
    "C4sC4": gr.c4_by_c4,
}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise SpecSyntaxError(self.text, self.pos, msg)

    def peek(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def number(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a number")
        return int(self.text[start:self.pos])

    def product(self) -> tuple[FiniteGroup, str]:
        G, label = self.factor()
        while self.peek("x"):
            self.pos += 1
            H, hl = self.factor()
            label = f"{label}x{hl}"
            G = gr.direct_product(G, H, label=label)
        return G, label

    def factor(self) -> tuple[FiniteGroup, str]:
        for name, ctor in _NAMED.items():
            if self.peek(name):
                self.pos += len(name)
                return ctor(), name
        if self.peek("Dic("):
            self.pos += 4
            A, inner = self.product()
            y = None
            if self.peek(";y="):
                self.pos += 3
                y = self.number()
            self.expect(")")
            return self._dic(A, inner, y)
        start = self.pos
        try:
            if self.peek("EA"):
                self.pos += 2
                k = self.number()
                return gr.elementary_abelian(k), f"EA{k}"
            if self.peek("SD"):
                self.pos += 2
                n = self.number()
                return gr.semidihedral(n), f"SD{n}"
            if self.peek("C"):
                self.pos += 1
                n = self.number()
                if n < 1:
                    self.error("cyclic order must be >= 1")
                return gr.cyclic(n), f"C{n}"
            if self.peek("D"):
                self.pos += 1
                n = self.number()
                return gr.dihedral(n), f"D{n}"
            if self.peek("M"):
                self.pos += 1
                n = self.number()
                return gr.modular(n), f"M{n}"
        except GroupError as exc:
            raise GroupError(f"{exc} (factor at position {start})") from None
        self.error("unknown group factor")

    def _dic(self, A: FiniteGroup, inner: str, y: int | None) -> tuple[FiniteGroup, str]:
        if y is None:
            invs = [g for g in range(A.order) if A.elem_order[g] == 2]
            if len(invs) == 1:
                y = invs[0]
                label = f"Dic({inner})"
            elif A.is_abelian() and A.exponent() > 2 and A.order % 2 == 0:
                self.error(f"Dic({inner}) has {len(invs)} involutions; give ';y=<index>'")
            else:
                # let the constructor report the structural problem
                y = invs[0] if invs else 0
                label = f"Dic({inner})"
        else:
            label = f"Dic({inner};y={y})"
        G, _ = gr.dic(A, y, label=label)
        return G, label


def parse_group_spec(text: str) -> FiniteGroup:
    """Build the group described by ``text``; its label is the normalized text."""
    if not text or any(c.isspace() for c in text):
        raise SpecSyntaxError(text, 0, "spec must be non-empty and whitespace-free")
    p = _Parser(text)
    G, label = p.product()
    if p.pos != len(text):
        p.error("trailing characters")
    if G.label != label:
        G = FiniteGroup(G.table, label=label)
    return G

