"""The twisted Heisenberg-Virasoro algebra at level zero, over exact rationals.

Basis ``{L[n], I[n] : n in Z}`` plus three central symbols ``C_L``,
``C_LI``, ``C_I``, with brackets

    [L[n], L[m]] = (n - m) L[n+m] + d(n,-m) (n^3 - n)/12 C_L
    [L[n], I[m]] = -m I[n+m]      + sigma d(n,-m) (n^2 + n) C_LI
    [I[n], I[m]] = n d(n,-m) C_I
    [  *  , C_*] = 0

where ``d`` is the Kronecker delta and ``sigma`` is the cocycle sign on
the C_LI term: +1 under the "paper" convention, -1 under the
"consistent" convention.  Both satisfy Jacobi; only sigma = -1 makes the
outer maps D2 and D3 honest derivations (see ``derivations.sign_audit``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

QQ = Fraction

_FAMILY_RANK = {"L": 0, "I": 1, "C_L": 2, "C_LI": 3, "C_I": 4}
_CENTRAL_FAMILIES = frozenset({"C_L", "C_LI", "C_I"})


class Sign(Enum):
    """Cocycle sign sigma on the d(n,-m)(n^2+n) C_LI term of [L, I]."""

    PAPER = 1
    CONSISTENT = -1

    @classmethod
    def from_name(cls, name: str) -> "Sign":
        try:
            return {"paper": cls.PAPER, "consistent": cls.CONSISTENT}[name]
        except KeyError:
            raise ValueError(f"unknown sign convention {name!r}") from None

    @property
    def label(self) -> str:
        return "paper" if self is Sign.PAPER else "consistent"


@dataclass(frozen=True)
class BasisSymbol:
    """One basis symbol: L[n], I[n], C_L, C_LI or C_I."""

    family: str
    index: int = 0

    def __post_init__(self):
        if self.family not in _FAMILY_RANK:
            raise ValueError(f"unknown basis family {self.family!r}")
        if self.family in _CENTRAL_FAMILIES and self.index != 0:
            raise ValueError(f"{self.family} carries no index")

    @property
    def is_central(self) -> bool:
        """True for C_L, C_LI, C_I (zero bracket with everything, structurally)."""
        return self.family in _CENTRAL_FAMILIES

    @property
    def sort_key(self) -> tuple[int, int]:
        return (_FAMILY_RANK[self.family], self.index)

    def __str__(self) -> str:
        if self.is_central:
            return self.family
        return f"{self.family}[{self.index}]"


def L(n: int) -> BasisSymbol:
    return BasisSymbol("L", n)


def I(n: int) -> BasisSymbol:
    return BasisSymbol("I", n)


C_L = BasisSymbol("C_L")
C_LI = BasisSymbol("C_LI")
C_I = BasisSymbol("C_I")

#: The center is span{I[0], C_L, C_LI, C_I}: I[0] is central because both
#: its bracket coefficients (-m and n) vanish whenever the delta fires.
CENTER_SYMBOLS = (I(0), C_L, C_LI, C_I)


class Element:
    """Immutable finitely supported rational combination of basis symbols.

    Canonical sparse form: no stored coefficient is zero.  Terms print in
    a fixed order (L by ascending index, then I by ascending index, then
    C_L, C_LI, C_I) so string output is byte-stable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=()):
        data: dict[BasisSymbol, QQ] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for sym, coeff in items:
            if not isinstance(sym, BasisSymbol):
                raise TypeError(f"expected BasisSymbol, got {sym!r}")
            acc = data.get(sym, QQ(0)) + QQ(coeff)
            if acc:
                data[sym] = acc
            else:
                data.pop(sym, None)
        self._terms = data
        self._hash = None

    def coeff(self, sym: BasisSymbol) -> QQ:
        return self._terms.get(sym, QQ(0))

    def terms(self) -> list[tuple[BasisSymbol, QQ]]:
        """Terms in canonical print order."""
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key)

    @property
    def support(self) -> tuple[BasisSymbol, ...]:
        return tuple(sym for sym, _ in self.terms())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def max_index(self) -> int:
        """Largest |n| over L/I terms; 0 for central or zero elements."""
        return max((abs(s.index) for s in self._terms if not s.is_central), default=0)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        merged = dict(self._terms)
        for sym, coeff in other._terms.items():
            acc = merged.get(sym, QQ(0)) + coeff
            if acc:
                merged[sym] = acc
            else:
                del merged[sym]
        out = Element.__new__(Element)
        out._terms = merged
        out._hash = None
        return out

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        out = Element.__new__(Element)
        out._terms = {sym: -coeff for sym, coeff in self._terms.items()}
        out._hash = None
        return out

    def __rmul__(self, scalar):
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        scalar = QQ(scalar)
        out = Element.__new__(Element)
        out._terms = (
            {sym: scalar * coeff for sym, coeff in self._terms.items()} if scalar else {}
        )
        out._hash = None
        return out

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((s, c) for s, c in self.terms()))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for sym, coeff in self.terms():
            mag = -coeff if coeff < 0 else coeff
            body = str(sym) if mag == 1 else f"{mag}*{sym}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if coeff > 0 else '-'} {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"<Element {self}>"


ZERO = Element()


def single(sym: BasisSymbol, coeff=1) -> Element:
    """The element ``coeff * sym``."""
    return Element([(sym, coeff)])


def bracket_basis(x: BasisSymbol, y: BasisSymbol, sign: Sign) -> Element:
    """Bracket of two basis symbols from the structure constants."""
    if x.is_central or y.is_central:
        return ZERO
    n, m = x.index, y.index
    if x.family == "L" and y.family == "L":
        terms = [(L(n + m), QQ(n - m))]
        if n + m == 0:
            terms.append((C_L, QQ(n**3 - n, 12)))
        return Element(terms)
    if x.family == "L" and y.family == "I":
        terms = [(I(n + m), QQ(-m))]
        if n + m == 0:
            terms.append((C_LI, QQ(sign.value * (n * n + n))))
        return Element(terms)
    if x.family == "I" and y.family == "L":
        return -bracket_basis(y, x, sign)
    # I with I: level zero, only the central term survives.
    return Element([(C_I, QQ(n))]) if n + m == 0 else ZERO


def bracket(x: Element, y: Element, sign: Sign) -> Element:
    """Bilinear extension of ``bracket_basis`` to arbitrary elements."""
    total = ZERO
    for sx, cx in x.terms():
        if sx.is_central:
            continue
        for sy, cy in y.terms():
            if sy.is_central:
                continue
            total = total + (cx * cy) * bracket_basis(sx, sy, sign)
    return total


def window_symbols(n: int) -> list[BasisSymbol]:
    """W_n = {L[k], I[k] : |k| <= n} plus the centrals, in print order."""
    syms = [L(k) for k in range(-n, n + 1)]
    syms += [I(k) for k in range(-n, n + 1)]
    syms += [C_L, C_LI, C_I]
    return syms

def sweep_symbols(n: int) -> list[BasisSymbol]:
    """Same symbols ordered by increasing |index| (0, 1, -1, 2, -2, ...).

    Pair and triple sweeps enumerate in this order, so the first reported
    violation is the one of smallest degree.
    """
    syms = []
    for fam in (L, I):
        syms.append(fam(0))
        for k in range(1, n + 1):
            syms.append(fam(k))
            syms.append(fam(-k))
    syms += [C_L, C_LI, C_I]
    return syms


@dataclass
class JacobiViolation:
    triple: tuple[BasisSymbol, BasisSymbol, BasisSymbol]
    value: Element


@dataclass
class JacobiReport:
    max_degree: int
    sign: Sign
    triples_checked: int
    violations: list[JacobiViolation]

    @property
    def ok(self) -> bool:
        return not self.violations


def jacobi_check(max_degree: int, sign: Sign) -> JacobiReport:
    """Evaluate the Jacobi cyclic sum on every basis triple with |index| <= max_degree."""
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    violations = []
    checked = 0
    for a, b, c in itertools.combinations(sweep_symbols(max_degree), 3):
        ea, eb, ec = single(a), single(b), single(c)
        total = (
            bracket(bracket_basis(a, b, sign), ec, sign)
            + bracket(bracket_basis(b, c, sign), ea, sign)
            + bracket(bracket_basis(c, a, sign), eb, sign)
        )
        checked += 1
        if total:
            violations.append(JacobiViolation((a, b, c), total))
    return JacobiReport(max_degree, sign, checked, violations)


def center_project(x: Element) -> Element:
    """Canonical representative of x modulo the center span{I[0], C_L, C_LI, C_I}."""
    return Element(
        (sym, coeff) for sym, coeff in x.terms() if sym not in CENTER_SYMBOLS
    )
