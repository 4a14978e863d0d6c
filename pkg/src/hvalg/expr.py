"""Parsing of algebra elements from text.

Grammar (whitespace-insensitive, no implicit multiplication):

    element := ['+'|'-'] term (('+'|'-') term)*
    term    := [coeff '*'] atom | coeff
    coeff   := int ['/' posint]
    atom    := 'L[' int ']' | 'I[' int ']' | 'C_L' | 'C_LI' | 'C_I'

A bare coefficient term must be 0 and denotes the zero element (the
algebra has no unit, so nonzero constants are rejected).  Printing is
``str(element)``; ``parse(str(e)) == e`` for every element.
"""

from __future__ import annotations

from .algebra import QQ, BasisSymbol, Element, ZERO, single

_SYMBOL_NAMES = ("L", "I", "C_L", "C_LI", "C_I")


class ParseError(ValueError):
    """Syntax or value error, with byte offset and expected-token set."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)


class _Scanner:
    """Tokens: INT, NAME, one of '+-*/[]', END.  Offsets are byte positions."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.token = None
        self.value = ""
        self.offset = 0
        self.advance()

    def advance(self):
        text, k = self.text, self.pos
        while k < len(text) and text[k].isspace():
            k += 1
        self.offset = k
        if k >= len(text):
            self.token, self.value, self.pos = "END", "", k
            return
        ch = text[k]
        if ch.isdigit():
            j = k
            while j < len(text) and text[j].isdigit():
                j += 1
            self.token, self.value, self.pos = "INT", text[k:j], j
        elif ch.isalpha() or ch == "_":
            j = k
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            self.token, self.value, self.pos = "NAME", text[k:j], j
        elif ch in "+-*/[]":
            self.token, self.value, self.pos = ch, ch, k + 1
        else:
            raise ParseError(f"unexpected character {ch!r}", k)

    def expect(self, token: str, expected: tuple[str, ...]) -> str:
        if self.token != token:
            raise ParseError(f"unexpected {self.value or 'end of input'!r}", self.offset, expected)
        value = self.value
        self.advance()
        return value


def parse(text: str) -> Element:
    """Parse ``text`` into a canonical Element; raise ParseError otherwise."""
    sc = _Scanner(text)
    total = ZERO
    negative = False
    if sc.token in ("+", "-"):
        negative = sc.token == "-"
        sc.advance()
    total = total + _term(sc, negative)
    while sc.token in ("+", "-"):
        negative = sc.token == "-"
        sc.advance()
        total = total + _term(sc, negative)
    if sc.token != "END":
        raise ParseError(
            f"unexpected {sc.value!r}", sc.offset, ("'+'", "'-'", "end of input")
        )
    return total


def _term(sc: _Scanner, negative: bool) -> Element:
    if sc.token == "INT":
        at = sc.offset
        coeff = _coeff(sc)
        if sc.token == "*":
            sc.advance()
            atom = _atom(sc)
            return single(atom, -coeff if negative else coeff)
        if sc.token == "NAME":
            raise ParseError(
                "missing '*' between coefficient and symbol", sc.offset, ("'*'",)
            )
        if coeff != 0:
            raise ParseError("standalone constant must be 0", at)
        return ZERO
    if sc.token == "NAME":
        atom = _atom(sc)
        return single(atom, -1 if negative else 1)
    raise ParseError(
        f"unexpected {sc.value or 'end of input'!r}",
        sc.offset,
        ("integer", "'L['", "'I['", "'C_L'", "'C_LI'", "'C_I'"),
    )


def _coeff(sc: _Scanner) -> QQ:
    num = int(sc.expect("INT", ("integer",)))
    if sc.token != "/":
        return QQ(num)
    sc.advance()
    at = sc.offset
    den = int(sc.expect("INT", ("positive integer",)))
    if den == 0:
        raise ParseError("zero denominator", at)
    return QQ(num, den)


def _atom(sc: _Scanner) -> BasisSymbol:
    at = sc.offset
    name = sc.expect("NAME", ("'L['", "'I['", "'C_L'", "'C_LI'", "'C_I'"))
    if name in ("C_L", "C_LI", "C_I"):
        return BasisSymbol(name)
    if name not in ("L", "I"):
        raise ParseError(
            f"unknown symbol {name!r}", at, ("'L['", "'I['", "'C_L'", "'C_LI'", "'C_I'")
        )
    sc.expect("[", ("'['",))
    negative = False
    if sc.token == "-":
        negative = True
        sc.advance()
    index = int(sc.expect("INT", ("integer",)))
    sc.expect("]", ("']'",))
    return BasisSymbol(name, -index if negative else index)
