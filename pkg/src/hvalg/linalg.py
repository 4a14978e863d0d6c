"""Exact linear systems over the rationals.

Systems are sparse rows keyed by unknown name.  ``solve`` produces a full
reduced row echelon solution with a fixed pivot order (unknowns in
registry order, then lowest row), so the particular solution and the
kernel basis are reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

QQ = Fraction


class UnrepresentableConstraint(UserWarning):
    """A right-hand side has support no unknown can reach at this window."""


class SolveStatus(Enum):
    SOLVED = "solved"
    INCONSISTENT = "inconsistent"


@dataclass
class LinSystem:
    """Sparse linear system ``sum(coeff * unknown) = rhs`` per row.

    ``unknowns`` fixes the column (pivot) order; every row may only
    reference registered unknowns.
    """

    unknowns: tuple[str, ...]
    rows: list[tuple[dict[str, QQ], QQ]] = field(default_factory=list)
    notes: tuple[str, ...] = ()

    def add_row(self, coeffs: dict[str, QQ], rhs) -> None:
        self.rows.append(({u: QQ(c) for u, c in coeffs.items() if c}, QQ(rhs)))


@dataclass
class SolutionSpace:
    """Particular solution plus kernel basis of a linear system.

    For a solved system, ``particular`` assigns every unknown a rational
    (free unknowns get 0) and ``kernel_basis`` spans the homogeneous
    solutions, one vector per free unknown in registry order, in reduced
    echelon form.
    """

    status: SolveStatus
    particular: dict[str, QQ] | None
    kernel_basis: list[dict[str, QQ]]

    @property
    def solved(self) -> bool:
        return self.status is SolveStatus.SOLVED

    @property
    def kernel_dimension(self) -> int:
        return len(self.kernel_basis)


def solve(system: LinSystem) -> SolutionSpace:
    """Exact RREF solve; inconsistency is a status, not an error."""
    order = {u: k for k, u in enumerate(system.unknowns)}
    rows: list[dict[str, QQ]] = []
    rhss: list[QQ] = []
    for coeffs, rhs in system.rows:
        for u in coeffs:
            if u not in order:
                raise ValueError(f"row references unregistered unknown {u!r}")
        row = {u: QQ(c) for u, c in coeffs.items() if c}
        rows.append(row)
        rhss.append(QQ(rhs))

    pivot_of: dict[str, int] = {}  # unknown -> row index
    pivot_rows: set[int] = set()
    for u in system.unknowns:
        pick = None
        for k in range(len(rows)):
            if k not in pivot_rows and rows[k].get(u):
                pick = k
                break
        if pick is None:
            continue
        inv = 1 / rows[pick][u]
        rows[pick] = {v: c * inv for v, c in rows[pick].items()}
        rhss[pick] *= inv
        prow, prhs = rows[pick], rhss[pick]
        for k in range(len(rows)):
            if k == pick:
                continue
            factor = rows[k].get(u)
            if not factor:
                continue
            merged = dict(rows[k])
            for v, c in prow.items():
                acc = merged.get(v, QQ(0)) - factor * c
                if acc:
                    merged[v] = acc
                else:
                    merged.pop(v, None)
            rows[k] = merged
            rhss[k] -= factor * prhs
        pivot_of[u] = pick
        pivot_rows.add(pick)

    for k in range(len(rows)):
        if k not in pivot_rows and not rows[k] and rhss[k]:
            return SolutionSpace(SolveStatus.INCONSISTENT, None, [])

    particular = {u: QQ(0) for u in system.unknowns}
    for u, k in pivot_of.items():
        particular[u] = rhss[k]

    kernel: list[dict[str, QQ]] = []
    for f in system.unknowns:
        if f in pivot_of:
            continue
        vec = {u: QQ(0) for u in system.unknowns}
        vec[f] = QQ(1)
        for u, k in pivot_of.items():
            c = rows[k].get(f)
            if c:
                vec[u] = -c
        kernel.append(vec)

    return SolutionSpace(SolveStatus.SOLVED, particular, kernel)
