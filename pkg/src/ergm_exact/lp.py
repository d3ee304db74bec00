"""Exact two-phase tableau simplex over ``Fraction`` with Bland's rule.

Problems have the form::

    maximize   c . x
    subject to A x = b
               x_j >= lower_j   (lower_j = None means x_j is free)

Every outcome is a certificate.  ``optimal`` carries a basic solution,
``infeasible`` carries a vector ``y`` with ``y . A_j <= 0`` for bounded
columns, ``y . A_j = 0`` for free columns and ``y . (b - A l) > 0``, and
``unbounded`` carries a feasible ray with positive objective slope.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CertificateError, InvalidInput
from .exact import RationalVector, dot

ZERO = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str
    x: RationalVector | None = None
    value: Fraction | None = None
    farkas: RationalVector | None = None
    ray: RationalVector | None = None
    pivots: int = 0


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.obj: list[Fraction] = []
        self.pivots = 0

    def pivot(self, p: int, q: int) -> None:
        row = self.rows[p]
        inv = 1 / row[q]
        row = [v * inv for v in row]
        self.rows[p] = row
        nz = [j for j, v in enumerate(row) if v != 0]
        for i, other in enumerate(self.rows):
            f = other[q]
            if i != p and f != 0:
                for j in nz:
                    other[j] -= f * row[j]
        f = self.obj[q]
        if f != 0:
            for j in nz:
                self.obj[j] -= f * row[j]
        self.basis[p] = q
        self.pivots += 1

    def run(self, ncols: int) -> int | None:
        """Bland's rule to optimality; returns an unbounded column or None."""
        while True:
            q = next((j for j in range(ncols) if self.obj[j] > 0), None)
            if q is None:
                return None
            best = None
            for i, row in enumerate(self.rows):
                if row[q] > 0:
                    key = (row[-1] / row[q], self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return q
            self.pivot(best[1], q)


def _standard(c, a, b):
    """Solve max c.x, a x = b, x >= 0. Returns (status, x|farkas|ray, pivots)."""
    m, n = len(a), len(c)
    signs = [(-1 if bi < 0 else 1) for bi in b]
    rows = []
    for i in range(m):
        s = signs[i]
        art = [ZERO] * m
        art[i] = Fraction(1)
        rows.append([s * v for v in a[i]] + art + [s * b[i]])
    tab = _Tableau(rows, [n + i for i in range(m)])

    # phase 1: maximize -(sum of artificials)
    tab.obj = [sum((r[j] for r in rows), ZERO) for j in range(n)] + [ZERO] * m
    tab.obj.append(sum((r[-1] for r in rows), ZERO))
    tab.run(n)
    if tab.obj[-1] != 0:
        # duals of the artificial columns give the Farkas vector
        w = [signs[i] * (1 + tab.obj[n + i]) for i in range(m)]
        return "infeasible", tuple(w), tab.pivots

    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            q = next((j for j in range(n) if tab.rows[i][j] != 0), None)
            if q is None:
                continue  # redundant equality
            tab.pivot(i, q)
        keep.append(i)
    tab.rows = [tab.rows[i][:n] + [tab.rows[i][-1]] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    obj = [Fraction(v) for v in c] + [ZERO]
    for row, bv in zip(tab.rows, tab.basis):
        cb = c[bv]
        if cb != 0:
            obj = [o - cb * v for o, v in zip(obj, row)]
    tab.obj = obj
    q = tab.run(n)
    if q is not None:
        d = [ZERO] * n
        d[q] = Fraction(1)
        for row, bv in zip(tab.rows, tab.basis):
            d[bv] = -row[q]
        return "unbounded", tuple(d), tab.pivots
    x = [ZERO] * n
    for row, bv in zip(tab.rows, tab.basis):
        x[bv] = row[-1]
    return "optimal", tuple(x), tab.pivots


def lp_solve(
    objective: Sequence,
    a_eq: Sequence[Sequence],
    b_eq: Sequence,
    lower: Sequence | None = None,
) -> LPResult:
    """Maximize ``objective . x`` subject to ``a_eq x = b_eq`` and lower bounds.

    ``lower`` defaults to all zeros; an entry of ``None`` makes that variable
    free.  Data are converted to ``Fraction``; floats are accepted only if
    they are exactly the intended binary values.
    """
    c = [Fraction(v) for v in objective]
    a = [[Fraction(v) for v in row] for row in a_eq]
    b = [Fraction(v) for v in b_eq]
    n = len(c)
    if len(a) != len(b) or any(len(row) != n for row in a):
        raise InvalidInput("constraint shapes do not match the objective")
    lower = [ZERO] * n if lower is None else [None if v is None else Fraction(v) for v in lower]
    if len(lower) != n:
        raise InvalidInput("lower bounds must have one entry per variable")

    # columns of the nonnegative form: (original index, sign)
    cols = []
    for j, lj in enumerate(lower):
        cols.append((j, 1))
        if lj is None:
            cols.append((j, -1))
    shift = [ZERO if lj is None else lj for lj in lower]
    b2 = [bi - dot(row, shift) for row, bi in zip(a, b)]
    a2 = [[s * row[j] for j, s in cols] for row in a]
    c2 = [s * c[j] for j, s in cols]

    status, vec, pivots = _standard(c2, a2, b2)
    if status == "infeasible":
        return LPResult("infeasible", farkas=vec, pivots=pivots)

    def back(v, base):
        out = list(base)
        for (j, s), val in zip(cols, v):
            out[j] += s * val
        return tuple(out)

    if status == "unbounded":
        return LPResult("unbounded", ray=back(vec, [ZERO] * n), pivots=pivots)
    x = back(vec, shift)
    return LPResult("optimal", x=x, value=dot(c, x), pivots=pivots)


def check_result(res: LPResult, objective, a_eq, b_eq, lower=None) -> None:
    """Verify a result's certificate exactly; raises CertificateError."""
    n = len(objective)
    lower = [ZERO] * n if lower is None else list(lower)
    cols = [[Fraction(row[j]) for row in a_eq] for j in range(n)]
    if res.status == "optimal":
        x = res.x
        if any(dot(row, x) != Fraction(bi) for row, bi in zip(a_eq, b_eq)):
            raise CertificateError("solution violates an equality")
        if any(lj is not None and xj < lj for xj, lj in zip(x, lower)):
            raise CertificateError("solution violates a lower bound")
    elif res.status == "infeasible":
        y = res.farkas
        shift = [ZERO if lj is None else Fraction(lj) for lj in lower]
        rhs = dot(y, [Fraction(bi) - dot(row, shift) for row, bi in zip(a_eq, b_eq)])
        if rhs <= 0:
            raise CertificateError("Farkas vector has nonpositive right-hand side")
        for col, lj in zip(cols, lower):
            v = dot(y, col)
            if v > 0 or (lj is None and v != 0):
                raise CertificateError("Farkas vector fails a column sign condition")
    elif res.status == "unbounded":
        d = res.ray
        if any(dot(row, d) != 0 for row in a_eq):
            raise CertificateError("ray leaves the equality set")
        if any(lj is not None and dj < 0 for dj, lj in zip(d, lower)):
            raise CertificateError("ray decreases a bounded variable")
        if dot([Fraction(v) for v in objective], d) <= 0:
            raise CertificateError("ray does not improve the objective")
    else:
        raise CertificateError(f"unknown status {res.status!r}")
