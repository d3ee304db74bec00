"""Small exact linear algebra over ``Fraction``."""
from __future__ import annotations

import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Sequence

from .errors import InvalidInput

RationalVector = tuple[Fraction, ...]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, a decimal string, or an int exactly.

    Floats are rejected because their binary value is rarely what was meant.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool) or isinstance(text, float):
        raise InvalidInput(f"refusing inexact value {text!r}; pass a string")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInput(f"cannot parse rational from {type(text).__name__}")
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            den_i = int(den)
            if den_i == 0:
                raise InvalidInput(f"zero denominator in {text!r}")
            return Fraction(int(num), den_i)
        return Fraction(Decimal(s))
    except (ValueError, InvalidOperation):
        raise InvalidInput(f"malformed rational {text!r}") from None


def as_vector(values) -> RationalVector:
    return tuple(parse_rational(v) for v in values)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u: Sequence, v: Sequence) -> RationalVector:
    return tuple(a - b for a, b in zip(u, v))


def primitive(v: Sequence[Fraction], keep_sign: bool = False) -> RationalVector:
    """Scale ``v`` to coprime integers.

    The first nonzero entry is made positive unless ``keep_sign`` is set, in
    which case only positive scalings are used and the direction is kept.
    """
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    lead = next(x for x in ints if x != 0)
    if lead < 0 and not keep_sign:
        g = -g
    return tuple(Fraction(x // g) for x in ints)


def rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[RationalVector]:
    """Basis of {x : row . x = 0 for every row}, one vector per free column."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve_square(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> RationalVector:
    """Solve a nonsingular square system exactly."""
    n = len(a)
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise InvalidInput("singular system")
    return tuple(row[n] for row in red)


def orthogonal_projection(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> RationalVector:
    """Exact projection of ``v`` onto span(basis); basis must be independent."""
    if not basis:
        return tuple(Fraction(0) for _ in v)
    gram = [[dot(a, b) for b in basis] for a in basis]
    coef = solve_square(gram, [dot(a, v) for a in basis])
    out = [Fraction(0)] * len(v)
    for c, a in zip(coef, basis):
        for i, x in enumerate(a):
            out[i] += c * x
    return tuple(out)


def gram_schmidt(basis: Sequence[Sequence[Fraction]]) -> list[RationalVector]:
    """Mutually orthogonal (unnormalized) rational basis of the same span."""
    out: list[RationalVector] = []
    for v in basis:
        w = list(v)
        for q in out:
            c = dot(w, q) / dot(q, q)
            w = [a - c * b for a, b in zip(w, q)]
        if any(x != 0 for x in w):
            out.append(tuple(w))
    return out
