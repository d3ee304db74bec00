"""Exact convex geometry of a finite rational point set.

All functions accept either a :class:`~ergm_exact.graphspace.RealizableSet`
or a plain sequence of rational points.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityExceeded, CertificateError, InvalidInput
from .exact import (
    RationalVector,
    as_vector,
    dot,
    gram_schmidt,
    nullspace,
    orthogonal_projection,
    primitive,
    rref,
    sub,
)
from .lp import lp_solve

N_MAX = 12


class Verdict(str, enum.Enum):
    RELATIVE_INTERIOR = "RELATIVE_INTERIOR"
    RELATIVE_BOUNDARY = "RELATIVE_BOUNDARY"
    OUTSIDE_HULL = "OUTSIDE_HULL"
    OUTSIDE_AFFINE_HULL = "OUTSIDE_AFFINE_HULL"


@dataclass(frozen=True)
class AffineGeometry:
    dim: int
    v_basis: tuple[RationalVector, ...]
    vperp_basis: tuple[RationalVector, ...]
    vertex_indices: tuple[int, ...] | None

    @property
    def n(self) -> int:
        return len(self.v_basis) + len(self.vperp_basis)

    def orthonormal_v(self) -> np.ndarray:
        """n x dim float matrix with orthonormal columns spanning V."""
        cols = [np.array([float(x) for x in q]) for q in gram_schmidt(self.v_basis)]
        if not cols:
            return np.zeros((self.n, 0))
        return np.column_stack([c / np.linalg.norm(c) for c in cols])


@dataclass(frozen=True)
class RintCertificate:
    verdict: Verdict
    weights: tuple[Fraction, ...] | None = None
    min_weight: Fraction | None = None
    separator: RationalVector | None = None
    margin: Fraction | None = None
    affine_residual: RationalVector | None = None
    vertex_index: int | None = None

    @property
    def in_relative_interior(self) -> bool:
        return self.verdict is Verdict.RELATIVE_INTERIOR


def _points(obj) -> tuple[RationalVector, ...]:
    pts = getattr(obj, "points", obj)
    pts = tuple(tuple(Fraction(x) for x in p) for p in pts)
    if not pts:
        raise InvalidInput("point set is empty")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise InvalidInput("points have inconsistent dimension")
    if n > N_MAX:
        raise CapacityExceeded(f"dimension {n} exceeds {N_MAX}")
    return pts


def _span(pts):
    n = len(pts[0])
    diffs = [sub(p, pts[0]) for p in pts[1:]]
    red, _ = rref(diffs, n)
    v_basis = tuple(primitive(r) for r in red)
    vperp = tuple(primitive(u) for u in nullspace(red, n)) if red else tuple(
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    )
    return v_basis, vperp


def _in_hull_of_others(i: int, pts, skip=()) -> bool:
    others = [p for j, p in enumerate(pts) if j != i and j not in skip]
    if not others:
        return False
    n = len(pts[0])
    rows = [[p[c] for p in others] for c in range(n)] + [[Fraction(1)] * len(others)]
    rhs = list(pts[i]) + [Fraction(1)]
    return lp_solve([0] * len(others), rows, rhs).status == "optimal"


def _sure_vertices(pts, trials: int = 64) -> set[int]:
    """Points that uniquely maximize some integer direction (exact)."""
    n = len(pts[0])
    scale = [1] * n
    for c in range(n):
        for p in pts:
            d = p[c].denominator
            scale[c] = scale[c] * d // np.gcd(scale[c], d)
    ints = np.array([[int(p[c] * scale[c]) for c in range(n)] for p in pts], dtype=object)
    rng = np.random.default_rng(0)
    dirs = [np.eye(n, dtype=int)[c] * s for c in range(n) for s in (1, -1)]
    dirs += list(rng.integers(-20, 21, size=(trials, n)))
    found = set()
    for d in dirs:
        vals = ints.dot(np.asarray(d, dtype=object))
        top = max(vals)
        hits = [i for i, v in enumerate(vals) if v == top]
        if len(hits) == 1:
            found.add(hits[0])
    return found


def hull_vertices(points) -> tuple[int, ...]:
    """Indices of points that are not convex combinations of the others."""
    pts = _points(points)
    if len(pts) == 1:
        return (0,)
    sure = _sure_vertices(pts)
    interior: set[int] = set()
    for i in range(len(pts)):
        # dropping known non-vertices leaves the hull of the others unchanged
        if i not in sure and _in_hull_of_others(i, pts, interior):
            interior.add(i)
    return tuple(i for i in range(len(pts)) if i not in interior)


def affine_geometry(points, vertices: bool = True) -> AffineGeometry:
    pts = _points(points)
    v_basis, vperp = _span(pts)
    return AffineGeometry(
        dim=len(v_basis),
        v_basis=v_basis,
        vperp_basis=vperp,
        vertex_indices=hull_vertices(pts) if vertices else None,
    )


def rint_membership(t, points, geometry: AffineGeometry | None = None) -> RintCertificate:
    """Classify ``t`` against the convex hull of ``points``, with a witness."""
    pts = _points(points)
    t = as_vector(t)
    n = len(pts[0])
    if len(t) != n:
        raise InvalidInput(f"target has length {len(t)}, statistics have {n}")
    if geometry is None:
        geometry = affine_geometry(pts, vertices=False)

    residual = orthogonal_projection(sub(t, pts[0]), geometry.vperp_basis)
    if any(residual):
        theta = primitive(residual, keep_sign=True)
        cert = RintCertificate(
            Verdict.OUTSIDE_AFFINE_HULL,
            separator=theta,
            margin=dot(theta, t) - dot(theta, pts[0]),
            affine_residual=residual,
        )
        check_certificate(cert, t, pts)
        return cert

    # lambda_i = mu_i + eps with mu, eps >= 0; maximize eps
    m = len(pts)
    rows = [[p[c] for p in pts] + [sum((p[c] for p in pts), Fraction(0))] for c in range(n)]
    rows.append([Fraction(1)] * m + [Fraction(m)])
    res = lp_solve([0] * m + [1], rows, list(t) + [Fraction(1)])
    if res.status == "infeasible":
        w = res.farkas[:n]
        theta = primitive(w, keep_sign=True)
        margin = dot(theta, t) - max(dot(theta, p) for p in pts)
        cert = RintCertificate(Verdict.OUTSIDE_HULL, separator=theta, margin=margin)
    else:
        eps = res.value
        weights = tuple(mu + eps for mu in res.x[:m])
        if eps > 0:
            cert = RintCertificate(Verdict.RELATIVE_INTERIOR, weights=weights, min_weight=eps)
        else:
            idx = pts.index(t) if t in pts else None
            if idx is not None and _in_hull_of_others(idx, pts):
                idx = None
            cert = RintCertificate(
                Verdict.RELATIVE_BOUNDARY, weights=weights, min_weight=eps, vertex_index=idx
            )
    check_certificate(cert, t, pts)
    return cert


def check_certificate(cert: RintCertificate, t, points) -> None:
    """Exact soundness check of a membership certificate."""
    pts = _points(points)
    t = as_vector(t)
    if cert.verdict in (Verdict.RELATIVE_INTERIOR, Verdict.RELATIVE_BOUNDARY):
        lam = cert.weights
        if lam is None or len(lam) != len(pts):
            raise CertificateError("weights missing")
        if sum(lam) != 1:
            raise CertificateError("weights do not sum to one")
        if any(x < 0 for x in lam):
            raise CertificateError("negative weight")
        combo = tuple(sum((l * p[c] for l, p in zip(lam, pts)), Fraction(0)) for c in range(len(t)))
        if combo != t:
            raise CertificateError("weights do not reproduce the target")
        if cert.verdict is Verdict.RELATIVE_INTERIOR:
            if not cert.min_weight > 0 or min(lam) < cert.min_weight:
                raise CertificateError("interior certificate needs weights >= min_weight > 0")
        elif cert.min_weight != 0:
            raise CertificateError("boundary certificate must have zero optimum")
    else:
        theta, margin = cert.separator, cert.margin
        if theta is None or margin is None or margin <= 0:
            raise CertificateError("separator with positive margin required")
        tt = dot(theta, t)
        if any(tt < dot(theta, p) + margin for p in pts):
            raise CertificateError("separator margin violated")
