"""Behaviour of the likelihood along a separating ray when t is outside C.

Along ``r * theta`` with ``theta`` separating ``t`` from the hull, the
log-likelihood grows at least linearly in ``r`` and the model's mass
collapses onto the points maximizing ``theta . p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, NotSeparable, ViolatedBound
from .exact import RationalVector, as_vector, dot
from .geometry import AffineGeometry, Verdict, rint_membership
from .graphspace import RealizableSet
from .likelihood import log_likelihood

MASS_TARGET = 1 - 1e-12
# the default schedule also runs until r * eps exceeds this
GROWTH_TARGET = 20.0


@dataclass(frozen=True)
class TrajectoryRow:
    r: float
    ell: float
    mass_on_face: float
    lower_bound: float


@dataclass
class DegeneracyReport:
    direction: RationalVector
    margin: Fraction
    face_indices: tuple[int, ...]
    case: int
    second_gap: Fraction | None
    rows: list[TrajectoryRow] = field(default_factory=list)


def separating_direction(t, rs: RealizableSet, geometry: AffineGeometry | None = None):
    """Integer separator pointing toward ``t`` and its exact additive margin."""
    t = as_vector(t)
    cert = rint_membership(t, rs, geometry)
    if cert.verdict not in (Verdict.OUTSIDE_HULL, Verdict.OUTSIDE_AFFINE_HULL):
        raise NotSeparable(f"target is in the hull ({cert.verdict.value})")
    theta = cert.separator
    eps = dot(theta, t) - max(dot(theta, p) for p in rs.points)
    return theta, eps


def argmax_face(theta, rs) -> tuple[int, ...]:
    theta = as_vector(theta)
    if not any(theta):
        raise InvalidInput("direction must be nonzero")
    vals = [dot(theta, p) for p in getattr(rs, "points", rs)]
    top = max(vals)
    return tuple(i for i, v in enumerate(vals) if v == top)


def default_schedule(max_power: int = 20) -> list[float]:
    return [float(2 ** j) for j in range(max_power + 1)]


def degeneracy_trajectory(t, rs: RealizableSet, theta, eps, r_schedule=None) -> DegeneracyReport:
    """Evaluate ell(r theta), face mass and the linear lower bound per r.

    Without an explicit schedule, r runs through powers of two and stops once
    the face holds more than 1 - 1e-12 of the mass and r * eps > 20.
    """
    t, theta, eps = as_vector(t), as_vector(theta), Fraction(eps)
    vals = [dot(theta, p) for p in rs.points]
    top = max(vals)
    tt = dot(theta, t)
    if not eps > 0 or tt - top < eps:
        raise InvalidInput("theta does not separate t from the hull with the given margin")
    face = tuple(i for i, v in enumerate(vals) if v == top)
    below = sorted({v for v in vals if v != top}, reverse=True)
    second_gap = top - below[0] if below else None
    case = 1 if tt > 0 else 2

    theta_f = np.array([float(x) for x in theta])
    face_mult = sum(rs.multiplicities[i] for i in face)
    rest_ratio = np.array([rs.multiplicities[i] / face_mult for i in range(len(vals)) if vals[i] != top])
    rest_gap = np.array([float(v - top) for v in vals if v != top])
    log_total = math.log(rs.total)
    p_face = rs.points[face[0]]
    face_val, t_val = float(dot(theta, p_face)), float(tt)

    explicit = r_schedule is not None
    schedule = [float(r) for r in (r_schedule if explicit else default_schedule())]
    if any(r < 0 for r in schedule) or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InvalidInput("r schedule must be nonnegative and strictly increasing")

    report = DegeneracyReport(theta, eps, face, case, second_gap)
    for r in schedule:
        ell = log_likelihood(r * theta_f, t, rs)
        mass = 1.0 / (1.0 + float(rest_ratio @ np.exp(r * rest_gap))) if rest_gap.size else 1.0
        if case == 1:
            bound = r * float(eps) - log_total
        else:
            # -r theta.p0 minus an offset, p0 a face point
            bound = -r * face_val - (log_total - r * t_val)
        if ell < bound - 1e-9 * max(1.0, abs(bound)):
            raise ViolatedBound(f"ell({r} theta) = {ell!r} below lower bound {bound!r}")
        if report.rows and mass < report.rows[-1].mass_on_face:
            raise ViolatedBound(f"face mass decreased at r={r}")
        report.rows.append(TrajectoryRow(r, ell, mass, bound))
        if not explicit and mass > MASS_TARGET and r * float(eps) > GROWTH_TARGET:
            break
    return report


def boundary_witness(face_indices, rs: RealizableSet, geometry: AffineGeometry | None = None) -> bool | None:
    """True if every face point is on the relative boundary of the hull.

    Returns None (no claim) when the face is the whole point set, i.e. the
    direction was orthogonal to the affine hull.
    """
    face = sorted(set(face_indices))
    if not face:
        raise InvalidInput("face is empty")
    if len(face) == len(rs.points):
        return None
    return all(
        rint_membership(rs.points[i], rs, geometry).verdict is Verdict.RELATIVE_BOUNDARY for i in face
    )
