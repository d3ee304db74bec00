"""Log-likelihood of the graph exponential family and its maximizer.

Floating point enters here for the first time.  Points are handled as exact
offsets ``p_i - p_0`` converted to floats, and the target as the exact
offset ``t - p_0``, so cancellation between large statistic values never
happens in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NoMLE, NonConvergence, ViolatedBound
from .exact import as_vector, sub
from .geometry import AffineGeometry, RintCertificate, affine_geometry, rint_membership
from .graphspace import RealizableSet


@dataclass(frozen=True)
class FitConfig:
    grad_tol: float = 1e-10
    max_iters: int = 200
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    init: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise InvalidInput("grad_tol must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise InvalidInput("backtrack_factor must lie in (0, 1)")
        if not 0 < self.armijo_c < 1:
            raise InvalidInput("armijo_c must lie in (0, 1)")
        if self.max_iters < 0:
            raise InvalidInput("max_iters must be nonnegative")


@dataclass
class FitResult:
    theta_hat: np.ndarray
    iterations: int
    final_grad_norm: float
    rint_certificate: RintCertificate
    ell_at_opt: float
    path: list[tuple[np.ndarray, float]] = field(default_factory=list)
    # exact-as-possible likelihood gain of each accepted step
    increments: list[float] = field(default_factory=list)
    step_sizes: list[float] = field(default_factory=list)


def _theta(theta, n: int) -> np.ndarray:
    th = np.asarray(theta, dtype=float).reshape(-1)
    if th.shape != (n,):
        raise InvalidInput(f"theta has length {th.size}, statistics have {n}")
    if not np.all(np.isfinite(th)):
        raise InvalidInput("theta must be finite")
    return th


def _target_offset(t, rs: RealizableSet) -> np.ndarray:
    t = as_vector(t)
    if len(t) != rs.n:
        raise InvalidInput(f"target has length {len(t)}, statistics have {rs.n}")
    return np.array([float(x) for x in sub(t, rs.points[0])])


def _logsumexp(s: np.ndarray) -> float:
    top = s.max()
    return float(top + math.log(np.exp(s - top).sum()))


def _scores(theta: np.ndarray, rs: RealizableSet) -> np.ndarray:
    return rs.float_offsets @ theta + rs.log_multiplicities


def softmax_weights(theta, rs: RealizableSet) -> np.ndarray:
    """Probability of each distinct point under the model at ``theta``."""
    s = _scores(_theta(theta, rs.n), rs)
    w = np.exp(s - s.max())
    return w / w.sum()


def log_normalizer(theta, rs: RealizableSet) -> float:
    th = _theta(theta, rs.n)
    p0 = np.array([float(x) for x in rs.points[0]])
    return float(th @ p0) + _logsumexp(_scores(th, rs))


def log_likelihood(theta, t, rs: RealizableSet) -> float:
    th = _theta(theta, rs.n)
    return float(th @ _target_offset(t, rs)) - _logsumexp(_scores(th, rs))


def _mean_offset(theta: np.ndarray, rs: RealizableSet) -> tuple[np.ndarray, np.ndarray]:
    w = softmax_weights(theta, rs)
    return w, w @ rs.float_offsets


def mean_statistic(theta, rs: RealizableSet) -> np.ndarray:
    _, mu = _mean_offset(_theta(theta, rs.n), rs)
    return np.array([float(x) for x in rs.points[0]]) + mu


def gradient(theta, t, rs: RealizableSet) -> np.ndarray:
    _, mu = _mean_offset(_theta(theta, rs.n), rs)
    return _target_offset(t, rs) - mu


def hessian(theta, rs: RealizableSet) -> np.ndarray:
    w, mu = _mean_offset(_theta(theta, rs.n), rs)
    c = rs.float_offsets - mu
    return -(c.T * w) @ c


def _increment(theta, step, tc, rs: RealizableSet) -> float:
    """ell(theta + step) - ell(theta) without subtracting two large numbers."""
    w, mu = _mean_offset(theta, rs)
    x = (rs.float_offsets - mu) @ step
    lin = float(step @ (tc - mu))
    if np.abs(x).max() < 1.0:
        return lin - math.log1p(float(w @ np.expm1(x)))
    top = x.max()
    return lin - float(top + math.log(float(w @ np.exp(x - top))))


def fit_mle(t, rs: RealizableSet, cfg: FitConfig | None = None,
            geometry: AffineGeometry | None = None) -> FitResult:
    """Damped Newton ascent of the log-likelihood inside V.

    Existence is decided first by the exact membership certificate; a target
    outside the relative interior raises :class:`NoMLE`.
    """
    cfg = cfg or FitConfig()
    geometry = geometry or affine_geometry(rs, vertices=False)
    cert = rint_membership(t, rs, geometry)
    if not cert.in_relative_interior:
        raise NoMLE(cert)

    n = rs.n
    tc = _target_offset(t, rs)
    q = geometry.orthonormal_v()
    init = np.zeros(n) if cfg.init is None else _theta(cfg.init, n)
    eta = q.T @ init
    theta = q @ eta
    result = FitResult(theta, 0, 0.0, cert, log_likelihood(theta, t, rs))
    result.path.append((theta.copy(), result.ell_at_opt))

    for it in range(cfg.max_iters + 1):
        w, mu = _mean_offset(theta, rs)
        g = q.T @ (tc - mu)
        gnorm = float(np.abs(g).max()) if g.size else 0.0
        result.theta_hat, result.iterations, result.final_grad_norm = theta, it, gnorm
        if gnorm <= cfg.grad_tol:
            result.ell_at_opt = log_likelihood(theta, t, rs)
            return result
        if it == cfg.max_iters:
            break
        c = (rs.float_offsets - mu) @ q
        h = (c.T * w) @ c
        try:
            direction = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            direction = g
        slope = float(g @ direction)
        if not np.all(np.isfinite(direction)) or slope <= 0:
            direction, slope = g, float(g @ g)

        alpha = 1.0
        while True:
            step = q @ (alpha * direction)
            gain = _increment(theta, step, tc, rs)
            if gain > 0 and gain >= cfg.armijo_c * alpha * slope:
                break
            alpha *= cfg.backtrack_factor
            if alpha < 1e-30:
                raise NonConvergence(
                    f"line search stalled at iteration {it} with gradient {gnorm:.3e}", best=result
                )
        eta = eta + alpha * direction
        theta = q @ eta
        result.increments.append(gain)
        result.step_sizes.append(alpha)
        result.path.append((theta.copy(), log_likelihood(theta, t, rs)))

    result.ell_at_opt = log_likelihood(theta, t, rs)
    raise NonConvergence(
        f"gradient {result.final_grad_norm:.3e} above {cfg.grad_tol:g} after {cfg.max_iters} iterations",
        best=result,
    )


# --- probes -----------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    difference: float
    predicted: float
    in_affine_hull: bool
    ok: bool


def perp_invariance_check(theta, t, rs: RealizableSet, u,
                          geometry: AffineGeometry | None = None) -> InvarianceReport:
    """Compare ell(theta + u) - ell(theta) with u . (t - p0) for u in V-perp."""
    geometry = geometry or affine_geometry(rs, vertices=False)
    th = _theta(theta, rs.n)
    u = _theta(u, rs.n)
    q = geometry.orthonormal_v()
    unorm = float(np.linalg.norm(u))
    if q.size and np.abs(q.T @ u).max() > 1e-12 * max(1.0, unorm):
        raise InvalidInput("u is not orthogonal to V")
    tc = _target_offset(t, rs)
    ell0 = log_likelihood(th, t, rs)
    ell1 = log_likelihood(th + u, t, rs)
    diff = ell1 - ell0
    predicted = float(u @ tc)
    residual = np.array([float(x) for x in rint_membership(t, rs, geometry).affine_residual or ()])
    in_hull = residual.size == 0
    tol = 1e-12 * max(1.0, abs(ell0), abs(ell1))
    ok = abs(diff) <= tol if in_hull else abs(diff - predicted) <= tol + 1e-12 * abs(predicted)
    return InvarianceReport(diff, predicted, in_hull, ok)


@dataclass(frozen=True)
class ConcavityReport:
    lhs: float
    rhs: float
    v_component: float
    strict_predicted: bool
    strict_observed: bool
    consistent: bool


def concavity_probe(theta1, theta2, tau: float, t, rs: RealizableSet,
                    geometry: AffineGeometry | None = None) -> ConcavityReport:
    """Evaluate the concavity inequality at one (theta1, theta2, tau) triple.

    Strictness is predicted when theta1 - theta2 has a nonzero component in
    V.  A strict gap above 1e-9 is required only when that component has
    norm at least 0.1; with no V component the two sides must agree.
    """
    if not 0 < tau < 1:
        raise InvalidInput("tau must lie strictly between 0 and 1")
    th1, th2 = _theta(theta1, rs.n), _theta(theta2, rs.n)
    if np.array_equal(th1, th2):
        raise InvalidInput("theta1 and theta2 must differ")
    geometry = geometry or affine_geometry(rs, vertices=False)
    q = geometry.orthonormal_v()
    delta = th1 - th2
    vcomp = float(np.linalg.norm(q.T @ delta)) if q.size else 0.0

    a, b = log_likelihood(th1, t, rs), log_likelihood(th2, t, rs)
    lhs = log_likelihood(tau * th1 + (1 - tau) * th2, t, rs)
    rhs = tau * a + (1 - tau) * b
    tol = 1e-12 * max(1.0, abs(a), abs(b))
    if lhs < rhs - tol:
        raise ViolatedBound(f"concavity fails: {lhs!r} < {rhs!r}")
    predicted = vcomp > 1e-12 * max(1.0, float(np.linalg.norm(delta)))
    observed = lhs > rhs + 1e-9
    if not predicted:
        consistent = abs(lhs - rhs) <= tol
    elif vcomp >= 0.1:
        consistent = observed
    else:
        consistent = True
    return ConcavityReport(lhs, rhs, vcomp, predicted, observed, consistent)
