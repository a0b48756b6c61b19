"""Construction of individual TSS-CMC hypersurfaces as sampled Kruskal curves.

Two independent generators build the same slice:

* ``build_slice_ivp`` integrates the Kruskal-coordinate CMC equation as an
  initial-value problem from the T-axis.  It is the canonical generator; the
  equation is regular across the horizons.
* ``build_slice_quadrature`` evaluates the closed-form first integral of the
  Schwarzschild-coordinate equation and maps the (t, r) graph pieces into the
  Kruskal plane.  Schwarzschild time diverges logarithmically at the horizon,
  but the divergence is an exact simple pole of f'(r) at r = 2M with residue
  2M; subtracting the pole and integrating it analytically carries the graph
  across the horizon without loss.  This path cross-validates the IVP away
  from a thin horizon collar.

A slice is identified by (M, H, c): the branch root r~ solves
envelope_plus(H, r) = c, the T-intercept is -sqrt(2M - r~) e^(r~/4M), and the
sampled curve is symmetric in X.  Slices with H > 0 (above the maximal
slice) arise as reflections at the foliation level.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (DomainError, HorizonError, NoSliceError,
                     PropagationError)
from .geometry import (Region, SliceParams, areal_radius_from_kruskal,
                       classify_region, envelope_max, envelope_plus,
                       kruskal_from_schwarzschild, lapse_h)
from .numerics import (RhsDomainError, find_root_bracketed,
                       integrate_endpoint_singular, integrate_to_nodes,
                       solve_ivp)


DEFAULT_SAMPLES_PER_SIDE = 801
DEFAULT_R_MIN_STOP = 0.05      # times M; truncation radius at the singularity
DEFAULT_HORIZON_COLLAR = 1e-3  # times M; quadrature omits |r - 2M| < collar
EPS_SPACELIKE = 1e-10
# |r~ - R_H| below this means the branch root sits on the envelope maximum
# and the slice is the cylinder (wider than the root tolerance so it absorbs
# the error stack of nested root finds)
CYLINDER_WINDOW = 1e-9


class SliceKind(enum.Enum):
    INTERIOR_PLUS = "interior-plus"    # rising-branch slice, inside one interior quadrant
    CROSSING_MINUS = "crossing-minus"  # falling-branch slice, crosses both exteriors
    CYLINDER = "cylinder"              # r = R_H hyperbola
    MAXIMAL = "maximal"                # T = 0


@dataclass(frozen=True)
class BranchRoots:
    """Roots of envelope_plus(H, r) = c on the rising / falling branch."""

    r_plus: float | None
    r_minus: float | None


@dataclass(frozen=True)
class Hypersurface:
    """A sampled TSS-CMC slice: ordered, X-symmetric (X, T, r, region) samples."""

    params: SliceParams
    kind: SliceKind
    t_intercept: float
    X: np.ndarray
    T: np.ndarray
    r: np.ndarray
    regions: tuple[Region, ...]
    generator: str

    def __post_init__(self):
        n = len(self.X)
        if not (len(self.T) == len(self.r) == len(self.regions) == n):
            raise ValueError("sample arrays must have equal length")

    @property
    def x_max(self) -> float:
        return float(self.X[-1])


def branch_roots(p: SliceParams, tol: float = 1e-14) -> BranchRoots:
    """Solve envelope_plus(H, r) = c on each monotone branch (H <= 0).

    The rising-branch root exists for c in (0, C_H], the falling-branch root
    for c in [-8 M^3 H, C_H]; at c = C_H both coincide with R_H, and at
    c = -8 M^3 H exactly the falling root degenerates to r = 2M (the slice
    through the bifurcation sphere).
    """
    if p.H > 0.0:
        raise DomainError(f"branch_roots requires H <= 0, got H={p.H}")
    M, H, c = p.M, p.H, p.c
    R, C = envelope_max(H, M)
    horizon_value = -8.0 * M ** 3 * H  # envelope_plus(H, 2M, M)
    if c > C:
        raise NoSliceError(
            f"c={c} exceeds the envelope maximum C_H={C} for H={H}: no slice")

    def g(r):
        return envelope_plus(H, r, M) - c

    r_plus = None
    if 0.0 < c <= C:
        r_plus = R if c == C else find_root_bracketed(g, 0.0, R, tol=tol * max(1.0, M))
    r_minus = None
    if horizon_value <= c <= C:
        if c == C:
            r_minus = R
        elif c == horizon_value:
            r_minus = 2.0 * M
        else:
            r_minus = find_root_bracketed(g, R, 2.0 * M, tol=tol * max(1.0, M))
    if r_plus is None and r_minus is None:
        raise NoSliceError(
            f"c={c} outside both branch ranges for H={H}: rising branch needs "
            f"c in (0, {C}], falling branch needs c in [{horizon_value}, {C}]")
    return BranchRoots(r_plus=r_plus, r_minus=r_minus)


def t_intercept(p: SliceParams, branch: str, tol: float = 1e-14) -> float:
    """T value at X = 0 of the requested branch: -sqrt(2M - r~) e^(r~/4M)."""
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    roots = branch_roots(p, tol=tol)
    r = roots.r_plus if branch == "plus" else roots.r_minus
    if r is None:
        raise NoSliceError(f"no {branch}-branch root for (M={p.M}, H={p.H}, c={p.c})")
    return _intercept_from_root(r, p.M)


def _intercept_from_root(r: float, M: float) -> float:
    if r == 2.0 * M:
        return 0.0
    return -math.sqrt(2.0 * M - r) * math.exp(r / (4.0 * M))


def fprime_first_integral(r: float, p: SliceParams, piece_sign: int) -> float:
    """Slope f'(r) of the slice graph t = f(r) from the first integral.

    f' = piece_sign * (H r + c/r^2) / (h(r) sqrt(h(r) + (H r + c/r^2)^2)).
    In the interior this reduces algebraically to the potential form
    l / (+-h sqrt(l^2 - 1)); the same expression continues the graph into
    the exteriors.  piece_sign = +1 gives the piece with f' < 0 in the
    interior, which is the X > 0 half of a falling-branch slice.
    """
    if piece_sign not in (1, -1):
        raise ValueError(f"piece_sign must be +1 or -1, got {piece_sign}")
    M = p.M
    if r == 2.0 * M:
        raise HorizonError("first integral is singular at r = 2M; use the IVP path")
    h = lapse_h(r, M)
    w = p.H * r + p.c / (r * r)
    q = h + w * w
    if q <= 0.0:
        raise DomainError(
            f"h + (Hr + c/r^2)^2 = {q} <= 0 at r={r}: outside the slice domain")
    return piece_sign * w / (h * math.sqrt(q))


# ---------------------------------------------------------------------------
# shared sample assembly
# ---------------------------------------------------------------------------

def _mirror_half(X_half, T_half, r_half, M):
    """Extend right-half samples (X >= 0, ascending) to the full symmetric slice."""
    X = np.concatenate([-X_half[:0:-1], X_half])
    T = np.concatenate([T_half[:0:-1], T_half])
    r = np.concatenate([r_half[:0:-1], r_half])
    regions = tuple(classify_region(float(t), float(x), M) for t, x in zip(T, X))
    return X, T, r, regions


def _maximal_slice(p, X_max, samples_per_side, generator):
    X_half = np.linspace(0.0, X_max, samples_per_side)
    T_half = np.zeros_like(X_half)
    r_half = np.array([areal_radius_from_kruskal(0.0, float(x), p.M) for x in X_half])
    X, T, r, regions = _mirror_half(X_half, T_half, r_half, p.M)
    return Hypersurface(params=p, kind=SliceKind.MAXIMAL, t_intercept=0.0,
                        X=X, T=T, r=r, regions=regions, generator=generator)


def _cylinder_slice(p, R, X_max, samples_per_side, generator):
    """The hyperbola X^2 - T^2 = (R - 2M) e^(R/2M), T < 0 (the r = R cylinder)."""
    s = (2.0 * p.M - R) * math.exp(R / (2.0 * p.M))
    X_half = np.linspace(0.0, X_max, samples_per_side)
    T_half = -np.sqrt(X_half * X_half + s)
    r_half = np.full_like(X_half, R)
    X, T, r, regions = _mirror_half(X_half, T_half, r_half, p.M)
    return Hypersurface(params=p, kind=SliceKind.CYLINDER,
                        t_intercept=float(T_half[0]),
                        X=X, T=T, r=r, regions=regions, generator=generator)


def _resolve_branch_root(p: SliceParams, branch: str) -> float:
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    roots = branch_roots(p)
    r = roots.r_plus if branch == "plus" else roots.r_minus
    if r is None:
        raise NoSliceError(f"no {branch}-branch root for (M={p.M}, H={p.H}, c={p.c})")
    return r


# ---------------------------------------------------------------------------
# IVP generator (canonical)
# ---------------------------------------------------------------------------

def _kruskal_rhs(M: float, H: float):
    """Right side of the Kruskal CMC equation as a first-order system in (F, F')."""
    two_m = 2.0 * M

    def rhs(X, y):
        F, Fp = y
        G = 1.0 - Fp * Fp
        if G <= 0.0:
            raise RhsDomainError("non-spacelike trial state")
        if X * X - F * F <= -two_m:
            raise RhsDomainError("trial state beyond the singularity")
        r = areal_radius_from_kruskal(F, X, M)
        if r <= 0.0:
            raise RhsDomainError("trial state on the singularity")
        drift = math.exp(-r / two_m) * (6.0 * M / (r * r) - 1.0 / r) * (-F + Fp * X) * G
        bulge = 12.0 * H * M * math.exp(-r / (4.0 * M)) / math.sqrt(r) * G ** 1.5
        return (Fp, -drift + bulge)

    return rhs


def build_slice_ivp(p: SliceParams, branch: str, X_max: float,
                    tol: float = 1e-9,
                    samples_per_side: int = DEFAULT_SAMPLES_PER_SIDE,
                    r_min_stop: float | None = None,
                    eps_spacelike: float = EPS_SPACELIKE) -> Hypersurface:
    """Canonical slice generator: integrate the Kruskal CMC equation from X = 0.

    Initial data F(0) = T-intercept, F'(0) = 0 (T-axisymmetry).  Integration
    runs to X_max, stopping early when r drops to the truncation radius near
    the singularity (rising-branch slices end there) or when the spacelike
    margin collapses.  Output samples sit on a uniform X grid per side, and
    every grid node is an integration step endpoint rather than an
    interpolant, so finite-difference jets taken on the output see only the
    accumulated ODE error.
    """
    M = p.M
    if X_max <= 0.0:
        raise DomainError(f"X_max must be positive, got {X_max}")
    if r_min_stop is None:
        r_min_stop = DEFAULT_R_MIN_STOP * M

    if p.H == 0.0 and p.c == 0.0:
        return _maximal_slice(p, X_max, samples_per_side, "ivp")

    r_tilde = _resolve_branch_root(p, branch)
    R_H, _ = envelope_max(p.H, M)
    if abs(r_tilde - R_H) <= CYLINDER_WINDOW * M:
        return _cylinder_slice(p, R_H, X_max, samples_per_side, "ivp")

    T0 = _intercept_from_root(r_tilde, M)
    rhs = _kruskal_rhs(M, p.H)
    # rising-branch slices may start below the default stop radius when c is
    # large; keep the stop strictly under the starting radius
    r_stop = min(r_min_stop, 0.5 * r_tilde) if branch == "plus" else r_min_stop

    def stop(X, y):
        F, Fp = y
        if 1.0 - Fp * Fp < eps_spacelike:
            return True
        return areal_radius_from_kruskal(F, X, M) < r_stop

    probe = solve_ivp(rhs, 0.0, (T0, 0.0), X_max, tol=tol, stop_predicate=stop)
    if len(probe.xs) < 2:
        raise PropagationError(
            f"slice (M={M}, H={p.H}, c={p.c}, {branch}) stopped at X=0: "
            f"stop radius {r_stop} is not below the starting radius {r_tilde}",
            partial=probe)
    X_end = probe.xs[-1]
    if probe.stop_reason == "predicate":
        X_end *= 0.999999  # keep the last node strictly inside the valid domain

    grid = np.linspace(0.0, X_end, samples_per_side)
    states = integrate_to_nodes(rhs, 0.0, (T0, 0.0), [float(g) for g in grid], tol=tol)
    T_half = np.array([s[0] for s in states])
    r_half = np.array([areal_radius_from_kruskal(float(t), float(x), M)
                       for t, x in zip(T_half, grid)])
    X, T, r, regions = _mirror_half(grid, T_half, r_half, M)
    kind = SliceKind.INTERIOR_PLUS if branch == "plus" else SliceKind.CROSSING_MINUS
    return Hypersurface(params=p, kind=kind, t_intercept=T0,
                        X=X, T=T, r=r, regions=regions, generator="ivp")


def slice_T_at(s: Hypersurface, X: float) -> float:
    """Interpolate T(X) through the slice samples (4-point Lagrange, O(h^4))."""
    xs = s.X
    if not (xs[0] <= X <= xs[-1]):
        raise DomainError(f"X={X} outside the sampled range [{xs[0]}, {xs[-1]}]")
    if X == 0.0:
        return float(s.t_intercept)
    i = int(np.searchsorted(xs, X))
    if i < len(xs) and xs[i] == X:
        return float(s.T[i])
    lo = max(0, min(i - 2, len(xs) - 4))
    xw = xs[lo:lo + 4]
    tw = s.T[lo:lo + 4]
    total = 0.0
    for j in range(4):
        lj = 1.0
        for k in range(4):
            if k != j:
                lj *= (X - xw[k]) / (xw[j] - xw[k])
        total += lj * tw[j]
    return float(total)


_REFLECT_REGION = {
    Region.I: Region.I,
    Region.IPRIME: Region.IPRIME,
    Region.II: Region.IIPRIME,
    Region.IIPRIME: Region.II,
    Region.HORIZON_FUTURE: Region.HORIZON_PAST,
    Region.HORIZON_PAST: Region.HORIZON_FUTURE,
    Region.BIFURCATION: Region.BIFURCATION,
}


def reflect_slice(s: Hypersurface) -> Hypersurface:
    """Reflect a slice about the X-axis: T -> -T, (M, H, c) -> (M, -H, -c)."""
    p = SliceParams(M=s.params.M, H=-s.params.H, c=-s.params.c)
    return Hypersurface(params=p, kind=s.kind, t_intercept=-s.t_intercept,
                        X=s.X.copy(), T=-s.T, r=s.r.copy(),
                        regions=tuple(_REFLECT_REGION[rg] for rg in s.regions),
                        generator=s.generator)


# ---------------------------------------------------------------------------
# quadrature generator (cross-validation)
# ---------------------------------------------------------------------------

_GAUSS2_OFF = 0.5 / math.sqrt(3.0)
# 4-point Gauss-Legendre on [0, 1]
_GAUSS4_NODES = (0.5 - 0.8611363115940526 / 2, 0.5 - 0.3399810435848563 / 2,
                 0.5 + 0.3399810435848563 / 2, 0.5 + 0.8611363115940526 / 2)
_GAUSS4_WEIGHTS = (0.3478548451374538 / 2, 0.6521451548625461 / 2,
                   0.6521451548625461 / 2, 0.3478548451374538 / 2)


def _sqrt_q_near_root(p: SliceParams, r_tilde: float, delta: float,
                      x: float, w: float, h: float) -> float:
    """sqrt(h + w^2) at x = r_tilde + delta, stable against cancellation.

    Near the branch root the direct form loses all precision (h + w^2 -> 0),
    so factor q = (c - envelope)(w + sqrt(-h)) / x^2 and obtain
    c - envelope(x) = envelope(r_tilde) - envelope(x) from a four-point
    Gauss integral of the envelope derivative, which never subtracts nearly
    equal quantities.  Valid in the interior (h < 0) only; ``delta`` must be
    the exact offset from the root, not recomputed as x - r_tilde.
    """
    from .geometry import envelope_deriv
    dk = delta * sum(wt * envelope_deriv(p.H, r_tilde + delta * nd, p.M)
                     for nd, wt in zip(_GAUSS4_NODES, _GAUSS4_WEIGHTS))
    c_minus_env = -dk  # = c - envelope_plus(H, x) since c = envelope at the root
    q = (c_minus_env / (x * x)) * (w + math.sqrt(-h))
    if q <= 0.0:
        raise DomainError(f"outside slice domain at offset {delta} from the root")
    return math.sqrt(q)


def _fprime_from_root(p: SliceParams, r_tilde: float, piece_sign: int):
    """f'(r_tilde + delta) as a function of the exact root offset delta.

    Switches to the cancellation-free square root within a window around the
    root, so the integrable (delta)^(-1/2) blow-up is computed to full
    relative accuracy however small delta is.  The window shrinks with the
    distance to the horizon: the envelope has a square-root branch point at
    r = 2M, and the Gauss rule behind the stable form must stay well clear
    of it.
    """
    M = p.M
    window = min(0.05 * r_tilde, 0.1 * (2.0 * M - r_tilde))

    def slope(delta: float) -> float:
        x = r_tilde + delta
        h = 1.0 - 2.0 * M / x
        w = p.H * x + p.c / (x * x)
        if abs(delta) < window and h < 0.0:
            root_q = _sqrt_q_near_root(p, r_tilde, delta, x, w, h)
        else:
            q = h + w * w
            if q <= 0.0:
                raise DomainError(f"outside slice domain at r={x}")
            root_q = math.sqrt(q)
        return piece_sign * w / (h * root_q)

    return slope


def _s_and_sprime(p: SliceParams, x: float) -> tuple[float, float]:
    """s(x) = x w / sqrt(h + w^2) and its analytic derivative."""
    M = p.M
    h = 1.0 - 2.0 * M / x
    hp = 2.0 * M / (x * x)
    w = p.H * x + p.c / (x * x)
    wp = p.H - 2.0 * p.c / x ** 3
    q = h + w * w
    rq = math.sqrt(q)
    s = x * w / rq
    sp = (w + x * wp) / rq - x * w * (hp + 2.0 * w * wp) / (2.0 * q * rq)
    return s, sp


def _pole_subtracted_slope(p: SliceParams, r_tilde: float):
    """f'(r) for the X > 0 half minus its exact horizon pole 2M/(r - 2M).

    f' = r w / ((r - 2M) sqrt(q)), so with s(r) = r w / sqrt(q) the slope is
    s(r)/(r - 2M); the falling-branch condition c > -8 M^3 H makes
    s(2M) = +2M, hence (s(r) - 2M)/(r - 2M) is regular across the horizon.
    Near the horizon that ratio is itself a cancellation, so within a small
    window it is evaluated as a two-point Gauss average of the analytic s'.
    Takes the exact offset from the branch root as argument.
    """
    M = p.M
    two_m = 2.0 * M
    base = _fprime_from_root(p, r_tilde, +1)
    window = 1e-3 * M

    def g(delta: float) -> float:
        x = r_tilde + delta
        d = x - two_m
        if abs(d) < window:
            # (s(x) - s(2M))/d via Gauss-2 on s', exact to O(d^4)
            x1 = two_m + d * (0.5 - _GAUSS2_OFF)
            x2 = two_m + d * (0.5 + _GAUSS2_OFF)
            return 0.5 * (_s_and_sprime(p, x1)[1] + _s_and_sprime(p, x2)[1])
        return base(delta) - two_m / d

    return g


def build_slice_quadrature(p: SliceParams, branch: str,
                           r_grid: np.ndarray | None = None,
                           X_max: float = 3.0,
                           tol: float = 1e-12,
                           n_points: int = 320,
                           r_min_stop: float | None = None,
                           horizon_collar: float | None = None) -> Hypersurface:
    """Independent slice generator via the Schwarzschild first integral.

    Builds t = f(r) with f(r~) = 0 (the two slope-sign pieces join smoothly
    at the branch root, which makes the curve T-axisymmetric), integrating
    the slope with the endpoint-singularity quadrature at r~.  For
    falling-branch slices the horizon pole of the slope is subtracted and
    integrated in closed form, so one regular integral carries the graph
    from the interior piece through to the exteriors.  Samples inside the
    horizon collar |r - 2M| < collar are not emitted.
    """
    M = p.M
    if r_min_stop is None:
        r_min_stop = DEFAULT_R_MIN_STOP * M
    if horizon_collar is None:
        horizon_collar = DEFAULT_HORIZON_COLLAR * M

    if p.H == 0.0 and p.c == 0.0:
        return _maximal_slice(p, X_max, DEFAULT_SAMPLES_PER_SIDE, "quadrature")

    r_tilde = _resolve_branch_root(p, branch)
    R_H, _ = envelope_max(p.H, M)
    if abs(r_tilde - R_H) <= CYLINDER_WINDOW * M:
        return _cylinder_slice(p, R_H, X_max, DEFAULT_SAMPLES_PER_SIDE, "quadrature")

    if branch == "plus":
        return _quadrature_plus(p, r_tilde, n_points, r_grid, r_min_stop, tol)
    return _quadrature_minus(p, r_tilde, n_points, r_grid, X_max,
                             horizon_collar, tol)


def _cumulative_t(slope_of_offset, r_grid, r_tilde, tol):
    """t along ``r_grid`` (which starts at the branch root) with t(root) = 0.

    ``slope_of_offset`` maps the exact offset delta = r - r_tilde to f'(r);
    working in offsets keeps the inverse-square-root blow-up at the root
    fully resolved.  The first segment is integrated with the endpoint
    substitution, the rest with plain adaptive quadrature.
    """
    offsets = [0.0] + [float(r) - r_tilde for r in r_grid[1:]]
    t = [0.0]
    first = integrate_endpoint_singular(slope_of_offset, 0.0, offsets[1],
                                        singular_end="a", tol=tol)
    t.append(first)
    for k in range(2, len(offsets)):
        seg = integrate_endpoint_singular(slope_of_offset, offsets[k - 1],
                                          offsets[k], singular_end="none",
                                          tol=tol)
        t.append(t[-1] + seg)
    return np.array(t)


def _quadrature_plus(p, r_tilde, n_points, r_grid, r_min_stop, tol):
    """Rising-branch slice: interior graph r in [stop, r~], entirely inside II'."""
    M = p.M
    r_stop = min(r_min_stop, 0.5 * r_tilde)
    if r_grid is None:
        # quadratic clustering at the root: X grows like sqrt(r~ - r) there,
        # so this spaces the Kruskal samples evenly near the T-axis
        u = np.linspace(0.0, 1.0, n_points)
        r_grid = r_tilde - (r_tilde - r_stop) * u * u
    else:
        r_grid = np.asarray(r_grid, dtype=float)
    # X > 0 half has f' > 0 (piece_sign -1); t decreases from 0 as r falls
    slope = _fprime_from_root(p, r_tilde, -1)
    t_vals = _cumulative_t(slope, r_grid, r_tilde, tol)

    X_half, T_half, rr = [0.0], [_intercept_from_root(r_tilde, M)], [r_tilde]
    for rv, tv in zip(r_grid[1:], t_vals[1:]):
        T, X = kruskal_from_schwarzschild(float(tv), float(rv), Region.IIPRIME, M)
        X_half.append(X)
        T_half.append(T)
        rr.append(float(rv))
    order = np.argsort(X_half)
    X_half = np.asarray(X_half)[order]
    T_half = np.asarray(T_half)[order]
    rr = np.asarray(rr)[order]
    X, T, r, regions = _mirror_half(X_half, T_half, rr, M)
    return Hypersurface(params=p, kind=SliceKind.INTERIOR_PLUS,
                        t_intercept=_intercept_from_root(r_tilde, M),
                        X=X, T=T, r=r, regions=regions, generator="quadrature")


def _quadrature_minus(p, r_tilde, n_points, r_grid, X_max, collar, tol):
    """Falling-branch slice: interior piece continued across the past horizon."""
    M = p.M
    two_m = 2.0 * M
    if r_tilde >= two_m:
        raise NoSliceError(
            "degenerate falling-branch root r~ = 2M: the quadrature path has "
            "no interior piece; use the IVP generator")
    # outermost radius needed to reach X_max in the exterior
    r_hi = areal_radius_from_kruskal(0.0, 1.05 * X_max, M)
    if r_grid is None:
        u = np.linspace(0.0, 1.0, n_points)
        interior = r_tilde + (two_m - collar - r_tilde) * u * u
        exterior = np.linspace(two_m + collar, max(r_hi, two_m + 2 * collar),
                               n_points)
        r_grid = np.concatenate([interior, exterior])
    else:
        r_grid = np.asarray(r_grid, dtype=float)
        keep = np.abs(r_grid - two_m) >= collar
        r_grid = np.sort(r_grid[keep])
        r_grid = np.concatenate([[r_tilde], r_grid[r_grid > r_tilde]])

    reg = _pole_subtracted_slope(p, r_tilde)
    t_reg = _cumulative_t(reg, r_grid, r_tilde, tol)
    # t(r) = integral of the regular part + 2M ln|r - 2M|/(2M - r~)
    log0 = math.log(two_m - r_tilde)
    X_half, T_half, rr = [0.0], [_intercept_from_root(r_tilde, M)], [r_tilde]
    for rv, tv in zip(r_grid[1:], t_reg[1:]):
        t_full = tv + two_m * (math.log(abs(rv - two_m)) - log0)
        region = Region.IIPRIME if rv < two_m else Region.I
        T, X = kruskal_from_schwarzschild(float(t_full), float(rv), region, M)
        X_half.append(X)
        T_half.append(T)
        rr.append(float(rv))
    order = np.argsort(X_half)
    X_half = np.asarray(X_half)[order]
    T_half = np.asarray(T_half)[order]
    rr = np.asarray(rr)[order]
    keep = X_half <= 1.05 * X_max
    X_half, T_half, rr = X_half[keep], T_half[keep], rr[keep]
    X, T, r, regions = _mirror_half(X_half, T_half, rr, M)
    return Hypersurface(params=p, kind=SliceKind.CROSSING_MINUS,
                        t_intercept=_intercept_from_root(r_tilde, M),
                        X=X, T=T, r=r, regions=regions, generator="quadrature")
