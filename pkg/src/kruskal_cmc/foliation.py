"""Foliation of the Kruskal extension by TSS-CMC slices with varying H.

The construction rests on a strictly decreasing curve y(r) on (0, 2M] with
y(2M) = A and y -> +infinity as r -> 0+, chosen so that its graph crosses
every envelope curve envelope_plus(H, .) exactly once.  Writing c = y(r)
gives a one-to-one correspondence c -> (r, H) and hence one slice per c; the
c < A half of the family comes from reflecting the mirrored curve.  With the
power-law profile used here y has a closed form:

    y(r) = A r^3/(2M)^3 + r^(3/2) (2M - r)^(1/2)
         + C/(p + 2) (r^-(p-1) - r^3/(2M)^(p+2)),   p > 1,

and y' < 0 everywhere once C is large enough; the constructor certifies
that on a dense grid rather than trusting the closed-form bound.

Beyond the curve itself this module builds leaves, locates the leaf through
any point (the constructive form of the covering property), checks pairwise
disjointness on a grid, and builds the contrasting linear family
c = -8 M^3 H whose members all meet at the bifurcation sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, DomainError, InvalidCurveError
from .geometry import (SliceParams, areal_radius_from_kruskal, envelope_max,
                       envelope_plus)
from .numerics import find_root_bracketed, solve_ivp
from .report import VerificationReport
from .slices import (DEFAULT_SAMPLES_PER_SIDE, Hypersurface, SliceKind,
                     _cylinder_slice, _intercept_from_root, _kruskal_rhs,
                     _maximal_slice, build_slice_ivp, reflect_slice,
                     slice_T_at)

G_MAX_COEFF = math.sqrt(6.0 * math.sqrt(3.0) - 9.0)  # max of r^(1/2)(3M-2r)/(2M-r)^(1/2), per unit M
CURVE_CERT_POINTS = 4096
EPS_STATION_SPACELIKE = 1e-12

_MIRROR_CACHE: dict = {}


@dataclass(frozen=True)
class FoliationCurve:
    """Parameters (M, p, C, A) of the monotone curve y(r).

    A is the boundary value y(2M); A = 0 gives the X-axis-symmetric family.
    Construction fails if the strict-decrease certificate does not hold on a
    dense grid.
    """

    M: float
    p: float
    C: float
    A: float = 0.0

    def __post_init__(self):
        if not self.M > 0.0:
            raise InvalidCurveError(f"M must be positive, got {self.M}")
        if not self.p > 1.0:
            raise InvalidCurveError(f"p must exceed 1, got {self.p}")
        if not self.C > 0.0:
            raise InvalidCurveError(f"C must be positive, got {self.C}")
        if not math.isfinite(self.A):
            raise InvalidCurveError(f"A must be finite, got {self.A}")
        grid = np.linspace(1e-6 * self.M, 2.0 * self.M * (1.0 - 1e-9),
                           CURVE_CERT_POINTS)
        worst = float(np.max(gamma_y_derivative(grid, self)))
        if worst >= 0.0:
            raise InvalidCurveError(
                f"curve (p={self.p}, C={self.C}, A={self.A}) is not strictly "
                f"decreasing: max y' = {worst}")

    @classmethod
    def default(cls, M: float = 1.0) -> "FoliationCurve":
        """Shipped profile p = 2, C = 12 M^3, A = 0."""
        return cls(M=M, p=2.0, C=12.0 * M ** 3, A=0.0)

    def mirrored(self) -> "FoliationCurve":
        key = (self.M, self.p, self.C, -self.A)
        cached = _MIRROR_CACHE.get(key)
        if cached is None:
            cached = FoliationCurve(M=self.M, p=self.p, C=self.C, A=-self.A)
            _MIRROR_CACHE[key] = cached
        return cached

    def value(self, r):
        return gamma_y(r, self)

    def derivative(self, r):
        return gamma_y_derivative(r, self)

    def inverse(self, c: float, tol: float = 1e-14) -> float:
        """r = y^(-1)(c) for c >= A, by bracketed root finding (y is decreasing)."""
        M = self.M
        if c == self.A:
            return 2.0 * M
        if c < self.A:
            raise DomainError(f"inverse requires c >= A, got c={c}, A={self.A}")
        lo = 2.0 * M * 1e-12
        while gamma_y(lo, self) < c:
            lo *= 0.25
            if lo < 1e-300:
                raise BracketError(f"could not bracket y = {c} near r = 0")
        return find_root_bracketed(lambda r: gamma_y(r, self) - c,
                                   lo, 2.0 * M, tol=tol * max(1.0, M))


@dataclass(frozen=True)
class LeafParams:
    """Envelope data of one leaf: (c, r, H) and the branch it sits on."""

    c: float
    r: float
    H: float
    branch: str  # plus | minus | cylinder | maximal


def gamma_y(r, fc: FoliationCurve):
    """Closed-form curve value y(r) on (0, 2M]; y(2M) = A exactly."""
    r = np.asarray(r, dtype=float)
    M, p, C, A = fc.M, fc.p, fc.C, fc.A
    two_m = 2.0 * M
    if np.any(r <= 0.0) or np.any(r > two_m):
        raise DomainError("r must lie in (0, 2M]")
    out = (A * r ** 3 / two_m ** 3
           + r ** 1.5 * np.sqrt(two_m - r)
           + (C / (p + 2.0)) * (r ** (1.0 - p) - r ** 3 / two_m ** (p + 2.0)))
    return float(out) if out.ndim == 0 else out


def gamma_y_derivative(r, fc: FoliationCurve):
    """dy/dr; strictly negative on (0, 2M) for a valid curve.

    This is the exact derivative of :func:`gamma_y`; the 3 r^2/(2M)^(p+2)
    term keeps its r^2 factor (dropping it only bounds y' from above).
    """
    r = np.asarray(r, dtype=float)
    M, p, C, A = fc.M, fc.p, fc.C, fc.A
    two_m = 2.0 * M
    if np.any(r <= 0.0) or np.any(r >= two_m):
        raise DomainError("r must lie in (0, 2M)")
    g = np.sqrt(r) * (3.0 * M - 2.0 * r) / np.sqrt(two_m - r)
    out = (g
           - C * ((p - 1.0) / ((p + 2.0) * r ** p)
                  + 3.0 * r ** 2 / ((p + 2.0) * two_m ** (p + 2.0)))
           + 3.0 * A * r ** 2 / two_m ** 3)
    return float(out) if out.ndim == 0 else out


def default_amplitude(p: float, M: float, margin: float = 1.05) -> float:
    """Smallest safe curve amplitude C (times ``margin``) for boundary value 0.

    C must dominate the global maximum of r^(1/2)(3M - 2r)/(2M - r)^(1/2),
    which is sqrt(6 sqrt(3) - 9) M at r = (3 - sqrt(3)) M / 2; the dividing
    bracket is evaluated at r = 2M.  For p = 2, M = 1 this gives
    approximately 10.788 before the margin; the shipped profile uses C = 12.
    """
    if not p > 1.0:
        raise DomainError(f"p must exceed 1, got {p}")
    if not margin > 1.0:
        raise DomainError(f"margin must exceed 1, got {margin}")
    g_max = G_MAX_COEFF * M
    two_m = 2.0 * M
    bracket = (3.0 / ((p + 2.0) * two_m ** (p + 2.0))
               + (p - 1.0) / ((p + 2.0) * two_m ** p))
    return margin * g_max / bracket


def params_from_c(c: float, fc: FoliationCurve) -> LeafParams:
    """Invert the curve: leaf data (r, H, branch) for an arbitrary real c.

    For c > A (lower family, below the maximal slice) r = y^(-1)(c) and
    H = (r^(3/2)(2M - r)^(1/2) - c)/r^3 <= 0, satisfying
    c = envelope_plus(H, r).  For c < A the leaf is the reflection of the
    mirrored curve's leaf at -c, with H negated and the mirrored relation
    c = envelope_minus(H, r).  c = A is the leaf through the bifurcation
    sphere (the maximal slice when A = 0).
    """
    if fc.A < 0.0:
        sub = params_from_c(-c, fc.mirrored())
        return LeafParams(c=c, r=sub.r, H=-sub.H, branch=sub.branch)
    M = fc.M
    if c == fc.A:
        H = -fc.A / (8.0 * M ** 3)
        branch = "maximal" if fc.A == 0.0 else "minus"
        return LeafParams(c=c, r=2.0 * M, H=H, branch=branch)
    if c < fc.A:
        sub = params_from_c(-c, fc.mirrored())
        return LeafParams(c=c, r=sub.r, H=-sub.H, branch=sub.branch)
    r = fc.inverse(c)
    H = (r ** 1.5 * math.sqrt(2.0 * M - r) - c) / r ** 3
    R_H, _ = envelope_max(min(H, 0.0), M)
    if abs(r - R_H) <= 1e-9 * M:
        branch = "cylinder"
    elif r < R_H:
        branch = "plus"
    else:
        branch = "minus"
    return LeafParams(c=c, r=r, H=H, branch=branch)


def leaf(c: float, fc: FoliationCurve, X_max: float = 3.0,
         **build_kwargs) -> Hypersurface:
    """Build the foliation leaf for parameter c (any real value)."""
    if fc.A < 0.0:
        return reflect_slice(leaf(-c, fc.mirrored(), X_max, **build_kwargs))
    if c < fc.A:
        return reflect_slice(_leaf_lower(-c, fc.mirrored(), X_max, **build_kwargs))
    return _leaf_lower(c, fc, X_max, **build_kwargs)


def _leaf_lower(c: float, fc: FoliationCurve, X_max: float,
                **build_kwargs) -> Hypersurface:
    """Leaf of the c >= A half-family (never recurses)."""
    lp = params_from_c(c, fc)
    p = SliceParams(M=fc.M, H=lp.H, c=c)
    samples = build_kwargs.pop("samples_per_side", None)
    n = samples if samples is not None else DEFAULT_SAMPLES_PER_SIDE
    if lp.branch == "maximal":
        return _maximal_slice(p, X_max, n, "ivp")
    if lp.branch == "cylinder":
        return _cylinder_slice(p, lp.r, X_max, n, "ivp")
    return build_slice_ivp(p, lp.branch, X_max, samples_per_side=n,
                           **build_kwargs)


def alpha_curve_intersection(fc: FoliationCurve,
                             tol: float = 1e-13) -> tuple[float, float]:
    """Crossing (C, R) of the curve y with the locus of envelope maxima.

    Along the maxima locus the point at radius r carries the curvature
    Hhat(r) = (3M - 2r) / (3 r^(3/2) (2M - r)^(1/2)) for which the envelope
    maximum sits at r; its value there reduces to
    a(r) = r^(3/2) (3M - r) / (3 (2M - r)^(1/2)), an increasing function, so
    the decreasing curve crosses it exactly once.  The leaf at c = C is the
    cylinder slice r = R.
    """
    M = fc.M
    two_m = 2.0 * M

    def gap(r):
        a = r ** 1.5 * (3.0 * M - r) / (3.0 * math.sqrt(two_m - r))
        return gamma_y(r, fc) - a

    lo = 0.5 * M
    while gap(lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-12 * M:
            raise BracketError("could not bracket the maxima-locus crossing")
    hi = two_m * (1.0 - 1e-9)
    R = find_root_bracketed(gap, lo, hi, tol=tol * max(1.0, M))
    return float(gamma_y(R, fc)), R


def mo_linear_family(H_list, M: float, X_max: float = 3.0,
                     **build_kwargs) -> list[Hypersurface]:
    """Slices with the linear relation c = -8 M^3 H, one per requested H.

    Every member passes through the bifurcation sphere (T-intercept 0), so
    the family fails to foliate: all slices intersect at the origin.
    """
    out = []
    for H in H_list:
        c = -8.0 * M ** 3 * H
        if H == 0.0:
            out.append(_maximal_slice(SliceParams(M=M, H=0.0, c=0.0), X_max,
                                      801, "ivp"))
        elif H < 0.0:
            out.append(build_slice_ivp(SliceParams(M=M, H=H, c=c), "minus",
                                       X_max, **build_kwargs))
        else:
            mirror = build_slice_ivp(SliceParams(M=M, H=-H, c=-c), "minus",
                                     X_max, **build_kwargs)
            out.append(reflect_slice(mirror))
    return out


def default_c_grid(M: float = 1.0, count_per_side: int = 20) -> np.ndarray:
    """Default leaf parameters: +-logspace(1e-2, 1e2) M^2 plus the zero leaf."""
    mags = np.logspace(-2.0, 2.0, count_per_side) * M * M
    return np.concatenate([-mags[::-1], [0.0], mags])


def verify_disjointness(fc: FoliationCurve, c_grid, X_grid,
                        X_max: float = 3.0,
                        leaves: dict | None = None) -> VerificationReport:
    """Check that T_(c2)(X) < T_(c1)(X) for adjacent c1 < c2 at each station.

    Slices truncated at the singularity do not span every station; each
    adjacent pair is compared where both are defined (they always share
    X = 0).  Failures become report records, not exceptions.
    """
    c_grid = sorted(float(c) for c in c_grid)
    report = VerificationReport()
    if len(c_grid) < 2:
        report.add("disjointness (vacuous: single leaf)", True,
                   math.inf, "n/a", 0.0)
        return report
    if leaves is None:
        leaves = {}
    for c in c_grid:
        if c not in leaves:
            leaves[c] = leaf(c, fc, X_max)
    worst = math.inf
    worst_loc = "n/a"
    compared = 0
    for c1, c2 in zip(c_grid[:-1], c_grid[1:]):
        s1, s2 = leaves[c1], leaves[c2]
        x_lim = min(s1.x_max, s2.x_max)
        for x in X_grid:
            if abs(x) > x_lim:
                continue
            margin = slice_T_at(s1, float(x)) - slice_T_at(s2, float(x))
            compared += 1
            if margin < worst:
                worst = margin
                worst_loc = f"c1={c1:g}, c2={c2:g}, X={x:g}"
    report.add(f"disjointness margin over {compared} comparisons",
               worst > 0.0, worst, worst_loc, 0.0)
    return report


def _t_at_station(c: float, fc: FoliationCurve, X: float,
                  tol: float = 1e-10) -> float | None:
    """T(X) on the leaf for c, or None when the leaf ends before reaching X.

    Cheap path for locate: integrates only to the station instead of
    building a full sampled slice.
    """
    if fc.A < 0.0:
        t = _t_at_station(-c, fc.mirrored(), X, tol)
        return None if t is None else -t
    if c < fc.A:
        t = _t_at_station_lower(-c, fc.mirrored(), X, tol)
        return None if t is None else -t
    return _t_at_station_lower(c, fc, X, tol)


def _t_at_station_lower(c: float, fc: FoliationCurve, X: float,
                        tol: float) -> float | None:
    X = abs(X)
    lp = params_from_c(c, fc)
    M = fc.M
    if lp.branch == "maximal":
        return 0.0
    if lp.branch == "cylinder":
        s = (2.0 * M - lp.r) * math.exp(lp.r / (2.0 * M))
        return -math.sqrt(X * X + s)
    if X == 0.0:
        return _intercept_from_root(lp.r, M)
    T0 = _intercept_from_root(lp.r, M)
    rhs = _kruskal_rhs(M, lp.H)
    r_stop = min(0.05 * M, 0.5 * lp.r) if lp.branch == "plus" else 0.05 * M

    def stop(x, y):
        F, Fp = y
        if 1.0 - Fp * Fp < EPS_STATION_SPACELIKE:
            return True
        return areal_radius_from_kruskal(F, x, M) < r_stop

    traj = solve_ivp(rhs, 0.0, (T0, 0.0), X, tol=tol,
                     stop_predicate=stop, max_step=max(X / 50.0, 1e-6))
    if traj.stop_reason != "reached_end":
        return None
    return traj.ys[-1][0]


def locate(T_prime: float, X_prime: float, fc: FoliationCurve,
           tol: float = 1e-6, c_cap: float = 1e6) -> float:
    """Parameter c' of the leaf through (T', X'): bisection on the monotone
    map c -> T_c(X'), which decreases by the disjointness property.

    Leaves that end (at the singularity truncation) before reaching X' count
    as lying beyond the target on their side of the family.  The bracket
    grows geometrically from [-M^2, M^2] up to |c| <= c_cap M^2.
    """
    M = fc.M
    if X_prime * X_prime - T_prime * T_prime <= -2.0 * M:
        raise DomainError(
            f"point (T={T_prime}, X={X_prime}) is not strictly inside the "
            "Kruskal extension")
    X = abs(X_prime)

    def gap(c: float) -> float:
        t = _t_at_station(c, fc, X)
        if t is None:
            # leaf truncated before the station: it lies past the
            # singularity on its own side of the family
            return -math.inf if c >= fc.A else math.inf
        return t - T_prime

    lo, hi = -M * M, M * M
    g_lo, g_hi = gap(lo), gap(hi)
    while g_lo < 0.0:
        lo *= 2.0
        if abs(lo) > c_cap * M * M:
            raise BracketError(
                f"target T'={T_prime} not straddled for c down to {lo}")
        g_lo = gap(lo)
    while g_hi > 0.0:
        hi *= 2.0
        if abs(hi) > c_cap * M * M:
            raise BracketError(
                f"target T'={T_prime} not straddled for c up to {hi}")
        g_hi = gap(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    best_c, best_g = None, math.inf
    # bisect while an end is infinite (leaf truncated), then add secant steps
    for k in range(300):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        finite = math.isfinite(g_lo) and math.isfinite(g_hi)
        if finite and (k % 2 == 0) and g_lo != g_hi:
            sec = lo + g_lo * (hi - lo) / (g_lo - g_hi)
            width = hi - lo
            if not (lo + 0.01 * width < sec < hi - 0.01 * width):
                sec = mid
        else:
            sec = mid
        g_mid = gap(sec)
        if math.isfinite(g_mid) and abs(g_mid) < best_g:
            best_c, best_g = sec, abs(g_mid)
        if g_mid == 0.0 or (math.isfinite(g_mid) and abs(g_mid) < tol):
            return sec
        if g_mid > 0.0:
            lo, g_lo = sec, g_mid
        else:
            hi, g_hi = sec, g_mid
    if best_c is not None and best_g < tol:
        return best_c
    raise BracketError(
        f"locate did not converge to |T - T'| < {tol} at (T'={T_prime}, "
        f"X'={X_prime}); last bracket [{lo}, {hi}]")


@dataclass(frozen=True)
class CurvePair:
    """Lower and upper monotone curves of a shifted (A != 0) foliation.

    The lower curve is y with boundary value A; the upper curve is the
    mirror -y_(-A), increasing from -infinity to A, so the union crosses
    every envelope curve of either sign exactly once and the two halves join
    at r = 2M with the common value A.
    """

    lower: FoliationCurve
    upper_base: FoliationCurve  # the curve y_(-A); upper values are -y_(-A)

    def lower_value(self, r):
        return gamma_y(r, self.lower)

    def upper_value(self, r):
        return -gamma_y(r, self.upper_base)


def shifted_curve_pair(fc: FoliationCurve) -> CurvePair:
    """Split a (possibly shifted) curve into its lower/upper family pair."""
    return CurvePair(lower=fc, upper_base=fc.mirrored())
