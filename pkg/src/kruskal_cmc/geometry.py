"""Schwarzschild/Kruskal geometry primitives.

Everything here is a pure scalar function: the metric factor, the envelope
functions that delimit slice domains, the coordinate maps between the
Schwarzschild (t, r) patches and the Kruskal (T, X) plane, quadrant
classification, and pointwise residuals of the constant-mean-curvature
equation in both coordinate systems.

Units are geometric: r, t, T, X and M carry length, H carries 1/length and
the slice parameter c carries length^2.

Sign conventions.  H is the mean curvature with respect to the
future-directed unit normal, normalized with a factor 1/3, so the cylinder
hypersurface r = R inside the white-hole region has H < 0 and slices below
the maximal slice T = 0 carry H < 0.  The Kruskal-coordinate residual
enforced here,

    F'' + e^(-r/2M) (6M/r^2 - 1/r) (-F + F' X) (1 - F'^2)
        - 12 H M e^(-r/4M) r^(-1/2) (1 - F'^2)^(3/2) = 0,

was certified against that convention two independent ways: the cylinder
r = R_H solves it exactly for the H whose envelope maximum sits at R_H, and
a direct divergence computation of the cylinder's unit normal gives the same
H.  (With the opposite sign on the H term the cylinder check fails by O(1).)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (BeyondSingularityError, DomainError, HorizonError,
                     NonSpacelikeError)
from .numerics import find_root_bracketed


class Region(enum.Enum):
    """Kruskal quadrants plus horizon and bifurcation markers."""

    I = "I"                     # right exterior, X > |T|
    II = "II"                   # black-hole interior, T > |X|
    IPRIME = "I'"               # left exterior, X < -|T|
    IIPRIME = "II'"             # white-hole interior, T < -|X|
    HORIZON_FUTURE = "horizon+"
    HORIZON_PAST = "horizon-"
    BIFURCATION = "bifurcation"


@dataclass(frozen=True)
class SliceParams:
    """The triple (M, H, c) identifying one TSS-CMC hypersurface."""

    M: float
    H: float
    c: float

    def __post_init__(self):
        if not (self.M > 0.0 and math.isfinite(self.M)):
            raise DomainError(f"mass must be positive and finite, got M={self.M}")
        if not (math.isfinite(self.H) and math.isfinite(self.c)):
            raise DomainError(f"H and c must be finite, got H={self.H}, c={self.c}")


@dataclass(frozen=True)
class KruskalPoint:
    """A point of the (T, X) plane with cached areal radius and quadrant."""

    T: float
    X: float
    r: float
    region: Region

    @classmethod
    def from_coords(cls, T: float, X: float, M: float) -> "KruskalPoint":
        return cls(T=T, X=X, r=areal_radius_from_kruskal(T, X, M),
                   region=classify_region(T, X, M))


def lapse_h(r: float, M: float) -> float:
    """Metric factor h(r) = 1 - 2M/r; negative inside the horizon."""
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    return 1.0 - 2.0 * M / r


def radial_potential_l(r: float, p: SliceParams) -> float:
    """Interior potential l(r) = (H r + c/r^2) / sqrt(-h(r)), 0 < r < 2M.

    The interior slice domain is exactly where l > 1.
    """
    if not 0.0 < r < 2.0 * p.M:
        raise DomainError(f"r must lie in (0, 2M), got r={r}, M={p.M}")
    return (p.H * r + p.c / (r * r)) / math.sqrt(-lapse_h(r, p.M))


def envelope_plus(H: float, r: float, M: float) -> float:
    """Envelope -H r^3 + r^(3/2) (2M - r)^(1/2) on [0, 2M].

    Its graph parameterizes the slices below the maximal slice; the interior
    slice condition l > 1 is c > envelope_plus(H, r, M).
    """
    if not 0.0 <= r <= 2.0 * M:
        raise DomainError(f"r must lie in [0, 2M], got r={r}, M={M}")
    return -H * r ** 3 + r ** 1.5 * math.sqrt(2.0 * M - r)


def envelope_minus(H: float, r: float, M: float) -> float:
    """Mirror envelope -H r^3 - r^(3/2) (2M - r)^(1/2).

    Satisfies envelope_minus(H, r, M) == -envelope_plus(-H, r, M) exactly.
    """
    if not 0.0 <= r <= 2.0 * M:
        raise DomainError(f"r must lie in [0, 2M], got r={r}, M={M}")
    return -(H * r ** 3 + r ** 1.5 * math.sqrt(2.0 * M - r))


def envelope_deriv(H: float, r: float, M: float) -> float:
    """d/dr of envelope_plus: -3 H r^2 + r^(1/2) (3M - 2r) / (2M - r)^(1/2)."""
    if not 0.0 <= r < 2.0 * M:
        raise DomainError(f"r must lie in [0, 2M), got r={r}, M={M}")
    return -3.0 * H * r * r + math.sqrt(r) * (3.0 * M - 2.0 * r) / math.sqrt(2.0 * M - r)


def envelope_max(H: float, M: float, tol: float = 1e-14) -> tuple[float, float]:
    """Location and value (R_H, C_H) of the maximum of envelope_plus over [0, 2M].

    Requires H <= 0 (the H > 0 family is handled by reflection at the
    foliation level).  Solved in the variable u = sqrt(2M - r) so that the
    maximum keeps full relative resolution as it approaches the horizon for
    very negative H.
    """
    if H > 0.0:
        raise DomainError(f"envelope_max requires H <= 0, got H={H}")
    # root of u * d(envelope)/dr, expressed in u: -3H r^2 u + sqrt(r)(2u^2 - M)
    def fu(u):
        r = 2.0 * M - u * u
        return -3.0 * H * r * r * u + math.sqrt(r) * (2.0 * u * u - M)

    # shrink the upper end slightly: u = sqrt(2M) (r = 0) is a spurious zero
    u_star = find_root_bracketed(fu, 0.0, math.sqrt(2.0 * M) * (1.0 - 1e-9), tol=tol)
    R = 2.0 * M - u_star * u_star
    C = -H * R ** 3 + R ** 1.5 * u_star
    return R, C


def areal_radius_from_kruskal(T: float, X: float, M: float,
                              tol: float = 1e-12) -> float:
    """Invert (r - 2M) e^(r/2M) = X^2 - T^2 for the unique r >= 0.

    The left-hand side is strictly increasing in r, so the inverse exists for
    X^2 - T^2 >= -2M; smaller values lie beyond the r = 0 singularity.
    Solved by a bracketed, bisection-safeguarded Newton iteration.
    """
    q = X * X - T * T
    two_m = 2.0 * M
    if q < -two_m:
        raise BeyondSingularityError(
            f"X^2 - T^2 = {q} < -2M = {-two_m}: beyond the r=0 singularity")
    if q == -two_m:
        return 0.0
    if q == 0.0:
        return two_m
    if q > 0.0:
        lo, hi = two_m, two_m + q  # (r - 2M) e^(r/2M) >= (r - 2M) e for r >= 2M
        r = two_m + q * math.exp(-1.0 - q / (two_m + q))
        r = min(max(r, lo), hi)
    else:
        lo, hi = 0.0, two_m
        r = 2.0 * math.sqrt(M * (q + two_m))  # expansion near the singularity
        r = min(max(r, lo), hi)
    for _ in range(100):
        e = math.exp(r / two_m)
        phi = (r - two_m) * e - q
        if phi > 0.0:
            hi = r
        else:
            lo = r
        dphi = (r / two_m) * e
        if dphi > 0.0:
            r_new = r - phi / dphi
        else:
            r_new = 0.5 * (lo + hi)
        if not lo <= r_new <= hi:
            r_new = 0.5 * (lo + hi)
        if abs(r_new - r) <= tol * max(1.0, abs(r_new)):
            return r_new
        r = r_new
    return r


def kruskal_from_schwarzschild(t: float, r: float, region: Region,
                               M: float) -> tuple[float, float]:
    """Map a Schwarzschild-patch point (t, r) to Kruskal (T, X).

    Region I:  (T, X) = sqrt(r - 2M) e^(r/4M) (sinh(t/4M), cosh(t/4M));
    region I' negates both.  Region II: (T, X) = sqrt(2M - r) e^(r/4M)
    (cosh(t/4M), sinh(t/4M)); region II' negates both.
    """
    fm = t / (4.0 * M)
    if region in (Region.I, Region.IPRIME):
        if not r > 2.0 * M:
            raise DomainError(f"region {region.value} requires r > 2M, got r={r}")
        amp = math.sqrt(r - 2.0 * M) * math.exp(r / (4.0 * M))
        T, X = amp * math.sinh(fm), amp * math.cosh(fm)
        if region is Region.IPRIME:
            T, X = -T, -X
        return T, X
    if region in (Region.II, Region.IIPRIME):
        if not 0.0 < r < 2.0 * M:
            raise DomainError(f"region {region.value} requires 0 < r < 2M, got r={r}")
        amp = math.sqrt(2.0 * M - r) * math.exp(r / (4.0 * M))
        T, X = amp * math.cosh(fm), amp * math.sinh(fm)
        if region is Region.IIPRIME:
            T, X = -T, -X
        return T, X
    raise DomainError(f"no Schwarzschild patch for region {region.value}")


def classify_region(T: float, X: float, M: float) -> Region:
    """Classify a Kruskal point into quadrant/horizon/bifurcation (exact sign tests)."""
    q = X * X - T * T
    if q < -2.0 * M:
        raise BeyondSingularityError(
            f"X^2 - T^2 = {q} < -2M: beyond the r=0 singularity")
    aT, aX = abs(T), abs(X)
    if aT == aX:
        if T == 0.0:
            return Region.BIFURCATION
        return Region.HORIZON_FUTURE if T > 0.0 else Region.HORIZON_PAST
    if aX > aT:
        return Region.I if X > 0.0 else Region.IPRIME
    return Region.II if T > 0.0 else Region.IIPRIME


def cmc_residual_kruskal(F: float, Fp: float, Fpp: float, X: float,
                         H: float, M: float) -> float:
    """Residual of the CMC equation for a graph T = F(X) in Kruskal coordinates.

    Vanishes exactly on slices of constant mean curvature H (future-normal
    convention, see the module docstring).  Raises when the jet is not
    spacelike or the point lies at/beyond the singularity.
    """
    G = 1.0 - Fp * Fp
    if G <= 0.0:
        raise NonSpacelikeError(f"1 - F'^2 = {G} <= 0")
    r = areal_radius_from_kruskal(F, X, M)
    if r <= 0.0:
        raise DomainError("r = 0: jet sits on the singularity")
    drift = math.exp(-r / (2.0 * M)) * (6.0 * M / (r * r) - 1.0 / r) * (-F + Fp * X) * G
    bulge = 12.0 * H * M * math.exp(-r / (4.0 * M)) / math.sqrt(r) * G ** 1.5
    return Fpp + drift - bulge


def cmc_residual_kruskal_terms(F: float, Fp: float, Fpp: float, X: float,
                               H: float, M: float) -> tuple[float, float, float]:
    """The three addends of :func:`cmc_residual_kruskal` (for scaled checks)."""
    G = 1.0 - Fp * Fp
    if G <= 0.0:
        raise NonSpacelikeError(f"1 - F'^2 = {G} <= 0")
    r = areal_radius_from_kruskal(F, X, M)
    if r <= 0.0:
        raise DomainError("r = 0: jet sits on the singularity")
    drift = math.exp(-r / (2.0 * M)) * (6.0 * M / (r * r) - 1.0 / r) * (-F + Fp * X) * G
    bulge = -12.0 * H * M * math.exp(-r / (4.0 * M)) / math.sqrt(r) * G ** 1.5
    return Fpp, drift, bulge


def cmc_residual_schwarzschild(fp: float, fpp: float, r: float, H: float,
                               M: float, sign: int) -> float:
    """Residual of the CMC equation for a graph t = f(r) in Schwarzschild coordinates.

    ``sign`` (+1 or -1) selects the branch of the +-3H term; which sign a
    given slice piece satisfies depends on the region and the piece
    orientation.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    if r == 2.0 * M:
        raise HorizonError("Schwarzschild coordinates degenerate at r = 2M")
    h = lapse_h(r, M)
    hp = 2.0 * M / (r * r)
    Q = 1.0 / h - fp * fp * h
    if Q <= 0.0:
        raise NonSpacelikeError(f"1/h - (f')^2 h = {Q} <= 0")
    return fpp + (Q * (2.0 * h / r + 0.5 * hp) + hp / h) * fp + sign * 3.0 * H * Q ** 1.5
