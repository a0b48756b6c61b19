"""Self-contained numerical kernel.

Three primitives, all deterministic and bit-stable across runs:

* bracketed root finding (bisection with secant acceleration),
* adaptive Gauss-Kronrod quadrature with an optional u^2 substitution that
  removes an inverse-square-root endpoint singularity,
* an embedded Dormand-Prince 5(4) initial-value integrator with early
  stopping on a user predicate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import AccuracyError, BracketError, StepUnderflowError


@dataclass(frozen=True)
class Tolerances:
    """Default tolerances used throughout the package (M = 1 scale)."""

    root: float = 1e-12       # relative, root finding
    quad: float = 1e-9        # absolute, quadrature
    ode: float = 1e-9         # per-step relative, IVP
    coord: float = 1e-8       # coordinate-consistency checks
    resid: float = 1e-6       # CMC-equation residual checks

    def __post_init__(self):
        for name in ("root", "quad", "ode", "coord", "resid"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"tolerance {name!r} must be positive")
        if self.resid < self.ode:
            raise ValueError("resid tolerance must be >= ode tolerance")


DEFAULT_TOLERANCES = Tolerances()


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float,
                        tol: float = 1e-12, max_iter: int = 200) -> float:
    """Find a root of f in [lo, hi] given f(lo) * f(hi) <= 0.

    Secant steps are taken when they fall inside the current bracket; every
    other iteration falls back to bisection, which guarantees convergence.
    The returned point never leaves the initial bracket.
    """
    if not lo < hi:
        if lo == hi:
            if f(lo) == 0.0:
                return lo
            raise BracketError("empty bracket")
        lo, hi = hi, lo
    a, b = lo, hi
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={fa}, {fb}")

    x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    for k in range(max_iter):
        width = b - a
        if width <= tol * max(1.0, abs(x)):
            break
        use_secant = (k % 2 == 0) and fb != fa
        if use_secant:
            x_new = b - fb * (b - a) / (fb - fa)
            # reject secant points at/outside the bracket ends
            if not (a + 0.01 * width < x_new < b - 0.01 * width):
                x_new = 0.5 * (a + b)
        else:
            x_new = 0.5 * (a + b)
        f_new = f(x_new)
        if f_new == 0.0:
            return x_new
        if abs(f_new) < abs(fx):
            x, fx = x_new, f_new
        if fa * f_new < 0.0:
            b, fb = x_new, f_new
        else:
            a, fa = x_new, f_new
    return x


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
_XK = (0.991455371120813, 0.949107912342759, 0.864864423359769,
       0.741531185599394, 0.586087235467691, 0.405845151377397,
       0.207784955007898, 0.0)
_WK = (0.022935322010529, 0.063092092629979, 0.104790010322250,
       0.140653259715525, 0.169004726639267, 0.190350578064785,
       0.204432940075298, 0.209482141084728)
_WG = (0.129484966168870, 0.279705391489277, 0.381830050505119,
       0.417959183673469)


def _gk15(f, a, b):
    """Return (kronrod, |kronrod - gauss|) on [a, b]."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    kron = _WK[7] * fc
    gauss = _WG[3] * fc
    for i in range(7):
        x = h * _XK[i]
        f1 = f(c - x)
        f2 = f(c + x)
        kron += _WK[i] * (f1 + f2)
        if i % 2 == 1:  # Gauss nodes are the odd-index Kronrod nodes
            gauss += _WG[i // 2] * (f1 + f2)
    return kron * h, abs(kron - gauss) * abs(h)


def _adaptive_gk(f, a, b, tol, max_intervals=4096):
    if a == b:
        return 0.0
    min_width = 1e-10 * (b - a)
    stack = [(a, b, tol)]
    total = 0.0
    total_err = 0.0
    used = 0
    while stack:
        lo, hi, t = stack.pop()
        est, err = _gk15(f, lo, hi)
        used += 1
        mid = 0.5 * (lo + hi)
        at_floor = (hi - lo) <= min_width or mid == lo or mid == hi
        if err <= t or at_floor or used >= max_intervals:
            total += est
            total_err += err
            continue
        stack.append((lo, mid, 0.5 * t))
        stack.append((mid, hi, 0.5 * t))
    if total_err > 10.0 * tol:
        raise AccuracyError(
            f"quadrature did not converge ({used} intervals, accumulated "
            f"error estimate {total_err:.3e} > tol {tol:.3e})",
            best_estimate=total, error_estimate=total_err)
    return total


def integrate_endpoint_singular(f: Callable[[float], float], a: float, b: float,
                                singular_end: str = "none",
                                tol: float = 1e-9) -> float:
    """Integrate f over [a, b], allowing an x^(-1/2)-type endpoint singularity.

    ``singular_end`` names the singular endpoint ("a", "b", or "none").  The
    substitution u^2 = |x - end| turns the singular factor into a bounded one;
    adaptive Gauss-Kronrod handles the rest.  No endpoint is ever evaluated.
    """
    if singular_end not in ("a", "b", "none"):
        raise ValueError(f"singular_end must be 'a', 'b' or 'none', got {singular_end!r}")
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
        if singular_end == "a":
            singular_end = "b"
        elif singular_end == "b":
            singular_end = "a"
    if singular_end == "none":
        return sign * _adaptive_gk(f, a, b, tol)
    span = b - a
    if singular_end == "a":
        g = lambda u: 2.0 * u * f(a + u * u)
    else:
        g = lambda u: 2.0 * u * f(b - u * u)
    return sign * _adaptive_gk(g, 0.0, math.sqrt(span), tol)


# ---------------------------------------------------------------------------
# initial-value ODE integration
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau; the 5th-order solution is propagated.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class RhsDomainError(ValueError):
    """Raise inside an rhs to signal the trial step left the valid domain."""


@dataclass
class Trajectory:
    """Ordered samples of an IVP solution plus dense per-step data."""

    xs: list[float]
    ys: list[tuple[float, ...]]
    fs: list[tuple[float, ...]]
    stop_reason: str = "reached_end"

    def eval(self, x: float) -> tuple[float, ...]:
        """Cubic-Hermite evaluation between stored steps."""
        xs = self.xs
        if not xs:
            raise ValueError("empty trajectory")
        increasing = xs[-1] >= xs[0]
        if increasing:
            if not xs[0] <= x <= xs[-1]:
                raise ValueError(f"x={x} outside trajectory range [{xs[0]}, {xs[-1]}]")
            lo, hi = 0, len(xs) - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if xs[mid] <= x:
                    lo = mid
                else:
                    hi = mid
        else:
            if not xs[-1] <= x <= xs[0]:
                raise ValueError(f"x={x} outside trajectory range [{xs[-1]}, {xs[0]}]")
            lo, hi = 0, len(xs) - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if xs[mid] >= x:
                    lo = mid
                else:
                    hi = mid
        x0, x1 = xs[lo], xs[lo + 1]
        h = x1 - x0
        if h == 0.0:
            return self.ys[lo]
        s = (x - x0) / h
        y0, y1, f0, f1 = self.ys[lo], self.ys[lo + 1], self.fs[lo], self.fs[lo + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return tuple(h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i]
                     for i in range(len(y0)))


def _dp_step(rhs, x, y, f0, h):
    """One Dormand-Prince step; returns (y5, f_end, err_components)."""
    n = len(y)
    k = [f0]
    for i in range(1, 7):
        a = _DP_A[i]
        yi = tuple(y[j] + h * sum(a[m] * k[m][j] for m in range(i)) for j in range(n))
        k.append(rhs(x + _DP_C[i] * h, yi))
    y5 = tuple(y[j] + h * sum(_DP_B5[m] * k[m][j] for m in range(7)) for j in range(n))
    err = tuple(h * sum(_DP_E[m] * k[m][j] for m in range(7)) for j in range(n))
    return y5, k[6], err


def solve_ivp(rhs: Callable[[float, Sequence[float]], tuple],
              x0: float, y0: Sequence[float], x_end: float,
              tol: float = 1e-9,
              stop_predicate: Callable[[float, Sequence[float]], bool] | None = None,
              max_step: float | None = None,
              fixed_step: float | None = None) -> Trajectory:
    """Integrate y' = rhs(x, y) from x0 toward x_end.

    Adaptive embedded 5(4) stepping with per-step relative control at
    ``tol``; ``max_step`` defaults to |x_end - x0| / 200 so the stored steps
    are dense enough for interpolation.  When ``stop_predicate`` fires the
    integration stops at (approximately) the earliest offending point and the
    trajectory's ``stop_reason`` is set to "predicate".  ``fixed_step``
    disables error control and marches at the given step (used for
    convergence-order studies).  An rhs may raise :class:`RhsDomainError` to
    force step rejection near a domain boundary.
    """
    y = tuple(float(v) for v in y0)
    x = float(x0)
    span = x_end - x0
    if span == 0.0:
        f = rhs(x, y)
        return Trajectory([x], [y], [f])
    direction = 1.0 if span > 0 else -1.0
    span = abs(span)
    if max_step is None:
        max_step = span / 200.0
    traj = Trajectory([], [], [])
    f = rhs(x, y)
    traj.xs.append(x)
    traj.ys.append(y)
    traj.fs.append(f)

    if stop_predicate is not None and stop_predicate(x, y):
        traj.stop_reason = "predicate"
        return traj

    if fixed_step is not None:
        h = abs(fixed_step) * direction
        while (x_end - x) * direction > 1e-15 * span:
            if (x_end - x) * direction < abs(h):
                h = x_end - x
            y5, f_end, _ = _dp_step(rhs, x, y, f, h)
            x += h
            y, f = y5, f_end
            traj.xs.append(x)
            traj.ys.append(y)
            traj.fs.append(f)
            if stop_predicate is not None and stop_predicate(x, y):
                traj.stop_reason = "predicate"
                return traj
        return traj

    h = min(max_step, span / 100.0) * direction
    min_h = 1e-14 * max(1.0, abs(x0), abs(x_end))
    while (x_end - x) * direction > 1e-15 * span:
        if (x_end - x) * direction < abs(h):
            h = x_end - x
        rejected_domain = False
        try:
            y5, f_end, err = _dp_step(rhs, x, y, f, h)
        except RhsDomainError:
            rejected_domain = True
        if not rejected_domain:
            err_norm = max(abs(err[i]) / (tol * (1.0 + abs(y[i]))) for i in range(len(y)))
        if rejected_domain or err_norm > 1.0:
            if abs(h) <= min_h:
                if rejected_domain:
                    traj.stop_reason = "domain_boundary"
                    return traj
                raise StepUnderflowError(
                    f"step underflow at x={x} (h={h:.3e})", trajectory=traj)
            shrink = 0.5 if rejected_domain else max(0.2, 0.9 * err_norm ** -0.2)
            h *= shrink
            continue
        x_new = x + h
        traj.xs.append(x_new)
        traj.ys.append(y5)
        traj.fs.append(f_end)
        if stop_predicate is not None and stop_predicate(x_new, y5):
            _refine_stop(traj, stop_predicate)
            traj.stop_reason = "predicate"
            return traj
        x, y, f = x_new, y5, f_end
        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        h = direction * min(abs(h) * factor, max_step)
    return traj


def fd_weights(xs: Sequence[float], x0: float, m: int):
    """Finite-difference weights on arbitrary nodes (Fornberg's recursion).

    Returns an array ``c`` of shape (len(xs), m + 1) where column k holds the
    weights of the k-th derivative at x0: f^(k)(x0) ~= sum_i c[i, k] f(xs[i]).
    """
    import numpy as np
    n = len(xs)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def integrate_to_nodes(rhs: Callable[[float, Sequence[float]], tuple],
                       x0: float, y0: Sequence[float], nodes: Sequence[float],
                       tol: float = 1e-9,
                       max_step: float | None = None) -> list[tuple[float, ...]]:
    """March an IVP so that every requested node is an exact step endpoint.

    Returns the state at each node (the first node must equal x0).  Unlike
    dense-output interpolation, the values carry only the accumulated ODE
    error, which matters when finite differences are taken on them.
    """
    if len(nodes) == 0:
        return []
    if nodes[0] != x0:
        raise ValueError("first node must equal x0")
    y = tuple(float(v) for v in y0)
    x = float(x0)
    span = abs(nodes[-1] - x0)
    if span == 0.0:
        return [y for _ in nodes]
    direction = 1.0 if nodes[-1] > x0 else -1.0
    if max_step is None:
        max_step = span / 200.0
    out = [y]
    f = rhs(x, y)
    h = min(max_step, span / 100.0) * direction
    min_h = 1e-14 * max(1.0, abs(x0), abs(nodes[-1]))
    for target in nodes[1:]:
        while (target - x) * direction > 1e-15 * span:
            h_try = h
            if (target - x) * direction < abs(h_try):
                h_try = target - x
            try:
                y5, f_end, err = _dp_step(rhs, x, y, f, h_try)
            except RhsDomainError:
                if abs(h) <= min_h:
                    raise
                h *= 0.5
                continue
            err_norm = max(abs(err[i]) / (tol * (1.0 + abs(y[i])))
                           for i in range(len(y)))
            if err_norm > 1.0:
                if abs(h_try) <= min_h:
                    raise StepUnderflowError(f"step underflow at x={x}")
                h = h_try * max(0.2, 0.9 * err_norm ** -0.2)
                continue
            x = x + h_try
            y, f = y5, f_end
            factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
            h = direction * min(abs(h_try) * factor, max_step)
        x = target  # kill accumulated roundoff in x
        out.append(y)
    return out


def _refine_stop(traj: Trajectory, predicate) -> None:
    """Bisect the last step so the trajectory ends near the predicate onset."""
    x_lo, x_hi = traj.xs[-2], traj.xs[-1]
    for _ in range(60):
        x_mid = 0.5 * (x_lo + x_hi)
        if x_mid == x_lo or x_mid == x_hi:
            break
        y_mid = traj.eval(x_mid)
        if predicate(x_mid, y_mid):
            x_hi = x_mid
        else:
            x_lo = x_mid
    y_hi = traj.eval(x_hi)
    f_hi = traj.fs[-1]
    traj.xs[-1] = x_hi
    traj.ys[-1] = y_hi
    traj.fs[-1] = f_hi
