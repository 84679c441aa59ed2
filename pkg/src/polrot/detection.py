"""Parity readout, estimation metrics, and closed-form benchmarks.

The readout is photon-number parity on one output mode.  For a Gaussian
state the parity expectation depends only on the reduced mean m and 2x2
covariance G of that mode:

    <P> = exp(-m . G^-1 m) / sqrt(det G)

which is 1 for vacuum and 1/(2*n_th + 1) for a thermal mode.  Metrics built
on top: two-outcome Fisher information, error-propagation sensitivity,
fringe visibility, and a global sensitivity optimum over the rotation angle.

Closed-form expressions for the three sensor variants are provided for fast
parameter sweeps; they must agree with the matrix pipeline and the test
suite cross-checks them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .elements import PipelineSpec, build_pipeline
from .phase_space import GaussianState, apply_transform, reduce_to_modes

__all__ = [
    "FD_STEP",
    "EstimationResult",
    "parity_expectation",
    "outcome_probabilities",
    "pipeline_signal",
    "signal_function",
    "estimate",
    "classical_fisher",
    "sensitivity",
    "visibility",
    "optimal_sensitivity",
    "closed_form_signal",
    "closed_form_sensitivity",
    "qcrb_sensitivity",
]

# Central-difference step for derivatives of the signal with respect to the
# rotation angle; the signal is smooth and O(1), so this balances truncation
# against roundoff.
FD_STEP = 1e-5

# Outcome probabilities below this are treated as vanishing when weighting
# Fisher contributions.  Probabilities come out of (1 - signal)/2 with
# signal near 1, so their roundoff floor is a few ulps of 1; the threshold
# sits two orders above that.
_P_FLOOR = 1e-12

# Derivative estimates below this are treated as exactly zero (stationary
# point).  Central differences of a smooth O(1) signal carry roundoff of
# order eps/step ~ 1e-11, so the floor sits above that noise while staying
# far below any genuine slope.
_DERIV_FLOOR = 1e-10

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# -- exact trigonometry on half-turn fractions -------------------------------
#
# Closed forms below need cos(2*theta) to vanish *exactly* when 2*theta is an
# odd multiple of pi/2, otherwise divergent sensitivities come out as huge
# finite numbers instead of inf.  sin/cos are therefore evaluated as
# functions of u = angle/pi with exact range reduction: mod 2, then
# reflections that are exact in floating point (Sterbenz), then the library
# call on [0, 0.5] plus pinned endpoint values.


def _sinpi(u: NDArray[np.float64]) -> NDArray[np.float64]:
    """sin(pi * u), exact at integer and half-integer u."""
    u = np.asarray(u, dtype=np.float64)
    r = np.mod(u, 2.0)
    flip = r >= 1.0
    r = np.where(flip, r - 1.0, r)
    r = np.where(r > 0.5, 1.0 - r, r)
    val = np.sin(np.pi * r)
    val = np.where(r == 0.5, 1.0, val)
    val = np.where(r == 0.0, 0.0, val)
    return np.where(flip, -val, val)


def _cospi(u: NDArray[np.float64]) -> NDArray[np.float64]:
    """cos(pi * u), exact at integer and half-integer u."""
    u = np.asarray(u, dtype=np.float64)
    r = np.mod(u, 2.0)
    r = np.where(r >= 1.0, 2.0 - r, r)
    sign = np.where(r > 0.5, -1.0, 1.0)
    r = np.where(r > 0.5, 1.0 - r, r)
    val = np.cos(np.pi * r)
    val = np.where(r == 0.5, 0.0, val)
    return sign * val


def _doubled_angle(theta: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """(cos 2*theta, sin 2*theta); exact zeros at multiples of pi/4."""
    # Divide by np.pi so that theta values built as fractions of np.pi land
    # on exact half-integers of u.
    u = (2.0 * np.asarray(theta, dtype=np.float64)) / np.pi
    return _cospi(u), _sinpi(u)


# -- parity readout ----------------------------------------------------------


def parity_expectation(state: GaussianState, mode: int = 2) -> float:
    """Photon-number parity expectation on one mode of a Gaussian state."""
    red = reduce_to_modes(state, (mode,))
    g = red.cov
    m = red.mean
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if det <= 0.0:
        raise ValueError(f"reduced covariance has non-positive determinant {det}")
    quad = (g[1, 1] * m[0] * m[0] - 2.0 * g[0, 1] * m[0] * m[1] + g[0, 0] * m[1] * m[1]) / det
    return math.exp(-quad) / math.sqrt(det)


def outcome_probabilities(signal: float) -> tuple[float, float]:
    """(even, odd) photon-count probabilities for a parity expectation."""
    if abs(signal) > 1.0 + 1e-12:
        raise ValueError(f"parity expectation must lie in [-1, 1], got {signal}")
    s = min(1.0, max(-1.0, float(signal)))
    return (1.0 + s) / 2.0, (1.0 - s) / 2.0


def pipeline_signal(spec: PipelineSpec) -> float:
    """Parity signal of one configuration via the full matrix pipeline."""
    state, transform = build_pipeline(spec)
    return parity_expectation(apply_transform(state, transform), mode=2)


def signal_function(spec: PipelineSpec) -> Callable[[float], float]:
    """Return theta -> signal, rebuilding the pipeline at each angle."""

    def fn(theta: float) -> float:
        return pipeline_signal(replace(spec, theta=float(theta)))

    return fn


# -- estimation metrics ------------------------------------------------------


@dataclass(frozen=True)
class EstimationResult:
    """Signal, outcome probabilities, and precision metrics at one angle."""

    theta: float
    signal: float
    p_even: float
    p_odd: float
    fisher: float
    sensitivity: float

    def __post_init__(self) -> None:
        if abs(self.p_even + self.p_odd - 1.0) > 1e-12:
            raise ValueError("outcome probabilities must sum to 1")
        if abs(self.signal - (self.p_even - self.p_odd)) > 1e-12:
            raise ValueError("signal must equal p_even - p_odd")
        for name in ("p_even", "p_odd"):
            p = getattr(self, name)
            if not -1e-12 <= p <= 1.0 + 1e-12:
                raise ValueError(f"{name} out of range: {p}")
        if self.fisher < 0.0:
            raise ValueError(f"Fisher information must be >= 0, got {self.fisher}")
        if math.isfinite(self.sensitivity) and self.fisher > 0.0:
            if abs(self.sensitivity * math.sqrt(self.fisher) - 1.0) > 1e-9:
                raise ValueError("sensitivity and Fisher information are inconsistent")


def classical_fisher(
    signal_fn: Callable[[float], float], theta: float, step: float = FD_STEP
) -> float:
    """Two-outcome Fisher information of the parity measurement at theta.

    Sums (dp/dtheta)^2 / p over the even and odd outcomes with central
    differences.  An outcome whose probability vanishes contributes its
    analytic limit 2 * p'' when its slope also vanishes; a vanishing
    probability with nonzero slope means the information diverges and is
    reported as an error rather than a large number.
    """
    h = float(step)
    s0 = float(signal_fn(theta))
    sp = float(signal_fn(theta + h))
    sm = float(signal_fn(theta - h))
    total = 0.0
    for sign in (1.0, -1.0):
        p0 = (1.0 + sign * s0) / 2.0
        pp = (1.0 + sign * sp) / 2.0
        pm = (1.0 + sign * sm) / 2.0
        dp = (pp - pm) / (2.0 * h)
        if p0 > _P_FLOOR:
            total += dp * dp / p0
        elif abs(dp) * h <= 0.1 * (pp + pm) or abs(dp) <= _DERIV_FLOOR:
            # Quadratic zero of p: slope is negligible against curvature
            # (a linear zero would give |dp|*h ~ 0.5*(pp + pm)), so the
            # contribution takes its analytic limit dp^2/p -> 2 p''.
            total += max(2.0 * (pp + pm - 2.0 * p0) / (h * h), 0.0)
        else:
            raise ValueError(
                "Fisher information diverges: an outcome probability vanishes "
                f"with nonzero slope at theta={theta}"
            )
    return total


def sensitivity(
    signal_fn: Callable[[float], float], theta: float, step: float = FD_STEP
) -> float:
    """Error-propagation angle uncertainty sqrt(1 - s^2) / |ds/dtheta|.

    Parity squares to the identity, so the signal variance is 1 - s^2.
    Returns inf where the signal is stationary.
    """
    h = float(step)
    s0 = float(signal_fn(theta))
    ds = (float(signal_fn(theta + h)) - float(signal_fn(theta - h))) / (2.0 * h)
    var = max(1.0 - s0 * s0, 0.0)
    if abs(ds) <= _DERIV_FLOOR:
        return math.inf
    return math.sqrt(var) / abs(ds)


def estimate(
    signal_fn: Callable[[float], float], theta: float, step: float = FD_STEP
) -> EstimationResult:
    """Evaluate signal, probabilities, Fisher information and sensitivity.

    The reported sensitivity is 1/sqrt(F) so the pair is self-consistent by
    construction (the parity measurement saturates its own two-outcome
    bound).
    """
    s0 = float(signal_fn(theta))
    p_even, p_odd = outcome_probabilities(s0)
    fisher = classical_fisher(signal_fn, theta, step=step)
    sens = math.inf if fisher == 0.0 else 1.0 / math.sqrt(fisher)
    return EstimationResult(
        theta=float(theta),
        signal=s0,
        p_even=p_even,
        p_odd=p_odd,
        fisher=fisher,
        sensitivity=sens,
    )


# -- scans over the rotation angle -------------------------------------------


def _evaluate_grid(fn: Callable, grid: NDArray[np.float64]) -> NDArray[np.float64]:
    """Apply fn over a grid, vectorized when the callable supports it."""
    try:
        vals = np.asarray(fn(grid), dtype=np.float64)
        if vals.shape == grid.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(x)) for x in grid], dtype=np.float64)


def _golden_min(
    fn: Callable[[float], float], a: float, b: float, xtol: float
) -> tuple[float, float]:
    """Golden-section minimum of fn on [a, b]; tracks the best point seen."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = float(fn(c))
    fd = float(fn(d))
    if fc <= fd:
        best_x, best_f = c, fc
    else:
        best_x, best_f = d, fd
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = float(fn(c))
            if fc < best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = float(fn(d))
            if fd < best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def visibility(
    signal_fn: Callable[[float], float],
    lo: float = 0.0,
    hi: float = math.pi / 2,
    samples: int = 1801,
) -> float:
    """Fringe visibility (max - min) / (|max| + |min|) over [lo, hi].

    Global extrema are located on a dense angle grid and sharpened by
    golden-section refinement of the bracketing intervals.
    """
    if samples < 3:
        raise ValueError("need at least 3 samples")
    grid = np.linspace(lo, hi, samples)
    vals = _evaluate_grid(signal_fn, grid)
    if not np.all(np.isfinite(vals)):
        raise ValueError("signal must be finite to compute visibility")

    def refined(index: int, sign: float) -> float:
        a = grid[max(index - 1, 0)]
        b = grid[min(index + 1, samples - 1)]
        _, f = _golden_min(lambda x: sign * float(signal_fn(x)), a, b, xtol=1e-10)
        return sign * f

    imax = int(np.argmax(vals))
    imin = int(np.argmin(vals))
    smax = max(float(vals[imax]), refined(imax, -1.0))
    smin = min(float(vals[imin]), refined(imin, 1.0))
    denom = abs(smax) + abs(smin)
    if denom == 0.0:
        raise ValueError("signal vanishes identically; visibility undefined")
    return (smax - smin) / denom


def optimal_sensitivity(
    sens_fn: Callable[[float], float],
    lo: float = 1e-4,
    hi: float = math.pi / 2 - 1e-4,
    seeds: int = 64,
    xtol: float = 2.5e-7,
) -> tuple[float, float]:
    """Best (theta, delta_theta) of a sensitivity curve on [lo, hi].

    The curve may have several local minima separated by divergences, so
    every local minimum of a seed grid is refined by golden section and the
    best point encountered anywhere is returned.  The window excludes the
    endpoints where the signal is always stationary.  Raises if the curve is
    divergent across the whole window.
    """
    if seeds < 3:
        raise ValueError("need at least 3 seed points")
    grid = np.linspace(lo, hi, seeds)
    vals = _evaluate_grid(sens_fn, grid)
    best_x = float(grid[0])
    best_f = math.inf
    for i in range(seeds):
        if vals[i] < best_f:
            best_x, best_f = float(grid[i]), float(vals[i])
    for i in range(seeds):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < seeds - 1 else math.inf
        if not (vals[i] <= left and vals[i] <= right):
            continue
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, seeds - 1)])
        x, f = _golden_min(lambda t: float(sens_fn(t)), a, b, xtol=xtol)
        if f < best_f:
            best_x, best_f = x, f
    if not math.isfinite(best_f):
        raise ValueError("sensitivity diverges across the whole search window")
    return best_x, best_f


# -- closed forms ------------------------------------------------------------


def _gen_loss_coeffs(n: float, t1: float, t2: float) -> tuple[float, float, float]:
    """Coefficients (k0, k1, k2) of the generation-loss determinant.

    The reduced determinant of the measured mode is
    1 + (k0 + k1*c + k2*c^2) / 4 with c = cos(2*theta).  k0 is the combined
    excess noise at cos(2*theta) = 0 and is assembled from products that
    vanish cleanly in the lossless and equal-loss limits, avoiding the
    cancellation a naive expansion suffers there.
    """
    k0 = 4.0 * n * (t1 * (1.0 - t2) + t2 * (1.0 - t1)) + n * n * (t1 - t2) ** 2
    k1 = 2.0 * ((1.0 + n * t2) ** 2 - (1.0 + n * t1) ** 2)
    k2 = n * n * (t1 + t2) ** 2 + 8.0 * n * t1 * t2
    return k0, k1, k2


def _det_loss_floor(n: float, t: float, n_th: float) -> float:
    """Excess noise of the detection-loss determinant at cos(2*theta) = 0.

    Equal to beta*(beta+2) - t^2*n*(n+2) with beta the effective thermal
    occupation, but assembled from nonnegative terms so the near-lossless
    regime does not cancel catastrophically; the determinant is then
    1 + floor + t^2*n*(n+2)*cos(2*theta)^2.
    """
    e = 2.0 * n_th * (1.0 - t)
    return e * e + 2.0 * e * (n * t + 1.0) + 2.0 * n * t * (1.0 - t)


def _as_theta_array(spec: PipelineSpec, theta) -> tuple[NDArray[np.float64], bool]:
    th = spec.theta if theta is None else theta
    arr = np.asarray(th, dtype=np.float64)
    return arr, arr.ndim == 0


def closed_form_signal(spec: PipelineSpec, theta=None):
    """Analytic parity signal of a configuration, vectorized over theta.

    With theta omitted, the angle stored in the configuration is used.
    Agrees with the matrix pipeline to roundoff.
    """
    th, scalar = _as_theta_array(spec, theta)
    c2, s2 = _doubled_angle(th)
    a = spec.n * (spec.n + 2.0)
    if spec.variant == "lossless":
        det = 1.0 + a * c2 * c2
    elif spec.variant == "r1":
        k0, k1, k2 = _gen_loss_coeffs(spec.n, spec.t1, spec.t2)
        det = 1.0 + (k0 + k1 * c2 + k2 * c2 * c2) / 4.0
    else:
        d0 = _det_loss_floor(spec.n, spec.t, spec.n_th)
        det = 1.0 + d0 + spec.t * spec.t * a * c2 * c2
    sig = 1.0 / np.sqrt(det)
    return float(sig) if scalar else sig


def closed_form_sensitivity(spec: PipelineSpec, theta=None):
    """Analytic error-propagation sensitivity, vectorized over theta.

    Stationary points of the signal give inf, including 0/0 corners where
    the leading noise term vanishes together with the slope (the value is
    then direction-dependent and inf is the conservative report).  The
    dedicated lossless branch resolves its removable 0/0 at the half-signal
    angle analytically, where the sensitivity stays finite.
    """
    th, scalar = _as_theta_array(spec, theta)
    c2, s2 = _doubled_angle(th)
    a = spec.n * (spec.n + 2.0)
    if spec.variant == "lossless":
        num = 1.0 + a * c2 * c2
        den = 2.0 * math.sqrt(a) * np.abs(s2) if a > 0.0 else np.zeros_like(s2)
    elif spec.variant == "r1":
        k0, k1, k2 = _gen_loss_coeffs(spec.n, spec.t1, spec.t2)
        gm1 = np.maximum((k0 + k1 * c2 + k2 * c2 * c2) / 4.0, 0.0)
        num = 2.0 * np.sqrt(gm1) * (1.0 + gm1)
        den = np.abs(s2 * (k1 + 2.0 * k2 * c2)) / 2.0
    else:
        d0 = _det_loss_floor(spec.n, spec.t, spec.n_th)
        bm1 = d0 + spec.t * spec.t * a * c2 * c2
        num = np.sqrt(bm1) * (1.0 + bm1)
        den = 2.0 * spec.t * spec.t * a * np.abs(s2 * c2)
    den = np.asarray(den, dtype=np.float64)
    safe = np.where(den > 0.0, den, 1.0)
    out = np.where(den > 0.0, np.asarray(num, dtype=np.float64) / safe, np.inf)
    return float(out) if scalar else out


def qcrb_sensitivity(n: float) -> float:
    """Quantum bound 1 / (2 * sqrt(n * (n + 2))) for the lossless probe."""
    if n <= 0.0:
        raise ValueError(f"mean photon number must be > 0, got {n}")
    return 1.0 / (2.0 * math.sqrt(n * (n + 2.0)))
