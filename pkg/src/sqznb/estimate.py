"""Inverse problems on the squeezing chain.

Fits the detection efficiency behind a measured squeezing level, propagates
measurement uncertainties to the detected level by Monte Carlo, and finds
the injection level that maximizes detected squeezing under phase jitter.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .parallel import thread_count
from .states import MAX_PHASE_RMS, PhaseNoise, propagate

__all__ = [
    "MeasurementWithUncertainty",
    "FitResult",
    "McUncertaintyResult",
    "OptimalInjection",
    "InfeasibleTargetError",
    "NoFiniteOptimumError",
    "fit_efficiency",
    "mc_uncertainty",
    "optimal_inject_db",
]

#: Monte Carlo draws happen in fixed blocks of this many samples, each block
#: from its own counter-based substream, so results are independent of the
#: worker count.
MC_BLOCK = 65536

_THETA_MAX = float(np.nextafter(MAX_PHASE_RMS, 0.0))
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class InfeasibleTargetError(ValueError):
    """The requested measurement cannot be produced by any efficiency."""


class NoFiniteOptimumError(ValueError):
    """The objective is monotone; no finite optimum exists."""


@dataclass(frozen=True)
class MeasurementWithUncertainty:
    """A value with a one-standard-deviation uncertainty in the same units."""

    value: float
    sigma: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"value must be finite, got {self.value!r}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError(f"sigma must be >= 0 and finite, got {self.sigma!r}")


@dataclass(frozen=True)
class FitResult:
    """Root-finding outcome: estimate, residual, and the final bracket."""

    estimate: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def fit_efficiency(
    inject_db: float,
    detected_db: float,
    phase_noise: PhaseNoise | float | None = None,
    *,
    tol_db: float = 1e-10,
    max_iterations: int = 200,
) -> FitResult:
    """Detection efficiency that reproduces a measured squeezing level.

    Inverts the forward degradation chain by bisection on [0, 1]; the
    detected level is monotone in the efficiency, so the root is unique.
    Raises InfeasibleTargetError (stating the attainable range) when no
    efficiency can produce the requested level at this phase noise.
    """
    inject_db = float(inject_db)
    target = float(detected_db)
    if not (math.isfinite(target) and target >= 0.0):
        raise ValueError(f"detected level must be >= 0 dB, got {detected_db!r}")
    if target > inject_db:
        raise ValueError(
            f"detected level {target} dB exceeds the injected level {inject_db} dB"
        )

    def forward(eta: float) -> float:
        return propagate(inject_db, eta, phase_noise).detected_db

    if inject_db == 0.0:
        # vacuum in, vacuum out: every efficiency reproduces 0 dB
        return FitResult(1.0, abs(forward(1.0) - target), 0, (0.0, 1.0))
    if target == 0.0:
        # forward(0) is exactly 0 dB and the chain is strictly monotone
        return FitResult(0.0, 0.0, 0, (0.0, 1.0))

    top = forward(1.0)
    lo_att, hi_att = min(0.0, top), max(0.0, top)
    if not (lo_att - tol_db <= target <= hi_att + tol_db):
        raise InfeasibleTargetError(
            f"detected level {target} dB is unattainable at this phase noise; "
            f"the attainable range is [{lo_att:.6g}, {hi_att:.6g}] dB"
        )

    lo, hi = 0.0, 1.0
    g_lo = -target  # forward(0) - target
    iterations = 0
    while iterations < max_iterations:
        mid = 0.5 * (lo + hi)
        g_mid = forward(mid) - target
        iterations += 1
        if g_mid == 0.0:
            lo = hi = mid
            break
        if (g_mid < 0.0) == (g_lo < 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            break
    estimate = 0.5 * (lo + hi)
    return FitResult(estimate, abs(forward(estimate) - target), iterations, (lo, hi))


@dataclass(frozen=True)
class McUncertaintyResult:
    """Monte Carlo uncertainty propagation summary.

    ``clamped`` counts draws per input that fell outside the physical
    domain and were moved to its edge; ``first_order_sigma_db`` is the
    linearized (derivative-based) sigma reported alongside for comparison.
    """

    mean_db: float
    sigma_db: float
    first_order_sigma_db: float
    clamped: dict[str, int]
    samples: int
    seed: int


def _detected_db_array(inject_db, efficiency, theta):
    """Vectorized forward chain; mirrors states.propagate on arrays."""
    v_minus = 10.0 ** (-np.asarray(inject_db) / 10.0)
    v_plus = 10.0 ** (np.asarray(inject_db) / 10.0)
    eta = np.asarray(efficiency)
    s2 = np.sin(np.asarray(theta)) ** 2
    lossy_minus = eta * v_minus + (1.0 - eta)
    lossy_plus = eta * v_plus + (1.0 - eta)
    mixed = lossy_minus * (1.0 - s2) + lossy_plus * s2
    return -10.0 * np.log10(mixed)


def _standard_normal_blocks(samples: int, seed: int, workers: int) -> np.ndarray:
    """(3, samples) standard normals in fixed Philox blocks.

    Block ``b`` draws from ``Philox(seed)`` jumped ``b`` times (a jump
    advances the counter by 2**128), so the stream layout depends only on
    (samples, seed) and blocks can be computed by any number of workers.
    """
    n_blocks = (samples + MC_BLOCK - 1) // MC_BLOCK

    def draw(block: int) -> np.ndarray:
        n = min(MC_BLOCK, samples - block * MC_BLOCK)
        gen = np.random.Generator(np.random.Philox(seed).jumped(block))
        return gen.standard_normal((3, n))

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(draw, range(n_blocks)))
    else:
        parts = [draw(b) for b in range(n_blocks)]
    return np.concatenate(parts, axis=1)


def _first_order_sigma(
    inject_db: MeasurementWithUncertainty,
    efficiency: MeasurementWithUncertainty,
    phase_rms: MeasurementWithUncertainty,
) -> float:
    """Quadrature sum of sigma * d(detected dB)/d(input), by central differences."""

    def forward(s, e, t):
        return float(_detected_db_array(s, e, t))

    center = [inject_db.value, efficiency.value, phase_rms.value]
    bounds = [(0.0, math.inf), (0.0, 1.0), (0.0, _THETA_MAX)]
    sigmas = [inject_db.sigma, efficiency.sigma, phase_rms.sigma]
    total = 0.0
    for i, (sigma, (lo, hi)) in enumerate(zip(sigmas, bounds)):
        if sigma == 0.0:
            continue
        h = 1e-6 * max(1.0, abs(center[i]))
        a = max(lo, center[i] - h)
        b = min(hi, center[i] + h)
        up, down = list(center), list(center)
        up[i], down[i] = b, a
        slope = (forward(*up) - forward(*down)) / (b - a)
        total += (slope * sigma) ** 2
    return math.sqrt(total)


def mc_uncertainty(
    inject_db: MeasurementWithUncertainty,
    efficiency: MeasurementWithUncertainty,
    phase_rms: MeasurementWithUncertainty,
    samples: int = 100_000,
    seed: int = 42,
    workers: int | None = None,
) -> McUncertaintyResult:
    """Propagate input uncertainties to the detected squeezing level.

    Draws independent Gaussians per input (Philox counter-based generator,
    reproducible for a fixed seed and independent of the worker count),
    pushes each draw through the forward chain, and reports the sample mean
    and standard deviation of the detected dB.  Draws outside the physical
    domain (negative injection, efficiency outside [0, 1], jitter outside
    [0, pi/4)) are clamped to the domain edge and counted.
    """
    samples = int(samples)
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples for a meaningful spread, got {samples}")
    # the central values themselves must be valid inputs
    propagate(inject_db.value, efficiency.value, PhaseNoise(phase_rms.value))
    if workers is None:
        workers = thread_count()

    z = _standard_normal_blocks(samples, int(seed), workers)
    raw_inject = inject_db.value + inject_db.sigma * z[0]
    raw_eff = efficiency.value + efficiency.sigma * z[1]
    raw_theta = phase_rms.value + phase_rms.sigma * z[2]
    inj = np.clip(raw_inject, 0.0, None)
    eff = np.clip(raw_eff, 0.0, 1.0)
    theta = np.clip(raw_theta, 0.0, _THETA_MAX)
    clamped = {
        "inject_db": int(np.count_nonzero(raw_inject != inj)),
        "efficiency": int(np.count_nonzero(raw_eff != eff)),
        "phase_rms": int(np.count_nonzero(raw_theta != theta)),
    }

    detected = _detected_db_array(inj, eff, theta)
    return McUncertaintyResult(
        mean_db=float(np.mean(detected)),
        sigma_db=float(np.std(detected, ddof=1)),
        first_order_sigma_db=_first_order_sigma(inject_db, efficiency, phase_rms),
        clamped=clamped,
        samples=samples,
        seed=int(seed),
    )


@dataclass(frozen=True)
class OptimalInjection:
    """Best injection level and the squeezing detected there."""

    inject_db: float
    detected_db: float
    iterations: int


def optimal_inject_db(
    efficiency: float,
    phase_noise: PhaseNoise | float,
    *,
    max_db: float = 60.0,
    tol_db: float = 1e-6,
) -> OptimalInjection:
    """Injection level in [0, max_db] that maximizes the detected squeezing.

    Stronger injection narrows the squeezed quadrature but inflates the
    orthogonal one, which phase jitter folds back into the measurement; the
    trade-off peaks at a finite level.  For a lossless chain the optimum
    satisfies exp(2 r) = cot(theta_rms), where the level is 10 log10(e) * 2r
    dB.  Solved by golden-section search (the detected level is unimodal in
    the injection).  Zero jitter has no finite optimum and raises
    NoFiniteOptimumError.
    """
    noise = phase_noise if isinstance(phase_noise, PhaseNoise) else PhaseNoise(float(phase_noise))
    if noise.theta_rms == 0.0:
        raise NoFiniteOptimumError(
            "detected squeezing grows monotonically with the injected level when "
            "phase jitter is zero; there is no finite optimum"
        )
    eta = float(efficiency)
    if not (math.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency!r}")

    def forward(level: float) -> float:
        return propagate(level, eta, noise).detected_db

    lo, hi = 0.0, float(max_db)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = forward(x1), forward(x2)
    iterations = 2
    while hi - lo > tol_db:
        if f1 > f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = forward(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = forward(x2)
        iterations += 1
    best = 0.5 * (lo + hi)
    return OptimalInjection(best, forward(best), iterations)
