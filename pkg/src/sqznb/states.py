"""Quadrature-variance algebra for squeezed vacuum states.

Variances are normalized so the vacuum state has unit variance in every
quadrature.  A squeezing level of ``s`` dB means the squeezed-quadrature
variance is ``10**(-s/10)``; power decibels are used throughout, never
amplitude decibels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SqueezedState",
    "PhaseNoise",
    "LossChain",
    "PropagationResult",
    "state_from_db",
    "apply_loss",
    "apply_phase_noise",
    "detected_db",
    "propagate",
]

# Tolerance on the uncertainty product; pure states sit exactly on the bound
# and float rounding must not reject them.
HEISENBERG_RTOL = 1e-12

# Beyond pi/4 of RMS jitter the quadrature labels would effectively swap and
# the small-angle mixing model stops making sense.
MAX_PHASE_RMS = math.pi / 4


@dataclass(frozen=True)
class SqueezedState:
    """Gaussian state summarized by its two quadrature variances.

    Attributes
    ----------
    v_plus : float
        Variance of the elongated (antisqueezed) quadrature, vacuum = 1.
    v_minus : float
        Variance of the squeezed quadrature, vacuum = 1.
    angle : float
        Orientation of the minor (squeezed) axis relative to the measured
        in-phase quadrature, radians.  Carried along unchanged by loss and
        phase-jitter maps; consumed by the interferometer projection.
    """

    v_plus: float
    v_minus: float
    angle: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.v_plus) and self.v_plus > 0.0):
            raise ValueError(f"v_plus must be positive and finite, got {self.v_plus!r}")
        if not (math.isfinite(self.v_minus) and self.v_minus > 0.0):
            raise ValueError(f"v_minus must be positive and finite, got {self.v_minus!r}")
        if self.v_plus < self.v_minus:
            raise ValueError(
                "variance labels are swapped: "
                f"v_plus={self.v_plus!r} < v_minus={self.v_minus!r}"
            )
        product = self.v_plus * self.v_minus
        if product < 1.0 - HEISENBERG_RTOL:
            raise ValueError(
                f"unphysical state: v_plus*v_minus = {product!r} is below the Heisenberg bound"
            )
        if not math.isfinite(self.angle):
            raise ValueError(f"angle must be finite, got {self.angle!r}")

    @property
    def uncertainty_product(self) -> float:
        return self.v_plus * self.v_minus


#: Coherent vacuum: unit variance in every quadrature.
VACUUM = SqueezedState(1.0, 1.0)


@dataclass(frozen=True)
class PhaseNoise:
    """RMS of the phase between the squeezed field and the readout field.

    ``theta_rms`` is in radians and must stay in the small-angle regime
    (below pi/4); larger jitter is rejected rather than modeled wrongly.
    """

    theta_rms: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta_rms) and self.theta_rms >= 0.0):
            raise ValueError(f"theta_rms must be >= 0 and finite, got {self.theta_rms!r}")
        if self.theta_rms >= MAX_PHASE_RMS:
            raise ValueError(
                f"theta_rms = {self.theta_rms!r} rad is outside the small-angle regime (< pi/4)"
            )


@dataclass(frozen=True)
class LossChain:
    """Ordered, named power-transmission efficiencies from source to detector.

    Each element is a ``(label, efficiency)`` pair with efficiency in
    (0, 1]; the chain composes multiplicatively.
    """

    elements: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        normalized = tuple((str(label), float(eff)) for label, eff in self.elements)
        for label, eff in normalized:
            if not (math.isfinite(eff) and 0.0 < eff <= 1.0):
                raise ValueError(
                    f"efficiency for {label!r} must be in (0, 1], got {eff!r}"
                )
        object.__setattr__(self, "elements", normalized)

    @classmethod
    def from_total(cls, efficiency: float, label: str = "total") -> "LossChain":
        return cls(((label, efficiency),))

    @property
    def total(self) -> float:
        """Product of the element efficiencies; 1.0 for an empty chain."""
        return math.prod(eff for _, eff in self.elements)

    def __iter__(self):
        return iter(self.elements)


def state_from_db(squeeze_db: float, angle: float = 0.0) -> SqueezedState:
    """Pure squeezed state with the given squeezing level in dB.

    ``v_minus = 10**(-squeeze_db/10)`` and ``v_plus = 1/v_minus``, so the
    uncertainty product is exactly 1 up to rounding; 0 dB gives vacuum.
    """
    squeeze_db = float(squeeze_db)
    if not (math.isfinite(squeeze_db) and squeeze_db >= 0.0):
        raise ValueError(f"squeeze_db must be >= 0 and finite, got {squeeze_db!r}")
    return SqueezedState(10.0 ** (squeeze_db / 10.0), 10.0 ** (-squeeze_db / 10.0), angle)


def apply_loss(state: SqueezedState, efficiency: float) -> SqueezedState:
    """Mix the state with vacuum: each variance maps to eta*v + (1 - eta).

    ``efficiency`` is the surviving power fraction in [0, 1]; 1 leaves the
    state unchanged and 0 replaces it with vacuum.  The squeeze angle is
    unaffected (loss is quadrature-symmetric).
    """
    eta = float(efficiency)
    if not (math.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency!r}")
    return SqueezedState(
        eta * state.v_plus + (1.0 - eta),
        eta * state.v_minus + (1.0 - eta),
        state.angle,
    )


def apply_phase_noise(
    state: SqueezedState,
    noise: PhaseNoise | float,
    *,
    exact_gaussian: bool = False,
) -> SqueezedState:
    """Average the variances over jitter of the measured quadrature angle.

    Each output variance is a convex mix of the two inputs,
    ``v_out = v * (1 - s2) + v_orth * s2``.  By default the RMS angle is
    substituted directly, ``s2 = sin(theta_rms)**2``; with
    ``exact_gaussian`` the mixing weight is the exact average over a
    centered normal distribution of the angle,
    ``s2 = (1 - exp(-2*theta_rms**2)) / 2``.  The two agree to fourth
    order in the jitter.  The mix preserves v_plus + v_minus.
    """
    if not isinstance(noise, PhaseNoise):
        noise = PhaseNoise(float(noise))
    if exact_gaussian:
        s2 = 0.5 * (1.0 - math.exp(-2.0 * noise.theta_rms**2))
    else:
        s2 = math.sin(noise.theta_rms) ** 2
    c2 = 1.0 - s2
    return SqueezedState(
        c2 * state.v_plus + s2 * state.v_minus,
        c2 * state.v_minus + s2 * state.v_plus,
        state.angle,
    )


def detected_db(state: SqueezedState) -> float:
    """Squeezing level of the measured quadrature in dB below vacuum.

    Positive means noise below vacuum; a state whose measured quadrature is
    noisier than vacuum comes out negative.
    """
    # "+ 0.0" folds the -0.0 produced by vacuum into a plain 0.0
    return -10.0 * math.log10(state.v_minus) + 0.0


@dataclass(frozen=True)
class PropagationResult:
    """Forward degradation chain with its intermediate states."""

    injected: SqueezedState
    efficiency: float
    after_loss: SqueezedState
    state: SqueezedState
    detected_db: float


def propagate(
    inject_db: float,
    losses: LossChain | float,
    phase_noise: PhaseNoise | float | None = None,
    *,
    angle: float = 0.0,
    exact_gaussian: bool = False,
) -> PropagationResult:
    """Run the full chain: construct from dB, attenuate, jitter, read out.

    Parameters
    ----------
    inject_db : float
        Squeezing level of the pure state entering the chain.
    losses : LossChain or float
        Either a named loss chain or a bare total efficiency in [0, 1].
    phase_noise : PhaseNoise or float, optional
        RMS quadrature-angle jitter; None means no jitter.
    """
    eta = losses.total if isinstance(losses, LossChain) else float(losses)
    if phase_noise is None:
        noise = PhaseNoise(0.0)
    elif isinstance(phase_noise, PhaseNoise):
        noise = phase_noise
    else:
        noise = PhaseNoise(float(phase_noise))
    injected = state_from_db(inject_db, angle)
    after_loss = apply_loss(injected, eta)
    final = apply_phase_noise(after_loss, noise, exact_gaussian=exact_gaussian)
    return PropagationResult(injected, eta, after_loss, final, detected_db(final))
