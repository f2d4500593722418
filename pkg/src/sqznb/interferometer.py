"""Quantum strain noise of a Fabry-Perot Michelson with optional squeezed input.

Single-sided strain noise PSD for a tuned interferometer read out in the
phase quadrature:

    S_h(Omega) = h_sql(Omega)^2 / 2 * (1 + K^2) / K * V(theta_n)

where ``h_sql = sqrt(8 hbar / (M Omega^2 L^2))`` is the free-mass standard
quantum limit, K the optomechanical coupling strength

    K(Omega) = 16 P w0 g / (M L c Omega^2 (g^2 + Omega^2))

with P the circulating arm power, w0 the carrier angular frequency and g
the angular half-bandwidth of the arm cavities.  ``theta_n = atan2(1, -K)``
is the angle of the input-field quadrature combination that drives the
readout, and V(theta) is the variance of the injected field along that
angle.  Coherent vacuum input has V = 1 and recovers the familiar
shot/radiation-pressure budget ``(h_sql^2/2) (K + 1/K)``; squeezed input
replaces V with the loss- and jitter-degraded ellipse variance.

K falls monotonically with frequency: radiation pressure (K > 1) dominates
at low frequency, shot noise (K < 1) at high frequency, and the unsqueezed
noise touches the standard quantum limit where K = 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.constants import c, hbar

from .parallel import thread_count
from .states import LossChain, PhaseNoise, SqueezedState, apply_loss, apply_phase_noise, state_from_db

__all__ = [
    "ANGLE_POLICIES",
    "InterferometerConfig",
    "SqueezerSetup",
    "QuantumNoiseCurve",
    "NumericalRangeError",
    "sql_asd",
    "coupling_kappa",
    "quantum_noise_asd",
    "quantum_noise_curve",
]

ANGLE_POLICIES = ("none", "fixed", "fd-optimal")


class NumericalRangeError(ValueError):
    """A computed spectral value left the positive finite range."""

    def __init__(self, message: str, frequency: float | None = None):
        super().__init__(message)
        self.frequency = frequency


@dataclass(frozen=True)
class InterferometerConfig:
    """Physical parameters of the quantum noise model.

    Attributes
    ----------
    arm_length : float
        Unperturbed arm cavity length, meters.
    mirror_mass : float
        Mass of each test-mass mirror, kilograms.
    arm_power : float
        Light power circulating in each arm cavity, watts.
    cavity_pole : float
        Half-bandwidth of the arm cavity response, hertz.
    wavelength : float
        Carrier wavelength, meters.
    """

    arm_length: float
    mirror_mass: float
    arm_power: float
    cavity_pole: float
    wavelength: float = 1.064e-6
    label: str = ""

    def __post_init__(self):
        for name in ("arm_length", "mirror_mass", "arm_power", "cavity_pole", "wavelength"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @classmethod
    def from_finesse(
        cls,
        arm_length: float,
        mirror_mass: float,
        arm_power: float,
        finesse: float,
        wavelength: float = 1.064e-6,
        label: str = "",
    ) -> "InterferometerConfig":
        """Build a config with the cavity pole derived from the arm finesse.

        pole = c / (4 F L); equivalently the angular half-bandwidth is
        g = pi c / (2 F L).
        """
        if not (math.isfinite(finesse) and finesse > 0):
            raise ValueError(f"finesse must be positive and finite, got {finesse!r}")
        pole = c / (4.0 * finesse * arm_length)
        return cls(arm_length, mirror_mass, arm_power, pole, wavelength, label)

    @property
    def carrier_omega(self) -> float:
        """Angular frequency of the carrier light, rad/s."""
        return 2.0 * math.pi * c / self.wavelength

    @property
    def pole_omega(self) -> float:
        """Angular half-bandwidth of the arm cavities, rad/s."""
        return 2.0 * math.pi * self.cavity_pole


@dataclass(frozen=True)
class SqueezerSetup:
    """Injected squeezing plus everything that degrades it on the way out.

    ``angle_policy`` selects what is injected into the dark port:

    - ``"none"``: coherent vacuum (no squeezer),
    - ``"fixed"``: squeezed vacuum with the minor axis at ``fixed_angle``,
    - ``"fd-optimal"``: squeezed vacuum whose minor axis tracks the readout
      noise quadrature at every frequency (idealized rotation).
    """

    inject_db: float = 0.0
    chain: LossChain = LossChain()
    phase_noise: PhaseNoise = PhaseNoise(0.0)
    angle_policy: str = "none"
    fixed_angle: float = math.pi / 2

    def __post_init__(self):
        if not (math.isfinite(self.inject_db) and self.inject_db >= 0.0):
            raise ValueError(f"inject_db must be >= 0 and finite, got {self.inject_db!r}")
        if not isinstance(self.chain, LossChain):
            raise ValueError("chain must be a LossChain")
        if not isinstance(self.phase_noise, PhaseNoise):
            raise ValueError("phase_noise must be a PhaseNoise")
        policy = str(self.angle_policy).replace("_", "-")
        if policy not in ANGLE_POLICIES:
            raise ValueError(
                f"angle_policy must be one of {ANGLE_POLICIES}, got {self.angle_policy!r}"
            )
        object.__setattr__(self, "angle_policy", policy)
        if not (math.isfinite(self.fixed_angle) and 0.0 <= self.fixed_angle < math.pi):
            raise ValueError(f"fixed_angle must be in [0, pi), got {self.fixed_angle!r}")

    @property
    def efficiency(self) -> float:
        return self.chain.total

    def degraded_state(self) -> SqueezedState:
        """Squeezed state at the readout, after loss and phase jitter."""
        injected = state_from_db(self.inject_db, self.fixed_angle)
        return apply_phase_noise(apply_loss(injected, self.chain.total), self.phase_noise)


def _angular(frequency) -> np.ndarray:
    f = np.asarray(frequency, dtype=float)
    if f.size == 0:
        raise ValueError("frequency input is empty")
    if not np.all(np.isfinite(f)) or np.any(f <= 0.0):
        raise ValueError("frequencies must be positive and finite")
    return 2.0 * np.pi * f


def sql_asd(config: InterferometerConfig, frequency):
    """Free-mass standard-quantum-limit strain ASD, sqrt(8 hbar/(M Omega^2 L^2)).

    Scales as 1/f, 1/L and 1/sqrt(M).  Accepts a scalar or an array of
    frequencies in Hz.
    """
    omega = _angular(frequency)
    out = math.sqrt(8.0 * hbar / config.mirror_mass) / (config.arm_length * omega)
    return out.item() if np.ndim(frequency) == 0 else out


def coupling_kappa(config: InterferometerConfig, frequency):
    """Optomechanical coupling strength K at the given frequency.

    K = 16 P w0 g / (M L c Omega^2 (g^2 + Omega^2)); dimensionless, linear
    in the arm power and strictly decreasing in frequency.
    """
    omega = _angular(frequency)
    g = config.pole_omega
    numerator = 16.0 * config.arm_power * config.carrier_omega * g
    out = numerator / (config.mirror_mass * config.arm_length * c * omega**2 * (g * g + omega**2))
    return out.item() if np.ndim(frequency) == 0 else out


def quantum_noise_asd(config: InterferometerConfig, setup: SqueezerSetup, frequency):
    """Strain-equivalent quantum noise ASD with the configured input field.

    With ``angle_policy == "none"`` this is the coherent-vacuum budget
    sqrt(h_sql^2/2 (K + 1/K)); squeezed policies scale the underlying PSD
    by the ellipse variance projected on the readout noise quadrature.
    """
    kappa = np.asarray(coupling_kappa(config, frequency))
    h_sql = np.asarray(sql_asd(config, frequency))
    vacuum_psd = 0.5 * h_sql**2 * (1.0 + kappa**2) / kappa

    if setup.angle_policy == "none":
        variance = 1.0
    else:
        state = setup.degraded_state()
        if setup.angle_policy == "fd-optimal":
            # minor axis tracks the noise quadrature: projection is v_minus
            variance = state.v_minus
        else:
            relative = np.arctan2(1.0, -kappa) - state.angle
            s2 = np.sin(relative) ** 2
            variance = state.v_minus * (1.0 - s2) + state.v_plus * s2

    out = np.sqrt(vacuum_psd * variance)
    return out.item() if np.ndim(frequency) == 0 else out


@dataclass(frozen=True, eq=False)
class QuantumNoiseCurve:
    """Quantum noise ASD sampled on a frequency grid, with its provenance."""

    frequencies: np.ndarray
    asd: np.ndarray
    config: InterferometerConfig
    setup: SqueezerSetup

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        a = np.asarray(self.asd, dtype=float)
        if f.ndim != 1 or a.shape != f.shape:
            raise ValueError("frequencies and asd must be matching 1-d arrays")
        if f.size == 0:
            raise ValueError("frequency grid is empty")
        if not np.all(np.isfinite(f)) or np.any(f <= 0.0):
            raise ValueError("frequencies must be positive and finite")
        if np.any(np.diff(f) <= 0.0):
            raise ValueError("frequencies must be strictly increasing")
        bad = ~(np.isfinite(a) & (a > 0.0))
        if bad.any():
            f_bad = float(f[int(np.argmax(bad))])
            raise NumericalRangeError(
                f"quantum noise ASD is not a positive finite number at {f_bad} Hz",
                frequency=f_bad,
            )
        for name, arr in (("frequencies", f), ("asd", a)):
            frozen = arr.copy()
            frozen.flags.writeable = False
            object.__setattr__(self, name, frozen)

    def __len__(self):
        return self.frequencies.size


def quantum_noise_curve(
    config: InterferometerConfig, setup: SqueezerSetup, frequencies
) -> QuantumNoiseCurve:
    """Evaluate the quantum noise ASD over a grid of frequencies.

    The grid may be split into chunks evaluated across up to
    ``SQZNB_THREADS`` workers; the evaluation is point-wise, so the result
    is bit-identical to sequential evaluation regardless of worker count.
    """
    f = np.asarray(frequencies, dtype=float)
    if f.ndim != 1:
        raise ValueError("frequency grid must be 1-d")
    workers = thread_count()
    if workers > 1 and f.size >= 2 * workers:
        bounds = np.linspace(0, f.size, workers + 1).astype(int)
        chunks = [f[bounds[i]:bounds[i + 1]] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda chunk: quantum_noise_asd(config, setup, chunk), chunks))
        asd = np.concatenate(parts)
    else:
        asd = np.asarray(quantum_noise_asd(config, setup, f))
    return QuantumNoiseCurve(f, asd, config, setup)
