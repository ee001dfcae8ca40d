"""
Phase shifts, rotations and generator statistics.

Two phase encodings are supported:

* ``SINGLE_ARM``: ``U_1 = exp(-i a^dag a phi) = exp(-i (N/2 + J_z) phi)``
* ``BALANCED``:   ``U_2 = exp(-i J_z phi)``

On a fixed-photon-number sector they differ by the global phase ``exp(-i j phi)``.
Derivatives with respect to ``phi`` are exact; the second derivative is kept
because Fisher information at zeros of a probability is a 0/0 limit that needs
it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError
from .states import PhotonSectorEnsemble, SectorState, TwoModePureState
from .wigner import EulerAngles, HalfInt, d_matrix

__all__ = [
    "PhaseConfig",
    "EvolvedState",
    "GeneratorMoments",
    "generator_eigenvalues",
    "apply_phase",
    "apply_rotation",
    "rotate_amplitudes",
    "generator_moments",
]


class PhaseConfig(enum.Enum):
    SINGLE_ARM = "single"
    BALANCED = "balanced"


def generator_eigenvalues(j: HalfInt, config: PhaseConfig) -> np.ndarray:
    """Eigenvalues of the phase generator on ``|j, m>``, ``m`` descending.

    ``m`` for the balanced encoding and ``j + m = n_a`` for the single-arm one.
    """
    tj = HalfInt.of(j).twice
    twice_m = tj - 2 * np.arange(tj + 1)
    if config is PhaseConfig.BALANCED:
        return twice_m / 2
    if config is PhaseConfig.SINGLE_ARM:
        return (tj + twice_m) / 2
    raise DomainError(f"unknown phase configuration {config!r}")


@dataclass(frozen=True)
class EvolvedState:
    """``U(phi)|psi>`` together with its first and second ``phi``-derivatives."""

    state: SectorState
    derivative: np.ndarray = field(repr=False)
    phi: float
    config: PhaseConfig
    second_derivative: np.ndarray = field(repr=False, default=None)


def apply_phase(state: SectorState, phi: float, config: PhaseConfig) -> EvolvedState:
    g = generator_eigenvalues(state.j, config)
    evolved = np.exp(-1j * g * phi) * state.amps
    first = -1j * g * evolved
    second = -(g * g) * evolved
    return EvolvedState(SectorState(state.j, evolved), first, float(phi), config, second)


def rotate_amplitudes(j: HalfInt, amps: np.ndarray, angles: EulerAngles) -> np.ndarray:
    """``C~_mu = sum_m D^j_{mu,m}(angles) C_m`` on a raw amplitude array."""
    D = d_matrix(j, angles).entries
    return D @ np.asarray(amps, dtype=complex)


def apply_rotation(
    state: Union[SectorState, EvolvedState], angles: EulerAngles
) -> Union[SectorState, EvolvedState]:
    """Rotate a sector state. For an :class:`EvolvedState` the derivatives are
    rotated with the same (phase-independent) matrix."""
    if isinstance(state, EvolvedState):
        j = state.state.j
        D = d_matrix(j, angles).entries
        second = None if state.second_derivative is None else D @ state.second_derivative
        return EvolvedState(
            SectorState(j, D @ state.state.amps),
            D @ state.derivative,
            state.phi,
            state.config,
            second,
        )
    return SectorState(state.j, rotate_amplitudes(state.j, state.amps, angles))


class GeneratorMoments(NamedTuple):
    mean: float
    variance: float
    mean_N: float
    var_N: float
    cov_N_Jz: float


def _populations(state) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flat arrays ``(n_a, n_b, probability)`` for any supported state type."""
    if isinstance(state, SectorState):
        n = state.n_photons
        r = np.arange(n + 1)
        return n - r, r, np.abs(state.amps) ** 2
    if isinstance(state, TwoModePureState):
        keys = np.array(list(state.amps.keys()), dtype=float).reshape(-1, 2)
        probs = np.abs(np.array(list(state.amps.values()))) ** 2
        return keys[:, 0], keys[:, 1], probs
    if isinstance(state, PhotonSectorEnsemble):
        parts = [_populations(b.state) for b in state.blocks]
        weights = [b.weight for b in state.blocks]
        return (
            np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]),
            np.concatenate([w * p[2] for w, p in zip(weights, parts)]),
        )
    raise TypeError(f"unsupported state type {type(state).__name__}")


def generator_moments(state, config: PhaseConfig) -> GeneratorMoments:
    """Mean and variance of the phase generator plus photon-number statistics.

    Works for sector states, two-mode pure states and sector ensembles; the
    generator is diagonal in the Fock basis so only populations matter. Moments
    are normalized by the total population, so truncated inputs are treated as
    conditional on the retained part.
    """
    n_a, n_b, prob = _populations(state)
    prob = prob / prob.sum()
    n_tot = n_a + n_b
    jz = (n_a - n_b) / 2
    g = jz if config is PhaseConfig.BALANCED else n_tot / 2 + jz

    def mean(x):
        return float(np.dot(prob, x))

    def cov(x, y):
        return mean((x - mean(x)) * (y - mean(y)))

    return GeneratorMoments(
        mean=mean(g),
        variance=cov(g, g),
        mean_N=mean(n_tot),
        var_N=cov(n_tot, n_tot),
        cov_N_Jz=cov(n_tot, jz),
    )
