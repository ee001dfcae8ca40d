"""
Measurement statistics and Fisher information.

The interferometer is: probe -> phase shift ``U(phi)`` -> beam splitter
``B_2 = R_y(pi/2)`` -> detection. Two detections are modelled:

* double photon counting (DPC): projection onto ``|n_a, n_b>`` at both outputs,
  with outcome ``(n_a, n_b) = (j + mu, j - mu)`` for output amplitude ``C~_mu``;
* single-port parity ``(-1)^{n}`` on one output port.

Probability derivatives are analytic. At a zero of a probability the CFI term
``dp^2/p`` is a removable 0/0 whose limit is ``2 p''``; distributions carry ``p''``
so that limit is taken exactly instead of being dropped.

Parity port
-----------
With ``B_2 = exp(-i pi/2 J_y)`` and ``U_1 = exp(-i a^dag a phi)``, a NOON state
gives ``<(-1)^{n_a}> = cos(N phi)`` and ``<(-1)^{n_b}> = (-1)^N cos(N phi)``. The
default port is therefore ``"a"``, the one for which entangled coherent probes
reach the QFI as ``phi -> 0``. The NOON parity CFI is the same on either port.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .dynamics import PhaseConfig, apply_phase, apply_rotation, generator_eigenvalues
from .dynamics import generator_moments
from .errors import DomainError, NumericalIntegrityError
from .states import (
    PhotonSectorEnsemble,
    SectorState,
    TwoModePureState,
    ec_coefficients,
    ec_norm_sq,
    phase_average,
)
from .wigner import EulerAngles

__all__ = [
    "PHI_GRID",
    "BEAM_SPLITTER",
    "MeasurementKind",
    "OutcomeDistribution",
    "FisherReport",
    "ParityExpectation",
    "as_ensemble",
    "dpc_distribution",
    "cfi_from_distribution",
    "parity_expectation",
    "cfi_parity",
    "qfi_pure",
    "qfi_from_amplitudes",
    "qfi_ensemble",
    "h_joo",
    "h_ec",
    "ec_parity_expectation_closed_form",
    "ec_parity_cfi_closed_form",
]

PHI_GRID = (1e-4, 0.1, 0.3, 0.5, 0.7, 1.0, np.pi / 2, 2.0, 3.0)
BEAM_SPLITTER = EulerAngles.ry(np.pi / 2)

# probabilities at or below this are treated as exact zeros of p(phi)
ZERO_PROBABILITY = 1e-24
# a zero of a non-negative function must have a vanishing derivative
_ZERO_SLOPE_LIMIT = 1e-8
# 1 - <Pi>^2 below this switches parity CFI to its limiting form
PARITY_SINGULAR = 1e-10

Probe = Union[PhotonSectorEnsemble, SectorState, TwoModePureState]


class MeasurementKind(enum.Enum):
    CFI_DPC = "cfi_dpc"
    CFI_PARITY = "cfi_parity"
    QFI = "qfi"


@dataclass(frozen=True)
class OutcomeDistribution:
    """Outcome probabilities ``p(n_a, n_b | phi)`` with first and second derivatives."""

    n_a: np.ndarray = field(repr=False)
    n_b: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    dp: np.ndarray = field(repr=False)
    phi: float
    config: PhaseConfig
    d2p: Optional[np.ndarray] = field(default=None, repr=False)
    truncation_residual: float = 0.0

    @property
    def entries(self) -> list[tuple[int, int, float, float]]:
        return [
            (int(a), int(b), float(p), float(d))
            for a, b, p, d in zip(self.n_a, self.n_b, self.p, self.dp)
        ]

    def probability(self, n_a: int, n_b: int) -> float:
        hit = (self.n_a == n_a) & (self.n_b == n_b)
        return float(self.p[hit].sum())

    def total(self) -> float:
        return float(self.p.sum())


@dataclass(frozen=True)
class FisherReport:
    value: float
    kind: MeasurementKind
    phi: Optional[float]
    truncation_residual: float
    config: PhaseConfig

    def __float__(self) -> float:
        return self.value


def as_ensemble(probe: Probe) -> PhotonSectorEnsemble:
    """Photon-number-diagonal view of a probe.

    Phase shifts, beam splitters and photon counting all conserve total photon
    number, so a pure superposition across sectors yields the same statistics
    as its phase average.
    """
    if isinstance(probe, PhotonSectorEnsemble):
        return probe
    if isinstance(probe, SectorState):
        return PhotonSectorEnsemble.pure(probe)
    if isinstance(probe, TwoModePureState):
        return phase_average(probe)
    raise TypeError(f"unsupported probe type {type(probe).__name__}")


def dpc_distribution(probe: Probe, phi: float, config: PhaseConfig) -> OutcomeDistribution:
    """Photon-counting distribution after ``U(phi)`` and ``B_2``.

    Examples
    --------
    >>> from wigmetro.states import noon
    >>> dist = dpc_distribution(noon(1), 0.0, PhaseConfig.SINGLE_ARM)
    >>> round(dist.probability(0, 1), 12), round(dist.probability(1, 0), 12)
    (1.0, 0.0)
    """
    ens = as_ensemble(probe)
    cols = {"n_a": [], "n_b": [], "p": [], "dp": [], "d2p": []}
    for block in ens.blocks:
        out = apply_rotation(apply_phase(block.state, phi, config), BEAM_SPLITTER)
        amp = out.state.amps
        d1, d2 = out.derivative, out.second_derivative
        w = block.weight
        r = np.arange(block.n + 1)
        cols["n_a"].append(block.n - r)
        cols["n_b"].append(r)
        cols["p"].append(w * np.abs(amp) ** 2)
        cols["dp"].append(2.0 * w * np.real(np.conj(amp) * d1))
        cols["d2p"].append(2.0 * w * (np.real(np.conj(amp) * d2) + np.abs(d1) ** 2))
    arrays = {k: np.concatenate(v) for k, v in cols.items()}
    return OutcomeDistribution(
        n_a=arrays["n_a"],
        n_b=arrays["n_b"],
        p=arrays["p"],
        dp=arrays["dp"],
        d2p=arrays["d2p"],
        phi=float(phi),
        config=config,
        truncation_residual=ens.truncation_residual,
    )


def cfi_from_distribution(dist: OutcomeDistribution) -> FisherReport:
    """``F = sum dp^2 / p`` with exact handling of zeros of ``p``.

    For ``p <= 1e-24`` the term is replaced by its limit ``2 p''`` (zero when no
    curvature is available). Such an entry with ``|dp| > 1e-8`` cannot come from
    a non-negative smooth ``p`` and raises :class:`NumericalIntegrityError`.
    """
    p, dp = np.asarray(dist.p, float), np.asarray(dist.dp, float)
    if np.any(p < -1e-14):
        raise NumericalIntegrityError(f"negative probability {p.min()!r}")
    zero = p <= ZERO_PROBABILITY
    bad = zero & (np.abs(dp) > _ZERO_SLOPE_LIMIT)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NumericalIntegrityError(
            f"outcome ({dist.n_a[i]}, {dist.n_b[i]}) has p={p[i]!r} but dp={dp[i]!r}"
        )
    terms = np.zeros_like(p)
    live = ~zero
    terms[live] = dp[live] ** 2 / p[live]
    if dist.d2p is not None:
        terms[zero] = np.maximum(2.0 * np.asarray(dist.d2p, float)[zero], 0.0)
    return FisherReport(
        value=float(math.fsum(terms)),
        kind=MeasurementKind.CFI_DPC,
        phi=dist.phi,
        truncation_residual=dist.truncation_residual,
        config=dist.config,
    )


class ParityExpectation(NamedTuple):
    value: float
    derivative: float


def _port_signs(dist: OutcomeDistribution, port: str) -> np.ndarray:
    if port == "a":
        counts = dist.n_a
    elif port == "b":
        counts = dist.n_b
    else:
        raise DomainError(f"parity port must be 'a' or 'b', got {port!r}")
    return np.where(np.asarray(counts) % 2 == 0, 1.0, -1.0)


def _parity_stats(probe: Probe, phi: float, config: PhaseConfig, port: str):
    dist = dpc_distribution(probe, phi, config)
    s = _port_signs(dist, port)
    even = math.fsum(dist.p[s > 0])
    odd = math.fsum(dist.p[s < 0])
    return (
        dist,
        even,
        odd,
        math.fsum(s * dist.dp),
        math.fsum(s * dist.d2p),
    )


def parity_expectation(
    probe: Probe, phi: float, config: PhaseConfig, port: str = "a"
) -> ParityExpectation:
    """``<(-1)^n>`` on one output port and its ``phi``-derivative.

    Computed from the photon-counting distribution; excluded tail mass (if any)
    contributes nothing.
    """
    _, even, odd, d1, _ = _parity_stats(probe, phi, config, port)
    return ParityExpectation(even - odd, d1)


def cfi_parity(
    probe: Probe, phi: float, config: PhaseConfig, port: str = "a"
) -> FisherReport:
    """Parity CFI ``(d<Pi>)^2 / (1 - <Pi>^2)``.

    ``1 - <Pi>^2`` is evaluated as ``(2 P_odd + r)(2 P_even + r)`` (``r`` the
    truncation residual), which avoids cancellation near ``<Pi> = +-1``. Where it
    drops below ``1e-10`` the ratio is replaced by its limit ``-<Pi>''/<Pi>``, the
    quotient of the leading Taylor terms about the extremum.
    """
    dist, even, odd, d1, d2 = _parity_stats(probe, phi, config, port)
    r = dist.truncation_residual
    value = even - odd
    if value * value > 1.0 + 1e-12:
        raise NumericalIntegrityError(f"parity expectation {value!r} outside [-1, 1]")
    denom = (2.0 * odd + r) * (2.0 * even + r)
    if denom < PARITY_SINGULAR:
        fisher = max(-d2 / value, 0.0) if value != 0.0 else 0.0
    else:
        fisher = d1 * d1 / denom
    return FisherReport(fisher, MeasurementKind.CFI_PARITY, float(phi), r, config)


def qfi_from_amplitudes(amps: np.ndarray, damps: np.ndarray) -> float:
    """``4 (<d psi|d psi> - |<psi|d psi>|^2)`` for a pure state and its derivative."""
    overlap = np.vdot(amps, damps)
    return float(4.0 * (np.vdot(damps, damps).real - abs(overlap) ** 2))


def _generator_on_fock(state, config: PhaseConfig) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(state, SectorState):
        return state.amps, generator_eigenvalues(state.j, config)
    keys = np.array(list(state.amps.keys()), dtype=float).reshape(-1, 2)
    amps = np.array(list(state.amps.values()), dtype=complex)
    n_a, n_b = keys[:, 0], keys[:, 1]
    g = (n_a - n_b) / 2 if config is PhaseConfig.BALANCED else n_a
    return amps, g


def qfi_pure(state: Union[SectorState, TwoModePureState], config: PhaseConfig) -> FisherReport:
    """Pure-state QFI ``4 Var(G)``, cross-checked against the derivative form.

    Raises :class:`NumericalIntegrityError` if the two disagree by more than
    ``1e-10`` (relative to ``max(1, H)``).
    """
    if not isinstance(state, (SectorState, TwoModePureState)):
        raise TypeError(f"qfi_pure needs a pure state, got {type(state).__name__}")
    h_var = 4.0 * generator_moments(state, config).variance
    amps, g = _generator_on_fock(state, config)
    h_der = qfi_from_amplitudes(amps, -1j * g * amps)
    if abs(h_var - h_der) > 1e-10 * max(1.0, abs(h_var)):
        raise NumericalIntegrityError(f"QFI routes disagree: {h_var!r} vs {h_der!r}")
    return FisherReport(h_var, MeasurementKind.QFI, None, 0.0, config)


def qfi_ensemble(ensemble: PhotonSectorEnsemble, config: PhaseConfig) -> FisherReport:
    """``sum_N p_N 4 Var(J_z)_{psi_N}`` for a sector-diagonal mixture.

    On a fixed sector both encodings differ only by a global phase, so every
    block is evaluated with the balanced generator whatever ``config`` says.
    """
    terms = [b.weight * qfi_pure(b.state, PhaseConfig.BALANCED).value for b in ensemble.blocks]
    return FisherReport(
        float(math.fsum(terms)),
        MeasurementKind.QFI,
        None,
        ensemble.truncation_residual,
        config,
    )


def h_joo(alpha: complex) -> float:
    """QFI of the pure entangled coherent state with a phase reference,
    ``4 [N_a^2 (|a|^4 + |a|^2) - (N_a^2 |a|^2)^2]``."""
    x = abs(alpha) ** 2
    n2 = ec_norm_sq(alpha)
    return 4.0 * (n2 * (x * x + x) - (n2 * x) ** 2)


def _series_cutoff(alpha: complex) -> int:
    x = abs(alpha) ** 2
    return int(x + 20.0 * math.sqrt(x) + 60)


def h_ec(alpha: complex, n_max: Optional[int] = None) -> float:
    """``2 N_a^2 sum_{n>=1} |c_n|^2 n^2`` by direct summation.

    The default cutoff leaves a tail far below double precision.
    """
    n_max = _series_cutoff(alpha) if n_max is None else n_max
    c2 = np.abs(ec_coefficients(alpha, n_max)) ** 2
    n = np.arange(n_max + 1)
    return 2.0 * ec_norm_sq(alpha) * math.fsum(c2[1:] * n[1:] ** 2)


def ec_parity_expectation_closed_form(
    alpha: complex, phi: float, n_max: Optional[int] = None
) -> float:
    """``2 N_a^2 [2 |c_0|^2 + sum_{n>=1} |c_n|^2 cos(n phi)]``."""
    n_max = _series_cutoff(alpha) if n_max is None else n_max
    c2 = np.abs(ec_coefficients(alpha, n_max)) ** 2
    n = np.arange(1, n_max + 1)
    return 2.0 * ec_norm_sq(alpha) * (2.0 * c2[0] + math.fsum(c2[1:] * np.cos(n * phi)))


def ec_parity_cfi_closed_form(alpha: complex, phi: float, n_max: Optional[int] = None) -> float:
    """Parity CFI of the entangled coherent ensemble from its series form.

    The denominator ``1 - <Pi>^2`` is computed as ``(1 - <Pi>)(1 + <Pi>)`` with
    ``1 - <Pi> = 4 N_a^2 sum |c_n|^2 sin^2(n phi / 2)``, exact for the full series.
    Returns ``nan`` at the removable singularity itself.
    """
    n_max = _series_cutoff(alpha) if n_max is None else n_max
    c2 = np.abs(ec_coefficients(alpha, n_max)) ** 2
    n = np.arange(1, n_max + 1)
    scale = 2.0 * ec_norm_sq(alpha)
    slope = scale * math.fsum(c2[1:] * n * np.sin(n * phi))
    one_minus = 2.0 * scale * math.fsum(c2[1:] * np.sin(n * phi / 2) ** 2)
    one_plus = 2.0 - one_minus
    denom = one_minus * one_plus
    if denom == 0.0:
        return float("nan")
    return slope * slope / denom
