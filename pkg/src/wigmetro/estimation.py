"""
Monte-Carlo photon counting and maximum-likelihood phase estimation.

Random numbers come from numpy's PCG64. Trial ``t`` of a run seeded with ``s``
draws from ``SeedSequence(s, spawn_key=(t,))``, so each trial's stream is fixed
by ``(s, t)`` alone and trials can be run in any order or in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import PhaseConfig, generator_eigenvalues
from .errors import DegenerateLikelihoodError, DomainError
from .metrology import (
    BEAM_SPLITTER,
    OutcomeDistribution,
    Probe,
    as_ensemble,
    cfi_from_distribution,
    dpc_distribution,
)
from .states import PhotonSectorEnsemble
from .wigner import small_d_matrix

__all__ = [
    "PRNG_NAME",
    "GRID_POINTS",
    "OutcomeCounts",
    "MleResult",
    "CrbReport",
    "trial_seed",
    "sample_outcomes",
    "log_likelihood",
    "default_bracket",
    "mle_phase",
    "crb_report",
]

PRNG_NAME = "numpy PCG64; trial t uses SeedSequence(seed, spawn_key=(t,))"
GRID_POINTS = 201
XTOL = 1e-8


@dataclass(frozen=True)
class OutcomeCounts:
    counts: Mapping[tuple[int, int], int]
    total: int
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise DomainError("counts do not add up to total")


@dataclass(frozen=True)
class MleResult:
    phi_hat: float
    log_likelihood: float
    bracket: tuple[float, float]
    iterations: int
    multimodal: bool = False


@dataclass(frozen=True)
class CrbReport:
    phi_star: float
    nu: int
    n_trials: int
    seed: int
    fisher: float
    crb: float
    empirical_variance: float
    ratio: float
    bias: float
    bias_stderr: float
    bracket: tuple[float, float]
    prng: str = PRNG_NAME
    estimates: np.ndarray = field(default=None, repr=False)

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "estimates"}
        out["bracket"] = list(self.bracket)
        return out


def trial_seed(seed: int, trial: int) -> int:
    """Integer seed of the independent stream for ``trial``."""
    seq = np.random.SeedSequence(seed, spawn_key=(trial,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def sample_outcomes(dist: OutcomeDistribution, nu: int, seed: int) -> OutcomeCounts:
    """``nu`` independent photon-counting outcomes drawn from ``dist``.

    The truncated tail (if any) cannot be sampled; the retained probabilities
    are rescaled by their total, which differs from one by the residual only.
    """
    if nu < 1:
        raise DomainError("nu must be positive")
    p = np.clip(np.asarray(dist.p, float), 0.0, None)
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(int(nu), p / p.sum())
    hit = np.flatnonzero(draws)
    counts = {(int(dist.n_a[i]), int(dist.n_b[i])): int(draws[i]) for i in hit}
    return OutcomeCounts(counts, int(nu), int(seed))


class _Likelihood:
    """Probabilities of a fixed set of outcomes as a function of ``phi``.

    For outcome ``(n_a, n_b)`` in sector ``N`` the output amplitude is
    ``sum_m R[n_b, m] C_m exp(-i g_m phi)``; the rows are precomputed so a whole
    ``phi`` grid costs one matrix product per sector.
    """

    def __init__(self, ensemble: PhotonSectorEnsemble, config: PhaseConfig, outcomes):
        blocks = {b.n: b for b in ensemble.blocks}
        self.n_outcomes = len(outcomes)
        self.groups = []
        by_sector: dict[int, list[tuple[int, int]]] = {}
        for idx, (n_a, n_b) in enumerate(outcomes):
            by_sector.setdefault(n_a + n_b, []).append((idx, n_b))
        for n, members in sorted(by_sector.items()):
            block = blocks.get(n)
            if block is None:
                continue
            rot = small_d_matrix(block.state.j, BEAM_SPLITTER.beta)
            rows = np.array([r for _, r in members])
            weights = rot[rows, :] * block.state.amps[None, :]
            g = generator_eigenvalues(block.state.j, config)
            self.groups.append((np.array([i for i, _ in members]), block.weight, weights, g))

    def probabilities(self, phis) -> np.ndarray:
        phis = np.atleast_1d(np.asarray(phis, float))
        out = np.zeros((self.n_outcomes, phis.size))
        for idx, weight, rows, g in self.groups:
            amp = rows @ np.exp(-1j * g[:, None] * phis[None, :])
            out[idx] = weight * np.abs(amp) ** 2
        return out


def log_likelihood(counts: OutcomeCounts, probe: Probe, config: PhaseConfig, phis) -> np.ndarray:
    """``sum_chi counts(chi) ln p(chi | phi)`` on an array of phases."""
    outcomes = list(counts.counts)
    model = _Likelihood(as_ensemble(probe), config, outcomes)
    return _loglik(model, np.array([counts.counts[o] for o in outcomes], float), phis)


def _loglik(model: _Likelihood, weights: np.ndarray, phis) -> np.ndarray:
    probs = model.probabilities(phis)
    with np.errstate(divide="ignore"):
        logs = np.log(probs)
    logs[probs <= 0] = -np.inf
    return weights @ logs


def default_bracket(probe: Probe, phi_star: float) -> tuple[float, float]:
    """``phi* +- pi / (2 N_max)`` clipped to ``[0, pi]``.

    ``N_max`` is the largest photon number in the probe. The clip removes the
    mirror image at ``-phi*``: for probes with real amplitudes the counting
    likelihood is even in ``phi``.
    """
    n_max = max(as_ensemble(probe).max_photons, 1)
    half = math.pi / (2 * n_max)
    return max(phi_star - half, 0.0), min(phi_star + half, math.pi)


def _local_maxima(values: np.ndarray) -> list[int]:
    n = values.size
    peaks = []
    for i in range(n):
        left = values[i - 1] if i > 0 else -np.inf
        right = values[i + 1] if i < n - 1 else -np.inf
        if np.isfinite(values[i]) and values[i] >= left and values[i] > right:
            peaks.append(i)
    return peaks


def mle_phase(
    counts: OutcomeCounts,
    probe: Probe,
    config: PhaseConfig,
    bracket: tuple[float, float],
) -> MleResult:
    """Maximum-likelihood phase inside ``bracket``.

    A 201-point grid locates the candidate maxima, each of which is refined by
    bounded Brent minimization to ``1e-8`` rad within its neighbouring grid cell.
    The best refined candidate is returned; ``multimodal`` is set when the grid
    shows more than one local maximum. The bracket should be narrower than the
    likelihood's period.
    """
    lo, hi = map(float, bracket)
    if not hi > lo:
        raise DomainError(f"empty bracket {bracket!r}")
    outcomes = list(counts.counts)
    weights = np.array([counts.counts[o] for o in outcomes], float)
    model = _Likelihood(as_ensemble(probe), config, outcomes)

    grid = np.linspace(lo, hi, GRID_POINTS)
    values = _loglik(model, weights, grid)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise DegenerateLikelihoodError("observed counts are impossible everywhere in the bracket")
    spread = finite.max() - finite.min()
    if finite.size == values.size and spread <= 1e-12 * max(1.0, abs(finite.max())):
        raise DegenerateLikelihoodError("likelihood is flat across the bracket")

    peaks = _local_maxima(values)
    evaluations = 0
    best_phi, best_val = None, -np.inf
    for i in peaks:
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        res = minimize_scalar(
            lambda x: -_loglik(model, weights, x)[0],
            bounds=(a, b),
            method="bounded",
            options={"xatol": XTOL},
        )
        evaluations += int(res.nfev)
        phi, val = float(res.x), float(-res.fun)
        if values[i] > val:
            phi, val = float(grid[i]), float(values[i])
        if val > best_val:
            best_phi, best_val = phi, val
    return MleResult(best_phi, best_val, (lo, hi), evaluations, multimodal=len(peaks) > 1)


def crb_report(
    probe: Probe,
    config: PhaseConfig,
    phi_star: float,
    nu: int,
    n_trials: int,
    seed: int,
    bracket: Optional[tuple[float, float]] = None,
) -> CrbReport:
    """Repeat sample-and-estimate ``n_trials`` times and compare with ``1/(nu F)``."""
    if n_trials < 2:
        raise DomainError("need at least two trials for a variance")
    ensemble = as_ensemble(probe)
    dist = dpc_distribution(ensemble, phi_star, config)
    fisher = cfi_from_distribution(dist).value
    bracket = default_bracket(ensemble, phi_star) if bracket is None else tuple(bracket)

    estimates = np.empty(n_trials)
    for t in range(n_trials):
        counts = sample_outcomes(dist, nu, trial_seed(seed, t))
        estimates[t] = mle_phase(counts, ensemble, config, bracket).phi_hat

    variance = float(np.var(estimates, ddof=1))
    crb = 1.0 / (nu * fisher)
    return CrbReport(
        phi_star=float(phi_star),
        nu=int(nu),
        n_trials=int(n_trials),
        seed=int(seed),
        fisher=fisher,
        crb=crb,
        empirical_variance=variance,
        ratio=variance / crb,
        bias=float(estimates.mean() - phi_star),
        bias_stderr=float(np.sqrt(variance / n_trials)),
        bracket=(float(bracket[0]), float(bracket[1])),
        estimates=estimates,
    )
