"""
Two-mode probe states in the Schwinger picture.

A Fock state ``|n_a, n_b>`` is the angular-momentum state ``|j, m>`` with
``j = (n_a + n_b)/2`` and ``m = (n_a - n_b)/2``. Fixed-photon-number states are
:class:`SectorState` (dense amplitudes, ``m`` descending from ``+j``); states with
variable photon number are :class:`TwoModePureState` (sparse Fock amplitudes) or,
once phase-averaged, a block-diagonal :class:`PhotonSectorEnsemble`.

Entangled coherent ensembles store the two-mode vacuum once, with weight
``4 N_alpha^2 |c_0|^2``. That is the full vacuum population of the state, so
every block state stays normalized while the totals match the usual
``2 N_alpha^2 sum_n |c_n|^2 |n::0><n::0|`` bookkeeping, whose ``n = 0`` term is
an unnormalized ``sqrt(2)|0,0>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import DomainError
from .wigner import HalfInt, HalfIntLike

__all__ = [
    "NORM_TOL",
    "SectorState",
    "TwoModePureState",
    "SectorBlock",
    "PhotonSectorEnsemble",
    "fock_to_jm",
    "jm_to_fock",
    "noon",
    "ec_norm_sq",
    "ec_coefficients",
    "ec_ensemble",
    "ec_pure_state",
    "phase_average",
    "mean_jz",
]

NORM_TOL = 1e-12
# blocks lighter than this are dropped by phase_average
_BLOCK_FLOOR = 1e-15


def fock_to_jm(n_a: int, n_b: int) -> tuple[HalfInt, HalfInt]:
    if n_a < 0 or n_b < 0:
        raise DomainError("photon numbers are non-negative")
    return HalfInt(n_a + n_b), HalfInt(n_a - n_b)


def jm_to_fock(j: HalfIntLike, m: HalfIntLike) -> tuple[int, int]:
    tj, tm = HalfInt.of(j).twice, HalfInt.of(m).twice
    if tj < 0 or abs(tm) > tj or (tj - tm) % 2:
        raise DomainError(f"invalid (j, m) = ({HalfInt(tj)}, {HalfInt(tm)})")
    return (tj + tm) // 2, (tj - tm) // 2


@dataclass(frozen=True)
class SectorState:
    """Pure state with ``2j`` photons, amplitudes ``C_m`` for ``m = j, j-1, ..., -j``.

    Entry ``r`` of ``amps`` belongs to ``|n_a, n_b> = |2j - r, r>``.
    """

    j: HalfInt
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        j = HalfInt.of(self.j)
        if j.twice < 0:
            raise DomainError("j must be non-negative")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (j.twice + 1,):
            raise DomainError(f"j={j} needs {j.twice + 1} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"amplitudes are not normalized (|C|^2 sums to {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, j: HalfIntLike, amps, normalize: bool = True) -> "SectorState":
        amps = np.asarray(amps, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise DomainError("cannot normalize a zero vector")
            amps = amps / norm
        return cls(HalfInt.of(j), amps)

    @classmethod
    def basis(cls, j: HalfIntLike, m: HalfIntLike) -> "SectorState":
        """The eigenstate ``|j, m>``."""
        n_a, n_b = jm_to_fock(j, m)
        amps = np.zeros(n_a + n_b + 1, dtype=complex)
        amps[n_b] = 1.0
        return cls(HalfInt(n_a + n_b), amps)

    @property
    def n_photons(self) -> int:
        return self.j.twice

    @property
    def m_values(self) -> np.ndarray:
        return (self.j.twice - 2 * np.arange(self.j.twice + 1)) / 2

    def fock_amplitudes(self) -> dict[tuple[int, int], complex]:
        n = self.j.twice
        return {(n - r, r): complex(c) for r, c in enumerate(self.amps)}


@dataclass(frozen=True)
class TwoModePureState:
    """Pure two-mode state as a sparse map ``(n_a, n_b) -> amplitude``."""

    amps: Mapping[tuple[int, int], complex]

    def __post_init__(self):
        clean = {}
        for (n_a, n_b), c in self.amps.items():
            if n_a < 0 or n_b < 0:
                raise DomainError(f"negative photon number in key {(n_a, n_b)}")
            clean[(int(n_a), int(n_b))] = complex(c)
        norm = sum(abs(c) ** 2 for c in clean.values())
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"amplitudes are not normalized (|C|^2 sums to {norm!r})")
        object.__setattr__(self, "amps", dict(sorted(clean.items())))

    @classmethod
    def from_amplitudes(cls, amps: Mapping[tuple[int, int], complex]) -> "TwoModePureState":
        norm = np.sqrt(sum(abs(c) ** 2 for c in amps.values()))
        return cls({k: v / norm for k, v in amps.items()})

    def sectors(self) -> dict[int, np.ndarray]:
        """Unnormalized dense amplitudes per photon number, ``m`` descending."""
        out: dict[int, np.ndarray] = {}
        for (n_a, n_b), c in self.amps.items():
            n = n_a + n_b
            vec = out.setdefault(n, np.zeros(n + 1, dtype=complex))
            vec[n_b] += c
        return dict(sorted(out.items()))


class SectorBlock(NamedTuple):
    n: int
    weight: float
    state: SectorState


@dataclass(frozen=True)
class PhotonSectorEnsemble:
    """Incoherent mixture ``sum_N p_N |psi_N><psi_N|`` of fixed-photon-number states.

    ``truncation_residual`` is the probability mass that was left out; it is
    reported downstream and never folded back into the weights.
    """

    blocks: tuple[SectorBlock, ...]
    truncation_residual: float = 0.0

    def __post_init__(self):
        blocks = tuple(SectorBlock(int(b.n), float(b.weight), b.state) for b in self.blocks)
        seen = set()
        for b in blocks:
            if b.weight < 0:
                raise DomainError(f"negative weight for N={b.n}")
            if b.state.j.twice != b.n:
                raise DomainError(f"block N={b.n} holds a state with j={b.state.j}")
            if b.n in seen:
                raise DomainError(f"duplicate block N={b.n}")
            seen.add(b.n)
        if self.truncation_residual < 0:
            raise DomainError("truncation residual must be non-negative")
        total = sum(b.weight for b in blocks) + self.truncation_residual
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"weights plus residual sum to {total!r}, not 1")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=lambda b: b.n)))

    @classmethod
    def pure(cls, state: SectorState) -> "PhotonSectorEnsemble":
        return cls((SectorBlock(state.n_photons, 1.0, state),))

    def __iter__(self) -> Iterator[SectorBlock]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def weights(self) -> dict[int, float]:
        return {b.n: b.weight for b in self.blocks}

    @property
    def max_photons(self) -> int:
        return max(b.n for b in self.blocks)


def noon(N: int) -> SectorState:
    """``(|N,0> + |0,N>)/sqrt(2)``, i.e. ``(|j,j> + |j,-j>)/sqrt(2)`` with ``j = N/2``."""
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise DomainError(f"NOON states need N >= 1, got {N!r}")
    N = int(N)
    amps = np.zeros(N + 1, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return SectorState(HalfInt(N), amps)


def ec_norm_sq(alpha: complex) -> float:
    """``N_alpha^2 = 1 / (2 (1 + exp(-|alpha|^2)))``."""
    return 1.0 / (2.0 * (1.0 + np.exp(-abs(alpha) ** 2)))


def ec_coefficients(alpha: complex, n_max: int) -> np.ndarray:
    """Coherent-state amplitudes ``c_n = exp(-|a|^2/2) a^n / sqrt(n!)``, ``n = 0..n_max``."""
    n = np.arange(n_max + 1)
    r = abs(alpha)
    if r == 0:
        return (n == 0).astype(complex)
    log_mag = -0.5 * r * r + n * np.log(r) - 0.5 * gammaln(n + 1.0)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def _ec_cutoff(alpha: complex, tail_tol: float) -> tuple[int, float]:
    """Smallest ``n_max`` whose excluded ensemble mass is below ``tail_tol``."""
    if not (0.0 < tail_tol <= 1e-6):
        raise DomainError(f"tail_tol must lie in (0, 1e-6], got {tail_tol!r}")
    mean = abs(alpha) ** 2
    scale = 2.0 * ec_norm_sq(alpha)
    if mean == 0:
        return 0, 0.0
    n_max = int(mean)
    while True:
        tail = scale * float(poisson.sf(n_max, mean))
        if tail < tail_tol:
            return n_max, tail
        n_max += 1


def ec_ensemble(alpha: complex, tail_tol: float = 1e-12) -> PhotonSectorEnsemble:
    """Phase-averaged entangled coherent state as an ensemble of NOON blocks.

    ``p_0 = 4 N_a^2 |c_0|^2`` (vacuum), ``p_n = 2 N_a^2 |c_n|^2`` with ``noon(n)`` for
    ``1 <= n <= n_max``. ``n_max`` is the smallest cutoff with excluded mass below
    ``tail_tol``.
    """
    n_max, tail = _ec_cutoff(alpha, tail_tol)
    norm_sq = ec_norm_sq(alpha)
    c2 = np.abs(ec_coefficients(alpha, n_max)) ** 2
    blocks = [SectorBlock(0, 4.0 * norm_sq * c2[0], SectorState(HalfInt(0), [1.0]))]
    for n in range(1, n_max + 1):
        blocks.append(SectorBlock(n, 2.0 * norm_sq * c2[n], noon(n)))
    return PhotonSectorEnsemble(tuple(blocks), truncation_residual=tail)


def ec_pure_state(alpha: complex, tail_tol: float = 1e-15) -> TwoModePureState:
    """``N_a (|alpha>|0> + |0>|alpha>)`` in the Fock basis, truncated at ``tail_tol``.

    The missing norm (below ``tail_tol``) is not redistributed.
    """
    n_max, _ = _ec_cutoff(alpha, tail_tol)
    norm = np.sqrt(ec_norm_sq(alpha))
    c = ec_coefficients(alpha, n_max)
    amps = {(0, 0): 2.0 * norm * c[0]}
    for n in range(1, n_max + 1):
        amps[(n, 0)] = norm * c[n]
        amps[(0, n)] = norm * c[n]
    return TwoModePureState(amps)


def phase_average(psi: TwoModePureState) -> PhotonSectorEnsemble:
    """Remove coherence between photon-number sectors.

    ``p_N = sum_n |C_{n,N-n}|^2`` and ``|psi_N> = p_N^{-1/2} sum_n C_{n,N-n}|n,N-n>``.
    Sectors lighter than ``1e-15`` are dropped into ``truncation_residual``, as is
    any norm the input was already missing.
    """
    blocks = []
    kept = 0.0
    for n, vec in psi.sectors().items():
        weight = float(np.vdot(vec, vec).real)
        if weight < _BLOCK_FLOOR:
            continue
        blocks.append(SectorBlock(n, weight, SectorState(HalfInt(n), vec / np.sqrt(weight))))
        kept += weight
    return PhotonSectorEnsemble(tuple(blocks), truncation_residual=max(0.0, 1.0 - kept))


def mean_jz(state: SectorState) -> float:
    """``<J_z> = sum_m m |C_m|^2``."""
    return float(np.dot(state.m_values, np.abs(state.amps) ** 2))
