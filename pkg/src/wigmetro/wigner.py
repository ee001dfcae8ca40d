r"""
Wigner rotation matrices.

Conventions
-----------
Rotations are active, :math:`R(\alpha,\beta,\gamma) = e^{-i\alpha J_z} e^{-i\beta J_y}
e^{-i\gamma J_z}`, and

.. math::

    D^j_{m',m}(\alpha,\beta,\gamma) = \langle j,m'|R|j,m\rangle
        = e^{-im'\alpha}\, d^j_{m',m}(\beta)\, e^{-im\gamma}.

Dense matrices are indexed with ``m`` running *down* from ``+j`` to ``-j``:
row ``r`` is ``m' = j - r`` and column ``c`` is ``m = j - c``.

Quantum numbers are exact half-integers (:class:`HalfInt`); floats are refused.

The small-d kernel uses the Jacobi-polynomial form of the matrix element with a
three-term recurrence, which keeps full double precision where the alternating
factorial sum cancels catastrophically. Observed error against an 80-digit
reference is below ``2e-14`` for ``2j <= 200``; the unitarity residual of a full
matrix stays below ``2e-13`` over the same range. Larger ``j`` is refused.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral
from typing import NamedTuple, Union

import numpy as np
from scipy.special import gammaln

from .errors import CapabilityError, DomainError

__all__ = [
    "MAX_TWICE_J",
    "ORACLE_MAX_TWICE_J",
    "HalfInt",
    "EulerAngles",
    "DMatrix",
    "ParitySelector",
    "log_factorial",
    "small_d",
    "big_D",
    "small_d_matrix",
    "d_matrix",
    "d_matrix_oracle",
    "symmetry_negate_column",
    "parity_orthogonality_sum",
    "parity_orthogonality_matrix",
    "parity_orthogonality_contract",
]

MAX_TWICE_J = 200
ORACLE_MAX_TWICE_J = 20


@functools.total_ordering
@dataclass(frozen=True)
class HalfInt:
    """Exact half-integer stored as twice its value.

    ``HalfInt(3)`` is 3/2. Use :meth:`of` to build one from its physical value.

    >>> HalfInt.of("3/2").twice
    3
    >>> HalfInt.of(1) == HalfInt(2)
    True
    """

    twice: int

    def __post_init__(self):
        if isinstance(self.twice, bool) or not isinstance(self.twice, Integral):
            raise TypeError(f"HalfInt stores an integer, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def of(cls, value: "HalfIntLike") -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a quantum number")
        if isinstance(value, Integral):
            return cls(2 * int(value))
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            doubled = 2 * value
            if doubled.denominator != 1:
                raise DomainError(f"{value} is not a multiple of 1/2")
            return cls(doubled.numerator)
        raise TypeError(
            f"quantum numbers must be int, Fraction, str or HalfInt, not {type(value).__name__}"
        )

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __lt__(self, other):
        if not isinstance(other, HalfInt):
            return NotImplemented
        return self.twice < other.twice

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


HalfIntLike = Union[HalfInt, int, Fraction, str]


def _twice_j(j: HalfIntLike) -> int:
    tj = HalfInt.of(j).twice
    if tj < 0:
        raise DomainError(f"j must be non-negative, got {HalfInt(tj)}")
    return tj


def _twice_m(tj: int, m: HalfIntLike) -> int:
    tm = HalfInt.of(m).twice
    if abs(tm) > tj or (tj - tm) % 2:
        raise DomainError(f"m={HalfInt(tm)} is not a valid projection for j={HalfInt(tj)}")
    return tm


def _check_support(tj: int, limit: int = MAX_TWICE_J) -> None:
    if tj > limit:
        raise CapabilityError(
            f"2j={tj} exceeds the supported limit 2j <= {limit} (j <= {limit / 2:g})"
        )


class EulerAngles(NamedTuple):
    """Euler angles in radians, z-y-z convention. Any real values are accepted."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    @classmethod
    def ry(cls, beta: float) -> "EulerAngles":
        return cls(0.0, beta, 0.0)


class ParitySelector(enum.Enum):
    EVEN = 0
    ODD = 1


def log_factorial(n):
    """Natural log of ``n!`` for a non-negative integer or integer array."""
    arr = np.asarray(n)
    if arr.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise DomainError("log_factorial needs integer arguments")
    if np.any(arr < 0):
        raise DomainError("log_factorial is defined for n >= 0")
    out = gammaln(arr.astype(float) + 1.0)
    return float(out) if out.ndim == 0 else out


def _small_d_kernel(tj: int, tmp, tm, beta: float) -> np.ndarray:
    """d^j_{m',m}(beta) for broadcastable arrays of doubled projections."""
    tmp, tm = np.broadcast_arrays(np.asarray(tmp, dtype=np.int64), np.asarray(tm, dtype=np.int64))
    jpm, jmm = (tj + tm) // 2, (tj - tm) // 2
    jpmp, jmmp = (tj + tmp) // 2, (tj - tmp) // 2
    cand = np.stack([jpm, jmm, jpmp, jmmp])
    which = np.argmin(cand, axis=0)
    k = cand.min(axis=0)
    diff = (tmp - tm) // 2
    flip = (which == 0) | (which == 3)
    a = np.where(flip, diff, -diff)
    sign_exp = np.where(flip, diff, 0)
    b = tj - 2 * k - a

    x = np.cos(beta)
    af, bf = a.astype(float), b.astype(float)
    p_prev = np.ones(a.shape)
    p_cur = (af + 1.0) + (af + bf + 2.0) * (x - 1.0) / 2.0
    jac = np.where(k == 0, p_prev, p_cur)
    kmax = int(k.max()) if k.size else 0
    for n in range(2, kmax + 1):
        s = 2 * n + af + bf
        c1 = 2 * n * (n + af + bf) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + af * af - bf * bf)
        c3 = 2 * (n + af - 1) * (n + bf - 1) * s
        p_prev, p_cur = p_cur, (c2 * p_cur - c3 * p_prev) / c1
        jac = np.where(k == n, p_cur, jac)

    # sqrt(C(2j-k, k+a) / C(k+b, b))
    log_pref = 0.5 * (
        log_factorial(tj - k) - log_factorial(k + a) - log_factorial(tj - 2 * k - a)
        - log_factorial(k + b) + log_factorial(b) + log_factorial(k)
    )
    sign = np.where(sign_exp % 2 == 0, 1.0, -1.0)
    trig = np.power(np.sin(beta / 2), a) * np.power(np.cos(beta / 2), b)
    return sign * np.exp(log_pref) * trig * jac


@functools.lru_cache(maxsize=512)
def _cached_small_d_matrix(tj: int, beta: float) -> np.ndarray:
    tms = tj - 2 * np.arange(tj + 1)
    mat = _small_d_kernel(tj, tms[:, None], tms[None, :], beta)
    mat.setflags(write=False)
    return mat


def small_d(j: HalfIntLike, m_row: HalfIntLike, m_col: HalfIntLike, beta: float) -> float:
    """Wigner small-d element ``<j, m_row| exp(-i beta J_y) |j, m_col>``.

    Examples
    --------
    >>> round(small_d("1/2", "1/2", "1/2", np.pi / 2), 8)
    0.70710678
    >>> round(small_d(1, 1, 0, np.pi / 2), 8)
    -0.70710678
    """
    tj = _twice_j(j)
    tmp, tm = _twice_m(tj, m_row), _twice_m(tj, m_col)
    _check_support(tj)
    return float(_small_d_kernel(tj, tmp, tm, float(beta)))


def big_D(j: HalfIntLike, m_row: HalfIntLike, m_col: HalfIntLike, angles: EulerAngles) -> complex:
    """Full Wigner D element ``exp(-i m_row alpha) d(beta) exp(-i m_col gamma)``."""
    alpha, beta, gamma = angles
    tj = _twice_j(j)
    tmp, tm = _twice_m(tj, m_row), _twice_m(tj, m_col)
    _check_support(tj)
    d = float(_small_d_kernel(tj, tmp, tm, float(beta)))
    return complex(np.exp(-0.5j * (tmp * alpha + tm * gamma)) * d)


def small_d_matrix(j: HalfIntLike, beta: float) -> np.ndarray:
    """Real ``(2j+1, 2j+1)`` small-d matrix, ``m`` descending. Read-only (cached)."""
    tj = _twice_j(j)
    _check_support(tj)
    return _cached_small_d_matrix(tj, float(beta))


@dataclass(frozen=True)
class DMatrix:
    """Dense Wigner D-matrix for one ``j`` and one set of Euler angles."""

    j: HalfInt
    entries: np.ndarray = field(repr=False)
    angles: EulerAngles

    @property
    def m_values(self) -> np.ndarray:
        """Projections labelling rows and columns, as floats, descending."""
        return (self.j.twice - 2 * np.arange(self.j.twice + 1)) / 2

    def unitarity_residual(self) -> float:
        """``max |sum_mu D[m',mu] D*[m,mu] - delta|`` over all ``m', m``."""
        e = self.entries
        return float(np.abs(e @ e.conj().T - np.eye(e.shape[0])).max())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def d_matrix(j: HalfIntLike, angles: EulerAngles) -> DMatrix:
    """All ``D^j_{m',m}(angles)`` at once.

    Raises :class:`CapabilityError` above ``2j = MAX_TWICE_J``.
    """
    angles = EulerAngles(*map(float, angles))
    tj = _twice_j(j)
    _check_support(tj)
    small = _cached_small_d_matrix(tj, angles.beta)
    half_m = (tj - 2 * np.arange(tj + 1)) / 2
    if angles.alpha == 0.0 and angles.gamma == 0.0:
        entries = small.astype(complex)
    else:
        entries = (
            np.exp(-1j * half_m * angles.alpha)[:, None]
            * small
            * np.exp(-1j * half_m * angles.gamma)[None, :]
        )
    entries.setflags(write=False)
    return DMatrix(HalfInt(tj), entries, angles)


def d_matrix_oracle(j: HalfIntLike, beta: float) -> DMatrix:
    """Brute-force small-d matrix from the ladder-operator form of ``J_y``.

    Builds ``J_y = (J_+ - J_-)/(2i)`` and exponentiates ``-i beta J_y`` with a dense
    Pade scaling-and-squaring routine. Testing aid only, limited to ``2j <= 20``.
    """
    from scipy.linalg import expm

    tj = _twice_j(j)
    _check_support(tj, ORACLE_MAX_TWICE_J)
    jv = tj / 2
    m = (tj - 2 * np.arange(tj + 1)) / 2
    j_plus = np.zeros((tj + 1, tj + 1))
    for col in range(1, tj + 1):
        # <j, m+1| J_+ |j, m>, row above the column in descending order
        j_plus[col - 1, col] = np.sqrt(jv * (jv + 1) - m[col] * (m[col] + 1))
    j_y = (j_plus - j_plus.T) / 2j
    entries = expm(-1j * beta * j_y)
    return DMatrix(HalfInt(tj), entries, EulerAngles.ry(beta))


def symmetry_negate_column(
    j: HalfIntLike, mu: HalfIntLike, m: HalfIntLike, alpha: float = 0.0, gamma: float = 0.0
) -> tuple[complex, complex]:
    r"""Both sides of the column-negation identity at ``beta = pi/2``.

    The identity :math:`d^j_{\mu,-m}(\pi/2) = (-1)^{j+\mu} d^j_{\mu,m}(\pi/2)` is a
    statement about the small-d part. The column phase of the left-hand side,
    :math:`e^{+im\gamma}`, is therefore swapped for :math:`e^{-im\gamma}` so that both
    sides carry the same Euler phases; at ``gamma = 0`` this is the plain
    :math:`D^j_{\mu,-m} = (-1)^{-j-\mu} D^j_{\mu,m}`.

    The sign uses the integer parity of ``j + mu``, never a complex power.
    """
    tj = _twice_j(j)
    tmu, tm = _twice_m(tj, mu), _twice_m(tj, m)
    angles = EulerAngles(alpha, np.pi / 2, gamma)
    lhs = big_D(HalfInt(tj), HalfInt(tmu), HalfInt(-tm), angles) * np.exp(-1j * tm * gamma)
    sign = -1.0 if ((tj + tmu) // 2) % 2 else 1.0
    rhs = sign * big_D(HalfInt(tj), HalfInt(tmu), HalfInt(tm), angles)
    return complex(lhs), complex(rhs)


def _parity_rows(n: int, sel: ParitySelector) -> slice:
    # row r of a descending matrix is mu = j - r, i.e. k = r
    return slice(sel.value, n + 1, 2)


def parity_orthogonality_matrix(
    N: int, sel: ParitySelector, alpha: float = 0.0, gamma: float = 0.0
) -> np.ndarray:
    r"""Matrix of parity-restricted sums over every ``(m, m')``.

    Entry ``[r, c]`` (``m = j - r``, ``m' = j - c``) is

    .. math:: \sum_{k \in sel} D^j_{j-k,m}(\alpha,\pi/2,\gamma)\,D^j_{j-k,m'}(\alpha,\pi/2,\gamma)^*

    with ``j = N/2`` and ``k`` running over the selected parity in ``0..N``.
    """
    if isinstance(N, bool) or not isinstance(N, Integral) or N < 0:
        raise DomainError(f"N must be a non-negative integer, got {N!r}")
    D = d_matrix(HalfInt(int(N)), EulerAngles(alpha, np.pi / 2, gamma)).entries
    rows = D[_parity_rows(int(N), sel)]
    return rows.T @ rows.conj()


def parity_orthogonality_sum(
    N: int,
    sel: ParitySelector,
    m: HalfIntLike,
    m_prime: HalfIntLike,
    alpha: float = 0.0,
    gamma: float = 0.0,
) -> complex:
    """Single entry of :func:`parity_orthogonality_matrix`.

    Examples
    --------
    >>> round(parity_orthogonality_sum(1, ParitySelector.EVEN, "1/2", "1/2").real, 12)
    0.5
    """
    if isinstance(N, bool) or not isinstance(N, Integral) or N < 0:
        raise DomainError(f"N must be a non-negative integer, got {N!r}")
    tm, tmp = _twice_m(int(N), m), _twice_m(int(N), m_prime)
    _check_support(int(N))
    D = d_matrix(HalfInt(int(N)), EulerAngles(alpha, np.pi / 2, gamma)).entries
    rows = D[_parity_rows(int(N), sel)]
    return complex(rows[:, (N - tm) // 2] @ rows[:, (N - tmp) // 2].conj())


def parity_orthogonality_contract(
    N: int, sel: ParitySelector, gamma: float = 0.0
) -> np.ndarray:
    r"""Closed-form value of :func:`parity_orthogonality_matrix`.

    .. math::

        S_{sel}(m, m') = \tfrac12\delta_{m,m'}
            + \tfrac12\, s_{sel}\,(-1)^N e^{-2im\gamma}\,\delta_{m,-m'}

    with ``s_even = +1`` and ``s_odd = -1``. Off the anti-diagonal this is
    ``delta/2``; at ``m = m' = 0`` (even ``N``) it gives 1 for even ``k`` and 0 for odd
    ``k``. The anti-diagonal term follows from the column-negation identity and is
    independent of ``alpha``.
    """
    n = int(N) + 1
    half_m = (int(N) - 2 * np.arange(n)) / 2
    s = 1.0 if sel is ParitySelector.EVEN else -1.0
    s *= -1.0 if N % 2 else 1.0
    out = 0.5 * np.eye(n, dtype=complex)
    anti = np.fliplr(np.eye(n)) * np.exp(-2j * half_m * gamma)[:, None]
    return out + 0.5 * s * anti
