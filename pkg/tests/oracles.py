"""Independent reference computations used only by the tests.

None of these touch the package's d-matrix kernel.
"""

import math

import mpmath
import numpy as np
from scipy.linalg import expm


def small_d_explicit(twice_j, twice_mp, twice_m, beta, dps=60):
    """Wigner's alternating factorial sum evaluated in ``dps``-digit arithmetic."""
    with mpmath.workdps(dps):
        jpm, jmm = (twice_j + twice_m) // 2, (twice_j - twice_m) // 2
        jpmp, jmmp = (twice_j + twice_mp) // 2, (twice_j - twice_mp) // 2
        diff = (twice_mp - twice_m) // 2
        c = mpmath.cos(mpmath.mpf(beta) / 2)
        s = mpmath.sin(mpmath.mpf(beta) / 2)
        f = mpmath.factorial
        pref = mpmath.sqrt(f(jpmp) * f(jmmp) * f(jpm) * f(jmm))
        total = mpmath.mpf(0)
        for k in range(max(0, -diff), min(jpm, jmmp) + 1):
            total += (
                (-1) ** (diff + k)
                * c ** (twice_j + (twice_m - twice_mp) // 2 - 2 * k)
                * s ** (diff + 2 * k)
                / (f(jpm - k) * f(k) * f(diff + k) * f(jmmp - k))
            )
        return float(pref * total)


class FockSpace:
    """Two bosonic modes truncated at ``n_max`` photons each, basis ``|n_a, n_b>``."""

    def __init__(self, n_max):
        self.n_max = n_max
        dim = n_max + 1
        lower = np.diag(np.sqrt(np.arange(1, dim)), 1)
        eye = np.eye(dim)
        self.a = np.kron(lower, eye)
        self.b = np.kron(eye, lower)
        self.dim = dim * dim

    def index(self, n_a, n_b):
        return n_a * (self.n_max + 1) + n_b

    def ket(self, amps):
        vec = np.zeros(self.dim, dtype=complex)
        for (n_a, n_b), c in amps.items():
            vec[self.index(n_a, n_b)] = c
        return vec

    def beam_splitter(self):
        # exp(-i pi/2 J_y), J_y = (a^dag b - a b^dag) / 2i; photon number is conserved,
        # so truncation is exact on states with at most n_max photons in total
        a, b = self.a, self.b
        j_y = (a.conj().T @ b - a @ b.conj().T) / 2j
        return expm(-1j * (np.pi / 2) * j_y)

    def phase(self, phi, balanced):
        n_a = self.a.conj().T @ self.a
        n_b = self.b.conj().T @ self.b
        gen = (n_a - n_b) / 2 if balanced else n_a
        return expm(-1j * phi * gen)

    def probabilities(self, amps, phi, balanced=False):
        out = self.beam_splitter() @ self.phase(phi, balanced) @ self.ket(amps)
        probs = {}
        for n_a in range(self.n_max + 1):
            for n_b in range(self.n_max + 1):
                p = abs(out[self.index(n_a, n_b)]) ** 2
                if n_a + n_b <= self.n_max:
                    probs[(n_a, n_b)] = p
        return probs


def central_difference(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


def noon_fock(N):
    return {(N, 0): 1 / math.sqrt(2), (0, N): 1 / math.sqrt(2)}
