"""Particle Wigner kernel in a truncated Fock space.

Conventions (hbar = 1): ``a = (q + i p)/sqrt(2)``, phase-space point
``alpha = (q + i p)/sqrt(2)``, ``T(alpha) = exp(alpha a^+ - alpha^* a)`` and
``Delta(alpha) = 2 T(alpha) Pi T(alpha)^dagger``.  The inverse map uses the
measure ``d alpha = dq dp / (2 pi)``, so that ``W = Tr[Delta rho]`` equals
``2 pi`` times the textbook Wigner function normalized to
``int W dq dp = 1``.

Matrix elements of ``T`` are taken from the closed Laguerre form, not from
exponentiating truncated matrices, so every returned entry is exact up to
rounding regardless of ``n_max``; only products of truncated matrices
(``T(a) T(b)``, ``T Pi T^dagger``) suffer from truncation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from ._backend import log_factorials
from .errors import DomainError, QuadratureError, TruncationWarning
from .special_functions import genlaguerre_table

__all__ = [
    "FockSpace",
    "PhasePoint",
    "fock_operators",
    "displacement",
    "parity",
    "particle_kernel",
    "wigner_function",
    "wigner_integral_check",
    "hermite_functions",
    "position_wavefunction",
]


@dataclass(frozen=True)
class FockSpace:
    """Span of ``|0>, ..., |n_max>``."""

    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, int) or self.n_max < 0:
            raise DomainError(f"n_max must be a non-negative integer, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def converged_block(self) -> int:
        """Dimension of the sub-block trusted after truncated products."""
        return self.n_max // 2 + 1


@dataclass(frozen=True)
class PhasePoint:
    alpha: complex

    @classmethod
    def from_qp(cls, q: float, p: float) -> "PhasePoint":
        return cls(complex(q, p) / math.sqrt(2))

    @property
    def q(self) -> float:
        return math.sqrt(2) * self.alpha.real

    @property
    def p(self) -> float:
        return math.sqrt(2) * self.alpha.imag


def _alpha(point) -> complex:
    return complex(point.alpha if isinstance(point, PhasePoint) else point)


def fock_operators(space: FockSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(a, a^+, N)`` truncated to ``space``."""
    a = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), k=1).astype(complex)
    N = np.diag(np.arange(space.dim, dtype=float)).astype(complex)
    return a, a.conj().T.copy(), N


def _warn_truncation(space: FockSpace, alpha: complex, scale: float = 1.0) -> None:
    if 4 * scale * abs(alpha) ** 2 > space.n_max / 2:
        warnings.warn(
            f"|alpha|={abs(alpha):.3g} is large for n_max={space.n_max}; truncated products will be inaccurate",
            TruncationWarning,
            stacklevel=3,
        )


def _displacement_elements(dim: int, beta: complex) -> np.ndarray:
    """Closed form ``<m|T(beta)|n>``, ``m, n < dim``.

    For ``m >= n``: ``sqrt(n!/m!) beta^(m-n) exp(-|beta|^2/2) L_n^(m-n)(|beta|^2)``,
    and the transposed entry ``<n|T|m>`` has ``(-beta^*)^(m-n)`` in place of
    ``beta^(m-n)``.
    """
    T = np.zeros((dim, dim), dtype=complex)
    x = abs(beta) ** 2
    if beta == 0:
        np.fill_diagonal(T, 1.0)
        return T
    lf = log_factorials(dim + 1)
    log_b = math.log(abs(beta))
    phase = beta / abs(beta)
    for k in range(dim):
        # k = m - n >= 0; L_n^(k)(x) for n = 0 .. dim-1-k
        L = genlaguerre_table(dim - 1 - k, k, x)
        for n in range(dim - k):
            m = n + k
            mag = math.exp(0.5 * (lf[n] - lf[m]) + k * log_b - 0.5 * x)
            T[m, n] = mag * L[n] * phase**k
            if k:
                T[n, m] = mag * L[n] * (-phase.conjugate()) ** k
    return T


def displacement(space: FockSpace, point) -> np.ndarray:
    """Matrix of ``T(alpha)`` on ``space`` from the closed Laguerre form."""
    alpha = _alpha(point)
    _warn_truncation(space, alpha)
    return _displacement_elements(space.dim, alpha)


def parity(space: FockSpace) -> np.ndarray:
    """``Pi = sum (-1)^n |n><n|``."""
    return np.diag([(-1.0) ** n for n in range(space.dim)]).astype(complex)


def particle_kernel(space: FockSpace, point) -> np.ndarray:
    """``Delta(alpha) = 2 T(alpha) Pi T(alpha)^dagger``.

    Uses ``T(alpha) Pi T(alpha)^dagger = T(2 alpha) Pi`` so that every entry
    is the exact matrix element of the untruncated operator:
    ``<m|Delta|n> = 2 (-1)^n <m|T(2 alpha)|n>``.
    """
    alpha = _alpha(point)
    _warn_truncation(space, alpha)
    T2 = _displacement_elements(space.dim, 2 * alpha)
    signs = np.array([(-1.0) ** n for n in range(space.dim)])
    return 2.0 * T2 * signs[None, :]


def wigner_function(rho: np.ndarray, space: FockSpace, points: Iterable) -> np.ndarray:
    """``W(alpha) = Tr[Delta(alpha) rho]`` at each point (real part).

    Samples are in the ``d alpha = dq dp/(2 pi)`` normalization; see the
    module docstring.  Kernel entries are exact, so the result is exact for
    any ``rho`` supported in ``space`` and no truncation warning is issued.
    """
    rho = np.asarray(rho)
    if rho.shape != (space.dim, space.dim):
        raise DomainError(f"rho has shape {rho.shape}, expected {(space.dim, space.dim)}")
    signs = np.array([(-1.0) ** n for n in range(space.dim)])
    out = []
    for pt in points:
        K = 2.0 * _displacement_elements(space.dim, 2 * _alpha(pt)) * signs[None, :]
        out.append(float(np.real(np.sum(K * rho.T))))
    return np.array(out)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Oscillator eigenfunctions ``psi_n(x)``, ``n = 0 .. n_max``, by recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def position_wavefunction(psi: Sequence[complex], x) -> np.ndarray:
    """``psi(x) = sum_n c_n psi_n(x)`` for Fock coefficients ``c_n``."""
    psi = np.asarray(psi, dtype=complex)
    H = hermite_functions(len(psi) - 1, x)
    return np.tensordot(psi, H, axes=(0, 0))


def wigner_integral_check(psi: Sequence[complex], q: float, p: float, tol: float = 1e-11) -> float:
    """Wigner function from the position-space integral, in the ``W dq dp`` normalization.

    ``W(q, p) = (1/pi) int dx psi^*(q+x) psi(q-x) exp(2 i p x)``.  Multiply
    by ``2 pi`` to compare with :func:`wigner_function`.
    """
    psi = np.asarray(psi, dtype=complex)
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > 1e-10:
        raise DomainError(f"state is not normalized (norm {norm})")
    n = len(psi) - 1
    # integrand is negligible once both arguments are far outside the classical region
    half_width = abs(q) + math.sqrt(2 * n + 1) + 12.0

    def integrand(x):
        val = np.conj(position_wavefunction(psi, q + x)) * position_wavefunction(psi, q - x)
        return float(np.real(val * np.exp(2j * p * x)))

    value, err = integrate.quad(integrand, -half_width, half_width, limit=400, epsabs=tol, epsrel=tol)
    if not math.isfinite(value) or err > 1e3 * tol:
        raise QuadratureError(f"Wigner integral did not converge (estimate {value}, error {err})")
    return value / math.pi
