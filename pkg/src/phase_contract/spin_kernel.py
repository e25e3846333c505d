"""Spin Wigner kernels on the sphere.

For spin ``s`` there is one kernel per sign pattern ``eps`` (``eps_0 = +1``,
``eps_l = +-1`` for ``l = 1..2s``).  Matrix elements in the ``|s, m>`` basis
(descending ``m``, see :mod:`phase_contract.special_functions`) are

    Z_{mm'}(n) = sqrt(4 pi)/(2s+1) sum_l eps_l sqrt(2l+1)
                 <s m; l m'-m | s m'> Y_{l, m'-m}(n)

and the same kernel is ``U(n) Pi_s U(n)^dagger`` with the diagonal
``Pi_s = diag(Delta_eps(m))``,
``Delta_eps(m) = sum_l eps_l (2l+1)/(2s+1) <s m; l 0 | s m>``.

The inverse map uses the measure ``(2s+1)/(4 pi) dOmega``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from ._backend import kernels, log_factorials_split
from .errors import BandlimitError, DomainError
from .numbers import HalfInt, HalfLike, half
from .special_functions import (
    ABS_COND_LIMIT,
    NORTH_POLE,
    SpherePoint,
    clebsch_gordan,
    clebsch_gordan_float,
    refine_ill_conditioned,
    rotation_matrix,
    spherical_harmonics_table,
)

__all__ = [
    "SignPattern",
    "SpinKernel",
    "SphereGrid",
    "SphereSamples",
    "AuditReport",
    "kernel_coefficient",
    "kernel_at",
    "kernels_on_grid",
    "pi_s",
    "kernel_diagonal",
    "kernel_via_rotation",
    "wigner_symbol",
    "sample_symbol",
    "reconstruct_operator",
    "audit_postulates",
]


def _spin(s: HalfLike) -> HalfInt:
    s = half(s)
    if s.twice_value < 0:
        raise DomainError(f"spin must be >= 0, got {s}")
    return s


@dataclass(frozen=True)
class SignPattern:
    """Signs ``eps_0 .. eps_2s`` selecting one of the ``2**(2s)`` kernels."""

    s: HalfInt
    signs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "s", _spin(self.s))
        signs = tuple(int(x) for x in self.signs)
        object.__setattr__(self, "signs", signs)
        if len(signs) != self.s.twice_value + 1:
            raise DomainError(f"pattern for s={self.s} needs {self.s.twice_value + 1} signs, got {len(signs)}")
        if signs[0] != 1:
            raise DomainError("eps_0 must be +1")
        if any(x not in (-1, 1) for x in signs):
            raise DomainError("signs must be +1 or -1")

    @classmethod
    def all_plus(cls, s: HalfLike) -> "SignPattern":
        s = _spin(s)
        return cls(s, (1,) * (s.twice_value + 1))

    @classmethod
    def alternating(cls, s: HalfLike) -> "SignPattern":
        """``eps_l = (-1)**l``."""
        s = _spin(s)
        return cls(s, tuple((-1) ** l for l in range(s.twice_value + 1)))

    @classmethod
    def from_mask(cls, s: HalfLike, mask: str) -> "SignPattern":
        """Parse a bitstring; character ``l-1`` (left to right) is ``eps_l``, ``'1'`` meaning -1.

        An empty mask is accepted only for ``s = 0``.
        """
        s = _spin(s)
        mask = mask.strip()
        if len(mask) != s.twice_value:
            raise DomainError(f"epsilon mask for 2s={s.twice_value} must have {s.twice_value} bits, got {len(mask)}")
        if set(mask) - {"0", "1"}:
            raise DomainError(f"epsilon mask must be a bitstring, got {mask!r}")
        return cls(s, (1,) + tuple(-1 if c == "1" else 1 for c in mask))

    @classmethod
    def random(cls, s: HalfLike, rng: np.random.Generator) -> "SignPattern":
        s = _spin(s)
        return cls(s, (1,) + tuple(int(x) for x in rng.choice([-1, 1], size=s.twice_value)))

    @classmethod
    def exhaustive(cls, s: HalfLike) -> Iterator["SignPattern"]:
        """All ``2**(2s)`` patterns, all-plus first."""
        s = _spin(s)
        for bits in itertools.product((1, -1), repeat=s.twice_value):
            yield cls(s, (1,) + bits)

    @property
    def mask(self) -> str:
        return "".join("1" if x < 0 else "0" for x in self.signs[1:])

    @property
    def is_all_plus(self) -> bool:
        return all(x == 1 for x in self.signs)

    def as_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    def tiled(self, s: HalfLike) -> "SignPattern":
        """Extend to spin ``s`` by repeating ``eps_1 .. eps_2s`` periodically.

        ``eps_l`` of the result is ``eps_{1 + (l-1) mod 2s}`` of this pattern,
        so the fraction of flipped signs is preserved as ``s`` grows.
        """
        s = _spin(s)
        period = self.signs[1:]
        if not period:
            return SignPattern.all_plus(s)
        return SignPattern(s, (1,) + tuple(period[(l - 1) % len(period)] for l in range(1, s.twice_value + 1)))


@dataclass(frozen=True)
class SpinKernel:
    s: HalfInt
    epsilon: SignPattern
    point: SpherePoint
    matrix: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class SphereGrid:
    """Product grid: Gauss-Legendre in ``cos(theta)`` times uniform ``phi``.

    Integrates ``Y_lm`` exactly up to degree
    ``min(2 * n_theta - 1, n_phi - 1)``.
    """

    theta: np.ndarray = field(repr=False, compare=False)
    theta_weights: np.ndarray = field(repr=False, compare=False)
    phi: np.ndarray = field(repr=False, compare=False)
    n_theta: int = 0
    n_phi: int = 0

    @classmethod
    def of_size(cls, n_theta: int, n_phi: int) -> "SphereGrid":
        if n_theta < 1 or n_phi < 1:
            raise ValueError("grid needs at least one node in each direction")
        x, w = np.polynomial.legendre.leggauss(n_theta)
        # ascending theta
        theta = np.arccos(x)[::-1].copy()
        w = w[::-1].copy()
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        return cls(theta, w, phi, n_theta, n_phi)

    @classmethod
    def for_spin(cls, s: HalfLike) -> "SphereGrid":
        """Smallest product grid exact for the degree-``4s`` integrands of a roundtrip."""
        ts = _spin(s).twice_value
        return cls.of_size(ts + 2, 2 * ts + 2)

    @property
    def bandlimit(self) -> int:
        return min(2 * self.n_theta - 1, self.n_phi - 1)

    def nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened ``(theta, phi, weight)``, theta-major, weights include ``dphi``."""
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        wt = np.outer(self.theta_weights, np.full(self.n_phi, 2 * np.pi / self.n_phi))
        return th.ravel(), ph.ravel(), wt.ravel()

    def points(self) -> list[SpherePoint]:
        th, ph, _ = self.nodes()
        return [SpherePoint(float(a), float(b)) for a, b in zip(th, ph)]

    def integrate(self, values: np.ndarray) -> complex:
        """``int f dOmega`` for samples given in :meth:`nodes` order."""
        _, _, w = self.nodes()
        return np.tensordot(w, values, axes=(0, 0))


@dataclass(frozen=True)
class SphereSamples:
    """Values of a symbol at the nodes of ``grid`` (in :meth:`SphereGrid.nodes` order)."""

    grid: SphereGrid
    values: np.ndarray = field(repr=False, compare=False)


# ---------------------------------------------------------------------------
# kernel construction


@lru_cache(maxsize=64)
def _cg_table(two_s: int) -> np.ndarray:
    """``C[l, i, j] = <s m_i; l m_j - m_i | s m_j>`` with ``m_i = s - i``."""
    dim = two_s + 1
    s = HalfInt(two_s)
    C = np.zeros((dim, dim, dim))
    for l in range(dim):
        for i in range(dim):
            for j in range(dim):
                q = i - j
                if abs(q) > l:
                    continue
                C[l, i, j] = clebsch_gordan_float(s, HalfInt(two_s - 2 * i), HalfInt(2 * l), HalfInt(2 * q),
                                                  s, HalfInt(two_s - 2 * j))
    C.setflags(write=False)
    return C


def _check_m(s: HalfInt, m: HalfInt, name: str) -> None:
    if abs(m.twice_value) > s.twice_value or (s.twice_value - m.twice_value) % 2:
        raise DomainError(f"{name}={m} is not a magnetic number of s={s}")


def _check_pattern(s: HalfInt, epsilon: SignPattern) -> None:
    if epsilon.s != s:
        raise DomainError(f"sign pattern is for s={epsilon.s}, kernel requested for s={s}")


def kernel_coefficient(s: HalfLike, epsilon: SignPattern, m: HalfLike, mprime: HalfLike,
                       point: SpherePoint) -> complex:
    """One matrix element ``Z_{m m'}(n)``, summed term by term over ``l``."""
    s, m, mprime = _spin(s), half(m), half(mprime)
    _check_pattern(s, epsilon)
    _check_m(s, m, "m")
    _check_m(s, mprime, "m'")
    q = mprime - m
    lmax = s.twice_value
    Y = spherical_harmonics_table(lmax, point.theta, point.phi)
    total = 0j
    for l in range(lmax + 1):
        if abs(q.twice_value) > 2 * l:
            continue
        cg = clebsch_gordan_float(s, m, HalfInt(2 * l), q, s, mprime)
        total += epsilon.signs[l] * math.sqrt(2 * l + 1) * cg * Y[l, lmax + int(q)]
    return math.sqrt(4 * math.pi) / (s.twice_value + 1) * total


def kernels_on_grid(s: HalfLike, epsilon: SignPattern, theta, phi) -> np.ndarray:
    """Kernel matrices at many points, shape ``(npts, 2s+1, 2s+1)``."""
    s = _spin(s)
    _check_pattern(s, epsilon)
    ts = s.twice_value
    dim = ts + 1
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    Y = spherical_harmonics_table(ts, theta, phi)  # (l, q + ts, npts)
    C = _cg_table(ts)
    weights = epsilon.as_array() * np.sqrt(2 * np.arange(dim) + 1.0)
    i, j = np.indices((dim, dim))
    Yq = Y[:, ts + (i - j), :]  # (l, i, j, npts)
    Z = np.einsum("l,lij,lijp->pij", weights, C, Yq, optimize=True)
    return math.sqrt(4 * math.pi) / dim * Z


def kernel_at(s: HalfLike, epsilon: SignPattern, point: SpherePoint) -> SpinKernel:
    """Kernel matrix ``Delta_eps(n)`` assembled from the ``Z_{mm'}`` expansion."""
    s = _spin(s)
    M = kernels_on_grid(s, epsilon, point.theta, point.phi)[0]
    return SpinKernel(s, epsilon, point, M)


def kernel_diagonal(s: HalfLike, epsilon: SignPattern, n_values: Optional[Sequence[int]] = None) -> np.ndarray:
    """``Delta_eps(s - n)`` for the requested ``n`` (default all ``0 .. 2s``).

    Each entry is the ascending-``l`` compensated sum of
    ``eps_l (2l+1)/(2s+1) <s, s-n; l 0 | s, s-n>``.
    """
    s = _spin(s)
    _check_pattern(s, epsilon)
    ts = s.twice_value
    if n_values is None:
        n_values = range(ts + 1)
    lf = log_factorials_split(2 * ts + 2)
    eps = epsilon.as_array()
    out = np.empty(len(n_values))
    for idx, n in enumerate(n_values):
        if not 0 <= n <= ts:
            raise DomainError(f"n={n} outside 0..2s")
        vals, cond = kernels.diagonal_cg(ts, n, lf)
        m = HalfInt(ts - 2 * n)

        def exact(i, m=m):
            l = i[0]
            return (2 * l + 1) / (ts + 1) * float(clebsch_gordan(s, m, HalfInt(2 * l), 0, s, m))

        vals = refine_ill_conditioned(vals, cond, exact, abs_limit=ABS_COND_LIMIT)
        out[idx] = kernels.neumaier_cumsum(eps * vals)[-1]
    return out


def pi_s(s: HalfLike, epsilon: SignPattern) -> np.ndarray:
    """The diagonal kernel at the north pole, ``diag(Delta_eps(m))``."""
    return np.diag(kernel_diagonal(s, epsilon)).astype(complex)


def kernel_via_rotation(s: HalfLike, epsilon: SignPattern, point: SpherePoint) -> SpinKernel:
    """``U(n) Pi_s U(n)^dagger``; must coincide with :func:`kernel_at`."""
    s = _spin(s)
    U = rotation_matrix(s, point)
    diag = kernel_diagonal(s, epsilon)
    return SpinKernel(s, epsilon, point, (U * diag[None, :]) @ U.conj().T)


def wigner_symbol(A: np.ndarray, s: HalfLike, epsilon: SignPattern, point: SpherePoint) -> complex:
    """``W_A(n) = Tr[Delta_eps(n) A]``."""
    s = _spin(s)
    A = np.asarray(A)
    dim = s.twice_value + 1
    if A.shape != (dim, dim):
        raise DomainError(f"operator shape {A.shape} does not match spin {s} (dimension {dim})")
    K = kernel_at(s, epsilon, point).matrix
    return complex(np.sum(K * A.T))


def sample_symbol(A: np.ndarray, s: HalfLike, epsilon: SignPattern, grid: SphereGrid) -> SphereSamples:
    """Evaluate ``W_A`` at every grid node."""
    s = _spin(s)
    A = np.asarray(A)
    dim = s.twice_value + 1
    if A.shape != (dim, dim):
        raise DomainError(f"operator shape {A.shape} does not match spin {s} (dimension {dim})")
    th, ph, _ = grid.nodes()
    K = kernels_on_grid(s, epsilon, th, ph)
    return SphereSamples(grid, np.einsum("pij,ji->p", K, A))


def _check_bandlimit(s: HalfInt, grid: SphereGrid) -> None:
    if grid.bandlimit < 2 * s.twice_value:
        raise BandlimitError(
            f"grid bandlimit {grid.bandlimit} < 4s = {2 * s.twice_value}; roundtrip would not be exact"
        )


def reconstruct_operator(samples: SphereSamples, s: HalfLike, epsilon: SignPattern) -> np.ndarray:
    """``A = (2s+1)/(4 pi) sum_i w_i W(n_i) Delta_eps(n_i)`` over the grid nodes."""
    s = _spin(s)
    _check_bandlimit(s, samples.grid)
    th, ph, w = samples.grid.nodes()
    K = kernels_on_grid(s, epsilon, th, ph)
    dim = s.twice_value + 1
    return dim / (4 * np.pi) * np.einsum("p,pij->ij", w * np.asarray(samples.values), K)


# ---------------------------------------------------------------------------
# postulate audit


@dataclass
class AuditReport:
    s: HalfInt
    mask: str
    negative_control: bool
    residuals: dict[str, float]
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return all(v < self.tolerance for v in self.residuals.values())

    def lines(self) -> list[str]:
        head = f"s={self.s} mask={self.mask or '-'} negative_control={self.negative_control}"
        body = [f"{name}: {value:.17g}" for name, value in self.residuals.items()]
        verdict = "PASS" if self.passed else "FAIL"
        return [head, *body, f"verdict: {verdict} (tolerance {self.tolerance:g})"]


def _rotate(v: np.ndarray, about: SpherePoint) -> np.ndarray:
    """Apply the SO(3) rotation represented by ``U(about)`` to ``v``."""
    k = np.array([-math.sin(about.phi), math.cos(about.phi), 0.0])
    c, sn = math.cos(about.theta), math.sin(about.theta)
    return v * c + np.cross(k, v) * sn + k * np.dot(k, v) * (1 - c)


def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (X + X.conj().T)


def audit_postulates(s: HalfLike, epsilon: SignPattern, grid: Optional[SphereGrid] = None,
                     trials: int = 5, seed: int = 0, negative_control: bool = False) -> AuditReport:
    """Check reality, normalization, covariance and the reconstruction roundtrip.

    With ``negative_control`` the diagonal ``Pi_s`` is replaced by
    ``diag((-1)**(s-m))``, i.e. a rotation by pi about z (up to a global
    phase), which is known not to give an invertible correspondence.
    """
    s = _spin(s)
    _check_pattern(s, epsilon)
    grid = grid or SphereGrid.for_spin(s)
    _check_bandlimit(s, grid)
    rng = np.random.default_rng(seed)
    dim = s.twice_value + 1

    if negative_control:
        diag = np.array([(-1.0) ** n for n in range(dim)])

        def kernel(point):
            U = rotation_matrix(s, point)
            return (U * diag[None, :]) @ U.conj().T

        th, ph, w = grid.nodes()
        grid_kernels = np.array([kernel(SpherePoint(a, b)) for a, b in zip(th, ph)])
    else:
        def kernel(point):
            return kernel_at(s, epsilon, point).matrix

        th, ph, w = grid.nodes()
        grid_kernels = kernels_on_grid(s, epsilon, th, ph)

    herm = trace = cov = roundtrip = 0.0
    for _ in range(trials):
        n = SpherePoint.random(rng)
        K = kernel(n)
        herm = max(herm, float(np.abs(K - K.conj().T).max()))
        trace = max(trace, float(abs(np.trace(K) - 1.0)))
        about = SpherePoint.random(rng)
        U = rotation_matrix(s, about)
        moved = SpherePoint.from_vector(_rotate(n.unit_vector, about))
        cov = max(cov, float(np.abs(U @ K @ U.conj().T - kernel(moved)).max()))
        A = _random_hermitian(dim, rng)
        W = np.einsum("pij,ji->p", grid_kernels, A)
        A_rec = dim / (4 * np.pi) * np.einsum("p,pij->ij", w * W, grid_kernels)
        roundtrip = max(roundtrip, float(np.abs(A_rec - A).max()))

    residuals = {
        "hermiticity": herm,
        "trace_normalization": trace,
        "covariance": cov,
        "reconstruction_roundtrip": roundtrip,
    }
    return AuditReport(s, epsilon.mask, negative_control, residuals)
