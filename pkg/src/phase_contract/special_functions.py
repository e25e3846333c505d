"""Clebsch-Gordan coefficients, spherical harmonics, Laguerre polynomials,
spin matrices and spin rotation matrices.

Conventions: Condon-Shortley phase everywhere; the spin basis is ordered by
descending magnetic number, row ``i`` holding ``|s, s - i>``.  With that
ordering the index of ``|s, s - n>`` coincides with the Fock index ``n``
used after the contraction to the oscillator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels, log_factorials_split
from .errors import DomainError
from .numbers import HalfInt, HalfLike, SqrtRational, half

__all__ = [
    "SpherePoint",
    "clebsch_gordan",
    "clebsch_gordan_float",
    "refine_ill_conditioned",
    "spherical_harmonic",
    "spherical_harmonics_table",
    "laguerre",
    "laguerre_sum_exact",
    "genlaguerre_table",
    "spin_matrices",
    "wigner_small_d",
    "rotation_matrix",
    "COND_LIMIT",
    "ABS_COND_LIMIT",
]

# Racah/d-matrix sums with sum|t|/|sum t| above this are redone exactly.
COND_LIMIT = 1.0e3
# Same test for entries that only enter sums: cond * |value| bounds the absolute error / 1e-16.
ABS_COND_LIMIT = 1.0e2


@dataclass(frozen=True)
class SpherePoint:
    """Point ``n = (sin t cos p, sin t sin p, cos t)`` on the unit sphere."""

    theta: float
    phi: float

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "SpherePoint":
        x, y, z = (float(c) for c in v)
        r = math.sqrt(x * x + y * y + z * z)
        theta = math.acos(max(-1.0, min(1.0, z / r)))
        phi = math.atan2(y, x) % (2 * math.pi)
        return cls(theta, phi)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SpherePoint":
        """Uniformly distributed point."""
        return cls(math.acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2 * math.pi))


NORTH_POLE = SpherePoint(0.0, 0.0)


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients


def _check_magnetic(j: HalfInt, m: HalfInt, name: str) -> None:
    if j.twice_value < 0:
        raise DomainError(f"{name}: angular momentum must be >= 0, got {j}")
    if abs(m.twice_value) > j.twice_value or (j.twice_value - m.twice_value) % 2:
        raise DomainError(f"{name}: magnetic number {m} not allowed for j = {j}")


def _selection(j1, m1, j2, m2, J, M, strict):
    """Validate arguments; return False when the coefficient vanishes by rule."""
    _check_magnetic(j1, m1, "j1")
    _check_magnetic(j2, m2, "j2")
    _check_magnetic(J, M, "J")
    triangle = (
        abs(j1.twice_value - j2.twice_value) <= J.twice_value <= j1.twice_value + j2.twice_value
        and (j1.twice_value + j2.twice_value + J.twice_value) % 2 == 0
    )
    if not triangle:
        if strict:
            raise DomainError(f"triangle rule violated for ({j1}, {j2}, {J})")
        return False
    return M.twice_value == m1.twice_value + m2.twice_value


@lru_cache(maxsize=4096)
def _fact(n: int) -> int:
    return math.factorial(n)


def _racah_exact(tj1, tm1, tj2, tm2, tJ, tM) -> SqrtRational:
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tj2 + tJ) // 2
    c = (-tj1 + tj2 + tJ) // 2
    d = (tj1 + tj2 + tJ) // 2 + 1
    j1mm1 = (tj1 - tm1) // 2
    j2pm2 = (tj2 + tm2) // 2
    e = (tJ - tj2 + tm1) // 2
    f = (tJ - tj1 - tm2) // 2
    kmin, kmax = max(0, -e, -f), min(a, j1mm1, j2pm2)
    # integer numerator over the common denominator a! (j1-m1)! (j2+m2)! (e+kmax)! (f+kmax)!
    t = (math.comb(a, kmin) * math.perm(j1mm1, kmin) * math.perm(j2pm2, kmin)
         * math.perm(e + kmax, kmax - kmin) * math.perm(f + kmax, kmax - kmin))
    num = 0
    for k in range(kmin, kmax + 1):
        num += -t if k % 2 else t
        # successive terms are integers, so the division is exact
        t = t * (a - k) * (j1mm1 - k) * (j2pm2 - k) // ((k + 1) * (e + k + 1) * (f + k + 1))
    if num == 0:
        return SqrtRational.zero()
    total = Fraction(num, _fact(a) * _fact(j1mm1) * _fact(j2pm2) * _fact(e + kmax) * _fact(f + kmax))
    if total == 0:
        return SqrtRational.zero()
    radicand = Fraction(
        (tJ + 1) * _fact(a) * _fact(b) * _fact(c)
        * _fact((tJ + tM) // 2) * _fact((tJ - tM) // 2)
        * _fact((tj1 + tm1) // 2) * _fact(j1mm1)
        * _fact(j2pm2) * _fact((tj2 - tm2) // 2),
        _fact(d),
    )
    return SqrtRational.signed_sqrt(1 if total > 0 else -1, radicand * total * total)


def clebsch_gordan(
    j1: HalfLike, m1: HalfLike, j2: HalfLike, m2: HalfLike, J: HalfLike, M: HalfLike,
    strict: bool = False,
) -> SqrtRational:
    """Exact ``<j1 m1; j2 m2 | J M>`` (Racah closed form, Condon-Shortley phase).

    Returns an exact zero when ``M != m1 + m2`` or, unless ``strict``, when
    the triangle rule fails.  Magnetic numbers outside ``[-j, j]`` always
    raise :class:`DomainError`.

    >>> str(clebsch_gordan(half("1/2"), half("1/2"), half("1/2"), half("-1/2"), 0, 0))
    '+sqrt(1/2)'
    """
    j1, m1, j2, m2, J, M = (half(x) for x in (j1, m1, j2, m2, J, M))
    if not _selection(j1, m1, j2, m2, J, M, strict):
        return SqrtRational.zero()
    return _racah_exact(
        j1.twice_value, m1.twice_value, j2.twice_value, m2.twice_value, J.twice_value, M.twice_value
    )


def clebsch_gordan_float(
    j1: HalfLike, m1: HalfLike, j2: HalfLike, m2: HalfLike, J: HalfLike, M: HalfLike,
    strict: bool = False,
) -> float:
    """Floating-point ``<j1 m1; j2 m2 | J M>`` via log-domain factorials.

    Ill-conditioned Racah sums (heavy cancellation, typical for large ``j``
    near ``m = 0``) are recomputed with the exact path before rounding.
    """
    j1, m1, j2, m2, J, M = (half(x) for x in (j1, m1, j2, m2, J, M))
    if not _selection(j1, m1, j2, m2, J, M, strict):
        return 0.0
    args = (j1.twice_value, m1.twice_value, j2.twice_value, m2.twice_value, J.twice_value, M.twice_value)
    lf = log_factorials_split((args[0] + args[2] + args[4]) // 2 + 2)
    value, cond = kernels.cg_float(*args, lf)
    if cond > COND_LIMIT:
        return float(_racah_exact(*args))
    return value


def refine_ill_conditioned(values: np.ndarray, cond: np.ndarray, exact,
                           abs_limit: Optional[float] = None) -> np.ndarray:
    """Replace entries whose float evaluation is not trustworthy.

    By default an entry is refined when its condition estimate exceeds
    :data:`COND_LIMIT` (relative accuracy).  With ``abs_limit`` the test is
    ``cond * |value| > abs_limit`` instead, which bounds the absolute error
    by about ``abs_limit * 1e-16``; that is the right test for entries that
    only enter sums.  ``exact(index)`` must return the exact value of
    ``values[index]``.
    """
    if abs_limit is None:
        bad = np.argwhere(~(cond <= COND_LIMIT))
    else:
        with np.errstate(invalid="ignore"):  # inf * 0 marks an exact cancellation: refine
            bad = np.argwhere(~(cond * np.abs(values) <= abs_limit))
    if bad.size == 0:
        return values
    values = values.copy()
    for idx in (tuple(int(i) for i in row) for row in bad):
        values[idx] = float(exact(idx))
    return values


# ---------------------------------------------------------------------------
# Spherical harmonics


def _legendre_normalized(lmax: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre functions ``P[l, m]`` for ``m >= 0``.

    ``Y_lm(t, p) = P[l, m](cos t) * exp(i m p)``; the Condon-Shortley phase
    is included.  Standard stable recursion in ``l`` at fixed ``m``.
    """
    x = np.asarray(x, dtype=float)
    sint = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((lmax + 1, lmax + 1) + x.shape)
    P[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, lmax + 1):
        P[m, m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sint * P[m - 1, m - 1]
    for m in range(0, lmax):
        P[m + 1, m] = math.sqrt(2.0 * m + 3.0) * x * P[m, m]
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


def spherical_harmonics_table(lmax: int, theta, phi) -> np.ndarray:
    """All ``Y_lm`` up to ``lmax``, shape ``(lmax+1, 2*lmax+1, ...)``.

    Entry ``[l, lmax + m]`` is ``Y_lm``; entries with ``|m| > l`` are zero.
    ``theta`` and ``phi`` broadcast against each other.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    P = _legendre_normalized(lmax, np.cos(theta))
    Y = np.zeros((lmax + 1, 2 * lmax + 1) + theta.shape, dtype=complex)
    for m in range(0, lmax + 1):
        phase = np.exp(1j * m * phi)
        for l in range(m, lmax + 1):
            Y[l, lmax + m] = P[l, m] * phase
            if m:
                Y[l, lmax - m] = (-1) ** m * np.conj(Y[l, lmax + m])
    return Y


def spherical_harmonic(l: int, m: int, point: SpherePoint) -> complex:
    """Orthonormal ``Y_lm`` at ``point`` with the Condon-Shortley phase."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"spherical harmonic needs |m| <= l, got l={l}, m={m}")
    return complex(spherical_harmonics_table(l, point.theta, point.phi)[l, l + m])


# ---------------------------------------------------------------------------
# Laguerre polynomials


def laguerre_sum_exact(n: int, x: float, k: int = 0) -> float:
    """``L_n^(k)(x)`` from the explicit finite sum, in exact rational arithmetic.

    The float ``x`` is converted exactly, so the only rounding is the final
    conversion back to float.
    """
    xf = Fraction(x)
    total = Fraction(0)
    power = Fraction(1)
    for i in range(n + 1):
        total += math.comb(n + k, n - i) * power / _fact(i)
        power *= -xf
    return float(total)


def genlaguerre_table(n_max: int, k: int, x) -> np.ndarray:
    """``L_n^(k)(x)`` for ``n = 0 .. n_max`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + k - x
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + 1 + k - x) * out[n] - (n + k) * out[n - 1]) / (n + 1)
    return out


def laguerre(n: int, x, k: int = 0):
    """Laguerre polynomial ``L_n(x)`` (generalized ``L_n^(k)`` when ``k > 0``).

    For scalar ``x`` and ``n <= 20`` the explicit alternating sum is used,
    evaluated exactly; above that, and for array input, the three-term
    recurrence.
    """
    if n < 0:
        raise DomainError("Laguerre degree must be >= 0")
    if k < 0:
        raise DomainError("Laguerre parameter must be >= 0")
    if np.ndim(x) == 0 and n <= 20:
        return laguerre_sum_exact(n, float(x), k)
    result = genlaguerre_table(n, k, x)[n]
    return float(result) if np.ndim(x) == 0 else result


# ---------------------------------------------------------------------------
# Spin matrices and rotations


def _as_spin(s: HalfLike) -> HalfInt:
    s = half(s)
    if s.twice_value < 0:
        raise DomainError(f"spin must be >= 0, got {s}")
    return s


def spin_matrices(s: HalfLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Sz, S+, S-)`` in the basis ``|s, s>, |s, s-1>, ..., |s, -s>``."""
    s = _as_spin(s)
    ts = s.twice_value
    m = np.array([(ts - 2 * i) / 2 for i in range(ts + 1)])
    sf = ts / 2
    Sz = np.diag(m).astype(complex)
    Splus = np.zeros((ts + 1, ts + 1), dtype=complex)
    for i in range(1, ts + 1):
        # S+ |m_i> = sqrt(s(s+1) - m_i(m_i+1)) |m_i + 1>, and m_i + 1 sits at row i-1
        Splus[i - 1, i] = math.sqrt(sf * (sf + 1) - m[i] * (m[i] + 1))
    return Sz, Splus, Splus.T.copy()


def _d_exact(tj: int, tmp: int, tm: int, theta: float) -> float:
    """Single d-matrix element with exact rational factorial weights."""
    jpm, jmm, jpmp, jmmp = (tj + tm) // 2, (tj - tm) // 2, (tj + tmp) // 2, (tj - tmp) // 2
    dm = (tmp - tm) // 2
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    terms = []
    for k in range(max(0, -dm), min(jpm, jmmp) + 1):
        w = Fraction(1, _fact(jpm - k) * _fact(k) * _fact(dm + k) * _fact(jmmp - k))
        terms.append((-1) ** (dm + k) * w * Fraction(c) ** (tj - dm - 2 * k) * Fraction(s) ** (dm + 2 * k))
    total = sum(terms, Fraction(0))
    if total == 0:
        return 0.0
    radicand = total * total * (_fact(jpmp) * _fact(jmmp) * _fact(jpm) * _fact(jmm))
    return float(SqrtRational.signed_sqrt(1 if total > 0 else -1, radicand))


def _d_rows_closed(s: HalfInt, theta: float, rows: range):
    tj = s.twice_value
    lf = log_factorials_split(tj + 2)
    d, cond = kernels.wigner_d_rows(tj, float(theta), rows.start, rows.stop, lf)

    def exact(idx):
        r, k = idx
        return _d_exact(tj, tj - 2 * (rows.start + r), tj - 2 * k, float(theta))

    return d, cond, exact


def wigner_small_d(s: HalfLike, theta: float, rows: Optional[range] = None) -> np.ndarray:
    """Wigner ``d^s_{m'm}(theta)``, row ``i`` = ``m' = s - i``, column ``k`` = ``m = s - k``.

    Closed factorial form; entries whose sum is ill-conditioned are redone
    in exact arithmetic, which gets slow when there are many of them (large
    ``s`` with ``theta`` not small).  ``rows`` restricts the computation to a
    contiguous range of row indices.  Rows near the top (``m'`` close to
    ``s``) have short sums and stay well-conditioned for very large ``s``.
    """
    s = _as_spin(s)
    if rows is None:
        rows = range(0, s.twice_value + 1)
    d, cond, exact = _d_rows_closed(s, theta, rows)
    return refine_ill_conditioned(d, cond, exact)


def _rotation_expm(s: HalfInt, point: SpherePoint) -> np.ndarray:
    _, Sp, Sm = spin_matrices(s)
    Sx = 0.5 * (Sp + Sm)
    Sy = -0.5j * (Sp - Sm)
    H = -math.sin(point.phi) * Sx + math.cos(point.phi) * Sy
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * point.theta * w)) @ V.conj().T


# Above this many ill-conditioned entries "auto" switches to diagonalization.
_EXACT_REFINE_BUDGET = 32


def rotation_matrix(s: HalfLike, point: SpherePoint, method: str = "auto",
                    rows: Optional[range] = None) -> np.ndarray:
    """``U(n) = exp(-i theta k.S)`` with ``k = (-sin phi, cos phi, 0)``.

    ``U`` maps ``Sz`` to ``n.S``.  Methods:

    * ``"closed"``: ``exp(-i m' phi) d_{m'm}(theta) exp(i m phi)`` from the
      factorial form, ill-conditioned entries redone exactly;
    * ``"expm"``: exponentiate by diagonalizing ``k.S``;
    * ``"auto"``: closed form unless more than a handful of entries are
      ill-conditioned, then ``"expm"``.

    Any real ``theta`` is used as is: ``theta + 4 pi`` gives the same matrix,
    ``theta + 2 pi`` gives ``(-1)^(2s) U``.
    """
    s = _as_spin(s)
    tj = s.twice_value
    if rows is None:
        rows = range(0, tj + 1)
    if method not in ("auto", "closed", "expm"):
        raise ValueError(f"unknown method {method!r}")
    if method == "expm":
        return _rotation_expm(s, point)[rows.start:rows.stop]
    d, cond, exact = _d_rows_closed(s, point.theta, rows)
    if method == "auto" and np.count_nonzero(~(cond <= COND_LIMIT)) > _EXACT_REFINE_BUDGET:
        return _rotation_expm(s, point)[rows.start:rows.stop]
    d = refine_ill_conditioned(d, cond, exact)
    m_col = np.array([(tj - 2 * k) / 2 for k in range(tj + 1)])
    m_row = m_col[rows.start:rows.stop]
    return np.exp(-1j * m_row * point.phi)[:, None] * d * np.exp(1j * m_col * point.phi)[None, :]
