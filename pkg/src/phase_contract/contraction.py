"""Contraction of SU(2) to the Heisenberg-Weyl group, numerically.

With ``c = 1/sqrt(2s)`` the operators ``A+ = c S-``, ``A- = c S+`` and
``Az = -Sz + 1/(2c^2)`` become ``a^+, a, N`` as ``s -> infinity``, the
state ``|s, s-n>`` becomes ``|n>`` (same row index in our basis ordering)
and ``U(n)`` at ``theta = 2c|alpha|, phi = arg(alpha)`` becomes
``T(alpha)``.

The diagonal of the spin kernel splits into terms

    Delta^s_{l,n} = sqrt((2l+1)/(2s+1)) <s, s-n; s, n-s | l 0>,

and the two coupling orders are related termwise by

    (2l+1)/(2s+1) <s, s-n; l 0 | s, s-n> = (-1)^n Delta^s_{l,n},

so ``S(s, n) = sum_l eps_l Delta^s_{l,n} -> 2`` for the all-plus pattern
is the same statement as ``Delta_eps(s-n) -> 2 (-1)^n = <n|2 Pi|n>``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from ._backend import kernels, log_factorials_split, ordered_map
from .errors import AngleOverflowWarning, DomainError, PreconditionError, QuadratureError
from .numbers import HalfInt, HalfLike, SqrtRational, half
from .particle_kernel import FockSpace, particle_kernel
from .special_functions import (
    ABS_COND_LIMIT,
    SpherePoint,
    clebsch_gordan,
    laguerre,
    refine_ill_conditioned,
    rotation_matrix,
    spin_matrices,
)
from .spin_kernel import SignPattern, kernel_diagonal

__all__ = [
    "ContractionScale",
    "TermTable",
    "SweepReport",
    "contracted_operators",
    "contracted_rotation",
    "term_delta",
    "term_delta_exact",
    "term_row",
    "asymptotic_term",
    "contraction_sum",
    "lambda_recursion",
    "laguerre_integral",
    "riemann_sum",
    "diagonal_limit",
    "coupling_order_residual",
    "cg_recursion_residual",
    "cg_coupling_table",
    "cg_recursion_max_residual",
    "kernel_block_compare",
    "convergence_verdict",
    "epsilon_sweep",
]

CONVERGENCE_GATE = 0.05


def _spin(s: HalfLike) -> HalfInt:
    s = half(s)
    if s.twice_value <= 0:
        raise DomainError(f"contraction needs s > 0, got {s}")
    return s


@dataclass(frozen=True)
class ContractionScale:
    """Spin ``s`` and contraction parameter ``c`` with ``2 c^2 s = 1``."""

    s: HalfInt
    c: float

    @classmethod
    def for_spin(cls, s: HalfLike) -> "ContractionScale":
        s = _spin(s)
        return cls(s, 1.0 / math.sqrt(s.twice_value))

    def __post_init__(self):
        if abs(self.c * self.c * self.s.twice_value - 1.0) > 1e-12:
            raise PreconditionError(f"c={self.c} does not satisfy 2 c^2 s = 1 for s={self.s}")


def _guard_n(s: HalfInt, n: int, what: str = "n") -> None:
    if n < 0:
        raise DomainError(f"{what} must be >= 0")
    if 10 * 2 * n > s.twice_value and n > 0:
        raise PreconditionError(f"{what}={n} exceeds s/10 for s={s}; asymptotic regime not reached")


# ---------------------------------------------------------------------------
# operators


def contracted_operators(s: HalfLike, scale: Optional[ContractionScale] = None):
    """``(A+, A-, Az)`` in the ``|s, s-n>`` basis."""
    s = _spin(s)
    scale = scale or ContractionScale.for_spin(s)
    if scale.s != s:
        raise PreconditionError(f"scale is for s={scale.s}, not {s}")
    Sz, Sp, Sm = spin_matrices(s)
    c = scale.c
    Az = -Sz + np.eye(s.twice_value + 1) / (2 * c * c)
    return c * Sm, c * Sp, Az


def contracted_rotation(s: HalfLike, alpha: complex, rows: Optional[range] = None) -> np.ndarray:
    """``U(n)`` at ``theta = 2c|alpha|``, ``phi = arg(alpha)``; tends to ``T(alpha)``."""
    s = _spin(s)
    c = ContractionScale.for_spin(s).c
    theta = 2 * c * abs(alpha)
    if theta > math.pi:
        warnings.warn(f"rotation angle {theta:.3g} > pi for s={s}, alpha={alpha}", AngleOverflowWarning,
                      stacklevel=2)
    phi = math.atan2(alpha.imag, alpha.real) % (2 * math.pi) if alpha else 0.0
    return rotation_matrix(s, SpherePoint(theta, phi), rows=rows)


# ---------------------------------------------------------------------------
# terms of the diagonal sum


def _check_ln(s: HalfInt, l: int, n: int) -> None:
    if not 0 <= l <= s.twice_value:
        raise DomainError(f"l={l} outside 0..2s")
    if not 0 <= n <= s.twice_value:
        raise DomainError(f"n={n} outside 0..2s")


def term_delta_exact(s: HalfLike, l: int, n: int) -> SqrtRational:
    """Exact ``Delta^s_{l,n}``."""
    s = half(s)
    _check_ln(s, l, n)
    m = s - n
    cg = clebsch_gordan(s, m, s, -m, HalfInt(2 * l), 0)
    return cg * SqrtRational.signed_sqrt(1, Fraction(2 * l + 1, s.twice_value + 1))


def term_row(s: HalfLike, n: int) -> np.ndarray:
    """``Delta^s_{l,n}`` for ``l = 0 .. 2s`` (log-domain, exact where ill-conditioned)."""
    s = half(s)
    _check_ln(s, 0, n)
    ts = s.twice_value
    terms, cond = kernels.term_deltas(ts, n, log_factorials_split(2 * ts + 2))
    return refine_ill_conditioned(terms, cond, lambda idx: term_delta_exact(s, idx[0], n),
                                  abs_limit=ABS_COND_LIMIT)


def term_delta(s: HalfLike, l: int, n: int) -> float:
    """Float ``Delta^s_{l,n}``."""
    s = half(s)
    _check_ln(s, l, n)
    return float(term_row(s, n)[l])


def asymptotic_term(s: HalfLike, l: int) -> float:
    """Large-``s`` form ``(2l+1)/(2s+1) exp(-l(l+1)/(2(2s+1)))`` of ``Delta^s_{l,0}``."""
    N = half(s).twice_value + 1
    return (2 * l + 1) / N * math.exp(-0.5 * l * (l + 1) / N)


@dataclass(frozen=True)
class TermTable:
    s: HalfInt
    n: int
    epsilon: SignPattern
    x: np.ndarray = field(repr=False, compare=False)
    terms: np.ndarray = field(repr=False, compare=False)
    partial_sums: np.ndarray = field(repr=False, compare=False)

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1])

    @property
    def error(self) -> float:
        """Distance of the total from the limit value 2."""
        return abs(self.total - 2.0)


def contraction_sum(s: HalfLike, n: int, epsilon: Optional[SignPattern] = None) -> TermTable:
    """``S(s, n) = sum_l eps_l Delta^s_{l,n}`` with its running sums (ascending ``l``)."""
    s = _spin(s)
    _guard_n(s, n)
    epsilon = epsilon or SignPattern.all_plus(s)
    if epsilon.s != s:
        raise DomainError(f"sign pattern is for s={epsilon.s}, not {s}")
    terms = epsilon.as_array() * term_row(s, n)
    l = np.arange(s.twice_value + 1)
    x = l * (l + 1) / (s.twice_value + 1.0)
    return TermTable(s, n, epsilon, x, terms, kernels.neumaier_cumsum(terms))


def diagonal_limit(s: HalfLike, n: int, epsilon: Optional[SignPattern] = None) -> float:
    """``Delta_eps(s - n)``; its large-``s`` target is ``<n|2 Pi|n> = 2 (-1)^n``."""
    s = half(s)
    if s.twice_value < 0:
        raise DomainError("negative spin")
    _guard_n(s, n)
    epsilon = epsilon or SignPattern.all_plus(s)
    return float(kernel_diagonal(s, epsilon, [n])[0])


def coupling_order_residual(s: HalfLike, n: int, exact: bool = False):
    """Compare the two coupling orders termwise for ``l = 0 .. 2s``.

    Returns ``max_l |(2l+1)/(2s+1) <s m; l 0|s m> - (-1)^n Delta^s_{l,n}|`` with
    ``m = s - n``; with ``exact=True`` the list of exact differences is
    returned instead (all zero when the relation holds).
    """
    s = half(s)
    m = s - n
    N = s.twice_value + 1
    if exact:
        diffs = []
        for l in range(s.twice_value + 1):
            lhs = clebsch_gordan(s, m, HalfInt(2 * l), 0, s, m) * Fraction(2 * l + 1, N)
            rhs = term_delta_exact(s, l, n) * (-1) ** n
            diffs.append(lhs - rhs)
        return diffs
    vals, cond = kernels.diagonal_cg(s.twice_value, n, log_factorials_split(2 * s.twice_value + 2))
    vals = refine_ill_conditioned(
        vals, cond,
        lambda idx: Fraction(2 * idx[0] + 1, N) * clebsch_gordan(s, m, HalfInt(2 * idx[0]), 0, s, m),
        abs_limit=ABS_COND_LIMIT,
    )
    return float(np.abs(vals - (-1) ** n * term_row(s, n)).max())


def cg_recursion_residual(s: HalfLike, l: int, m: HalfLike, exact: bool = False):
    """Residual of the three-term recursion in ``m`` for ``<s m; s -m | l 0>``.

    ``[l(l+1) - 2s(s+1) + 2m^2] C(m) - [s(s+1) - m(m+1)] C(m+1)
    - [s(s+1) - m(m-1)] C(m-1)``; exact zero (as :class:`SqrtRational`)
    with ``exact=True``.
    """
    s, m = half(s), half(m)
    if abs(m.twice_value) > s.twice_value:
        raise DomainError(f"m={m} outside [-s, s]")
    L = HalfInt(2 * l)
    sf, mf = s.as_fraction(), m.as_fraction()

    def C(mm: HalfInt):
        if abs(mm.twice_value) > s.twice_value:
            return SqrtRational.zero() if exact else 0.0
        if exact:
            return clebsch_gordan(s, mm, s, -mm, L, 0)
        from .special_functions import clebsch_gordan_float

        return clebsch_gordan_float(s, mm, s, -mm, L, 0)

    a = l * (l + 1) - 2 * sf * (sf + 1) + 2 * mf * mf
    b = sf * (sf + 1) - mf * (mf + 1)
    d = sf * (sf + 1) - mf * (mf - 1)
    if exact:
        return C(m) * a - C(m + 1) * b - C(m - 1) * d
    return float(a) * C(m) - float(b) * C(m + 1) - float(d) * C(m - 1)


def cg_coupling_table(s: HalfLike) -> np.ndarray:
    """``C[n, l] = <s, s-n; s, n-s | l 0>`` for ``n, l = 0 .. 2s`` (float, exact where ill-conditioned)."""
    s = _spin(s)
    ts = s.twice_value
    lf = log_factorials_split(2 * ts + 2)
    weights = np.sqrt((2 * np.arange(ts + 1) + 1) / (ts + 1.0))
    rows = []
    for n in range(ts + 1):
        terms, cond = kernels.term_deltas(ts, n, lf)
        m = s - n
        rows.append(refine_ill_conditioned(
            terms / weights, cond, lambda idx, m=m: clebsch_gordan(s, m, s, -m, HalfInt(2 * idx[0]), 0)))
    return np.array(rows)


def cg_recursion_max_residual(s: HalfLike) -> float:
    """Largest float residual of :func:`cg_recursion_residual` over all ``l`` and ``m``."""
    s = _spin(s)
    ts = s.twice_value
    C = cg_coupling_table(s)
    pad = np.zeros((ts + 3, ts + 1))
    pad[1:-1] = C
    l = np.arange(ts + 1)[None, :]
    m = (ts - 2 * np.arange(ts + 1))[:, None] / 2.0
    j = ts / 2.0
    a = l * (l + 1) - 2 * j * (j + 1) + 2 * m * m
    b = j * (j + 1) - m * (m + 1)  # multiplies C(m+1), one row up
    d = j * (j + 1) - m * (m - 1)  # multiplies C(m-1), one row down
    res = a * C - b * pad[:-2] - d * pad[2:]
    return float(np.abs(res).max())


# ---------------------------------------------------------------------------
# Laguerre machinery


def lambda_recursion(n_max: int, x: float) -> np.ndarray:
    """``Lambda_0 .. Lambda_{n_max}`` from ``(n+1) L_{n+1} + (2n+1) L_n + n L_{n-1} = x L_n``, ``Lambda_0 = 1``."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    out = np.empty(n_max + 1)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x - 1.0
    for n in range(1, n_max):
        out[n + 1] = ((x - 2 * n - 1) * out[n] - n * out[n - 1]) / (n + 1)
    return out


def laguerre_integral(n: int, t: float, tol: float = 1e-12) -> float:
    """``int_0^inf L_n(x) exp(-x/t) dx`` by adaptive quadrature (closed form ``t (1-t)^n``)."""
    if t <= 0:
        raise DomainError("t must be > 0")
    if n < 0:
        raise DomainError("n must be >= 0")
    value, err = integrate.quad(lambda x: laguerre(n, x) * math.exp(-x / t), 0.0, math.inf,
                                epsabs=tol * t, epsrel=tol, limit=400)
    if not math.isfinite(value) or err > 1e3 * tol * max(1.0, t, abs(value)):
        raise QuadratureError(f"Laguerre integral did not converge (value {value}, error {err})")
    return value


def riemann_sum(s: HalfLike, n: int) -> float:
    """``(-1)^n sum_l dx_l L_n(x_l) exp(-x_l/2)``, ``dx_l = (2l+1)/(2s+1)``; tends to 2."""
    N = half(s).twice_value + 1
    l = np.arange(N)
    x = l * (l + 1) / N
    vals = (2 * l + 1) / N * laguerre(n, x) * np.exp(-x / 2)
    return (-1) ** n * math.fsum(vals)


# ---------------------------------------------------------------------------
# kernel block convergence


def _spin_block(s: HalfInt, alpha: complex, block: int, epsilon: SignPattern, cutoff: float = 1e-17):
    """Top-left ``(block+1)^2`` corner of ``U Pi_s U^dagger`` at the contracted angle.

    Column ``k`` contributes at most ``2 |U_ik| |U_jk|``, so columns whose
    squared weight is below ``cutoff`` are dropped.
    """
    U = contracted_rotation(s, alpha, rows=range(0, block + 1))
    weight = np.abs(U).max(axis=0)
    keep = np.nonzero(weight**2 > cutoff)[0]
    K = int(keep.max()) + 1
    diag = kernel_diagonal(s, epsilon, range(K))
    Uk = U[:, :K]
    return (Uk * diag[None, :]) @ Uk.conj().T


def kernel_block_compare(s: HalfLike, alpha: complex, block: int,
                         epsilon: Optional[SignPattern] = None, n_max: Optional[int] = None) -> float:
    """Max-abs deviation between the contracted spin kernel and ``Delta(alpha)`` on a corner block.

    Columns of ``U`` whose squared weight is below ``1e-17`` are dropped
    before forming ``U Pi_s U^dagger``; the particle kernel entries are exact, so
    ``n_max`` only needs to cover the block.
    """
    s = _spin(s)
    _guard_n(s, block, "block")
    epsilon = epsilon or SignPattern.all_plus(s)
    if epsilon.s != s:
        raise DomainError(f"sign pattern is for s={epsilon.s}, not {s}")
    n_max = block if n_max is None else n_max
    if n_max < block:
        raise PreconditionError("n_max must cover the compared block")
    spin = _spin_block(s, complex(alpha), block, epsilon)
    particle = particle_kernel(FockSpace(n_max), complex(alpha))[: block + 1, : block + 1]
    return float(np.abs(spin - particle).max())


# ---------------------------------------------------------------------------
# uniqueness sweep


def convergence_verdict(distances: Sequence[float], gate: float = CONVERGENCE_GATE) -> bool:
    """``True`` iff distances strictly decrease along the ladder and end below ``gate``.

    The ladder must have at least four rungs (three doublings).
    """
    if len(distances) < 4:
        raise PreconditionError("verdict needs at least three consecutive doublings (4 rungs)")
    decreasing = all(b < a for a, b in zip(distances, distances[1:]))
    return decreasing and distances[-1] < gate


@dataclass
class SweepReport:
    s_ladder: list[float]
    n_list: list[int]
    entries: list[dict]

    def converging_masks(self) -> list[str]:
        return [e["mask"] for e in self.entries if e["verdict"] == "CONVERGES"]

    def to_json(self) -> dict:
        return {"s_ladder": self.s_ladder, "n_list": self.n_list, "patterns": self.entries}


def epsilon_sweep(s_list: Sequence[HalfLike], n_list: Sequence[int],
                  patterns: Sequence[SignPattern]) -> SweepReport:
    """Convergence verdict of ``Delta_eps(s-n)`` towards ``2 (-1)^n`` for each pattern.

    Each pattern is extended to the spins of the ladder by periodic tiling
    (:meth:`SignPattern.tiled`).  Work is spread over
    ``PHASE_CONTRACT_THREADS`` threads; results are assembled in input order.
    """
    ladder = [_spin(s) for s in s_list]
    patterns = list(patterns)
    for s in ladder:
        for n in n_list:
            _guard_n(s, n)
    jobs = [(p, s, n) for p in patterns for s in ladder for n in n_list]

    def run(job):
        p, s, n = job
        return abs(float(kernel_diagonal(s, p.tiled(s), [n])[0]) - 2.0 * (-1) ** n)

    dist = ordered_map(run, jobs)

    entries = []
    it = iter(dist)
    for p in patterns:
        per_n = {n: [] for n in n_list}
        for _s in ladder:
            for n in n_list:
                per_n[n].append(next(it))
        ok = all(convergence_verdict(per_n[n]) for n in n_list)
        entries.append({
            "mask": p.mask,
            "two_s": p.s.twice_value,
            "all_plus": p.is_all_plus,
            "verdict": "CONVERGES" if ok else "NOT-CONVERGES",
            "distances": {str(n): per_n[n] for n in n_list},
        })
    return SweepReport([float(s) for s in ladder], list(n_list), entries)
