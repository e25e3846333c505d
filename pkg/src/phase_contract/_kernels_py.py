"""Pure-Python implementations of the hot numerical kernels.

Every function here has a twin with the same signature in the compiled
``_kernels`` extension.  Quantum numbers are passed doubled (``tj = 2j``)
and ``lf`` is the split ``(2, N)`` table of ``log(k!)`` from
:func:`phase_contract._backend.log_factorials_split`.

Factorial sums are evaluated in the log domain: each term is
``sign * exp(log_term - log_max)`` and the scaled terms are summed with
``math.fsum``.  The grid-aligned head of each logarithm is differenced
exactly, which keeps ratios of huge factorials accurate to a few ulp.  Along with the value, the CG/d-matrix kernels report a
condition estimate ``sum|t_k| / |sum t_k|`` so callers can detect
cancellation and switch to exact arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def _scaled_sum(heads, tails, signs):
    """Sum ``sign * exp(head + tail)`` relative to the largest term.

    ``heads`` are exact (grid-aligned) parts of the logarithms, so
    ``head_k - head_top`` is exact.  Returns ``(total, log_top_head,
    log_top_tail, cond)`` with the true sum ``total * exp(head + tail)``.
    """
    i = max(range(len(heads)), key=lambda k: heads[k] + tails[k])
    h0, t0 = heads[i], tails[i]
    scaled = [s * math.exp((h - h0) + (t - t0)) for h, t, s in zip(heads, tails, signs)]
    total = math.fsum(scaled)
    if total == 0.0:
        return 0.0, h0, t0, math.inf
    return total, h0, t0, math.fsum(abs(x) for x in scaled) / abs(total)


def cg_float(tj1, tm1, tj2, tm2, tJ, tM, lf):
    """Clebsch-Gordan coefficient by the Racah sum; returns ``(value, cond)``.

    Arguments must already satisfy the selection rules (triangle, parity,
    ``M = m1 + m2``, ranges); this is not re-checked here.
    """
    hi, lo = lf[0], lf[1]
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tj2 + tJ) // 2
    c = (-tj1 + tj2 + tJ) // 2
    d = (tj1 + tj2 + tJ) // 2 + 1
    j1pm1 = (tj1 + tm1) // 2
    j1mm1 = (tj1 - tm1) // 2
    j2pm2 = (tj2 + tm2) // 2
    j2mm2 = (tj2 - tm2) // 2
    JpM = (tJ + tM) // 2
    JmM = (tJ - tM) // 2
    idx = (a, b, c, JpM, JmM, j1pm1, j1mm1, j2pm2, j2mm2)
    pref_h = 0.5 * (sum(hi[i] for i in idx) - hi[d])
    pref_t = 0.5 * (sum(lo[i] for i in idx) - lo[d] + math.log(tJ + 1))
    # (J - j2 + m1) and (J - j1 - m2)
    e = (tJ - tj2 + tm1) // 2
    f = (tJ - tj1 - tm2) // 2
    kmin = max(0, -e, -f)
    kmax = min(a, j1mm1, j2pm2)
    if kmin > kmax:
        return 0.0, 1.0
    heads, tails, signs = [], [], []
    for k in range(kmin, kmax + 1):
        ks = (k, a - k, j1mm1 - k, j2pm2 - k, e + k, f + k)
        heads.append(-sum(hi[i] for i in ks))
        tails.append(-sum(lo[i] for i in ks))
        signs.append(-1.0 if k % 2 else 1.0)
    total, h0, t0, cond = _scaled_sum(heads, tails, signs)
    if total == 0.0:
        return 0.0, cond
    log_val = (pref_h + h0) + (pref_t + t0) + math.log(abs(total))
    if log_val > 709.78:
        raise OverflowError("Clebsch-Gordan magnitude exceeds float range")
    return math.copysign(math.exp(log_val), total), cond


def _d_element(tj, tmp, tm, log_c, sgn_c, log_s, sgn_s, lf):
    hi, lo = lf[0], lf[1]
    jpm = (tj + tm) // 2
    jmm = (tj - tm) // 2
    jpmp = (tj + tmp) // 2
    jmmp = (tj - tmp) // 2
    dm = (tmp - tm) // 2  # m' - m
    pref_h = 0.5 * (hi[jpmp] + hi[jmmp] + hi[jpm] + hi[jmm])
    pref_t = 0.5 * (lo[jpmp] + lo[jmmp] + lo[jpm] + lo[jmm])
    kmin = max(0, -dm)
    kmax = min(jpm, jmmp)
    heads, tails, signs = [], [], []
    for k in range(kmin, kmax + 1):
        pc = tj - dm - 2 * k  # 2j + m - m' - 2k
        ps = dm + 2 * k
        ks = (jpm - k, k, dm + k, jmmp - k)
        sg = -1.0 if (dm + k) % 2 else 1.0
        trig = 0.0
        if pc:
            if sgn_c == 0:
                continue
            trig += pc * log_c
            if sgn_c < 0 and pc % 2:
                sg = -sg
        if ps:
            if sgn_s == 0:
                continue
            trig += ps * log_s
            if sgn_s < 0 and ps % 2:
                sg = -sg
        heads.append(pref_h - sum(hi[i] for i in ks))
        # the trigonometric part is not grid-aligned; it rides with the tail
        tails.append(trig + pref_t - sum(lo[i] for i in ks))
        signs.append(sg)
    if not heads:
        return 0.0, 1.0
    total, h0, t0, cond = _scaled_sum(heads, tails, signs)
    if total == 0.0:
        return 0.0, cond
    return math.copysign(math.exp((h0 + t0) + math.log(abs(total))), total), cond


def _half_angle(theta):
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    log_c = math.log(abs(c)) if c != 0.0 else 0.0
    log_s = math.log(abs(s)) if s != 0.0 else 0.0
    sgn_c = 0 if c == 0.0 else (1 if c > 0 else -1)
    sgn_s = 0 if s == 0.0 else (1 if s > 0 else -1)
    return log_c, sgn_c, log_s, sgn_s


def wigner_d_rows(tj, theta, row_start, row_stop, lf):
    """Rows ``row_start:row_stop`` of the Wigner small-d matrix ``d^j(theta)``.

    Row ``i`` is ``m' = j - i`` and column ``k`` is ``m = j - k``.  Returns
    ``(d, cond)`` arrays of shape ``(row_stop - row_start, 2j + 1)``.
    """
    log_c, sgn_c, log_s, sgn_s = _half_angle(theta)
    dim = tj + 1
    out = np.zeros((row_stop - row_start, dim))
    cond = np.ones((row_stop - row_start, dim))
    for r, i in enumerate(range(row_start, row_stop)):
        tmp = tj - 2 * i
        for k in range(dim):
            tm = tj - 2 * k
            out[r, k], cond[r, k] = _d_element(tj, tmp, tm, log_c, sgn_c, log_s, sgn_s, lf)
    return out, cond


def term_deltas(tj, n, lf):
    """``sqrt((2l+1)/(2s+1)) <s, s-n; s, n-s | l 0>`` for ``l = 0 .. 2s``.

    Returns ``(terms, cond)`` arrays of length ``2s + 1``.
    """
    nl = tj + 1
    terms = np.zeros(nl)
    cond = np.ones(nl)
    tm1 = tj - 2 * n
    for l in range(nl):
        v, c = cg_float(tj, tm1, tj, -tm1, 2 * l, 0, lf)
        terms[l] = math.sqrt((2 * l + 1) / (tj + 1)) * v
        cond[l] = c
    return terms, cond


def diagonal_cg(tj, n, lf):
    """``(2l+1)/(2s+1) <s, s-n; l 0 | s, s-n>`` for ``l = 0 .. 2s``.

    These are the per-``l`` contributions to the diagonal kernel entry at
    ``m = s - n``.  Returns ``(values, cond)``.
    """
    nl = tj + 1
    vals = np.zeros(nl)
    cond = np.ones(nl)
    tm = tj - 2 * n
    for l in range(nl):
        v, c = cg_float(tj, tm, 2 * l, 0, tj, tm, lf)
        vals[l] = (2 * l + 1) / (tj + 1) * v
        cond[l] = c
    return vals, cond


def neumaier_cumsum(x):
    """Running sums with Neumaier compensation, in index order."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(x):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out
