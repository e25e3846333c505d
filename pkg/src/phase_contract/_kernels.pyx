# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py``.

Same signatures, same return conventions (``lf`` is the split log-factorial
table).  Log-domain terms are scaled by their maximum and summed with Neumaier compensation instead of
``math.fsum``; agreement with the Python twin is checked in the test suite.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, sqrt, cos, sin, copysign, INFINITY

cnp.import_array()

BACKEND = "cython"

cdef enum:
    MAX_TERMS = 4096


cdef inline int imax(int a, int b) nogil:
    return a if a > b else b


cdef inline int imin(int a, int b) nogil:
    return a if a < b else b


cdef double _scaled_sum(double* heads, double* tails, double* signs, int count,
                        double* head_out, double* tail_out, double* cond_out) nogil:
    # heads are grid-aligned, so head differences are exact
    cdef int i, top = 0
    for i in range(1, count):
        if heads[i] + tails[i] > heads[top] + tails[top]:
            top = i
    cdef double h0 = heads[top], t0 = tails[top]
    cdef double total = 0.0, comp = 0.0, abs_total = 0.0, v, t
    for i in range(count):
        v = signs[i] * exp((heads[i] - h0) + (tails[i] - t0))
        abs_total += fabs(v)
        t = total + v
        if fabs(total) >= fabs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    total += comp
    head_out[0] = h0
    tail_out[0] = t0
    if total == 0.0:
        cond_out[0] = INFINITY
    else:
        cond_out[0] = abs_total / fabs(total)
    return total


cdef double _cg(int tj1, int tm1, int tj2, int tm2, int tJ, int tM, const double[:, :] lf,
                double* cond_out) nogil:
    cdef int a = (tj1 + tj2 - tJ) // 2
    cdef int b = (tj1 - tj2 + tJ) // 2
    cdef int c = (-tj1 + tj2 + tJ) // 2
    cdef int d = (tj1 + tj2 + tJ) // 2 + 1
    cdef int j1pm1 = (tj1 + tm1) // 2
    cdef int j1mm1 = (tj1 - tm1) // 2
    cdef int j2pm2 = (tj2 + tm2) // 2
    cdef int j2mm2 = (tj2 - tm2) // 2
    cdef int JpM = (tJ + tM) // 2
    cdef int JmM = (tJ - tM) // 2
    cdef double pref_h = 0.5 * (lf[0, a] + lf[0, b] + lf[0, c] + lf[0, JpM] + lf[0, JmM]
                                + lf[0, j1pm1] + lf[0, j1mm1] + lf[0, j2pm2] + lf[0, j2mm2]
                                - lf[0, d])
    cdef double pref_t = 0.5 * (lf[1, a] + lf[1, b] + lf[1, c] + lf[1, JpM] + lf[1, JmM]
                                + lf[1, j1pm1] + lf[1, j1mm1] + lf[1, j2pm2] + lf[1, j2mm2]
                                - lf[1, d] + log(<double>(tJ + 1)))
    cdef int e = (tJ - tj2 + tm1) // 2
    cdef int f = (tJ - tj1 - tm2) // 2
    cdef int kmin = imax(0, imax(-e, -f))
    cdef int kmax = imin(a, imin(j1mm1, j2pm2))
    cdef double heads[MAX_TERMS]
    cdef double tails[MAX_TERMS]
    cdef double signs[MAX_TERMS]
    cdef int k, count = 0
    cdef double h0, t0, total
    if kmin > kmax:
        cond_out[0] = 1.0
        return 0.0
    for k in range(kmin, kmax + 1):
        heads[count] = -(lf[0, k] + lf[0, a - k] + lf[0, j1mm1 - k] + lf[0, j2pm2 - k]
                         + lf[0, e + k] + lf[0, f + k])
        tails[count] = -(lf[1, k] + lf[1, a - k] + lf[1, j1mm1 - k] + lf[1, j2pm2 - k]
                         + lf[1, e + k] + lf[1, f + k])
        signs[count] = -1.0 if k % 2 else 1.0
        count += 1
    total = _scaled_sum(heads, tails, signs, count, &h0, &t0, cond_out)
    if total == 0.0:
        return 0.0
    return copysign(exp((pref_h + h0) + (pref_t + t0) + log(fabs(total))), total)


def cg_float(int tj1, int tm1, int tj2, int tm2, int tJ, int tM, const double[:, :] lf):
    cdef double cond
    cdef double value
    if (tj1 + tj2 + tJ) // 2 + 2 > MAX_TERMS:
        raise ValueError("angular momenta too large for the compiled kernel")
    if (tj1 + tj2 + tJ) // 2 + 1 >= lf.shape[1]:
        raise ValueError("log-factorial table too short")
    value = _cg(tj1, tm1, tj2, tm2, tJ, tM, lf, &cond)
    if value != 0.0 and log(fabs(value)) > 709.78:
        raise OverflowError("Clebsch-Gordan magnitude exceeds float range")
    return value, cond


cdef double _d_element(int tj, int tmp, int tm, double log_c, int sgn_c, double log_s,
                       int sgn_s, const double[:, :] lf, double* cond_out) nogil:
    cdef int jpm = (tj + tm) // 2
    cdef int jmm = (tj - tm) // 2
    cdef int jpmp = (tj + tmp) // 2
    cdef int jmmp = (tj - tmp) // 2
    cdef int dm = (tmp - tm) // 2
    cdef double pref_h = 0.5 * (lf[0, jpmp] + lf[0, jmmp] + lf[0, jpm] + lf[0, jmm])
    cdef double pref_t = 0.5 * (lf[1, jpmp] + lf[1, jmmp] + lf[1, jpm] + lf[1, jmm])
    cdef int kmin = imax(0, -dm)
    cdef int kmax = imin(jpm, jmmp)
    cdef double heads[MAX_TERMS]
    cdef double tails[MAX_TERMS]
    cdef double signs[MAX_TERMS]
    cdef int k, pc, ps, count = 0
    cdef double trig, sg, h0, t0, total
    for k in range(kmin, kmax + 1):
        pc = tj - dm - 2 * k
        ps = dm + 2 * k
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
        heads[count] = pref_h - (lf[0, jpm - k] + lf[0, k] + lf[0, dm + k] + lf[0, jmmp - k])
        tails[count] = trig + pref_t - (lf[1, jpm - k] + lf[1, k] + lf[1, dm + k] + lf[1, jmmp - k])
        signs[count] = sg
        count += 1
    if count == 0:
        cond_out[0] = 1.0
        return 0.0
    total = _scaled_sum(heads, tails, signs, count, &h0, &t0, cond_out)
    if total == 0.0:
        return 0.0
    return copysign(exp((h0 + t0) + log(fabs(total))), total)


def wigner_d_rows(int tj, double theta, int row_start, int row_stop, const double[:, :] lf):
    if tj + 2 > MAX_TERMS:
        raise ValueError("angular momentum too large for the compiled kernel")
    if tj >= lf.shape[1]:
        raise ValueError("log-factorial table too short")
    cdef double c = cos(0.5 * theta)
    cdef double s = sin(0.5 * theta)
    cdef double log_c = log(fabs(c)) if c != 0.0 else 0.0
    cdef double log_s = log(fabs(s)) if s != 0.0 else 0.0
    cdef int sgn_c = 0 if c == 0.0 else (1 if c > 0 else -1)
    cdef int sgn_s = 0 if s == 0.0 else (1 if s > 0 else -1)
    cdef int dim = tj + 1
    cdef int nrows = row_stop - row_start
    out_arr = np.zeros((nrows, dim))
    cond_arr = np.ones((nrows, dim))
    cdef double[:, :] out = out_arr
    cdef double[:, :] cond = cond_arr
    cdef int r, k
    with nogil:
        for r in range(nrows):
            for k in range(dim):
                out[r, k] = _d_element(tj, tj - 2 * (row_start + r), tj - 2 * k,
                                       log_c, sgn_c, log_s, sgn_s, lf, &cond[r, k])
    return out_arr, cond_arr


def term_deltas(int tj, int n, const double[:, :] lf):
    if tj + 2 > MAX_TERMS:
        raise ValueError("angular momentum too large for the compiled kernel")
    if 2 * tj + 2 >= lf.shape[1]:
        raise ValueError("log-factorial table too short")
    cdef int nl = tj + 1
    terms_arr = np.zeros(nl)
    cond_arr = np.ones(nl)
    cdef double[:] terms = terms_arr
    cdef double[:] cond = cond_arr
    cdef int tm1 = tj - 2 * n
    cdef int l
    with nogil:
        for l in range(nl):
            terms[l] = sqrt((2.0 * l + 1.0) / (tj + 1.0)) * _cg(tj, tm1, tj, -tm1, 2 * l, 0, lf,
                                                                 &cond[l])
    return terms_arr, cond_arr


def diagonal_cg(int tj, int n, const double[:, :] lf):
    if tj + 2 > MAX_TERMS:
        raise ValueError("angular momentum too large for the compiled kernel")
    if 2 * tj + 2 >= lf.shape[1]:
        raise ValueError("log-factorial table too short")
    cdef int nl = tj + 1
    vals_arr = np.zeros(nl)
    cond_arr = np.ones(nl)
    cdef double[:] vals = vals_arr
    cdef double[:] cond = cond_arr
    cdef int tm = tj - 2 * n
    cdef int l
    with nogil:
        for l in range(nl):
            vals[l] = (2.0 * l + 1.0) / (tj + 1.0) * _cg(tj, tm, 2 * l, 0, tj, tm, lf, &cond[l])
    return vals_arr, cond_arr


def neumaier_cumsum(x):
    cdef double[:] xv = np.ascontiguousarray(x, dtype=float)
    cdef Py_ssize_t n = xv.shape[0], i
    out_arr = np.empty(n)
    cdef double[:] out = out_arr
    cdef double total = 0.0, comp = 0.0, t, v
    with nogil:
        for i in range(n):
            v = xv[i]
            t = total + v
            if fabs(total) >= fabs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
            out[i] = total + comp
    return out_arr
