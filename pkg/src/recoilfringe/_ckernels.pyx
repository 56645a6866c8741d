# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirrors ``_pykernels`` line for line."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport exp, cos, sin, fabs, floor, ceil, sqrt, isfinite, M_PI

cnp.import_array()

IMPLEMENTATION = "cython"

KIND_MANDEL = 0
KIND_GAUSSIAN = 1
KIND_EXPONENTIAL = 2
KIND_UNIFORM = 3

cdef double _TWO_OVER_SQRTPI = 2.0 / sqrt(M_PI)
cdef double _IMAG_LIMIT = 30.0
cdef double _SERIES_SWITCH = 1.8
cdef int _MAX_TERMS = 20000


cdef inline double complex _cexp(double complex z) noexcept nogil:
    cdef double m = exp(z.real)
    return m * cos(z.imag) + 1j * m * sin(z.imag)


cdef inline double _cabs(double complex z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef double complex _erf_maclaurin(double complex z) noexcept nogil:
    cdef double complex z2 = z * z
    cdef double complex term = z
    cdef double complex total = z
    cdef double complex contrib
    cdef double peak = _cabs(z2)
    cdef int n = 0
    while n < _MAX_TERMS:
        n += 1
        term = term * (-z2) / n
        contrib = term / (2 * n + 1)
        total = total + contrib
        if n > peak and _cabs(contrib) <= 1e-17 * _cabs(total):
            break
    return _TWO_OVER_SQRTPI * total


cdef double complex _erf_scaled_series(double complex z) noexcept nogil:
    cdef double complex z2 = z * z
    cdef double complex term = z
    cdef double complex total = z
    cdef double peak = 2.0 * _cabs(z2)
    cdef int n = 0
    while n < _MAX_TERMS:
        n += 1
        term = term * (2.0 * z2) / (2 * n + 1)
        total = total + term
        if n > peak and _cabs(term) <= 1e-17 * _cabs(total):
            break
    return _TWO_OVER_SQRTPI * _cexp(-z2) * total


cdef double complex _faddeeva_cf(double complex zeta) noexcept nogil:
    cdef double tiny = 1e-300
    cdef double complex f = zeta
    cdef double complex c = f
    cdef double complex d = 0
    cdef double complex delta
    cdef double a
    cdef int n = 0
    while n < _MAX_TERMS:
        n += 1
        a = -0.5 * n
        d = zeta + a * d
        if d == 0:
            d = tiny
        d = 1.0 / d
        c = zeta + a / c
        if c == 0:
            c = tiny
        delta = c * d
        f = f * delta
        if _cabs(delta - 1.0) < 1e-16:
            break
    return (1j / sqrt(M_PI)) / f


cdef int _erf_c(double complex z, double complex *out) noexcept nogil:
    cdef double x = z.real
    cdef double y = z.imag
    cdef bint neg, conj
    cdef double complex w, r
    if not (isfinite(x) and isfinite(y)):
        return 1
    if fabs(y) > _IMAG_LIMIT:
        return 2
    neg = x < 0.0
    conj = (x < 0.0) != (y < 0.0)
    x = fabs(x)
    y = fabs(y)
    if x == 0.0 and y == 0.0:
        out[0] = 0
        return 0
    w = x + 1j * y
    if x <= _SERIES_SWITCH:
        r = _erf_maclaurin(w)
    elif y <= _SERIES_SWITCH and x * x + y * y <= 36.0:
        r = _erf_scaled_series(w)
    else:
        r = 1.0 - _cexp(-(w * w)) * _faddeeva_cf(-y + 1j * x)
    if conj:
        r = r.real - 1j * r.imag
    if neg:
        r = -r
    out[0] = r
    return 0


def erf_complex(z):
    """Error function of a complex argument (scalar)."""
    cdef double complex r
    cdef int status = _erf_c(complex(z), &r)
    if status == 1:
        raise ValueError("non-finite argument")
    if status == 2:
        raise ValueError("|Im z| exceeds %g" % _IMAG_LIMIT)
    return complex(r)


def erf_complex_array(z):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] flat = np.ascontiguousarray(
        np.asarray(z, dtype=np.complex128).ravel())
    cdef Py_ssize_t n = flat.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef int status
    cdef double complex r
    for i in range(n):
        status = _erf_c(flat[i], &r)
        if status == 1:
            raise ValueError("non-finite argument")
        if status == 2:
            raise ValueError("|Im z| exceeds %g" % _IMAG_LIMIT)
        out[i] = r
    return out.reshape(np.shape(z))


cdef inline double _density(int kind, double *params, double u) noexcept nogil:
    cdef double s
    if kind == 0:
        s = 1.0 - u
        return 0.375 * (1.0 + s * s)
    if kind == 1:
        s = (u - params[0]) / params[1]
        return params[2] * exp(-s * s)
    if kind == 2:
        return params[1] * exp(params[0] * (u - 2.0))
    return params[0]


cdef struct _Panel:
    double a, b
    double fa_re, fa_im, fm_re, fm_im, fb_re, fb_im
    double w_re, w_im
    double eps
    int depth


def char_integral(int kind, params, double theta, double lo, double hi,
                  double tol=1e-9, int max_depth=48):
    """Adaptive Simpson for the integral of p(u) exp(i theta u) on [lo, hi].

    Returns ``(re, im, evaluations, converged)``.
    """
    if kind < 0 or kind > 3:
        raise ValueError("unknown density kind %r" % kind)
    cdef double p[4]
    cdef Py_ssize_t i
    plist = [float(v) for v in params]
    for i in range(4):
        p[i] = plist[i] if i < len(plist) else 0.0

    cdef Py_ssize_t n0 = max(4, <Py_ssize_t> ceil(fabs(theta) * (hi - lo) / (0.5 * M_PI)))
    cdef Py_ssize_t cap = n0 + 2 * max_depth + 8
    cdef _Panel *stack = <_Panel *> malloc(cap * sizeof(_Panel))
    if stack == NULL:
        raise MemoryError()
    cdef Py_ssize_t top = 0
    cdef double a, b, m, lm, rm, h, pv, width
    cdef double fa_re, fa_im, fm_re, fm_im, fb_re, fb_im
    cdef double flm_re, flm_im, frm_re, frm_im
    cdef double l_re, l_im, r_re, r_im, d_re, d_im
    cdef double total_re = 0.0, total_im = 0.0
    cdef long evals = 0
    cdef bint converged = True
    cdef _Panel cur

    with nogil:
        # seed panels of at most a quarter turn each so sampling cannot alias
        width = (hi - lo) / n0
        pv = _density(kind, p, hi)
        fb_re = pv * cos(theta * hi); fb_im = pv * sin(theta * hi)
        evals += 1
        i = n0 - 1
        while i >= 0:
            a = lo + i * width
            b = hi if i == n0 - 1 else lo + (i + 1) * width
            pv = _density(kind, p, a)
            fa_re = pv * cos(theta * a); fa_im = pv * sin(theta * a)
            m = 0.5 * (a + b)
            pv = _density(kind, p, m)
            fm_re = pv * cos(theta * m); fm_im = pv * sin(theta * m)
            evals += 2
            h = b - a
            stack[top].a = a; stack[top].b = b
            stack[top].fa_re = fa_re; stack[top].fa_im = fa_im
            stack[top].fm_re = fm_re; stack[top].fm_im = fm_im
            stack[top].fb_re = fb_re; stack[top].fb_im = fb_im
            stack[top].w_re = (fa_re + 4 * fm_re + fb_re) * h / 6
            stack[top].w_im = (fa_im + 4 * fm_im + fb_im) * h / 6
            stack[top].eps = tol / n0
            stack[top].depth = 0
            top += 1
            fb_re = fa_re; fb_im = fa_im
            i -= 1
        while top > 0:
            top -= 1
            cur = stack[top]
            a = cur.a; b = cur.b
            m = 0.5 * (a + b)
            lm = 0.5 * (a + m)
            rm = 0.5 * (m + b)
            pv = _density(kind, p, lm)
            flm_re = pv * cos(theta * lm); flm_im = pv * sin(theta * lm)
            pv = _density(kind, p, rm)
            frm_re = pv * cos(theta * rm); frm_im = pv * sin(theta * rm)
            evals += 2
            h = 0.5 * (b - a)
            l_re = (cur.fa_re + 4 * flm_re + cur.fm_re) * h / 6
            l_im = (cur.fa_im + 4 * flm_im + cur.fm_im) * h / 6
            r_re = (cur.fm_re + 4 * frm_re + cur.fb_re) * h / 6
            r_im = (cur.fm_im + 4 * frm_im + cur.fb_im) * h / 6
            d_re = l_re + r_re - cur.w_re
            d_im = l_im + r_im - cur.w_im
            if cur.depth >= max_depth or (fabs(d_re) <= 15 * cur.eps and fabs(d_im) <= 15 * cur.eps):
                if cur.depth >= max_depth:
                    converged = False
                total_re += l_re + r_re + d_re / 15.0
                total_im += l_im + r_im + d_im / 15.0
                continue
            # right half first so the left half is processed next (same order as Python)
            stack[top].a = m; stack[top].b = b
            stack[top].fa_re = cur.fm_re; stack[top].fa_im = cur.fm_im
            stack[top].fm_re = frm_re; stack[top].fm_im = frm_im
            stack[top].fb_re = cur.fb_re; stack[top].fb_im = cur.fb_im
            stack[top].w_re = r_re; stack[top].w_im = r_im
            stack[top].eps = 0.5 * cur.eps
            stack[top].depth = cur.depth + 1
            top += 1
            stack[top].a = a; stack[top].b = m
            stack[top].fa_re = cur.fa_re; stack[top].fa_im = cur.fa_im
            stack[top].fm_re = flm_re; stack[top].fm_im = flm_im
            stack[top].fb_re = cur.fm_re; stack[top].fb_im = cur.fm_im
            stack[top].w_re = l_re; stack[top].w_im = l_im
            stack[top].eps = 0.5 * cur.eps
            stack[top].depth = cur.depth + 1
            top += 1
    free(stack)
    return total_re, total_im, evals, bool(converged)


cdef inline double _open_measure(double u, double rho) noexcept nogil:
    cdef double v = u + 0.5 * rho
    cdef double fl = floor(v)
    cdef double fr = v - fl
    return fl * rho + (fr if fr < rho else rho)


def window_flux(intensity, double x0, double dx, Py_ssize_t start, Py_ssize_t stop,
                shifts, double period, double open_width, double center):
    """Integral of intensity over a shifted binary slit mask (see ``_pykernels``)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] inten = np.ascontiguousarray(intensity, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sh = np.ascontiguousarray(shifts, dtype=np.float64)
    cdef Py_ssize_t ns = sh.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(ns, dtype=np.float64)
    cdef double rho = open_width / period
    cdef double half = 0.5 * dx
    cdef double c, acc, x, ua, ub
    cdef Py_ssize_t s_idx, j
    if start < 0 or stop > inten.shape[0] or start > stop:
        raise ValueError("window outside intensity array")
    with nogil:
        for s_idx in range(ns):
            c = center - sh[s_idx]
            acc = 0.0
            for j in range(start, stop):
                x = x0 + j * dx
                ua = (x - half - c) / period
                ub = (x + half - c) / period
                acc += inten[j] * (_open_measure(ub, rho) - _open_measure(ua, rho))
            out[s_idx] = acc * period
    return out
