"""Pure-Python kernels.

Same algorithms as the compiled ``_ckernels`` extension, used when the
extension has not been built. Keep the two in step: the test suite runs
both against each other.
"""

import math

import numpy as np

IMPLEMENTATION = "python"

KIND_MANDEL = 0
KIND_GAUSSIAN = 1
KIND_EXPONENTIAL = 2
KIND_UNIFORM = 3

_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)
_I_OVER_SQRTPI = 1j / math.sqrt(math.pi)
_IMAG_LIMIT = 30.0
_SERIES_SWITCH = 1.8
_MAX_TERMS = 20000


def _erf_maclaurin(z):
    z2 = z * z
    term = z
    total = z
    n = 0
    peak = abs(z2)
    while n < _MAX_TERMS:
        n += 1
        term = term * (-z2) / n
        contrib = term / (2 * n + 1)
        total += contrib
        if n > peak and abs(contrib) <= 1e-17 * abs(total):
            break
    return _TWO_OVER_SQRTPI * total


def _erf_scaled_series(z):
    # erf(z) = 2/sqrt(pi) exp(-z^2) sum (2 z^2)^n z / (2n+1)!!
    z2 = z * z
    term = z
    total = z
    n = 0
    peak = 2.0 * abs(z2)
    while n < _MAX_TERMS:
        n += 1
        term = term * (2.0 * z2) / (2 * n + 1)
        total += term
        if n > peak and abs(term) <= 1e-17 * abs(total):
            break
    return _TWO_OVER_SQRTPI * _cexp(-z2) * total


def _cexp(z):
    m = math.exp(z.real)
    return complex(m * math.cos(z.imag), m * math.sin(z.imag))


def _faddeeva_cf(zeta):
    # Laplace continued fraction, modified Lentz; requires Im(zeta) > 0.
    tiny = 1e-300
    f = zeta
    c = f
    d = 0j
    n = 0
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
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return _I_OVER_SQRTPI / f


def erf_complex(z):
    """Error function of a complex argument (scalar)."""
    z = complex(z)
    x, y = z.real, z.imag
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("non-finite argument")
    if abs(y) > _IMAG_LIMIT:
        raise ValueError("|Im z| exceeds %g" % _IMAG_LIMIT)
    neg = x < 0.0
    conj = (x < 0.0) != (y < 0.0)
    x = abs(x)
    y = abs(y)
    if x == 0.0 and y == 0.0:
        return 0j
    w = complex(x, y)
    if x <= _SERIES_SWITCH:
        r = _erf_maclaurin(w)
    elif y <= _SERIES_SWITCH and x * x + y * y <= 36.0:
        r = _erf_scaled_series(w)
    else:
        r = 1.0 - _cexp(-(w * w)) * _faddeeva_cf(complex(-y, x))
    if conj:
        r = r.conjugate()
    if neg:
        r = -r
    return r


def erf_complex_array(z):
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(z.shape, dtype=np.complex128)
    flat_in = z.ravel()
    flat_out = out.reshape(-1)
    for i in range(flat_in.size):
        flat_out[i] = erf_complex(flat_in[i])
    return out


def _density(kind, params, u):
    if kind == KIND_MANDEL:
        s = 1.0 - u
        return 0.375 * (1.0 + s * s)
    if kind == KIND_GAUSSIAN:
        s = (u - params[0]) / params[1]
        return params[2] * math.exp(-s * s)
    if kind == KIND_EXPONENTIAL:
        return params[1] * math.exp(params[0] * (u - 2.0))
    if kind == KIND_UNIFORM:
        return params[0]
    raise ValueError("unknown density kind %r" % kind)


def char_integral(kind, params, theta, lo, hi, tol=1e-9, max_depth=48):
    """Adaptive Simpson for the integral of p(u) exp(i theta u) on [lo, hi].

    Returns ``(re, im, evaluations, converged)``.
    """
    params = [float(p) for p in params]

    def f(u):
        p = _density(kind, params, u)
        return p * math.cos(theta * u), p * math.sin(theta * u)

    # seed panels of at most a quarter turn each so sampling cannot alias
    n0 = max(4, int(math.ceil(abs(theta) * (hi - lo) / (0.5 * math.pi))))
    width = (hi - lo) / n0
    evals = 0
    converged = True
    total_re = 0.0
    total_im = 0.0
    stack = []
    fb = f(hi)
    evals += 1
    for i in range(n0 - 1, -1, -1):
        a = lo + i * width
        b = hi if i == n0 - 1 else lo + (i + 1) * width
        fa = f(a)
        fm = f(0.5 * (a + b))
        evals += 2
        h = b - a
        whole = ((fa[0] + 4 * fm[0] + fb[0]) * h / 6, (fa[1] + 4 * fm[1] + fb[1]) * h / 6)
        stack.append((a, b, fa, fm, fb, whole, tol / n0, 0))
        fb = fa
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = f(lm)
        frm = f(rm)
        evals += 2
        h = 0.5 * (b - a)
        left = ((fa[0] + 4 * flm[0] + fm[0]) * h / 6, (fa[1] + 4 * flm[1] + fm[1]) * h / 6)
        right = ((fm[0] + 4 * frm[0] + fb[0]) * h / 6, (fm[1] + 4 * frm[1] + fb[1]) * h / 6)
        d_re = left[0] + right[0] - whole[0]
        d_im = left[1] + right[1] - whole[1]
        if depth >= max_depth or (abs(d_re) <= 15 * eps and abs(d_im) <= 15 * eps):
            if depth >= max_depth:
                converged = False
            total_re += left[0] + right[0] + d_re / 15.0
            total_im += left[1] + right[1] + d_im / 15.0
            continue
        stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
        stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    return total_re, total_im, evals, converged


def _open_measure(u, rho):
    # Cumulative open length (in periods) of windows [m - rho/2, m + rho/2].
    v = u + 0.5 * rho
    fl = math.floor(v)
    return fl * rho + min(v - fl, rho)


def window_flux(intensity, x0, dx, start, stop, shifts, period, open_width, center):
    """Integral of intensity over a shifted binary slit mask.

    Grid cell ``j`` covers ``[x_j - dx/2, x_j + dx/2]`` with ``x_j = x0 + j*dx``;
    only cells ``start <= j < stop`` contribute. Slits of width ``open_width``
    sit at ``center + m*period - shift``.
    """
    intensity = np.asarray(intensity, dtype=np.float64)
    shifts = np.asarray(shifts, dtype=np.float64)
    if start < 0 or stop > intensity.shape[0] or start > stop:
        raise ValueError("window outside intensity array")
    rho = open_width / period
    out = np.empty(shifts.size, dtype=np.float64)
    half = 0.5 * dx
    for s_idx in range(shifts.size):
        c = center - shifts[s_idx]
        acc = 0.0
        for j in range(start, stop):
            x = x0 + j * dx
            ua = (x - half - c) / period
            ub = (x + half - c) / period
            acc += intensity[j] * (_open_measure(ub, rho) - _open_measure(ua, rho))
        out[s_idx] = acc * period
    return out
