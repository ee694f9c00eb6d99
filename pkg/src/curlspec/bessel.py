"""Integer-order Bessel functions of the first and second kind.

J is evaluated by Miller's backward recurrence normalised with
``J_0 + 2 * sum(J_2k) = 1`` (ascending power series for small arguments);
Y_0 and Y_1 come from the Neumann series in the even-order J values and
higher orders from upward recurrence, which is stable for Y.

All evaluators accept scalars or numpy arrays and are pure functions.
The exact rational Taylor partial sums used for certification live here too.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

MAX_ORDER = 64

_EULER_GAMMA = 0.57721566490153286061
_SERIES_CUTOFF = 0.5
_RESCALE = 1e150


def _check_order(order):
    if isinstance(order, bool) or int(order) != order:
        raise TypeError(f"Bessel order must be an integer, got {order!r}")
    order = int(order)
    if abs(order) > MAX_ORDER:
        raise ValueError(f"|order| = {abs(order)} exceeds supported maximum {MAX_ORDER}")
    return order


def _series_table(nmax, x):
    # ascending series; only used for |x| <= _SERIES_CUTOFF so 12 terms is plenty
    half = 0.5 * x
    q = half * half
    out = np.empty((nmax + 1,) + x.shape)
    lead = np.ones_like(x)
    for n in range(nmax + 1):
        term = lead.copy()
        total = term.copy()
        for k in range(1, 13):
            term = -term * q / (k * (k + n))
            total += term
        out[n] = total
        lead = lead * half / (n + 1)
    return out


def _miller_table(nmax, x):
    xmax = float(np.max(x))
    top = max(nmax, int(math.ceil(xmax)))
    start = top + 20 + int(math.sqrt(40.0 * top))
    start += start % 2
    out = np.zeros((nmax + 1,) + x.shape)
    # number of rescalings applied after each stored order was recorded
    shifts = np.zeros((nmax + 1,) + x.shape)
    count = np.zeros_like(x)
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        j_prev = k * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the unnormalised value of order k - 1
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            j_cur = np.where(big, j_cur / _RESCALE, j_cur)
            j_next = np.where(big, j_next / _RESCALE, j_next)
            norm = np.where(big, norm / _RESCALE, norm)
            count = count + big
        if k - 1 <= nmax:
            out[k - 1] = j_cur
            shifts[k - 1] = count
    norm += j_cur
    out = out / norm
    lag = count - shifts
    if np.any(lag):
        out = out * np.exp(-lag * math.log(_RESCALE))
    return out


def j_table(nmax, x):
    """Return ``J_0(x) .. J_nmax(x)`` stacked along a new leading axis.

    Arguments may be negative; ``J_n(-x) = (-1)^n J_n(x)``.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Bessel argument must be finite")
    ax = np.abs(x)
    flat = ax.reshape(-1)
    out = np.empty((nmax + 1, flat.size))
    small = flat <= _SERIES_CUTOFF
    if np.any(small):
        out[:, small] = _series_table(nmax, flat[small])
    if np.any(~small):
        out[:, ~small] = _miller_table(nmax, flat[~small])
    out = out.reshape((nmax + 1,) + x.shape)
    neg = x < 0
    if np.any(neg):
        odd = (np.arange(nmax + 1) % 2 == 1).reshape((-1,) + (1,) * x.ndim)
        out = np.where(odd & neg, -out, out)
    return out


def y_table(nmax, x):
    """Return ``Y_0(x) .. Y_nmax(x)`` for positive ``x``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or not np.all(np.isfinite(x)):
        raise ValueError("Y_m is only defined here for finite x > 0")
    xmax = float(np.max(x)) if x.size else 0.0
    kmax = (int(math.ceil(xmax)) + 20 + int(math.sqrt(40.0 * (xmax + 1.0)))) // 2
    jt = j_table(2 * kmax + 1, x)
    log_term = np.log(0.5 * x) + _EULER_GAMMA
    s0 = np.zeros_like(x)
    s1 = np.zeros_like(x)
    for k in range(1, kmax + 1):
        sign = -1.0 if k % 2 else 1.0
        s0 += sign * jt[2 * k] / k
        s1 += sign * (jt[2 * k - 1] - jt[2 * k + 1]) / k
    y0 = (2.0 / math.pi) * (log_term * jt[0] - 2.0 * s0)
    y1 = -(2.0 / math.pi) * (jt[0] / x - log_term * jt[1] - s1)
    out = np.empty((max(nmax, 1) + 1,) + x.shape)
    out[0] = y0
    out[1] = y1
    for k in range(1, nmax):
        out[k + 1] = (2.0 * k / x) * out[k] - out[k - 1]
    return out[: nmax + 1]


def _scalar_or_array(value, x):
    return float(value) if np.ndim(x) == 0 else value


def bessel_j(order, x):
    """J_order(x) for integer order (negative allowed) and real x."""
    order = _check_order(order)
    n = abs(order)
    val = j_table(n, x)[n]
    if order < 0 and n % 2:
        val = -val
    return _scalar_or_array(val, x)


def bessel_y(order, x):
    """Y_order(x) for x > 0. Negative orders use ``Y_{-m} = (-1)^m Y_m``."""
    order = _check_order(order)
    n = abs(order)
    val = y_table(n, x)[n]
    if order < 0 and n % 2:
        val = -val
    return _scalar_or_array(val, x)


def bessel_jp(order, x):
    """Derivative J_order'(x) = (J_{order-1} - J_{order+1}) / 2."""
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x))


def bessel_yp(order, x):
    return 0.5 * (bessel_y(order - 1, x) - bessel_y(order + 1, x))


def bessel_zero(m, k):
    """k-th positive zero j_{m,k} of J_m.

    A sign scan with step 0.05 brackets the zero (consecutive zeros are more
    than pi apart), then bisection shrinks the bracket below 1e-12.
    """
    m = _check_order(m)
    if m < 0:
        raise ValueError("zero index requires a non-negative order")
    if int(k) != k or k < 1:
        raise ValueError("zero counter k must be a positive integer")
    k = int(k)
    step = 0.05
    # j_{m,1} > m, and J_m > 0 on (0, j_{m,1})
    lo = max(0.05, float(m))
    found = 0
    while True:
        hi = lo + 40.0
        xs = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
        vals = bessel_j(m, xs)
        for i in range(len(xs) - 1):
            if vals[i] == 0.0:
                found += 1
                if found == k:
                    return float(xs[i])
            elif vals[i] * vals[i + 1] < 0.0:
                found += 1
                if found == k:
                    return _bisect_scalar(lambda t: bessel_j(m, t), xs[i], xs[i + 1])
        lo = float(xs[-1])


def _bisect_scalar(f, lo, hi, width=1e-12):
    flo = f(lo)
    if flo == 0.0:
        return float(lo)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo <= 4 * math.ulp(hi):
            break
    return 0.5 * (lo + hi)


# --- exact rational Taylor data -------------------------------------------


def taylor_partial_sum(n, M, x):
    """Exact ``sum_{m=0}^{M} (-1)^m / (m! (m+n)!) * (x/2)^(2m+n)`` as a Fraction."""
    if int(n) != n or n < 0:
        raise ValueError("order n must be a non-negative integer")
    if int(M) != M or M < 0:
        raise ValueError("truncation index M must be a non-negative integer")
    x = Fraction(x)
    half = x / 2
    total = Fraction(0)
    for m in range(int(M) + 1):
        term = Fraction((-1) ** m, math.factorial(m) * math.factorial(m + n))
        total += term * half ** (2 * m + n)
    return total


def taylor_remainder_bound(M):
    """Uniform bound ``18 (3/4)^(M+1) / (M+1)!`` on the tail after index M.

    Valid for every order n >= 0 and every |x| <= 3.
    """
    if int(M) != M or M < 1:
        raise ValueError("remainder bound needs M >= 1")
    M = int(M)
    return 18 * Fraction(3, 4) ** (M + 1) / math.factorial(M + 1)
