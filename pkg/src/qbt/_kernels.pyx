# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels.

Line-for-line port of :mod:`qbt._kernels_py`; see there for the algorithms.
"""
from libc.math cimport M_PI, ceil, cos, exp, fabs, log, pow, sin
from libc.math cimport fmax, fmin

from .errors import QuadratureFailure, SeriesNotConverged


cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csin(double complex)
    double cabs(double complex)
    double carg(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)


cdef double EULER_GAMMA_C = 0.57721566490153286060651209008240243
cdef double _EPS = 2.220446049250313e-16
cdef double _HALF_PI = 0.5 * M_PI
cdef double SHIFT_RADIUS_C = 10.0
cdef double RHO_ASYM_C = 40.0
cdef int _MAX_INTERVALS = 4000

cdef double[11] _B2K
_B2K[:] = [
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0, 43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0,
]

cdef double[8] _XGK
_XGK[:] = [
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
]
cdef double[8] _WGK
_WGK[:] = [
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
]
cdef double[4] _WG
_WG[:] = [
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
]

EULER_GAMMA = EULER_GAMMA_C
SHIFT_RADIUS = SHIFT_RADIUS_C
RHO_ASYM = RHO_ASYM_C
BERNOULLI_EVEN = tuple(_B2K[k] for k in range(11))


cdef double complex _digamma_asym(double complex z, int n_terms) noexcept nogil:
    cdef double complex w = 1.0 / (z * z)
    cdef double complex s = 0
    cdef int k
    for k in range(n_terms, 0, -1):
        s = (s + _B2K[k - 1] / (2 * k)) * w
    return clog(z) - 0.5 / z - s


cdef double complex _cot_pi(double complex z) noexcept nogil:
    cdef double complex w = M_PI * z
    cdef double complex q
    if cimag(w) == 0.0:
        return cos(creal(w)) / sin(creal(w))
    if cimag(w) > 0.0:
        q = cexp(2j * w)
        return 1j * (q + 1.0) / (q - 1.0)
    q = cexp(-2j * w)
    return 1j * (1.0 + q) / (1.0 - q)


cdef double complex _digamma(double complex z) noexcept nogil:
    cdef double complex refl = 0
    cdef double complex acc = 0
    if creal(z) < 0.0:
        refl = -M_PI * _cot_pi(z)
        z = 1.0 - z
    while cabs(z) < SHIFT_RADIUS_C:
        acc = acc - 1.0 / z
        z = z + 1.0
    return refl + acc + _digamma_asym(z, 10)


cdef double complex _trigamma(double complex z) noexcept nogil:
    cdef double complex refl = 0
    cdef double complex acc = 0
    cdef double complex w, s = 0
    cdef double sign = 1.0
    cdef int k
    if creal(z) < 0.0:
        w = M_PI * z
        if fabs(cimag(w)) <= 300.0:
            refl = M_PI / csin(w)
            refl = refl * refl
        sign = -1.0
        z = 1.0 - z
    while cabs(z) < SHIFT_RADIUS_C:
        acc = acc + 1.0 / (z * z)
        z = z + 1.0
    w = 1.0 / (z * z)
    for k in range(10, 0, -1):
        s = (s + _B2K[k - 1]) * w
    return refl + sign * (acc + 1.0 / z + 0.5 * w + s / z)


cdef void _cisi(double x, double* ci, double* si) noexcept nogil:
    cdef double x2, t, u, d, si_sum, ci_sum, a
    cdef int k, i
    cdef double complex b, c, dd, h, delta
    if x <= 2.0:
        x2 = x * x
        t = x
        si_sum = x
        k = 0
        while True:
            t = t * (-x2 / ((2 * k + 2) * (2 * k + 3)))
            k += 1
            d = t / (2 * k + 1)
            si_sum += d
            if fabs(d) < _EPS * fabs(si_sum):
                break
        u = -0.5 * x2
        ci_sum = -0.25 * x2
        k = 1
        while True:
            u = u * (-x2 / ((2 * k + 1) * (2 * k + 2)))
            k += 1
            d = u / (2 * k)
            ci_sum += d
            if fabs(d) < _EPS * (fabs(ci_sum) + 1e-300):
                break
        ci[0] = EULER_GAMMA_C + log(x) + ci_sum
        si[0] = si_sum - _HALF_PI
        return
    b = x * 1j + 1.0
    c = 1e300
    dd = 1.0 / b
    h = dd
    for i in range(1, 100000):
        a = -(<double>i) * i
        b = b + 2.0
        dd = 1.0 / (a * dd + b)
        c = b + a / c
        delta = c * dd
        h = h * delta
        if fabs(creal(delta) - 1.0) + fabs(cimag(delta)) < _EPS:
            break
    h = h * (cos(x) - 1j * sin(x))
    ci[0] = -creal(h)
    si[0] = cimag(h)


cdef double _aux_real(double x) noexcept nogil:
    cdef double ci, si
    _cisi(x, &ci, &si)
    return sin(x) * ci - cos(x) * si


cdef double complex _aux_asymptotic(double complex a, double r, double rho, double tol) except *:
    cdef double complex inv_a2 = 1.0 / (a * a)
    cdef double complex term = 1.0 / a
    cdef double complex total = 0
    cdef double bound = 1.0 / rho
    cdef double target = 0.1 * tol / r
    cdef int k
    for k in range(40):
        total = total + term
        bound *= (2 * k + 1) * (2 * k + 2) / (rho * rho)
        if bound <= target:
            return total
        term = term * (-(2.0 * k + 1) * (2 * k + 2)) * inv_a2
    raise QuadratureFailure(f"asymptotic aux series stalled at a={a!r}")


cdef inline double complex _f(double t, double complex ru, double complex uc2) noexcept nogil:
    return cexp(-ru * t) / (1.0 + uc2 * (t * t))


cdef void _gk15(double lo, double hi, double complex ru, double complex uc2,
                double complex* k15, double complex* g7) noexcept nogil:
    cdef double centre = 0.5 * (lo + hi)
    cdef double half = 0.5 * (hi - lo)
    cdef double complex fc = _f(centre, ru, uc2)
    cdef double complex kk = _WGK[7] * fc
    cdef double complex gg = _WG[3] * fc
    cdef double complex fsum
    cdef double dx
    cdef int j
    for j in range(7):
        dx = half * _XGK[j]
        fsum = _f(centre - dx, ru, uc2) + _f(centre + dx, ru, uc2)
        kk = kk + _WGK[j] * fsum
        if j % 2 == 1:
            gg = gg + _WG[j // 2] * fsum
    k15[0] = kk * half
    g7[0] = gg * half


cdef double complex _gk_adaptive(double lo, double hi, double complex ru,
                                 double complex uc2, double tol) except *:
    cdef double[256] st_lo
    cdef double[256] st_hi
    cdef int top = 1
    cdef int count = 0
    cdef double a, b, m, err
    cdef double width = hi - lo
    cdef double complex total = 0, k15, g7
    st_lo[0] = lo
    st_hi[0] = hi
    while top > 0:
        top -= 1
        a = st_lo[top]
        b = st_hi[top]
        _gk15(a, b, ru, uc2, &k15, &g7)
        err = cabs(k15 - g7)
        count += 1
        if err <= tol * (b - a) / width or err <= 50.0 * _EPS * cabs(k15):
            total = total + k15
        elif count > _MAX_INTERVALS or top >= 254:
            raise QuadratureFailure(f"Gauss-Kronrod did not converge on [{lo}, {hi}]")
        else:
            m = 0.5 * (a + b)
            st_lo[top] = m
            st_hi[top] = b
            st_lo[top + 1] = a
            st_hi[top + 1] = m
            top += 2
    return total


cdef inline double _tail_bound(double y, double rho) noexcept nogil:
    return fmin(1.0 / y, exp(-rho * y) / (rho * fmax(1.0, y * y)))


cdef double complex _aux_quadrature(double complex a, double tol) except *:
    cdef double r = cabs(a)
    cdef double phi = 0.5 * carg(a)
    cdef double rho = r * cos(phi)
    cdef double complex u = cos(phi) + 1j * sin(phi)
    cdef double complex uc = conj(u)
    cdef double complex uc2 = uc * uc
    cdef double complex ru = r * u
    cdef double tol_abs = tol * fmin(_HALF_PI, 1.0 / r)
    cdef double y_max = 1.0
    cdef double h, lo, share
    cdef int n_panels = 1
    cdef double complex total = 0
    while _tail_bound(y_max, rho) > 0.1 * tol_abs:
        y_max *= 2.0
    h = 0.5 * fmin(1.0, 1.0 / r)
    while h < y_max:
        n_panels += 1
        h *= 2.0
    share = 0.9 * tol_abs / n_panels
    lo = 0.0
    h = 0.5 * fmin(1.0, 1.0 / r)
    while h < y_max:
        total = total + _gk_adaptive(lo, h, ru, uc2, share)
        lo = h
        h *= 2.0
    total = total + _gk_adaptive(lo, y_max, ru, uc2, share)
    return uc * total


cdef double complex _aux_complex(double complex a, double tol) except *:
    cdef double r = cabs(a)
    cdef double rho = r * cos(0.5 * carg(a))
    if rho >= RHO_ASYM_C:
        return _aux_asymptotic(a, r, rho, tol)
    return _aux_quadrature(a, tol)


cdef double _hurwitz_zeta(double s, double q) noexcept nogil:
    cdef int m = <int>ceil(fmax(10.0, 1.5 * s) - q)
    cdef double total = 0.0, x, xs, rising, power, fact, term
    cdef int k, j
    if m < 0:
        m = 0
    for k in range(m):
        total += pow(q + k, -s)
    x = q + m
    xs = pow(x, -s)
    total += x * xs / (s - 1.0) + 0.5 * xs
    rising = s
    power = xs / x
    fact = 2.0
    for j in range(1, 12):
        term = _B2K[j - 1] / fact * rising * power
        total += term
        if fabs(term) < _EPS * 1e-2 * total:
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= x * x
        fact *= (2 * j + 1) * (2 * j + 2)
    return total


# ---- Python-visible wrappers -------------------------------------------------

def digamma_asymptotic(z, int n_terms):
    """ln z - 1/(2z) - sum_{k<=n_terms} B_2k / (2k z^2k)."""
    return _digamma_asym(complex(z), n_terms)


def digamma(z):
    return _digamma(complex(z))


def trigamma(z):
    return _trigamma(complex(z))


def cisi(double x):
    """Return ``(Ci(x), si(x))`` for real ``x > 0`` with si = Si - pi/2."""
    cdef double ci, si
    _cisi(x, &ci, &si)
    return ci, si


def aux_real(double x):
    return _aux_real(x)


def aux_quadrature(a, double tol):
    return _aux_quadrature(complex(a), tol)


def aux_complex(a, double tol):
    return _aux_complex(complex(a), tol)


def hurwitz_zeta(double s, double q):
    return _hurwitz_zeta(s, q)


def delta_series(double bh, rates, taus, double rel_tol, double abs_tol,
                 long max_terms, double quad_tol):
    """Compiled twin of :func:`qbt._kernels_py.delta_series`."""
    cdef int m = len(rates)
    if m > 8:
        raise ValueError("at most 8 rates are supported")
    cdef double complex[8] rt
    cdef double complex[8] vals
    cdef double complex[8] pw
    cdef double complex[8] w2
    cdef double[8] tau
    cdef int[8] partner
    cdef int i, j, k
    cdef long n, n_switch
    cdef double rho1 = 1e308, rho, fact
    cdef double complex a, v, s, total = 0, tail = 0, c, term, w
    for j in range(m):
        rt[j] = complex(rates[j])
        tau[j] = float(taus[j])
        rho = bh * cabs(rt[j]) * cos(0.5 * carg(rt[j]))
        if rho < rho1:
            rho1 = rho
    n_switch = <long>ceil(RHO_ASYM_C / rho1)
    if n_switch < 1:
        n_switch = 1
    if n_switch - 1 > max_terms:
        raise SeriesNotConverged(
            f"direct part needs {n_switch - 1} terms, max_terms={max_terms}"
        )
    for j in range(m):
        partner[j] = -1
        for i in range(j):
            if cimag(rt[i]) != 0.0 and rt[j] == conj(rt[i]):
                partner[j] = i
                break

    for n in range(1, n_switch):
        s = 0
        for j in range(m):
            if partner[j] >= 0:
                v = conj(vals[partner[j]])
            else:
                a = n * bh * rt[j]
                if cimag(a) == 0.0:
                    v = _aux_real(creal(a))
                else:
                    v = _aux_complex(a, quad_tol)
            vals[j] = v
            s = s + tau[j] * v
        total = total + s / n

    for j in range(m):
        w = 1.0 / (bh * rt[j])
        pw[j] = w
        w2[j] = w * w
    fact = 1.0
    for k in range(40):
        c = 0
        for j in range(m):
            c = c + tau[j] * pw[j]
            pw[j] = pw[j] * w2[j]
        term = fact * c * _hurwitz_zeta(2.0 * k + 2.0, <double>n_switch)
        if k % 2:
            term = -term
        tail = tail + term
        if cabs(term) <= 0.01 * (abs_tol + rel_tol * cabs(total + tail)):
            return complex(total + tail), n_switch - 1
        fact *= (2 * k + 1) * (2 * k + 2)
    raise SeriesNotConverged("analytic tail of the Delta series did not converge")
