"""Pure-Python scalar kernels.

Mirror of the compiled ``_kernels`` extension, function for function.  It is
selected by :mod:`qbt._backend` when the extension is missing or when
``QBT_PURE_PYTHON=1`` is set.  No argument checking happens here; the public
wrappers in :mod:`qbt.specfun` validate before calling in.
"""
import cmath
import math

from .errors import QuadratureFailure, SeriesNotConverged

EULER_GAMMA = 0.57721566490153286060651209008240243

# B_2, B_4, ..., B_22
BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
)

# recurrence shift target for digamma/trigamma
SHIFT_RADIUS = 10.0
# switch to the Watson expansion of the aux integral above this decay rate
RHO_ASYM = 40.0

_EPS = 2.220446049250313e-16
_HALF_PI = 0.5 * math.pi
_MAX_INTERVALS = 4000

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def digamma_asymptotic(z, n_terms):
    """ln z - 1/(2z) - sum_{k<=n_terms} B_2k / (2k z^2k)."""
    z = complex(z)
    w = 1.0 / (z * z)
    s = 0j
    for k in range(n_terms, 0, -1):
        s = (s + BERNOULLI_EVEN[k - 1] / (2 * k)) * w
    return cmath.log(z) - 0.5 / z - s


def _cot_pi(z):
    w = math.pi * z
    if w.imag == 0.0:
        return complex(math.cos(w.real) / math.sin(w.real), 0.0)
    if w.imag > 0.0:
        q = cmath.exp(2j * w)
        return 1j * (q + 1.0) / (q - 1.0)
    q = cmath.exp(-2j * w)
    return 1j * (1.0 + q) / (1.0 - q)


def digamma(z):
    z = complex(z)
    if z.real < 0.0:
        return digamma(1.0 - z) - math.pi * _cot_pi(z)
    acc = 0j
    while abs(z) < SHIFT_RADIUS:
        acc -= 1.0 / z
        z += 1.0
    return acc + digamma_asymptotic(z, 10)


def trigamma(z):
    z = complex(z)
    if z.real < 0.0:
        w = math.pi * z
        if abs(w.imag) > 300.0:
            refl = 0j
        else:
            refl = (math.pi / cmath.sin(w)) ** 2
        return refl - trigamma(1.0 - z)
    acc = 0j
    while abs(z) < SHIFT_RADIUS:
        acc += 1.0 / (z * z)
        z += 1.0
    w = 1.0 / (z * z)
    s = 0j
    for k in range(10, 0, -1):
        s = (s + BERNOULLI_EVEN[k - 1]) * w
    return acc + 1.0 / z + 0.5 * w + s / z


def cisi(x):
    """Return ``(Ci(x), si(x))`` for real ``x > 0`` with si = Si - pi/2."""
    if x <= 2.0:
        x2 = x * x
        # Si series: sum (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
        t = x
        si_sum = x
        k = 0
        while True:
            t *= -x2 / ((2 * k + 2) * (2 * k + 3))
            k += 1
            d = t / (2 * k + 1)
            si_sum += d
            if abs(d) < _EPS * abs(si_sum):
                break
        # Ci series: gamma + ln x + sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!)
        u = -0.5 * x2
        ci_sum = 0.25 * -x2
        k = 1
        while True:
            u *= -x2 / ((2 * k + 1) * (2 * k + 2))
            k += 1
            d = u / (2 * k)
            ci_sum += d
            if abs(d) < _EPS * (abs(ci_sum) + 1e-300):
                break
        return EULER_GAMMA + math.log(x) + ci_sum, si_sum - _HALF_PI
    # modified Lentz on the continued fraction of E1(ix)
    b = complex(1.0, x)
    c = complex(1e300, 0.0)
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _EPS:
            break
    h *= complex(math.cos(x), -math.sin(x))
    return -h.real, h.imag


def aux_real(x):
    """Closed form sin(x) Ci(x) - cos(x) si(x) of the aux integral, x > 0."""
    ci, si = cisi(x)
    return math.sin(x) * ci - math.cos(x) * si


def _aux_asymptotic(a, r, rho, tol):
    # remainder after K terms is bounded by (2K)! / rho^(2K+1) on the rotated ray
    inv_a2 = 1.0 / (a * a)
    term = 1.0 / a
    total = 0j
    bound = 1.0 / rho
    target = 0.1 * tol / r
    for k in range(40):
        total += term
        bound *= (2 * k + 1) * (2 * k + 2) / (rho * rho)
        if bound <= target:
            return total
        term *= -(2 * k + 1) * (2 * k + 2) * inv_a2
    raise QuadratureFailure(f"asymptotic aux series stalled at a={a!r}")


def _gk15(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(centre)
    k15 = _WGK[7] * fc
    g7 = _WG[3] * fc
    for j in range(7):
        dx = half * _XGK[j]
        fsum = f(centre - dx) + f(centre + dx)
        k15 += _WGK[j] * fsum
        if j % 2 == 1:
            g7 += _WG[j // 2] * fsum
    return k15 * half, g7 * half


def _gk_adaptive(f, lo, hi, tol):
    total = 0j
    stack = [(lo, hi)]
    width = hi - lo
    count = 0
    while stack:
        a, b = stack.pop()
        k15, g7 = _gk15(f, a, b)
        err = abs(k15 - g7)
        count += 1
        if err <= tol * (b - a) / width or err <= 50.0 * _EPS * abs(k15):
            total += k15
        elif count > _MAX_INTERVALS:
            raise QuadratureFailure(f"Gauss-Kronrod did not converge on [{lo}, {hi}]")
        else:
            m = 0.5 * (a + b)
            stack.append((m, b))
            stack.append((a, m))
    return total


def _tail_bound(y, rho):
    # on the rotated ray |1 + y^2| >= max(1, t^2) and |e^{-a y}| = e^{-rho t}
    return min(1.0 / y, math.exp(-rho * y) / (rho * max(1.0, y * y)))


def aux_quadrature(a, tol):
    """Integral of exp(-a y)/(1+y^2) over y >= 0 by adaptive quadrature, Re a > 0.

    The path is the ray arg(y) = -arg(a)/2: the exponential then decays like
    exp(-|a| cos(arg(a)/2) t) while the poles at y = +-i stay at least 45 degrees away.
    """
    a = complex(a)
    r = abs(a)
    phi = 0.5 * cmath.phase(a)
    rho = r * math.cos(phi)
    u = cmath.exp(1j * phi)
    uc = u.conjugate()
    uc2 = uc * uc
    ru = r * u

    def f(t):
        return cmath.exp(-ru * t) / (1.0 + uc2 * (t * t))

    tol_abs = tol * min(_HALF_PI, 1.0 / r)
    y_max = 1.0
    while _tail_bound(y_max, rho) > 0.1 * tol_abs:
        y_max *= 2.0
    edges = [0.0]
    h = 0.5 * min(1.0, 1.0 / r)
    while h < y_max:
        edges.append(h)
        h *= 2.0
    edges.append(y_max)
    share = 0.9 * tol_abs / (len(edges) - 1)
    total = 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _gk_adaptive(f, lo, hi, share)
    return uc * total


def aux_complex(a, tol):
    """Aux integral for complex a with Re a > 0 (Watson series or quadrature)."""
    a = complex(a)
    r = abs(a)
    rho = r * math.cos(0.5 * cmath.phase(a))
    if rho >= RHO_ASYM:
        return _aux_asymptotic(a, r, rho, tol)
    return aux_quadrature(a, tol)


def hurwitz_zeta(s, q):
    """zeta(s, q) = sum_{k>=0} (q+k)^-s for s > 1, q > 0 (Euler-Maclaurin)."""
    m = max(0, int(math.ceil(max(10.0, 1.5 * s) - q)))
    total = 0.0
    for k in range(m):
        total += (q + k) ** (-s)
    x = q + m
    xs = x ** (-s)
    total += x * xs / (s - 1.0) + 0.5 * xs
    # B_2j/(2j)! * s(s+1)...(s+2j-2) * x^(-s-2j+1)
    rising = s
    power = xs / x
    fact = 2.0
    for j in range(1, 12):
        term = BERNOULLI_EVEN[j - 1] / fact * rising * power
        total += term
        if abs(term) < _EPS * 1e-2 * total:
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= x * x
        fact *= (2 * j + 1) * (2 * j + 2)
    return total


def delta_series(bh, rates, taus, rel_tol, abs_tol, max_terms, quad_tol):
    """sum_n (1/n) sum_mu tau_mu aux(n bh rate_mu).

    Direct summation until every rate has n bh |rate| cos(arg/2) >= RHO_ASYM,
    then the rest is closed analytically with the Watson expansion of ``aux``
    summed against Hurwitz zeta.  Returns ``(value, n_direct)``.
    """
    rates = [complex(r) for r in rates]
    taus = [float(t) for t in taus]
    m = len(rates)
    rho1 = min(bh * abs(r) * math.cos(0.5 * cmath.phase(r)) for r in rates)
    n_switch = max(1, int(math.ceil(RHO_ASYM / rho1)))
    if n_switch - 1 > max_terms:
        raise SeriesNotConverged(
            f"direct part needs {n_switch - 1} terms, max_terms={max_terms}"
        )
    partner = [-1] * m
    for j in range(m):
        for i in range(j):
            if rates[i].imag != 0.0 and rates[j] == rates[i].conjugate():
                partner[j] = i
                break

    total = 0j
    vals = [0j] * m
    for n in range(1, n_switch):
        s = 0j
        for j in range(m):
            if partner[j] >= 0:
                v = vals[partner[j]].conjugate()
            else:
                a = n * bh * rates[j]
                v = aux_real(a.real) if a.imag == 0.0 else aux_complex(a, quad_tol)
            vals[j] = v
            s += taus[j] * v
        total += s / n

    ws = [1.0 / (bh * r) for r in rates]
    pw = list(ws)
    w2 = [w * w for w in ws]
    tail = 0j
    fact = 1.0
    for k in range(40):
        c = 0j
        for j in range(m):
            c += taus[j] * pw[j]
            pw[j] *= w2[j]
        term = fact * c * hurwitz_zeta(2.0 * k + 2.0, float(n_switch))
        if k % 2:
            term = -term
        tail += term
        if abs(term) <= 0.01 * (abs_tol + rel_tol * abs(total + tail)):
            return total + tail, n_switch - 1
        fact *= (2 * k + 1) * (2 * k + 2)
    raise SeriesNotConverged("analytic tail of the Delta series did not converge")
