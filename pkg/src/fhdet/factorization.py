"""Wiener-Hopf factorizations and the explicit scalar jump-problem data.

Circle case: for analytic non-vanishing b with zero winding,

    b = b_plus * G[b] * b_minus,   b_plus(0) = 1,  b_minus(inf) = 1,

with G[b] = exp(alpha_0) and E[b] = exp(sum_{k>=1} k alpha_k alpha_{-k})
built from the Laurent coefficients alpha_k of log b (log b(z) =
sum_k alpha_k z^k on |z| = 1).  Line case: for F -> 1,

    log F_plus(z)  =  integral dxi/(2 i pi) log F(xi) / (xi - z),  Im z > 0,
    log F_minus(z) = -integral dxi/(2 i pi) log F(xi) / (xi - z),  Im z < 0,

so that F = F_plus * F_minus on the axis, and

    E[F] = exp{ int_0^inf dxi xi Finv[log F](xi) Finv[log F](-xi) },

with Finv[g](t) = int dxi/(2 pi) g(xi) e^{-i t xi}.

On top of the factorizations sit the explicit scalar solutions of the
jump problem alpha_- = sigma alpha_+ (alpha_up/alpha_down below) and the
local holomorphic functions K_p entering the parametrix coefficients.
Branch rule everywhere: each power is exp(exponent * principal log of
the base exactly as the formula is written); bases are never combined or
"simplified", because that is where sign errors would silently corrupt
the asymptotics.
"""

from dataclasses import dataclass

import numpy as np

from . import _quad
from .errors import ConvergenceError, DomainError, QuadratureError
from .symbols import RegularPart, SymbolSpec, eval_line_symbol

BOUNDARY_EPS = 1e-6       # offset for boundary values of Cauchy integrals
RADIAL_EPS = 1e-6         # Abel radial nudge for circle boundary values
DEFAULT_K = 256           # initial Fourier truncation for log b
MAX_K = 4096
TAIL_TOL = 1e-14


# -- circle: Szego constants and b_plus/b_minus --------------------------------

@dataclass(frozen=True)
class SzegoData:
    """Fourier data of log b plus the strong Szego constants.

    `coeffs[k + truncation_K]` is alpha_k, the coefficient of z^k in the
    Laurent expansion of log b on the unit circle.
    """
    g_of_b: complex
    e_of_b: complex
    coeffs: tuple
    truncation_K: int

    def coeff(self, k: int) -> complex:
        K = self.truncation_K
        if abs(k) > K:
            return 0.0 + 0.0j
        return self.coeffs[k + K]

    @property
    def fourier_log_coeffs(self):
        return np.asarray(self.coeffs)


def _log_on_circle(regular: RegularPart, n: int):
    theta = np.arange(n) * (2 * np.pi / n)
    z = np.exp(1j * theta)
    if regular.has_exact_log:
        return np.asarray(regular.log_evaluate(z), dtype=complex)
    vals = np.asarray(regular.evaluate(z), dtype=complex)
    if np.any(vals == 0):
        raise ConvergenceError("regular part vanishes on the Fourier grid")
    phases = np.unwrap(np.angle(np.concatenate([vals, vals[:1]])))
    wind = (phases[-1] - phases[0]) / (2 * np.pi)
    if abs(wind) > 0.25:
        raise ConvergenceError(
            f"regular part has nonzero winding ({wind:.2f}); "
            "no canonical factorization")
    return np.log(np.abs(vals)) + 1j * phases[:-1]


def szego_constants(regular: RegularPart, K: int = DEFAULT_K) -> SzegoData:
    """Fourier coefficients of log b by spectrally accurate trapezoid/FFT.

    K doubles until the edge coefficients fall under TAIL_TOL (analytic b
    decays geometrically); exceeding MAX_K raises ConvergenceError,
    which signals an inadmissible regular part rather than a tuning
    problem.
    """
    while True:
        n = 1
        while n < 8 * K:
            n *= 2
        logb = _log_on_circle(regular, n)
        f = np.fft.fft(logb) / n
        alphas = np.empty(2 * K + 1, dtype=complex)
        for k in range(-K, K + 1):
            alphas[k + K] = f[k % n]
        scale = np.max(np.abs(alphas)) + 1e-300
        edge = max(abs(alphas[0]), abs(alphas[-1]))
        if edge <= TAIL_TOL * max(scale, 1.0):
            break
        if K >= MAX_K:
            raise ConvergenceError(
                f"log b Fourier coefficients do not decay (|alpha_{K}| = "
                f"{edge:.2e}); regular part too rough")
        K *= 2
    ks = np.arange(1, K + 1)
    e_sum = np.sum(ks * alphas[K + 1:] * alphas[K - 1::-1][:K])
    return SzegoData(g_of_b=complex(np.exp(alphas[K])),
                     e_of_b=complex(np.exp(e_sum)),
                     coeffs=tuple(alphas),
                     truncation_K=K)


def _log_series_factor(data: SzegoData, z: complex, plus: bool) -> complex:
    """sum_{k>=1} alpha_{+-k} z^{+-k} with a geometric tail check.

    For analytic b the coefficients decay geometrically, so the series
    converges on the circle itself (its value there is the Abel radial
    limit).  If the tail check fails at |z| ~ 1 the evaluation point is
    nudged radially by RADIAL_EPS once before giving up.
    """
    K = data.truncation_K
    alphas = np.asarray(data.coeffs)
    coeffs = alphas[K + 1:] if plus else alphas[K - 1::-1][:K]
    # drop the FFT noise floor so a finite/entire log series is not
    # penalized by meaningless 1e-19 coefficients at huge |z|^{-k}
    scale = np.max(np.abs(alphas))
    floor = 1e-16 * max(scale, 1e-30)
    alive = np.flatnonzero(np.abs(coeffs) > floor)
    keff = int(alive[-1]) + 1 if len(alive) else 0
    coeffs = coeffs[:keff]
    ks = np.arange(1, keff + 1, dtype=float)

    def attempt(w):
        if keff == 0:
            return 0.0 + 0.0j, 0.0
        s = 1.0 if plus else -1.0
        if w == 0:
            if plus:
                return 0.0 + 0.0j, 0.0
            return None, np.inf
        g = abs(w) ** s          # per-term growth of the omitted part
        if keff * np.log(max(g, 1e-300)) > 600.0:
            return None, np.inf
        powers = np.exp(ks * s * np.log(w))
        val = complex(np.sum(coeffs * powers))
        if keff <= 8:
            # effectively polynomial log; omitted terms are pure noise
            tail = floor * max(g, 1.0) ** (keff + 2) * K
        else:
            blk_end = np.max(np.abs(coeffs[keff - 4:]))
            blk_mid = np.max(np.abs(coeffs[max(0, keff // 2 - 4):
                                            keff // 2 + 1]))
            rho = (blk_end / max(blk_mid, 1e-300)) ** (
                1.0 / max(keff - keff // 2, 1))
            q = min(rho, 1.0) * g
            if q < 0.95:
                tail = blk_end * g ** keff * q / (1.0 - q)
            else:
                tail = np.inf
        return val, tail

    val, tail = attempt(z)
    if tail > 1e-11 and abs(abs(z) - 1.0) < 1e-9:
        r = 1.0 - RADIAL_EPS if plus else 1.0 + RADIAL_EPS
        val, tail = attempt(z * (r / abs(z)))
    if val is None or tail > 1e-9:
        side = 'b_plus' if plus else 'b_minus'
        raise ConvergenceError(
            f"{side} series tail {tail:.2e} at |z| = {abs(z):.6f}")
    return val


def log_b_plus(data: SzegoData, z) -> complex:
    return _log_series_factor(data, complex(z), plus=True)


def log_b_minus(data: SzegoData, z) -> complex:
    return _log_series_factor(data, complex(z), plus=False)


def log_wh_factor_circle(data: SzegoData, z) -> tuple:
    """(log b_plus(z), log b_minus(z)); both require z in the annulus of
    joint convergence (automatic for analytic b near the circle)."""
    return log_b_plus(data, z), log_b_minus(data, z)


def wh_factor_circle(data: SzegoData, z) -> tuple:
    """(b_plus(z), b_minus(z)); see log_wh_factor_circle for domains."""
    lbp, lbm = log_wh_factor_circle(data, z)
    return complex(np.exp(lbp)), complex(np.exp(lbm))


# -- line: Cauchy-transform factors --------------------------------------------

def _cauchy_log_f(regular: RegularPart, z: complex) -> complex:
    """integral over R of log F(xi)/(xi - z) dxi / (2 i pi), Im z != 0.

    The value log F(Re z) is subtracted inside a finite window (its
    contribution restored in closed form), which removes the near-axis
    peak and lets plain adaptive panels converge for tiny |Im z|.
    """
    x0 = z.real
    half = max(60.0, 4.0 * abs(z) + 40.0)
    lo, hi = x0 - half, x0 + half

    def lnf(xi):
        return np.asarray(regular.log_evaluate(
            np.asarray(xi, dtype=float)), dtype=complex)

    lnf0 = complex(lnf(np.array([x0]))[0])

    def core(xi):
        return (lnf(xi) - lnf0) / (xi - z)

    d = min(1.0, half / 4)
    total = _quad.adaptive_quad(core, lo, x0 - d, tol=1e-12)
    total += _quad.adaptive_quad(core, x0 - d, x0 + d, tol=1e-13)
    total += _quad.adaptive_quad(core, x0 + d, hi, tol=1e-12)
    total += lnf0 * (np.log(hi - z) - np.log(lo - z))

    def tail_f(xi):
        return lnf(xi) / (xi - z)

    total += _quad.tail_quad(tail_f, hi, sign=1, tol=1e-12)
    total += _quad.tail_quad(tail_f, half - x0, sign=-1, tol=1e-12)
    return complex(total / (2j * np.pi))


def log_wh_factor_line(regular: RegularPart, z, half: str) -> complex:
    """log F_plus (half='upper') or log F_minus (half='lower') at z.

    Real z is treated as a boundary value: the integral is evaluated at
    offsets i*BOUNDARY_EPS and i*BOUNDARY_EPS/2 and Richardson-
    extrapolated once.
    """
    if regular.is_one:
        return 0.0 + 0.0j
    z = complex(z)
    sgn = 1.0 if half == 'upper' else -1.0
    if half not in ('upper', 'lower'):
        raise ValueError("half must be 'upper' or 'lower'")
    if sgn * z.imag > 0:
        val = _cauchy_log_f(regular, z)
    elif z.imag == 0:
        v1 = _cauchy_log_f(regular, z + 1j * sgn * BOUNDARY_EPS)
        v2 = _cauchy_log_f(regular, z + 1j * sgn * BOUNDARY_EPS / 2)
        val = 2 * v2 - v1
    else:
        raise DomainError(
            f"F_{'plus' if sgn > 0 else 'minus'} requested at Im z = "
            f"{z.imag}; wrong half-plane")
    return sgn * val


def wh_factor_line(regular: RegularPart, z, half: str) -> complex:
    return complex(np.exp(log_wh_factor_line(regular, z, half)))


def e_of_f(regular: RegularPart, t_panel: float = 1.0,
           rel_tol: float = 1e-11, t_max: float = 512.0) -> complex:
    """Akhiezer-Kac constant E[F].

    Finv[log F](+-t) is computed per node by QUADPACK Fourier
    quadrature, and the outer integral over t advances panel by panel
    (width doubling) until its contributions are negligible; for
    analytic F the integrand dies exponentially.
    """
    if regular.is_one:
        return 1.0 + 0.0j

    def lnf(xi):
        return complex(regular.log_evaluate(float(xi)))

    def L(t):
        return _quad.fourier_integral(lnf, t) / (2 * np.pi)

    x, w = _quad.gl_rule(16)
    acc = 0.0 + 0.0j
    lo, width = 0.0, t_panel
    quiet = 0
    while lo < t_max:
        hi = lo + width
        nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        vals = np.array([n * L(n) * L(-n) for n in nodes])
        contrib = np.sum(0.5 * (hi - lo) * w * vals)
        acc += contrib
        if abs(contrib) < rel_tol * (abs(acc) + 1e-6):
            quiet += 1
            if quiet >= 2:
                return complex(np.exp(acc))
        else:
            quiet = 0
        lo, width = hi, width * 2
    raise QuadratureError(
        "E[F] integrand had not decayed by the grid boundary "
        f"t = {t_max}")


# -- scalar jump solution alpha --------------------------------------------------

class AlphaData:
    """Evaluators for the scalar solution of alpha_- = sigma * alpha_+.

    Line:   alpha_up(z)   = F_plus(z)^{-1} prod ((z-a_k)/(z-a_k+i))^{nu_k},
            alpha_down(z) = F_minus(z)     prod ((z-a_k-i)/(z-a_k))^{nubar_k}.
    Circle: alpha_up(z)   = b_plus(z)^{-1} G[b]^{-1} prod (1-z/a_k)^{nu_k},
            alpha_down(z) = b_minus(z)     prod (1-a_k/z)^{-nubar_k}.

    alpha_hat_up/down are the versions with the local power at one
    singularity stripped off:  alpha_hat_up^(p) = alpha_up * (z-a_p)^{-nu_p},
    alpha_hat_down^(p) = alpha_down * (z-a_p)^{+nubar_p}.
    """

    def __init__(self, spec: SymbolSpec):
        self.spec = spec
        self._szego = None

    @property
    def szego(self) -> SzegoData:
        if self._szego is None:
            self._szego = szego_constants(self.spec.regular)
        return self._szego

    # regular-part factors ---------------------------------------------------

    def _log_reg_up(self, z: complex) -> complex:
        if self.spec.geometry == 'line':
            return -log_wh_factor_line(self.spec.regular, z, 'upper')
        # log G[b] is alpha_0 itself, not a re-derived principal log
        return -log_b_plus(self.szego, z) - self.szego.coeff(0)

    def _log_reg_down(self, z: complex) -> complex:
        if self.spec.geometry == 'line':
            return log_wh_factor_line(self.spec.regular, z, 'lower')
        return log_b_minus(self.szego, z)

    # full evaluators ----------------------------------------------------------

    def log_alpha_up(self, z) -> complex:
        z = complex(z)
        acc = self._log_reg_up(z)
        for s in self.spec.singularities:
            if self.spec.geometry == 'line':
                acc += s.nu * np.log((z - s.location) / (z - s.location + 1j))
            else:
                acc += s.nu * np.log(1 - z / s.location)
        return complex(acc)

    def log_alpha_down(self, z) -> complex:
        z = complex(z)
        acc = self._log_reg_down(z)
        for s in self.spec.singularities:
            if self.spec.geometry == 'line':
                acc += s.nubar * np.log(
                    (z - s.location - 1j) / (z - s.location))
            else:
                acc += -s.nubar * np.log(1 - s.location / z)
        return complex(acc)

    def alpha_up(self, z) -> complex:
        return complex(np.exp(self.log_alpha_up(z)))

    def alpha_down(self, z) -> complex:
        return complex(np.exp(self.log_alpha_down(z)))

    def log_alpha_hat_up(self, p: int, z) -> complex:
        a_p = self.spec.singularities[p].location
        nu_p = self.spec.singularities[p].nu
        return complex(self.log_alpha_up(z) - nu_p * np.log(z - a_p))

    def log_alpha_hat_down(self, p: int, z) -> complex:
        a_p = self.spec.singularities[p].location
        nubar_p = self.spec.singularities[p].nubar
        return complex(self.log_alpha_down(z) + nubar_p * np.log(z - a_p))


def alpha_eval(spec: SymbolSpec, z, side: str = None) -> complex:
    """Value of the scalar jump solution alpha at z.

    Off the contour the half-plane (line) or the in/out region (circle)
    selects alpha_up vs alpha_down; on the contour `side` must say which
    boundary value is wanted ('above'/'below' resp. 'inside'/'outside').
    """
    data = AlphaData(spec)
    z = complex(z)
    if spec.geometry == 'line':
        where = z.imag
        up = {'above': True, 'below': False}.get(side, None)
    else:
        where = 1.0 - abs(z)
        up = {'inside': True, 'outside': False}.get(side, None)
    if where > 0:
        return data.alpha_up(z)
    if where < 0:
        return data.alpha_down(z)
    if up is None:
        raise DomainError(
            "alpha on the contour needs a side annotation")
    return data.alpha_up(z) if up else data.alpha_down(z)


# -- the local functions K_p -----------------------------------------------------

def _ratio_one_minus_over_minus_log(u):
    """(1 - u)/(-log u), stable near u = 1 (limit value 1)."""
    u = complex(u)
    w = 1.0 - u
    if abs(w) < 0.05:
        # -log(1-w) = w (1 + w/2 + w^2/3 + ...)
        den = 1.0
        pw = 1.0
        for j in range(1, 24):
            pw *= w
            den += pw / (j + 1.0)
        return 1.0 / den
    return w / (-np.log(u))


def _f_ratio_down_up(regular: RegularPart, z: complex) -> complex:
    """F_minus(z)/F_plus(z) continued through either half-plane via
    F = F_plus F_minus (valid in the analyticity neighborhood)."""
    if regular.is_one:
        return 1.0 + 0.0j
    if z.imag > 0:
        lfp = log_wh_factor_line(regular, z, 'upper')
        f = complex(np.asarray(regular.evaluate(z), dtype=complex))
        return f * np.exp(-2.0 * lfp)
    if z.imag < 0:
        lfm = log_wh_factor_line(regular, z, 'lower')
        f = complex(np.asarray(regular.evaluate(z), dtype=complex))
        return np.exp(2.0 * lfm) / f
    lfp = log_wh_factor_line(regular, z, 'upper')
    f = complex(np.asarray(regular.evaluate(z), dtype=complex))
    return f * np.exp(-2.0 * lfp)


def k_p_eval(spec: SymbolSpec, p: int, z, scale: float,
             data: AlphaData = None) -> complex:
    """The holomorphic local function K_p on the disk around a_p.

    Line case (scale = x):

        K_p(z) = x^{2 delta_p} e^{-i x a_p} (F_-/F_+)(z)
                 prod_k (z-a_k-i)^{nubar_k} / (z-a_k+i)^{nu_k}
                 prod_{k<p} (z-a_k)^{nu_k} / (z-a_k)^{nubar_k}
                 prod_{k>p} [(a_k-z)^{nu_k} / (a_k-z)^{nubar_k}] e^{2 i pi gamma_k}.

    Circle case (scale = m):

        K_p(z) = (b_-/b_+)(z) e^{-i pi gamma_p}
                 [(1-z/a_p)/(-log(z/a_p))]^{-2 delta_p} m^{2 delta_p} a_p^{-m}
                 (z/a_p)^{nubar_p}
                 prod_{r != p} (1-z/a_r)^{nu_r} (1-a_r/z)^{-nubar_r}.

    Every power takes the principal log of its base exactly as written;
    in particular (a_k - z) and (z - a_k) are distinct bases.
    """
    if scale <= 0:
        raise DomainError("K_p needs a positive scale (x or m)")
    z = complex(z)
    sings = spec.singularities
    a_p = sings[p].location
    eps_disk = spec.min_gap / 3.0
    if abs(z - a_p) > eps_disk:
        raise DomainError(
            f"K_p evaluated outside its disk: |z - a_p| = {abs(z - a_p):.3e} "
            f"> {eps_disk:.3e}")
    if data is None:
        data = AlphaData(spec)

    if spec.geometry == 'line':
        delta_p = sings[p].delta
        acc = 2 * delta_p * np.log(scale) - 1j * scale * a_p
        acc += np.log(_f_ratio_down_up(spec.regular, z))
        for k, s in enumerate(sings):
            acc += s.nubar * np.log(z - s.location - 1j)
            acc -= s.nu * np.log(z - s.location + 1j)
            if k < p:
                acc += s.nu * np.log(z - s.location)
                acc -= s.nubar * np.log(z - s.location)
            elif k > p:
                acc += s.nu * np.log(s.location - z)
                acc -= s.nubar * np.log(s.location - z)
                acc += 2j * np.pi * s.gamma_exp
        return complex(np.exp(acc))

    # circle
    s_p = sings[p]
    m = scale
    lbp, lbm = log_wh_factor_circle(data.szego, z)
    acc = lbm - lbp - 1j * np.pi * s_p.gamma_exp
    acc += -2.0 * s_p.delta * np.log(
        _ratio_one_minus_over_minus_log(z / a_p))
    acc += 2.0 * s_p.delta * np.log(m)
    acc += -m * np.log(a_p)          # a_p^{-m}, |a_p| = 1
    acc += s_p.nubar * np.log(z / a_p)
    for r, s in enumerate(sings):
        if r == p:
            continue
        acc += s.nu * np.log(1 - z / s.location)
        acc -= s.nubar * np.log(1 - s.location / z)
    return complex(np.exp(acc))
