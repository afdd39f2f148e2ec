"""Complex special functions: Gamma ratios, digamma, Barnes G, and the
confluent/Gauss/Appell hypergeometric family.

Conventions used throughout:

* every power w**s means exp(s * Log w) with the principal logarithm,
  arg in (-pi, pi];
* "at a pole" means within ``POLE_TOL`` of a non-positive integer;
* all routines work in double precision with compensated (Neumaier)
  summation in the series accumulators -- no arbitrary precision.

The Kummer function Phi(a, c; z) (series around 0) and the Tricomi
function Psi(a, c; z) (cut along the negative reals) are evaluated by a
two-regime strategy: Taylor/connection formulas at moderate |z| and
optimally truncated asymptotic expansions at large |z|.  In the window
between ``PHI_SERIES_MAX`` and ``PHI_ASY_MIN`` both regimes are computed
and the one with the smaller internal error estimate wins; the regime
thresholds are module constants so the switchover is auditable.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special as _sp

from . import _dd, _quad
from .errors import (BranchCutError, ConvergenceError, DomainError,
                     NumericOverflowError, ParameterError, PoleError)

# -- tunable regime/tolerance constants --------------------------------------

POLE_TOL = 1e-12          # detection radius for "argument at a pole"
PHI_SERIES_MAX = 18.0     # below: Taylor series only
PHI_ASY_MIN = 44.0        # above: asymptotic expansion only
PHI_OVERLAP_BAND = (34.0, 44.0)   # window where both regimes hold 1e-8
PSI_ASY_MIN = 38.0        # Tricomi switches to its own large-z series
F21_ANNULUS = (0.95, 1.05)    # rejected band around |z| = 1 for 2F1
DEGENERATE_DETECT = 1e-5  # "parameter is an integer" detection radius
DEGENERATE_EPS = 1e-6     # step used to regularize a degenerate parameter
_SERIES_MAX_TERMS = 600
_EPS = np.finfo(float).eps


def _is_nonpos_int(w, tol=POLE_TOL) -> bool:
    w = complex(w)
    k = round(w.real)
    return k <= 0 and abs(w - k) < tol


def _near_int(w, tol=DEGENERATE_DETECT) -> bool:
    w = complex(w)
    return abs(w.imag) < tol and abs(w.real - round(w.real)) < tol


def _check_finite(value, what: str):
    if not np.all(np.isfinite(np.atleast_1d(value)).tolist()):
        raise NumericOverflowError(f"{what} produced a non-finite value")
    return value


def _as_scalar_or_array(z):
    z = np.asarray(z, dtype=complex)
    return z, z.ndim == 0


# -- Gamma family -------------------------------------------------------------

def log_gamma(z) -> complex:
    """Principal branch of log Gamma; raises PoleError at 0, -1, -2, ..."""
    if _is_nonpos_int(z):
        raise PoleError(f"log_gamma at pole z={z}")
    return _check_finite(complex(_sp.loggamma(complex(z))), "log_gamma")


def digamma(z) -> complex:
    """psi(z) = d/dz log Gamma(z)."""
    if _is_nonpos_int(z):
        raise PoleError(f"digamma at pole z={z}")
    return complex(_sp.psi(complex(z)))


@dataclass(frozen=True)
class GammaRatioSpec:
    """Gamma[a_1..a_n; b_1..b_m] = prod Gamma(a_k) / prod Gamma(b_k).

    Empty argument lists contribute a factor 1.
    """
    numerator_args: tuple = ()
    denominator_args: tuple = ()


def gamma_ratio(spec: GammaRatioSpec) -> complex:
    """Evaluates a Gamma ratio through log-space summation.

    A pole in a numerator Gamma raises PoleError; a pole in a denominator
    Gamma (with finite numerator) makes the whole ratio exactly 0.
    """
    for arg in spec.numerator_args:
        if _is_nonpos_int(arg):
            raise PoleError(f"gamma_ratio numerator pole at {arg}")
    if any(_is_nonpos_int(arg) for arg in spec.denominator_args):
        return 0.0 + 0.0j
    acc = 0.0 + 0.0j
    for arg in spec.numerator_args:
        acc += _sp.loggamma(complex(arg))
    for arg in spec.denominator_args:
        acc -= _sp.loggamma(complex(arg))
    if acc.real > 700.0:
        raise NumericOverflowError("gamma_ratio overflow")
    return complex(np.exp(acc))


def gamma_ratio_of(num=(), den=()) -> complex:
    return gamma_ratio(GammaRatioSpec(tuple(num), tuple(den)))


def pochhammer(a, n: int) -> complex:
    """(a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    out = 1.0 + 0.0j
    a = complex(a)
    for j in range(n):
        out *= a + j
    return out


# -- Barnes G ------------------------------------------------------------------

def _t_psi(t):
    """t * psi(t), with the removable singularity at t = 0 filled in."""
    t = np.asarray(t, dtype=complex)
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    out = safe * _sp.psi(safe)
    series = -1.0 - np.euler_gamma * t + (np.pi ** 2 / 6.0) * t * t
    return np.where(small, series, out)


def _log_barnes_direct(w) -> complex:
    """log G(w) for Re w > 0 via the psi integral representation:

        G(z+1) = (2 pi)^(z/2) exp{ -z(z-1)/2 + int_0^z t psi(t) dt },

    integrated along the straight segment from 0 to z = w - 1.
    """
    v = complex(w) - 1.0
    if v == 0:
        return 0.0 + 0.0j
    integral = v * _quad.adaptive_quad(lambda s: _t_psi(s * v), 0.0, 1.0,
                                       tol=1e-14)
    return 0.5 * v * np.log(2 * np.pi) - 0.5 * v * (v - 1.0) + integral


def log_barnes_g(z) -> complex:
    """log of the Barnes G-function, G(z+1) = Gamma(z) G(z), G(1) = G(2) = 1.

    Arguments with Re z <= 3/4 are lifted by the recurrence before the
    integral representation applies.  At the zeros of G (non-positive
    integers) the log is singular and PoleError is raised.
    """
    z = complex(z)
    if _is_nonpos_int(z):
        raise PoleError(f"Barnes G has a zero at z={z}; log diverges")
    shift = 0
    while (z + shift).real < 0.75:
        shift += 1
    acc = _log_barnes_direct(z + shift)
    for j in range(shift):
        acc -= _sp.loggamma(z + j)
    return _check_finite(complex(acc), "log_barnes_g")


def barnes_g(z) -> complex:
    """Barnes G; returns exactly 0 at the zeros z = 0, -1, -2, ..."""
    if _is_nonpos_int(z):
        return 0.0 + 0.0j
    return complex(np.exp(log_barnes_g(z)))


# -- Kummer Phi ----------------------------------------------------------------

def _phi_taylor(a, c, z):
    """Taylor series of Phi(a,c;z) with a cancellation error estimate.

    Returns (value, abs_error_estimate).  The estimate combines the
    floating-point noise floor eps * max|term| with the final truncation
    term, which is what limits accuracy on rays where the sum is
    oscillatory (|z| large on the imaginary axis).
    """
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    total = np.ones_like(z)
    comp = np.zeros_like(z)          # Neumaier compensation
    max_term = np.ones(z.shape)
    active = np.ones(z.shape, dtype=bool)
    n = 0
    while np.any(active) and n < _SERIES_MAX_TERMS:
        term = term * ((a + n) / ((c + n) * (n + 1.0))) * z
        t = np.where(active, term, 0.0)
        new = total + t
        comp += np.where(np.abs(total) >= np.abs(t),
                         (total - new) + t, (t - new) + total)
        total = new
        max_term = np.maximum(max_term, np.abs(t))
        active &= np.abs(term) > 1e-18 * (np.abs(total) + 1.0)
        n += 1
    if n >= _SERIES_MAX_TERMS:
        raise ConvergenceError("Kummer Phi series did not converge")
    value = total + comp
    err = _EPS * max_term + np.abs(term)
    return value, err


def _phi_taylor_oriented(a, c, z):
    """Taylor evaluation with the argument turned into the right half
    plane via Kummer's transformation Phi(a,c;z) = e^z Phi(c-a,c;-z).

    The transformation removes the e^{|Re z|} cancellation that the raw
    series suffers for Re z < 0.
    """
    z = np.asarray(z, dtype=complex)
    flip = z.real < -2.0
    value = np.empty_like(z)
    err = np.empty(z.shape)
    if np.any(~flip):
        v, e = _phi_taylor(a, c, z[~flip])
        value[~flip] = v
        err[~flip] = e
    if np.any(flip):
        v, e = _phi_taylor(c - a, c, -z[flip])
        ez = np.exp(z[flip])
        value[flip] = ez * v
        err[flip] = np.abs(ez) * e
    return value, err


def _phi_taylor_dd_raw(a, c, z):
    """Scalar Taylor sum of Phi in double-double arithmetic (returns cdd).

    Rescues the overlap band (|z| ~ 20-45 near the imaginary axis) where
    plain double terms lose up to e^{|z|} * eps to cancellation.  The
    Kummer transformation is applied first so the loss never exceeds
    ~e^{|z|}.
    """
    z = complex(z)
    if z.real < -2.0:
        flipped = _phi_taylor_dd_raw(complex(c) - complex(a), c, -z)
        return _dd.cdd_mul(_dd.cdd_from(complex(np.exp(z))), flipped)
    a = complex(a)
    c = complex(c)
    term = _dd.cdd_from(1.0 + 0.0j)
    total = _dd.cdd_from(1.0 + 0.0j)
    zdd = _dd.cdd_from(z)
    for n in range(_SERIES_MAX_TERMS):
        num = _dd.cdd_mul((_dd.two_sum(a.real, n), _dd.dd_from(a.imag)), zdd)
        den = _dd.cdd_mul((_dd.two_sum(c.real, n), _dd.dd_from(c.imag)),
                          _dd.cdd_from(complex(n + 1.0)))
        term = _dd.cdd_div(_dd.cdd_mul(term, num), den)
        total = _dd.cdd_add(total, term)
        if _dd.cdd_abs2_hi(term) < 1e-64 * (_dd.cdd_abs2_hi(total) + 1.0):
            return total
    raise ConvergenceError("Kummer Phi dd series did not converge")


def _phi_taylor_dd(a, c, z) -> complex:
    return _dd.cdd_to_complex(_phi_taylor_dd_raw(a, c, z))


def _trunc_sum(ratio_fn, z_like, max_terms=120):
    """Optimally truncated sum 1 + t_1 + t_2 + ... with t_{n+1} = t_n * ratio(n).

    Terms are added while they keep decreasing in modulus; the error
    estimate is the modulus of the first term not added.
    """
    term = np.ones_like(z_like)
    total = np.ones_like(z_like)
    last_sz = np.full(z_like.shape, np.inf)
    err = np.zeros(z_like.shape)
    active = np.ones(z_like.shape, dtype=bool)
    for n in range(max_terms):
        term = term * ratio_fn(n)
        sz = np.abs(term)
        grew = sz >= last_sz
        stopping = active & grew
        err = np.where(stopping, sz, err)
        active &= ~grew
        total += np.where(active, term, 0.0)
        tiny = active & (sz < 1e-18)
        err = np.where(tiny, sz, err)
        active &= ~tiny
        last_sz = np.where(active, sz, last_sz)
        if not np.any(active):
            break
    err = np.where(active, np.abs(term), err)
    return total, err


def _phi_asymptotic(a, c, z):
    """Large-|z| expansion of Phi(a,c;z):

        Gamma(c)/Gamma(c-a) (e^{i pi eps}/z)^a S1 + Gamma(c)/Gamma(a) e^z z^{a-c} S2,

    eps = sgn(Im z); both series truncated at their smallest term.
    Returns (value, abs_error_estimate).
    """
    z = np.asarray(z, dtype=complex)
    eps = np.where(z.imag >= 0, 1.0, -1.0)
    logz = np.log(z)

    pre1 = gamma_ratio_of([c], [c - a]) if not _is_nonpos_int(c - a) else 0.0
    pre2 = gamma_ratio_of([c], [a]) if not _is_nonpos_int(a) else 0.0

    s1, e1 = _trunc_sum(lambda n: (a + n) * (a - c + 1 + n) / ((n + 1.0) * (-z)), z)
    s2, e2 = _trunc_sum(lambda n: (c - a + n) * (1 - a + n) / ((n + 1.0) * z), z)

    f1 = pre1 * np.exp(a * (1j * np.pi * eps - logz))
    f2 = pre2 * np.exp(z + (a - c) * logz)
    value = f1 * s1 + f2 * s2
    err = np.abs(f1) * e1 + np.abs(f2) * e2 + _EPS * np.abs(value)
    return value, err


def kummer_phi(a, c, z, refine_tol: float = None):
    """Kummer's confluent hypergeometric function Phi(a, c; z) = 1F1(a; c; z).

    Entire in z; requires c not a non-positive integer.  Accepts scalar
    or ndarray z.  Points whose internal error estimate exceeds
    `refine_tol` (relative) are re-summed in double-double arithmetic;
    the default refines scalars aggressively (1e-10) and arrays only
    when worse than 1e-7.
    """
    if _is_nonpos_int(c):
        raise ParameterError(f"Kummer Phi undefined for c={c}")
    zin, scalar = _as_scalar_or_array(z)
    z = np.atleast_1d(zin)
    a = complex(a)
    c = complex(c)
    if refine_tol is None:
        refine_tol = 1e-10 if scalar else 1e-7

    if _near_int(a) and round(a.real) <= 0:
        # terminating series: exact polynomial, always use it
        val, _ = _phi_taylor(a, c, z)
        return complex(val[0]) if scalar else val.reshape(zin.shape)

    r = np.abs(z)
    out = np.empty_like(z)
    err = np.empty(z.shape)

    lo = r <= PHI_SERIES_MAX
    hi = r >= PHI_ASY_MIN
    mid = ~(lo | hi)
    if np.any(lo):
        out[lo], err[lo] = _phi_taylor_oriented(a, c, z[lo])
    if np.any(hi):
        out[hi], err[hi] = _phi_asymptotic(a, c, z[hi])
    if np.any(mid):
        zs = z[mid]
        v_t, e_t = _phi_taylor_oriented(a, c, zs)
        v_a, e_a = _phi_asymptotic(a, c, zs)
        pick_t = e_t <= e_a
        out[mid] = np.where(pick_t, v_t, v_a)
        err[mid] = np.where(pick_t, e_t, e_a)

    weak = err > refine_tol * (np.abs(out) + 1e-300)
    weak &= r < PHI_ASY_MIN   # beyond that the asymptotics are the truth
    for idx in np.flatnonzero(weak):
        out.flat[idx] = _phi_taylor_dd(a, c, z.flat[idx])
    _check_finite(out, "kummer_phi")
    return complex(out[0]) if scalar else out.reshape(zin.shape)


def kummer_phi_dz(a, c, z):
    """d/dz Phi(a, c; z) = (a/c) Phi(a+1, c+1; z)."""
    a = complex(a)
    c = complex(c)
    if _is_nonpos_int(c):
        raise ParameterError(f"Kummer Phi derivative undefined for c={c}")
    return (a / c) * kummer_phi(a + 1, c + 1, z)


def phi_regime_pair(a, c, z):
    """(series, asymptotic) values of Phi at z; used to audit the overlap
    window where the evaluation strategy switches regimes.  The series
    side is the double-double sum, i.e. the best the convergent route
    can do."""
    zin, scalar = _as_scalar_or_array(z)
    z = np.atleast_1d(zin)
    v_t = np.array([_phi_taylor_dd(complex(a), complex(c), w) for w in z])
    v_a, _ = _phi_asymptotic(complex(a), complex(c), z)
    if scalar:
        return complex(v_t[0]), complex(v_a[0])
    return v_t.reshape(zin.shape), v_a.reshape(zin.shape)


# -- Tricomi Psi ---------------------------------------------------------------

def _log_with_side(z, side):
    """Principal log, with the branch on the negative real axis selected
    explicitly: side='above' gives arg = +pi, side='below' gives -pi."""
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (z.real < 0)
    if np.any(on_cut):
        if side is None:
            raise BranchCutError(
                "Tricomi Psi evaluated on the negative real axis "
                "without a side annotation")
        sgn = 1.0 if side == 'above' else -1.0
        out = np.log(np.abs(z)) + 1j * np.where(on_cut, sgn * np.pi,
                                                np.angle(z))
        return out
    return np.log(z)


def _psi_asymptotic(a, c, z, side):
    z = np.asarray(z, dtype=complex)
    s, _ = _trunc_sum(lambda n: -(a + n) * (a - c + 1 + n) / ((n + 1.0) * z), z)
    return np.exp(-a * _log_with_side(z, side)) * s


def _psi_connection(a, c, z, side):
    pre1 = gamma_ratio_of([1 - c], [a - c + 1])
    pre2 = gamma_ratio_of([c - 1], [a]) * np.exp(
        (1 - c) * _log_with_side(z, side))
    t1 = pre1 * kummer_phi(a, c, z)
    t2 = pre2 * kummer_phi(a - c + 1, 2 - c, z)
    out = t1 + t2
    # The two terms can nearly cancel (|Psi| << |t1|, |t2|); when they
    # do, recombine with double-double Phi sums so the cancellation does
    # not eat the budgeted digits.  Prefactor rounding (~eps relative)
    # survives the cancellation amplified, which still leaves ~1e-12.
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    out_arr = np.atleast_1d(np.asarray(out, dtype=complex))
    t1_arr = np.atleast_1d(np.asarray(t1, dtype=complex))
    t2_arr = np.atleast_1d(np.asarray(t2, dtype=complex))
    pre2_arr = np.broadcast_to(np.atleast_1d(
        np.asarray(pre2, dtype=complex)), z_arr.shape)
    bad = (np.abs(t1_arr) + np.abs(t2_arr)) > 30.0 * np.abs(out_arr)
    bad &= np.abs(z_arr) > 4.0
    if np.any(bad):
        for idx in np.flatnonzero(bad):
            w = complex(z_arr.flat[idx])
            s1 = _dd.cdd_mul(_dd.cdd_from(complex(pre1)),
                             _phi_taylor_dd_raw(a, c, w))
            s2 = _dd.cdd_mul(_dd.cdd_from(complex(pre2_arr.flat[idx])),
                             _phi_taylor_dd_raw(a - c + 1, 2 - c, w))
            out_arr.flat[idx] = _dd.cdd_to_complex(_dd.cdd_add(s1, s2))
        out = out_arr.reshape(np.shape(out)) if np.ndim(out) else complex(
            out_arr[0])
    return out


def tricomi_psi(a, c, z, side=None):
    """Tricomi's confluent hypergeometric function Psi(a, c; z).

    Cut along the negative real axis; `side` ('above'/'below') selects
    the boundary value there.  Moderate |z| uses the two-Phi connection
    formula; |z| >= PSI_ASY_MIN uses the optimally truncated asymptotic
    series z^{-a} sum_n (-1)^n (a)_n (a-c+1)_n / n! z^{-n}.

    Integer c makes the connection formula degenerate; such points are
    handled by averaging over c +- DEGENERATE_EPS (documented precision
    loss of order 1e-10).
    """
    zin, scalar = _as_scalar_or_array(z)
    z = np.atleast_1d(zin)
    if np.any(z == 0):
        raise DomainError("Tricomi Psi undefined at z = 0")
    a = complex(a)
    c = complex(c)

    out = np.empty_like(z)
    far = np.abs(z) >= PSI_ASY_MIN
    if np.any(far):
        out[far] = _psi_asymptotic(a, c, z[far], side)
    near = ~far
    if np.any(near):
        zs = z[near]
        if _near_int(c, 2 * DEGENERATE_EPS):
            c0 = round(c.real)
            up = _psi_connection(a, c0 + DEGENERATE_EPS, zs, side)
            dn = _psi_connection(a, c0 - DEGENERATE_EPS, zs, side)
            out[near] = 0.5 * (up + dn)
        else:
            out[near] = _psi_connection(a, c, zs, side)
    _check_finite(out, "tricomi_psi")
    return complex(out[0]) if scalar else out.reshape(zin.shape)


def tricomi_psi_continued(a, c, z, loops: int = 1, side=None):
    """Psi continued `loops` times (+1 = counterclockwise) around z = 0.

    The continuation follows from the connection formula: the two Phi
    pieces are entire, so only the z^{1-c} prefactor picks up the
    monodromy factor e^{2 pi i (1-c) loops}.
    """
    z, scalar = _as_scalar_or_array(z)
    a = complex(a)
    c = complex(c)

    def one(cc):
        t1 = gamma_ratio_of([1 - cc], [a - cc + 1]) * kummer_phi(a, cc, z)
        t2 = (gamma_ratio_of([cc - 1], [a])
              * np.exp((1 - cc) * (_log_with_side(z, side)
                                   + 2j * np.pi * loops))
              * kummer_phi(a - cc + 1, 2 - cc, z))
        return t1 + t2

    if _near_int(c, 2 * DEGENERATE_EPS):
        c0 = round(c.real)
        val = 0.5 * (one(c0 + DEGENERATE_EPS) + one(c0 - DEGENERATE_EPS))
    else:
        val = one(c)
    return complex(val[()]) if scalar else val


# -- Gauss 2F1 -----------------------------------------------------------------

def _f21_series(a, b, c, z):
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    for n in range(_SERIES_MAX_TERMS * 4):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        new = total + term
        comp += np.where(np.abs(total) >= np.abs(term),
                         (total - new) + term, (term - new) + total)
        total = new
        if np.all(np.abs(term) <= 1e-18 * (np.abs(total) + 1.0)):
            return total + comp
    raise ConvergenceError("2F1 series did not converge")


def gauss_2f1(a, b, c, z) -> complex:
    """Gauss hypergeometric function for complex parameters.

    Direct series for |z| <= 0.95; the z -> 1/z continuation

        2F1(a,b;c;z) = G[c,b-a;b,c-a] (-z)^{-a} 2F1(a,1+a-c;1+a-b;1/z)
                     + G[c,a-b;a,c-b] (-z)^{-b} 2F1(b,1+b-c;1+b-a;1/z)

    for |z| >= 1.05 with principal branches on the (-z) powers.  The
    annulus in between is rejected, as is integer a-b (degenerate
    continuation).
    """
    if _is_nonpos_int(c):
        raise ParameterError(f"2F1 undefined for c={c}")
    z = complex(z)
    a, b, c = complex(a), complex(b), complex(c)
    r = abs(z)
    if r <= F21_ANNULUS[0]:
        return complex(_f21_series(a, b, c, z)[()])
    if r < F21_ANNULUS[1]:
        raise DomainError(
            f"|z|={r:.4f} inside the rejected annulus around 1 for 2F1")
    if _near_int(a - b, 1e-8):
        raise ParameterError(
            "2F1 continuation degenerate: a - b is an integer")
    lognegz = np.log(-z)
    t1 = (gamma_ratio_of([c, b - a], [b, c - a])
          * np.exp(-a * lognegz)
          * _f21_series(a, 1 + a - c, 1 + a - b, 1 / z)[()])
    t2 = (gamma_ratio_of([c, a - b], [a, c - b])
          * np.exp(-b * lognegz)
          * _f21_series(b, 1 + b - c, 1 + b - a, 1 / z)[()])
    return _check_finite(complex(t1 + t2), "gauss_2f1")


# -- Appell F2 -----------------------------------------------------------------

def appell_f2(a, b, c, d, e, y, z, tol: float = 1e-15) -> complex:
    """Appell function of the second kind,

        F2(a; b, c; d, e; y, z) =
            sum_{m,n} (a)_{m+n} (b)_n (c)_m y^n z^m / (n! m! (d)_n (e)_m),

    summed by anti-diagonals inside its convergence domain |y|+|z| < 1.
    """
    for name, val in (("d", d), ("e", e)):
        if _is_nonpos_int(val):
            raise ParameterError(f"Appell F2 undefined for {name}={val}")
    y, z = complex(y), complex(z)
    if abs(y) + abs(z) >= 1.0:
        raise DomainError(
            f"Appell F2 domain |y|+|z| < 1 violated: {abs(y) + abs(z):.4f}")
    a, b, c, d, e = complex(a), complex(b), complex(c), complex(d), complex(e)

    max_diag = 800
    # B_n = (b)_n y^n / (n! (d)_n),  C_m = (c)_m z^m / (m! (e)_m)
    B = [1.0 + 0.0j]
    C = [1.0 + 0.0j]
    poch_a = 1.0 + 0.0j
    total = 0.0 + 0.0j
    comp = 0.0
    quiet = 0
    for s in range(max_diag):
        if s > 0:
            n = s - 1
            B.append(B[-1] * (b + n) * y / ((n + 1.0) * (d + n)))
            C.append(C[-1] * (c + n) * z / ((n + 1.0) * (e + n)))
            poch_a *= a + (s - 1)
        diag = poch_a * sum(B[n] * C[s - n] for n in range(s + 1))
        total += diag
        if abs(diag) <= tol * (abs(total) + 1.0):
            quiet += 1
            if quiet >= 3:
                return _check_finite(complex(total), "appell_f2")
        else:
            quiet = 0
    raise ConvergenceError("Appell F2 double series did not converge")
