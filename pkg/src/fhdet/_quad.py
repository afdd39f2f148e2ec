"""Shared quadrature machinery.

Everything here works on complex-valued integrands sampled on real
intervals; vectorized callables (ndarray -> ndarray) are assumed.  The
building blocks are composite Gauss-Legendre panels, an adaptive
bisection driver, algebraically graded meshes for endpoint
singularities, a 1/xi tail substitution for slowly decaying integrands,
and QUADPACK Fourier integrals for oscillatory transforms.
"""

from functools import lru_cache

import numpy as np
from scipy import integrate as _si

from .errors import QuadratureError


@lru_cache(maxsize=64)
def gl_rule(n: int):
    """Gauss-Legendre nodes/weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_nodes(breakpoints, n: int):
    """Nodes and weights of the composite n-point GL rule on the given mesh.

    `breakpoints` is an increasing sequence; one panel per consecutive pair.
    Returns flat arrays (nodes, weights).
    """
    bp = np.asarray(breakpoints, dtype=float)
    x, w = gl_rule(n)
    a = bp[:-1][:, None]
    b = bp[1:][:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def fixed_quad(f, breakpoints, n: int = 16):
    """Composite GL quadrature over a fixed mesh (single vectorized call)."""
    nodes, weights = panel_nodes(breakpoints, n)
    return np.sum(weights * f(nodes))


def adaptive_quad(f, a: float, b: float, tol: float = 1e-12,
                  n: int = 15, max_depth: int = 48):
    """Adaptive bisection GL quadrature of a vectorized complex integrand.

    The local error indicator compares one n-point panel against its two
    halves; panels are split until the indicator falls under a local
    share of `tol`.  Raises QuadratureError when the depth budget is
    exhausted before the tolerance is met.
    """
    length = b - a

    def panel_val(lo, hi):
        x, w = gl_rule(n)
        half = 0.5 * (hi - lo)
        return np.sum((half * w) * f(0.5 * (lo + hi) + half * x))

    total = 0.0 + 0.0j
    stack = [(a, b, panel_val(a, b), 0)]
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = panel_val(lo, mid)
        right = panel_val(mid, hi)
        fine = left + right
        err = abs(fine - coarse)
        local_tol = tol * max((hi - lo) / length, 1e-3)
        if err <= local_tol or depth >= max_depth:
            if err > local_tol and err > 1e3 * tol:
                raise QuadratureError(
                    f"adaptive quadrature stalled on [{lo}, {hi}] "
                    f"(err={err:.2e}, tol={local_tol:.2e})")
            total += fine
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


def graded_mesh(a: float, b: float, toward: str, exponent: float,
                n_panels: int = 24):
    """Algebraically graded breakpoints on [a, b].

    `toward` is 'left' or 'right'; panel endpoints cluster toward that
    end like (j/n)**exponent, which resolves an algebraic endpoint
    singularity with a fixed-order panel rule.
    """
    j = np.arange(n_panels + 1, dtype=float) / n_panels
    r = j ** exponent
    if toward == 'left':
        return a + (b - a) * r
    if toward == 'right':
        return b - (b - a) * r[::-1]
    raise ValueError("toward must be 'left' or 'right'")


def jacobi_endpoint_rule(a: float, b: float, toward: str, beta: float,
                         n: int = 24):
    """Induced quadrature for integrands ~ (distance to one endpoint)^beta
    times analytic, beta > -1.

    Gauss-Jacobi nodes with the algebraic factor absorbed into the
    weights, so that sum w_i f(t_i) is spectrally accurate for
    f = t^beta * analytic; the caller keeps evaluating the raw f.
    """
    from scipy.special import roots_jacobi
    if beta <= -1:
        raise ValueError("endpoint exponent must be > -1")
    if abs(beta) < 1e-13:
        return panel_nodes(np.array([a, b]), n)
    half = 0.5 * (b - a)
    if toward == 'left':
        x, w = roots_jacobi(n, 0.0, beta)
        t = a + half * (x + 1.0)
        wt = w * half * (x + 1.0) ** (-beta)
    else:
        x, w = roots_jacobi(n, beta, 0.0)
        t = a + half * (x + 1.0)
        wt = w * half * (1.0 - x) ** (-beta)
    return t, wt


def singular_region_mesh(a: float, b: float, toward: str, grading: float,
                         levels: int = 24, dyadic: int = 16):
    """(GL mesh, cap interval) for a region with one singular endpoint.

    Algebraically graded breakpoints plus a short dyadic cascade toward
    the singular end; the innermost interval is returned separately so
    an induced Gauss-Jacobi rule can cap it.
    """
    base = graded_mesh(a, b, toward, grading, levels)
    if toward == 'left':
        d1 = base[1] - a
        # keep the cap wide enough that induced-rule nodes stay clear of
        # the double-precision neighborhood of the singular point
        dy = max(0, min(dyadic, int(np.log2(max(d1, 1e-300) / 1e-8))))
        casc = a + d1 * 0.5 ** np.arange(dy, -1, -1.0)       # ascending
        return np.concatenate([casc, base[2:]]), (a, float(casc[0]))
    d1 = b - base[-2]
    dy = max(0, min(dyadic, int(np.log2(max(d1, 1e-300) / 1e-8))))
    casc = b - d1 * 0.5 ** np.arange(0, dy + 1.0)            # ascending
    return np.concatenate([base[:-2], casc]), (float(casc[-1]), b)


def singular_region_rule(a: float, b: float, toward: str, beta: float,
                         grading: float, levels: int = 24, n: int = 16,
                         dyadic: int = 16, max_width: float = None):
    """Nodes/weights for [a, b] with an algebraic (t^beta-type) endpoint
    singularity: graded GL panels, a dyadic cascade, and an induced
    Gauss-Jacobi cap on the innermost interval.

    The Jacobi cap makes real exponents spectrally exact; for complex
    exponents (log-oscillatory singularities) the cascade keeps the
    uncontrolled innermost mass negligible.
    """
    mesh, cap = singular_region_mesh(a, b, toward, grading, levels, dyadic)
    if max_width is not None:
        mesh = oscillation_limited(mesh, max_width)
    gn, gw = panel_nodes(mesh, n)
    jn, jw = jacobi_endpoint_rule(cap[0], cap[1], toward, beta, n=max(n, 12))
    nodes = np.concatenate([gn, jn])
    weights = np.concatenate([gw, jw])
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def split_mesh(a: float, b: float, max_width: float):
    """Uniform mesh on [a, b] with panels no wider than max_width."""
    n = max(1, int(np.ceil((b - a) / max_width)))
    return np.linspace(a, b, n + 1)


def oscillation_limited(breakpoints, max_width: float):
    """Refine a mesh so every panel is narrower than max_width."""
    out = []
    bp = np.asarray(breakpoints, dtype=float)
    for lo, hi in zip(bp[:-1], bp[1:]):
        out.append(split_mesh(lo, hi, max_width)[:-1])
    out.append([bp[-1]])
    return np.concatenate(out)


def tail_quad(f, L: float, sign: int = 1, tol: float = 1e-12, n: int = 15):
    """Integral of f over [L, +inf) (sign=+1) or (-inf, -L] (sign=-1),
    oriented left to right in both cases.

    Uses the substitution xi = sign*L/u, u in (0, 1]; requires
    f = O(xi^-2) or faster so the mapped integrand stays integrable.
    The mapped integrand may retain a mild u->0 singularity; the
    adaptive driver with a graded start handles it.
    """
    if L <= 0:
        raise ValueError("tail cutoff must be positive")

    def mapped(u):
        u = np.asarray(u, dtype=float)
        xi = sign * L / u
        return f(xi) * (L / u ** 2)

    # graded toward u = 0 where the decay of f is only just enough
    mesh = graded_mesh(0.0, 1.0, 'left', 3.0, 20)
    total = 0.0 + 0.0j
    for lo, hi in zip(mesh[:-1], mesh[1:]):
        local = max(tol * (hi - lo), tol * 1e-3)
        total += adaptive_quad(mapped, lo, hi, tol=local, n=n)
    return total


def _scalar_parts(g):
    def re(x):
        return float(np.real(g(x)))

    def im(x):
        return float(np.imag(g(x)))

    return re, im


def fourier_integral(g, t: float, quad_limit: int = 256) -> complex:
    """Computes  I(t) = integral over R of g(xi) * exp(-i t xi) dxi.

    g must be smooth on the real line and decay at least like xi^-2.
    QUADPACK's Fourier weights (QAWF) handle the oscillatory tails; the
    t = 0 case falls back to plain infinite-range quadrature.
    """
    if t == 0.0:
        re, im = _scalar_parts(g)
        vr = _si.quad(re, -np.inf, np.inf, limit=quad_limit)[0]
        vi = _si.quad(im, -np.inf, np.inf, limit=quad_limit)[0]
        return vr + 1j * vi

    w = abs(t)
    s = 1.0 if t > 0 else -1.0

    def right(x):
        return g(x)

    def left(x):
        return g(-x)

    total = 0.0 + 0.0j
    # exp(-i t xi) = cos(w xi) - i s sin(w xi) on xi > 0,
    # and cos(w xi) + i s sin(w xi) after xi -> -xi on the left half.
    for part, sgn in ((right, -s), (left, +s)):
        re, im = _scalar_parts(part)
        for comp, coef in ((re, 1.0), (im, 1.0j)):
            c = _si.quad(comp, 0, np.inf, weight='cos', wvar=w,
                         limit=quad_limit, limlst=quad_limit)[0]
            sn = _si.quad(comp, 0, np.inf, weight='sin', wvar=w,
                          limit=quad_limit, limlst=quad_limit)[0]
            total += coef * (c + 1j * sgn * sn)
    return total


def oscillatory_halfline(f, t0: float, base_panel: float = 1.5, n: int = 12,
                         period: float = 2 * np.pi):
    """Averaged truncation of the conditionally convergent integral of f
    over [0, +inf).

    Returns the pair (core, window) with
      core    = integral of f over [0, t0]
      window  = (1/period) * integral over [t0, t0+period] of
                (t0 + period - t) f(t) dt,
    so that core + window equals the average of T -> integral(0..T) over
    one oscillation window; the averaging suppresses the e^{+-it} tail.
    Panels are capped at `base_panel` to resolve unit-frequency
    oscillations.  f must be finite on (0, inf); endpoint singularities
    at 0 are the caller's business (pass a shifted lower limit).
    """
    mesh = split_mesh(0.0, t0, base_panel)
    nodes, weights = panel_nodes(mesh, n)
    core = np.sum(weights * f(nodes))

    wmesh = split_mesh(t0, t0 + period, base_panel)
    wnodes, wweights = panel_nodes(wmesh, n)
    vals = f(wnodes) * (t0 + period - wnodes)
    window = np.sum(wweights * vals) / period
    return core + window
