"""Fisher-Hartwig symbols on the real line and on the unit circle.

A symbol is a smooth non-vanishing "regular part" (F on the line, b on
the circle) times a finite product of local singular factors indexed by
exponents (nu_k, nubar_k) at locations a_k:

* line:    sigma(xi) = F(xi) * prod_k s_{nu,nubar}(xi - a_k),
           s_{nu,nubar}(u) = ((u+i)/(u+i0))^nu ((u-i)/(u-i0))^nubar,
* circle:  sigma(z)  = b(z) * prod_k (1 - z/a_k)^{-nu_k} (1 - a_k/z)^{-nubar_k},

all powers on principal branches.  The derived exponents are
2*gamma = nu + nubar (algebraic strength) and 2*delta = nubar - nu
(jump strength); near a_k the modulus behaves like |.|^{-2 gamma} and
the phase jumps by 2*pi*delta.

Regular parts are given as closed-form expressions in a small grammar
(constants, +-*/**, exp/log/sin/cos/tan/sinh/cosh/tanh/sqrt, variable
`xi` or `z`) so that configurations are reproducible data, or as Laurent
coefficients for the circle case.
"""

import ast
import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PoleError, ResolutionError

LINE_GAMMA_MAX = 0.25      # admissibility: Re(gamma) < 1/4 on the line
CIRCLE_GAMMA_MAX = 0.5     # Re(gamma) < 1/2 on the circle
DELTA_MAX = 0.5            # |Re(delta)| < 1/2 everywhere
MIN_LOCATION_GAP = 1e-6    # "too close" guard between singularities
_SING_EVAL_TOL = 1e-14     # evaluation radius treated as "at the singularity"

_ALLOWED_FUNCS = {
    'exp': np.exp, 'log': np.log, 'sin': np.sin, 'cos': np.cos,
    'tan': np.tan, 'sinh': np.sinh, 'cosh': np.cosh, 'tanh': np.tanh,
    'sqrt': np.sqrt,
}
_ALLOWED_NAMES = {'pi': math.pi, 'e': math.e}


def _validate_expr_ast(tree: ast.AST, variable: str):
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Constant, ast.Load)):
            if isinstance(node, ast.Constant) and not isinstance(
                    node.value, (int, float, complex)):
                raise ValueError("only numeric literals allowed")
        elif isinstance(node, ast.Name):
            if (node.id not in _ALLOWED_NAMES
                    and node.id not in _ALLOWED_FUNCS
                    and node.id != variable):
                raise ValueError(f"name {node.id!r} not allowed "
                                 f"(variable is {variable!r})")
        elif isinstance(node, ast.BinOp) and isinstance(
                node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
            pass
        elif isinstance(node, ast.UnaryOp) and isinstance(
                node.op, (ast.UAdd, ast.USub)):
            pass
        elif isinstance(node, ast.Call):
            if (not isinstance(node.func, ast.Name)
                    or node.func.id not in _ALLOWED_FUNCS
                    or node.keywords or len(node.args) != 1):
                raise ValueError("only single-argument calls of "
                                 f"{sorted(_ALLOWED_FUNCS)} allowed")
        elif isinstance(node, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
                               ast.UAdd, ast.USub)):
            pass
        else:
            raise ValueError(f"expression node {type(node).__name__} "
                             "not in the grammar")


@lru_cache(maxsize=256)
def _compile_expr(expr: str, variable: str):
    tree = ast.parse(expr, mode='eval')
    _validate_expr_ast(tree, variable)
    code = compile(tree, f"<regular-part {expr!r}>", 'eval')
    env = dict(_ALLOWED_FUNCS)
    env.update(_ALLOWED_NAMES)

    def evaluator(w):
        local = dict(env)
        local[variable] = w
        out = eval(code, {'__builtins__': {}}, local)
        out = np.asarray(out, dtype=complex)
        w_arr = np.asarray(w)
        if out.shape != w_arr.shape:      # constant expressions broadcast
            out = np.broadcast_to(out, w_arr.shape).copy()
        return out if out.ndim else complex(out)

    return evaluator


def _exp_body(expr: str):
    """If expr is literally exp(<body>), return <body> as source."""
    try:
        tree = ast.parse(expr, mode='eval')
    except SyntaxError:
        return None
    node = tree.body
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id == 'exp' and len(node.args) == 1):
        return ast.unparse(node.args[0])
    return None


@dataclass(frozen=True)
class RegularPart:
    """Smooth non-vanishing factor of a symbol.

    `expr` is a closed-form expression in `xi` (line) or `z` (circle);
    alternatively `coeffs` holds Laurent coefficients c_k, k in
    [-K, K], for kind='fourier-series' (circle only).  `decay_kappa`
    declares the line-case decay F - 1 = O(|xi|^{-(1+kappa)/2}).

    When the expression is literally exp(...), its logarithm is the
    inner expression and is used verbatim; otherwise pointwise principal
    logs are taken (adequate for regular parts that stay off the
    negative real axis).
    """
    expr: str = '1'
    kind: str = 'analytic-closed-form'
    variable: str = 'z'
    coeffs: tuple = None
    decay_kappa: float = 3.0

    def __post_init__(self):
        if self.kind not in ('analytic-closed-form', 'fourier-series'):
            raise ValueError(f"unknown regular-part kind {self.kind!r}")
        if self.kind == 'analytic-closed-form':
            _compile_expr(self.expr, self.variable)
        elif self.coeffs is None:
            raise ValueError("fourier-series regular part needs coeffs")

    @property
    def is_one(self) -> bool:
        return (self.kind == 'analytic-closed-form'
                and self.expr.replace(' ', '') in ('1', '1.0', '(1)'))

    def evaluate(self, w):
        if self.kind == 'fourier-series':
            w = np.asarray(w, dtype=complex)
            K = (len(self.coeffs) - 1) // 2
            out = np.zeros_like(w)
            for k, ck in zip(range(-K, K + 1), self.coeffs):
                out = out + ck * w ** k
            return out
        return _compile_expr(self.expr, self.variable)(
            np.asarray(w, dtype=complex))

    def log_evaluate(self, w):
        """log of the regular part; exact for exp-form expressions."""
        if self.kind == 'analytic-closed-form':
            body = _exp_body(self.expr)
            if body is not None:
                return _compile_expr(body, self.variable)(
                    np.asarray(w, dtype=complex))
        return np.log(self.evaluate(w))

    @property
    def has_exact_log(self) -> bool:
        return (self.kind == 'analytic-closed-form'
                and _exp_body(self.expr) is not None)

    def fingerprint(self):
        return (self.kind, self.expr, self.variable, self.coeffs,
                self.decay_kappa)


@dataclass(frozen=True)
class FHSingularity:
    """One Fisher-Hartwig singularity: location and exponents.

    delta and gamma_exp are derived from (nu, nubar); use
    make_singularity rather than the raw constructor.
    """
    location: complex
    nu: complex
    nubar: complex
    delta: complex
    gamma_exp: complex


def make_singularity(location, nu, nubar) -> FHSingularity:
    """Builds a singularity with 2*delta = nubar - nu, 2*gamma = nu + nubar.

    Admissibility is geometry-dependent and is checked by
    validate_symbol, not here.
    """
    location = complex(location)
    nu = complex(nu)
    nubar = complex(nubar)
    return FHSingularity(location=location, nu=nu, nubar=nubar,
                         delta=(nubar - nu) / 2.0,
                         gamma_exp=(nu + nubar) / 2.0)


@dataclass(frozen=True)
class SymbolSpec:
    """A full symbol: geometry tag, regular part, singularity list."""
    geometry: str
    regular: RegularPart
    singularities: tuple = ()

    def __post_init__(self):
        if self.geometry not in ('line', 'circle'):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        object.__setattr__(self, 'singularities',
                           tuple(self.singularities))

    @property
    def rho(self) -> float:
        """rho = 2 max_k |Re delta_k|; governs the asymptotic error decay."""
        if not self.singularities:
            return 0.0
        return 2.0 * max(abs(s.delta.real) for s in self.singularities)

    @property
    def locations(self):
        return np.array([s.location for s in self.singularities])

    @property
    def min_gap(self) -> float:
        locs = self.locations
        if len(locs) < 2:
            return np.inf
        gaps = [abs(locs[i] - locs[j])
                for i in range(len(locs)) for j in range(i + 1, len(locs))]
        return min(gaps)

    def fingerprint(self):
        sings = tuple((s.location, s.nu, s.nubar)
                      for s in self.singularities)
        return (self.geometry, self.regular.fingerprint(), sings)


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ''


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    checks: tuple

    def failures(self):
        return [c for c in self.checks if not c.passed]


def validate_symbol(spec: SymbolSpec) -> ValidationReport:
    """Checks every admissibility constraint and returns a report.

    Failures are data (per-check diagnostics), not exceptions.
    """
    checks = []

    def add(name, ok, detail=''):
        checks.append(Check(name, bool(ok), detail))

    for k, s in enumerate(spec.singularities):
        ok = (abs(s.delta - (s.nubar - s.nu) / 2) < 1e-15
              and abs(s.gamma_exp - (s.nu + s.nubar) / 2) < 1e-15)
        add(f"exponent-algebra[{k}]", ok,
            "delta/gamma must equal (nubar-nu)/2, (nu+nubar)/2")
        add(f"delta-bound[{k}]", abs(s.delta.real) < DELTA_MAX,
            f"|Re(delta)|={abs(s.delta.real):.4f} must be < 1/2")
        gmax = LINE_GAMMA_MAX if spec.geometry == 'line' else CIRCLE_GAMMA_MAX
        add(f"gamma-bound[{k}]", s.gamma_exp.real < gmax,
            f"Re(gamma)={s.gamma_exp.real:.4f} must be < {gmax}")
        if spec.geometry == 'line':
            add(f"location-real[{k}]", abs(s.location.imag) < 1e-12,
                f"line locations must be real, got {s.location}")
        else:
            add(f"location-unimodular[{k}]",
                abs(abs(s.location) - 1.0) < 1e-9,
                f"circle locations must be unimodular, got {s.location}")

    locs = spec.locations
    for i in range(len(locs)):
        for j in range(i + 1, len(locs)):
            add(f"distinct[{i},{j}]",
                abs(locs[i] - locs[j]) >= MIN_LOCATION_GAP,
                f"locations {i},{j} closer than {MIN_LOCATION_GAP}")

    add("rho", spec.rho < 1.0, f"rho={spec.rho:.4f} must be < 1")

    # regular part: non-vanishing on a dense contour sample, refined near
    # the smallest moduli
    if spec.geometry == 'circle':
        grid = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
        vals = np.abs(np.asarray(spec.regular.evaluate(np.exp(1j * grid))))
        refine = np.argsort(vals)[:16]
        fine = []
        h = 2 * np.pi / 4096
        for idx in refine:
            fine.append(np.linspace(grid[idx] - h, grid[idx] + h, 17))
        fine_vals = np.abs(np.asarray(
            spec.regular.evaluate(np.exp(1j * np.concatenate(fine)))))
        vmin = min(vals.min(), fine_vals.min())
        add("regular-nonvanishing", vmin > 1e-10,
            f"min |b| on refined sample = {vmin:.3e}")
        try:
            w = winding_number(spec.regular)
            add("winding-zero", w == 0, f"winding number = {w}")
        except ResolutionError as exc:
            add("winding-zero", False, str(exc))
    else:
        grid = np.concatenate([np.linspace(-100, 100, 4096),
                               np.geomspace(100, 1e6, 64),
                               -np.geomspace(100, 1e6, 64)])
        vals = np.abs(np.asarray(spec.regular.evaluate(grid), dtype=complex))
        refine = np.argsort(vals)[:16]
        fine = []
        for idx in refine:
            x0 = grid[idx]
            fine.append(np.linspace(x0 - 0.05, x0 + 0.05, 17))
        fine_vals = np.abs(np.asarray(
            spec.regular.evaluate(np.concatenate(fine)), dtype=complex))
        vmin = min(vals.min(), fine_vals.min())
        add("regular-nonvanishing", vmin > 1e-10,
            f"min |F| on refined sample = {vmin:.3e}")
        far = np.abs(np.asarray(
            spec.regular.evaluate(np.array([1e6, -1e6])), dtype=complex) - 1.0)
        add("regular-limit-one", float(far.max()) < 1e-3,
            f"|F - 1| at xi = +-1e6 is {far.max():.3e}")

    passed = all(c.passed for c in checks)
    return ValidationReport(passed=passed, checks=tuple(checks))


# -- evaluation ---------------------------------------------------------------

def _log_upper(u):
    """Principal log with the negative real axis attached from above
    (arg = +pi there, regardless of the sign of a zero imaginary part)."""
    ang = np.angle(u)
    ang = np.where((u.imag == 0) & (u.real < 0), np.pi, ang)
    return np.log(np.abs(u)) + 1j * ang


def _log_lower(u):
    """Principal log with the negative real axis attached from below
    (arg = -pi there)."""
    ang = np.angle(u)
    ang = np.where((u.imag == 0) & (u.real < 0), -np.pi, ang)
    return np.log(np.abs(u)) + 1j * ang


def _sing_factor_log_line(s: FHSingularity, u, side: str):
    """log of ((u+i)/(u+i0))^nu ((u-i)/(u-i0))^nubar for u = xi - a.

    The nu-power's log of u is the boundary value from above (its
    continuation into the lower half picks up 2 pi i left of the
    singularity), the nubar-power's the one from below; `side` selects
    which half-plane the continuation lives in.  On the real axis all
    three choices coincide.
    """
    u = np.asarray(u, dtype=complex)
    lg_up_i = np.log(u + 1j)
    lg_dn_i = np.log(u - 1j)
    neg = u.real < 0
    if side in ('principal', 'above'):
        base = _log_upper(u)
        lg_nu = base
        lg_nubar = base - 2j * np.pi * neg if side == 'above' else _log_lower(u)
    elif side == 'below':
        base = _log_lower(u)
        lg_nu = base + 2j * np.pi * neg
        lg_nubar = base
    else:
        raise ValueError(f"unknown side {side!r}")
    return s.nu * (lg_up_i - lg_nu) + s.nubar * (lg_dn_i - lg_nubar)


def eval_line_symbol_log(spec: SymbolSpec, xi, side: str = 'principal'):
    """log sigma(xi) as the sum of per-factor principal logs.

    This is the canonical branch: exp of it reproduces sigma exactly and
    it tends to 0 at +-infinity, which is what the Szego-type integrals
    require.
    """
    if spec.geometry != 'line':
        raise ValueError("line evaluation requested for a circle symbol")
    xi_arr = np.asarray(xi, dtype=complex)
    for s in spec.singularities:
        if (s.nu != 0 or s.nubar != 0) and np.any(
                np.abs(xi_arr - s.location) < _SING_EVAL_TOL):
            raise PoleError(f"symbol evaluated at singularity {s.location}")
    total = np.asarray(spec.regular.log_evaluate(xi_arr), dtype=complex)
    for s in spec.singularities:
        total = total + _sing_factor_log_line(s, xi_arr - s.location, side)
    return total if total.ndim else complex(total)


def eval_line_symbol(spec: SymbolSpec, xi, side: str = 'principal'):
    """sigma(xi) on the line; `side` selects the continuation branch."""
    out = np.exp(eval_line_symbol_log(spec, xi, side))
    return out if np.ndim(out) else complex(out)


def eval_circle_symbol(spec: SymbolSpec, theta):
    """sigma(e^{i theta}) on the circle, principal branches per factor."""
    if spec.geometry != 'circle':
        raise ValueError("circle evaluation requested for a line symbol")
    theta = np.asarray(theta, dtype=float)
    z = np.exp(1j * theta)
    # exp(log b) = b for either branch choice, so log_evaluate is safe here
    total = np.asarray(spec.regular.log_evaluate(z), dtype=complex)
    for s in spec.singularities:
        if (s.nu != 0 or s.nubar != 0) and np.any(
                np.abs(z - s.location) < _SING_EVAL_TOL):
            raise PoleError(f"symbol evaluated at singularity {s.location}")
        total = total - s.nu * np.log(1 - z / s.location) \
                      - s.nubar * np.log(1 - s.location / z)
    out = np.exp(total)
    return out if out.ndim else complex(out)


def winding_number(regular: RegularPart, max_points: int = 1 << 20) -> int:
    """Winding of the regular part around 0, by phase accumulation.

    The grid doubles until adjacent phase steps stay under pi/2;
    ResolutionError if that never happens.
    """
    n = 1024
    while n <= max_points:
        theta = np.linspace(0.0, 2 * np.pi, n + 1)
        vals = np.asarray(regular.evaluate(np.exp(1j * theta)),
                          dtype=complex)
        if np.any(vals == 0):
            raise ResolutionError("regular part vanishes on the sample grid")
        steps = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(steps)) < np.pi / 2:
            total = float(np.sum(steps))
            return int(round(total / (2 * np.pi)))
        n *= 2
    raise ResolutionError(
        "phase steps exceed pi/2 after maximal grid refinement")


# -- configuration schema ------------------------------------------------------

def _complex_from(entry, re_key, im_key, pair_key):
    if pair_key in entry:
        v = entry[pair_key]
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return complex(v)
    return complex(entry.get(re_key, 0.0), entry.get(im_key, 0.0))


def symbol_from_config(cfg: dict) -> SymbolSpec:
    """Builds a SymbolSpec from the JSON configuration schema.

    Schema: {"geometry": "circle"|"line",
             "regular": "<expr>" | {"expr": ..., "decay_kappa": ...},
             "singularities": [{"location": a | [re, im] | {"theta": t},
                                "nu_re": .., "nu_im": ..,
                                "nubar_re": .., "nubar_im": ..}, ...]}
    For the circle a scalar "location" is read as the angle theta.
    """
    geometry = cfg['geometry']
    reg_cfg = cfg.get('regular', '1')
    if isinstance(reg_cfg, str):
        reg_cfg = {'expr': reg_cfg}
    variable = 'xi' if geometry == 'line' else 'z'
    regular = RegularPart(expr=reg_cfg.get('expr', '1'),
                          variable=variable,
                          decay_kappa=float(reg_cfg.get('decay_kappa', 3.0)))
    sings = []
    for entry in cfg.get('singularities', ()):
        loc = entry['location']
        if isinstance(loc, dict):
            loc = cmath.exp(1j * loc['theta'])
        elif isinstance(loc, (list, tuple)):
            loc = complex(loc[0], loc[1])
        elif geometry == 'circle':
            loc = cmath.exp(1j * float(loc))
        else:
            loc = complex(loc)
        nu = _complex_from(entry, 'nu_re', 'nu_im', 'nu')
        nubar = _complex_from(entry, 'nubar_re', 'nubar_im', 'nubar')
        sings.append(make_singularity(loc, nu, nubar))
    return SymbolSpec(geometry=geometry, regular=regular,
                      singularities=tuple(sings))
