"""Symbol representation, admissibility validation, and evaluation."""

import numpy as np
import pytest

from fhdet import symbols as sym
from fhdet.errors import PoleError


def line_spec(sings, expr='1', kappa=3.0):
    return sym.SymbolSpec(geometry='line',
                          regular=sym.RegularPart(expr=expr, variable='xi',
                                                  decay_kappa=kappa),
                          singularities=tuple(sings))


def circle_spec(sings, expr='1'):
    return sym.SymbolSpec(geometry='circle',
                          regular=sym.RegularPart(expr=expr, variable='z'),
                          singularities=tuple(sings))


def jump(location, delta, gamma=0.0):
    return sym.make_singularity(location, gamma - delta, gamma + delta)


# -- make_singularity -------------------------------------------------------------

def test_make_singularity_arithmetic():
    s = sym.make_singularity(0, 0, 0)
    assert s.delta == 0 and s.gamma_exp == 0
    s = sym.make_singularity(0, -0.2, 0.2)
    assert s.delta == pytest.approx(0.2)
    assert s.gamma_exp == pytest.approx(0.0)
    s = sym.make_singularity(1, 0.1 + 0.05j, 0.3 - 0.05j)
    assert s.delta == pytest.approx(0.1 - 0.05j)
    assert s.gamma_exp == pytest.approx(0.2)
    # exponent algebra round trip: nu = gamma - delta, nubar = gamma + delta
    assert s.gamma_exp - s.delta == pytest.approx(s.nu)
    assert s.gamma_exp + s.delta == pytest.approx(s.nubar)


# -- validate_symbol ---------------------------------------------------------------

def test_validate_gamma_bounds_differ_by_geometry():
    s_line = line_spec([sym.make_singularity(0.0, 0.3, 0.3)])
    rep = sym.validate_symbol(s_line)
    assert not rep.passed
    assert any('gamma-bound' in c.name for c in rep.failures())

    s_circ = circle_spec([sym.make_singularity(1.0, 0.3, 0.3)])
    rep = sym.validate_symbol(s_circ)
    assert rep.passed


def test_validate_trivial_passes():
    assert sym.validate_symbol(circle_spec([])).passed
    assert sym.validate_symbol(line_spec([])).passed


def test_validate_delta_bound_and_distinctness():
    rep = sym.validate_symbol(line_spec([jump(0.0, 0.7)]))
    assert any('delta-bound' in c.name for c in rep.failures())
    rep = sym.validate_symbol(line_spec([jump(0.0, 0.1),
                                         jump(1e-9, 0.1)]))
    assert any('distinct' in c.name for c in rep.failures())


def test_validate_nonvanishing_regular():
    # z - 0.999... vanishes near the circle
    rep = sym.validate_symbol(circle_spec([], expr='z - 1'))
    assert not rep.passed


def test_validator_is_the_invariant_checker():
    # an admissible spec passes every check it reports
    spec = circle_spec([jump(1.0, 0.15), jump(-1.0, -0.05)],
                       expr='exp(0.25*(z + 1/z))')
    rep = sym.validate_symbol(spec)
    assert rep.passed and all(c.passed for c in rep.checks)


# -- line evaluation ---------------------------------------------------------------

def test_line_symbol_trivial():
    spec = line_spec([])
    assert sym.eval_line_symbol(spec, 0.3) == pytest.approx(1.0)


def test_line_symbol_local_jump_phase():
    # sigma ~ e^{-i pi delta sgn xi} |xi|^{-2 gamma} near the singularity,
    # by direct evaluation of the defining product (the local phase
    # orientation follows the definition; see the circle-case identity)
    spec = line_spec([jump(0.0, 0.2)])
    val = sym.eval_line_symbol(spec, 1e-8)
    assert val == pytest.approx(np.exp(-1j * np.pi * 0.2), abs=1e-6)
    val = sym.eval_line_symbol(spec, -1e-8)
    assert val == pytest.approx(np.exp(+1j * np.pi * 0.2), abs=1e-6)


def test_line_symbol_decay():
    spec = line_spec([jump(0.0, 0.2)])
    xs = np.array([10.0, 100.0, 1000.0])
    devs = np.abs(sym.eval_line_symbol(spec, xs) - 1.0)
    # |sigma - 1| = O(1/xi): fitted slope close to -1
    slope = np.polyfit(np.log(xs), np.log(devs), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.05)


def test_line_symbol_local_limit_invariant():
    # |xi-a_k|^{2 gamma_k} e^{+i pi delta_k sgn(xi-a_k)} sigma(xi)
    #   / (F(xi) prod_{j != k} s_j(xi - a_j))  ->  1
    s1 = sym.make_singularity(-1.0, 0.05 - 0.1j, 0.25 + 0.1j)
    s2 = sym.make_singularity(0.7, 0.2, 0.1)
    spec = line_spec([s1, s2], expr='exp(1/(xi**2 + 1))')
    for k, s in enumerate(spec.singularities):
        others = [t for t in spec.singularities if t is not s]
        rest = line_spec(others, expr='exp(1/(xi**2 + 1))')
        for eps in (1e-5, -1e-5, 1e-7, -1e-7):
            xi = s.location.real + eps
            ratio = (abs(eps) ** (2 * s.gamma_exp)
                     * np.exp(1j * np.pi * s.delta * np.sign(eps))
                     * sym.eval_line_symbol(spec, xi)
                     / sym.eval_line_symbol(rest, xi))
            assert abs(ratio - 1) < 1e-3, (k, eps)


def test_line_symbol_sides_agree_on_axis():
    spec = line_spec([jump(0.0, 0.15, 0.1)])
    for xi in (0.5, -0.7, 2.0):
        p = sym.eval_line_symbol(spec, xi, side='principal')
        a = sym.eval_line_symbol(spec, complex(xi), side='above')
        b = sym.eval_line_symbol(spec, complex(xi), side='below')
        assert abs(p - a) < 1e-12 and abs(p - b) < 1e-12


def test_line_symbol_singular_point_error():
    spec = line_spec([jump(0.0, 0.0, 0.2)])
    with pytest.raises(PoleError):
        sym.eval_line_symbol(spec, 0.0)


# -- circle evaluation --------------------------------------------------------------

def test_circle_symbol_trivial_and_periodic():
    spec = circle_spec([])
    assert sym.eval_circle_symbol(spec, 0.4) == pytest.approx(1.0)
    spec = circle_spec([jump(1.0, 0.1, 0.05)], expr='exp(0.25*(z + 1/z))')
    th = np.array([0.3, 1.1, 2.2, -2.7])
    v1 = sym.eval_circle_symbol(spec, th)
    v2 = sym.eval_circle_symbol(spec, th + 2 * np.pi)
    assert np.max(np.abs(v1 - v2)) < 1e-12


def test_circle_jump_ratio():
    # single jump at a = 1:
    # sigma(e^{i th}) = e^{i delta (th - pi sgn th)} for gamma = 0, b = 1
    delta = 0.2
    spec = circle_spec([jump(1.0, delta)])
    hi = sym.eval_circle_symbol(spec, +0.01)
    lo = sym.eval_circle_symbol(spec, -0.01)
    assert abs(abs(hi / lo) - 1) < 1e-12
    expected = np.exp(1j * delta * (0.02 - 2 * np.pi))
    assert hi / lo == pytest.approx(expected, rel=1e-10)


def test_circle_root_modulus_limit():
    # |sigma| (2 - 2 cos th)^{gamma} -> 1 as th -> 0 for a pure root factor
    spec = circle_spec([sym.make_singularity(1.0, 0.1, 0.1)])
    for th in (1e-3, 1e-5):
        v = abs(sym.eval_circle_symbol(spec, th)) * (2 - 2 * np.cos(th)) ** 0.1
        assert abs(v - 1) < 5e-3


def test_circle_against_quoted_jump_form():
    # (1-z/a)^{-nu}(1-a/z)^{-nubar}
    #   = e^{i delta (th - th_k - pi sgn(...))} / (2-2cos(th - th_k))^gamma
    a = np.exp(0.7j)
    s = sym.make_singularity(a, 0.12 - 0.08j, 0.2 + 0.08j)
    spec = circle_spec([s])
    for dth in (0.4, -0.9, 2.0):
        th = 0.7 + dth
        mine = sym.eval_circle_symbol(spec, th)
        quoted = (np.exp(1j * s.delta * (dth - np.pi * np.sign(dth)))
                  / (2 - 2 * np.cos(dth)) ** s.gamma_exp)
        assert mine == pytest.approx(quoted, rel=1e-12)


# -- winding number -----------------------------------------------------------------

def test_winding_number():
    one = sym.RegularPart(expr='1', variable='z')
    assert sym.winding_number(one) == 0
    zn = sym.RegularPart(expr='z', variable='z')
    assert sym.winding_number(zn) == 1
    smooth = sym.RegularPart(expr='exp(0.25*(z + 1/z))', variable='z')
    assert sym.winding_number(smooth) == 0


# -- expression grammar and config ---------------------------------------------------

def test_expression_grammar_rejects_bad_input():
    with pytest.raises(ValueError):
        sym.RegularPart(expr='__import__("os")', variable='z')
    with pytest.raises(ValueError):
        sym.RegularPart(expr='open("x")', variable='z')
    with pytest.raises(ValueError):
        sym.RegularPart(expr='w + 1', variable='z')


def test_exact_log_extraction():
    reg = sym.RegularPart(expr='exp(0.5*cos(0.0) + 1/(xi**2+1))',
                          variable='xi')
    assert reg.has_exact_log
    assert reg.log_evaluate(2.0) == pytest.approx(0.5 + 1 / 5)


def test_symbol_from_config_roundtrip():
    cfg = {
        'geometry': 'circle',
        'regular': 'exp(0.25*(z + 1/z))',
        'singularities': [
            {'location': 0.0, 'nu_re': -0.15, 'nubar_re': 0.15},
            {'location': [-1.0, 0.0], 'nu_re': 0.05, 'nu_im': 0.01,
             'nubar_re': 0.05, 'nubar_im': -0.01},
        ],
    }
    spec = sym.symbol_from_config(cfg)
    assert spec.geometry == 'circle'
    assert spec.singularities[0].location == pytest.approx(1.0)
    assert spec.singularities[0].delta == pytest.approx(0.15)
    assert spec.singularities[1].location == pytest.approx(-1.0)
    assert spec.singularities[1].gamma_exp == pytest.approx(0.05)
    assert sym.validate_symbol(spec).passed

    line = sym.symbol_from_config({
        'geometry': 'line',
        'regular': {'expr': 'exp(1/(xi**2+1))', 'decay_kappa': 3.0},
        'singularities': [{'location': 0.5, 'nu_re': 0.1,
                           'nubar_re': 0.1}],
    })
    assert line.geometry == 'line'
    assert line.singularities[0].location == pytest.approx(0.5)
