"""Wiener-Hopf factorization layer: Szego constants, plus/minus factors,
the scalar jump solution alpha, and the local functions K_p."""

import numpy as np
import pytest

from fhdet import factorization as fac
from fhdet import symbols as sym
from fhdet.errors import DomainError


def reg_circle(expr):
    return sym.RegularPart(expr=expr, variable='z')


def reg_line(expr, kappa=3.0):
    return sym.RegularPart(expr=expr, variable='xi', decay_kappa=kappa)


RUNGE = 'exp(1/(xi**2 + 1))'      # log F = 1/(xi^2+1), all integrals known


# -- szego_constants -----------------------------------------------------------

def test_szego_trivial():
    data = fac.szego_constants(reg_circle('1'))
    assert data.g_of_b == pytest.approx(1.0, abs=1e-13)
    assert data.e_of_b == pytest.approx(1.0, abs=1e-13)


def test_szego_exp_cos():
    # log b = 0.5 cos(theta): alpha_{+-1} = 0.25, G = 1, E = e^{1/16}
    data = fac.szego_constants(reg_circle('exp(0.25*(z + 1/z))'))
    assert data.coeff(1) == pytest.approx(0.25, abs=1e-13)
    assert data.coeff(-1) == pytest.approx(0.25, abs=1e-13)
    assert data.coeff(0) == pytest.approx(0.0, abs=1e-13)
    assert data.g_of_b == pytest.approx(1.0, abs=1e-13)
    assert data.e_of_b == pytest.approx(np.exp(1.0 / 16), rel=1e-12)


def test_szego_exp_sin():
    # log b = 0.5 sin(theta) = -0.25j (z - 1/z): E = e^{t^2/4} as well
    data = fac.szego_constants(reg_circle('exp(-0.25j*(z - 1/z))'))
    assert data.e_of_b == pytest.approx(np.exp(1.0 / 16), rel=1e-12)
    assert data.g_of_b == pytest.approx(1.0, abs=1e-12)


def test_szego_truncation_stability():
    # Cauchy-sequence check: K -> 2K leaves the constants unchanged
    reg = reg_circle('exp(0.25*(z + 1/z) + 0.1j*z)')
    d1 = fac.szego_constants(reg, K=64)
    d2 = fac.szego_constants(reg, K=128)
    assert abs(d1.e_of_b - d2.e_of_b) < 1e-13
    assert abs(d1.g_of_b - d2.g_of_b) < 1e-14


def test_szego_conjugate_symmetry():
    # real positive b: alpha_{-k} = conj(alpha_k)
    data = fac.szego_constants(reg_circle('exp(0.25*(z + 1/z))'))
    for k in (1, 2, 3, 7):
        assert data.coeff(-k) == pytest.approx(np.conj(data.coeff(k)),
                                               abs=1e-13)


# -- wh_factor_circle ----------------------------------------------------------

def test_wh_circle_trivial():
    data = fac.szego_constants(reg_circle('1'))
    bp, bm = fac.wh_factor_circle(data, 0.4 + 0.2j)
    assert bp == pytest.approx(1.0, abs=1e-12)
    assert bm == pytest.approx(1.0, abs=1e-12)


def test_wh_circle_exp_cos_split():
    # log b = t(z + 1/z)/2 splits into b_plus = e^{t z/2}, b_minus = e^{t/(2z)}
    data = fac.szego_constants(reg_circle('exp(0.25*(z + 1/z))'))
    bp, bm = fac.wh_factor_circle(data, 0.3)
    assert bp == pytest.approx(np.exp(0.075), rel=1e-12)
    assert bm == pytest.approx(np.exp(0.5 / (2 * 0.3)), rel=1e-12)
    # normalization: b_plus(0) = 1, b_minus(z) -> 1 as z -> inf
    bp0 = np.exp(fac.log_b_plus(data, 0.0))
    assert bp0 == pytest.approx(1.0, abs=1e-14)
    bm_inf = np.exp(fac.log_b_minus(data, 1e6))
    assert bm_inf == pytest.approx(1.0, abs=1e-6)


def test_wh_circle_reconstruction():
    # b_plus * G * b_minus = b on the circle (radial limits)
    reg = reg_circle('exp(0.25*(z + 1/z) + 0.1j*z)')
    data = fac.szego_constants(reg)
    for th in (0.7, 2.0, -1.3):
        z = np.exp(1j * th)
        bp, bm = fac.wh_factor_circle(data, z)
        assert abs(bp * data.g_of_b * bm
                   - complex(reg.evaluate(z))) < 1e-8


# -- wh_factor_line ------------------------------------------------------------

def test_wh_line_trivial():
    assert fac.wh_factor_line(reg_line('1'), 1j, 'upper') == pytest.approx(1.0)


def test_wh_line_partial_fraction_oracle():
    # log F = 1/(xi^2+1) gives log F_plus(z) = i/(2(z+i)) by residues
    reg = reg_line(RUNGE)
    for z in (1j, 0.5 + 0.8j, -2 + 0.3j):
        got = fac.log_wh_factor_line(reg, z, 'upper')
        want = 1j / (2 * (z + 1j))
        assert abs(got - want) < 1e-9, z
    # lower factor by symmetry: log F_minus(z) = -i/(2(z-i))
    for z in (-1j, 0.4 - 1.2j):
        got = fac.log_wh_factor_line(reg, z, 'lower')
        want = -1j / (2 * (z - 1j))
        assert abs(got - want) < 1e-9, z


def test_wh_line_boundary_value():
    # F_plus on the axis: Richardson-extrapolated offset limit
    reg = reg_line(RUNGE)
    got = fac.wh_factor_line(reg, 0.0, 'upper')
    assert abs(got - np.exp(0.5)) < 1e-7


def test_wh_line_reconstruction():
    reg = reg_line(RUNGE)
    for xi in (0.4, -1.7):
        fp = fac.wh_factor_line(reg, xi, 'upper')
        fm = fac.wh_factor_line(reg, xi, 'lower')
        assert abs(fp * fm - complex(reg.evaluate(xi))) < 1e-7


def test_wh_line_normalization_along_ray():
    reg = reg_line(RUNGE)
    v1 = fac.wh_factor_line(reg, 5j, 'upper')
    v2 = fac.wh_factor_line(reg, 50j, 'upper')
    assert abs(v1 - 1) > abs(v2 - 1)
    assert abs(v2 - 1) < 2e-2


# -- e_of_f ----------------------------------------------------------------------

def test_e_of_f_trivial():
    assert fac.e_of_f(reg_line('1')) == pytest.approx(1.0)


def test_e_of_f_closed_form():
    # Finv[log F](t) = e^{-|t|}/2, so E[F] = exp(int t e^{-2t}/4) = e^{1/16}
    val = fac.e_of_f(reg_line(RUNGE))
    assert val == pytest.approx(np.exp(1.0 / 16), rel=1e-8)
    # real even F gives real E[F]
    assert abs(val.imag) < 1e-10


# -- alpha ------------------------------------------------------------------------

def test_alpha_trivial():
    spec = sym.SymbolSpec('line', reg_line('1'), ())
    assert fac.alpha_eval(spec, 2j) == pytest.approx(1.0)
    cspec = sym.SymbolSpec('circle', reg_circle('1'), ())
    assert fac.alpha_eval(cspec, 0.3) == pytest.approx(1.0)


def test_alpha_line_closed_form():
    # single singularity a=0, nu=0.2, F=1: alpha_up(i) = (i/2i)^{0.2} = 2^{-0.2}
    spec = sym.SymbolSpec('line', reg_line('1'),
                          (sym.make_singularity(0.0, 0.2, 0.0),))
    assert fac.alpha_eval(spec, 1j) == pytest.approx(2 ** -0.2, rel=1e-12)


def test_alpha_jump_relation_line():
    # alpha_down(xi - i0)/alpha_up(xi + i0) = sigma(xi)
    s1 = sym.make_singularity(-0.8, 0.1 - 0.1j, 0.2 + 0.1j)
    s2 = sym.make_singularity(1.1, -0.05, 0.15)
    spec = sym.SymbolSpec('line', reg_line(RUNGE), (s1, s2))
    data = fac.AlphaData(spec)
    rng = np.random.default_rng(42)
    for _ in range(8):
        xi = rng.uniform(-6, 6)
        if min(abs(xi + 0.8), abs(xi - 1.1)) < 0.2:
            continue
        up = data.alpha_up(complex(xi))
        dn = data.alpha_down(complex(xi))
        sig = sym.eval_line_symbol(spec, xi)
        assert abs(dn / up - sig) < 1e-6, xi


def test_alpha_jump_relation_circle():
    s1 = sym.make_singularity(1.0, 0.1, 0.2)
    s2 = sym.make_singularity(np.exp(2.2j), -0.1 + 0.05j, 0.1 - 0.05j)
    spec = sym.SymbolSpec('circle', reg_circle('exp(0.25*(z + 1/z))'),
                          (s1, s2))
    data = fac.AlphaData(spec)
    rng = np.random.default_rng(1)
    count = 0
    for _ in range(80):
        th = rng.uniform(0, 2 * np.pi)
        z = np.exp(1j * th)
        if min(abs(z - 1.0), abs(z - np.exp(2.2j))) < 0.15:
            continue
        up = data.alpha_up(z)
        dn = data.alpha_down(z)
        sig = sym.eval_circle_symbol(spec, th)
        assert abs(dn / up - sig) < 1e-6, th
        count += 1
    assert count >= 64


def test_alpha_to_one_at_infinity():
    spec = sym.SymbolSpec('line', reg_line(RUNGE),
                          (sym.make_singularity(0.0, 0.1, 0.15),))
    data = fac.AlphaData(spec)
    assert abs(data.alpha_up(200j) - 1) < 5e-3
    assert abs(data.alpha_down(-200j) - 1) < 5e-3


# -- K_p --------------------------------------------------------------------------

def test_kp_line_single_closed_form():
    # a=0, F=1, nu=nubar=gamma: K_1(0) = (-i)^gamma / i^gamma = e^{-i pi gamma}
    g = 0.17
    spec = sym.SymbolSpec('line', reg_line('1'),
                          (sym.make_singularity(0.0, g, g),))
    val = fac.k_p_eval(spec, 0, 0.0, scale=7.0)
    assert val == pytest.approx(np.exp(-1j * np.pi * g), rel=1e-12)


def test_kp_scale_dependence():
    # only the x^{2 delta_p} prefactor depends on the scale
    s1 = sym.make_singularity(-1.0, 0.1 - 0.2j, 0.3 + 0.2j)
    s2 = sym.make_singularity(1.0, 0.0, 0.1)
    spec = sym.SymbolSpec('line', reg_line(RUNGE), (s1, s2))
    z = -1.0 + 0.1j
    x1, x2 = 11.0, 29.0
    r = (fac.k_p_eval(spec, 0, z, x1) / fac.k_p_eval(spec, 0, z, x2))
    want = np.exp(2 * s1.delta * (np.log(x1) - np.log(x2))
                  - 1j * (x1 - x2) * s1.location)
    assert r == pytest.approx(want, rel=1e-10)


def test_kp_out_of_disk():
    s1 = sym.make_singularity(-1.0, 0.1, 0.2)
    s2 = sym.make_singularity(1.0, 0.0, 0.1)
    spec = sym.SymbolSpec('line', reg_line('1'), (s1, s2))
    with pytest.raises(DomainError):
        fac.k_p_eval(spec, 0, 0.2, scale=5.0)


def test_kp_holomorphy_probe():
    # discrete Cauchy-Riemann residual on a 5x5 stencil inside the disk
    s1 = sym.make_singularity(-1.0, 0.1 - 0.2j, 0.3 + 0.2j)
    s2 = sym.make_singularity(1.0, 0.05, 0.1)
    spec = sym.SymbolSpec('line', reg_line('1'), (s1, s2))
    h = 0.001
    grid = np.array([[fac.k_p_eval(spec, 0, -1.0 + h * (i - 2)
                                   + 1j * h * (j - 2), 5.0)
                      for j in range(5)] for i in range(5)])
    dx = (grid[3, 2] - grid[1, 2]) / (2 * h)
    dy = (grid[2, 3] - grid[2, 1]) / (2 * h)
    # holomorphy: d/dy = i d/dx
    assert abs(dy - 1j * dx) < 1e-6 * (1 + abs(dx))
    # same probe for the circle variant
    c1 = sym.make_singularity(1.0, 0.1, 0.2)
    c2 = sym.make_singularity(-1.0, -0.05, 0.15)
    cspec = sym.SymbolSpec('circle', reg_circle('exp(0.25*(z + 1/z))'),
                           (c1, c2))
    hh = 0.001
    gridc = np.array([[fac.k_p_eval(cspec, 0, 1.0 + hh * (i - 2)
                                    + 1j * hh * (j - 2), 64.0)
                       for j in range(5)] for i in range(5)])
    dx = (gridc[3, 2] - gridc[1, 2]) / (2 * hh)
    dy = (gridc[2, 3] - gridc[2, 1]) / (2 * hh)
    assert abs(dy - 1j * dx) < 1e-6 * (1 + abs(dx))


def test_kp_circle_limit_value_finite():
    # the (1-z/a)/(-log(z/a)) bracket has a removable singularity at z=a
    c1 = sym.make_singularity(1.0, 0.1 - 0.05j, 0.2 + 0.05j)
    cspec = sym.SymbolSpec('circle', reg_circle('1'), (c1,))
    v_at = fac.k_p_eval(cspec, 0, 1.0, 32.0)
    v_near = fac.k_p_eval(cspec, 0, 1.0 + 1e-7, 32.0)
    assert np.isfinite(v_at) and abs(v_at - v_near) < 1e-5 * abs(v_at)
