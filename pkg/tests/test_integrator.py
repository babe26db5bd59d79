import cmath
import math
from fractions import Fraction

import numpy
import pytest
import sympy
from scipy import integrate

from logperiods.cells import chain_of, disk_interval, eta2_one, eta2_zero, point
from logperiods.chain_core import INF, Chain, SimplicialComplex, Vertex
from logperiods.geometry import Disk, DomainError, Interval, LinearCell, ParamCell
from logperiods.integrator import (I_n, QuadratureConfig, ThomPreconditionError, extrapolate,
                                   integrate_by_truncation, integrate_omega, omega_density,
                                   thom_form_value, truncate_chain, truncated_integral,
                                   verify_cauchy, verify_cauchy_simplicial)
from logperiods.random_instances import triangulated_disk_box
from logperiods.suites import check_thom_vs_exact

TWO_PI_I = 2j * math.pi


def segment(a, b):
    t = sympy.Symbol("t", real=True)
    return ParamCell([Interval(t, a, b)], [t], label="segment")


def li2_series(a, terms=200):
    return sum(a ** k / k ** 2 for k in range(1, terms))


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(truncation_radii=(0.01, 0.02))
    assert QuadratureConfig().tol_for(3) == 1e-4


def test_segment_against_quadrature_oracle():
    r = integrate_omega(segment(1, 2), 1)
    oracle, _ = integrate.quad(lambda t: 1 / t, 1, 2)
    assert r.converged
    assert abs(r.value - oracle / TWO_PI_I) < 1e-10
    assert abs(r.value - (-0.1103178000763258j)) < 1e-10


def test_type_reason_zero_is_exact():
    r = integrate_omega(eta2_one(Fraction(1, 2)), 3)
    assert r.value == 0 and r.exact and r.evaluations == 0


def test_eta2_zero_gives_dilogarithm():
    r = integrate_omega(eta2_zero(Fraction(1, 2)), 2)
    li2 = li2_series(0.5)
    assert abs(li2 - 0.5822405264650125) < 1e-12
    assert abs(abs(r.value * TWO_PI_I ** 2) - li2) < 1e-6
    # orientation (t1, t0): the value is -Li2(a) / (2 pi i)^2 before the global sign
    assert abs(r.value * TWO_PI_I ** 2 + li2) < 1e-6


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        integrate_omega(segment(1, 2), 2)


def test_I0_is_the_inclusion_of_Q():
    g = Chain.from_cells(0, [(point(), Fraction(3, 4))])
    assert I_n(g).value == 0.75


def test_chain_inside_divisor_integrates_to_zero():
    t, u = sympy.Symbol("t", real=True), sympy.Symbol("u", real=True)
    cell = ParamCell([Interval(t, 2, 3), Interval(u, 0, 1)], [1, t + sympy.I * u])
    assert I_n(chain_of((cell, 1))).value == 0


def test_I_n_is_rational_linear():
    g1 = chain_of((segment(1, 2), 1))
    g2 = chain_of((segment(Fraction(1, 3), 5), 1))
    combo = g1 * Fraction(2, 3) + g2 * -3
    lhs = I_n(combo).value
    rhs = Fraction(2, 3) * I_n(g1).value - 3 * I_n(g2).value
    assert abs(lhs - rhs) < 1e-10


def test_I2_carries_the_global_sign():
    # I_2 = (-1)^1 * integral
    cell = eta2_zero(Fraction(1, 3))
    assert abs(I_n(chain_of((cell, 1))).value + integrate_omega(cell, 2).value) < 1e-12


def test_cauchy_on_disk_box():
    r = verify_cauchy(chain_of((disk_interval(1, 2), 1)), tolerance=1e-6)
    assert r.passed
    assert abs(r.boundary_term.value - math.log(2) / TWO_PI_I) < 1e-6


def test_cauchy_reduces_to_stokes_away_from_faces():
    w, t = sympy.Symbol("w"), sympy.Symbol("t", real=True)
    empty = {(i, al): [] for i in (1, 2) for al in (0, INF)}
    cell = ParamCell([Disk(w, 3, 1), Interval(t, 2, 3)], [w, t], 1, empty, "far box")
    r = verify_cauchy(chain_of((cell, 1)), tolerance=1e-6)
    assert r.boundary_term.value == 0
    assert r.passed and abs(r.residual) < 1e-6


def test_cauchy_on_triangulated_disk_box():
    K, g = triangulated_disk_box(1, 2)
    r = verify_cauchy_simplicial(K, g)
    assert r.passed
    assert abs(r.boundary_term.value - math.log(2) / TWO_PI_I) < 1e-10


def test_dilog_chains_cauchy_at_half():
    from logperiods.suites import check_dilog_cauchy
    c = check_dilog_cauchy(Fraction(1, 2))
    assert c.passed, c.detail


@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_thom_form_normalization(eps):
    w = sympy.Symbol("w")
    r = thom_form_value(ParamCell([Disk(w, 0, 1)], [w]), 1, 0, eps)
    assert abs(r.value - 1) < 1e-8


def test_thom_form_on_disjoint_cell_is_exactly_zero():
    cell = LinearCell([[(2, 0)], [(3, 0)], [(2, 1)]])
    assert thom_form_value(cell, 1, 0, 0.1).value == 0


def test_thom_form_precondition():
    cell = LinearCell([[(Fraction(1, 20), 0)], [(3, 0)], [(0, 2)]])
    with pytest.raises(ThomPreconditionError):
        thom_form_value(cell, 1, 0, 0.1)


def test_thom_form_matches_intersection_numbers():
    c = check_thom_vs_exact(numpy.random.default_rng(0), 50, routes=("polar",))
    assert c.passed and c.residual < 1e-6
    assert set(c.detail["intersection_numbers"]) >= {"0", "1", "-1"}


def test_thom_form_by_quadrature_matches_intersection_numbers():
    c = check_thom_vs_exact(numpy.random.default_rng(1), 8, routes=("quadrature",))
    assert c.passed and c.residual < 1e-6


def test_truncation_far_from_faces_keeps_everything():
    s, t = sympy.Symbol("s", real=True), sympy.Symbol("t", real=True)
    cell = ParamCell([Interval(s, 2, 3), Interval(t, 2, 3)], [s, t], label="far square")
    geq, eq = truncate_chain(chain_of((cell, 1)), 0.01)
    assert not eq
    r1 = I_n(geq)
    r2 = I_n(chain_of((cell, 1)))
    assert abs(r1.value - r2.value) < 1e-10
    oracle = math.log(1.5) ** 2 / TWO_PI_I ** 2
    assert abs(abs(r2.value) - abs(oracle)) < 1e-10


def test_truncation_of_disk_box_lives_on_the_small_circle():
    eps = 0.05
    geq, eq = truncate_chain(chain_of((disk_interval(1, 2), 1)), eps, around=(1, 0))
    assert eq
    for cell in eq.terms:
        for p in cell.sample_points(10, seed=3):
            z = cell.evaluate(p)
            assert abs(abs(z[0]) - eps) < 1e-9
            assert 1 - 1e-12 <= z[1].real <= 2 + 1e-12


def test_extrapolation_recovers_the_limit():
    radii = [0.02, 0.01, 0.005, 0.0025]
    vals = [1.5 + 0.3 * e * math.log(1 / e) - 2 * e for e in radii]
    L, resid = extrapolate(radii, vals)
    assert abs(L - 1.5) < 1e-12 and resid < 1e-12


def test_truncation_limit_agrees_with_direct_integral():
    cell = eta2_zero(Fraction(1, 2))
    direct = integrate_omega(cell, 2).value
    limit = integrate_by_truncation(cell, 2).value
    assert abs(direct - limit) < 1e-3 * abs(direct)


def test_density_cache_respects_parameter_names():
    cell = eta2_zero(Fraction(1, 2))
    canon, _ = cell.canonical()
    # warm the cache through the renamed twin first
    integrate_omega(canon, 2)
    dens, reals, _ = omega_density(cell)
    assert dens.free_symbols <= set(reals) == set(cell.params)
    assert abs(truncated_integral(cell, 2, 0.01).value) > 0


def test_reproducible_and_thread_independent():
    g = chain_of((disk_interval(Fraction(1, 4), Fraction(3, 4)), 1))
    a = verify_cauchy(g).residual
    b = verify_cauchy(g).residual
    c = verify_cauchy(g, QuadratureConfig(threads=2)).residual
    assert a == b
    assert abs(a - c) < 1e-12
