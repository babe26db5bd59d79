import math
from fractions import Fraction

import mpmath
import pytest

from logperiods.bar_dga import BarComplex, augmented, dilog_elements, scale
from logperiods.hodge_realization import (ComoduleError, GradedComodule, Period, ScenarioError,
                                          betti_pool, build_dilog_scenario, comparison_map,
                                          dilog_comodule, explicit_v_basis, explicit_w_basis,
                                          filtration_level, graded_piece, mixed_tate_data,
                                          realization_kernel, unit_comodule, weight_graded)

TP = 2j * math.pi


@pytest.fixture(scope="module", params=[Fraction(1, 2), Fraction(1, 3)])
def scenario(request):
    return build_dilog_scenario(request.param)


def test_comodules_validate():
    E = dilog_elements()
    assert unit_comodule(E.B).validate()
    assert dilog_comodule(E).validate()


def test_broken_coaction_is_caught():
    E = dilog_elements()
    one = E.B.word()
    # sign flipped on the Li1(a) coefficient: no longer coassociative
    bad = GradedComodule(E.B, {"e2": 2, "e1": 1, "e0": 0}, {
        "e2": [("e2", one), ("e1", E.Li1_a), ("e0", E.Li2)],
        "e1": [("e1", one), ("e0", E.Li1_1ma)],
        "e0": [("e0", one)]})
    with pytest.raises(ComoduleError):
        bad.validate()
    no_counit = GradedComodule(E.B, {"e0": 0}, {"e0": [("e0", scale(one, 2))]})
    with pytest.raises(ComoduleError):
        no_counit.validate()


def test_unit_comodule_realizes_to_the_unit():
    E = dilog_elements()
    K = realization_kernel(unit_comodule(E.B), "betti", E.BB, betti_pool(E))
    assert K.dim == 1
    assert [K.candidates[j].name for j in K.basis[0]] == ["Z0"]
    # c(Z0) = [ ] 1
    (v,) = [K.element(b) for b in K.basis]
    c = comparison_map(v, {"1": Fraction(1)})
    assert [(k, p.exact) for k, p in c.items()] == [(("e0", ((), ((), "1"), 0)), 1)]


def test_kernels_are_three_dimensional(scenario):
    assert scenario.betti.dim == 3 and scenario.derham.dim == 3


def test_kernel_bases_match_the_hand_written_ones(scenario):
    E = scenario.elements
    vs = sorted(map(repr, (scenario.betti.element(b) for b in scenario.betti.basis)))
    ws = sorted(map(repr, (scenario.derham.element(b) for b in scenario.derham.basis)))
    assert vs == sorted(map(repr, explicit_v_basis(E).values()))
    assert ws == sorted(map(repr, explicit_w_basis(E).values()))


def test_period_matrix_shape_and_diagonal(scenario):
    pm = scenario.matrix
    assert pm.is_lower_triangular()
    assert [pm.entries[j][j].symbolic() for j in range(3)] == ["(2pi i)^-2", "(2pi i)^-1", "1"]
    assert pm.residual < 1e-9


def test_period_matrix_against_mpmath(scenario):
    a = float(scenario.a)
    P = scenario.matrix.numeric()
    assert abs(P[2, 0] * TP ** 2 - float(mpmath.polylog(2, a))) < 1e-4
    assert abs(P[1, 0] * TP ** 2 - float(-mpmath.log(1 - a))) < 1e-6
    assert abs(P[2, 1] * TP - math.log(a)) < 1e-6


def test_closed_form_at_one_half():
    sc = build_dilog_scenario(Fraction(1, 2))
    P = sc.matrix.numeric()
    assert abs(P[2, 0] * TP ** 2 - (math.pi ** 2 / 12 - math.log(2) ** 2 / 2)) < 1e-4
    assert abs(P[2, 1] * TP - math.log(0.5)) < 1e-6
    assert abs(P[1, 0] * TP ** 2 - math.log(2)) < 1e-6


def test_weight_filtration(scenario):
    pieces = weight_graded(scenario.betti, scenario.derham)
    assert {w: (len(p.betti), len(p.derham)) for w, p in pieces.items()} == \
        {0: (1, 1), 2: (1, 1), 4: (1, 1)}
    assert graded_piece(scenario.betti, scenario.derham, 3).betti == []


def test_hodge_levels_of_w(scenario):
    levels = sorted(filtration_level(scenario.derham.element(b), "F")
                    for b in scenario.derham.basis)
    assert levels == [0, 1, 2]


def test_mixed_tate(scenario):
    mt = mixed_tate_data(scenario.matrix)
    assert mt.graded_dims() == {0: 1, 2: 1, 4: 1}
    assert mt.check()


def test_scenario_relations_hold(scenario):
    assert scenario.relations
    bad = [r.name for r in scenario.relations if not r.ok]
    assert not bad


def test_scenario_rejects_a_outside_the_interval():
    for a in (Fraction(-1, 2), Fraction(0), Fraction(1), Fraction(3, 2)):
        with pytest.raises(ScenarioError):
            build_dilog_scenario(a, validate=False, compute=False)


def test_period_addition_keeps_exactness():
    p = Period(1, -1, Fraction(1)) + Period(2, -1, Fraction(2))
    assert p.exact == 3 and p.symbolic() == "3*(2pi i)^-1"
    q = p + Period(1, 0, Fraction(1))
    assert q.exact is None and abs(q.value - (3 / TP + 1)) < 1e-15


def test_de_rham_kernel_without_li2_is_smaller():
    E = dilog_elements()
    pool = {"1": E.B.word(), "Li1(a)": E.Li1_a, "Li1(1-a)": E.Li1_1ma}
    K = realization_kernel(dilog_comodule(E), "derham", BarComplex(E.P, augmented(E.P)), pool)
    assert K.dim == 2
