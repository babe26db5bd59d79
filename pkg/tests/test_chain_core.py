import json
from fractions import Fraction

import numpy
import pytest
from hypothesis import given, settings, strategies as st

from logperiods.chain_core import (INF, BundleParseError, Chain, ObstructionError,
                                   SimplicialComplex, SolvabilityError, StructuralError, Vertex,
                                   barycentric_subdivision, boundary, carrier_homotopy,
                                   check_homotopy, dump_bundle, faces_of, geometric_refinement,
                                   incidence_index, load_bundle, orient, solve_boundary,
                                   subdivision_operator)
from logperiods.random_instances import random_chain_on, random_complex


def simplex_complex(k, n=1, offset=2):
    verts = [Vertex(j, ((offset + j, j * j + 1),) * n) for j in range(k + 1)]
    return SimplicialComplex.from_maximal(verts, [tuple(range(k + 1))], None, n)


def line_with_divisor():
    # vertex 1 sits on z = 1, the divisor
    verts = [Vertex(0, ((3, 0),)), Vertex(1, ((1, 0),))]
    return SimplicialComplex.from_maximal(verts, [(0, 1)], None, 1)


def test_boundary_of_triangle():
    K = simplex_complex(2)
    c = boundary(Chain.from_simplices(1, [((0, 1, 2), 1)]), K)
    assert c == Chain.from_simplices(1, [((1, 2), 1), ((0, 2), -1), ((0, 1), 1)])


def test_boundary_squared_on_tetrahedron():
    K = simplex_complex(3)
    c = Chain.from_simplices(1, [((0, 1, 2, 3), 1)])
    assert not boundary(boundary(c, K), K)


def test_relative_boundary_drops_divisor_endpoint():
    K = line_with_divisor()
    c = boundary(Chain.from_simplices(1, [((0, 1), 1)]), K, relative=True)
    assert c == Chain.from_simplices(1, [((0,), -1)])
    assert K.in_divisor((1,)) and not K.in_divisor((0,))


def test_boundary_rejects_foreign_simplex():
    K = simplex_complex(1)
    with pytest.raises(StructuralError):
        boundary(Chain.from_simplices(1, [((0, 5), 1)]), K)


def test_orientation_is_carried_by_the_coefficient():
    assert orient((2, 0, 1)) == ((0, 1, 2), 1)
    assert orient((1, 0, 2)) == ((0, 1, 2), -1)
    c = Chain.from_simplices(1, [((1, 0), 1)])
    assert c.terms == {(0, 1): Fraction(-1)}
    with pytest.raises(StructuralError):
        orient((0, 0, 1))


def test_zero_coefficients_are_dropped():
    c = Chain.from_simplices(1, [((0, 1), 1), ((1, 0), 1)])
    assert not c and c.terms == {}


def test_mixed_degrees_rejected():
    with pytest.raises(StructuralError):
        Chain(1, 1, {(0, 1): 1, (0, 1, 2): 1})


def test_incidence_index():
    assert incidence_index((0, 1, 2), (1, 2)) == 1
    assert incidence_index((0, 1, 2), (0, 2)) == -1
    with pytest.raises(ValueError):
        incidence_index((0, 1, 2), (0,))


def test_incidence_composes_to_zero():
    s = (0, 1, 2, 3)
    for rho in faces_of(s):
        if len(rho) != 2:
            continue
        total = 0
        for nu in faces_of(s):
            if len(nu) == 3 and set(rho) <= set(nu):
                total += incidence_index(s, nu) * incidence_index(nu, rho)
        assert total == 0


def test_incidence_matches_boundary_coefficient():
    s = (0, 1, 2, 3)
    bd = boundary(Chain.from_simplices(1, [(s, 1)]))
    for nu, c in bd.terms.items():
        assert incidence_index(s, nu) == c


def test_barycentric_segment_halves():
    K = simplex_complex(1)
    R = barycentric_subdivision(K)
    img = subdivision_operator(Chain.from_simplices(1, [((0, 1), 1)]), R)
    b = max(R.fine.vertices)
    assert img == Chain.from_simplices(1, [((b, 1), 1), ((0, b), 1)])


def test_subdivision_of_zero():
    K = simplex_complex(2)
    R = barycentric_subdivision(K)
    assert not subdivision_operator(Chain.zero(1, 1), R)


def test_geometric_refinement_agrees_with_barycentric():
    K = simplex_complex(2)
    R = barycentric_subdivision(K)
    G = geometric_refinement(K, R.fine)
    top = Chain.from_simplices(1, [((0, 1, 2), 1)])
    assert subdivision_operator(top, R) == subdivision_operator(top, G)
    assert boundary(subdivision_operator(top, G), R.fine) == \
        subdivision_operator(boundary(top, K), G)


def test_geometric_refinement_rejects_partial_cover():
    K = simplex_complex(2)
    coarse_edge = simplex_complex(1)
    with pytest.raises(StructuralError):
        geometric_refinement(K, coarse_edge)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_subdivision_commutes_with_boundary(seed):
    rng = numpy.random.default_rng(seed)
    K = random_complex(rng, nverts=6, top=2)
    R = barycentric_subdivision(K)
    c = random_chain_on(K, int(rng.integers(1, K.dim + 1)), rng)
    for rel in (False, True):
        assert subdivision_operator(boundary(c, K, relative=rel), R) == \
            boundary(subdivision_operator(c, R), R.fine, relative=rel)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_boundary_squared_random(seed):
    rng = numpy.random.default_rng(seed)
    K = random_complex(rng)
    c = random_chain_on(K, K.dim, rng)
    assert not boundary(boundary(c, K), K)
    assert not boundary(boundary(c, K, relative=True), K, relative=True)


def test_solve_boundary_cone():
    K = simplex_complex(2)
    target = Chain.from_simplices(1, [((1,), 1), ((0,), -1)])
    t = solve_boundary(target, K)
    assert boundary(t) == target
    assert t == Chain.from_simplices(1, [((0, 1), 1)])


def test_solve_boundary_zero():
    K = simplex_complex(2)
    assert not solve_boundary(Chain.zero(1, 0), K)


def test_solve_boundary_random_cycles_in_a_simplex():
    rng = numpy.random.default_rng(3)
    K = simplex_complex(4)
    for _ in range(20):
        c = random_chain_on(K, 2, rng)
        z = boundary(c, K)
        assert boundary(solve_boundary(z, K)) == z


def test_solve_boundary_hollow_triangle_fails():
    K = simplex_complex(2)
    hollow = {s for s in K.simplexes if len(s) < 3}
    z = boundary(Chain.from_simplices(1, [((0, 1, 2), 1)]), K)
    with pytest.raises(SolvabilityError):
        solve_boundary(z, hollow)


def test_carrier_homotopy_equal_maps_gives_zero_residual():
    K = simplex_complex(2)
    ident = lambda s: Chain(1, len(s) - 1, {s: 1})
    carriers = {s: set(faces_of(s)) for s in K.simplexes}
    theta = carrier_homotopy(ident, ident, K, carriers)
    assert not check_homotopy(theta, ident, ident, K)


def test_carrier_homotopy_vertex_maps():
    K = simplex_complex(2)
    full = set(K.simplexes)
    ident = lambda s: Chain(1, len(s) - 1, {s: 1})

    def collapse(s):
        if len(s) == 1:
            return Chain(1, 0, {(0,): 1})
        return Chain.zero(1, len(s) - 1)

    carriers = {s: full for s in K.simplexes}
    theta = carrier_homotopy(ident, collapse, K, carriers)
    assert not check_homotopy(theta, ident, collapse, K)


def test_carrier_homotopy_obstruction():
    K = simplex_complex(1)
    a = lambda s: Chain(1, 0, {(0,): 1}) if len(s) == 1 else Chain.zero(1, 1)
    b = lambda s: Chain.zero(1, len(s) - 1)
    carriers = {s: set(faces_of(s)) for s in K.simplexes}
    with pytest.raises(ObstructionError):
        carrier_homotopy(a, b, K, carriers)


def test_bundle_roundtrip(tmp_path):
    verts = [Vertex(0, ((2, 0), INF)), Vertex(1, ((Fraction(1, 3), 1), (5, 0))),
             Vertex(2, ((4, 1), (2, 2)))]
    K = SimplicialComplex.from_maximal(verts, [(0, 1, 2)], None, 2)
    c = Chain.from_simplices(2, [((0, 1, 2), Fraction(-3, 4))])
    path = tmp_path / "b.json"
    path.write_text(json.dumps(dump_bundle(K, {"g": c})))
    K2, chains = load_bundle(str(path))
    assert chains["g"] == c
    assert K2.simplexes == K.simplexes
    assert K2.vertices[0].coords[1] == INF
    assert json.loads(path.read_text())["chains"]["g"][0]["coeff"] == "-3/4"


def test_bundle_errors_name_the_location():
    doc = {"n": 1, "vertices": [{"id": 0, "coords": [["1", "0"], ["2", "0"]]}]}
    with pytest.raises(BundleParseError, match=r"vertices\[0\]"):
        load_bundle(doc)
    doc = {"n": 1, "vertices": [{"id": 0, "coords": [["3", "0"]]},
                                {"id": 1, "coords": [["4", "0"]]}],
           "simplexes": [[0, 1]], "chains": {"c": [{"simplex": [0, 2], "coeff": "1"}]}}
    with pytest.raises(BundleParseError, match=r"chains\['c'\]"):
        load_bundle(doc)
    with pytest.raises(BundleParseError):
        load_bundle({"vertices": []})
