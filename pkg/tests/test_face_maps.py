import itertools
from fractions import Fraction

import numpy
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from logperiods.cells import chain_of, disk_interval
from logperiods.chain_core import INF, Chain, SimplicialComplex, Vertex, boundary
from logperiods.face_maps import (AdmissibilityError, Cochain, ContractError, FaceContext,
                                  GenericityError, _cup, build_good_ordering, cap_product,
                                  cup_product, cubical_differential,
                                  cubical_differential_squared, exact_thom_cocycle, face_complex,
                                  face_map, missing_face, param_to_linear,
                                  random_good_ordering, random_thom_cocycle, refine_segments,
                                  shifted_thom_cocycle)
from logperiods.geometry import (CubicalFace, FaceEntry, Interval, ParamCell, StdSimplex,
                                 linear_chain)
from logperiods.integrator import validate_declared_faces
from logperiods.random_instances import (PRISM_BASE, admissible_instance, random_complex,
                                         random_total_order, triangulated_disk_box)

H10 = CubicalFace.single(1, 0)


def planar(points, tris):
    verts = [Vertex(j, (p,)) for j, p in enumerate(points)]
    return SimplicialComplex.from_maximal(verts, tris, None, 1)


def test_good_ordering_construction_rule():
    verts = [Vertex(1, ((0, 0),)), Vertex(2, ((3, 1),)), Vertex(3, ((0, 0), ))]
    # two vertices at the same point is fine combinatorially
    K = SimplicialComplex.from_maximal(verts, [(1, 2), (2, 3)], None, 1)
    O = build_good_ordering(K, H10)
    assert sorted(K.vertices, key=lambda v: O.rank[v]) == [2, 1, 3]
    assert O.is_good(K)


def test_good_ordering_without_face_vertices_is_id_order():
    K = planar([(2, 1), (3, 1), (4, 2)], [(0, 1, 2)])
    O = build_good_ordering(K, H10)
    assert [v for v, _ in sorted(O.rank.items(), key=lambda kv: kv[1])] == [0, 1, 2]


def test_good_ordering_property_on_random_complexes():
    rng = numpy.random.default_rng(11)
    for _ in range(100):
        K = random_complex(rng)
        for face in (H10, CubicalFace.single(2, INF)):
            assert build_good_ordering(K, face).is_good(K)
            assert random_good_ordering(K, face, rng).is_good(K)


def test_exact_thom_winding_and_disjoint():
    K = planar([(2, Fraction(1, 5)), (-1, 2), (Fraction(-3, 2), -2), (4, 3)],
               [(0, 1, 2), (0, 1, 3)])
    T = exact_thom_cocycle(K, (1, 0))
    assert T((0, 1, 2)) == 1
    assert T((0, 2, 1)) == -1
    assert T((0, 1, 3)) == 0
    assert T.vanishes_on_W() and T.is_cocycle(K)


def _random_transverse(rng, npts=6):
    pts = [(Fraction(int(rng.integers(-9, 10)), 3), Fraction(int(rng.integers(-9, 10)), 3))
           for _ in range(npts)]
    pts = [p for p in dict.fromkeys(pts) if p != (0, 0)]
    tris = [t for t in itertools.combinations(range(len(pts)), 3)
            if rng.random() < 0.5]
    return planar(pts, tris or [(0, 1, 2)])


def test_exact_thom_cocycle_property():
    rng = numpy.random.default_rng(2)
    checked = 0
    for _ in range(60):
        K = _random_transverse(rng)
        try:
            T = exact_thom_cocycle(K, (1, 0))
        except (GenericityError, ValueError):
            continue
        checked += 1
        assert T.is_cocycle(K)
        assert T.vanishes_on_W()
    assert checked > 20


def test_non_transverse_simplex_rejected():
    # the edge (0, 1) passes through 0
    K = planar([(-1, 0), (1, 0), (0, 2)], [(0, 1, 2)])
    with pytest.raises(GenericityError):
        exact_thom_cocycle(K, (1, 0))


def test_cap_product_front_face_rule():
    verts = [Vertex(j, ((j + 2, 1),)) for j in range(5)]
    K = SimplicialComplex.from_maximal(verts, [tuple(range(5))], None, 1)
    q = Fraction(3, 7)
    u = Cochain(2, {(0, 1, 2): q})
    O = build_good_ordering(K, H10)
    g = Chain.from_simplices(1, [((0, 1, 2, 3, 4), 1)])
    assert cap_product(u, O, g) == Chain.from_simplices(1, [((2, 3, 4), q)])
    assert not cap_product(Cochain(2, {(1, 2, 3): q}), O, g)


def test_cap_product_wrong_ordering_is_a_contract_error():
    inst = admissible_instance(numpy.random.default_rng(0))
    T = random_thom_cocycle(inst.K, H10, numpy.random.default_rng(1))
    O = build_good_ordering(inst.K, CubicalFace.single(2, 0))
    with pytest.raises(ContractError):
        cap_product(T, O, inst.chain)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cap_boundary_formula(seed):
    rng = numpy.random.default_rng(seed)
    K = random_complex(rng)
    O = random_total_order(K, rng)
    p = int(rng.integers(0, 3))
    top = K.dim
    if top <= p:
        return
    u = Cochain(p, {s: Fraction(int(rng.integers(-3, 4))) for s in K.by_dim(p)})
    a = Chain(K.n, top, {s: Fraction(int(rng.integers(-3, 4))) for s in K.by_dim(top)})
    lhs = boundary(cap_product(u, O, a, check=False))
    rhs = (cap_product(u, O, boundary(a), check=False)
           - cap_product(u.coboundary(K), O, a, check=False)) * (-1) ** p
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_independence_of_cocycle_and_ordering(seed):
    rng = numpy.random.default_rng(seed)
    inst = admissible_instance(rng)
    K, g = inst.K, inst.chain
    for face in (CubicalFace.single(1, inst.pools["alpha"]),
                 CubicalFace.single(2, inst.pools["beta"])):
        T = random_thom_cocycle(K, face, rng)
        T2 = shifted_thom_cocycle(T, K, rng)
        assert cap_product(T, build_good_ordering(K, face), g) == \
            cap_product(T2, random_good_ordering(K, face, rng), g)


def test_cup_product_support_and_compatibility():
    rng = numpy.random.default_rng(4)
    for _ in range(20):
        inst = admissible_instance(rng)
        K, g = inst.K, inst.chain
        f1 = CubicalFace.single(1, inst.pools["alpha"])
        f2 = CubicalFace.single(2, inst.pools["beta"])
        T1, T2 = random_thom_cocycle(K, f1, rng), random_thom_cocycle(K, f2, rng)
        both = CubicalFace(f1.constraints | f2.constraints)
        O = build_good_ordering(K, both)
        cup = cup_product(T1, T2, O)
        W = missing_face(K, f1) | missing_face(K, f2)
        assert not any(s in W for s in cup.values)
        assert cap_product(T2.cochain, O, cap_product(T1.cochain, O, g, False), False) == \
            cap_product(cup, O, g, False)


def test_cup_product_bilinear_and_same_index_rejected():
    rng = numpy.random.default_rng(8)
    inst = admissible_instance(rng)
    K = inst.K
    f1 = CubicalFace.single(1, inst.pools["alpha"])
    f2 = CubicalFace.single(2, inst.pools["beta"])
    T1, T2 = random_thom_cocycle(K, f1, rng), random_thom_cocycle(K, f2, rng)
    T1b = random_thom_cocycle(K, f1, rng)
    O = build_good_ordering(K, CubicalFace(f1.constraints | f2.constraints))
    lhs = _cup(T1.cochain + T1b.cochain, T2.cochain, O)
    rhs = _cup(T1.cochain, T2.cochain, O) + _cup(T1b.cochain, T2.cochain, O)
    assert lhs.values == {k: v for k, v in rhs.values.items() if v}
    with pytest.raises(ValueError):
        cup_product(T1, T1b, O)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cubical_differential_squares_to_zero(seed):
    rng = numpy.random.default_rng(seed)
    inst = admissible_instance(rng)
    coc = {(i, al): random_thom_cocycle(inst.K, (i, al), rng) for i in (1, 2) for al in (0, INF)}
    assert not cubical_differential_squared(inst.chain, FaceContext(inst.K, coc))


def test_face_map_of_disk_box_is_the_segment():
    a, b = Fraction(1, 2), Fraction(3)
    g = chain_of((disk_interval(a, b), 1))
    seg = face_map(g, 1, 0)
    assert seg.degree == 1 and seg.n == 1
    (cell, c), = seg.terms.items()
    assert c == 1
    lin = param_to_linear(cell)
    assert [v[0][0] for v in lin.vertices] == [a, b]
    assert not face_map(g, 2, 0) and not face_map(g, 1, INF)


def test_differential_of_chain_missing_faces_is_zero():
    t0, t1 = sympy.Symbol("t0", real=True), sympy.Symbol("t1", real=True)
    cell = ParamCell([Interval(t0, 2, 3), Interval(t1, 2, 3)], [t0, t1],
                     declared_faces={(1, 0): [], (1, INF): [], (2, 0): [], (2, INF): []})
    assert not cubical_differential(chain_of((cell, 1)))


def test_face_map_refuses_non_admissible():
    # a 2-simplex in C^2 meeting z1 = 0 along a segment
    verts = [Vertex(0, ((0, 0), (2, 0))), Vertex(1, ((0, 0), (3, 0))),
             Vertex(2, ((2, 1), (5, 1)))]
    K = SimplicialComplex.from_maximal(verts, [(0, 1, 2)], None, 2)
    g = Chain.from_simplices(2, [((0, 1, 2), 1)])
    coc = {(1, 0): random_thom_cocycle(K, (1, 0), numpy.random.default_rng(0))}
    with pytest.raises(AdmissibilityError):
        face_map(g, 1, 0, FaceContext(K, coc))


def _triangle_box(a, b):
    """The union of the prism's base triangles times [a, b] as one ParamCell."""
    s1, s2, t = sympy.Symbol("s1", real=True), sympy.Symbol("s2", real=True), \
        sympy.Symbol("t", real=True)
    P = [sympy.Rational(p[0].numerator, p[0].denominator) +
         sympy.I * sympy.Rational(p[1].numerator, p[1].denominator) for p in PRISM_BASE[1:]]
    z1 = P[0] + s1 * (P[1] - P[0]) + s2 * (P[2] - P[0])
    a, b = sympy.Rational(a), sympy.Rational(b)
    seg = ParamCell([Interval(t, a, b)], [t], label="segment")
    # the slice point is the preimage of z1 = 0 in (s1, s2)
    sol = sympy.solve([sympy.re(z1), sympy.im(z1)], [s1, s2], dict=True)[0]
    faces = {(1, 0): [FaceEntry(seg, 1, {t: (a + b) / 2})], (1, INF): [], (2, 0): [],
             (2, INF): []}
    cell = ParamCell([StdSimplex([s1, s2]), Interval(t, a, b)], [z1, t], 1, faces, "tri-box")
    return cell, sol


def test_cap_backend_matches_declared_backend():
    a, b = Fraction(1), Fraction(2)
    K, gamma = triangulated_disk_box(a, b)
    coc = {(1, 0): exact_thom_cocycle(K, (1, 0)), (1, INF): exact_thom_cocycle(K, (1, INF))}
    ctx = FaceContext(K, coc, check_admissible=False)
    simplicial = face_map(gamma, 1, 0, ctx)
    L = face_complex(K, (1, 0))
    cap_side = refine_segments(linear_chain(simplicial, L))
    cell, _ = _triangle_box(a, b)
    validate_declared_faces(cell)
    declared = face_map(chain_of((cell, 1)), 1, 0)
    lin = Chain.from_cells(1, [(param_to_linear(c), k) for c, k in declared.terms.items()])
    assert cap_side == refine_segments(lin)
