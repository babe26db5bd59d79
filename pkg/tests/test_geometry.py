from fractions import Fraction

import numpy
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from logperiods.cells import chain_of, disk_interval, eta2_one, point, rho2
from logperiods.chain_core import (INF, Chain, SimplicialComplex, Vertex,
                                   barycentric_subdivision)
from logperiods.geometry import (CubicalFace, DomainError, GroupElement, Interval, LinearCell,
                                 ParamCell, ValidationError, all_faces, cell_face_intersection,
                                 check_good_triangulation, group_elements, gn_transform, in_ac,
                                 is_admissible)


def tri(*pts):
    return LinearCell([[p] for p in pts])


def test_cubical_face_validation():
    f = CubicalFace(frozenset([(1, 0), (2, INF)]))
    assert f.codim == 2 and f.indices() == [1, 2]
    with pytest.raises(ValueError):
        CubicalFace(frozenset([(1, 0), (1, INF)]))
    with pytest.raises(ValueError):
        CubicalFace.single(0, 0)
    assert len(all_faces(2)) == 4 + 4


def test_triangle_around_origin_meets_in_a_point():
    cell = tri((-1, -1), (2, 0), (-1, 2))
    assert cell_face_intersection(cell, (1, 0)).dim == 0


def test_triangle_missing_origin_is_empty():
    cell = tri((1, 1), (2, 0), (3, 2))
    assert cell_face_intersection(cell, (1, 0)).dim == -1


def test_segment_inside_face():
    seg = LinearCell([[(0, 0), (2, 0)], [(0, 0), (3, 1)]])
    assert cell_face_intersection(seg, (1, 0)).dim == 1


def test_face_at_infinity_misses_finite_cells():
    cell = tri((-1, -1), (2, 0), (-1, 2))
    assert cell_face_intersection(cell, (1, INF)).dim == -1


def test_linear_cell_rejects_degenerate_and_infinite():
    with pytest.raises(DomainError):
        tri((0, 0), (1, 1), (2, 2))
    with pytest.raises(DomainError):
        LinearCell([[INF], [(1, 0)]])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_intersection_dim_invariant_under_vertex_relabeling(seed):
    # a random affine reparametrization that keeps the geometry: permute the
    # vertices and replace one by itself (the simplex is unchanged as a set)
    rng = numpy.random.default_rng(seed)
    pts = [[(Fraction(int(rng.integers(-4, 5))), Fraction(int(rng.integers(-4, 5)))),
            (Fraction(int(rng.integers(-4, 5))), Fraction(int(rng.integers(-4, 5))))]
           for _ in range(3)]
    try:
        cell = LinearCell(pts)
    except DomainError:
        return
    perm = list(rng.permutation(3))
    other = LinearCell([pts[j] for j in perm])
    for face in all_faces(2):
        assert cell_face_intersection(cell, face).dim == \
            cell_face_intersection(other, face).dim


def _grid_dim(cell, face, steps=60):
    """Brute-force estimate: 0 if some grid point hits the face, -1 if none is close."""
    hits = 0
    (i, _), = face.constraints
    V = [numpy.array([complex(float(c[0]), float(c[1])) for c in v]) for v in cell.vertices]
    for a in range(steps + 1):
        for b in range(steps + 1 - a):
            lam = (a / steps, b / steps, 1 - (a + b) / steps)
            z = sum(l * v for l, v in zip(lam, V))
            if abs(z[i - 1]) < 1.5 * max(abs(V[0] - V[1]).max(), abs(V[0] - V[2]).max()) / steps:
                hits += 1
    return hits


def test_admissibility_matches_sampling_on_random_planar_triangles():
    rng = numpy.random.default_rng(5)
    agree = 0
    for _ in range(40):
        pts = [[(Fraction(int(rng.integers(-5, 6)), 2), Fraction(int(rng.integers(-5, 6)), 2))]
               for _ in range(3)]
        try:
            cell = LinearCell(pts)
        except DomainError:
            continue
        exact = cell_face_intersection(cell, (1, 0)).dim
        hits = _grid_dim(cell, CubicalFace.single(1, 0))
        if exact < 0:
            assert hits == 0 or min(abs(complex(float(p[0][0]), float(p[0][1])))
                                    for p in pts) >= 0
        else:
            assert hits > 0
        agree += 1
    assert agree > 20


def test_disk_box_is_admissible():
    g = chain_of((disk_interval(1, 2), 1))
    rep = is_admissible(g)
    assert rep.overall
    e = [x for x in rep.entries if x.face == CubicalFace.single(1, 0)][0]
    assert e.meet_dim == 1 and e.chain_dim == 3
    ok, _, _ = in_ac(g)
    assert ok


def test_plane_triangle_meeting_face_in_a_segment_fails():
    cell = LinearCell([[(0, 0), (2, 0)], [(0, 0), (3, 0)], [(1, 0), (2, 1)]])
    g = Chain.from_cells(2, [(cell, 1)])
    rep = is_admissible(g)
    assert not rep.overall
    assert any(e.face == CubicalFace.single(1, 0) and e.meet_dim == 1 for e in rep.failures())


def test_empty_chain_is_admissible():
    assert is_admissible(Chain.zero(2, 2)).overall


def test_param_cell_without_face_data_is_caught():
    t = sympy.Symbol("t", real=True)
    bad = ParamCell([Interval(t, -1, 1)], [t], label="through-zero")
    with pytest.raises(ValidationError):
        is_admissible(chain_of((bad, 1)))


def test_good_triangulation_barycentric():
    verts = [Vertex(0, ((0, 0),)), Vertex(1, ((2, 0),)), Vertex(2, ((1, 3),))]
    K = SimplicialComplex.from_maximal(verts, [(0, 1, 2)], None, 1)
    assert check_good_triangulation(barycentric_subdivision(K).fine).passed


def test_fullness_counterexample():
    verts = [Vertex(0, ((0, 0), (2, 0))), Vertex(1, ((2, 0), (0, 0))),
             Vertex(2, ((3, 1), (3, 1)))]
    K = SimplicialComplex.from_maximal(verts, [(0, 1, 2)], None, 2)
    # edge (0, 1) has one end on z1 = 0 and the other on z2 = 0
    rep = check_good_triangulation(K)
    assert not rep.passed
    assert any(name == "faces full" and not ok for name, ok, _ in rep.items)


def test_complex_away_from_faces_passes():
    verts = [Vertex(j, ((j + 2, 1),)) for j in range(3)]
    K = SimplicialComplex.from_maximal(verts, [(0, 1, 2)], None, 1)
    assert check_good_triangulation(K).passed


def test_marked_divisor_must_match_positions():
    verts = [Vertex(0, ((1, 0),)), Vertex(1, ((3, 0),))]
    K = SimplicialComplex.from_maximal(verts, [(0, 1)], {"D": [(1,)]}, 1)
    assert not check_good_triangulation(K).passed


def _identity(n):
    return GroupElement((1,) * n, tuple(range(n)))


def test_gn_identity_and_swap():
    t0, t1 = sympy.Symbol("t0", real=True), sympy.Symbol("t1", real=True)
    cell = ParamCell([Interval(t0, 0, 1), Interval(t1, 2, 3)], [t1, 1 - t0])
    same = gn_transform(cell, _identity(2))
    assert same.exprs == cell.exprs
    swapped = gn_transform(cell, GroupElement((1, 1), (1, 0)))
    assert swapped.exprs == (1 - t0, t1)


def test_gn_inversion_and_inverse_roundtrip():
    t0, t1 = sympy.Symbol("t0", real=True), sympy.Symbol("t1", real=True)
    cell = ParamCell([Interval(t0, 0, Fraction(1, 2)), Interval(t1, 2, 3)], [t1, 1 - t0])
    pts = cell.sample_points(20, seed=1)
    for g in group_elements(2):
        back = gn_transform(gn_transform(cell, g), g.inverse())
        for p in pts:
            assert numpy.allclose(back.evaluate(p), cell.evaluate(p), atol=1e-12, rtol=0)
    inv = gn_transform(cell, GroupElement((-1, 1), (0, 1)))
    p = pts[0]
    assert abs(inv.evaluate(p)[0] - 1 / cell.evaluate(p)[0]) < 1e-12


def test_gn_inversion_pole_is_rejected():
    t = sympy.Symbol("t", real=True)
    cell = ParamCell([Interval(t, -1, 1)], [t])
    with pytest.raises(DomainError):
        gn_transform(cell, GroupElement((-1,), (0,)))
    with pytest.raises(DomainError):
        gn_transform(point(0), GroupElement((-1,), (0,)))


def test_group_order_and_signs():
    els = list(group_elements(2))
    assert len(els) == 8
    assert sum(g.sign for g in els) == 0


def test_declared_faces_of_dilog_cells():
    assert (3, 0) in rho2(Fraction(1, 2)).declared_faces
    e = eta2_one(Fraction(1, 2)).declared_faces[(3, 0)][0]
    assert e.multiplicity == 1 and e.cell.dim == 1
