import pytest

import fractalkit as fk


def test_family_sizes():
    assert (fk.path(5).n_vertices, fk.path(5).edge_count) == (5, 4)
    assert (fk.grid(3, 3).n_vertices, fk.grid(3, 3).edge_count) == (9, 12)
    t = fk.balanced_tree(2, 3)
    assert (t.n_vertices, t.edge_count) == (15, 14)
    assert fk.complete(6).edge_count == 15
    assert fk.cycle(5).edge_count == 5


def test_family_size_validation():
    with pytest.raises(ValueError):
        fk.path(0)
    with pytest.raises(ValueError):
        fk.cycle(2)
    with pytest.raises(ValueError):
        fk.grid(0, 3)
    with pytest.raises(ValueError):
        fk.complete(0)
    with pytest.raises(ValueError):
        fk.balanced_tree(0, 2)


def test_default_motif_shape():
    spec = fk.default_motif()
    assert spec.motif.n_vertices == 6
    assert spec.motif.edge_count == 5
    assert (spec.anchor_a, spec.anchor_b) == (0, 3)
    # path a-x-y-b plus two pendants
    assert sorted(spec.motif.degrees.tolist()) == [1, 1, 1, 1, 3, 3]


def test_motif_validation():
    disconnected = fk.Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        fk.MotifSpec(motif=disconnected, anchor_a=0, anchor_b=3)
    with pytest.raises(ValueError):
        fk.MotifSpec(motif=fk.path(3), anchor_a=1, anchor_b=1)
    with pytest.raises(ValueError):
        fk.MotifSpec(motif=fk.path(3), anchor_a=0, anchor_b=7)


def test_igs_zero_iterations_is_single_edge():
    ig = fk.igs_iterate(fk.default_motif(), 0)
    assert (ig.graph.n_vertices, ig.graph.edge_count) == (2, 1)


def test_igs_edge_count_recurrence():
    spec = fk.default_motif()
    e_motif = spec.motif.edge_count
    for k in range(5):
        ig = fk.igs_iterate(spec, k)
        assert ig.graph.edge_count == e_motif**k


def test_igs_connectivity_preserved():
    spec = fk.default_motif()
    for k in range(5):
        assert fk.components(fk.igs_iterate(spec, k).graph).component_count == 1


def test_igs_subdivided_path_is_path():
    # motif = path(3) anchored at its ends: substitution just subdivides,
    # so k iterations give a path with 2**k edges
    spec = fk.MotifSpec(motif=fk.path(3), anchor_a=0, anchor_b=2)
    g = fk.igs_iterate(spec, 3).graph
    assert g.edge_count == 8
    assert g.n_vertices == 9
    assert sorted(g.degrees.tolist()) == [1, 1] + [2] * 7
    assert fk.diameter(g)[0] == 8


def test_igs_subdivided_path_matches_path_oracle_at_k3():
    # k=3 gives a 9-vertex path: diameter 8 sits under the gate, exactly
    # like the path(9) oracle
    spec = fk.MotifSpec(motif=fk.path(3), anchor_a=0, anchor_b=2)
    est = fk.estimate_dimension(fk.igs_iterate(spec, 3).graph)
    oracle = fk.estimate_dimension(fk.path(9))
    assert (est.gated, est.dimension, est.r_squared) == (
        oracle.gated,
        oracle.dimension,
        oracle.r_squared,
    ) == (True, 0.0, 0.0)


def test_igs_subdivided_path_dimension_near_one():
    # larger iterate: a 129-vertex path (vertex numbering differs from
    # path(129), so tie-breaks and the exact estimate may differ slightly)
    spec = fk.MotifSpec(motif=fk.path(3), anchor_a=0, anchor_b=2)
    g = fk.igs_iterate(spec, 7).graph
    est = fk.estimate_dimension(g)
    oracle = fk.estimate_dimension(fk.path(129))
    assert abs(est.dimension - 1.0) < 0.2
    assert abs(oracle.dimension - 1.0) < 0.2
    assert abs(est.dimension - oracle.dimension) < 0.1


def test_igs_diameter_strictly_increasing():
    for spec in (
        fk.default_motif(),
        fk.MotifSpec(motif=fk.path(3), anchor_a=0, anchor_b=2),
    ):
        diams = [fk.diameter(fk.igs_iterate(spec, k).graph)[0] for k in range(5)]
        assert all(a < b for a, b in zip(diams, diams[1:]))


def test_igs_default_motif_diameters_are_powers_of_three():
    spec = fk.default_motif()
    for k in range(5):
        assert fk.diameter(fk.igs_iterate(spec, k).graph)[0] == 3**k


def test_igs_deterministic_numbering():
    a = fk.igs_iterate(fk.default_motif(), 3).graph
    b = fk.igs_iterate(fk.default_motif(), 3).graph
    assert fk.to_canonical_dict(a) == fk.to_canonical_dict(b)


def test_igs_negative_iteration():
    with pytest.raises(ValueError):
        fk.igs_iterate(fk.default_motif(), -1)
