import json

import pytest

from mendlab import PartialLabeling, accepts
from mendlab.instances import (InstanceError, InstanceSpec, ParseError, children_of, from_json, generate,
                               io_roundtrip, loads, lower_bound_instance, path, root_of)
from mendlab.pointer import check_grid_constraints
from mendlab.problems import make


def test_torus_is_a_valid_grid():
    g = generate(InstanceSpec("torus", {"width": 4, "height": 4}))
    assert g.n == 16
    assert all(g.degree(u) == 4 for u in g.nodes)
    assert all(check_grid_constraints(g, u) == [] for u in g.nodes)


def test_single_node_path():
    g = generate(InstanceSpec("path", {"n": 1}))
    assert g.n == 1 and g.edges() == []


def test_complete_binary_tree_shape():
    g = generate(InstanceSpec("complete_binary_tree", {"depth": 3}))
    assert g.n == 15
    r = root_of(g)
    assert g.degree(r) == 2
    assert sum(1 for u in g.nodes if g.degree(u) == 1) == 8


def test_missing_params_and_seed():
    with pytest.raises(InstanceError):
        generate(InstanceSpec("grid", {"width": 3}))
    with pytest.raises(InstanceError):
        generate(InstanceSpec("random_tree", {"n": 5}))
    with pytest.raises(InstanceError):
        generate(InstanceSpec("hypercube", {"n": 5}))


def test_random_tree_is_deterministic():
    a = generate(InstanceSpec("random_tree", {"n": 200}, seed=11))
    b = generate(InstanceSpec("random_tree", {"n": 200}, seed=11))
    assert a == b and len(a.edges()) == 199


def test_ab123_lower_bound_labels():
    g, lam = lower_bound_instance("ab123", 9)
    assert g.n == 9
    # parity continues across the hole, so both neighbours of the centre are B and A
    assert list(lam) == ["A", "B", "A", "B", None, "A", "B", "A", "B"]
    assert accepts(make("ab123"), g, lam)


def test_ab123_center_has_no_compatible_label():
    g, lam = lower_bound_instance("ab123", 9)
    p = make("ab123")
    for x in p.labels:
        assert not accepts(p, g, lam.with_changes({4: x}))


def test_ab123_needs_odd_length():
    with pytest.raises(InstanceError):
        lower_bound_instance("ab123", 8)


def test_pointer_lower_bound_labels():
    g, lam = lower_bound_instance("pointer_lcl", 36)

    def at(x, y):  # 1-indexed, row-major
        return (y - 1) * 6 + (x - 1)

    assert lam[at(3, 3)] is None
    assert [lam[at(x, 3)] for x in (4, 5, 6)] == ["Left"] * 3
    rest = set(g.nodes) - {at(x, 3) for x in (3, 4, 5, 6)}
    assert all(lam[u] == "Zero" for u in rest)
    assert accepts(make("pointer_lcl"), g, lam)


def test_pointer_lower_bound_needs_square():
    with pytest.raises(InstanceError):
        lower_bound_instance("pointer_lcl", 30)
    with pytest.raises(InstanceError):
        lower_bound_instance("no_such_problem", 9)


@pytest.mark.parametrize("pid", ["binary3col_rigid_v1", "binary3col_rigid_v2"])
@pytest.mark.parametrize("depth", [2, 3, 4])
def test_rigid_trees_are_restricted_colorings(pid, depth):
    g, lam = lower_bound_instance(pid, depth)
    assert lam.holes() == [root_of(g)]
    assert accepts(make(pid), g, lam)
    for u in g.nodes:
        kids = children_of(g, u)
        if u != root_of(g) and kids:
            assert all(lam[c] != lam[u] for c in kids)


def test_overlap_tree_is_accepted():
    g, lam = lower_bound_instance("overlap_cycles", 1)
    assert g.n == 74 and lam.holes() == [0]
    assert accepts(make("overlap_cycles"), g, lam)


def test_roundtrip_path_with_hole():
    g = path(3)
    lam = PartialLabeling(["1", None, "2"])
    g2, lam2 = io_roundtrip(g, lam)
    assert g2 == g and lam2 == lam


def test_roundtrip_keeps_ports():
    g = generate(InstanceSpec("torus", {"width": 4, "height": 4}))
    g2, _ = io_roundtrip(g, PartialLabeling.empty(16))
    assert g2.ports == g.ports


def test_roundtrip_tuple_labels():
    g = generate(InstanceSpec("grid", {"width": 2, "height": 2}))
    lam = PartialLabeling([("i", "o"), None, ("o", "i"), ("i", "i")])
    assert io_roundtrip(g, lam)[1] == lam


def test_missing_labels_means_all_empty():
    doc = {"nodes": [{"id": 0}, {"id": 1}], "edges": [[0, 1]]}
    _, lam = from_json(doc)
    assert list(lam) == [None, None]


def test_parse_error_reports_position():
    with pytest.raises(ParseError, match="line 1 column"):
        loads('{"nodes": [')
    with pytest.raises(ParseError):
        loads(json.dumps({"nodes": [{"id": 0}, {"id": 2}]}))
