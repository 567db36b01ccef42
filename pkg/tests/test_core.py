import pytest

from mendlab import BOT, PartialLabeling, Verdict, accepts, is_mend, relaxed_verify
from mendlab.core import Graph, GraphError, InvalidLabelingError, PreconditionError
from mendlab.instances import path
from mendlab.problems import make

C3 = make("coloring:3")


def lab(*xs):
    return PartialLabeling(None if x is None else str(x) for x in xs)


def test_empty_labeling_is_happy_everywhere():
    g = path(4)
    for v in g.nodes:
        assert relaxed_verify(C3, g, PartialLabeling.empty(4), v) is Verdict.HAPPY


def test_holes_hide_a_monochromatic_edge():
    g = path(4)
    for v in g.nodes:
        assert relaxed_verify(C3, g, lab(None, 1, 1, None), v) is Verdict.HAPPY


def test_improper_coloring_is_rejected_at_the_conflict():
    g = path(4)
    assert relaxed_verify(C3, g, lab(2, 1, 1, 3), 1) is Verdict.UNHAPPY
    assert relaxed_verify(C3, g, lab(2, 1, 1, 3), 0) is Verdict.HAPPY


def test_label_outside_alphabet():
    with pytest.raises(InvalidLabelingError):
        relaxed_verify(C3, path(3), lab(1, 7, 2), 0)


def test_accepts_proper_coloring():
    res = accepts(C3, path(4), lab(1, 2, 1, 3))
    assert res.accepted and res.unhappy_nodes == []


def test_accepts_all_empty():
    for pid in ("coloring:3", "ab123", "grid4"):
        assert accepts(make(pid), path(5), PartialLabeling.empty(5))


def test_ab123_rejects_a_to_1_switch():
    res = accepts(make("ab123"), path(5), PartialLabeling(["A", "B", "A", "1", "2"]))
    assert not res.accepted
    assert res.unhappy_nodes == [2, 3]


def test_worked_example_first_step():
    g = path(4)
    assert is_mend(C3, g, lab(None, 1, 1, None), lab(2, 3, 1, None), 0, 1)


def test_worked_example_second_step_from_intermediate():
    g = path(4)
    assert is_mend(C3, g, lab(2, 3, 1, None), lab(2, 3, 1, 2), 3, 0)


def test_worked_example_second_step_from_start_is_not_a_zero_mend():
    g = path(4)
    assert not is_mend(C3, g, lab(None, 1, 1, None), lab(2, 3, 1, 2), 3, 0)
    # radius 3 covers the recolored first node
    assert is_mend(C3, g, lab(None, 1, 1, None), lab(2, 3, 1, 2), 3, 3)


def test_is_mend_rejects_unaccepted_base():
    with pytest.raises(PreconditionError):
        is_mend(C3, path(4), lab(2, 1, 1, 3), lab(2, 1, 1, 3), 0, 1)


def test_is_mend_conditions():
    g = path(4)
    base = lab(None, 1, None, None)
    assert not is_mend(C3, g, base, base, 0, 3)  # center still empty
    assert not is_mend(C3, g, base, lab(2, None, None, None), 0, 3)  # new hole


def test_graph_rejects_self_loops_and_parallel_edges():
    with pytest.raises(GraphError):
        Graph(2, [(0, 0)])
    with pytest.raises(GraphError):
        Graph(2, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 1), (0, 2)], max_degree=1)


def test_ports_are_per_endpoint():
    g = path(3)
    assert g.port(0, 1) == "next" and g.port(1, 0) == "prev"
    assert g.follow(1, "next") == 2


def test_partial_labeling_helpers():
    x = lab(1, None, 2)
    assert x.holes() == [1] and not x.complete
    assert x.with_changes({1: "3"}).complete
    assert x[1] is BOT
