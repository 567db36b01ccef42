import math
import random

import pytest

from mendlab import PartialLabeling, accepts, is_mend, mend_radius_at
from mendlab.core import Graph
from mendlab.instances import grid, lower_bound_instance
from mendlab.mender import random_accepted_labeling
from mendlab.pointer import (OUTPUTS, POINTERS, GridConstraintError, check_grid_constraints, find_up_right_cycle,
                             mend_pointer, pointer_problem)

P = pointer_problem()


def torus(k):
    return grid(k, k, wrap=True)


def swap_up_down(g, u):
    ports = dict(g.ports)
    up, down = g.follow(u, "Up"), g.follow(u, "Down")
    ports[(u, up)], ports[(u, down)] = "Down", "Up"
    return Graph(g.n, g.edges(), ports, max_degree=4)


def twisted_torus(k, shift):
    # the top row wraps to the bottom row shifted right by `shift`
    ports, edges = {}, set()

    def link(a, b, pa, pb):
        edges.add((min(a, b), max(a, b)))
        ports[(a, b)] = pa
        ports[(b, a)] = pb

    for y in range(k):
        for x in range(k):
            u = y * k + x
            link(u, y * k + (x + 1) % k, "Right", "Left")
            if y + 1 < k:
                link(u, u + k, "Up", "Down")
            else:
                link(u, (x + shift) % k, "Up", "Down")
    return Graph(k * k, sorted(edges), ports, max_degree=4)


def test_torus_is_valid():
    g = torus(4)
    assert all(check_grid_constraints(g, u) == [] for u in g.nodes)


def test_twisted_torus_is_valid():
    g = twisted_torus(5, 2)
    assert all(check_grid_constraints(g, u) == [] for u in g.nodes)


def test_degree_three_node():
    g = grid(4, 4)  # no wrap: border nodes have degree < 4
    assert "1a" in {v.cid for v in check_grid_constraints(g, 1)}


def test_swapped_up_down_is_structural():
    g = swap_up_down(torus(5), 12)
    assert "2a" in {v.cid for v in check_grid_constraints(g, 12)}
    below = torus(5).follow(12, "Down")
    assert "2a" in {v.cid for v in check_grid_constraints(g, below)}
    far = 0
    assert check_grid_constraints(g, far) == []


def test_all_zero_torus_case_two():
    g = torus(4)
    lam = PartialLabeling(["Zero"] * 5 + [None] + ["Zero"] * 10)
    m = mend_pointer(g, lam, 5)
    assert m.case == 2 and m.radius == 0 and m.changes == {5: "Zero"}


def test_broken_structure_case_one():
    g = swap_up_down(torus(5), 12)
    lam = ["Zero"] * 25
    lam[12] = None
    lam[torus(5).follow(12, "Down")] = "Flag"
    assert accepts(P, g, lam)
    m = mend_pointer(g, lam, 12)
    assert m.case == 1 and m.changes == {12: "Flag"}
    assert is_mend(P, g, lam, m.apply(lam), 12, m.radius)


def test_case_three_points_at_neighbour():
    g = torus(4)
    lam = ["Zero"] * 16
    lam[5] = None
    lam[6] = "Up"
    lam[10] = "Up"
    lam[14] = "Up"
    lam[2] = "Up"  # column 2 points up all the way round
    assert accepts(P, g, lam)
    m = mend_pointer(g, lam, 5)
    assert m.case == 3 and m.changes == {5: "Right"}
    assert is_mend(P, g, lam, m.apply(lam), 5, m.radius)


def test_lower_bound_instance_case_five():
    g, lam = lower_bound_instance("pointer_lcl", 36)
    v = lam.holes()[0]
    m = mend_pointer(g, lam, v, c=2)
    assert m.case == 5
    assert m.radius <= 6 and m.radius <= 2 * math.sqrt(36)
    assert set(m.changes.values()) <= {"Up", "Right", "Left"}
    assert is_mend(P, g, lam, m.apply(lam), v, m.radius)


@pytest.mark.parametrize("k", [4, 6])
def test_lower_bound_oracle_radius(k):
    g, lam = lower_bound_instance("pointer_lcl", k * k)
    # oracle values, frozen; the hole is fixed by extending the Left half-row to a full row cycle
    assert mend_radius_at(P, g, lam, lam.holes()[0]) == {4: 1, 6: 2}[k]


@pytest.mark.parametrize("k", [4, 6, 8])
def test_mender_on_random_tori(k):
    g = torus(k)
    rng = random.Random(k)
    for _ in range(25):
        lam = random_accepted_labeling(P, g, rng)
        for v in lam.holes():
            m = mend_pointer(g, lam, v)
            assert m.radius <= 2 * math.sqrt(g.n)
            assert is_mend(P, g, lam, m.apply(lam), v, m.radius)


def test_row_cycle():
    for k in (3, 4, 5):
        cyc = find_up_right_cycle(torus(k), 0, k)
        assert len(cyc) == k
        assert cyc == [x % k for x in range(k)] or len(set(cyc)) == k


def test_no_cycle_below_side_length():
    for k in (3, 4, 5):
        assert find_up_right_cycle(torus(k), 0, k - 1) is None


def test_cycle_on_twisted_torus():
    g = twisted_torus(5, 2)
    cyc = find_up_right_cycle(g, 7, 5)
    assert cyc is not None and cyc[0] == 7
    moves = set()
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        moves.add(g.port(a, b))
    assert moves <= {"Left", "Up", "Right"}


def test_cycle_search_reports_bad_structure():
    g = swap_up_down(torus(5), 1)
    with pytest.raises(GridConstraintError) as err:
        find_up_right_cycle(g, 0, 5)
    assert err.value.violation.cid.startswith("2")


def _independent_happy(g, lab, v):
    a = lab[v]
    if a == "Flag":
        return bool(check_grid_constraints(g, v))
    if a == "Zero":
        return not any(lab[w] in POINTERS and g.follow(w, lab[w]) == v for w in g.adj[v])
    # no chain may end on Zero, and a horizontal pointer may not meet its opposite
    b = lab[g.follow(v, a)]
    return b != "Zero" and {a, b} != {"Left", "Right"}


@pytest.mark.parametrize("swap", [False, True])
def test_verifier_matches_rules(swap):
    g = torus(3)
    if swap:
        g = swap_up_down(g, 4)
    rng = random.Random(int(swap))
    for _ in range(3000):
        lab = [rng.choice(OUTPUTS) for _ in g.nodes]
        res = accepts(P, g, lab)
        want = [v for v in g.nodes if not _independent_happy(g, lab, v)]
        assert res.unhappy_nodes == want
