"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import math
import random
import time

import pytest

from mendlab import automata, instances, localsim, orientation, problems, treemend
from mendlab.core import accepts, is_mend
from mendlab.mender import estimate_radius, mend_radius_at, random_accepted_labeling
from mendlab.pointer import mend_pointer, pointer_problem

# oracle values frozen after the first run
AB123_RADII = {5: 2, 7: 3, 9: 4, 11: 5}
RIGID_RADII = {3: 3, 4: 4, 5: 5}
RIGID_C = 0
POINTER_RADII = {4: 1, 6: 2}
BIG = 10**9


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


def test_1_orientation_census(report):
    res = orientation.census()
    ok = res["total"] == 1296 and res["mendable"] == 1296 and res["seconds"] < 10
    assert report(1, ok, f"{res['mendable']}/{res['total']} mendable in {res['seconds']:.2f}s")


def test_2_three_coloring_paths(report):
    t0 = time.perf_counter()
    rep = estimate_radius(problems.make("coloring:3"), instances.InstanceSpec("path", {"n": 2}), range(2, 9),
                          budget=BIG)
    worst = max(r.max_radius_found for r in rep.table.values())
    done = all(r.complete and r.mode == "exhaustive" for r in rep.table.values())
    secs = time.perf_counter() - t0
    ok = worst == 1 and done and secs < 60
    detail = ", ".join(f"n={n}:{r.max_radius_found}" for n, r in sorted(rep.table.items()))
    assert report(2, ok, f"max radius {worst} ({detail}) in {secs:.1f}s")


def test_3_ab123_lower_bound(report):
    p = problems.make("ab123")
    radii = {}
    for n in AB123_RADII:
        g, lam = instances.lower_bound_instance("ab123", n)
        radii[n] = mend_radius_at(p, g, lam, lam.holes()[0])
    seq = [radii[n] for n in sorted(radii)]
    ok = (all(radii[n] >= (n - 1) / 2 - 1 for n in radii)
          and all(a < b for a, b in zip(seq, seq[1:])) and radii == AB123_RADII)
    assert report(3, ok, f"radii {radii}")


def test_4_restriction_pipeline(report):
    d = automata.build_diagram(problems.make("ab123").path_spec)
    r = automata.restrict(d, "directed")
    labels = {x for s in r.states for x in s}
    rp = automata.problem_for(r)
    rep = estimate_radius(rp, instances.InstanceSpec("cycle", {"n": 3}), range(3, 13), budget=BIG)
    worst = max(x.max_radius_found for x in rep.table.values())
    done = all(x.complete and x.mode == "exhaustive" for x in rep.table.values())
    checked = sum(x.instances_checked for x in rep.table.values())
    ok = labels == {"1", "2", "3"} and done and worst <= r.K + 1
    assert report(4, ok, f"states over {sorted(labels)}, K={r.K}, max radius {worst} over {checked} holes")


def test_5_grid_four_coloring(report):
    p = problems.make("grid4")
    g = instances.grid(6, 6)
    rng = random.Random(5)
    worst = oracle = holes = 0
    bad = 0
    for _ in range(200):
        lam = random_accepted_labeling(p, g, rng)
        for v in lam.holes():
            m = problems.mend_grid4(g, lam, v)
            if not is_mend(p, g, lam, m.apply(lam), v, m.radius):
                bad += 1
            worst = max(worst, m.radius)
            oracle = max(oracle, mend_radius_at(p, g, lam, v, check=False))
            holes += 1
    ok = bad == 0 and worst <= 3 and oracle <= 3
    assert report(5, ok, f"{holes} holes, mender max {worst}, oracle max {oracle}, {bad} invalid")


def test_6_restricted_binary_trees(report):
    p = problems.make("binary3col_restricted")
    rng = random.Random(6)
    worst = holes = bad = 0
    for depth in range(1, 5):
        t = instances.complete_tree(2, 2, depth)
        for _ in range(30):
            lam = random_accepted_labeling(p, t, rng, 0.3)
            for v in lam.holes():
                m = problems.mend_binary3col_restricted(t, lam, v)
                bad += not is_mend(p, t, lam, m.apply(lam), v, m.radius)
                worst = max(worst, m.radius)
                holes += 1
    mono = True
    for depth in range(0, 6):
        t = instances.complete_tree(2, 2, depth)
        lab = problems.solve_shift_down(t, 3)
        mono &= lab.complete and bool(accepts(p, t, lab))
        mono &= not any(problems.is_mixed(t, lab, u) for u in t.nodes)
    ok = bad == 0 and worst <= 3 and mono
    assert report(6, ok, f"{holes} holes, max radius {worst}, {bad} invalid, shift-down monochromatic: {mono}")


def test_7a_pointer_upper_bound(report):
    p = pointer_problem()
    rng = random.Random(7)
    worst = {}
    bad = 0
    for k in (4, 6, 8):
        g = instances.grid(k, k, wrap=True)
        worst[k * k] = 0
        for _ in range(100):
            lam = random_accepted_labeling(p, g, rng)
            for v in lam.holes():
                m = mend_pointer(g, lam, v)
                bad += not is_mend(p, g, lam, m.apply(lam), v, m.radius)
                worst[k * k] = max(worst[k * k], m.radius)
    ok = bad == 0 and all(r <= 2 * math.sqrt(n) for n, r in worst.items())
    assert report("7a", ok, f"max radius per n {worst}, {bad} invalid")


def test_7b_pointer_lower_bound(report):
    p = pointer_problem()
    radii = {}
    for k in POINTER_RADII:
        g, lam = instances.lower_bound_instance("pointer_lcl", k * k)
        radii[k] = mend_radius_at(p, g, lam, lam.holes()[0])
    assert radii == POINTER_RADII
    ok = all(radii[k] >= k // 2 for k in radii)
    assert report("7b", ok, f"oracle radii {radii}, required >= floor(k/2) = { {k: k // 2 for k in radii} }")


def _restricted_ab123():
    d = automata.build_diagram(problems.make("ab123").path_spec)
    return automata.problem_for(automata.restrict(d, "directed"), "ab123_restricted")


SOLVER_CASES = [
    ("coloring:3", lambda: problems.make("coloring:3"),
     lambda r: (instances.path if r.random() < 0.5 else instances.cycle)(r.randint(3, 40)), 1),
    ("grid5", lambda: problems.make("grid5"),
     lambda r: instances.grid(r.randint(3, 8), r.randint(3, 8), wrap=r.random() < 0.5), 1),
    ("orientation134", lambda: problems.make("orientation134"),
     lambda r: instances.grid(r.randint(3, 6), r.randint(3, 6)), 2),
    ("ab123 restricted", _restricted_ab123, lambda r: instances.cycle(r.randint(3, 30)), 3),
]


def test_8_solver(report):
    fails = []
    phases = {}
    for name, mk, gen, k in SOLVER_CASES:
        p = mk()
        phases[name] = 0
        for seed in range(50):
            g = gen(random.Random(seed))
            out, log = localsim.solve_constant_mendable(p, g, k)
            if not localsim.solved(p, g, out) or log.phases > localsim.palette_bound(g, p, k):
                fails.append((name, seed))
            phases[name] = max(phases[name], log.phases)
    assert report(8, not fails, f"max phases {phases}, failures {fails}")


def test_9_rake_compress(report):
    p = problems.make("coloring:3")
    k = 2
    viol = []
    worst_l = worst_f = worst_m = 0
    sizes = []
    for seed in range(100):
        r = random.Random(seed)
        n = r.choice([10, 100, 1000, 10000]) if seed < 96 else 10000
        sizes.append(n)
        t = instances.random_tree(n, seed)
        lay = treemend.rake_compress(t, k)
        if lay.L > treemend.layer_bound(n, k):
            viol.append((seed, "layers"))
        if treemend.check_separation(t, lay, max_pairs=2000, seed=seed):
            viol.append((seed, "separation"))
        rad, bound, flagged = treemend.forest_radius(t, lay)
        if flagged:
            viol.append((seed, "forest radius"))
        worst_l, worst_f = max(worst_l, lay.L), max(worst_f, rad)
        if n <= 1000:
            sol = treemend.global_solution(p, t)
            lam = random_accepted_labeling(p, t, r, 0.2)
            for v in lam.holes()[:5]:
                m = treemend.mend_tree_layered(p, t, lam, v, k, lay, sol)
                if not is_mend(p, t, lam, m.apply(lam), v, m.radius) or m.radius > treemend.envelope(n, k, lay.L):
                    viol.append((seed, "mend"))
                worst_m = max(worst_m, m.radius)
    detail = (f"{len(sizes)} trees up to n={max(sizes)}, a={treemend.LAYER_A} b={treemend.LAYER_B} "
              f"C={treemend.ENVELOPE_C}, max L {worst_l}, max forest radius {worst_f}, "
              f"max mend radius {worst_m}, violations {viol}")
    assert report(9, not viol, detail)


def test_10_rigid_trees(report):
    radii = {}
    for pid in ("binary3col_rigid_v1", "binary3col_rigid_v2"):
        p = problems.make(pid)
        for depth in RIGID_RADII:
            g, lam = instances.lower_bound_instance(pid, depth)
            radii[(pid[-2:], depth)] = mend_radius_at(p, g, lam, lam.holes()[0])
    ok = all(r == RIGID_RADII[d] and r >= d - RIGID_C for (_, d), r in radii.items())
    assert report(10, ok, f"radii {radii}, c={RIGID_C}")
