"""Hypothesis strategies shared by the property tests."""
import random

from hypothesis import strategies as st

from mendlab import instances
from mendlab.core import PartialLabeling
from mendlab.mender import random_accepted_labeling


@st.composite
def small_graphs(draw, kinds=("path", "cycle", "tree")):
    kind = draw(st.sampled_from(kinds))
    if kind == "path":
        return instances.path(draw(st.integers(2, 9)))
    if kind == "cycle":
        return instances.cycle(draw(st.integers(3, 9)))
    if kind == "grid":
        return instances.grid(draw(st.integers(2, 4)), draw(st.integers(2, 4)))
    return instances.random_tree(draw(st.integers(2, 12)), draw(st.integers(0, 10**6)))


@st.composite
def any_labelings(draw, problem, g, hole_p=0.3):
    """Arbitrary partial labelings over the problem's alphabet, accepted or not."""
    out = []
    for u in g.nodes:
        if draw(st.floats(0, 1)) < hole_p:
            out.append(None)
        else:
            out.append(draw(st.sampled_from(list(problem.candidates(g, u)))))
    return PartialLabeling(out)


@st.composite
def accepted_with_hole(draw, problem, g, hole_p=0.3):
    """An accepted partial labeling and one of its holes."""
    rng = random.Random(draw(st.integers(0, 10**6)))
    lam = random_accepted_labeling(problem, g, rng, hole_p)
    holes = lam.holes()
    if not holes:
        v = draw(st.sampled_from(list(g.nodes)))
        lam = lam.with_changes({v: None})
        return lam, v
    return lam, draw(st.sampled_from(holes))
