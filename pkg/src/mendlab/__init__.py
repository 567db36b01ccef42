"""Mending of partial solutions to locally checkable labeling problems."""
from .core import (BOT, Graph, LclError, LclProblem, Mend, PartialLabeling, Verdict, accepts, is_mend,
                   relaxed_verify)
from .mender import estimate_radius, find_mend, mend_radius_at

__all__ = ["BOT", "Graph", "LclError", "LclProblem", "Mend", "PartialLabeling", "Verdict", "accepts",
           "is_mend", "relaxed_verify", "estimate_radius", "find_mend", "mend_radius_at"]
