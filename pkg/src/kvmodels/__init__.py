"""Exact link polynomials from skein relations, KV graph expansions and state models."""

from __future__ import annotations

from .algebra import LaurentPoly, RationalFunction, substitute
from .corpus import braid_closure, load
from .correspondence import build_correspondence, hj_expand, homflypt_n_specialization, wf_expand
from .diagrams import Diagram, DiagramError, parse_diagram, read_diagram
from .kv import eval_d, eval_r, expand_d, expand_r, kv_sum
from .orientations import jaeger_lhs, jaeger_rhs, wu_lhs, wu_rhs
from .skein import d_poly, r_poly

__all__ = [
    "Diagram",
    "DiagramError",
    "LaurentPoly",
    "RationalFunction",
    "braid_closure",
    "build_correspondence",
    "d_poly",
    "eval_d",
    "eval_r",
    "expand_d",
    "expand_r",
    "hj_expand",
    "homflypt_n_specialization",
    "jaeger_lhs",
    "jaeger_rhs",
    "kv_sum",
    "load",
    "parse_diagram",
    "r_poly",
    "read_diagram",
    "substitute",
    "wf_expand",
    "wu_lhs",
    "wu_rhs",
]
