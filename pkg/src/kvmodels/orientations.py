"""Balanced orientations, resolutions, and the Jaeger and Wu state sums."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import QA, LaurentPoly, RationalFunction, loop_factor_j, substitute
from .diagrams import (
    Diagram,
    DiagramError,
    Pairs,
    a_smoothing,
    b_smoothing,
    crossing_sign,
    in_pattern,
    rotation_number,
    splice,
)
from .kv import graph_value
from .parallel import ordered_map
from .skein import d_poly, r_poly

__all__ = [
    "ALTERNATING",
    "CROSSING_LIKE",
    "NEGATIVE",
    "POSITIVE",
    "TOP_INWARD",
    "TOP_OUTWARD",
    "BalancedOrientation",
    "Resolution",
    "WeightedTerm",
    "classify_site",
    "crossing_weight",
    "engine_to_qa",
    "enumerate_balanced",
    "enumerate_orientations",
    "jaeger_lhs",
    "jaeger_rhs",
    "jaeger_terms",
    "resolution_pairs",
    "resolutions",
    "vertex_weight",
    "wu_lhs",
    "wu_rhs",
    "wu_terms",
]

POSITIVE = "positive"
NEGATIVE = "negative"
TOP_OUTWARD = "top-outward"
TOP_INWARD = "top-inward"
CROSSING_LIKE = "crossing-like"
ALTERNATING = "alternating"
_ALTERNATING_CLASSES = (TOP_OUTWARD, TOP_INWARD, ALTERNATING)

_q = RationalFunction.var(QA, "q")
_a = RationalFunction.var(QA, "a")


def classify_site(diag: Diagram, vid: int, out: frozenset) -> str:
    ins = in_pattern(diag, vid, out)
    if sum(ins) != 2:
        raise DiagramError(f"site {vid} is not balanced")
    adjacent = any(ins[k] and ins[(k + 1) % 4] for k in range(4))
    if vid in diag.crossings:
        if adjacent:
            return POSITIVE if crossing_sign(diag, vid, out) > 0 else NEGATIVE
        # over-strand darts sit at positions 0 and 2
        return TOP_INWARD if ins[0] else TOP_OUTWARD
    return CROSSING_LIKE if adjacent else ALTERNATING


@dataclass(frozen=True)
class BalancedOrientation:
    out: frozenset
    loop_signs: tuple[int, ...]
    sites: tuple[tuple[int, str], ...]

    def site_class(self, vid: int) -> str:
        return dict(self.sites)[vid]

    @property
    def alternating_sites(self) -> list[int]:
        return [v for v, c in self.sites if c in _ALTERNATING_CLASSES]

    @property
    def has_top_inward(self) -> bool:
        return any(c == TOP_INWARD for _, c in self.sites)

    def apply(self, diag: Diagram) -> Diagram:
        return diag.with_orientation(self.out, self.loop_signs)


def enumerate_orientations(diag: Diagram, arcs: Mapping[int, Pairs] | None = None) -> list[tuple[frozenset, tuple[int, ...]]]:
    """Edge orientations (out-dart sets) with loop signs.

    A site listed in ``arcs`` must send each of its pairs in one dart and out
    the other; every other site must be 2-in-2-out.  Edges are taken in order
    of their smaller dart, first directed out of that dart, then into it;
    loops take +1 before -1.
    """
    arcs = dict(arcs or {})
    edges = diag.edges()
    owner = {d: diag.locate(d)[0] for d in diag.inv}
    partner = {}
    for prs in arcs.values():
        for x, y in prs:
            partner[x] = y
            partner[y] = x
    outs = {v: 0 for v in diag.verts}
    ins = {v: 0 for v in diag.verts}
    status: dict[int, bool] = {}  # dart -> is out
    found: list[frozenset] = []

    def ok(d: int, is_out: bool) -> bool:
        v = owner[d]
        if v in arcs:
            p = partner[d]
            return p not in status or status[p] != is_out
        return (outs[v] if is_out else ins[v]) < 2

    def rec(k: int) -> None:
        if k == len(edges):
            found.append(frozenset(d for d, o in status.items() if o))
            return
        d, e = edges[k]
        for o, i in ((d, e), (e, d)):
            if not (ok(o, True) and ok(i, False)):
                continue
            status[o], status[i] = True, False
            outs[owner[o]] += 1
            ins[owner[i]] += 1
            rec(k + 1)
            outs[owner[o]] -= 1
            ins[owner[i]] -= 1
            del status[o], status[i]

    rec(0)
    signs = list(itertools.product((1, -1), repeat=diag.loops))
    return [(out, s) for out in found for s in signs]


def enumerate_balanced(diag: Diagram) -> list[BalancedOrientation]:
    """Every 2-in-2-out edge orientation (free loops oriented independently)."""
    result = []
    for out, signs in enumerate_orientations(diag):
        sites = tuple((v, classify_site(diag, v, out)) for v in sorted(diag.verts))
        result.append(BalancedOrientation(out, signs, sites))
    return result


@dataclass(frozen=True)
class Resolution:
    choices: tuple[tuple[int, str], ...]  # (site, "A" | "B" | "L" | "R")

    def choice(self, vid: int) -> str | None:
        return dict(self.choices).get(vid)


def resolutions(o: BalancedOrientation) -> list[Resolution]:
    sites = o.alternating_sites
    options = [("A", "B") if o.site_class(v) != ALTERNATING else ("L", "R") for v in sites]
    return [Resolution(tuple(zip(sites, c))) for c in itertools.product(*options)]


def resolution_pairs(diag: Diagram, o: BalancedOrientation, r: Resolution) -> dict:
    """Dart pairings realising ``r`` (A/B at crossings, L/R at vertices)."""
    pairings = {}
    for v, c in r.choices:
        if c == "A":
            pairings[v] = a_smoothing(diag, v)
        elif c == "B":
            pairings[v] = b_smoothing(diag, v)
        else:
            ds = diag.verts[v]
            p = 0 if ds[0] not in o.out else 1  # an in-dart; the other sits at p + 2
            if c == "L":
                # each incoming strand turns left
                pairings[v] = ((ds[p], ds[(p + 3) % 4]), (ds[p + 2], ds[(p + 1) % 4]))
            else:
                pairings[v] = ((ds[p], ds[(p + 1) % 4]), (ds[p + 2], ds[(p + 3) % 4]))
    return pairings


def crossing_weight(site_class: str, choice: str | None = None) -> RationalFunction:
    if site_class in (POSITIVE, NEGATIVE):
        if choice is not None:
            raise ValueError("crossing-like crossings take no smoothing choice")
        return RationalFunction.constant(QA, 1)
    if site_class == TOP_INWARD:
        return RationalFunction.constant(QA, 0)
    if site_class == TOP_OUTWARD:
        if choice == "A":
            return _q - _q ** -1
        if choice == "B":
            return _q ** -1 - _q
    raise ValueError(f"no crossing weight for ({site_class}, {choice})")


def vertex_weight(choice: str | None) -> RationalFunction:
    if choice is None:
        return RationalFunction.constant(QA, 1)
    if choice == "L":
        return -_q
    if choice == "R":
        return -(_q ** -1)
    raise ValueError(f"unknown vertex smoothing {choice!r}")


def _site_weight(o: BalancedOrientation, v: int, choice: str | None) -> RationalFunction:
    cls = o.site_class(v)
    if cls in (CROSSING_LIKE, ALTERNATING):
        return vertex_weight(choice)
    return crossing_weight(cls, choice)


@dataclass(frozen=True)
class WeightedTerm:
    orientation: BalancedOrientation
    resolution: Resolution
    result: Diagram
    weight: RationalFunction
    rot: int


def _terms(diag: Diagram, skip_zero: bool) -> list[WeightedTerm]:
    base = diag.unoriented()
    terms = []
    for o in enumerate_balanced(base):
        if skip_zero and o.has_top_inward:
            continue
        oriented = o.apply(base)
        for r in resolutions(o):
            w = RationalFunction.constant(QA, 1)
            for v, _ in o.sites:
                w = w * _site_weight(o, v, r.choice(v))
            pairings = resolution_pairs(base, o, r)
            res = splice(oriented, pairings) if pairings else oriented
            terms.append(WeightedTerm(o, r, res, w, rotation_number(res)))
    return terms


def jaeger_terms(diag: Diagram, *, skip_zero: bool = False) -> list[WeightedTerm]:
    if not diag.is_link():
        raise DiagramError("Jaeger's sum runs over a link diagram")
    return _terms(diag, skip_zero)


def wu_terms(graph: Diagram, *, skip_zero: bool = False) -> list[WeightedTerm]:
    if not graph.is_graph():
        raise DiagramError("Wu's sum runs over a graph without crossings")
    return _terms(graph, skip_zero)


def engine_to_qa(p: LaurentPoly, a_value: RationalFunction | None = None) -> RationalFunction:
    """Specialise a value in ``A, B, z, a`` (or ``z, a``) at ``A=q, B=q^-1, z=q-q^-1``."""
    bind = {"A": _q, "B": _q ** -1, "z": _q - _q ** -1, "a": _a if a_value is None else a_value}
    return substitute(p, {k: v for k, v in bind.items() if k in p.variables}, target=QA)


def _state_sum(terms: Sequence[WeightedTerm], value, jobs: int) -> RationalFunction:
    qa = _q * _a ** -1

    def one(t: WeightedTerm) -> RationalFunction:
        if t.weight.is_zero():
            return RationalFunction.constant(QA, 0)
        return qa ** t.rot * t.weight * value(t.result)

    total = RationalFunction.constant(QA, 0)
    for x in ordered_map(one, terms, jobs):
        total = total + x
    return loop_factor_j() * total


def jaeger_rhs(diag: Diagram, *, skip_zero: bool = False, jobs: int = 1) -> RationalFunction:
    return _state_sum(jaeger_terms(diag, skip_zero=skip_zero), lambda d: engine_to_qa(r_poly(d)), jobs)


def jaeger_lhs(diag: Diagram) -> RationalFunction:
    """D(q - q^-1, a^2 q^-1)."""
    return engine_to_qa(d_poly(diag), _a * _a * _q ** -1)


def wu_rhs(graph: Diagram, *, skip_zero: bool = False, jobs: int = 1) -> RationalFunction:
    return _state_sum(wu_terms(graph, skip_zero=skip_zero), lambda g: engine_to_qa(graph_value(g, "R")), jobs)


def wu_lhs(graph: Diagram) -> RationalFunction:
    """[G]_D(q, q^-1, a^2 q^-1)."""
    return engine_to_qa(graph_value(graph, "D"), _a * _a * _q ** -1)
