"""The HJ and WF state models of D and the term-by-term match between them.

Both models build oriented 4-valent graphs from an unoriented link diagram
``L`` by replacing each crossing with one of twelve oriented local
configurations.  Darts of ``L`` are never relabelled, so a state is
identified by its configuration tag at every crossing (plus the directions
of the free loops of ``L``).

Configuration tags at a crossing whose darts are ``d0..d3`` counterclockwise
with the over-strand on ``d0, d2``:

* ``Vk`` / ``Ck``: inward darts ``d(k-1), dk`` (adjacent); ``V`` keeps a
  rigid vertex, ``C`` takes the orientation-respecting smoothing.  Odd ``k``
  are positive crossings, even ``k`` negative.
* ``A1`` / ``A3``: under-strand darts inward, A- / B-smoothing.
* ``A2`` / ``A4``: over-strand darts inward, A- / B-smoothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import QA, LaurentPoly, RationalFunction, loop_factor_j, substitute
from .diagrams import (
    Diagram,
    DiagramError,
    TrivalentGraph,
    a_smoothing,
    b_smoothing,
    contract_thick_edges,
    crossing_sign,
    in_pattern,
    oriented_pairs,
    rotation_number,
    splice,
)
from .kv import expand_d, expand_r, graph_value
from .orientations import (
    TOP_INWARD,
    TOP_OUTWARD,
    engine_to_qa,
    enumerate_balanced,
    enumerate_orientations,
    resolution_pairs,
    resolutions,
)
from .parallel import ordered_map

__all__ = [
    "CONFIGURATIONS",
    "HJ_WEIGHTS",
    "WF_WEIGHTS",
    "CorrespondenceReport",
    "HJTerm",
    "NSpecialization",
    "WFTerm",
    "build_correspondence",
    "case_identities",
    "configuration",
    "hj_expand",
    "hj_total",
    "homflypt_n_specialization",
    "simplified_hj",
    "trivalent_states",
    "wf_expand",
    "wf_total",
]

CONFIGURATIONS = tuple(f"{k}{i}" for k in "VCA" for i in range(1, 5))

_q = RationalFunction.var(QA, "q")
_a = RationalFunction.var(QA, "a")


def _w(text: str) -> RationalFunction:
    return RationalFunction.parse(QA, text)


# per-crossing weight of a configuration in the HJ model
HJ_WEIGHTS: dict[str, RationalFunction] = {
    "V1": _w("1"),
    "V2": _w("1"),
    "V3": _w("1"),
    "V4": _w("1"),
    "C1": _w("q"),
    "C2": _w("q^-1"),
    "C3": _w("q"),
    "C4": _w("q^-1"),
    "A1": _w("q - q^-1"),
    "A2": _w("0"),
    "A3": _w("q^-1 - q"),
    "A4": _w("0"),
}

# per-crossing weight in the WF model, keyed by (configuration, route):
# route "F" = the crossing was smoothed by the D expansion, "W" = it became a
# vertex and was (possibly) smoothed by Wu's resolution
WF_WEIGHTS: dict[tuple[str, str], RationalFunction] = {
    ("V1", "W"): _w("1"),
    ("V2", "W"): _w("1"),
    ("V3", "W"): _w("1"),
    ("V4", "W"): _w("1"),
    ("C1", "F"): _w("q"),
    ("C2", "F"): _w("q^-1"),
    ("C3", "F"): _w("q"),
    ("C4", "F"): _w("q^-1"),
    ("A1", "F"): _w("q"),
    ("A1", "W"): _w("-q^-1"),
    ("A2", "F"): _w("q"),
    ("A2", "W"): _w("-q"),
    ("A3", "F"): _w("q^-1"),
    ("A3", "W"): _w("-q"),
    ("A4", "F"): _w("q^-1"),
    ("A4", "W"): _w("-q^-1"),
}


def _pair_set(prs) -> frozenset:
    return frozenset(frozenset(p) for p in prs)


def configuration(diag: Diagram, vid: int, out: frozenset, pairs=None) -> str:
    """Tag of crossing ``vid`` of ``diag`` under orientation ``out``; ``pairs`` is the smoothing or None."""
    ins = in_pattern(diag, vid, out)
    if sum(ins) != 2:
        raise DiagramError(f"crossing {vid} is not balanced")
    for k in range(4):
        if ins[k] and ins[(k + 1) % 4]:
            if pairs is None:
                return f"V{k + 1}"
            if _pair_set(pairs) != _pair_set(oriented_pairs(diag, vid, out)):
                raise DiagramError(f"smoothing at {vid} does not respect the orientation")
            return f"C{k + 1}"
    if pairs is None:
        raise DiagramError(f"alternatingly oriented crossing {vid} must be smoothed")
    is_a = _pair_set(pairs) == _pair_set(a_smoothing(diag, vid))
    if ins[0]:
        return "A2" if is_a else "A4"
    return "A1" if is_a else "A3"


def _product(ws: Sequence[RationalFunction]) -> RationalFunction:
    p = RationalFunction.constant(QA, 1)
    for w in ws:
        p = p * w
    return p


def _state_graph(diag: Diagram, out: frozenset, loop_signs, pairings: dict) -> Diagram:
    g = diag.with_orientation(out, loop_signs)
    if pairings:
        g = splice(g, pairings)
    return g.replace(crossings=frozenset())


@dataclass(frozen=True)
class HJTerm:
    index: int
    tags: tuple[str, ...]  # one per crossing, in crossing order
    loop_signs: tuple[int, ...]
    state: Diagram
    crossing_weights: tuple[RationalFunction, ...]
    rot: int

    @property
    def identity(self) -> tuple:
        return (self.tags, self.loop_signs)

    @property
    def weight_product(self) -> RationalFunction:
        return _product(self.crossing_weights)

    @property
    def c_weight(self) -> RationalFunction:
        return loop_factor_j() * (_q / _a) ** self.rot * self.weight_product


@dataclass(frozen=True)
class WFTerm:
    index: int
    source_record: tuple[tuple[int, str], ...]  # D-expansion choice per crossing
    tags: tuple[str, ...]
    routes: tuple[str, ...]
    loop_signs: tuple[int, ...]
    result: Diagram
    crossing_weights: tuple[RationalFunction, ...]
    rot: int

    @property
    def identity(self) -> tuple:
        return (self.tags, self.loop_signs)

    @property
    def weight_product(self) -> RationalFunction:
        return _product(self.crossing_weights)

    @property
    def d_weight(self) -> RationalFunction:
        return loop_factor_j() * (_q / _a) ** self.rot * self.weight_product


def _link(diag: Diagram) -> Diagram:
    if not diag.is_link():
        raise DiagramError("the state models start from a link diagram")
    return diag.unoriented()


def hj_expand(diag: Diagram) -> list[HJTerm]:
    """Jaeger's orientations and resolutions, then the oriented expansion of every crossing-like crossing."""
    L = _link(diag)
    xs = sorted(L.crossings)
    terms = []
    for o in enumerate_balanced(L):
        for r in resolutions(o):
            base_pairs = resolution_pairs(L, o, r)
            like = [v for v in xs if v not in base_pairs]
            for hs in itertools.product(("C", "V"), repeat=len(like)):
                pairings = dict(base_pairs)
                for v, h in zip(like, hs):
                    if h == "C":
                        pairings[v] = oriented_pairs(L, v, o.out)
                tags = tuple(configuration(L, v, o.out, pairings.get(v)) for v in xs)
                g = _state_graph(L, o.out, o.loop_signs, pairings)
                terms.append(
                    HJTerm(
                        len(terms) + 1,
                        tags,
                        o.loop_signs,
                        g,
                        tuple(HJ_WEIGHTS[t] for t in tags),
                        rotation_number(g),
                    )
                )
    return terms


def wf_expand(diag: Diagram) -> list[WFTerm]:
    """The unoriented expansion, then Wu's orientations and resolutions of each graph."""
    L = _link(diag)
    xs = sorted(L.crossings)
    terms = []
    for st in expand_d(L):
        fpairs = {}
        for v, c in st.record:
            if c == "A":
                fpairs[v] = a_smoothing(L, v)
            elif c == "B":
                fpairs[v] = b_smoothing(L, v)
        vertices = [v for v in xs if v not in fpairs]
        for out, signs in enumerate_orientations(L, fpairs):
            alternating = [v for v in vertices if not _adjacent_ins(L, v, out)]
            for choice in itertools.product(("L", "R"), repeat=len(alternating)):
                pairings = dict(fpairs)
                for v, c in zip(alternating, choice):
                    pairings[v] = _wu_pairs(L, v, out, c)
                tags = tuple(configuration(L, v, out, pairings.get(v)) for v in xs)
                routes = tuple("F" if v in fpairs else "W" for v in xs)
                g = _state_graph(L, out, signs, pairings)
                terms.append(
                    WFTerm(
                        len(terms) + 1,
                        st.record,
                        tags,
                        routes,
                        signs,
                        g,
                        tuple(WF_WEIGHTS[(t, r)] for t, r in zip(tags, routes)),
                        rotation_number(g),
                    )
                )
    return terms


def _adjacent_ins(diag: Diagram, v: int, out: frozenset) -> bool:
    ins = in_pattern(diag, v, out)
    return any(ins[k] and ins[(k + 1) % 4] for k in range(4))


def _wu_pairs(diag: Diagram, v: int, out: frozenset, choice: str):
    ds = diag.verts[v]
    p = 0 if ds[0] not in out else 1
    if choice == "L":
        return ((ds[p], ds[(p + 3) % 4]), (ds[p + 2], ds[(p + 1) % 4]))
    return ((ds[p], ds[(p + 1) % 4]), (ds[p + 2], ds[(p + 3) % 4]))


# ---------------------------------------------------------------------------
# grouping


@dataclass
class CorrespondenceReport:
    hj: list[HJTerm]
    wf: list[WFTerm]
    groups: dict[int, list[int]] = field(default_factory=dict)  # HJ index -> WF indices
    leftovers: list[int] = field(default_factory=list)
    verdicts: dict[int, bool] = field(default_factory=dict)
    sums: dict[int, RationalFunction] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.leftovers or not all(self.verdicts.values()):
            return False
        seen: list[int] = [i for g in self.groups.values() for i in g]
        return len(seen) == len(set(seen)) == len(self.wf)

    def render(self) -> str:
        by_index = {t.index: t for t in self.wf}
        lines = []
        for h in self.hj:
            members = self.groups.get(h.index, [])
            cw = ",".join(w.render() for w in h.crossing_weights)
            ts = ", ".join(
                f"{i}:[" + ",".join(w.render() for w in by_index[i].crossing_weights) + "]" for i in members
            )
            verdict = "PASS" if self.verdicts.get(h.index) else "FAIL"
            lines.append(
                f"s{h.index} c=[{cw}] | T={{{ts}}} | sum={self.sums[h.index].render()} | verdict={verdict}"
            )
        for i in self.leftovers:
            lines.append(f"leftover {i} tags={','.join(by_index[i].tags)}")
        return "\n".join(lines) + "\n"


def build_correspondence(hj: Sequence[HJTerm], wf: Sequence[WFTerm]) -> CorrespondenceReport:
    rep = CorrespondenceReport(list(hj), list(wf))
    owner = {}
    for h in hj:
        if h.identity in owner:
            raise DiagramError(f"HJ states {owner[h.identity]} and {h.index} coincide")
        owner[h.identity] = h.index
        rep.groups[h.index] = []
    for t in wf:
        s = owner.get(t.identity)
        if s is None:
            rep.leftovers.append(t.index)
        else:
            rep.groups[s].append(t.index)
    by_index = {t.index: t for t in wf}
    for h in hj:
        total = RationalFunction.constant(QA, 0)
        for i in rep.groups[h.index]:
            total = total + by_index[i].weight_product
        rep.sums[h.index] = total
        # the rotation factor and J are common to the whole group
        same_rot = all(by_index[i].rot == h.rot for i in rep.groups[h.index])
        rep.verdicts[h.index] = same_rot and h.c_weight == sum_d(by_index, rep.groups[h.index])
    return rep


def sum_d(by_index, members) -> RationalFunction:
    total = RationalFunction.constant(QA, 0)
    for i in members:
        total = total + by_index[i].d_weight
    return total


# ---------------------------------------------------------------------------
# model totals


def _r_value(g: Diagram) -> RationalFunction:
    return engine_to_qa(graph_value(g, "R"))


def hj_total(diag: Diagram, *, jobs: int = 1, skip_zero: bool = False) -> RationalFunction:
    terms = hj_expand(diag)
    if skip_zero:
        terms = [t for t in terms if not t.weight_product.is_zero()]
    return _weighted_sum([(t.c_weight, t.state) for t in terms], jobs)


def wf_total(diag: Diagram, *, jobs: int = 1) -> RationalFunction:
    return _weighted_sum([(t.d_weight, t.result) for t in wf_expand(diag)], jobs)


def _weighted_sum(pairs, jobs: int) -> RationalFunction:
    def one(p):
        w, g = p
        return RationalFunction.constant(QA, 0) if w.is_zero() else w * _r_value(g)

    total = RationalFunction.constant(QA, 0)
    for x in ordered_map(one, pairs, jobs):
        total = total + x
    return total


def simplified_hj(diag: Diagram, *, jobs: int = 1) -> RationalFunction:
    """State sum over the ten configurations with nonzero weight.

    Each crossing independently takes a configuration compatible with the
    orientation chosen on the edges of ``L``; orientations making some
    crossing top-inward are never generated.
    """
    L = _link(diag)
    xs = sorted(L.crossings)
    pairs = []
    for o in enumerate_balanced(L):
        if o.has_top_inward:
            continue
        options = []
        for v in xs:
            cls = o.site_class(v)
            if cls == TOP_OUTWARD:
                options.append([a_smoothing(L, v), b_smoothing(L, v)])
            else:
                options.append([None, oriented_pairs(L, v, o.out)])
        for choice in itertools.product(*options):
            pairings = {v: p for v, p in zip(xs, choice) if p is not None}
            tags = [configuration(L, v, o.out, p) for v, p in zip(xs, choice)]
            w = _product([HJ_WEIGHTS[t] for t in tags])
            g = _state_graph(L, o.out, o.loop_signs, pairings)
            pairs.append((loop_factor_j() * (_q / _a) ** rotation_number(g) * w, g))
    return _weighted_sum(pairs, jobs)


# ---------------------------------------------------------------------------
# proof identities


def case_identities(a1: int, a2: int, a3: int) -> bool:
    """Check the attribution identities behind the term-by-term match.

    Case 1: sum_{k=0}^{a2} C(a2,k) q^k (-q)^{a2-k} equals 0^{a2}, so it
    vanishes once there is an A2 site (k of the A2 sites come from the
    smoothing route, a2-k from the vertex route; without the binomial factor
    the sum is q^a2 for even a2).
    Case 2: (q - q^-1)^{a1} = sum_k C(a1,k) q^k (-q^-1)^{a1-k} and
    (q^-1 - q)^{a3} = sum_k C(a3,k) (q^-1)^k (-q)^{a3-k}, with k running
    from 0, each side compared with a brute-force sum over the per-site
    F/W attributions.
    """
    from math import comb

    q = LaurentPoly.var(("q",), "q")
    qi = q ** -1
    zero = LaurentPoly(("q",), {})

    def brute(n, f_weight, w_weight):
        total = zero
        for attr in itertools.product((f_weight, w_weight), repeat=n):
            p = LaurentPoly.constant(("q",), 1)
            for x in attr:
                p = p * x
            total = total + p
        return total

    case1 = zero
    for k in range(a2 + 1):
        case1 = case1 + comb(a2, k) * q ** k * (-q) ** (a2 - k)
    expected = zero if a2 else LaurentPoly.constant(("q",), 1)
    ok1 = case1 == expected == brute(a2, q, -q)

    lhs1 = (q - qi) ** a1
    rhs1 = zero
    for k in range(a1 + 1):
        rhs1 = rhs1 + comb(a1, k) * q ** k * (-qi) ** (a1 - k)
    lhs3 = (qi - q) ** a3
    rhs3 = zero
    for k in range(a3 + 1):
        rhs3 = rhs3 + comb(a3, k) * qi ** k * (-q) ** (a3 - k)
    ok2 = lhs1 == rhs1 == brute(a1, q, -qi) and lhs3 == rhs3 == brute(a3, qi, -q)
    return ok1 and ok2


# ---------------------------------------------------------------------------
# trivalent classic graphs and the n-specialisation


def trivalent_states(diag: Diagram) -> list[tuple[TrivalentGraph, object]]:
    """Classic graphs: each crossing is oriented-smoothed or replaced by a thick edge.

    Returns (classic graph, matching oriented expansion state) pairs; the
    thick edge at crossing ``v`` joins trivalent vertices ``v`` and
    ``v + offset`` so contraction gives back vertex ``v``.
    """
    if not diag.oriented:
        raise DiagramError("classic graphs need an oriented diagram")
    result = []
    offset = max(diag.verts, default=0)
    for st in expand_r(diag):
        g = st.graph
        verts = {}
        inv = dict(g.inv)
        out = set(g.out)
        thick = []
        nxt = max(diag.inv, default=0)
        for v in sorted(g.verts):
            ds = g.verts[v]
            ins = in_pattern(g, v)
            k = next(i for i in range(4) if ins[i] and ins[(i + 1) % 4])
            t1, t2 = nxt + 1, nxt + 2
            nxt += 2
            verts[v] = (ds[k], ds[(k + 1) % 4], t1)
            verts[v + offset] = (ds[(k + 2) % 4], ds[(k + 3) % 4], t2)
            inv[t1], inv[t2] = t2, t1
            out.add(t1)  # thick edges run from the incoming pair to the outgoing pair
            thick.append((t1, t2))
        tg = TrivalentGraph(verts, inv, thick, out=out, loops=g.loops, loop_signs=g.loop_signs)
        result.append((tg, st))
    return result


@dataclass
class NSpecialization:
    n: int
    value: RationalFunction
    writhe: int
    terms: list[tuple[int, int, int, int, int]]  # (i, j, s, t, |V|) per classic graph
    sign_identity: bool  # q^w (-q^-1)^s (-q)^t == q^(i-j) (-1)^|V| for every term
    bijection: bool  # contraction reproduces the oriented expansion, crossing by crossing


def homflypt_n_specialization(diag: Diagram, n: int, *, jobs: int = 1) -> NSpecialization:
    """sum over classic graphs G of q^(i-j) [f(G)]_R(q, q^-1, q^n)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not diag.oriented:
        raise DiagramError("the n-specialisation needs an oriented diagram")
    q1 = RationalFunction.var(("q",), "q")
    states = trivalent_states(diag)
    pos = sum(1 for v in diag.crossings if crossing_sign(diag, v) > 0)
    neg = len(diag.crossings) - pos
    w = pos - neg
    bijection = True
    graphs = []
    rows = []
    sign_ok = True
    for tg, st in states:
        f = contract_thick_edges(tg)
        if not _same_graph(f, st.graph):
            bijection = False
        graphs.append(f)
        s, t = pos - st.i, neg - st.j
        nv = len(f.verts)
        rows.append((st.i, st.j, s, t, nv))
        lhs = q1 ** w * (-(q1 ** -1)) ** s * (-q1) ** t
        rhs = q1 ** (st.i - st.j) * (-1) ** nv
        sign_ok = sign_ok and lhs == rhs

    bind = {"A": q1, "B": q1 ** -1, "z": q1 - q1 ** -1, "a": q1 ** n}

    def one(k):
        st = states[k][1]
        return q1 ** (st.i - st.j) * substitute(graph_value(graphs[k], "R"), bind)

    total = RationalFunction.constant(("q",), 0)
    for x in ordered_map(one, range(len(states)), jobs):
        total = total + x
    return NSpecialization(n, total, w, rows, sign_ok, bijection)


def _same_graph(a: Diagram, b: Diagram) -> bool:
    def norm(ds):
        k = ds.index(min(ds))
        return ds[k:] + ds[:k]

    return (
        {v: norm(ds) for v, ds in a.verts.items()} == {v: norm(ds) for v, ds in b.verts.items()}
        and a.inv == b.inv
        and a.out == b.out
        and a.loops == b.loops
    )
