"""State expansions into 4-valent plane graphs and the two graphical calculi.

Graph values are computed by a table-driven rewriter.  Internally every value
lives in the Laurent ring over ``A, B, z, a`` where ``z`` stands for ``A - B``;
this keeps all the calculus coefficients polynomial.  Values are converted to
rational functions over ``A, B, a`` only at the public boundary.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .algebra import ABa, LaurentPoly, RationalFunction, VariableSet, ZA, _ExprParser, substitute
from .diagrams import (
    Diagram,
    DiagramError,
    _cycles,
    a_smoothing,
    b_smoothing,
    canonical_key,
    component_diagram,
    crossing_sign,
    oriented_pairs,
    splice,
)
from .parallel import ordered_map
from .skein import d_poly, r_poly

__all__ = [
    "ENGINE_VARS",
    "KVCoefficients",
    "KVRuleError",
    "Rule",
    "RuleTable",
    "StateTerm",
    "default_rules",
    "eval_d",
    "eval_r",
    "expand_d",
    "expand_r",
    "graph_value",
    "kv_sum",
    "load_rules",
    "parse_rules",
    "to_aba",
]

ENGINE_VARS = VariableSet(("A", "B", "z", "a"))


class KVRuleError(RuntimeError):
    """No rule of the table applies (only raised in strict evaluation)."""


# ---------------------------------------------------------------------------
# coefficients


def _engine_symbols() -> dict[str, RationalFunction]:
    v = ENGINE_VARS
    A, B, z, a = (RationalFunction.var(v, x) for x in ("A", "B", "z", "a"))
    zi = z ** -1
    delta = zi * (a - a ** -1)
    lam = zi * (A * a ** -1 - B * a)
    theta = zi * (B * B * a - A * A * a ** -1)
    eta = zi * (B ** 3 * a - A ** 3 * a ** -1)
    return {
        "delta": delta,
        "lambda": lam,
        "theta": theta,
        "eta": eta,
        "mu": delta + 1,
        "o": lam - (A + B),
        "gamma": theta + A * B,
        "xi": eta,
    }


_SYMBOLS = _engine_symbols()


def _engine_laurent(x: RationalFunction) -> LaurentPoly:
    p = x.as_laurent()
    if p is None:
        raise ValueError(f"coefficient {x.render()} is not a Laurent polynomial in A, B, z, a")
    return p


_DELTA = _engine_laurent(_SYMBOLS["delta"])
_MU = _engine_laurent(_SYMBOLS["mu"])


def to_aba(p: LaurentPoly) -> RationalFunction:
    """Engine value -> rational function over ``{A, B, a}`` (``z`` becomes ``A - B``)."""
    A, B, a = (RationalFunction.var(ABa, x) for x in ("A", "B", "a"))
    return substitute(p, {"A": A, "B": B, "z": A - B, "a": a})


@dataclass(frozen=True)
class KVCoefficients:
    delta: RationalFunction
    lam: RationalFunction
    theta: RationalFunction
    eta: RationalFunction
    mu: RationalFunction
    o: RationalFunction
    gamma: RationalFunction
    xi: RationalFunction

    @classmethod
    def default(cls) -> "KVCoefficients":
        c = {k: to_aba(_engine_laurent(v)) for k, v in _SYMBOLS.items()}
        return cls(c["delta"], c["lambda"], c["theta"], c["eta"], c["mu"], c["o"], c["gamma"], c["xi"])


# ---------------------------------------------------------------------------
# rule tables


@dataclass(frozen=True)
class Fragment:
    arcs: tuple[tuple[int, int], ...] = ()
    vertex: tuple[int, ...] | None = None
    over: int | None = None


@dataclass(frozen=True)
class Rule:
    name: str
    model: str
    verts: tuple[tuple[int, ...], ...]
    internal: tuple[tuple[int, int], ...]
    orient: tuple[tuple[int, bool], ...]  # (label, is_out)
    boundary: tuple[int, ...]
    rewrites: tuple[tuple[LaurentPoly, str, Fragment], ...]
    fallback: bool = False


@dataclass
class RuleTable:
    rules: list[Rule] = field(default_factory=list)

    def for_model(self, model: str, fallback: bool) -> list[Rule]:
        return [r for r in self.rules if r.model == model and r.fallback == fallback]


_FRAG_KEYS = re.compile(r"(arcs|vrot|over):")


def _parse_fragment(text: str, ln: int) -> Fragment:
    parts = _FRAG_KEYS.split(text)
    if parts[0].strip():
        raise DiagramError(f"unexpected fragment text {parts[0].strip()!r}", ln)
    arcs: tuple = ()
    vertex = None
    over = None
    for key, body in zip(parts[1::2], parts[2::2]):
        if key == "arcs":
            arcs = tuple(_cycles(body, ln))
            if any(len(p) != 2 for p in arcs):
                raise DiagramError("arcs join exactly two darts", ln)
        elif key == "vrot":
            cyc = _cycles(body, ln)
            if len(cyc) != 1 or len(cyc[0]) != 4:
                raise DiagramError("a fragment holds one 4-valent vertex", ln)
            vertex = cyc[0]
        else:
            try:
                over = int(body)
            except ValueError:
                raise DiagramError("over needs one dart", ln) from None
    return Fragment(arcs, vertex, over)


def parse_rules(text: str) -> RuleTable:
    blocks: list[tuple[str, bool, int, list[tuple[str, str, int]]]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("rule "):
            words = line.split()
            blocks.append((words[1], "fallback" in words[2:], ln, []))
            continue
        if not blocks:
            raise DiagramError("text before the first rule", ln)
        if ":" not in line:
            raise DiagramError(f"expected 'key: value', got {line!r}", ln)
        key, body = line.split(":", 1)
        blocks[-1][3].append((key.strip(), body.strip(), ln))
    return RuleTable([_build_rule(*b) for b in blocks])


def _build_rule(name: str, fallback: bool, start: int, lines: list[tuple[str, str, int]]) -> Rule:
    model = None
    verts: list[tuple[int, ...]] = []
    internal: list[tuple[int, int]] = []
    orient: list[tuple[int, bool]] = []
    boundary: tuple[int, ...] = ()
    rewrites = []
    for key, body, ln in lines:
        if key == "model":
            if body not in ("R", "D"):
                raise DiagramError(f"model must be R or D, got {body!r}", ln)
            model = body
        elif key == "vrot":
            verts = _cycles(body, ln)
        elif key == "einv":
            internal = [tuple(p) for p in _cycles(body, ln)]  # type: ignore[misc]
        elif key == "orient":
            for tok in body.split():
                m = re.fullmatch(r"(\d+)([+-])", tok)
                if not m:
                    raise DiagramError(f"bad orientation mark {tok!r}", ln)
                orient.append((int(m.group(1)), m.group(2) == "+"))
        elif key == "boundary":
            boundary = tuple(int(x) for x in body.split())
        elif key == "rewrite":
            if "=>" not in body:
                raise DiagramError("rewrite needs '<coefficient> => <fragment>'", ln)
            coef_text, frag_text = (s.strip() for s in body.split("=>", 1))
            try:
                coef = _engine_laurent(_ExprParser(ENGINE_VARS, coef_text, _SYMBOLS).parse())
            except ValueError as exc:
                raise DiagramError(str(exc), ln) from None
            rewrites.append((coef, coef_text, _parse_fragment(frag_text, ln)))
        else:
            raise DiagramError(f"unknown rule field {key!r}", ln)
    if model is None or not verts or not rewrites:
        raise DiagramError(f"rule {name!r} needs model, vrot and at least one rewrite", start)
    labels = [d for c in verts for d in c]
    inner = [d for p in internal for d in p]
    if len(set(labels)) != len(labels) or sorted(inner + list(boundary)) != sorted(labels):
        raise DiagramError(f"rule {name!r}: internal and boundary darts must partition the pattern", start)
    for _, _, frag in rewrites:
        used = [d for p in frag.arcs for d in p] + list(frag.vertex or ())
        if sorted(used) != sorted(boundary):
            raise DiagramError(f"rule {name!r}: every rewrite must use each boundary dart once", start)
        if frag.over is not None and frag.over not in (frag.vertex or ()):
            raise DiagramError(f"rule {name!r}: over dart must sit on the new vertex", start)
    return Rule(name, model, tuple(verts), tuple(internal), tuple(orient), boundary, tuple(rewrites), fallback)


def load_rules(path) -> RuleTable:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


_DEFAULT: RuleTable | None = None


def default_rules() -> RuleTable:
    global _DEFAULT
    if _DEFAULT is None:
        text = (resources.files(__package__) / "rules" / "kv_rules.txt").read_text(encoding="utf-8")
        _DEFAULT = parse_rules(text)
    return _DEFAULT


# ---------------------------------------------------------------------------
# matching and rewriting


def _match(rule: Rule, diag: Diagram, v: int) -> dict[int, int] | None:
    ds = diag.verts[v]
    first = rule.verts[0]
    if len(ds) != len(first):
        return None
    for r in range(len(ds)):
        m = {lab: ds[(i + r) % len(ds)] for i, lab in enumerate(first)}
        m = _extend(rule, diag, m, [v])
        if m is not None:
            return m
    return None


def _extend(rule: Rule, diag: Diagram, m: dict[int, int], used: list[int]) -> dict[int, int] | None:
    if len(used) == len(rule.verts):
        for x, y in rule.internal:
            if diag.inv[m[x]] != m[y]:
                return None
        if diag.out is not None:
            for lab, is_out in rule.orient:
                if (m[lab] in diag.out) != is_out:
                    return None
        return m
    nxt = rule.verts[len(used)]
    for x, y in rule.internal:
        for a, b in ((x, y), (y, x)):
            if a in m and b in nxt:
                w, pos = diag.locate(diag.inv[m[a]])
                if w in used or w in diag.crossings or len(diag.verts[w]) != len(nxt):
                    return None
                k = nxt.index(b)
                ws = diag.verts[w]
                m2 = dict(m)
                for i, lab in enumerate(nxt):
                    m2[lab] = ws[(pos - k + i) % len(ws)]
                return _extend(rule, diag, m2, used + [w])
    return None


def _apply(diag: Diagram, rule: Rule, m: dict[int, int], frag: Fragment) -> Diagram:
    vids = [diag.locate(m[c[0]])[0] for c in rule.verts]
    pairings = {v: () for v in vids}
    pairings[vids[0]] = tuple((m[x], m[y]) for x, y in frag.arcs)
    new_vertices = {}
    if frag.vertex is not None:
        vid = max(diag.verts) + 1
        new_vertices[vid] = (tuple(m[x] for x in frag.vertex), None if frag.over is None else m[frag.over])
    inner = [m[d] for p in rule.internal for d in p]
    return splice(diag, pairings, new_vertices=new_vertices, delete_darts=inner)


# ---------------------------------------------------------------------------
# evaluation


class _Evaluator:
    def __init__(self, model: str, rules: RuleTable, order: str, strict: bool, memo: dict, lock):
        if model not in ("R", "D"):
            raise ValueError("model must be 'R' or 'D'")
        if order not in ("min", "max"):
            raise ValueError("order must be 'min' or 'max'")
        self.model = model
        self.reduce = rules.for_model(model, fallback=False)
        self.fallback = rules.for_model(model, fallback=True)
        self.order = order
        self.strict = strict
        self.memo = memo
        self.lock = lock
        self.factor = _DELTA if model == "R" else _MU

    def value(self, diag: Diagram) -> LaurentPoly:
        comps = diag.components()
        pieces = len(comps) + diag.loops
        if pieces == 0:
            raise DiagramError("empty diagram")
        val = self.factor ** (pieces - 1)
        for comp in comps:
            sub = diag if len(comps) == 1 and diag.loops == 0 else component_diagram(diag, comp)
            val = val * self.component(sub)
        return val

    def component(self, diag: Diagram) -> LaurentPoly:
        key = (self.model, self.order, self.strict, canonical_key(diag, oriented=self.model == "R"))
        val = self.memo.get(key)
        if val is None:
            val = self._compute(diag)
            with self.lock:
                self.memo.setdefault(key, val)
        return val

    def _compute(self, diag: Diagram) -> LaurentPoly:
        if diag.is_link():
            p = r_poly(diag) if self.model == "R" else d_poly(diag)
            return p.embed(ENGINE_VARS)
        rigid = diag.rigid_vertices
        if self.order == "max":
            rigid = rigid[::-1]
        for v in rigid:
            for rule in self.reduce:
                m = _match(rule, diag, v)
                if m is not None:
                    return self._rewrite(diag, rule, m)
        if self.strict:
            raise KVRuleError(f"no reduction rule applies to {diag!r}")
        for rule in self.fallback:
            m = _match(rule, diag, rigid[0])
            if m is not None:
                return self._rewrite(diag, rule, m)
        raise KVRuleError(f"vertex {rigid[0]} admits no rule (is the graph balanced and crossing-like?)")

    def _rewrite(self, diag: Diagram, rule: Rule, m: dict[int, int]) -> LaurentPoly:
        total = LaurentPoly(ENGINE_VARS, {})
        for coef, _, frag in rule.rewrites:
            total = total + coef * self.value(_apply(diag, rule, m, frag))
        return total


_MEMO: dict = {}
_LOCK = threading.Lock()


def graph_value(
    g: Diagram, model: str, *, rules: RuleTable | None = None, order: str = "min", strict: bool = False
) -> LaurentPoly:
    """Value of a graph (or mixed graph/link diagram) in the engine ring."""
    if model == "R" and not g.oriented:
        raise DiagramError("the R calculus needs an oriented graph")
    if model == "D":
        g = g.unoriented()
    if rules is None:
        ev = _Evaluator(model, default_rules(), order, strict, _MEMO, _LOCK)
    else:
        ev = _Evaluator(model, rules, order, strict, {}, threading.Lock())
    return ev.value(g)


def eval_r(g: Diagram, **kw) -> RationalFunction:
    """[G]_R over ``{A, B, a}``."""
    return to_aba(graph_value(g, "R", **kw))


def eval_d(g: Diagram, **kw) -> RationalFunction:
    """[G]_D over ``{A, B, a}``."""
    return to_aba(graph_value(g, "D", **kw))


# ---------------------------------------------------------------------------
# state expansions


@dataclass(frozen=True)
class StateTerm:
    """One graph of a state expansion.

    ``record`` maps each crossing of the source diagram to ``"A"`` or ``"B"``
    (smoothed with that weight) or ``"V"`` (made a rigid vertex).
    """

    graph: Diagram
    i: int
    j: int
    record: tuple[tuple[int, str], ...]

    def choice(self, crossing: int) -> str:
        return dict(self.record)[crossing]


def _build_state(diag: Diagram, record: Sequence[tuple[int, str]], pairs_of) -> StateTerm:
    pairings = {v: pairs_of(v, c) for v, c in record if c != "V"}
    g = splice(diag, pairings, keep_orientation=diag.oriented) if pairings else diag
    g = g.replace(crossings=frozenset())
    i = sum(1 for _, c in record if c == "A")
    j = sum(1 for _, c in record if c == "B")
    return StateTerm(g, i, j, tuple(record))


def expand_r(diag: Diagram) -> list[StateTerm]:
    """All 2^n graphs: each crossing is oriented-smoothed or made a vertex."""
    if not diag.oriented:
        raise DiagramError("expand_r needs an oriented diagram")
    xs = sorted(diag.crossings)
    options = [("A" if crossing_sign(diag, v) > 0 else "B", "V") for v in xs]
    return [
        _build_state(diag, list(zip(xs, choice)), lambda v, c: oriented_pairs(diag, v))
        for choice in itertools.product(*options)
    ]


def expand_d(diag: Diagram) -> list[StateTerm]:
    """All 3^n graphs: A-smoothing, B-smoothing or vertex at each crossing."""
    xs = sorted(diag.crossings)

    def pairs_of(v, c):
        return a_smoothing(diag, v) if c == "A" else b_smoothing(diag, v)

    return [
        _build_state(diag, list(zip(xs, choice)), pairs_of)
        for choice in itertools.product(("A", "B", "V"), repeat=len(xs))
    ]


def kv_sum(diag: Diagram, model: str, *, jobs: int = 1, **kw) -> RationalFunction:
    """Sum of A^i B^j [G] over the state expansion, over ``{A, B, a}``."""
    terms = expand_r(diag) if model == "R" else expand_d(diag)
    A = LaurentPoly.var(ENGINE_VARS, "A")
    B = LaurentPoly.var(ENGINE_VARS, "B")
    vals = ordered_map(lambda t: graph_value(t.graph, model, **kw), terms, jobs)
    total = LaurentPoly(ENGINE_VARS, {})
    for t, val in zip(terms, vals):
        total = total + A ** t.i * B ** t.j * val
    return to_aba(total)
