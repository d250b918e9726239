"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Every comparison is exact symbolic equality.  Time limits are pinned as
wall-clock bounds in seconds.
"""

from __future__ import annotations

import random
import time
from collections import Counter

from kvmodels.algebra import QA, ZA, LaurentPoly, RationalFunction, substitute
from kvmodels.cli import main
from kvmodels.corpus import braid_closure, corpus_dir, corpus_names, load, random_braid_closure
from kvmodels.correspondence import (
    build_correspondence,
    case_identities,
    hj_expand,
    homflypt_n_specialization,
    wf_expand,
)
from kvmodels.diagrams import a_smoothing, b_smoothing, crossing_sign, oriented_pairs, splice
from kvmodels.kv import eval_d, kv_sum
from kvmodels.orientations import enumerate_balanced, jaeger_lhs, jaeger_rhs, wu_lhs, wu_rhs
from kvmodels.skein import d_poly, r_poly

from oracles import laurent_q

Z = LaurentPoly.var(ZA, "z")
Za = LaurentPoly.var(ZA, "a")

HOPF = (1, 1)


def _hopf():
    return braid_closure(HOPF, 2)


def _links(max_crossings: int = 6):
    out = []
    for name in corpus_names():
        d = load(name)
        if d.is_link() and len(d.crossings) <= max_crossings:
            out.append((name, d))
    return out


def _graphs(max_vertices: int = 3):
    out = []
    for name in corpus_names():
        d = load(name)
        if d.is_graph() and len(d.verts) <= max_vertices:
            out.append((name, d))
    return out


def test_criterion_01_hopf_hj_census(verdict):
    t0 = time.perf_counter()
    states = hj_expand(_hopf())
    orientations = enumerate_balanced(_hopf().unoriented())
    dt = time.perf_counter() - t0
    ok = len(orientations) == 6 and len(states) == 24 and dt < 1.0
    assert verdict("1 Hopf HJ census: 6 orientations, 24 states, < 1 s", ok, f"{len(orientations)}, {len(states)}, {dt:.3f}s")


def test_criterion_02_hopf_wf_census(verdict):
    t0 = time.perf_counter()
    terms = wf_expand(_hopf())
    graphs = {t.source_record for t in terms}
    dt = time.perf_counter() - t0
    ok = len(graphs) == 9 and len(terms) == 48 and dt < 1.0
    assert verdict("2 Hopf WF census: 9 graphs, 48 terms, < 1 s", ok, f"{len(graphs)}, {len(terms)}, {dt:.3f}s")


# Reference Hopf groups: per-crossing weights of the HJ state, then the WF terms
# of its group with their per-crossing weights.  Term numbers are the
# reference numbering; only the source graph of each number is used for matching.
_HOPF_GROUPS = [
    ("q^-1,q^-1", {16: "q^-1,q^-1"}),
    ("q^-1,1", {20: "q^-1,1"}),
    ("1,q^-1", {31: "1,q^-1"}),
    ("1,1", {37: "1,1"}),
    ("q^-1-q,q^-1-q", {18: "q^-1,q^-1", 23: "q^-1,-q", 33: "-q,q^-1", 41: "-q,-q"}),
    ("q^-1-q,q-q^-1", {14: "q^-1,q", 24: "q^-1,-q^-1", 28: "-q,q", 42: "-q,-q^-1"}),
    ("q-q^-1,q^-1-q", {6: "q,q^-1", 12: "q,-q", 34: "-q^-1,q^-1", 43: "-q^-1,-q"}),
    ("q-q^-1,q-q^-1", {4: "q,q", 11: "q,-q^-1", 27: "-q^-1,q", 44: "-q^-1,-q^-1"}),
    ("q,q", {2: "q,q"}),
    ("q,1", {8: "q,1"}),
    ("1,q", {25: "1,q"}),
    ("1,1", {38: "1,1"}),
    ("q,q", {1: "q,q"}),
    ("1,q", {26: "1,q"}),
    ("q,1", {7: "q,1"}),
    ("1,1", {39: "1,1"}),
    ("0,0", {17: "q^-1,q^-1", 21: "q^-1,-q^-1", 35: "-q^-1,q^-1", 45: "-q^-1,-q^-1"}),
    ("0,0", {5: "q,q^-1", 10: "q,-q^-1", 36: "-q,q^-1", 46: "-q,-q^-1"}),
    ("0,0", {13: "q^-1,q", 22: "q^-1,-q", 30: "-q^-1,q", 47: "-q^-1,-q"}),
    ("0,0", {3: "q,q", 9: "q,-q", 29: "-q,q", 48: "-q,-q"}),
    ("q^-1,q^-1", {15: "q^-1,q^-1"}),
    ("1,q^-1", {32: "1,q^-1"}),
    ("q^-1,1", {19: "q^-1,1"}),
    ("1,1", {40: "1,1"}),
]

# reference term number ranges -> source graph (smoothing or vertex per crossing)
_GRAPH_RANGES = [
    (1, 4, "AA"), (5, 6, "AB"), (7, 12, "AV"), (13, 14, "BA"), (15, 18, "BB"),
    (19, 24, "BV"), (25, 30, "VA"), (31, 36, "VB"), (37, 48, "VV"),
]


def _reference_graph(n: int) -> str:
    return next(g for lo, hi, g in _GRAPH_RANGES if lo <= n <= hi)


def _ws(text: str) -> tuple:
    return tuple(laurent_q(x) for x in text.split(","))


def _table_signatures() -> Counter:
    sigs = Counter()
    for c, members in _HOPF_GROUPS:
        sigs[(_ws(c), tuple(sorted(Counter((_reference_graph(n), _ws(w)) for n, w in members.items()).items())))] += 1
    return sigs


def _report_signatures(rep) -> Counter:
    by_index = {t.index: t for t in rep.wf}
    sigs = Counter()
    for h in rep.hj:
        members = Counter()
        for i in rep.groups[h.index]:
            t = by_index[i]
            graph = "".join(c for _, c in t.source_record)
            members[(graph, tuple(w.as_laurent() for w in t.crossing_weights))] += 1
        sigs[(tuple(w.as_laurent() for w in h.crossing_weights), tuple(sorted(members.items())))] += 1
    return sigs


def test_criterion_03_hopf_correspondence(verdict):
    t0 = time.perf_counter()
    hopf = _hopf()
    rep = build_correspondence(hj_expand(hopf), wf_expand(hopf))
    dt = time.perf_counter() - t0
    rows_match = _report_signatures(rep) == _table_signatures()
    ok = len(rep.groups) == 24 and rows_match and rep.passed and dt < 5.0
    assert verdict("3 Hopf correspondence: 24 groups match all rows, every verdict PASS, < 5 s", ok, f"rows match={rows_match}, {dt:.2f}s")


def test_criterion_04_jaeger(verdict):
    t0 = time.perf_counter()
    bad = [name for name, d in _links() if jaeger_lhs(d) != jaeger_rhs(d)]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60.0
    assert verdict("4 Jaeger formula on corpus links <= 6 crossings, < 60 s", ok, f"failures={bad}, {dt:.1f}s")


def test_criterion_05_wu(verdict):
    t0 = time.perf_counter()
    graphs = _graphs()
    bad = [name for name, g in graphs if wu_lhs(g) != wu_rhs(g)]
    # the left side also agrees with the public graph evaluator
    a = RationalFunction.var(QA, "a")
    qq = RationalFunction.var(QA, "q")
    for name, g in graphs:
        via_eval = substitute(eval_d(g), {"A": qq, "B": qq ** -1, "a": a * a * qq ** -1}, target=QA)
        if via_eval != wu_lhs(g):
            bad.append(name + " (lhs)")
    dt = time.perf_counter() - t0
    ok = any(len(g.verts) == 3 for _, g in graphs) and not bad and dt < 60.0
    assert verdict("5 Wu formula on corpus graphs <= 3 vertices, < 60 s", ok, f"{len(graphs)} graphs, failures={bad}, {dt:.1f}s")


def test_criterion_06_kv_expansions(verdict):
    A, B, a = (RationalFunction.var(("A", "B", "a"), x) for x in "ABa")
    qq = RationalFunction.var(("q", "a"), "q")
    aq = RationalFunction.var(("q", "a"), "a")
    at_q = {"A": qq, "B": qq ** -1, "a": aq}
    bad = []
    for name, d in _links():
        checks = [("D", d_poly(d))] + ([("R", r_poly(d))] if d.oriented else [])
        for model, oracle in checks:
            ref = substitute(oracle, {"z": A - B, "a": a})
            got = kv_sum(d, model)
            if substitute(got, at_q) != substitute(ref, at_q) or got != ref:
                bad.append(f"{name}/{model}")
    assert verdict("6 KV expansions equal the skein oracle at z = A - B", not bad, f"failures={bad}")


RANDOM_SEED = 20240601


def test_criterion_07_correspondence_random(verdict):
    t0 = time.perf_counter()
    rng = random.Random(RANDOM_SEED)
    cases = [(f"random{k}", random_braid_closure(rng, max_crossings=4)) for k in range(20)]
    cases += [(n, d) for n, d in ((n, load(n)) for n in corpus_names()) if d.is_link()]
    bad = []
    for name, d in cases:
        assert len(d.crossings) <= 6
        rep = build_correspondence(hj_expand(d), wf_expand(d))
        members = [i for g in rep.groups.values() for i in g]
        disjoint = len(members) == len(set(members))
        if rep.leftovers or not disjoint or not all(rep.verdicts.values()):
            bad.append(name)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300.0
    assert verdict("7 term-by-term correspondence on 20 random diagrams + corpus, < 5 min", ok, f"{len(cases)} diagrams, failures={bad}, {dt:.1f}s")


def test_criterion_08_case_identities(verdict):
    bad = [(a1, a2, a3) for a1 in range(9) for a2 in range(9) for a3 in range(9) if not case_identities(a1, a2, a3)]
    assert verdict("8 proof identities for a1, a2, a3 <= 8", not bad, f"failures={bad[:5]}")


def _skein_residuals(d) -> list[str]:
    bad = []
    for v in sorted(d.crossings):
        if d.oriented:
            sw = d.switch(v)
            plus, minus = (d, sw) if crossing_sign(d, v) > 0 else (sw, d)
            res = r_poly(plus) - r_poly(minus) - Z * r_poly(splice(d, {v: oriented_pairs(d, v)}))
            if not res.is_zero():
                bad.append(f"R at {v}")
        u = d.unoriented()
        smooth_a = splice(u, {v: a_smoothing(u, v)}, keep_orientation=False)
        smooth_b = splice(u, {v: b_smoothing(u, v)}, keep_orientation=False)
        res = d_poly(u) - d_poly(u.switch(v)) - Z * (d_poly(smooth_a) - d_poly(smooth_b))
        if not res.is_zero():
            bad.append(f"D at {v}")
    return bad


def test_criterion_09_axioms(verdict):
    bad = []
    for name, d in _links():
        bad += [f"{name}: {x}" for x in _skein_residuals(d)]
    # kinks: a Markov stabilisation adds one curl of the generator's sign
    for name, (word, n) in {"hopf": (HOPF, 2), "trefoil": ((1, 1, 1), 2), "figure8": ((1, -2, 1, -2), 3)}.items():
        base = braid_closure(word, n)
        for s in (1, -1):
            kinked = braid_closure(word + (s * n,), n + 1)
            f = Za ** s
            if r_poly(kinked) != f * r_poly(base) or d_poly(kinked) != f * d_poly(base):
                bad.append(f"kink {s:+d} on {name}")
    # Reidemeister II and III pairs of braid closures
    pairs = [
        (((1, 1, 2, -2), 3), ((1, 1), 3)),
        (((-2, 2, 1, 1, 1), 3), ((1, 1, 1), 3)),
        (((1, -1), 2), ((), 2)),
        (((1, 2, 1, -2), 3), ((2, 1, 2, -2), 3)),
        (((-1, -2, -1), 3), ((-2, -1, -2), 3)),
        (((1, 2, -1), 3), ((-2, 1, 2), 3)),
        (((1, -2, 1, 2, 1), 3), ((1, -2, 2, 1, 2), 3)),
    ]
    for left, right in pairs:
        x, y = braid_closure(*left), braid_closure(*right)
        if r_poly(x) != r_poly(y) or d_poly(x) != d_poly(y):
            bad.append(f"R2/R3 {left[0]} vs {right[0]}")
    assert verdict("9 skein closure, kink formulae, Reidemeister II/III pairs", not bad, f"failures={bad}")


def test_criterion_10_n_specialization(verdict):
    qq = RationalFunction.var(("q",), "q")
    bad = []
    for name, d in _links():
        if not d.oriented:
            continue
        for n in (2, 3):
            res = homflypt_n_specialization(d, n)
            ref = substitute(r_poly(d), {"z": qq - qq ** -1, "a": qq ** n})
            if res.value != ref or not res.sign_identity:
                bad.append(f"{name} n={n}")
    for word in (HOPF, (-1, -1), (1, 1, 1), (-1, -1, -1)):
        if not homflypt_n_specialization(braid_closure(word, 2), 2).bijection:
            bad.append(f"bijection {word}")
    assert verdict("10 n-specialisation for n = 2, 3 and the classic-graph bijection", not bad, f"failures={bad}")


_VERIFY = [
    ("verify-jaeger", "trefoil_pos", []),
    ("verify-wu", "trefoil_graph_VVV", []),
    ("verify-correspondence", "figure8", []),
    ("specialize-n", "trefoil_pos", ["--n", "3"]),
    ("report-table", "hopf_pos", []),
]


def test_criterion_11_determinism(verdict, tmp_path, capsys):
    bad = []
    for command, name, extra in _VERIFY:
        path = str(corpus_dir() / f"{name}.pmap")
        outputs = []
        codes = []
        for jobs in (1, 8):
            out = tmp_path / f"{command}-{jobs}.txt"
            codes.append(main([command, path, "--jobs", str(jobs), "--out", str(out)] + extra))
            outputs.append(out.read_bytes())
        if outputs[0] != outputs[1] or codes != [0, 0] or not outputs[0]:
            bad.append(command)
    assert verdict("11 --jobs 1 and --jobs 8 reports are byte-identical", not bad, f"failures={bad}")


def test_hopf_golden_file_is_current(tmp_path):
    from importlib import resources

    golden = resources.files("kvmodels") / "golden" / "hopf_correspondence.txt"
    out = tmp_path / "t1.txt"
    assert main(["verify-correspondence", str(corpus_dir() / "hopf_pos.pmap"), "--out", str(out)]) == 0
    assert out.read_text() == golden.read_text()
