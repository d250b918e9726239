from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kvmodels.corpus import braid_closure, build_corpus, corpus_dir, corpus_names, load, unknot, unlink
from kvmodels.diagrams import (
    Diagram,
    DiagramError,
    TrivalentGraph,
    canonical_key,
    contract_thick_edges,
    format_diagram,
    parse_diagram,
    rotation_number,
    seifert_decompose,
    validate,
    writhe,
)
from kvmodels.kv import expand_r


def _curves(d: Diagram) -> list[set[int]]:
    """Link components as dart sets, traced straight through every crossing."""
    seen: set[int] = set()
    out = []
    for start in sorted(d.inv):
        if start in seen:
            continue
        comp = set()
        x = start
        while x not in comp:
            comp.add(x)
            y = d.inv[x]
            comp.add(y)
            v, i = d.locate(y)
            x = d.verts[v][(i + 2) % 4]
        seen |= comp
        out.append(comp)
    return out


def _reverse_curves(d: Diagram, curves) -> Diagram:
    out = set(d.out)
    for c in curves:
        out ^= c
    return d.with_orientation(out, d.loop_signs)


# -- validation -------------------------------------------------------------


def test_free_loop_is_valid():
    rep = validate(unknot())
    assert rep.ok


def test_hopf_euler_counts():
    rep = validate(braid_closure((1, 1), 2))
    assert rep.ok
    assert (rep.V, rep.E, rep.F, rep.C) == (2, 4, 4, 1)


def test_fixed_dart_reported():
    text = "pmap 4 0\nvrot: (1 2 3 4)\neinv: (1 1)(2 3)(4 4)\n"
    with pytest.raises(DiagramError, match="involution fixes dart"):
        parse_diagram(text)


def test_every_corpus_file_validates():
    for name in corpus_names():
        d = load(name)
        assert validate(d).ok, name


def test_corpus_files_match_builder():
    built = build_corpus()
    assert sorted(built) == corpus_names()
    for name, (diag, comment) in built.items():
        text = (corpus_dir() / f"{name}.pmap").read_text()
        assert text == format_diagram(diag, comment)
        assert format_diagram(parse_diagram(text), comment) == text


def test_parse_errors_carry_line_numbers():
    bad = "pmap 8 0\nvrot: (1 2 3 4)(5 6 7 8)\neinv: (1 8)(2 7)(3 6)(4 9)\n"
    with pytest.raises(DiagramError) as info:
        parse_diagram(bad)
    assert info.value.line is not None or "line" in str(info.value)
    with pytest.raises(DiagramError):
        parse_diagram("graph 3 0\n")


# -- writhe and Seifert circles ------------------------------------------


def test_writhe_examples():
    assert writhe(unknot()) == 0
    assert writhe(braid_closure((1, 1), 2)) == 2
    assert writhe(braid_closure((-1, -1), 2)) == -2


def test_unknot_circle_signs():
    ccw = seifert_decompose(unknot())
    assert ccw.signs == (1,)
    cw = seifert_decompose(unknot().reverse())
    assert cw.signs == (-1,)


def test_unlink_rotation_is_additive():
    for k in range(1, 4):
        assert rotation_number(unlink(k)) == k


def test_hopf_orientations():
    hopf = braid_closure((1, 1), 2)
    dec = seifert_decompose(hopf)
    assert len(dec.circles) == 2 and dec.signs == (-1, -1)
    curves = _curves(hopf)
    assert len(curves) == 2
    got = sorted(rotation_number(_reverse_curves(hopf, s)) for s in ([], curves[:1], curves[1:], curves))
    assert got == [-2, 0, 0, 2]


def test_rotation_refuses_unknown_loop_direction():
    d = Diagram({}, {}, out=(), loops=1, loop_signs=(0,))
    with pytest.raises(DiagramError):
        rotation_number(d)


def test_graph_rotation_equals_refinement():
    for word, n in (((1, 1), 2), ((1, 1, 1), 2), ((1, -2, 1, -2), 3)):
        for stt in expand_r(braid_closure(word, n)):
            g = stt.graph
            refined = g
            for v in sorted(g.verts):
                refined = refined.make_crossing(v, g.verts[v][0])
            assert rotation_number(g) == rotation_number(refined)


# -- classic graphs -------------------------------------------------------


def test_contract_theta_like():
    # one thick edge (5 6); common edges 1-4 and 2-3 double back
    g = TrivalentGraph({1: (1, 2, 5), 2: (6, 3, 4)}, {1: 4, 4: 1, 2: 3, 3: 2, 5: 6, 6: 5}, [(5, 6)])
    assert validate(g, valence=3).ok
    f = contract_thick_edges(g)
    assert len(f.verts) == 1 and f.loops == 0


def test_contract_free_loop():
    g = TrivalentGraph({}, {}, [], loops=1)
    f = contract_thick_edges(g)
    assert not f.verts and f.loops == 1


def test_two_thick_edges_at_a_vertex_rejected():
    g = TrivalentGraph({1: (1, 2, 3), 2: (4, 5, 6)}, {1: 4, 4: 1, 2: 6, 6: 2, 3: 5, 5: 3}, [(1, 4), (3, 5)])
    assert not validate(g, valence=3).ok


# -- properties -----------------------------------------------------------

words = st.integers(2, 3).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(1, n - 1), st.sampled_from([1, -1])), min_size=1, max_size=3),
    )
)


@given(words, st.data())
@settings(max_examples=40, deadline=None)
def test_rotation_of_pure_closures(w, data):
    n, gens = w
    word = tuple(s * i for i, s in gens for _ in range(2))  # squares keep every strand closed on itself
    d = braid_closure(word, n)
    curves = _curves(d)
    # a crossing-free strand is a free loop, not a traced curve
    assert len(curves) + d.loops == n
    flips = data.draw(st.lists(st.booleans(), min_size=len(curves), max_size=len(curves)))
    chosen = [c for c, f in zip(curves, flips) if f]
    assert rotation_number(d) == -n
    assert rotation_number(_reverse_curves(d, chosen)) == -n + 2 * len(chosen)


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(1, n - 1).flatmap(lambda i: st.sampled_from([i, -i])), min_size=1, max_size=5))))
@settings(max_examples=40, deadline=None)
def test_rotation_negates_and_circles_match(w):
    n, word = w
    d = braid_closure(tuple(word), n)
    assert rotation_number(d.reverse()) == -rotation_number(d)
    dec = seifert_decompose(d)
    assert len(dec.circles) == n  # one circle per braid strand
    assert dec.rotation == rotation_number(d)
    assert validate(d).ok


@given(st.integers(0, 3), st.integers(0, 3))
def test_rotation_additive_over_unions(k, m):
    d = braid_closure((1, 1), 2).disjoint_union(unlink(k)).disjoint_union(unlink(m).reverse() if m else unlink(0))
    assert rotation_number(d) == -2 + k - m


def test_canonical_key_ignores_labels():
    a = braid_closure((1, 1, 1), 2)
    b = braid_closure((1, 1, 1), 2)
    shift = {d: d + 100 for d in b.inv}
    relabelled = Diagram(
        {v + 10: tuple(shift[d] for d in ds) for v, ds in b.verts.items()},
        {shift[d]: shift[e] for d, e in b.inv.items()},
        crossings={v + 10 for v in b.crossings},
        out={shift[d] for d in b.out},
    )
    assert canonical_key(a) == canonical_key(relabelled)
    assert canonical_key(a) != canonical_key(braid_closure((-1, -1, -1), 2))
