"""Standard diagrams built as braid closures, plus the bundled corpus files."""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path
from typing import Sequence

from .diagrams import Diagram, format_diagram, read_diagram

__all__ = [
    "braid_closure",
    "build_corpus",
    "corpus_dir",
    "corpus_names",
    "load",
    "CORPUS_BRAIDS",
    "random_braid_closure",
    "unknot",
    "unlink",
    "write_corpus",
]


def braid_closure(word: Sequence[int], strands: int) -> Diagram:
    """Oriented closure of a braid word (``+i`` = positive sigma_i, ``-i`` its inverse).

    Strands run upward and the closing arcs pass to the right, so each
    crossing-free strand closes into a clockwise free loop.  Darts of the
    k-th crossing are ``4k+1 .. 4k+4`` (SW, SE, NE, NW counterclockwise).
    """
    if strands < 1:
        raise ValueError("need at least one strand")
    verts: dict[int, tuple[int, ...]] = {}
    crossings = []
    inv: dict[int, int] = {}
    out = set()
    top: list[int | None] = [None] * (strands + 1)
    bottom: list[int | None] = [None] * (strands + 1)
    leftmost: dict[int, tuple[int, int]] = {}  # vertex -> (position, NW dart)
    for k, g in enumerate(word):
        i = abs(g)
        if not 1 <= i < strands or g == 0:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        sw, se, ne, nw = 4 * k + 1, 4 * k + 2, 4 * k + 3, 4 * k + 4
        vid = k + 1
        verts[vid] = (sw, se, ne, nw) if g > 0 else (se, ne, nw, sw)
        crossings.append(vid)
        out |= {ne, nw}
        for pos, d in ((i, sw), (i + 1, se)):
            if top[pos] is None:
                bottom[pos] = d
            else:
                inv[top[pos]] = d
                inv[d] = top[pos]
        top[i], top[i + 1] = nw, ne
        leftmost[vid] = (i, nw)
    loops = 0
    for p in range(1, strands + 1):
        if top[p] is None:
            loops += 1
        else:
            inv[top[p]] = bottom[p]
            inv[bottom[p]] = top[p]
    d = Diagram(verts, inv, crossings=crossings, out=out, loops=loops, loop_signs=(-1,) * loops)
    outer = []
    for comp in d.components():
        pos, nw = min(leftmost[v] for v in comp)
        outer.append(nw)
    return d.replace(outer=tuple(outer))


def unknot() -> Diagram:
    return Diagram({}, {}, out=(), loops=1, loop_signs=(1,))


def unlink(k: int) -> Diagram:
    return Diagram({}, {}, out=(), loops=k, loop_signs=(1,) * k)


# name -> (braid word, strands)
CORPUS_BRAIDS: dict[str, tuple[tuple[int, ...], int]] = {
    "unknot1": ((1,), 2),
    "hopf_pos": ((1, 1), 2),
    "hopf_neg": ((-1, -1), 2),
    "trefoil_pos": ((1, 1, 1), 2),
    "trefoil_neg": ((-1, -1, -1), 2),
    "figure8": ((1, -2, 1, -2), 3),
    "borromean": ((1, -2, 1, -2, 1, -2), 3),
}


def build_corpus() -> dict[str, tuple[Diagram, str]]:
    """Every bundled diagram with its header comment, keyed by file stem."""
    from .kv import expand_d

    out: dict[str, tuple[Diagram, str]] = {
        "unknot0": (unknot().unoriented(), "crossingless unknot"),
        "unlink2": (unlink(2).unoriented(), "two-component unlink, no crossings"),
    }
    for name, (word, strands) in CORPUS_BRAIDS.items():
        out[name] = (braid_closure(word, strands), f"closure of braid word {list(word)} on {strands} strands")
    hopf = braid_closure(*CORPUS_BRAIDS["hopf_pos"]).unoriented()
    for st in expand_d(hopf):
        tag = "".join(c for _, c in st.record)
        out[f"hopf_graph_{tag}"] = (
            st.graph,
            f"Hopf link with crossing choices {tag} (A/B smoothing, V vertex)",
        )
    # two three-vertex graphs
    for name, word, pick in (("trefoil", "trefoil_pos", "VVV"), ("figure8", "figure8", "VVVA")):
        link = braid_closure(*CORPUS_BRAIDS[word]).unoriented()
        st = next(s for s in expand_d(link) if "".join(c for _, c in s.record) == pick)
        out[f"{name}_graph_{pick}"] = (st.graph, f"{name} with crossing choices {pick} (A/B smoothing, V vertex)")
    return out


def write_corpus(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, (diag, comment) in build_corpus().items():
        path = directory / f"{name}.pmap"
        path.write_text(format_diagram(diag, comment), encoding="utf-8")
        paths.append(path)
    return paths


def corpus_names() -> list[str]:
    return sorted(p.stem for p in corpus_dir().glob("*.pmap"))


def corpus_dir() -> Path:
    return Path(str(resources.files(__package__) / "corpus"))


def load(name: str) -> Diagram:
    return read_diagram(corpus_dir() / f"{name}.pmap")


def random_braid_closure(rng: random.Random, max_crossings: int = 4, max_strands: int = 3) -> Diagram:
    n = rng.randint(2, max_strands)
    length = rng.randint(1, max_crossings)
    word = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(length)]
    return braid_closure(word, n)
