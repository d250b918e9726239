"""Planar combinatorial maps decorated as link diagrams and 4-valent graphs.

Darts are positive ints.  Each vertex is a tuple of darts in counterclockwise
order; ``inv`` pairs darts into edges.  A 4-valent vertex is either a
*crossing* (its tuple is rotated so the over-strand darts sit at positions
0 and 2) or a *rigid vertex*.  An orientation is the set of darts whose edge
leaves the vertex at that dart.

Plane geometry enters through one datum per connected component: a dart
whose left face is the unbounded face.  From it every edge gets a signed
curvature (in full turns) by discrete Gauss-Bonnet, so rotation numbers of
anything drawn on the map are sums of curvatures and corner turns.

Sign convention for crossings: with the over-strand entering at position
``p``, the crossing is positive when the dart at ``p + 1`` (the next one
counterclockwise) is also incoming.  Equivalently the A-smoothing (which
opens the channel between the regions swept counterclockwise by the
over-strand) is the oriented smoothing of a positive crossing.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "component_diagram",
    "DiagramError",
    "Diagram",
    "SeifertDecomposition",
    "TrivalentGraph",
    "ValidationReport",
    "parse_diagram",
    "format_diagram",
    "read_diagram",
    "validate",
    "a_smoothing",
    "b_smoothing",
    "oriented_pairs",
    "seifert_decompose",
    "rotation_number",
    "writhe",
    "crossing_sign",
    "contract_thick_edges",
    "canonical_key",
]


class DiagramError(ValueError):
    """Malformed diagram input or an operation applied to the wrong kind of diagram."""

    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


Pairs = tuple[tuple[int, int], ...]


class Diagram:
    """A 4-valent planar map whose vertices are crossings or rigid vertices.

    Instances are treated as immutable; every transformation returns a new one.
    """

    __slots__ = ("verts", "crossings", "inv", "out", "loops", "loop_signs", "outer", "_kappa", "_cache")

    def __init__(
        self,
        verts: Mapping[int, Sequence[int]],
        inv: Mapping[int, int],
        *,
        crossings: Iterable[int] = (),
        out: Iterable[int] | None = None,
        loops: int = 0,
        loop_signs: Sequence[int] | None = None,
        outer: Sequence[int] = (),
        kappa: Mapping[int, Fraction] | None = None,
    ):
        self.verts = {v: tuple(ds) for v, ds in verts.items()}
        self.inv = dict(inv)
        self.crossings = frozenset(crossings)
        self.out = None if out is None else frozenset(out)
        self.loops = loops
        if loop_signs is None and out is not None and loops == 0:
            loop_signs = ()
        self.loop_signs = None if loop_signs is None else tuple(loop_signs)
        self.outer = tuple(outer)
        self._kappa = None if kappa is None else dict(kappa)
        self._cache: dict = {}

    # -- structure ---------------------------------------------------------
    @property
    def darts(self) -> list[int]:
        return sorted(self.inv)

    @property
    def oriented(self) -> bool:
        return self.out is not None

    @property
    def vertex_ids(self) -> list[int]:
        return sorted(self.verts)

    @property
    def rigid_vertices(self) -> list[int]:
        return [v for v in sorted(self.verts) if v not in self.crossings]

    def is_link(self) -> bool:
        return len(self.crossings) == len(self.verts)

    def is_graph(self) -> bool:
        return not self.crossings

    def locate(self, dart: int) -> tuple[int, int]:
        """(vertex id, position) of a dart."""
        loc = self._cache.get("loc")
        if loc is None:
            loc = {d: (v, i) for v, ds in self.verts.items() for i, d in enumerate(ds)}
            self._cache["loc"] = loc
        return loc[dart]

    def rot_next(self, dart: int) -> int:
        v, i = self.locate(dart)
        ds = self.verts[v]
        return ds[(i + 1) % len(ds)]

    def rot_prev(self, dart: int) -> int:
        v, i = self.locate(dart)
        ds = self.verts[v]
        return ds[(i - 1) % len(ds)]

    def edges(self) -> list[tuple[int, int]]:
        return sorted((d, e) for d, e in self.inv.items() if d < e)

    def is_in(self, dart: int) -> bool:
        return dart not in self.out

    def components(self) -> list[list[int]]:
        """Vertex ids of each connected component (free loops excluded)."""
        seen: set[int] = set()
        comps = []
        for v0 in sorted(self.verts):
            if v0 in seen:
                continue
            comp = []
            stack = [v0]
            seen.add(v0)
            while stack:
                v = stack.pop()
                comp.append(v)
                for d in self.verts[v]:
                    w = self.locate(self.inv[d])[0]
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def faces(self) -> list[tuple[int, ...]]:
        """Cycles of the face permutation; each dart is listed in the face on its left."""
        seen: set[int] = set()
        out = []
        for d0 in self.darts:
            if d0 in seen:
                continue
            f = []
            d = d0
            while d not in seen:
                seen.add(d)
                f.append(d)
                d = self.rot_prev(self.inv[d])
            out.append(tuple(f))
        return out

    # -- geometry ------------------------------------------------------------
    @property
    def kappa(self) -> dict[int, Fraction]:
        """Signed edge curvature (full turns) traversing each dart's edge away from its vertex."""
        if self._kappa is None:
            self._kappa = _gauss_bonnet(self)
        return self._kappa

    @property
    def has_geometry(self) -> bool:
        if self._kappa is not None or not self.verts:
            return True
        return len(self.outer) >= len(self.components())

    def outer_darts(self) -> tuple[int, ...]:
        """One dart per component whose left face is unbounded (derived from curvature if needed)."""
        if self.outer or not self.verts:
            return self.outer
        kap = self.kappa
        face_of = {}
        turning = {}
        for f in self.faces():
            t = Fraction(0)
            for d in f:
                w = self.locate(self.inv[d])[0]
                t += kap[d] + Fraction(1, 2) - Fraction(1, len(self.verts[w]))
            turning[f] = t
            for d in f:
                face_of[d] = f
        res = []
        for comp in self.components():
            cand = sorted(
                d for v in comp for d in self.verts[v] if turning[face_of[d]] == -1
            )
            if len(cand) == 0:
                raise DiagramError("component without an unbounded face; curvature data inconsistent")
            res.append(cand[0])
        return tuple(res)

    # -- derived diagrams ----------------------------------------------------
    def replace(self, **kw) -> "Diagram":
        args = dict(
            verts=self.verts,
            inv=self.inv,
            crossings=self.crossings,
            out=self.out,
            loops=self.loops,
            loop_signs=self.loop_signs,
            outer=self.outer,
            kappa=self._kappa,
        )
        args.update(kw)
        return Diagram(**args)

    def unoriented(self) -> "Diagram":
        return self.replace(out=None, loop_signs=None)

    def with_orientation(self, out: Iterable[int], loop_signs: Sequence[int] | None = None) -> "Diagram":
        out = frozenset(out)
        if loop_signs is None:
            loop_signs = (1,) * self.loops
        return self.replace(out=out, loop_signs=tuple(loop_signs))

    def as_graph(self) -> "Diagram":
        """Forget crossing data: every crossing becomes a rigid vertex."""
        return self.replace(crossings=frozenset())

    def switch(self, vid: int) -> "Diagram":
        """Exchange over and under strands at crossing ``vid``."""
        if vid not in self.crossings:
            raise DiagramError(f"vertex {vid} is not a crossing")
        ds = self.verts[vid]
        verts = dict(self.verts)
        verts[vid] = ds[1:] + ds[:1]
        return self.replace(verts=verts)

    def switch_all(self) -> "Diagram":
        d = self
        for v in sorted(self.crossings):
            d = d.switch(v)
        return d

    def make_crossing(self, vid: int, over_dart: int) -> "Diagram":
        ds = self.verts[vid]
        k = ds.index(over_dart)
        verts = dict(self.verts)
        verts[vid] = ds[k:] + ds[:k]
        return self.replace(verts=verts, crossings=self.crossings | {vid})

    def make_vertex(self, vid: int) -> "Diagram":
        return self.replace(crossings=self.crossings - {vid})

    def reverse(self) -> "Diagram":
        """Reverse every edge (and free loop) orientation."""
        if not self.oriented:
            raise DiagramError("diagram is unoriented")
        out = frozenset(self.inv[d] for d in self.out)
        return self.replace(out=out, loop_signs=tuple(-s for s in self.loop_signs))

    def smooth(self, pairings: Mapping[int, Pairs], *, keep_orientation: bool = True, extra_loops: int = 0) -> "Diagram":
        """Replace each listed vertex by arcs joining its paired darts."""
        return splice(self, pairings, keep_orientation=keep_orientation, extra_loops=extra_loops)

    def disjoint_union(self, other: "Diagram") -> "Diagram":
        shift = max(self.inv, default=0)
        vshift = max(self.verts, default=0)
        verts = dict(self.verts)
        for v, ds in other.verts.items():
            verts[v + vshift] = tuple(d + shift for d in ds)
        inv = dict(self.inv)
        inv.update({d + shift: e + shift for d, e in other.inv.items()})
        oriented = self.oriented and other.oriented
        return Diagram(
            verts,
            inv,
            crossings=set(self.crossings) | {v + vshift for v in other.crossings},
            out=(set(self.out) | {d + shift for d in other.out}) if oriented else None,
            loops=self.loops + other.loops,
            loop_signs=(self.loop_signs + other.loop_signs) if oriented else None,
            outer=self.outer_darts() + tuple(d + shift for d in other.outer_darts())
            if self.has_geometry and other.has_geometry
            else (),
        )

    def __repr__(self):
        kind = "link" if self.is_link() else "graph" if self.is_graph() else "mixed"
        return f"<Diagram {kind} V={len(self.verts)} loops={self.loops} oriented={self.oriented}>"


def component_diagram(diag: Diagram, comp: Sequence[int]) -> Diagram:
    """The sub-diagram spanned by one connected component (no free loops)."""
    verts = {v: diag.verts[v] for v in comp}
    darts = {d for ds in verts.values() for d in ds}
    inv = {d: diag.inv[d] for d in darts}
    out = None if diag.out is None else {d for d in diag.out if d in darts}
    return Diagram(
        verts,
        inv,
        crossings=diag.crossings & set(comp),
        out=out,
        loops=0,
        loop_signs=None if out is None else (),
    )


# ---------------------------------------------------------------------------
# smoothing / splicing


def splice(
    diag: Diagram,
    pairings: Mapping[int, Pairs],
    *,
    keep_orientation: bool = True,
    extra_loops: int = 0,
    new_vertices: Mapping[int, tuple[Sequence[int], int | None]] | None = None,
    delete_darts: Iterable[int] = (),
) -> Diagram:
    """Remove vertices and reconnect edges through the given dart pairings.

    ``pairings[v]`` lists dart pairs at vertex ``v``; the edges ending at a
    pair are joined into one.  ``new_vertices`` maps a fresh vertex id to
    ``(darts, over_dart_or_None)`` built from darts of removed vertices;
    those darts survive.  ``delete_darts`` vanish without being joined (the
    internal darts of a rewritten fragment).  Closed chains become free loops.
    Curvature and orientation are carried along when available.
    """
    new_vertices = dict(new_vertices or {})
    pair: dict[int, int] = {}
    removed_v = set(pairings)
    for v, prs in pairings.items():
        for x, y in prs:
            pair[x] = y
            pair[y] = x
    kept_new = {d for ds, _ in new_vertices.values() for d in ds}
    deleted = set(delete_darts)
    removed = set(pair) | deleted
    geometric = diag._kappa is not None or (diag.has_geometry and bool(diag.verts))
    kap = diag.kappa if geometric and not new_vertices and not deleted else None
    oriented = diag.oriented and keep_orientation

    verts = {v: ds for v, ds in diag.verts.items() if v not in removed_v}
    # vertices touched by delete_darts are removed wholesale by the caller through pairings
    crossings = {v for v in diag.crossings if v in verts}
    for v, (ds, over) in new_vertices.items():
        ds = tuple(ds)
        if over is not None:
            k = ds.index(over)
            ds = ds[k:] + ds[:k]
            crossings.add(v)
        verts[v] = ds

    live = {d for ds in verts.values() for d in ds}
    inv: dict[int, int] = {}
    new_kappa: dict[int, Fraction] = {}
    visited: set[int] = set()

    for e in sorted(live):
        if e in inv:
            continue
        f = diag.inv[e]
        k = kap[e] if kap is not None else None
        while f in removed and f not in kept_new:
            visited.add(f)
            if f in deleted:
                raise DiagramError("edge runs into a deleted dart")
            g = pair[f]
            visited.add(g)
            if k is not None:
                k += _arc_turn(diag, f, g) + kap[g]
            f = diag.inv[g]
        inv[e] = f
        inv[f] = e
        if k is not None:
            new_kappa[e] = k
            new_kappa[f] = -k

    loops = diag.loops
    loop_signs = list(diag.loop_signs) if oriented else None
    for x0 in sorted(set(pair)):
        if x0 in visited:
            continue
        # closed chain; orient it along the diagram orientation when present
        start = x0
        if oriented and start in diag.out:
            start = pair[start]
        turn = Fraction(0)
        x = start
        while True:
            visited.add(x)
            y = pair[x]
            visited.add(y)
            if kap is not None:
                turn += _arc_turn(diag, x, y) + kap[y]
            x = diag.inv[y]
            if x == start:
                break
        loops += 1
        if loop_signs is not None:
            # 0 marks a loop whose turning is unknown (no geometry)
            loop_signs.append(int(turn) if kap is not None else 0)
    loops += extra_loops
    if loop_signs is not None:
        if extra_loops < 0:
            del loop_signs[len(loop_signs) + extra_loops:]
        else:
            loop_signs.extend([0] * extra_loops)
    if loops < 0:
        raise DiagramError("negative free loop count")

    out = None
    if oriented:
        out = frozenset(d for d in diag.out if d in inv)
    return Diagram(
        verts,
        inv,
        crossings=crossings,
        out=out,
        loops=loops,
        loop_signs=loop_signs,
        outer=(),
        kappa=new_kappa if kap is not None else None,
    )


def a_smoothing(diag: Diagram, vid: int) -> Pairs:
    """Dart pairs of the A-smoothing at a crossing (over darts at positions 0, 2)."""
    d0, d1, d2, d3 = diag.verts[vid]
    return ((d1, d2), (d3, d0))


def b_smoothing(diag: Diagram, vid: int) -> Pairs:
    d0, d1, d2, d3 = diag.verts[vid]
    return ((d0, d1), (d2, d3))


def in_pattern(diag: Diagram, vid: int, out: frozenset | None = None) -> tuple[bool, bool, bool, bool]:
    out = diag.out if out is None else out
    return tuple(d not in out for d in diag.verts[vid])  # type: ignore[return-value]


def oriented_pairs(diag: Diagram, vid: int, out: frozenset | None = None) -> Pairs:
    """Orientation-respecting smoothing at a crossing-like vertex: each in-dart joins its adjacent out-dart."""
    ds = diag.verts[vid]
    ins = in_pattern(diag, vid, out)
    for k in range(4):
        if ins[k] and ins[(k + 1) % 4]:
            return ((ds[k], ds[(k + 3) % 4]), (ds[(k + 1) % 4], ds[(k + 2) % 4]))
    raise DiagramError(f"vertex {vid} is not crossing-like oriented")


def is_crossing_like(diag: Diagram, vid: int, out: frozenset | None = None) -> bool:
    ins = in_pattern(diag, vid, out)
    return sum(ins) == 2 and any(ins[k] and ins[(k + 1) % 4] for k in range(4))


def crossing_sign(diag: Diagram, vid: int, out: frozenset | None = None) -> int:
    """+1 / -1 for a crossing-like oriented crossing."""
    ins = in_pattern(diag, vid, out)
    if sum(ins) != 2:
        raise DiagramError(f"crossing {vid} is not balanced")
    p = 0 if ins[0] else 2
    if not ins[p] or ins[(p + 2) % 4]:
        raise DiagramError(f"crossing {vid} is alternatingly oriented")
    return 1 if ins[(p + 1) % 4] else -1


def writhe(diag: Diagram) -> int:
    if not diag.oriented:
        raise DiagramError("writhe needs an oriented diagram")
    return sum(crossing_sign(diag, v) for v in diag.crossings)


# ---------------------------------------------------------------------------
# geometry


def _corner(diag: Diagram, dart: int) -> Fraction:
    # turn (full turns) at the far end of dart's edge, keeping the face on the left
    w = diag.locate(diag.inv[dart])[0]
    return Fraction(1, 2) - Fraction(1, len(diag.verts[w]))


def _gauss_bonnet(diag: Diagram) -> dict[int, Fraction]:
    comps = diag.components()
    if not comps:
        return {}
    if len(diag.outer) < len(comps):
        raise DiagramError("every connected component needs an outer-face dart")
    faces = diag.faces()
    face_of = {d: i for i, f in enumerate(faces) for d in f}
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            for d in diag.verts[v]:
                comp_of[d] = ci
    outer_face = {}
    for d in diag.outer:
        if d not in diag.inv:
            raise DiagramError(f"outer dart {d} does not exist")
        ci = comp_of[d]
        if ci in outer_face:
            raise DiagramError(f"two outer darts given for one component ({d})")
        outer_face[ci] = face_of[d]
    kap: dict[int, Fraction] = {}
    for ci, comp in enumerate(comps):
        root = outer_face[ci]
        parent_dart: dict[int, int] = {}
        order = [root]
        seen = {root}
        q = deque([root])
        while q:
            f = q.popleft()
            for d in faces[f]:
                g = face_of[diag.inv[d]]
                if g not in seen:
                    seen.add(g)
                    parent_dart[g] = diag.inv[d]  # dart of g whose partner lies in f
                    order.append(g)
                    q.append(g)
        tree = set(parent_dart.values()) | {diag.inv[d] for d in parent_dart.values()}
        for f in reversed(order[1:]):
            d = parent_dart[f]
            total = Fraction(1)
            for x in faces[f]:
                total -= _corner(diag, x)
                if x != d:
                    total -= kap.get(x, Fraction(0)) if x in tree else 0
            kap[d] = total
            kap[diag.inv[d]] = -total
        for f in order:
            for x in faces[f]:
                kap.setdefault(x, Fraction(0))
    return kap


def rotation_number(diag: Diagram, arcs: Mapping[int, Pairs] | None = None) -> int:
    """Rotation number of an oriented diagram or graph.

    Curves pass straight through vertices.  ``arcs`` optionally smooths
    sites (each pair joins an in-dart to an out-dart); this does not change
    the answer for orientation-respecting smoothings but is what
    :func:`seifert_decompose` uses.
    """
    if not diag.oriented:
        raise DiagramError("rotation number needs an oriented diagram")
    if 0 in diag.loop_signs:
        raise DiagramError("a free loop has unknown turning; geometry was lost")
    kap = diag.kappa
    total = Fraction(sum(diag.loop_signs))
    for d in diag.out:
        total += kap[d]
    for v, prs in (arcs or {}).items():
        for x, y in prs:
            if diag.is_in(x) == diag.is_in(y):
                raise DiagramError(f"arc ({x} {y}) at {v} does not respect orientation")
            if not diag.is_in(x):
                x, y = y, x
            total += _arc_turn(diag, x, y)
    if total.denominator != 1:
        raise DiagramError(f"non-integral rotation {total}; geometry inconsistent")
    return int(total)


def _arc_turn(diag: Diagram, x_in: int, y_out: int) -> Fraction:
    v, i = diag.locate(x_in)
    _, j = diag.locate(y_out)
    n = len(diag.verts[v])
    return Fraction((j - i) % n, n) - Fraction(1, 2)


@dataclass(frozen=True)
class SeifertDecomposition:
    circles: tuple[tuple[int, ...], ...]  # out-darts along each circle; free loops are ()
    signs: tuple[int, ...]

    @property
    def rotation(self) -> int:
        return sum(self.signs)


def seifert_decompose(diag: Diagram) -> SeifertDecomposition:
    if not diag.oriented:
        raise DiagramError("Seifert circles need an oriented diagram")
    arcs = {}
    nxt = {}
    for v in diag.verts:
        prs = oriented_pairs(diag, v)
        arcs[v] = prs
        for x, y in prs:
            nxt[x] = y  # x is the in-dart
    kap = diag.kappa
    seen: set[int] = set()
    circles, signs = [], []
    for d0 in sorted(diag.out):
        if d0 in seen:
            continue
        circ = []
        turn = Fraction(0)
        d = d0
        while d not in seen:
            seen.add(d)
            circ.append(d)
            x = diag.inv[d]
            y = nxt[x]
            turn += kap[d] + _arc_turn(diag, x, y)
            d = y
        if turn not in (1, -1):
            raise DiagramError(f"Seifert circle with turning {turn}")
        circles.append(tuple(circ))
        signs.append(int(turn))
    for s in diag.loop_signs:
        circles.append(())
        signs.append(s)
    return SeifertDecomposition(tuple(circles), tuple(signs))


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)
    V: int = 0
    E: int = 0
    F: int = 0
    C: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.ok


def validate(diag, valence: int | None = 4) -> ValidationReport:
    """Check involution, valence, Euler characteristic and the decorations."""
    rep = ValidationReport()
    inv = diag.inv
    for d, e in inv.items():
        if d == e:
            rep.problems.append(f"involution fixes dart {d}")
        elif inv.get(e) != d:
            rep.problems.append(f"involution not symmetric at {d}")
    seen: dict[int, int] = {}
    for v, ds in diag.verts.items():
        if valence is not None and len(ds) != valence:
            rep.problems.append(f"vertex {v} has valence {len(ds)}, expected {valence}")
        for d in ds:
            if d in seen:
                rep.problems.append(f"dart {d} at two vertices")
            seen[d] = v
    if set(seen) != set(inv):
        rep.problems.append("darts in rotation and involution differ")
    if rep.problems:
        return rep
    rep.V = len(diag.verts)
    rep.E = len(inv) // 2
    traced = len(diag.faces())
    comps = diag.components()
    rep.C = len(comps)
    rep.F = traced - rep.C + 1 if rep.C else 1
    if rep.V - rep.E + traced != 2 * rep.C:
        rep.problems.append(f"Euler check failed: V-E+F={rep.V - rep.E + rep.F}, expected {1 + rep.C}")
    if diag.outer:
        comp_of = {d: i for i, c in enumerate(comps) for v in c for d in diag.verts[v]}
        hit = set()
        for d in diag.outer:
            if d not in comp_of:
                rep.problems.append(f"outer dart {d} does not exist")
            else:
                hit.add(comp_of[d])
        if len(hit) != len(comps) or len(diag.outer) != len(comps):
            rep.problems.append("need exactly one outer dart per component")
    if isinstance(diag, Diagram) and diag.oriented:
        for d in inv:
            if (d in diag.out) == (inv[d] in diag.out):
                rep.problems.append(f"edge ({d} {inv[d]}) has no consistent direction")
                break
        else:
            for v in diag.verts:
                if not is_crossing_like(diag, v):
                    rep.problems.append(f"vertex {v} is not crossing-like oriented")
        if len(diag.loop_signs) != diag.loops:
            rep.problems.append("loop orientation count differs from free loop count")
    if isinstance(diag, TrivalentGraph):
        for v, ds in diag.verts.items():
            k = sum(1 for d in ds if diag.edge_key(d) in diag.thick)
            if k != 1:
                rep.problems.append(f"vertex {v} has {k} thick edges")
    return rep


# ---------------------------------------------------------------------------
# canonical keys


def _dart_tag(diag: Diagram, d: int, oriented: bool) -> int:
    v, i = diag.locate(d)
    if v in diag.crossings:
        t = 1 if i % 2 == 0 else 2
    else:
        t = 3
    if oriented and d in diag.out:
        t += 4
    return t


def canonical_key(diag: Diagram, oriented: bool | None = None):
    """Isomorphism-invariant key (orientation-preserving on the sphere)."""
    if oriented is None:
        oriented = diag.oriented
    ck = diag._cache.get(("ckey", oriented))
    if ck is not None:
        return ck
    codes = []
    for comp in diag.components():
        darts = [d for v in comp for d in diag.verts[v]]
        tags = {d: _dart_tag(diag, d, oriented) for d in darts}
        tmin = min(tags.values())
        best = None
        for s in darts:
            if tags[s] != tmin:
                continue
            code = _code_from(diag, s, tags, best)
            if code is not None and (best is None or code < best):
                best = code
        codes.append(best)
    codes.sort()
    ls = tuple(sorted(diag.loop_signs)) if oriented and diag.loop_signs is not None else diag.loops
    key = (tuple(codes), ls)
    diag._cache[("ckey", oriented)] = key
    return key


def _code_from(diag: Diagram, start: int, tags, bound):
    label = {start: 0}
    order = [start]
    code = []
    tied = bound is not None
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        r, e = diag.rot_next(d), diag.inv[d]
        for x in (r, e):
            if x not in label:
                label[x] = len(order)
                order.append(x)
        item = (label[r], label[e], tags[d])
        if tied:
            b = bound[len(code)]
            if item > b:
                return None
            if item < b:
                tied = False
        code.append(item)
    return tuple(code)


# ---------------------------------------------------------------------------
# trivalent classic graphs


class TrivalentGraph:
    """Trivalent plane graph with thick and common edges and an orientation."""

    def __init__(self, verts, inv, thick: Iterable[tuple[int, int]], out=None, loops=0, loop_signs=None, outer=()):
        self.verts = {v: tuple(ds) for v, ds in verts.items()}
        self.inv = dict(inv)
        self.thick = frozenset(tuple(sorted(e)) for e in thick)
        self.out = None if out is None else frozenset(out)
        self.loops = loops
        self.loop_signs = None if loop_signs is None else tuple(loop_signs)
        self.outer = tuple(outer)
        self._loc = {d: (v, i) for v, ds in self.verts.items() for i, d in enumerate(ds)}

    def edge_key(self, d: int) -> tuple[int, int]:
        return tuple(sorted((d, self.inv[d])))  # type: ignore[return-value]

    def locate(self, d):
        return self._loc[d]

    def rot_prev(self, d):
        v, i = self._loc[d]
        ds = self.verts[v]
        return ds[(i - 1) % len(ds)]

    @property
    def darts(self):
        return sorted(self.inv)

    def faces(self):
        seen, out = set(), []
        for d0 in self.darts:
            if d0 in seen:
                continue
            f, d = [], d0
            while d not in seen:
                seen.add(d)
                f.append(d)
                d = self.rot_prev(self.inv[d])
            out.append(tuple(f))
        return out

    def components(self):
        seen, comps = set(), []
        for v0 in sorted(self.verts):
            if v0 in seen:
                continue
            comp, stack = [], [v0]
            seen.add(v0)
            while stack:
                v = stack.pop()
                comp.append(v)
                for d in self.verts[v]:
                    w = self._loc[self.inv[d]][0]
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps


def contract_thick_edges(g: TrivalentGraph) -> Diagram:
    """Merge the endpoints of every thick edge into one 4-valent rigid vertex."""
    rep = validate(g, valence=3)
    if not rep.ok:
        raise DiagramError("; ".join(rep.problems))
    verts = {}
    removed = set()
    for t1, t2 in sorted(g.thick):
        u, i = g.locate(t1)
        w, j = g.locate(t2)
        if u == w:
            raise DiagramError("thick edge is a loop")
        du, dw = g.verts[u], g.verts[w]
        merged = tuple(du[(i + k) % 3] for k in (1, 2)) + tuple(dw[(j + k) % 3] for k in (1, 2))
        verts[min(u, w)] = merged
        removed |= {t1, t2}
    inv = {d: e for d, e in g.inv.items() if d not in removed}
    out = None if g.out is None else frozenset(d for d in g.out if d not in removed)
    return Diagram(verts, inv, out=out, loops=g.loops, loop_signs=g.loop_signs)


# ---------------------------------------------------------------------------
# text format


_CYCLE = re.compile(r"\(([^()]*)\)")


def _cycles(body: str, line: int) -> list[tuple[int, ...]]:
    stripped = _CYCLE.sub("", body).strip()
    if stripped:
        raise DiagramError(f"unexpected text {stripped!r}", line)
    try:
        return [tuple(int(x) for x in m.split()) for m in _CYCLE.findall(body)]
    except ValueError as exc:
        raise DiagramError(f"bad dart identifier ({exc})", line) from None


def parse_diagram(text: str):
    """Parse the line-oriented ``pmap`` format into a Diagram or TrivalentGraph."""
    header = None
    fields: dict[str, tuple[str, int]] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] != "pmap":
                raise DiagramError("expected 'pmap <#darts> <#free_loops>'", ln)
            try:
                header = (int(parts[1]), int(parts[2]), ln)
            except ValueError:
                raise DiagramError("header counts must be integers", ln) from None
            continue
        if ":" not in line:
            raise DiagramError(f"expected 'key: value', got {line!r}", ln)
        key, body = line.split(":", 1)
        key = key.strip()
        if key not in ("vrot", "einv", "outer", "over", "orient", "ekind", "louts"):
            raise DiagramError(f"unknown field {key!r}", ln)
        if key in fields:
            raise DiagramError(f"duplicate field {key!r}", ln)
        fields[key] = (body.strip(), ln)
    if header is None:
        raise DiagramError("empty diagram file")
    ndarts, nloops, hline = header

    vrot = _cycles(*fields["vrot"]) if "vrot" in fields else []
    pairs = _cycles(*fields["einv"]) if "einv" in fields else []
    verts = {i + 1: c for i, c in enumerate(vrot)}
    inv = {}
    for p in pairs:
        if len(p) != 2:
            raise DiagramError(f"edge {p} must pair exactly two darts", fields["einv"][1])
        a, b = p
        if a == b:
            raise DiagramError(f"involution fixes dart {a}", fields["einv"][1])
        if a in inv or b in inv:
            raise DiagramError(f"dart in two edges: {p}", fields["einv"][1])
        inv[a] = b
        inv[b] = a
    all_darts = [d for c in vrot for d in c]
    if len(all_darts) != ndarts or len(set(all_darts)) != ndarts:
        raise DiagramError(f"header says {ndarts} darts, vrot lists {len(all_darts)}", hline)
    if any(d <= 0 for d in all_darts):
        raise DiagramError("dart identifiers must be positive", fields["vrot"][1])
    if set(inv) != set(all_darts):
        raise DiagramError("einv does not pair exactly the darts of vrot", fields.get("einv", ("", hline))[1])
    outer = ()
    if "outer" in fields:
        body, ln = fields["outer"]
        try:
            outer = tuple(int(x) for x in body.split())
        except ValueError:
            raise DiagramError("outer darts must be integers", ln) from None
    out = None
    if "orient" in fields:
        body, ln = fields["orient"]
        out = set()
        marks = {}
        for tok in body.split():
            m = re.fullmatch(r"(\d+)([+-])", tok)
            if not m:
                raise DiagramError(f"bad orientation mark {tok!r}", ln)
            marks[int(m.group(1))] = m.group(2)
        for d in all_darts:
            if d not in marks:
                if inv[d] in marks:
                    marks[d] = "-" if marks[inv[d]] == "+" else "+"
                else:
                    raise DiagramError(f"no orientation for dart {d}", ln)
        out = {d for d, s in marks.items() if s == "+"}
    loop_signs = None
    if "louts" in fields:
        body, ln = fields["louts"]
        toks = body.split()
        if any(t not in "+-" or len(t) != 1 for t in toks) or len(toks) != nloops:
            raise DiagramError("louts needs one +/- per free loop", ln)
        loop_signs = tuple(1 if t == "+" else -1 for t in toks)
    if out is not None and loop_signs is None:
        loop_signs = (1,) * nloops

    if "ekind" in fields:
        body, ln = fields["ekind"]
        thick = []
        for tok in body.split():
            m = re.fullmatch(r"(\d+):(thick|common)", tok)
            if not m:
                raise DiagramError(f"bad edge kind {tok!r}", ln)
            d = int(m.group(1))
            if d not in inv:
                raise DiagramError(f"edge kind for unknown dart {d}", ln)
            if m.group(2) == "thick":
                thick.append((d, inv[d]))
        return TrivalentGraph(verts, inv, thick, out=out, loops=nloops, loop_signs=loop_signs, outer=outer)

    crossings = set()
    if "over" in fields:
        body, ln = fields["over"]
        for tok in body.split():
            m = re.fullmatch(r"(\d+):(\d+)", tok)
            if not m:
                raise DiagramError(f"bad over mark {tok!r}", ln)
            v, d = int(m.group(1)), int(m.group(2))
            if v not in verts or d not in verts[v]:
                raise DiagramError(f"dart {d} is not at vertex {v}", ln)
            if len(verts[v]) != 4:
                raise DiagramError(f"crossing {v} is not 4-valent", ln)
            k = verts[v].index(d)
            verts[v] = verts[v][k:] + verts[v][:k]
            crossings.add(v)
    return Diagram(verts, inv, crossings=crossings, out=out, loops=nloops, loop_signs=loop_signs, outer=outer)


def read_diagram(path):
    with open(path, encoding="utf-8") as fh:
        return parse_diagram(fh.read())


def format_diagram(diag, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    vids = sorted(diag.verts)
    renum = {v: i + 1 for i, v in enumerate(vids)}
    lines.append(f"pmap {len(diag.inv)} {diag.loops}")
    lines.append("vrot: " + "".join("(" + " ".join(map(str, diag.verts[v])) + ")" for v in vids))
    lines.append("einv: " + "".join(f"({a} {b})" for a, b in sorted((d, e) for d, e in diag.inv.items() if d < e)))
    outer = diag.outer_darts() if isinstance(diag, Diagram) else diag.outer
    if outer:
        lines.append("outer: " + " ".join(map(str, outer)))
    if isinstance(diag, Diagram) and diag.crossings:
        lines.append("over: " + " ".join(f"{renum[v]}:{diag.verts[v][0]}" for v in vids if v in diag.crossings))
    if diag.out is not None and diag.inv:
        lines.append("orient: " + " ".join(f"{d}{'+' if d in diag.out else '-'}" for d in sorted(diag.inv)))
    if isinstance(diag, TrivalentGraph):
        lines.append(
            "ekind: "
            + " ".join(f"{a}:{'thick' if (a, b) in diag.thick else 'common'}" for a, b in sorted(
                (d, e) for d, e in diag.inv.items() if d < e))
        )
    if diag.loop_signs is not None and diag.loops:
        lines.append("louts: " + " ".join("+" if s > 0 else "-" for s in diag.loop_signs))
    return "\n".join(lines) + "\n"
