"""Rotation systems, face tracing, genus, and the atomic surgery operations.

An embedding of a (multi)graph in an orientable surface is stored as a
rotation system: every vertex carries a cyclic sequence of the darts that
leave it.  Faces are recovered by the tracing rule fixed once for the whole
library:

    from dart d, the next dart of the face is the successor of reverse(d)
    in the rotation at head(d).

Swapping successor for predecessor would yield the mirror surface; the
choice made here is validated end-to-end by the fixtures in the test suite.

Vertices are ints (numbered residues, anonymous current-graph vertices) or
strings (lettered vertices such as 'a' or 'y0').  A dart is a pair
``(edge, side)`` where ``edge = (u, v, k)`` has its endpoints in canonical
order and ``k`` separates parallel edges; side 0 leaves ``u``, side 1
leaves ``v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

Vertex = int | str
EdgeId = tuple  # (u, v, k)
Dart = tuple    # (EdgeId, side)


class StructuralError(Exception):
    """The rotation system violates a structural invariant."""


class FlipError(Exception):
    """An edge flip's preconditions do not hold."""


class SurgeryError(Exception):
    """A chord/bridge/contraction precondition does not hold."""


class NonterminationError(Exception):
    """A flip cascade failed to terminate within the edge-count bound."""


class InconsistencyError(Exception):
    """Counts do not describe a closed orientable surface."""


def vertex_key(v: Vertex):
    """Sort key placing numbered vertices first, then lettered ones."""
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, v)


def make_edge(u: Vertex, v: Vertex, k: int = 0) -> EdgeId:
    if vertex_key(u) <= vertex_key(v):
        return (u, v, k)
    return (v, u, k)


def dart(edge: EdgeId, tail: Vertex) -> Dart:
    if edge[0] == tail:
        return (edge, 0)
    if edge[1] == tail:
        return (edge, 1)
    raise ValueError(f"vertex {tail!r} is not an endpoint of {edge!r}")


def reverse(d: Dart) -> Dart:
    return (d[0], 1 - d[1])


def tail(d: Dart) -> Vertex:
    return d[0][d[1]]


def head(d: Dart) -> Vertex:
    return d[0][1 - d[1]]


def dart_key(d: Dart):
    e, side = d
    return (vertex_key(e[0]), vertex_key(e[1]), e[2], side)


class Face:
    """One traced face: a cyclic walk of darts, canonically rotated."""

    __slots__ = ("darts",)

    def __init__(self, darts: Sequence[Dart]):
        ds = list(darts)
        i = min(range(len(ds)), key=lambda k: dart_key(ds[k]))
        self.darts: tuple = tuple(ds[i:] + ds[:i])

    def __len__(self) -> int:
        return len(self.darts)

    def __eq__(self, other) -> bool:
        return isinstance(other, Face) and self.darts == other.darts

    def __hash__(self) -> int:
        return hash(self.darts)

    def __repr__(self) -> str:
        return f"Face{self.corner_vertices()}"

    def corner_vertices(self) -> tuple:
        """Vertex visited at each walk position (tail of each dart)."""
        return tuple(tail(d) for d in self.darts)

    def corners(self) -> tuple:
        return tuple((tail(d), i) for i, d in enumerate(self.darts))

    def positions_of(self, v: Vertex) -> list:
        return [i for i, d in enumerate(self.darts) if tail(d) == v]

    def position_of(self, v: Vertex) -> int:
        ps = self.positions_of(v)
        if len(ps) != 1:
            raise SurgeryError(
                f"vertex {v!r} occurs {len(ps)} times on face {self!r}; "
                "address the corner by position")
        return ps[0]

    def is_triangle(self) -> bool:
        return len(self.darts) == 3


@dataclass(frozen=True)
class GenusReport:
    V: int
    E: int
    F: int
    genus: int
    triangular: bool
    simple: bool
    target_genus: int | None = None

    def __str__(self) -> str:
        extra = "" if self.target_genus is None else f" target={self.target_genus}"
        return (f"V={self.V} E={self.E} F={self.F} genus={self.genus}"
                f" triangular={self.triangular} simple={self.simple}{extra}")


def complete_graph_genus(n: int) -> int:
    """Genus of the complete graph on n vertices, ceil((n-3)(n-4)/12)."""
    if n < 3:
        raise ValueError(f"complete_graph_genus requires n >= 3, got {n}")
    return -((n - 3) * (n - 4) // -12)


class EmbeddedGraph:
    """Immutable rotation system.  Surgery operations return new graphs."""

    __slots__ = ("rotations",)

    def __init__(self, rotations: Mapping[Vertex, Sequence[Dart]], check: bool = True):
        object.__setattr__(self, "rotations",
                           {v: tuple(r) for v, r in rotations.items()})
        if check:
            self._check()

    def __setattr__(self, name, value):
        raise AttributeError("EmbeddedGraph is immutable")

    def _check(self) -> None:
        seen: dict = {}
        for v, rot in self.rotations.items():
            for d in rot:
                if tail(d) != v:
                    raise StructuralError(f"dart {d!r} listed at {v!r} but its tail is {tail(d)!r}")
                if d in seen:
                    raise StructuralError(f"dart {d!r} appears more than once")
                seen[d] = v
        for d in seen:
            r = reverse(d)
            if r not in seen:
                raise StructuralError(f"dart {d!r} has no reverse {r!r}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_neighbors(cls, neighbors: Mapping[Vertex, Sequence[Vertex]],
                       check: bool = True) -> "EmbeddedGraph":
        """Build from neighbor lists; the i-th occurrence of v at u pairs with
        the i-th occurrence of u at v.  Loops are not supported here."""
        counts: dict = {}
        rotations: dict = {}
        for u, nbrs in neighbors.items():
            rot = []
            for v in nbrs:
                if u == v:
                    raise StructuralError(f"loop at {u!r} not supported in neighbor form")
                key = (u, v) if vertex_key(u) <= vertex_key(v) else (v, u)
                k = counts.get((u, v), 0)
                counts[(u, v)] = k + 1
                rot.append(dart(make_edge(*key, k), u))
            rotations[u] = rot
        for (u, v), n in counts.items():
            if counts.get((v, u), 0) != n:
                raise StructuralError(
                    f"edge multiplicity mismatch between {u!r} and {v!r}")
        return cls(rotations, check=check)

    # -- basic queries --------------------------------------------------------

    @property
    def vertices(self) -> list:
        return sorted(self.rotations, key=vertex_key)

    def darts(self) -> Iterator[Dart]:
        for v in self.rotations:
            yield from self.rotations[v]

    def edges(self) -> list:
        return sorted({d[0] for d in self.darts()})

    @property
    def num_vertices(self) -> int:
        return len(self.rotations)

    @property
    def num_edges(self) -> int:
        return sum(len(r) for r in self.rotations.values()) // 2

    def degree(self, v: Vertex) -> int:
        return len(self.rotations[v])

    def rotation_at(self, v: Vertex) -> tuple:
        return self.rotations[v]

    def neighbor_cycle(self, v: Vertex) -> tuple:
        return tuple(head(d) for d in self.rotations[v])

    def edges_between(self, u: Vertex, v: Vertex) -> list:
        return [d[0] for d in self.rotations.get(u, ()) if head(d) == v]

    def edge_between(self, u: Vertex, v: Vertex) -> EdgeId:
        es = self.edges_between(u, v)
        if len(es) != 1:
            raise SurgeryError(f"expected one edge between {u!r} and {v!r}, found {len(es)}")
        return es[0]

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return bool(self.edges_between(u, v))

    def is_simple(self) -> bool:
        pairs = set()
        for e in {d[0] for d in self.darts()}:
            if e[0] == e[1]:
                return False
            if (e[0], e[1]) in pairs:
                return False
            pairs.add((e[0], e[1]))
        return True

    def is_connected(self) -> bool:
        verts = list(self.rotations)
        if not verts:
            return True
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            v = stack.pop()
            for d in self.rotations[v]:
                w = head(d)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.rotations)

    # -- face tracing and genus ------------------------------------------------

    def _successor_map(self) -> dict:
        nxt: dict = {}
        for rot in self.rotations.values():
            n = len(rot)
            for i, d in enumerate(rot):
                nxt[d] = rot[(i + 1) % n]
        return nxt

    def trace_faces(self) -> list:
        """All faces, each dart in exactly one face; deterministic order."""
        nxt = self._successor_map()
        remaining = set(nxt)
        order = sorted(remaining, key=dart_key)
        faces = []
        for start in order:
            if start not in remaining:
                continue
            walk = []
            d = start
            while True:
                if d not in remaining:
                    raise StructuralError(f"dart {d!r} revisited while tracing; malformed rotation")
                remaining.discard(d)
                walk.append(d)
                d = nxt[reverse(d)]
                if d == start:
                    break
            faces.append(Face(walk))
        return faces

    def face_of(self, d0: Dart) -> Face:
        """The single face through dart d0 (local trace)."""
        walk = [d0]
        d = d0
        while True:
            r = reverse(d)
            rot = self.rotations[tail(r)]
            d = rot[(rot.index(r) + 1) % len(rot)]
            if d == d0:
                break
            walk.append(d)
            if len(walk) > 2 * self.num_edges:
                raise StructuralError("face walk failed to close; malformed rotation")
        return Face(walk)

    def faces_at_edge(self, e: EdgeId) -> tuple:
        return self.face_of((e, 0)), self.face_of((e, 1))

    def euler_genus(self, target_genus: int | None = None) -> GenusReport:
        if not self.is_connected():
            raise InconsistencyError("embedding is not connected")
        faces = self.trace_faces()
        V = self.num_vertices
        E = self.num_edges
        F = len(faces)
        chi = V - E + F
        if chi % 2 != 0:
            raise InconsistencyError(f"odd Euler characteristic {chi}")
        genus = (2 - chi) // 2
        if genus < 0:
            raise InconsistencyError(f"negative genus {genus}")
        return GenusReport(V=V, E=E, F=F, genus=genus,
                           triangular=all(len(f) == 3 for f in faces),
                           simple=self.is_simple(),
                           target_genus=target_genus)

    # -- surgery ----------------------------------------------------------------

    def _replace(self, changes: Mapping[Vertex, Sequence[Dart]],
                 drop: Iterable[Vertex] = ()) -> "EmbeddedGraph":
        rot = dict(self.rotations)
        for v in drop:
            del rot[v]
        for v, r in changes.items():
            rot[v] = tuple(r)
        return EmbeddedGraph(rot, check=False)

    def _fresh_edge(self, u: Vertex, v: Vertex) -> EdgeId:
        k = 0
        existing = {e[2] for e in self.edges_between(u, v)}
        while k in existing:
            k += 1
        return make_edge(u, v, k)

    def _insert_before(self, rot: Sequence[Dart], anchor: Dart, new: Dart) -> list:
        out = list(rot)
        out.insert(out.index(anchor), new)
        return out

    def flip_diagonal(self, e: EdgeId) -> tuple:
        """The pair (x, y) the flip of e would join, without performing it."""
        d0, d1 = (e, 0), (e, 1)
        f0 = self.face_of(d0)
        f1 = self.face_of(d1)
        if f0 == f1:
            raise FlipError(f"edge {e!r} lies twice on one face")
        if len(f0) != 3 or len(f1) != 3:
            raise FlipError(f"edge {e!r} is not flanked by two triangles")
        u, v = e[0], e[1]
        x = tail(f0.darts[(f0.darts.index(d0) + 2) % 3])
        y = tail(f1.darts[(f1.darts.index(d1) + 2) % 3])
        if x == y:
            raise FlipError(f"flip of {e!r} would create a loop at {x!r}")
        if x in (u, v) or y in (u, v):
            raise FlipError(f"flip of {e!r} touches a non-simple corner")
        return x, y

    def edge_flip(self, e: EdgeId) -> tuple:
        """Replace e by the other diagonal of its two triangles.

        Returns (new_embedding, new_edge).  The new edge may duplicate an
        existing one; cascades use that deliberately.
        """
        d0, d1 = (e, 0), (e, 1)
        f0 = self.face_of(d0)
        f1 = self.face_of(d1)
        if f0 == f1 or len(f0) != 3 or len(f1) != 3:
            self.flip_diagonal(e)  # raises with the precise reason
        u, v = e[0], e[1]
        i0 = f0.darts.index(d0)
        q = f0.darts[(i0 + 2) % 3]           # x -> u
        i1 = f1.darts.index(d1)
        t = f1.darts[(i1 + 2) % 3]           # y -> v
        x, y = tail(q), tail(t)
        if x == y or x in (u, v) or y in (u, v):
            self.flip_diagonal(e)
        ne = self._fresh_edge(x, y)
        nx, ny = dart(ne, x), dart(ne, y)
        changes = {
            u: [d for d in self.rotations[u] if d != d0],
            v: [d for d in self.rotations[v] if d != d1],
        }
        rx = changes.get(x, self.rotations[x])
        changes[x] = self._insert_before(rx, q, nx)
        ry = changes.get(y, self.rotations[y])
        changes[y] = self._insert_before(ry, t, ny)
        return self._replace(changes), ne

    def cascade_flip(self, start: EdgeId) -> tuple:
        """Flip `start`; while the produced diagonal duplicates an existing
        edge, flip that pre-existing edge next.  Ends when the diagonal joins
        a previously nonadjacent pair.

        Returns (new_embedding, flips) where flips is the list of
        (flipped_edge, new_edge) pairs in execution order.
        """
        emb = self
        flips = []
        e = start
        bound = self.num_edges
        for step in range(bound):
            try:
                x, y = emb.flip_diagonal(e)
            except FlipError as err:
                raise FlipError(f"cascade step {step}: {err}") from err
            prior = emb.edges_between(x, y)
            emb, ne = emb.edge_flip(e)
            flips.append((e, ne))
            if not prior:
                return emb, flips
            if len(prior) > 1:
                raise FlipError(
                    f"cascade step {step}: diagonal ({x!r},{y!r}) duplicates "
                    f"{len(prior)} edges; ambiguous continuation")
            e = prior[0]
        raise NonterminationError(
            f"cascade from {start!r} exceeded {bound} flips")

    def replace_rotation(self, v: Vertex, order: Sequence[Dart]) -> "EmbeddedGraph":
        order = tuple(order)
        if sorted(order, key=dart_key) != sorted(self.rotations[v], key=dart_key):
            raise StructuralError(
                f"replacement rotation at {v!r} is not a permutation of its darts")
        return self._replace({v: order})

    def replace_rotation_by_neighbors(self, v: Vertex, nbrs: Sequence[Vertex]) -> "EmbeddedGraph":
        """Reorder the rotation at v to visit the given neighbor cycle.
        Requires the neighbors of v to be distinct (no parallel edges at v)."""
        by_head = {}
        for d in self.rotations[v]:
            if head(d) in by_head:
                raise SurgeryError(f"vertex {v!r} has parallel edges; reorder by darts instead")
            by_head[head(d)] = d
        try:
            order = [by_head[w] for w in nbrs]
        except KeyError as err:
            raise StructuralError(f"{err.args[0]!r} is not a neighbor of {v!r}") from None
        return self.replace_rotation(v, order)

    def insert_chord(self, face: Face, i: int, j: int,
                     allow_parallel: bool = False) -> tuple:
        """Add an edge between corners i and j of one face, splitting it.

        Corners are walk positions: corner k sits at tail(face.darts[k]).
        Returns (new_embedding, new_edge).
        """
        if i == j:
            raise SurgeryError("chord endpoints must be distinct corners")
        di, dj = face.darts[i], face.darts[j]
        u, v = tail(di), tail(dj)
        if u == v:
            raise SurgeryError(f"chord corners {i} and {j} both sit at {u!r}; loops rejected")
        if not allow_parallel and self.has_edge(u, v):
            raise SurgeryError(f"{u!r} and {v!r} are already adjacent; use a cascade to re-add")
        ne = self._fresh_edge(u, v)
        changes = {u: self._insert_before(self.rotations[u], di, dart(ne, u))}
        rv = changes.get(v, self.rotations[v])
        changes[v] = self._insert_before(rv, dj, dart(ne, v))
        return self._replace(changes), ne

    def bridge(self, f1: Face, c1: int, f2: Face, c2: int) -> tuple:
        """Add an edge between corners of two distinct faces, merging them.
        Raises genus by exactly 1.  Returns (new_embedding, new_edge)."""
        if f1 == f2:
            raise SurgeryError("bridge requires two distinct faces; use insert_chord within one")
        d1, d2 = f1.darts[c1], f2.darts[c2]
        u, v = tail(d1), tail(d2)
        if u == v:
            raise SurgeryError(f"bridge corners both sit at {u!r}; loops rejected")
        ne = self._fresh_edge(u, v)
        changes = {u: self._insert_before(self.rotations[u], d1, dart(ne, u))}
        rv = changes.get(v, self.rotations[v])
        changes[v] = self._insert_before(rv, d2, dart(ne, v))
        return self._replace(changes), ne

    def identify_and_contract(self, u: Vertex, v: Vertex,
                              allow_parallel: bool = False) -> "EmbeddedGraph":
        """Contract the edge (u, v), splicing v's rotation into u's."""
        e = self.edge_between(u, v)
        duv, dvu = dart(e, u), dart(e, v)
        rot_v = self.rotations[v]
        iv = rot_v.index(dvu)
        spliced_tail_v = [rot_v[(iv + 1 + k) % len(rot_v)] for k in range(len(rot_v) - 1)]
        # Re-home every edge incident with v onto u, refreshing parallel indices.
        rename: dict = {}
        new_rot: dict = {w: list(r) for w, r in self.rotations.items()}
        del new_rot[v]
        taken = {(x[0], x[1], x[2]) for x in {d[0] for d in self.darts()}}
        for d in spliced_tail_v:
            old = d[0]
            w = head(d)
            if w == u:
                raise SurgeryError(
                    f"contracting ({u!r},{v!r}) would create a loop from edge {old!r}")
            if not allow_parallel and self.has_edge(u, w):
                raise SurgeryError(
                    f"contracting ({u!r},{v!r}) would create parallel edges to {w!r}")
            k = 0
            while make_edge(u, w, k) in taken:
                k += 1
            newe = make_edge(u, w, k)
            taken.add(newe)
            rename[old] = newe
        ru = list(self.rotations[u])
        pos = ru.index(duv)
        remapped = [dart(rename[d[0]], u) for d in spliced_tail_v]
        new_rot[u] = ru[:pos] + remapped + ru[pos + 1:]
        for w in set(head(d) for d in spliced_tail_v):
            new_rot[w] = [
                dart(rename[d[0]], w) if d[0] in rename else d
                for d in new_rot[w]
            ]
        return EmbeddedGraph(new_rot, check=True)

    # -- text format -------------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for v in self.vertices:
            nbrs = " ".join(_vertex_token(head(d)) for d in self.rotations[v])
            lines.append(f"{_vertex_token(v)}. ({nbrs})")
        return "\n".join(lines) + "\n"


def _vertex_token(v: Vertex) -> str:
    return str(v)


def _parse_vertex_token(tok: str) -> Vertex:
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_rotation_text(text: str) -> EmbeddedGraph:
    """Parse the one-line-per-vertex rotation format::

        0. (9 6 13 u 2 y0 16 ...)
        a. (5 0 12 ...)

    '#' starts a comment.
    """
    neighbors: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            name, rest = line.split(".", 1)
            rest = rest.strip()
            if not (rest.startswith("(") and rest.endswith(")")):
                raise ValueError("rotation must be parenthesised")
            v = _parse_vertex_token(name.strip())
            nbrs = [_parse_vertex_token(t) for t in rest[1:-1].split()]
        except ValueError as err:
            raise StructuralError(f"line {lineno}: cannot parse rotation line: {err}") from None
        if v in neighbors:
            raise StructuralError(f"line {lineno}: duplicate rotation for {v!r}")
        neighbors[v] = nbrs
    if not neighbors:
        raise StructuralError("no rotation lines found")
    return EmbeddedGraph.from_neighbors(neighbors)
