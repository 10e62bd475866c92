"""Current graphs over Z_m, principle checking, and log extraction.

A current graph is an embedded graph whose darts carry residues mod m with
current(reverse(d)) = -current(d), plus letter labels on its vortices (the
vertices violating Kirchhoff's current law).  All constructions here use
m = 12s + 6 and index 1: the embedding has a single face, whose letter-
augmented current sequence is the log.

The log determines the current graph: pairing the two walk positions that
carry c and -c recovers the edge involution, and composing it with the walk
shift recovers the rotations.  `from_log` implements that reconstruction and
is how the fixtures in this package are stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping, Sequence

from .surface import (
    Dart,
    EdgeId,
    EmbeddedGraph,
    StructuralError,
    Vertex,
    dart,
    head,
    make_edge,
    reverse,
    tail,
)

LETTERS = ("a", "b", "c", "u", "v", "w", "x", "y")


class PrincipleError(Exception):
    """A current graph violates one of the construction principles."""


class IndexError_(Exception):
    """The current graph does not have exactly one face."""


@dataclass(frozen=True)
class PrincipleReport:
    code: str
    passed: bool
    detail: str

    def __str__(self) -> str:
        return f"({self.code}) {'PASS' if self.passed else 'FAIL'}: {self.detail}"


@dataclass(frozen=True)
class VortexClassification:
    vertex: Vertex
    kind: str          # 'V1' | 'V2' | 'V3'
    excess: int
    residue_class: int | None = None   # j mod 3, V3 only


class Log:
    """Cyclic sequence of residues and vortex letters along the single face."""

    def __init__(self, entries: Sequence, m: int):
        self.entries = tuple(entries)
        self.m = m

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "(" + " ".join(str(e) for e in self.entries) + ")"

    def numeric(self) -> tuple:
        return tuple(e for e in self.entries if isinstance(e, int))

    def letters(self) -> tuple:
        return tuple(e for e in self.entries if isinstance(e, str))

    def rotations(self, i: int) -> tuple:
        """Numeric entries shifted by +i: the derived rotation at vertex i."""
        return tuple((e + i) % self.m for e in self.numeric())

    def cyclically_equal(self, other: Sequence) -> bool:
        o = tuple(other)
        if len(o) != len(self.entries):
            return False
        doubled = self.entries + self.entries
        return any(doubled[k:k + len(o)] == o for k in range(len(self.entries)))


class CurrentGraph:
    """Embedded graph + antisymmetric dart currents + vortex letters.

    `vortex_labels[v]` is a tuple of letters aligned with the rotation at v:
    the corner entered before out-dart `rotation_at(v)[i]` carries letter i.
    Degree-1 vortices carry a single letter.
    """

    def __init__(self, graph: EmbeddedGraph, m: int,
                 current: Mapping[Dart, int],
                 vortex_labels: Mapping[Vertex, Sequence[str]] | None = None):
        self.graph = graph
        self.m = m
        self.current = {d: c % m for d, c in current.items()}
        self.vortex_labels = {v: tuple(ls) for v, ls in (vortex_labels or {}).items()}
        for d in graph.darts():
            if d not in self.current:
                raise StructuralError(f"dart {d!r} has no current")
            if (self.current[d] + self.current[reverse(d)]) % m != 0:
                raise StructuralError(f"currents on edge {d[0]!r} are not antisymmetric")
        for v, ls in self.vortex_labels.items():
            if len(ls) != graph.degree(v):
                raise StructuralError(f"vortex {v!r} has {len(ls)} letters for degree {graph.degree(v)}")

    @property
    def order_two(self) -> int:
        return self.m // 2

    def excess(self, v: Vertex) -> int:
        """Sum of the currents entering v, mod m."""
        return sum(self.current[reverse(d)] for d in self.graph.rotation_at(v)) % self.m

    def out_currents(self, v: Vertex) -> tuple:
        return tuple(self.current[d] for d in self.graph.rotation_at(v))

    def index(self) -> int:
        return len(self.graph.trace_faces())

    # -- log ---------------------------------------------------------------------

    def trace_log(self) -> Log:
        faces = self.graph.trace_faces()
        if len(faces) != 1:
            raise IndexError_(f"current graph has {len(faces)} faces; log needs index 1")
        walk = faces[0].darts
        entries: list = []
        for d in walk:
            v = tail(d)
            if v in self.vortex_labels:
                rot = self.graph.rotation_at(v)
                entries.append(self.vortex_labels[v][rot.index(d)])
            entries.append(self.current[d])
        # the order-2 current appears twice consecutively; record it once
        o2 = self.order_two
        n = len(entries)
        for i in range(n):
            if entries[i] == o2 and entries[(i + 1) % n] == o2:
                del entries[i]
                break
        return Log(entries, self.m)

    # -- vortex classification -----------------------------------------------------

    def classify_vortex(self, v: Vertex) -> VortexClassification:
        if v not in self.vortex_labels:
            raise PrincipleError(f"vertex {v!r} is not labeled")
        deg = self.graph.degree(v)
        exc = self.excess(v)
        g = gcd(exc, self.m)
        if deg == 1 and g == 1:
            return VortexClassification(v, "V1", exc)
        if deg == 1 and g == 2:
            return VortexClassification(v, "V2", exc)
        if deg == 3 and g == 3:
            incoming = [self.current[reverse(d)] % 3 for d in self.graph.rotation_at(v)]
            j = incoming[0]
            if j != 0 and all(c == j for c in incoming):
                return VortexClassification(v, "V3", exc, residue_class=j)
        raise PrincipleError(
            f"vortex {v!r} (degree {deg}, excess {exc}, gcd {g}) matches no type")

    # -- principles ------------------------------------------------------------------

    def check_principles(self) -> list:
        """Evaluate (C1)..(C5).  Failures are report entries, not exceptions."""
        reports = []

        bad_deg = [v for v in self.graph.vertices if self.graph.degree(v) not in (1, 3)]
        reports.append(PrincipleReport(
            "C1", not bad_deg,
            "all degrees in {1, 3}" if not bad_deg else f"bad degrees at {bad_deg!r}"))

        idx = self.index()
        if idx != 1:
            reports.append(PrincipleReport("C2", False, f"index is {idx}, not 1"))
            return reports
        log = self.trace_log()
        seen: dict = {}
        for c in log.numeric():
            seen[c] = seen.get(c, 0) + 1
        expected = set(range(1, self.m))
        dups = sorted(c for c, n in seen.items() if n > 1)
        missing = sorted(expected - set(seen))
        zero = 0 in seen
        ok2 = not dups and not missing and not zero
        detail = "log covers each nonzero residue once"
        if not ok2:
            parts = []
            if zero:
                parts.append("zero current in log")
            if dups:
                parts.append(f"duplicated {dups}")
            if missing:
                parts.append(f"missing {missing}")
            detail = "; ".join(parts)
        reports.append(PrincipleReport("C2", ok2, detail))

        o2 = self.order_two
        carriers = [d for d in self.graph.darts() if self.current[d] == o2]
        ok3 = any(self.graph.degree(tail(d)) == 1 or self.graph.degree(head(d)) == 1
                  for d in carriers)
        reports.append(PrincipleReport(
            "C3", ok3,
            f"order-2 element {o2} on an arc at a degree-1 vertex" if ok3
            else f"order-2 element {o2} not incident with a degree-1 vertex"))

        bad_kcl = [v for v in self.graph.vertices
                   if v not in self.vortex_labels
                   and self.graph.degree(v) == 3
                   and self.excess(v) != 0]
        reports.append(PrincipleReport(
            "C4", not bad_kcl,
            "unlabeled degree-3 vertices satisfy KCL" if not bad_kcl
            else f"KCL fails at unlabeled {bad_kcl!r} "
                 f"(excess {[self.excess(v) for v in bad_kcl]})"))

        # degree-1 vertices must be the order-2 endpoint or a labeled vortex
        stray = [v for v in self.graph.vertices
                 if self.graph.degree(v) == 1
                 and v not in self.vortex_labels
                 and self.excess(v) != o2]
        fails = []
        if stray:
            fails.append(f"unlabeled degree-1 vertices {stray!r}")
        for v in sorted(self.vortex_labels, key=lambda v: str(v)):
            try:
                self.classify_vortex(v)
            except PrincipleError as err:
                fails.append(str(err))
        reports.append(PrincipleReport(
            "C5", not fails,
            "all vortices classify as V1/V2/V3" if not fails else "; ".join(fails)))
        return reports

    def principles_pass(self) -> bool:
        return all(r.passed for r in self.check_principles())

    def vortices(self) -> dict:
        return {v: self.classify_vortex(v) for v in self.vortex_labels}


def from_log(m: int, entries: Sequence) -> CurrentGraph:
    """Reconstruct the index-1 current graph whose log is `entries`.

    Numeric entries must cover each nonzero residue mod m exactly once, with
    the order-2 element recorded once (its doubled traversal is restored
    here).  Letters mark the vortex corners they precede.
    """
    o2 = m // 2
    raw: list = []          # (current, letter_or_None) per raw walk position
    pending_letter = None
    for e in entries:
        if isinstance(e, str):
            if pending_letter is not None:
                raise StructuralError("two consecutive letters in log")
            pending_letter = e
        else:
            raw.append([e % m, pending_letter])
            pending_letter = None
    if pending_letter is not None:
        # letter at the wrap point: attach to the first numeric entry
        if raw[0][1] is not None:
            raise StructuralError("two consecutive letters in log")
        raw[0][1] = pending_letter
    values = [c for c, _ in raw]
    if sorted(values) != sorted(set(range(1, m))):
        raise StructuralError("log values are not exactly the nonzero residues mod m")
    i2 = values.index(o2)
    raw.insert(i2 + 1, [o2, None])   # restore the doubled order-2 traversal
    n = len(raw)

    pos_of = {}
    for i, (c, _) in enumerate(raw):
        pos_of.setdefault(c, []).append(i)
    alpha = list(range(n))
    for c in range(1, m):
        if c == o2:
            continue
        if c < m - c:
            p, q = pos_of[c][0], pos_of[m - c][0]
            alpha[p], alpha[q] = q, p
    p, q = pos_of[o2]
    alpha[p], alpha[q] = q, p

    # vertices = orbits of sigma = shift o alpha (successor around the tail)
    sigma = [ (alpha[i] + 1) % n for i in range(n) ]
    seen = [False] * n
    cycles = []
    for i in range(n):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = sigma[j]
        cycles.append(cyc)

    vertex_of = {}
    for vid, cyc in enumerate(cycles):
        for p in cyc:
            vertex_of[p] = vid

    edges = {}    # (i, j) position pair with i < j -> EdgeId
    used_k: dict = {}
    for i in range(n):
        j = alpha[i]
        if i < j:
            u, v = vertex_of[i], vertex_of[j]
            key = (min(u, v), max(u, v))
            k = used_k.get(key, 0)
            used_k[key] = k + 1
            edges[(i, j)] = make_edge(u, v, k)
    # map raw position -> dart
    dart_at = {}
    for i in range(n):
        j = alpha[i]
        a, b = (i, j) if i < j else (j, i)
        eid = edges[(a, b)]
        u, v = vertex_of[i], vertex_of[j]
        if u == v:
            # loop: orient by position order
            dart_at[i] = (eid, 0 if i == a else 1)
        else:
            dart_at[i] = dart(eid, u)
    rotations = {vid: [dart_at[p] for p in cyc] for vid, cyc in enumerate(cycles)}
    graph = EmbeddedGraph(rotations)

    current = {}
    for i in range(n):
        current[dart_at[i]] = raw[i][0]

    labels: dict = {}
    for i, (c, letter) in enumerate(raw):
        if letter is None:
            continue
        v = vertex_of[i]
        slot = rotations[v].index(dart_at[i])
        labels.setdefault(v, [None] * len(rotations[v]))[slot] = letter
    vortex_labels = {}
    for v, ls in labels.items():
        if any(l is None for l in ls):
            raise StructuralError(f"vortex {v!r} has unlabeled corners: {ls!r}")
        vortex_labels[v] = tuple(ls)
    return CurrentGraph(graph, m, current, vortex_labels)


# -- text format --------------------------------------------------------------------
#
#   group 18
#   case 2
#   v0 B (e0+ e1+ e2+)
#   v1 W (e2- e3+ e4-)
#   e0: v0 -> v1 current 6
#   vortex v3 labels u,v,w
#
# White (W) vertices are stored as drawn counterclockwise; their rotations are
# reversed at load so everything downstream uses the single global convention.

def emit_current_graph(cg: CurrentGraph, case: int | None = None) -> str:
    edge_names = {}
    for i, e in enumerate(cg.graph.edges()):
        edge_names[e] = f"e{i}"
    lines = [f"group {cg.m}"]
    if case is not None:
        lines.append(f"case {case}")
    for v in cg.graph.vertices:
        toks = []
        for d in cg.graph.rotation_at(v):
            toks.append(edge_names[d[0]] + ("+" if d[1] == 0 else "-"))
        lines.append(f"{v} B ({' '.join(toks)})")
    for e in cg.graph.edges():
        d0 = (e, 0)
        lines.append(f"{edge_names[e]}: {e[0]} -> {e[1]} current {cg.current[d0]}")
    for v in sorted(cg.vortex_labels, key=lambda v: str(v)):
        lines.append(f"vortex {v} labels {','.join(cg.vortex_labels[v])}")
    return "\n".join(lines) + "\n"


def parse_current_graph(text: str) -> CurrentGraph:
    m = None
    rot_tokens: dict = {}
    white: set = set()
    edge_decl: dict = {}
    labels: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "group":
                m = int(parts[1])
            elif parts[0] == "case":
                pass
            elif parts[0] == "vortex":
                labels[_pv(parts[1])] = tuple(parts[3].split(","))
            elif ":" in parts[0]:
                name = parts[0].rstrip(":")
                if parts[2] != "->" or parts[4] != "current":
                    raise ValueError("edge line must read '<id>: <tail> -> <head> current <k>'")
                edge_decl[name] = (_pv(parts[1]), _pv(parts[3]), int(parts[5]))
            else:
                v = _pv(parts[0])
                bw = parts[1]
                if bw not in ("B", "W"):
                    raise ValueError(f"rotation sense must be B or W, got {bw!r}")
                if bw == "W":
                    white.add(v)
                joined = " ".join(parts[2:])
                if not (joined.startswith("(") and joined.endswith(")")):
                    raise ValueError("rotation must be parenthesised")
                rot_tokens[v] = joined[1:-1].split()
        except (ValueError, IndexError) as err:
            raise StructuralError(f"line {lineno}: {err}") from None
    if m is None:
        raise StructuralError("missing 'group <m>' header")
    if not rot_tokens or not edge_decl:
        raise StructuralError("empty current graph")

    eids = {}
    for name, (t, h, c) in edge_decl.items():
        eids[name] = make_edge(t, h, _fresh(eids, t, h))
    rotations = {}
    for v, toks in rot_tokens.items():
        rot = []
        for tok in toks:
            name, sign = tok[:-1], tok[-1]
            if sign not in "+-" or name not in eids:
                raise StructuralError(f"unknown dart token {tok!r} at vertex {v!r}")
            t, h, c = edge_decl[name]
            d = dart(eids[name], t if sign == "+" else h)
            if tail(d) != v:
                raise StructuralError(f"dart {tok!r} does not leave {v!r}")
            rot.append(d)
        if v in white:
            rot.reverse()
        rotations[v] = rot
    graph = EmbeddedGraph(rotations)
    current = {}
    for name, (t, h, c) in edge_decl.items():
        e = eids[name]
        current[dart(e, t)] = c % m
        current[dart(e, h)] = (-c) % m
    return CurrentGraph(graph, m, current, labels)


def _pv(tok: str) -> Vertex:
    try:
        return int(tok)
    except ValueError:
        return tok


def _fresh(eids: dict, t, h) -> int:
    used = {e[2] for e in eids.values()
            if (e[0], e[1]) == (make_edge(t, h, 0)[0], make_edge(t, h, 0)[1])}
    k = 0
    while k in used:
        k += 1
    return k
