"""Graph/instance/solution data model, chain compression, verification and file I/O.

Graphs are multigraphs whose edges are *super-edges*: a super-edge of length L
stands for a chain of L unit edges through L-1 implicit interior vertices.
Paths are stored as sequences of (edge id, forward flag) steps so parallel
chains stay unambiguous.  All values are immutable after construction; every
operation here is a pure function.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

UNDIRECTED = "undirected"
DIRECTED = "directed"

Point = tuple[int, int]


class FormatError(ValueError):
    """Raised on malformed instance/solution/vc files."""


@dataclass(frozen=True)
class SuperEdge:
    """A chain of `length` unit edges between two declared vertices.

    `polyline`, when present, is the axis-aligned waypoint list of the chain's
    embedding: endpoints plus bend points.  Consecutive waypoints differ in
    exactly one coordinate and the L1 lengths of the runs sum to `length`.
    (Waypoints rather than all length+1 lattice points: gadget chains can have
    ~1e5 unit edges, but only a handful of bends.)
    """

    tail: int
    head: int
    length: int = 1
    polyline: Optional[tuple[Point, ...]] = None

    def __post_init__(self):
        if self.tail == self.head:
            raise ValueError("self-loops are not allowed")
        if self.length < 1:
            raise ValueError("chain length must be >= 1")
        if self.polyline is not None:
            pts = self.polyline
            if len(pts) < 2:
                raise ValueError("polyline needs at least two waypoints")
            total = 0
            for a, b in zip(pts, pts[1:]):
                dx, dy = b[0] - a[0], b[1] - a[1]
                if (dx == 0) == (dy == 0):
                    raise ValueError("polyline runs must be axis-aligned and nonzero")
                total += abs(dx) + abs(dy)
            if total != self.length:
                raise ValueError(
                    f"polyline length {total} does not match chain length {self.length}"
                )

    def expand_points(self) -> Iterator[Point]:
        """All length+1 lattice points of the embedded chain, in order."""
        pts = self.polyline
        if pts is None:
            raise ValueError("edge has no polyline")
        x, y = pts[0]
        yield (x, y)
        for bx, by in pts[1:]:
            sx = (bx > x) - (bx < x)
            sy = (by > y) - (by < y)
            while (x, y) != (bx, by):
                x, y = x + sx, y + sy
                yield (x, y)

    def other(self, v: int) -> int:
        return self.head if v == self.tail else self.tail


def compress_polyline(points: Iterable[Point]) -> tuple[Point, ...]:
    """Drop collinear intermediate points, keeping endpoints and bends."""
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("polyline needs at least two points")
    out = [pts[0]]
    for p in pts[1:]:
        if len(out) >= 2:
            a, b = out[-2], out[-1]
            if (a[0] == b[0] == p[0]) or (a[1] == b[1] == p[1]):
                out[-1] = p
                continue
        out.append(p)
    return tuple(out)


@dataclass(frozen=True)
class Graph:
    mode: str
    vertex_count: int
    edges: tuple[SuperEdge, ...]
    coords: Optional[dict[int, Point]] = None

    def __post_init__(self):
        if self.mode not in (UNDIRECTED, DIRECTED):
            raise ValueError(f"unknown mode {self.mode!r}")
        for e in self.edges:
            if not (0 <= e.tail < self.vertex_count and 0 <= e.head < self.vertex_count):
                raise ValueError(f"edge endpoint out of range: {e.tail},{e.head}")
        if self.coords is not None:
            for v in self.coords:
                if not 0 <= v < self.vertex_count:
                    raise ValueError(f"coordinate for unknown vertex {v}")

    @property
    def directed(self) -> bool:
        return self.mode == DIRECTED

    def unit_size(self) -> int:
        """Number of unit edges after expanding all chains."""
        return sum(e.length for e in self.edges)

    def adjacency(self) -> list[list[int]]:
        """adj[v] = sorted edge ids leaving v (both directions if undirected)."""
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, e in enumerate(self.edges):
            adj[e.tail].append(i)
            if not self.directed:
                adj[e.head].append(i)
        return adj


@dataclass(frozen=True)
class Instance:
    graph: Graph
    s: int
    t: int
    p: int
    k: int

    def __post_init__(self):
        g = self.graph
        if not (0 <= self.s < g.vertex_count and 0 <= self.t < g.vertex_count):
            raise ValueError("s/t out of range")
        if self.s == self.t:
            raise ValueError("s and t must differ")
        if self.p < 1:
            raise ValueError("p must be positive")
        if self.k < 0:
            raise ValueError("k must be non-negative")


@dataclass(frozen=True)
class PathSeq:
    """An s-t path as (edge id, forward) steps; chains traversed atomically."""

    steps: tuple[tuple[int, bool], ...]

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.steps)

    def vertices(self, graph: Graph, start: int) -> list[int]:
        """Declared-vertex sequence when walking from `start`; raises on breaks."""
        seq = [start]
        cur = start
        for eid, fwd in self.steps:
            e = graph.edges[eid]
            a, b = (e.tail, e.head) if fwd else (e.head, e.tail)
            if a != cur:
                raise ValueError(f"step on edge {eid} does not chain (at vertex {cur})")
            cur = b
            seq.append(cur)
        return seq


@dataclass(frozen=True)
class Solution:
    paths: tuple[PathSeq, ...]

    def edge_usage(self) -> dict[int, int]:
        """edge id -> number of paths using it (each path is simple, so 0/1 per path)."""
        usage: dict[int, int] = {}
        for p in self.paths:
            for eid in set(p.edge_ids()):
                usage[eid] = usage.get(eid, 0) + 1
        return usage

    def shared_edge_ids(self) -> list[int]:
        return sorted(e for e, n in self.edge_usage().items() if n >= 2)

    def shared_count(self, graph: Graph) -> int:
        """Total unit-edge length of edges appearing in >= 2 paths."""
        return sum(graph.edges[e].length for e in self.shared_edge_ids())


@dataclass(frozen=True)
class Verdict:
    answer: bool
    shared_count: Optional[int] = None
    witness: Optional[Solution] = None
    certificate: object = None
    method: Optional[str] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.answer


# ---------------------------------------------------------------------------
# verification

def verify_solution(inst: Instance, sol: Solution) -> Verdict:
    """Accept iff sol is exactly p valid simple s-t paths sharing <= k unit edges.

    The shared count is reported even when the structure is rejected, as far
    as it can be computed.
    """
    g = inst.graph
    shared = sol.shared_count(g)
    if len(sol.paths) != inst.p:
        return Verdict(False, shared, reason=f"expected {inst.p} paths, got {len(sol.paths)}")
    for idx, path in enumerate(sol.paths):
        if not path.steps:
            return Verdict(False, shared, reason=f"path {idx} is empty")
        for eid, fwd in path.steps:
            if not 0 <= eid < len(g.edges):
                return Verdict(False, shared, reason=f"path {idx}: unknown edge {eid}")
            if g.directed and not fwd:
                return Verdict(False, shared, reason=f"path {idx}: reverse step on arc {eid}")
        try:
            seq = path.vertices(g, inst.s)
        except ValueError as exc:
            return Verdict(False, shared, reason=f"path {idx}: {exc}")
        if seq[-1] != inst.t:
            return Verdict(False, shared, reason=f"path {idx} ends at {seq[-1]}, not t")
        if len(set(seq)) != len(seq):
            return Verdict(False, shared, reason=f"path {idx} repeats a vertex")
        # a simple path cannot use one chain twice either
        ids = path.edge_ids()
        if len(set(ids)) != len(ids):
            return Verdict(False, shared, reason=f"path {idx} repeats an edge")
    if shared > inst.k:
        return Verdict(False, shared, reason=f"{shared} shared unit edges exceed k={inst.k}")
    return Verdict(True, shared)


# ---------------------------------------------------------------------------
# chain expansion

@dataclass(frozen=True)
class Expansion:
    """Unit-edge view of a compressed graph plus the back-mapping.

    Vertices 0..n-1 are the original ones; interior chain vertices are fresh.
    unit edge j belongs to super-edge owner[j] at offset[j] (0-based from the
    super-edge's tail).
    """

    graph: Graph
    owner: tuple[int, ...]
    offset: tuple[int, ...]
    runs: tuple[tuple[int, ...], ...]  # super-edge id -> its unit edge ids, tail-to-head

    def expand_instance(self, inst: Instance) -> Instance:
        return Instance(self.graph, inst.s, inst.t, inst.p, inst.k)

    def expand_path(self, path: PathSeq) -> PathSeq:
        steps: list[tuple[int, bool]] = []
        for eid, fwd in path.steps:
            run = self.runs[eid]
            if fwd:
                steps.extend((u, True) for u in run)
            else:
                steps.extend((u, False) for u in reversed(run))
        return PathSeq(tuple(steps))

    def expand_solution(self, sol: Solution) -> Solution:
        return Solution(tuple(self.expand_path(p) for p in sol.paths))

    def compress_path(self, path: PathSeq) -> PathSeq:
        """Inverse of expand_path; unit steps must cover whole chains."""
        steps: list[tuple[int, bool]] = []
        i = 0
        seq = path.steps
        while i < len(seq):
            uid, fwd = seq[i]
            sup = self.owner[uid]
            run = self.runs[sup]
            ell = len(run)
            chunk = seq[i : i + ell]
            if fwd:
                want = tuple((u, True) for u in run)
            else:
                want = tuple((u, False) for u in reversed(run))
            if tuple(chunk) != want:
                raise ValueError(f"unit steps at {i} do not traverse chain {sup} atomically")
            steps.append((sup, fwd))
            i += ell
        return PathSeq(tuple(steps))

    def compress_solution(self, sol: Solution) -> Solution:
        return Solution(tuple(self.compress_path(p) for p in sol.paths))


def expand_chains(g: Graph) -> Expansion:
    """Replace every length-L super-edge by L unit edges via fresh vertices."""
    edges: list[SuperEdge] = []
    owner: list[int] = []
    offset: list[int] = []
    runs: list[tuple[int, ...]] = []
    nxt = g.vertex_count
    for sid, e in enumerate(g.edges):
        pts = list(e.expand_points()) if e.polyline is not None else None
        chain_vertices = [e.tail]
        for _ in range(e.length - 1):
            chain_vertices.append(nxt)
            nxt += 1
        chain_vertices.append(e.head)
        run = []
        for j in range(e.length):
            poly = (pts[j], pts[j + 1]) if pts is not None else None
            run.append(len(edges))
            owner.append(sid)
            offset.append(j)
            edges.append(SuperEdge(chain_vertices[j], chain_vertices[j + 1], 1, poly))
        runs.append(tuple(run))
    coords = None
    if g.coords is not None:
        coords = dict(g.coords)
        nxt2 = g.vertex_count
        for e in g.edges:
            if e.polyline is not None:
                pts = list(e.expand_points())
                for j in range(1, e.length):
                    coords[nxt2 + j - 1] = pts[j]
            nxt2 += e.length - 1
    expanded = Graph(g.mode, nxt, tuple(edges), coords)
    return Expansion(expanded, tuple(owner), tuple(offset), tuple(runs))


# ---------------------------------------------------------------------------
# distance

def distance(g: Graph, u: int, v: int) -> float:
    """Chain-length-weighted shortest-path distance; math.inf if unreachable."""
    import heapq

    if u == v:
        return 0
    dist = {u: 0}
    heap = [(0, u)]
    adj = g.adjacency()
    while heap:
        d, x = heapq.heappop(heap)
        if x == v:
            return d
        if d > dist.get(x, math.inf):
            continue
        for eid in adj[x]:
            e = g.edges[eid]
            y = e.head if e.tail == x else e.tail
            nd = d + e.length
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return math.inf


# ---------------------------------------------------------------------------
# grid embedding check

def _segments(e: SuperEdge, eid: int):
    pts = e.polyline
    for i, (a, b) in enumerate(zip(pts, pts[1:])):
        if a[1] == b[1]:  # horizontal
            lo, hi = sorted((a[0], b[0]))
            yield ("h", a[1], lo, hi, eid, i)
        else:
            lo, hi = sorted((a[1], b[1]))
            yield ("v", a[0], lo, hi, eid, i)


def check_grid_embedding(g: Graph) -> Verdict:
    """Accept iff the expanded graph is a holey grid (subgraph of a bounded grid).

    All expanded lattice points must be pairwise distinct except where distinct
    super-edges legitimately meet at a declared shared endpoint, and every unit
    step must be an axis-aligned L1 step (guaranteed by polyline validation).
    """
    if g.coords is None or any(v not in g.coords for v in range(g.vertex_count)):
        raise ValueError("missing coordinates")
    for eid, e in enumerate(g.edges):
        if e.polyline is None:
            raise ValueError(f"edge {eid} has no polyline")

    coord_of = g.coords
    vertex_at: dict[Point, int] = {}
    for v, pt in coord_of.items():
        if pt in vertex_at:
            return Verdict(False, reason=f"vertices {vertex_at[pt]} and {v} share point {pt}")
        vertex_at[pt] = v

    ends: dict[int, tuple[Point, Point]] = {}
    for eid, e in enumerate(g.edges):
        pts = e.polyline
        if pts[0] != coord_of[e.tail] or pts[-1] != coord_of[e.head]:
            return Verdict(False, reason=f"edge {eid} polyline does not start/end at its vertices")
        ends[eid] = (pts[0], pts[-1])

    def legal_meet(p: Point, e1: int, e2: int) -> bool:
        return p in vertex_at and p in ends[e1] and p in ends[e2]

    hsegs: dict[int, list[tuple[int, int, int, int]]] = {}
    vsegs: dict[int, list[tuple[int, int, int, int]]] = {}
    all_h: list[tuple[int, int, int, int, int]] = []
    all_v: list[tuple[int, int, int, int, int]] = []
    for eid, e in enumerate(g.edges):
        for kind, fixed, lo, hi, _, si in _segments(e, eid):
            if kind == "h":
                hsegs.setdefault(fixed, []).append((lo, hi, eid, si))
                all_h.append((fixed, lo, hi, eid, si))
            else:
                vsegs.setdefault(fixed, []).append((lo, hi, eid, si))
                all_v.append((fixed, lo, hi, eid, si))

    # collinear pairs: sort per line, compare neighbours
    for table, make_pt in ((hsegs, lambda f, c: (c, f)), (vsegs, lambda f, c: (f, c))):
        for fixed, segs in table.items():
            segs.sort()
            for (lo1, hi1, e1, s1), (lo2, hi2, e2, s2) in zip(segs, segs[1:]):
                if lo2 < hi1:
                    return Verdict(
                        False,
                        reason=f"edges {e1} and {e2} overlap along a line at {make_pt(fixed, lo2)}",
                    )
                if lo2 == hi1:
                    p = make_pt(fixed, lo2)
                    if e1 == e2:
                        # same-axis segments of one polyline never touch legally
                        return Verdict(False, reason=f"edge {e1} self-touches at {p}")
                    if not legal_meet(p, e1, e2):
                        return Verdict(False, reason=f"edges {e1},{e2} touch at non-vertex {p}")

    # horizontal x vertical crossings
    h_by_y = sorted(all_h)
    ys = [rec[0] for rec in h_by_y]
    import bisect

    for x, lo, hi, ev, sv in all_v:
        left = bisect.bisect_left(ys, lo)
        right = bisect.bisect_right(ys, hi)
        for y, xlo, xhi, eh, sh in h_by_y[left:right]:
            if not xlo <= x <= xhi:
                continue
            p = (x, y)
            if eh == ev:
                if abs(sh - sv) == 1:
                    continue  # consecutive runs of one polyline share their bend
                return Verdict(False, reason=f"edge {eh} self-intersects at {p}")
            # crossing is legal only at a declared vertex shared by both edges,
            # and only at segment endpoints (a vertex interior to a run would
            # mean the run passes through another vertex's point)
            if p in ((x, lo), (x, hi)) and p in ((xlo, y), (xhi, y)) and legal_meet(p, eh, ev):
                continue
            return Verdict(False, reason=f"edges {eh},{ev} cross at {p}")

    # a vertex point may not lie in the interior of any run
    for pt, v in vertex_at.items():
        x, y = pt
        for ylo, yhi, eid, si in vsegs.get(x, ()):
            if ylo < y < yhi:
                return Verdict(False, reason=f"edge {eid} passes through vertex {v} at {pt}")
        for xlo, xhi, eid, si in hsegs.get(y, ()):
            if xlo < x < xhi:
                return Verdict(False, reason=f"edge {eid} passes through vertex {v} at {pt}")

    return Verdict(True)


# ---------------------------------------------------------------------------
# file formats

def parse_instance(text: str) -> Instance:
    """Parse the line-oriented `mse 1` instance format."""
    mode = None
    nvert = None
    s = t = p = k = None
    coords: dict[int, Point] = {}
    edges: list[SuperEdge] = []

    lines = text.splitlines()
    header_seen = False
    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header_seen:
            if parts != ["mse", "1"]:
                raise FormatError(f"line {ln}: expected 'mse 1' header")
            header_seen = True
            continue
        kw = parts[0]
        try:
            if kw == "mode":
                mode = parts[1]
            elif kw == "vertices":
                nvert = int(parts[1])
            elif kw == "s":
                s = int(parts[1])
            elif kw == "t":
                t = int(parts[1])
            elif kw == "p":
                p = int(parts[1])
            elif kw == "k":
                k = int(parts[1])
            elif kw == "coord":
                coords[int(parts[1])] = (int(parts[2]), int(parts[3]))
            elif kw == "edge":
                edges.append(SuperEdge(int(parts[1]), int(parts[2]), 1))
            elif kw == "chain":
                u, v, length = int(parts[1]), int(parts[2]), int(parts[3])
                rest = parts[4:]
                poly = None
                if rest:
                    if len(rest) != 2 * (length + 1):
                        raise FormatError(
                            f"line {ln}: chain polyline needs {2 * (length + 1)} numbers"
                        )
                    pts = [(int(rest[i]), int(rest[i + 1])) for i in range(0, len(rest), 2)]
                    for a, b in zip(pts, pts[1:]):
                        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                            raise FormatError(f"line {ln}: polyline step is not an L1 unit step")
                    poly = compress_polyline(pts)
                edges.append(SuperEdge(u, v, length, poly))
            else:
                raise FormatError(f"line {ln}: unknown keyword {kw!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {ln}: {exc}") from None

    if not header_seen:
        raise FormatError("missing 'mse 1' header")
    for name, val in (("mode", mode), ("vertices", nvert), ("s", s), ("t", t), ("p", p), ("k", k)):
        if val is None:
            raise FormatError(f"missing '{name}' line")
    if p is not None and p < 1:
        raise FormatError("zero p")
    for e in edges:
        if not (0 <= e.tail < nvert and 0 <= e.head < nvert):
            raise FormatError(f"unknown vertex in edge {e.tail} {e.head}")
    graph = Graph(mode, nvert, tuple(edges), coords or None)
    try:
        return Instance(graph, s, t, p, k)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def serialize_instance(inst: Instance, include_polylines: bool = True) -> str:
    """Canonical text form; parse(serialize(x)) == x."""
    g = inst.graph
    out = ["mse 1", f"mode {g.mode}", f"vertices {g.vertex_count}",
           f"s {inst.s}", f"t {inst.t}", f"p {inst.p}", f"k {inst.k}"]
    if g.coords:
        for v in sorted(g.coords):
            x, y = g.coords[v]
            out.append(f"coord {v} {x} {y}")
    for e in g.edges:
        if e.length == 1 and e.polyline is None:
            out.append(f"edge {e.tail} {e.head}")
        else:
            line = f"chain {e.tail} {e.head} {e.length}"
            if include_polylines and e.polyline is not None:
                coords = " ".join(f"{x} {y}" for x, y in e.expand_points())
                line += " " + coords
            out.append(line)
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> Solution:
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines or lines[0].split() != ["msesol", "1"]:
        raise FormatError("missing 'msesol 1' header")
    if len(lines) < 2 or not lines[1].startswith("paths "):
        raise FormatError("missing 'paths' line")
    want = int(lines[1].split()[1])
    paths = []
    step_re = re.compile(r"^(\d+)([+-]?)$")
    for ln, line in enumerate(lines[2:], 3):
        parts = line.split()
        if parts[0] != "path":
            raise FormatError(f"line {ln}: expected 'path'")
        steps = []
        for tok in parts[1:]:
            m = step_re.match(tok)
            if not m:
                raise FormatError(f"line {ln}: bad step {tok!r}")
            steps.append((int(m.group(1)), m.group(2) != "-"))
        paths.append(PathSeq(tuple(steps)))
    if len(paths) != want:
        raise FormatError(f"expected {want} paths, found {len(paths)}")
    return Solution(tuple(paths))


def serialize_solution(sol: Solution) -> str:
    out = ["msesol 1", f"paths {len(sol.paths)}"]
    for p in sol.paths:
        toks = [f"{eid}{'+' if fwd else '-'}" for eid, fwd in p.steps]
        out.append("path " + " ".join(toks))
    return "\n".join(out) + "\n"
