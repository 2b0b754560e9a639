"""Unit-capacity max-flow with a boosted edge set, min cuts, path decomposition.

Boosting an edge to capacity `ceiling` (= p) is the flow-side stand-in for
declaring it shared: a flow of value p under boosted capacities decomposes
into p paths whose shared edges all lie in the boosted set, and conversely
the indicator vectors of any p-path solution sum to such a flow.

Undirected edges are realised as anti-parallel arc pairs with a single signed
net-flow variable per unit edge, so cancellation is automatic and a
non-boosted unit edge carries at most one total unit.  Everything is
deterministic: ties break by lowest edge id.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import Expansion, Graph, Instance, PathSeq, expand_chains


@dataclass(frozen=True)
class BoostedCaps:
    """Capacity ceiling for boosted super-edges, 1 per unit edge otherwise."""

    boosted: frozenset[int]
    ceiling: int

    def __post_init__(self):
        if self.ceiling < 1:
            raise ValueError("ceiling must be positive")


@dataclass
class FlowResult:
    value: int
    arc_flow: list[int]  # signed net flow per expanded unit edge
    expansion: Expansion
    boosted_units: frozenset[int]
    ceiling: int
    min_cut: Optional[frozenset[int]] = None  # super-edge ids; set when value < ceiling


class _Net:
    """Residual network over the expanded unit edges."""

    def __init__(self, g: Graph, boosted_units: frozenset[int], ceiling: int):
        self.g = g
        self.cap = [ceiling if i in boosted_units else 1 for i in range(len(g.edges))]
        self.flow = [0] * len(g.edges)
        self.directed = g.directed
        self.adj: list[list[int]] = [[] for _ in range(g.vertex_count)]
        for i, e in enumerate(g.edges):
            self.adj[e.tail].append(i)
            self.adj[e.head].append(i)

    def residual(self, eid: int, frm: int) -> int:
        e = self.g.edges[eid]
        if frm == e.tail:
            return self.cap[eid] - self.flow[eid]
        if self.directed:
            return self.flow[eid]
        return self.cap[eid] + self.flow[eid]

    def push(self, eid: int, frm: int, amount: int = 1):
        e = self.g.edges[eid]
        self.flow[eid] += amount if frm == e.tail else -amount

    def augment_once(self, s: int, t: int) -> bool:
        """One shortest augmenting path, neighbours scanned in edge-id order."""
        parent: dict[int, tuple[int, int]] = {}
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            if u == t:
                break
            for eid in self.adj[u]:
                e = self.g.edges[eid]
                v = e.head if e.tail == u else e.tail
                if v in seen or self.residual(eid, u) <= 0:
                    continue
                seen.add(v)
                parent[v] = (u, eid)
                q.append(v)
        if t not in seen:
            return False
        v = t
        while v != s:
            u, eid = parent[v]
            self.push(eid, u)
            v = u
        return True

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for eid in self.adj[u]:
                e = self.g.edges[eid]
                v = e.head if e.tail == u else e.tail
                if v not in seen and self.residual(eid, u) > 0:
                    seen.add(v)
                    q.append(v)
        return seen


def _boosted_units(exp: Expansion, caps: BoostedCaps) -> frozenset[int]:
    units = set()
    for sid in caps.boosted:
        units.update(exp.runs[sid])
    return frozenset(units)


def max_flow_boosted(inst: Instance, caps: BoostedCaps) -> FlowResult:
    """Max s-t flow under boosted capacities, capped at caps.ceiling."""
    exp = expand_chains(inst.graph)
    units = _boosted_units(exp, caps)
    net = _Net(exp.graph, units, caps.ceiling)
    value = 0
    while value < caps.ceiling and net.augment_once(inst.s, inst.t):
        value += 1
    result = FlowResult(value, net.flow, exp, units, caps.ceiling)
    if value < caps.ceiling:
        reach = net.reachable(inst.s)
        cut_supers = set()
        for eid, e in enumerate(exp.graph.edges):
            if exp.graph.directed:
                crosses = e.tail in reach and e.head not in reach
            else:
                crosses = (e.tail in reach) != (e.head in reach)
            if crosses:
                sid = exp.owner[eid]
                assert sid not in caps.boosted, "boosted edge in a < ceiling cut"
                cut_supers.add(sid)
        result.min_cut = frozenset(cut_supers)
    return result


def min_cut_boosted(inst: Instance, caps: BoostedCaps) -> frozenset[int]:
    """A cut of capacity < ceiling made of non-boosted super-edges.

    Only defined when the boosted max flow is below the ceiling.
    """
    fr = max_flow_boosted(inst, caps)
    if fr.value >= caps.ceiling:
        raise ValueError("no small cut: flow reaches the ceiling")
    return fr.min_cut


def decompose_to_paths(inst: Instance, fr: FlowResult, count: int) -> list[PathSeq]:
    """Extract `count` simple s-t paths from an integral flow.

    Cycles met along a walk are cancelled from the flow (loop-erasure), so the
    returned paths are simple and every non-boosted unit edge appears in at
    most one of them.
    """
    if fr.value < count:
        raise ValueError(f"flow value {fr.value} below requested count {count}")
    exp = fr.expansion
    g = exp.graph
    flow = list(fr.arc_flow)
    out_arcs: list[list[int]] = [[] for _ in range(g.vertex_count)]
    for eid, e in enumerate(g.edges):
        out_arcs[e.tail].append(eid)
        if not g.directed:
            out_arcs[e.head].append(eid)

    def next_arc(u: int) -> tuple[int, bool]:
        for eid in out_arcs[u]:
            e = g.edges[eid]
            if e.tail == u and flow[eid] > 0:
                return eid, True
            if not g.directed and e.head == u and flow[eid] < 0:
                return eid, False
        raise AssertionError(f"flow conservation broken at vertex {u}")

    paths = []
    for _ in range(count):
        steps: list[tuple[int, bool]] = []
        visited_at = {inst.s: 0}
        u = inst.s
        while u != inst.t:
            eid, fwd = next_arc(u)
            flow[eid] += -1 if fwd else 1
            e = g.edges[eid]
            v = e.head if fwd else e.tail
            steps.append((eid, fwd))
            if v in visited_at:
                steps = steps[: visited_at[v]]  # cycle already cancelled from flow
                visited_at = {w: i for w, i in visited_at.items() if i <= visited_at[v]}
                u = v
                continue
            visited_at[v] = len(steps)
            u = v
        paths.append(exp.compress_path(PathSeq(tuple(steps))))
    return paths
