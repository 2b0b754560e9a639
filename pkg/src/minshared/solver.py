"""Exact MSE/DMSE decision and witnesses.

Three routes to the same answer, used to cross-check each other:

* solve_exhaustive_paths - enumerate all simple s-t paths, then all
  p-multisets; ground truth on tiny graphs.
* solve_enum_oracle - enumerate candidate shared sets S (super-edges, chain
  lengths charged fully) and test an s-t flow of value p with S boosted.
* solve_fpt_branching - branch on the edges of a < p cut, boosting one per
  child; the search tree has at most (p-1)^k nodes on unit-edge graphs.

Branch children could be evaluated in parallel; results are defined to be
identical to sequential evaluation (first witness in edge-id order wins), so
the sequential implementation below is the reference behaviour.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

from .core import Graph, Instance, PathSeq, Solution, distance, verify_solution
from .flow import BoostedCaps, decompose_to_paths, max_flow_boosted


class GuardExceeded(RuntimeError):
    """Input too large for the requested exact method."""


@dataclass(frozen=True)
class SolveReport:
    answer: bool
    method: str
    witness: Optional[Solution] = None
    shared_set: Optional[frozenset[int]] = None
    nodes_explored: int = 0

    def __bool__(self) -> bool:
        return self.answer


MAX_EXHAUSTIVE_PATHS = 64
MAX_EXHAUSTIVE_MULTISETS = 10_000_000
MAX_ENUM_SUBSETS = 100_000_000


def enumerate_simple_paths(g: Graph, s: int, t: int, limit: Optional[int] = None) -> list[PathSeq]:
    """All simple s-t paths as edge-id sequences, DFS in edge-id order."""
    adj = g.adjacency()
    paths: list[PathSeq] = []
    steps: list[tuple[int, bool]] = []
    on_path = {s}

    def dfs(u: int):
        if u == t:
            paths.append(PathSeq(tuple(steps)))
            if limit is not None and len(paths) > limit:
                raise GuardExceeded(f"more than {limit} simple s-t paths")
            return
        for eid in adj[u]:
            e = g.edges[eid]
            fwd = e.tail == u
            v = e.head if fwd else e.tail
            if v in on_path:
                continue
            on_path.add(v)
            steps.append((eid, fwd))
            dfs(v)
            steps.pop()
            on_path.remove(v)

    dfs(s)
    return paths


def _multiset_count(n_paths: int, p: int) -> int:
    return math.comb(n_paths + p - 1, p)


def solve_exhaustive_paths(inst: Instance) -> SolveReport:
    """Minimum shared count over all p-multisets of simple paths; too-large
    inputs are refused rather than silently sampled."""
    g = inst.graph
    paths = enumerate_simple_paths(g, inst.s, inst.t, limit=MAX_EXHAUSTIVE_PATHS)
    if not paths:
        return SolveReport(False, "exhaustive")
    if _multiset_count(len(paths), inst.p) > MAX_EXHAUSTIVE_MULTISETS:
        raise GuardExceeded("too large for exhaustive multiset enumeration")
    edge_sets = [frozenset(p.edge_ids()) for p in paths]
    best = None
    best_combo = None
    nodes = 0
    for combo in itertools.combinations_with_replacement(range(len(paths)), inst.p):
        nodes += 1
        usage: dict[int, int] = {}
        for i in combo:
            for eid in edge_sets[i]:
                usage[eid] = usage.get(eid, 0) + 1
        shared = sum(g.edges[e].length for e, n in usage.items() if n >= 2)
        if best is None or shared < best:
            best, best_combo = shared, combo
            if best == 0:
                break
    witness = Solution(tuple(paths[i] for i in best_combo))
    answer = best <= inst.k
    return SolveReport(
        answer,
        "exhaustive",
        witness=witness if answer else None,
        shared_set=frozenset(witness.shared_edge_ids()) if answer else None,
        nodes_explored=nodes,
    )


def _shortest_path(inst: Instance) -> Optional[PathSeq]:
    """A shortest s-t path by chain-weighted Dijkstra, edge-id tie-break."""
    import heapq

    g = inst.graph
    adj = g.adjacency()
    dist = {inst.s: 0}
    parent: dict[int, tuple[int, int, bool]] = {}
    heap = [(0, inst.s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for eid in adj[u]:
            e = g.edges[eid]
            fwd = e.tail == u
            v = e.head if fwd else e.tail
            nd = d + e.length
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                parent[v] = (u, eid, fwd)
                heapq.heappush(heap, (nd, v))
    if inst.t not in dist:
        return None
    steps = []
    v = inst.t
    while v != inst.s:
        u, eid, fwd = parent[v]
        steps.append((eid, fwd))
        v = u
    return PathSeq(tuple(reversed(steps)))


def _trivial_report(inst: Instance, method: str) -> Optional[SolveReport]:
    """The trivial solution (p identical shortest paths) when dist(s,t) <= k."""
    if distance(inst.graph, inst.s, inst.t) > inst.k:
        return None
    path = _shortest_path(inst)
    witness = Solution((path,) * inst.p)
    shared = frozenset(witness.shared_edge_ids())
    return SolveReport(True, method, witness=witness, shared_set=shared, nodes_explored=0)


def _subsets_within_budget(g: Graph, budget: int):
    """Super-edge subsets with total expanded length <= budget, lazily, in
    ascending (size, lexicographic id) order."""
    lengths = [e.length for e in g.edges]
    n = len(lengths)

    def fixed_size(start: int, left: int, need: int, acc: list[int]):
        if need == 0:
            yield frozenset(acc)
            return
        for i in range(start, n - need + 1):
            if lengths[i] <= left:
                acc.append(i)
                yield from fixed_size(i + 1, left - lengths[i], need - 1, acc)
                acc.pop()

    for size in range(0, min(n, budget) + 1):
        yield from fixed_size(0, budget, size, [])


def solve_enum_oracle(inst: Instance) -> SolveReport:
    """Yes iff some boost set S of expanded size <= k allows a flow of p."""
    g = inst.graph
    trivial = _trivial_report(inst, "enum")
    if trivial is not None:
        return trivial
    if math.isinf(distance(g, inst.s, inst.t)):
        return SolveReport(False, "enum")
    if math.comb(len(g.edges), min(inst.k, len(g.edges))) > MAX_ENUM_SUBSETS:
        raise GuardExceeded("too many candidate shared sets")
    nodes = 0
    for sub in _subsets_within_budget(g, inst.k):
        nodes += 1
        caps = BoostedCaps(sub, inst.p)
        fr = max_flow_boosted(inst, caps)
        if fr.value >= inst.p:
            paths = decompose_to_paths(inst, fr, inst.p)
            witness = Solution(tuple(paths))
            return SolveReport(True, "enum", witness=witness, shared_set=sub, nodes_explored=nodes)
    return SolveReport(False, "enum", nodes_explored=nodes)


def solve_fpt_branching(inst: Instance) -> SolveReport:
    """Branch on the edges of a residual < p cut, boosting one per child.

    A solution's shared set must hit every cut smaller than p, so the
    branching is complete; boosting a chain charges its full length against
    the budget, and cut edges longer than the remaining budget are pruned.
    Identical boost sets reached along different branch orders are memoised.
    """
    g = inst.graph
    trivial = _trivial_report(inst, "branching")
    if trivial is not None:
        return trivial

    lengths = [e.length for e in g.edges]
    nodes = 0
    memo: dict[frozenset[int], bool] = {}

    def rec(boosts: frozenset[int], budget: int) -> Optional[SolveReport]:
        nonlocal nodes
        nodes += 1
        if boosts in memo:
            return None  # known dead end
        caps = BoostedCaps(boosts, inst.p)
        fr = max_flow_boosted(inst, caps)
        if fr.value >= inst.p:
            paths = decompose_to_paths(inst, fr, inst.p)
            return SolveReport(True, "branching", witness=Solution(tuple(paths)), shared_set=boosts)
        if budget > 0:
            for eid in sorted(fr.min_cut):
                if lengths[eid] <= budget:
                    got = rec(boosts | {eid}, budget - lengths[eid])
                    if got is not None:
                        return got
        memo[boosts] = False
        return None

    got = rec(frozenset(), inst.k)
    if got is None:
        return SolveReport(False, "branching", nodes_explored=nodes)
    return SolveReport(True, "branching", witness=got.witness, shared_set=got.shared_set,
                       nodes_explored=nodes)


def extract_witness(report: SolveReport, inst: Instance) -> Solution:
    """The verified witness of a yes-report."""
    if not report.answer:
        raise ValueError("no witness: the report answer is no")
    assert report.witness is not None
    verdict = verify_solution(inst, report.witness)
    if not verdict.answer:
        raise AssertionError(f"stored witness failed verification: {verdict.reason}")
    return report.witness


# ---------------------------------------------------------------------------
# anti-parallel normalisation (directed instances)

def _find_antiparallel_conflict(g: Graph, sol: Solution) -> Optional[tuple[int, int, int, int]]:
    """(path index a, arc e, path index b, arc e') with e=(u,v), e'=(v,u) used
    by different paths; lowest arc-id pair first."""
    arcs_between: dict[tuple[int, int], list[int]] = {}
    for eid, e in enumerate(g.edges):
        arcs_between.setdefault((e.tail, e.head), []).append(eid)
    users: dict[int, list[int]] = {}
    for i, p in enumerate(sol.paths):
        for eid in p.edge_ids():
            users.setdefault(eid, []).append(i)
    for eid in sorted(users):
        e = g.edges[eid]
        for mate in arcs_between.get((e.head, e.tail), ()):
            if mate not in users:
                continue
            for a in users[eid]:
                for b in users[mate]:
                    if a != b:
                        return a, eid, b, mate
    return None


def _simplify_walk(g: Graph, steps: list[tuple[int, bool]], start: int) -> PathSeq:
    """Remove all cycles from an edge walk, keeping a simple path."""
    kept: list[tuple[int, bool]] = []
    pos = {start: 0}
    cur = start
    for eid, fwd in steps:
        e = g.edges[eid]
        cur = e.head if fwd else e.tail
        kept.append((eid, fwd))
        if cur in pos:
            kept = kept[: pos[cur]]
            pos = {w: i for w, i in pos.items() if i <= pos[cur]}
        else:
            pos[cur] = len(kept)
    return PathSeq(tuple(kept))


def normalize_antiparallel(inst: Instance, sol: Solution) -> Solution:
    """Rewire paths so no anti-parallel arc pair is used in both directions.

    Whenever P_A uses (u,v) and P_B uses (v,u), P_A becomes
    P_A[s,u] . P_B[u,t] and P_B becomes P_B[s,v] . P_A[v,t], with all cycles
    removed.  Total edge occurrences drop strictly at each rewrite, so this
    terminates; the shared count never increases.
    """
    g = inst.graph
    if not g.directed:
        raise ValueError("normalisation applies to directed instances")
    verdict = verify_solution(inst, sol)
    if not verdict.answer:
        raise ValueError(f"input solution invalid: {verdict.reason}")

    paths = list(sol.paths)
    while True:
        conflict = _find_antiparallel_conflict(g, Solution(tuple(paths)))
        if conflict is None:
            break
        a, e_fwd, b, e_bwd = conflict
        pa, pb = paths[a], paths[b]
        ia = pa.edge_ids().index(e_fwd)
        ib = pb.edge_ids().index(e_bwd)
        # pa: s ->[.. ia-1] u -(u,v)-> v ->[ia+1 ..] t
        # pb: s ->[.. ib-1] v -(v,u)-> u ->[ib+1 ..] t
        new_a = list(pa.steps[:ia]) + list(pb.steps[ib + 1 :])
        new_b = list(pb.steps[:ib]) + list(pa.steps[ia + 1 :])
        paths[a] = _simplify_walk(g, new_a, inst.s)
        paths[b] = _simplify_walk(g, new_b, inst.s)

    out = Solution(tuple(paths))
    check = verify_solution(inst, out)
    if not check.answer:
        raise AssertionError(f"normalisation broke the solution: {check.reason}")
    if out.shared_count(g) > sol.shared_count(g):
        raise AssertionError("normalisation increased the shared count")
    return out
