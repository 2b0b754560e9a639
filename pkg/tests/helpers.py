"""Shared test fixtures: tiny graph builders and brute-force oracles."""

from __future__ import annotations

import itertools
from collections import deque

from minshared.core import DIRECTED, UNDIRECTED, Graph, Instance, SuperEdge


def graph_from_edges(n, pairs, mode=UNDIRECTED, coords=None):
    return Graph(mode, n, tuple(SuperEdge(u, v) for u, v in pairs), coords)


def cycle4(mode=UNDIRECTED):
    """v0-v1-v2-v3-v0; edge ids 0:(0,1) 1:(1,2) 2:(2,3) 3:(3,0)."""
    return graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], mode)


def path_graph(n, mode=UNDIRECTED):
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)], mode)


def grid_graph(n, m):
    """n columns, m rows; vertex (x, y) -> x * m + y, with coords."""
    edges = []
    coords = {}
    for x in range(n):
        for y in range(m):
            coords[x * m + y] = (x, y)
            if x + 1 < n:
                edges.append((x * m + y, (x + 1) * m + y))
            if y + 1 < m:
                edges.append((x * m + y, x * m + y + 1))
    return graph_from_edges(n * m, edges, UNDIRECTED, coords)


def grid_vertex(m, x, y):
    return x * m + y


def is_connected(n, pairs):
    if n == 0:
        return True
    adj = [[] for _ in range(n)]
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    q = deque([0])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                q.append(v)
    return len(seen) == n


def brute_force_max_flow(graph: Graph, s: int, t: int, caps: dict[int, int]) -> int:
    """Max number of s-t unit augmentations by exhaustive search over integral
    flows; only usable on graphs with a handful of edges.

    Enumerates all assignments of signed flow per edge within capacity and
    checks conservation, maximising net outflow at s.
    """
    edges = graph.edges
    ranges = []
    for i, e in enumerate(edges):
        c = caps.get(i, 1)
        if graph.directed:
            ranges.append(range(0, c + 1))
        else:
            ranges.append(range(-c, c + 1))
    best = 0
    for assign in itertools.product(*ranges):
        net = [0] * graph.vertex_count
        for f, e in zip(assign, edges):
            net[e.tail] += f
            net[e.head] -= f
        if any(net[v] != 0 for v in range(graph.vertex_count) if v not in (s, t)):
            continue
        if net[s] >= 0 and net[s] == -net[t]:
            best = max(best, net[s])
    return best


def brute_force_min_shared(graph: Graph, s: int, t: int, p: int) -> float:
    """Minimum shared unit-edge count over all p-multisets of simple paths."""
    from minshared.solver import enumerate_simple_paths

    paths = enumerate_simple_paths(graph, s, t)
    if not paths:
        return float("inf")
    best = float("inf")
    edge_sets = [frozenset(q.edge_ids()) for q in paths]
    for combo in itertools.combinations_with_replacement(range(len(paths)), p):
        usage = {}
        for i in combo:
            for eid in edge_sets[i]:
                usage[eid] = usage.get(eid, 0) + 1
        shared = sum(graph.edges[e].length for e, cnt in usage.items() if cnt >= 2)
        best = min(best, shared)
    return best


def _degree_classes(n, pairs):
    deg = [0] * n
    for u, v in pairs:
        deg[u] += 1
        deg[v] += 1
    classes = {}
    for v in range(n):
        classes.setdefault(deg[v], []).append(v)
    return [classes[d] for d in sorted(classes)]


def _canonical_perms(n, pairs):
    """Relabelings that sort vertices into degree-ordered position blocks;
    the canonical form is the minimum relabelled edge list over these."""
    groups = _degree_classes(n, pairs)
    blocks = []
    pos = 0
    for members in groups:
        blocks.append(list(range(pos, pos + len(members))))
        pos += len(members)
    for parts in itertools.product(*(itertools.permutations(b) for b in blocks)):
        pi = [0] * n
        for members, assigned in zip(groups, parts):
            for v, p in zip(members, assigned):
                pi[v] = p
        yield tuple(pi)


def _stabilizer_perms(n, pairs):
    """Permutations mapping each degree class onto itself (automorphism
    candidates)."""
    groups = _degree_classes(n, pairs)
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        pi = [0] * n
        for orig_group, new_group in zip(groups, parts):
            for o, w in zip(orig_group, new_group):
                pi[o] = w
        yield tuple(pi)


def canonical_form(n, pairs):
    return min(
        tuple(sorted(tuple(sorted((pi[u], pi[v]))) for u, v in pairs))
        for pi in _canonical_perms(n, pairs)
    )


def all_connected_graphs_upto_iso(max_n, max_edges):
    """Non-isomorphic connected undirected simple graphs, n in 2..max_n,
    with at most max_edges edges."""
    out = []
    for n in range(2, max_n + 1):
        all_pairs = list(itertools.combinations(range(n), 2))
        seen = set()
        for bits in range(1 << len(all_pairs)):
            if bin(bits).count("1") > max_edges or bin(bits).count("1") < n - 1:
                continue
            pairs = [all_pairs[i] for i in range(len(all_pairs)) if bits >> i & 1]
            if not is_connected(n, pairs):
                continue
            canon = canonical_form(n, pairs)
            if canon in seen:
                continue
            seen.add(canon)
            out.append((n, pairs))
    return out


def st_orbit_pairs(n, pairs):
    """(s, t) ordered pairs deduplicated by graph automorphisms."""
    pairset = set(tuple(sorted(e)) for e in pairs)
    autos = [
        pi
        for pi in _stabilizer_perms(n, pairs)
        if set(tuple(sorted((pi[u], pi[v]))) for u, v in pairset) == pairset
    ]
    seen = set()
    reps = []
    for s in range(n):
        for t in range(n):
            if s == t or (s, t) in seen:
                continue
            reps.append((s, t))
            for pi in autos:
                seen.add((pi[s], pi[t]))
    return reps


def make_instance(graph, s, t, p, k):
    return Instance(graph, s, t, p, k)
