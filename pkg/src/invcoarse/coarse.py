"""r-components, asymptotic dimension 0, sparseness and local finiteness at scale.

Everything here works on finite tables.  For infinite families a verdict is
never ``Established``: truncated scopes yield ``EvidenceAtScale`` (with a
``polarity`` statistic saying which way the evidence points) or
``RefutedAtScale`` with a witness that is re-checked independently.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .metric import INF, CoarseVerdict, _dijkstra, length_from_metric
from .semigroup import generate_closure


class AlignmentError(ValueError):
    """Two tables that must share an element scope do not."""


@dataclass(frozen=True)
class Block:
    members: tuple  # element indices, canonical order
    diameter: int
    touches_frontier: bool

    @property
    def size(self):
        return len(self.members)


@dataclass(frozen=True)
class RComponentPartition:
    scale: int
    blocks: tuple
    scope: str
    block_of: tuple

    def sizes(self):
        return [b.size for b in self.blocks]

    def to_csv_rows(self, d):
        from .metric import key_text

        rows = []
        for i, a in enumerate(d.elements):
            b = self.block_of[i]
            rows.append((key_text(d.oracle, a), b, self.blocks[b].size))
        return rows


def _frontier_reach(d, r):
    """Elements within ``r - 1`` of a frontier vertex of their class."""
    near = set()
    if r < 1:
        return near
    for f in d.frontier:
        c = d.class_id[f]
        row = d.dist[c][d.pos[f]]
        for p, i in enumerate(d.classes[c]):
            if 0 <= row[p] <= r - 1:
                near.add(i)
    return near


def r_components(d, r, keep=None):
    """Union-find over in-scope pairs with ``d <= r``.

    Blocks are listed by their least canonical key.  A block touches the
    frontier when one of its members lies within ``r - 1`` of a vertex with
    an edge leaving the scope, i.e. when the block might continue outside.
    ``keep`` optionally restricts to a subset of element indices.
    """
    if r < 0:
        raise ValueError("scale must be nonnegative")
    o = d.oracle
    idx = range(len(d.elements)) if keep is None else sorted(keep)
    inside = set(idx)
    ds = DisjointSet(idx)
    for i, j, _ in d.pairs(r):
        if i in inside and j in inside:
            ds.merge(i, j)
    near = _frontier_reach(d, r)
    key = lambda i: o.sort_key(d.elements[i])
    groups = [sorted(g, key=key) for g in ds.subsets()]
    groups.sort(key=lambda g: key(g[0]))
    blocks = []
    block_of = [-1] * len(d.elements)
    for b, g in enumerate(groups):
        c = d.class_id[g[0]]
        ps = [d.pos[i] for i in g]
        sub = d.dist[c][np.ix_(ps, ps)]
        diam = int(sub.max()) if sub.size else 0
        blocks.append(Block(tuple(g), diam, any(i in near for i in g)))
        for i in g:
            block_of[i] = b
    return RComponentPartition(r, tuple(blocks), d.status, tuple(block_of))


def _scope_top(d):
    return max(d.depth) if d.depth else 0


def _half_scope(d):
    top = _scope_top(d)
    return {i for i, g in enumerate(d.depth) if g <= math.ceil(top / 2)}


def _r_graph(d, block, r):
    members = set(block.members)
    adj = {i: [] for i in block.members}
    for i, j, _ in d.pairs(r):
        if i in members and j in members:
            adj[i].append(j)
    return adj


def _bfs(adj, start, key):
    parent = {start: None}
    dist = {start: 0}
    q = deque([start])
    while q:
        u = q.popleft()
        for v in sorted(adj[u], key=key):
            if v not in dist:
                dist[v] = dist[u] + 1
                parent[v] = u
                q.append(v)
    far = min(dist, key=lambda v: (-dist[v], key(v)))
    return far, dist, parent


def long_path(d, block, r):
    """A long ``r``-path inside ``block`` by a double sweep of breadth-first search.

    Sweep from the least member to the farthest vertex ``u`` (least key among
    ties), then from ``u`` to the farthest ``v``; of the two orientations of
    the resulting path the one with the smaller starting key is returned.
    """
    key = lambda i: d.oracle.sort_key(d.elements[i])
    adj = _r_graph(d, block, r)
    u, _, _ = _bfs(adj, block.members[0], key)
    v, _, parent = _bfs(adj, u, key)
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    if key(path[-1]) < key(path[0]):
        path.reverse()
    return [d.elements[i] for i in path]


def revalidate_path(oracle, gens, path, r):
    """Recompute each consecutive distance from scratch with the oracle."""
    for a, b in zip(path, path[1:]):
        if oracle.left_idempotent(a) != oracle.left_idempotent(b):
            return False
        got = _dijkstra(a, gens.neighbours, cutoff=r)
        if b not in got:
            return False
    return len(set(path)) == len(path)


def asdim0_evidence(d, scales):
    """Uniform boundedness of r-components, per scale.

    Complete scopes are finite, hence Established.  On a truncation the
    largest block inside the scope is compared with the largest block inside
    the half scope (grade ``<= ceil(R/2)``); growth refutes at scale and the
    witness is a long path through the largest block.
    """
    stats = {}
    top = _scope_top(d)
    half = _half_scope(d)
    refuted = None
    for r in scales:
        part = r_components(d, r)
        sub = r_components(d, r, keep=half)
        m, mh = max(part.sizes(), default=0), max(sub.sizes(), default=0)
        diam = max((b.diameter for b in part.blocks), default=0)
        stats[str(r)] = {"max_block_size": m, "max_block_size_half_scope": mh, "max_diameter": diam}
        if not d.complete and m > mh and refuted is None:
            big = next(b for b in part.blocks if b.size == m)
            refuted = (r, big)
    if d.complete:
        return CoarseVerdict("AsDim0", "Established", None, {"scales": stats})
    if refuted is None:
        stats_all = {"scales": stats, "polarity": "positive"}
        return CoarseVerdict("AsDim0", "EvidenceAtScale", top, stats_all)
    r, big = refuted
    path = long_path(d, big, r)
    ok = d.gens is not None and revalidate_path(d.oracle, d.gens, path, r)
    stats_all = {
        "scales": stats,
        "polarity": "negative",
        "witness_scale": r,
        "witness_length": len(path) - 1,
        "witness_revalidated": ok,
    }
    return CoarseVerdict("AsDim0", "RefutedAtScale", top, stats_all, tuple(path))


def sparse_evidence(d, scales):
    """Finiteness of r-components, per scale.

    A block with no frontier contact is closed, so finite.  A block that
    touches the frontier is Indeterminate.  On a truncation the evidence is
    positive when every block meeting the half scope is closed; negative
    otherwise (the component of a deep interior element runs off the scope).
    """
    stats = {}
    half = _half_scope(d)
    negative = []
    for r in scales:
        part = r_components(d, r)
        closed = [b for b in part.blocks if not b.touches_frontier]
        open_ = [b for b in part.blocks if b.touches_frontier]
        deep_open = [b for b in open_ if any(i in half for i in b.members)]
        stats[str(r)] = {
            "closed_blocks": len(closed),
            "indeterminate_blocks": len(open_),
            "max_closed_size": max((b.size for b in closed), default=0),
            "closed_sizes": sorted({b.size for b in closed}),
            "deep_indeterminate_blocks": len(deep_open),
        }
        if deep_open and not negative:
            negative = [d.elements[i] for i in deep_open[0].members]
    if d.complete:
        return CoarseVerdict("Sparse", "Established", None, {"scales": stats})
    polarity = "negative" if negative else "positive"
    return CoarseVerdict(
        "Sparse", "EvidenceAtScale", _scope_top(d), {"scales": stats, "polarity": polarity}, tuple(negative)
    )


def coarse_profile(d, d2):
    """Empirical control functions between two metrics on the same scope.

    ``rho_minus(r) = min{l2(s) : l(s) >= r}`` and
    ``rho_plus(r) = max{l2(s) : l(s) <= r}`` over observed lengths ``r``;
    every finite pair is checked against them.
    """
    if d.elements != d2.elements:
        raise AlignmentError("the two tables are over different element scopes")
    l1 = length_from_metric(d)
    l2 = length_from_metric(d2)
    pairs = [(a, b) for a, b in zip(l1.values, l2.values) if a is not None and b is not None]
    observed = sorted({a for a, _ in pairs})
    rho_minus = {r: min(b for a, b in pairs if a >= r) for r in observed}
    rho_plus = {r: max(b for a, b in pairs if a <= r) for r in observed}

    def lower(r):
        ge = [v for k, v in rho_minus.items() if k >= r]
        return min(ge) if ge else INF

    def upper(r):
        le = [v for k, v in rho_plus.items() if k <= r]
        return max(le) if le else 0

    violations = []
    for i, j, v in d.pairs():
        w = d2.d(i, j)
        if w == INF or not (lower(v) <= w <= upper(v)):
            violations.append((d.elements[i], d.elements[j]))
    nonmono = [r for a, r in zip(observed, observed[1:]) if rho_plus[r] < rho_plus[a]]
    return {
        "rho_minus": rho_minus,
        "rho_plus": rho_plus,
        "violations": violations,
        "non_monotone": nonmono,
        "scope": d.status,
    }


def profile_growth(tables, r=1):
    """``rho_plus(r)`` across a sequence of ``(scope, d, d2)`` tables.

    Flags ``unbounded`` when the value strictly increases with every scope.
    """
    series = []
    for scope, d, d2 in tables:
        prof = coarse_profile(d, d2)
        series.append((scope, prof["rho_plus"].get(r)))
    vals = [v for _, v in series]
    grows = all(b is not None and a is not None and b > a for a, b in zip(vals, vals[1:]))
    return {"r": r, "series": series, "unbounded": bool(grows and len(vals) > 1)}


# ---------------------------------------------------------------------------
# local finiteness
# ---------------------------------------------------------------------------


def _level_counts(S):
    counts = {}
    for k in S.depth:
        counts[k] = counts.get(k, 0) + 1
    return [counts[k] for k in sorted(counts)]


def _complete_levels(S):
    top = max(S.depth, default=0)
    return top if S.complete else top - 1


def local_finiteness_probe(oracle, generator_sets, cap=10_000):
    """Close each finite generator set; all Complete is positive evidence."""
    runs = []
    truncated = []
    for k, gens in enumerate(generator_sets):
        S = generate_closure(oracle, list(gens), cap=cap)
        runs.append({"set": k, "status": S.label, "size": len(S), "level_sizes": _level_counts(S)})
        if not S.complete:
            truncated.append(k)
    stats = {"runs": runs}
    if oracle.finite:
        return CoarseVerdict("LocallyFinite", "Established", None, stats)
    stats["polarity"] = "negative" if truncated else "positive"
    return CoarseVerdict("LocallyFinite", "EvidenceAtScale", cap, stats)


def local_L_finiteness_probe(oracle, generator_sets, cap=10_000):
    """Watch L-class sizes level by level inside each (possibly truncated) closure.

    With ``L`` the last fully explored word length, every class first met at
    level ``<= L/3`` must keep the same size from level ``floor(2L/3)`` to
    ``L``.  A class that still grows there is the refutation witness.
    """
    runs = []
    witness = None
    for k, gens in enumerate(generator_sets):
        S = generate_closure(oracle, list(gens), cap=cap)
        L = _complete_levels(S)
        first, growth = {}, {}
        for a, lvl in zip(S.elements, S.depth):
            if lvl > L:
                continue
            e = oracle.left_idempotent(a)
            first.setdefault(e, lvl)
            growth.setdefault(e, {})
            growth[e][lvl] = growth[e].get(lvl, 0) + 1
        growing = []
        mid = (2 * L) // 3
        for e, f in first.items():
            if 3 * f > L:
                continue
            added = sum(c for lvl, c in growth[e].items() if mid < lvl <= L)
            if added and not S.complete:
                growing.append(e)
        growing.sort(key=oracle.sort_key)
        sizes = {}
        for e in growing[:1]:
            total, curve = 0, []
            for lvl in range(1, L + 1):
                total += growth[e].get(lvl, 0)
                curve.append(total)
            sizes = {"idempotent": e, "size_by_level": curve}
        runs.append({"set": k, "status": S.label, "levels": L, "growing_classes": len(growing)})
        if growing and witness is None:
            witness = sizes
    stats = {"runs": runs}
    if oracle.finite:
        return CoarseVerdict("LocallyLFinite", "Established", None, stats)
    if witness is not None:
        stats["polarity"] = "negative"
        stats["size_by_level"] = witness["size_by_level"]
        return CoarseVerdict("LocallyLFinite", "RefutedAtScale", cap, stats, (witness["idempotent"],))
    stats["polarity"] = "positive"
    return CoarseVerdict("LocallyLFinite", "EvidenceAtScale", cap, stats)
