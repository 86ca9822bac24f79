"""Realise a finite metric space as an L-class of partial bijections.

Pairs at distance ``n`` form the graph ``Gamma_n``; an edge colouring of
``Gamma_n`` splits it into matchings, and each matching becomes an
involution of weight ``n``.  In the inverse monoid generated by those
involutions and the rank-one idempotents, the L-class of ``id_x`` is
``{gamma(y, x)}`` and its word metric is the shortest-path metric of the
involution edges on the points.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .metric import WeightedGenerators, _dijkstra, weighted_word_metric
from .semigroup import PartialBijection, SymmetricInverseMonoid, gamma


class MetricSpaceError(ValueError):
    """Distance data that is not a uniformly discrete integer metric."""


class DistortionViolation(AssertionError):
    """A pair breaks ``d_X <= d <= d_X + 1``; carries both path certificates."""

    def __init__(self, pair, found, bound, certificates):
        self.pair = pair
        self.found = found
        self.bound = bound
        self.certificates = certificates
        super().__init__(f"pair {pair}: distance {found} outside {bound}")


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    points: tuple
    distances: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.distances)
        n = len(self.points)
        if D.shape != (n, n):
            raise MetricSpaceError(f"distance matrix must be {n}x{n}, got {D.shape}")
        if not np.issubdtype(D.dtype, np.integer):
            if not np.all(np.equal(np.mod(D, 1), 0)):
                raise MetricSpaceError("distances must be integers")
            D = D.astype(np.int64)
        object.__setattr__(self, "distances", D.astype(np.int64))
        if len(set(self.points)) != n:
            raise MetricSpaceError("point labels are not distinct")
        if (np.diag(D) != 0).any():
            raise MetricSpaceError("diagonal must be zero")
        if not np.array_equal(D, D.T):
            raise MetricSpaceError("distance matrix is not symmetric")
        if n > 1 and (D[~np.eye(n, dtype=bool)] < 1).any():
            raise MetricSpaceError("distinct points must be at distance >= 1")
        if n and (D[:, None, :] > D[:, :, None] + D[None, :, :]).any():
            i, j, k = np.argwhere(D[:, None, :] > D[:, :, None] + D[None, :, :])[0]
            raise MetricSpaceError(
                f"triangle inequality fails at {self.points[i]}, {self.points[j]}, {self.points[k]}"
            )

    def __len__(self):
        return len(self.points)

    @property
    def diameter(self):
        return int(self.distances.max()) if len(self) else 0

    def d(self, i, j):
        return int(self.distances[i, j])

    @classmethod
    def from_csv(cls, text):
        """A square distance matrix; an optional first row/column holds labels."""
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows:
            raise MetricSpaceError("empty distance matrix")

        def numeric(row):
            try:
                [float(c) for c in row]
                return True
            except ValueError:
                return False

        labels = None
        if not numeric(rows[0]):
            head = [c.strip() for c in rows[0]]
            rows = rows[1:]
            labels = head[1:] if head and head[0] == "" or len(head) == len(rows) + 1 else head
        if rows and len(rows[0]) == len(rows) + 1:
            labels = [r[0].strip() for r in rows]
            rows = [r[1:] for r in rows]
        try:
            D = np.array([[float(c) for c in r] for r in rows])
        except ValueError as exc:
            raise MetricSpaceError(f"non-numeric distance: {exc}") from None
        if labels is None:
            labels = [str(i) for i in range(len(rows))]
        return cls(tuple(labels), D)

    @classmethod
    def from_json(cls, doc):
        """``{"points", "distances"}`` or ``{"points", "edges": [[u, v, w], ...]}``.

        An edge list is closed under shortest paths.
        """
        if isinstance(doc, str):
            doc = json.loads(doc)
        points = [str(p) for p in doc["points"]]
        if "distances" in doc:
            return cls(tuple(points), np.array(doc["distances"]))
        pos = {p: i for i, p in enumerate(points)}
        g = nx.Graph()
        g.add_nodes_from(range(len(points)))
        for u, v, w in doc["edges"]:
            if int(w) != w or w < 1:
                raise MetricSpaceError(f"edge weight {w} is not a positive integer")
            g.add_edge(pos[str(u)], pos[str(v)], weight=int(w))
        if not nx.is_connected(g):
            raise MetricSpaceError("edge list does not connect all points")
        lengths = dict(nx.all_pairs_dijkstra_path_length(g))
        n = len(points)
        D = np.array([[lengths[i][j] for j in range(n)] for i in range(n)], dtype=np.int64)
        return cls(tuple(points), D)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + list(self.points))
        for p, row in zip(self.points, self.distances.tolist()):
            w.writerow([p] + row)
        return buf.getvalue()


def random_metric_space(rng, size, max_distance):
    """Shortest-path metric of a random complete graph with weights in 1..max_distance."""
    W = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(i + 1, size):
            W[i, j] = W[j, i] = rng.randint(1, max_distance)
    D = W.copy()
    for k in range(size):
        D = np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :])
    return FiniteMetricSpace(tuple(f"p{i}" for i in range(size)), D)


# ---------------------------------------------------------------------------
# edge colouring
# ---------------------------------------------------------------------------


def greedy_edge_coloring(edges):
    """Greedy colouring of the line graph, largest degree first (<= 2Δ - 1 colours)."""
    edges = sorted(tuple(sorted(e)) for e in edges)
    lg = nx.Graph()
    lg.add_nodes_from(edges)
    at = {}
    for e in edges:
        for p in e:
            at.setdefault(p, []).append(e)
    for group in at.values():
        lg.add_edges_from((a, b) for k, a in enumerate(group) for b in group[k + 1 :])
    return nx.greedy_color(lg, strategy="largest_first")


def misra_gries_edge_coloring(edges):
    """Proper edge colouring with at most Δ + 1 colours."""
    adj = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    if not adj:
        return {}
    delta = max(len(s) for s in adj.values())
    palette = range(delta + 1)
    color = {}

    def col(a, b):
        return color.get((a, b) if a < b else (b, a))

    def setcol(a, b, c):
        k = (a, b) if a < b else (b, a)
        if c is None:
            color.pop(k, None)
        else:
            color[k] = c

    def used(x):
        return {col(x, y) for y in adj[x]} - {None}

    def free(x):
        u = used(x)
        return next(c for c in palette if c not in u)

    def is_fan(u, fan):
        for a, b in zip(fan, fan[1:]):
            c = col(u, b)
            if c is None or c in used(a):
                return False
        return True

    for u, v in sorted(tuple(sorted(e)) for e in edges):
        fan = [v]
        while True:
            last = fan[-1]
            ext = next(
                (
                    x
                    for x in sorted(adj[u])
                    if x not in fan and col(u, x) is not None and col(u, x) not in used(last)
                ),
                None,
            )
            if ext is None:
                break
            fan.append(ext)
        c, d = free(u), free(fan[-1])
        # flip the path from u alternating colours d, c
        path, x, want = [], u, d
        while True:
            nxt = next((y for y in adj[x] if col(x, y) == want and (not path or y != path[-1][0])), None)
            if nxt is None:
                break
            path.append((x, nxt))
            x, want = nxt, (c if want == d else d)
        for a, b in path:
            setcol(a, b, c if col(a, b) == d else d)
        k = next(i for i, w in enumerate(fan) if d not in used(w) and is_fan(u, fan[: i + 1]))
        for i in range(k):
            setcol(u, fan[i], col(u, fan[i + 1]))
        setcol(u, fan[k], d)
    return dict(color)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Level:
    n: int
    edges: tuple
    matchings: tuple
    involutions: tuple  # PartialBijection per matching, on points 1..|X|
    max_degree: int


@dataclass(frozen=True)
class MatchingFamily:
    space: FiniteMetricSpace
    levels: tuple

    def generators(self):
        """``(involution, weight, level, index)`` for every matching."""
        out = []
        for lv in self.levels:
            for j, phi in enumerate(lv.involutions):
                out.append((phi, lv.n, lv.n, j))
        return out


def build_matchings(X, exact=False):
    """Split each ``Gamma_n`` into matchings and turn them into involutions."""
    N = len(X)
    D = X.distances
    levels = []
    for n in range(1, X.diameter + 1):
        edges = [(i, j) for i in range(N) for j in range(i + 1, N) if n - 1 < D[i, j] <= n]
        deg = {}
        for i, j in edges:
            deg[i] = deg.get(i, 0) + 1
            deg[j] = deg.get(j, 0) + 1
        coloring = misra_gries_edge_coloring(edges) if exact else greedy_edge_coloring(edges)
        ncol = max(coloring.values(), default=-1) + 1
        matchings = [sorted(e for e, c in coloring.items() if c == k) for k in range(ncol)]
        matchings = [m for m in matchings if m]
        invs = []
        for m in matchings:
            pairs = {i + 1: i + 1 for i in range(N)}
            for i, j in m:
                pairs[i + 1], pairs[j + 1] = j + 1, i + 1
            invs.append(PartialBijection(N, tuple(pairs.items())))
        levels.append(
            Level(n, tuple(edges), tuple(tuple(m) for m in matchings), tuple(invs), max(deg.values(), default=0))
        )
    return MatchingFamily(X, tuple(levels))


@dataclass(frozen=True, eq=False)
class EmbeddingResult:
    space: FiniteMetricSpace
    basepoint: int
    family: MatchingFamily
    distances: np.ndarray  # d(Phi(y), Phi(z))
    _adj: tuple

    def phi(self, y):
        """``Phi(y) = gamma(y, x)`` as a partial bijection on points ``1..|X|``."""
        return gamma(y + 1, self.basepoint + 1, len(self.space))

    def generator_set(self):
        """Weighted involutions plus the rank-one idempotents ``id_y`` (weight 1)."""
        N = len(self.space)
        gens = [(phi, w) for phi, w, _, _ in self.family.generators()]
        gens += [(PartialBijection.identity_on(N, [y + 1]), 1) for y in range(N)]
        return gens

    def path(self, y, z):
        """A shortest path ``y -> z`` as ``[(point, weight_of_step), ...]``."""
        got = _dijkstra(y, lambda u: ((None, v, w) for v, w in self._adj[u]))
        out, cur = [], z
        while cur != y:
            v, w = next((v, w) for v, w in self._adj[cur] if got.get(v, -1) + w == got[cur])
            out.append((cur, w))
            cur = v
        out.append((y, 0))
        out.reverse()
        return [(self.space.points[p], w) for p, w in out]

    def generators_json(self):
        N = len(self.space)
        gens = []
        for phi, w, lvl, j in self.family.generators():
            gens.append({"pairs": [list(p) for p in phi.pairs], "weight": w, "level": lvl, "matching": j})
        for y in range(N):
            gens.append({"pairs": [[y + 1, y + 1]], "weight": 1, "level": 0, "matching": None})
        return {"n": N, "points": list(self.space.points), "basepoint": self.space.points[self.basepoint], "generators": gens}

    def to_dot(self):
        pts = self.space.points
        lines = ["graph embedding {"]
        for i, p in enumerate(pts):
            lines.append(f"  n{i} [label={json.dumps(p)}];")
        for lv in self.family.levels:
            for j, m in enumerate(lv.matchings):
                for a, b in m:
                    lines.append(f'  n{a} -- n{b} [label="{lv.n}.{j}", weight={lv.n}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def embed_space(X, basepoint=0, exact=False, family=None):
    """Shortest-path distances between the ``gamma(y, x)`` in one L-class.

    Computed on the points directly, with an edge ``{u, phi(u)}`` of weight
    ``w(phi)`` for every involution ``phi`` moving ``u``.
    """
    if isinstance(basepoint, str):
        basepoint = X.points.index(basepoint)
    if not 0 <= basepoint < len(X):
        raise ValueError(f"basepoint {basepoint} is not a point of X")
    fam = family if family is not None else build_matchings(X, exact=exact)
    N = len(X)
    adj = [[] for _ in range(N)]
    for lv in fam.levels:
        for m in lv.matchings:
            for a, b in m:
                adj[a].append((b, lv.n))
                adj[b].append((a, lv.n))
    adj = tuple(tuple(sorted(a)) for a in adj)
    D = np.zeros((N, N), dtype=np.int64)
    for y in range(N):
        got = _dijkstra(y, lambda u: ((None, v, w) for v, w in adj[u]))
        for z in range(N):
            D[y, z] = got[z]
    return EmbeddingResult(X, basepoint, fam, D, adj)


def verify_distortion(e, slack=1):
    """Check ``d_X(y, z) <= d(Phi y, Phi z) <= d_X(y, z) + slack`` on every pair.

    Returns the empirical control functions; raises
    :class:`DistortionViolation` with both path certificates otherwise.
    """
    X = e.space
    N = len(X)
    rho_minus, rho_plus = {}, {}
    max_excess = 0
    for y in range(N):
        for z in range(y + 1, N):
            dx, de = X.d(y, z), int(e.distances[y, z])
            if not dx <= de <= dx + slack:
                direct = [(X.points[y], 0), (X.points[z], dx)]
                raise DistortionViolation(
                    (X.points[y], X.points[z]), de, (dx, dx + slack), {"found": e.path(y, z), "direct": direct}
                )
            max_excess = max(max_excess, de - dx)
            rho_minus[dx] = min(rho_minus.get(dx, de), de)
            rho_plus[dx] = max(rho_plus.get(dx, de), de)
    return {
        "pairs": N * (N - 1) // 2,
        "max_excess": max_excess,
        "rho_minus": {str(k): rho_minus[k] for k in sorted(rho_minus)},
        "rho_plus": {str(k): rho_plus[k] for k in sorted(rho_plus)},
        "violations": [],
    }


def semigroup_route(e):
    """Distances recomputed with actual partial-bijection arithmetic.

    Builds the weighted generators inside the symmetric inverse monoid and
    runs the generic word metric from ``id_x``; the result is indexed like
    ``e.distances``.
    """
    N = len(e.space)
    oracle = SymmetricInverseMonoid(N)
    gens = WeightedGenerators.from_pairs(oracle, e.generator_set())
    x = e.basepoint + 1
    table = weighted_word_metric(oracle, gens, [PartialBijection.identity_on(N, [x])])
    D = np.zeros((N, N), dtype=np.int64)
    for y in range(N):
        for z in range(N):
            D[y, z] = table.distance(e.phi(y), e.phi(z))
    return D
