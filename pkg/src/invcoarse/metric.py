"""Length functions and extended metrics on inverse semigroups.

Distances are nonnegative integers, or ``math.inf`` between different
L-classes.  A :class:`MetricTable` stores one integer matrix per L-class;
cross-class lookups never touch an integer sentinel.
"""
from __future__ import annotations

import csv
import heapq
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .semigroup import FiniteSemigroup, generate_closure

INF = math.inf
NOT_FOUND = "NotFoundAtScale"

# internal integer stand-in for inf inside vectorised checks only
_BIG = np.int64(1) << 40


def key_json(oracle, a):
    """JSON-ready form of an element key."""
    return _listify(oracle.encode(a))


def _listify(obj):
    if isinstance(obj, (tuple, list)):
        return [_listify(o) for o in obj]
    return obj


def key_text(oracle, a):
    return json.dumps(key_json(oracle, a), separators=(",", ":"))


def dist_json(v):
    return "inf" if v == INF else int(v)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedGenerators:
    """A symmetric generating list with positive integer weights, w(x) = w(x*)."""

    oracle: object
    gens: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.gens) != len(self.weights):
            raise ValueError("one weight per generator")
        pos = {g: i for i, g in enumerate(self.gens)}
        for g, w in zip(self.gens, self.weights):
            if not isinstance(w, (int, np.integer)) or w < 1:
                raise ValueError(f"weight of {g!r} must be a positive integer, got {w!r}")
            gi = self.oracle._inv(g)
            if gi not in pos:
                raise ValueError(f"inverse of generator {g!r} is missing")
            if self.weights[pos[gi]] != w:
                raise ValueError(f"w({g!r}) differs from the weight of its inverse")

    @classmethod
    def from_pairs(cls, oracle, pairs):
        """Build from ``(generator, weight)`` pairs, adding missing inverses."""
        weight = {}
        for g, w in pairs:
            oracle._check(g)
            for h in (g, oracle._inv(g)):
                if h in weight and weight[h] != w:
                    raise ValueError(f"conflicting weights for {h!r}: {weight[h]} and {w}")
                weight[h] = int(w)
        gens = sorted(weight, key=oracle.sort_key)
        return cls(oracle, tuple(gens), tuple(weight[g] for g in gens))

    @classmethod
    def unit(cls, oracle, gens):
        return cls.from_pairs(oracle, [(g, 1) for g in gens])

    def scaled(self, factor):
        return WeightedGenerators(self.oracle, self.gens, tuple(w * factor for w in self.weights))

    def items(self):
        return zip(self.gens, self.weights)

    def neighbours(self, x):
        """Labelled edges ``x -> g x`` of the Schützenberger graph (loops included)."""
        o = self.oracle
        idem = self.__dict__.get("_idem")
        if idem is None:
            idem = [o.left_idempotent(g) for g in self.gens]
            object.__setattr__(self, "_idem", idem)
        for k, g in enumerate(self.gens):
            if o._mul(idem[k], x) == x:
                yield k, o._mul(g, x), self.weights[k]


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def _dijkstra(source, neighbours, allowed=None, cutoff=None, targets=None, limit=200_000):
    """Integer Dijkstra over an implicit graph; returns ``{node: distance}``."""
    dist = {source: 0}
    done = set()
    heap = [(0, 0, source)]
    tick = 1
    remaining = set(targets) - {source} if targets is not None else None
    while heap:
        du, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if remaining is not None:
            remaining.discard(u)
            if not remaining:
                break
        if len(done) > limit:
            raise RuntimeError(f"exploration exceeded {limit} vertices")
        for _, v, w in neighbours(u):
            if allowed is not None and v not in allowed:
                continue
            dv = du + w
            if cutoff is not None and dv > cutoff:
                continue
            if dv < dist.get(v, INF):
                dist[v] = dv
                heapq.heappush(heap, (dv, tick, v))
                tick += 1
    return {v: dist[v] for v in done}


@dataclass(frozen=True, eq=False)
class MetricTable:
    """Per-L-class distance matrices over an ordered element scope.

    ``classes[c]`` lists element indices of one L-class and ``dist[c]`` is the
    matching integer matrix; ``-1`` inside a matrix marks a pair not joined
    inside the scope and reads back as ``inf``.  ``frontier`` holds indices of
    elements with a Schützenberger edge leaving the scope.
    """

    oracle: object
    elements: tuple
    classes: tuple
    dist: tuple
    status: str = "Complete"
    frontier: frozenset = frozenset()
    depth: tuple = ()
    gens: WeightedGenerators | None = None
    scope: FiniteSemigroup | None = None
    index: dict = field(init=False, repr=False)
    class_id: tuple = field(init=False, repr=False)
    pos: tuple = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.elements)
        cid, pos = [0] * n, [0] * n
        for c, members in enumerate(self.classes):
            for p, i in enumerate(members):
                cid[i], pos[i] = c, p
        object.__setattr__(self, "index", {a: i for i, a in enumerate(self.elements)})
        object.__setattr__(self, "class_id", tuple(cid))
        object.__setattr__(self, "pos", tuple(pos))
        if not self.depth:
            object.__setattr__(self, "depth", tuple(self.oracle.grade(a) for a in self.elements))

    def __len__(self):
        return len(self.elements)

    @property
    def complete(self):
        return self.status == "Complete"

    def d(self, i, j):
        """Distance between element indices ``i`` and ``j``."""
        c = self.class_id[i]
        if c != self.class_id[j]:
            return INF
        v = int(self.dist[c][self.pos[i], self.pos[j]])
        return INF if v < 0 else v

    def distance(self, a, b):
        try:
            return self.d(self.index[a], self.index[b])
        except KeyError:
            raise KeyError(f"{a!r} or {b!r} is outside the table scope") from None

    def matrix(self):
        """Dense ``n x n`` int64 copy with a large stand-in for inf (internal use)."""
        cached = self.__dict__.get("_matrix")
        if cached is not None:
            return cached
        n = len(self.elements)
        full = np.full((n, n), _BIG, dtype=np.int64)
        for members, block in zip(self.classes, self.dist):
            m = np.asarray(members)
            sub = np.where(block < 0, _BIG, block)
            full[np.ix_(m, m)] = sub
        object.__setattr__(self, "_matrix", full)
        return full

    def pairs(self, r=None):
        """Ordered pairs ``(i, j)``, ``i != j``, at finite distance (``<= r`` if given)."""
        for members, block in zip(self.classes, self.dist):
            for p, i in enumerate(members):
                for q, j in enumerate(members):
                    v = block[p, q]
                    if p != q and v >= 0 and (r is None or v <= r):
                        yield i, j, int(v)

    def ball(self, center, r):
        """Elements within distance ``r`` of ``center``, in table order."""
        i = self.index[center]
        members = self.classes[self.class_id[i]]
        row = self.dist[self.class_id[i]][self.pos[i]]
        return [self.elements[j] for p, j in enumerate(members) if 0 <= row[p] <= r]

    def restrict(self, keep):
        """Sub-table on the element indices in ``keep`` (distances are not recomputed)."""
        keep = sorted(set(keep))
        new = {old: k for k, old in enumerate(keep)}
        classes, dist = [], []
        for members, block in zip(self.classes, self.dist):
            ps = [p for p, i in enumerate(members) if i in new]
            if ps:
                classes.append(tuple(new[members[p]] for p in ps))
                dist.append(block[np.ix_(ps, ps)])
        return MetricTable(
            self.oracle,
            tuple(self.elements[i] for i in keep),
            tuple(classes),
            tuple(dist),
            self.status,
            frozenset(new[i] for i in self.frontier if i in new),
            tuple(self.depth[i] for i in keep),
            self.gens,
            None,
        )

    def to_json(self):
        o = self.oracle
        doc = {
            "status": self.status,
            "elements": [key_json(o, a) for a in self.elements],
            "classes": [
                {
                    "members": list(members),
                    "distances": [[dist_json(INF if v < 0 else v) for v in row] for row in block.tolist()],
                }
                for members, block in zip(self.classes, self.dist)
            ],
            "frontier": sorted(self.frontier),
        }
        return doc

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = [key_text(self.oracle, a) for a in self.elements]
        w.writerow([""] + keys)
        n = len(self.elements)
        for i in range(n):
            w.writerow([keys[i]] + [dist_json(self.d(i, j)) for j in range(n)])
        return buf.getvalue()


def _group_classes(oracle, elements):
    by_key, classes = {}, []
    for i, a in enumerate(elements):
        k = oracle.left_idempotent(a)
        if k not in by_key:
            by_key[k] = len(classes)
            classes.append([])
        classes[by_key[k]].append(i)
    return [tuple(c) for c in classes]


def word_metric(S, gens):
    """Weighted word metric on every L-class of the table ``S``.

    Shortest paths run on the Schützenberger graph restricted to ``S``; on a
    Complete closure containing the generators these are the exact distances.
    """
    oracle = S.oracle
    elements = S.elements
    index = S.index
    adj = [[] for _ in elements]
    frontier = set()
    for i, x in enumerate(elements):
        for _, y, w in gens.neighbours(x):
            j = index.get(y)
            if j is None:
                frontier.add(i)
            elif j != i:
                adj[i].append((j, w))
    classes = _group_classes(oracle, elements)
    dist = []
    for members in classes:
        local = {i: p for p, i in enumerate(members)}
        block = np.full((len(members), len(members)), -1, dtype=np.int64)
        for p, i in enumerate(members):
            got = _dijkstra(i, lambda u: ((None, v, w) for v, w in adj[u]), allowed=local)
            for j, dv in got.items():
                block[p, local[j]] = dv
        dist.append(block)
    status = "Complete" if S.complete else f"Truncated({S.cap})"
    return MetricTable(
        oracle, elements, tuple(classes), tuple(dist), status, frozenset(frontier), S.depth, gens, S
    )


def weighted_word_metric(oracle, gens, basepoints, radius=None, limit=200_000):
    """Word metric on the balls of radius ``radius`` around ``basepoints``.

    The Schützenberger graph is explored implicitly from each basepoint.
    Distances between members are exact: each member's search continues
    until every other member of its L-class in the table is settled.  With
    ``radius=None`` the whole L-class of each basepoint is explored (it must
    be finite).
    """
    oracle._check(*basepoints)
    memo = {}

    def neighbours(x):
        if x not in memo:
            memo[x] = tuple(gens.neighbours(x))
        return memo[x]

    members, depth = {}, {}
    for b in basepoints:
        got = _dijkstra(b, neighbours, cutoff=radius, limit=limit)
        for v, dv in got.items():
            if dv < depth.get(v, INF):
                depth[v] = dv
            members[v] = True
    elements = sorted(members, key=lambda a: (depth[a], oracle.sort_key(a)))
    index = {a: i for i, a in enumerate(elements)}
    classes = _group_classes(oracle, elements)
    dist = []
    for cls in classes:
        keys = [elements[i] for i in cls]
        block = np.zeros((len(cls), len(cls)), dtype=np.int64)
        for p, a in enumerate(keys):
            got = _dijkstra(a, neighbours, targets=keys, limit=limit)
            for q, b in enumerate(keys):
                block[p, q] = got[b]
        dist.append(block)
    frontier = frozenset(
        index[a] for a in elements if any(y not in index for _, y, _ in neighbours(a))
    )
    status = "Complete" if radius is None else f"Ball({radius})"
    return MetricTable(
        oracle,
        tuple(elements),
        tuple(classes),
        tuple(dist),
        status,
        frontier,
        tuple(depth[a] for a in elements),
        gens,
        None,
    )


# ---------------------------------------------------------------------------
# length functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LengthFunction:
    """Values ``l(s)`` over an element scope; ``None`` marks scope-exceeded."""

    oracle: object
    elements: tuple
    values: tuple
    status: str = "Complete"
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {a: i for i, a in enumerate(self.elements)})

    def __call__(self, s):
        return self.values[self.index[s]]

    def as_dict(self):
        return dict(zip(self.elements, self.values))

    def __eq__(self, other):
        return isinstance(other, LengthFunction) and self.as_dict() == other.as_dict()

    __hash__ = None


def length_from_metric(d):
    """``l(s) = d(s*s, s)``."""
    o = d.oracle
    values = []
    for s in d.elements:
        e = o.left_idempotent(s)
        values.append(d.distance(e, s) if e in d.index else None)
    return LengthFunction(o, d.elements, tuple(values), d.status)


def metric_from_length(l):
    """``d(s, t) = l(t s*)`` on each L-class, ``inf`` across classes."""
    o = l.oracle
    elements = l.elements
    classes = _group_classes(o, elements)
    dist = []
    for members in classes:
        block = np.zeros((len(members), len(members)), dtype=np.int64)
        for p, i in enumerate(members):
            s_inv = o._inv(elements[i])
            for q, j in enumerate(members):
                u = o._mul(elements[j], s_inv)
                if u not in l.index or l(u) is None:
                    raise ValueError(f"length of {u!r} is outside the scope of l")
                block[p, q] = l(u)
        dist.append(block)
    return MetricTable(o, elements, tuple(classes), tuple(dist), l.status)


def filtration_length(S, chain, cap=None):
    """Length from an ascending chain of finite symmetric sets ``T_1 ⊆ T_2 ⊆ ...``.

    The chain is augmented so that ``T'_i T'_j ⊆ T'_{i+j}``:
    ``T'_n = T_n ∪ T'_{n-1} ∪ ⋃_{i+j=n} T'_i T'_j``, with ``T_n`` frozen at the
    last given set.  Then ``l(s)`` is the least ``n`` with ``s`` below some
    member of ``T'_n``.  Elements never reached within ``cap`` steps get ``None``.
    """
    o = S.oracle
    P = S.product
    sets = []
    for T in chain:
        idx = set()
        for t in T:
            if t not in S.index:
                raise ValueError(f"chain element {t!r} is outside the table")
            if o._inv(t) not in T:
                raise ValueError(f"chain set is not symmetric: {t!r} lacks its inverse")
            idx.add(S.index[t])
        sets.append(idx)
    for a, b in zip(sets, sets[1:]):
        if not a <= b:
            raise ValueError("chain is not ascending")
    if not sets:
        raise ValueError("chain must contain at least one set")
    if cap is None:
        cap = len(sets) * max(len(S), 1)
    n_el = len(S)
    idem = np.flatnonzero(S.idempotent)
    # below[t] = {t e : e idempotent}, the elements under t in the natural order
    below = [set(P[t, idem][P[t, idem] >= 0].tolist()) for t in range(n_el)]

    values = [0 if S.idempotent[i] else None for i in range(n_el)]
    pending = {i for i in range(n_el) if values[i] is None}
    # the most any chain could ever reach: elements below <T_last>
    reach = set(sets[-1])
    frontier = list(reach)
    while frontier:
        prods = set(P[np.ix_(list(reach), frontier)].ravel().tolist()) | set(
            P[np.ix_(frontier, list(reach))].ravel().tolist()
        )
        prods.discard(-1)
        frontier = list(prods - reach)
        reach |= prods
    reachable = set().union(*(below[t] for t in reach)) if reach else set()
    pending &= reachable

    layers = [set()]
    n = 0
    while pending and n < cap:
        n += 1
        cur = set(sets[min(n, len(sets)) - 1]) | layers[-1]
        for i in range(1, n):
            A, B = layers[i], layers[n - i]
            if A and B:
                block = P[np.ix_(sorted(A), sorted(B))]
                cur |= set(block[block >= 0].tolist())
        for t in cur - layers[-1]:
            for s in below[t] & pending:
                values[s] = n
            pending -= below[t]
        layers.append(cur)
    status = S.label if not S.complete else "Complete"
    return LengthFunction(o, S.elements, tuple(values), status)


def chain_from_weights(gens, S=None):
    """``T_n = {x : w(x) <= n}`` for ``n = 1..max weight``."""
    top = max(gens.weights)
    return [[g for g, w in gens.items() if w <= n] for n in range(1, top + 1)]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    checked: int
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"name": self.name, "checked": self.checked, "violations": [list(v) for v in self.violations[:20]], "violation_count": len(self.violations)}


@dataclass(frozen=True)
class ValidationReport:
    subinvariance: Check
    axioms: Check
    witnesses: dict

    @property
    def ok(self):
        return self.subinvariance.ok and self.axioms.ok

    def to_json(self, oracle):
        return {
            "subinvariance": self.subinvariance.to_json(),
            "axioms": self.axioms.to_json(),
            "witnesses": {
                str(r): (w if w == NOT_FOUND else [key_json(oracle, a) for a in w])
                for r, w in sorted(self.witnesses.items())
            },
        }


def _products(d):
    """Product table aligned with ``d.elements`` (``-1`` outside the scope)."""
    S = d.scope
    if S is not None and S.elements == d.elements:
        return S.product
    o = d.oracle
    n = len(d.elements)
    P = np.full((n, n), -1, dtype=np.int64)
    for i, a in enumerate(d.elements):
        for j, b in enumerate(d.elements):
            P[i, j] = d.index.get(o._mul(a, b), -1)
    return P


def _inverses(d):
    o = d.oracle
    return np.array([d.index.get(o._inv(a), -1) for a in d.elements], dtype=np.int64)


def _left_ids(d):
    o = d.oracle
    return np.array([d.index.get(o.left_idempotent(a), -1) for a in d.elements], dtype=np.int64)


def check_subinvariance(d):
    """``d(sx, tx) <= d(s, t)`` for all in-scope ``s, t, x`` with ``sx, tx`` in scope."""
    P = _products(d)
    D = d.matrix()
    n = len(d.elements)
    bad, checked = [], 0
    finite = D < _BIG
    for x in range(n):
        col = P[:, x]
        ok_rows = col >= 0
        rows = np.flatnonzero(ok_rows)
        if rows.size == 0:
            continue
        sub = D[np.ix_(rows, rows)]
        img = D[np.ix_(col[rows], col[rows])]
        mask = finite[np.ix_(rows, rows)]
        checked += int(mask.sum())
        viol = mask & (img > sub)
        for p, q in np.argwhere(viol)[:5]:
            bad.append((int(rows[p]), int(rows[q]), x))
    return Check("right_subinvariance", checked, tuple(bad))


def check_axioms(d):
    bad, checked = [], 0
    for c, (members, block) in enumerate(zip(d.classes, d.dist)):
        m = len(members)
        checked += m * m
        if (np.diag(block) != 0).any():
            bad.append(("nonzero_diagonal", c))
        off = block[~np.eye(m, dtype=bool)]
        if (off == 0).any():
            bad.append(("zero_off_diagonal", c))
        if not np.array_equal(block, block.T):
            bad.append(("asymmetric", c))
        B = np.where(block < 0, _BIG, block)
        via = (B[:, :, None] + B[None, :, :]).min(axis=1)
        if (B > via).any():
            bad.append(("triangle", c))
    return Check("metric_axioms", checked, tuple(bad))


def _default_candidates(d):
    if d.scope is not None and d.scope.elements == d.elements:
        return [i for i in range(len(d.elements)) if i not in d.scope.frontier]
    return [i for i in range(len(d.elements)) if i not in d.frontier]


def properness_witness(d, r, candidates=None):
    """Greedy finite ``F`` with ``y ∈ F x`` for every pair at distance ``<= r``.

    Candidates default to the interior of the scope.  Each round takes the
    candidate covering the most uncovered pairs, ties going to the least
    canonical key.  Returns a list of elements sorted canonically, or
    ``NOT_FOUND`` when some pair cannot be covered.
    """
    o = d.oracle
    need = {(i, j) for i, j, _ in d.pairs(r)}
    if not need:
        return []
    cand = candidates if candidates is not None else [d.elements[i] for i in _default_candidates(d)]
    cand = sorted(cand, key=o.sort_key)
    sources = sorted({i for i, _ in need})
    cover = []
    for f in cand:
        got = set()
        for i in sources:
            j = d.index.get(o._mul(f, d.elements[i]))
            if j is not None and (i, j) in need:
                got.add((i, j))
        cover.append(got)
    chosen = []
    left = set(need)
    while left:
        best, gain = None, 0
        for k, got in enumerate(cover):
            g = len(got & left)
            if g > gain:
                best, gain = k, g
        if best is None:
            return NOT_FOUND
        chosen.append(cand[best])
        left -= cover[best]
    return sorted(chosen, key=o.sort_key)


def check_witness(d, F, r):
    """Pairs at distance ``<= r`` not covered by ``F`` (empty list means valid)."""
    o = d.oracle
    missing = []
    for i, j, _ in d.pairs(r):
        x, y = d.elements[i], d.elements[j]
        if not any(o._mul(f, x) == y for f in F):
            missing.append((x, y))
    return missing


def validate_metric(d, r_max):
    witnesses = {r: properness_witness(d, r) for r in range(1, r_max + 1)}
    return ValidationReport(check_subinvariance(d), check_axioms(d), witnesses)


def cylinder_and_fub(l, r):
    """The cylinder ``C_r`` and a finite upper bound for it.

    The bound is the set of maximal elements of ``C_r``.  It is reported as
    ``NOT_FOUND`` on a truncated scope when a maximal element sits at the top
    grade, since the cylinder may then keep growing past the scope.
    """
    o = l.oracle
    cyl = [s for s, v in zip(l.elements, l.values) if v is not None and 0 < v <= r]
    maximal = [
        s for s in cyl if not any(t != s and o.natural_leq(s, t) for t in cyl)
    ]
    fub = sorted(maximal, key=o.sort_key)
    if l.status != "Complete" and cyl:
        top = max(o.grade(s) for s in l.elements)
        if any(o.grade(s) >= top for s in fub):
            fub = NOT_FOUND
    return {"cylinder": cyl, "fub": fub}


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoarseVerdict:
    """Scale-qualified verdict: Established | EvidenceAtScale | RefutedAtScale."""

    property: str
    status: str
    scale: int | None = None
    statistics: dict = field(default_factory=dict)
    witness: tuple = ()

    def to_json(self, oracle=None):
        wit = list(self.witness)
        if oracle is not None:
            wit = [key_json(oracle, a) for a in wit]
        return {
            "property": self.property,
            "status": self.status,
            "scale": self.scale,
            "statistics": self.statistics,
            "witness": wit,
        }


def _max_distance(d, keep=None):
    best = 0
    for members, block in zip(d.classes, d.dist):
        if keep is not None:
            ps = [p for p, i in enumerate(members) if i in keep]
            block = block[np.ix_(ps, ps)] if ps else block[:0, :0]
        if block.size:
            best = max(best, int(block.max()))
    return best


def coarse_triviality(S, d):
    """Supremum of finite distances; Established on Complete scopes."""
    sup = _max_distance(d)
    if d.complete and (S is None or S.complete):
        return CoarseVerdict("CoarselyTrivial", "Established", None, {"supremum": sup})
    top = max(d.depth) if d.depth else 0
    half = [i for i, g in enumerate(d.depth) if g <= math.ceil(top / 2)]
    sup_half = _max_distance(d, set(half))
    polarity = "positive" if sup == sup_half else "negative"
    return CoarseVerdict(
        "CoarselyTrivial",
        "EvidenceAtScale",
        top,
        {"supremum": sup, "supremum_half_scope": sup_half, "polarity": polarity},
    )


# ---------------------------------------------------------------------------
# Schützenberger graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchutzenbergerGraph:
    oracle: object
    root: object
    vertices: tuple
    edges: tuple  # (source, generator, target, weight)

    def loops(self):
        return [e for e in self.edges if e[0] == e[2]]

    def to_dot(self):
        o = self.oracle
        name = {v: f"v{i}" for i, v in enumerate(self.vertices)}
        lines = ["digraph schutzenberger {"]
        for v in self.vertices:
            lines.append(f'  {name[v]} [label={json.dumps(key_text(o, v))}];')
        for s, g, t, w in self.edges:
            label = json.dumps(key_text(o, g))
            lines.append(f"  {name[s]} -> {name[t]} [label={label}, weight={w}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def schuetzenberger_graph(oracle, gens, s, radius):
    """Ball of radius ``radius`` around ``s`` in its Schützenberger graph."""
    oracle._check(s)
    got = _dijkstra(s, gens.neighbours, cutoff=radius)
    vertices = sorted(got, key=lambda v: (got[v], oracle.sort_key(v)))
    inside = set(vertices)
    edges = []
    for v in vertices:
        for k, y, w in gens.neighbours(v):
            if y in inside:
                edges.append((v, gens.gens[k], y, w))
    return SchutzenbergerGraph(oracle, s, tuple(vertices), tuple(edges))


# ---------------------------------------------------------------------------
# consequences of right subinvariance
# ---------------------------------------------------------------------------


def check_left_translation(d):
    """``d(t, st) <= d(s*s, s)`` whenever ``t L st``."""
    P = _products(d)
    D = d.matrix()
    lid = _left_ids(d)
    n = len(d.elements)
    bad, checked = [], 0
    for s in range(n):
        e = lid[s]
        if e < 0:
            continue
        ls = D[e, s]
        st = P[s, :]
        ts = np.flatnonzero((st >= 0))
        ts = ts[lid[st[ts]] == lid[ts]]
        checked += ts.size
        for t in ts[D[ts, st[ts]] > ls][:5]:
            bad.append((s, int(t)))
    return Check("left_translation_bound", checked, tuple(bad))


def check_inverse_isometry(d):
    """``t -> t s*`` maps ``L_s`` onto ``L_{s*}`` preserving distances."""
    P = _products(d)
    D = d.matrix()
    inv = _inverses(d)
    bad, checked = [], 0
    for s in range(len(d.elements)):
        if inv[s] < 0:
            continue
        members = np.asarray(d.classes[d.class_id[s]])
        img = P[members, inv[s]]
        checked += members.size ** 2
        if (img < 0).any():
            continue
        target = set(d.classes[d.class_id[int(inv[s])]])
        if set(img.tolist()) != target or len(target) != members.size:
            bad.append(("not_bijective", s))
            continue
        if not np.array_equal(D[np.ix_(members, members)], D[np.ix_(img, img)]):
            bad.append(("distance", s))
    return Check("inverse_isometry", checked, tuple(bad))


def check_d_class_isometry(d, green):
    """For ``s1 L t R s2`` the map ``x -> x t* s2`` is an isometry ``L_{s1} -> L_{s2}``.

    ``green`` is a :class:`GreenTable` over ``d.elements``.
    """
    P = _products(d)
    D = d.matrix()
    inv = _inverses(d)
    bad, checked = [], 0
    for dcls in green.d_classes:
        lids = sorted({green.l_id[i] for i in dcls})
        for a in lids:
            for b in lids:
                if a == b:
                    continue
                L1 = np.asarray(green.l_classes[a])
                L2 = set(green.l_classes[b])
                s2 = min(L2)
                ts = [t for t in L1 if green.r_id[t] == green.r_id[s2]]
                checked += 1
                if not ts:
                    bad.append(("no_connector", a, b))
                    continue
                t = ts[0]
                img = P[P[L1, inv[t]], s2]
                if set(img.tolist()) != L2 or len(L2) != L1.size:
                    bad.append(("not_bijective", a, b))
                    continue
                if not np.array_equal(D[np.ix_(L1, L1)], D[np.ix_(img, img)]):
                    bad.append(("distance", a, b))
    return Check("d_class_isometry", checked, tuple(bad))


def check_domination(S, d_S, A, cap=10_000):
    """Word metric of ``T = <A>`` with ``w(a) = l_S(a)`` dominates ``d_S`` on ``T``.

    Idempotent generators only label loops, so their weight is set to 1.
    """
    o = S.oracle
    l = length_from_metric(d_S)
    pairs = [(a, max(1, l(a))) for a in A]
    pairs += [(o._inv(a), w) for a, w in pairs]
    gens = WeightedGenerators.from_pairs(o, pairs)
    T = generate_closure(o, list(A), cap=cap)
    d_T = word_metric(T, gens)
    bad, checked = [], 0
    for i, j, v in d_T.pairs():
        checked += 1
        x, y = T.elements[i], T.elements[j]
        if v < d_S.distance(x, y):
            bad.append((x, y))
    return Check("subsemigroup_domination", checked, tuple(bad))
