"""Exact arithmetic for inverse semigroups.

Every family exposes the same small interface (multiply, invert, membership,
a total order on canonical keys) so that closures, Green's relations and the
metric machinery downstream never need to know which family they run on.
Elements are their own canonical keys: plain tuples, ints, strings, or
:class:`PartialBijection` instances.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

__all__ = [
    "DomainMismatch",
    "ScopeRequired",
    "DescriptorError",
    "PartialBijection",
    "gamma",
    "InverseSemigroup",
    "SymmetricInverseMonoid",
    "Bicyclic",
    "FreeInverseMonoid1",
    "Chain",
    "ConcreteSemigroup",
    "ProductSemigroup",
    "AdjoinedIdentity",
    "ONE",
    "FiniteSemigroup",
    "GreenTable",
    "Classification",
    "cyclic_group",
    "generate_closure",
    "enumerate_all",
    "truncate",
    "green_table",
    "adjoin_identity",
    "classify",
    "make_family",
    "semigroup_to_json",
    "semigroup_from_json",
]

JSON_VERSION = 1


class DomainMismatch(ValueError):
    """Operands do not belong to the oracle they were handed to."""


class ScopeRequired(ValueError):
    """An existential query on an infinite semigroup was asked without a search scope."""


class DescriptorError(ValueError):
    """A family descriptor violates one of its constraints."""


# ---------------------------------------------------------------------------
# partial bijections
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class PartialBijection:
    """A bijection between two subsets of ``{1, ..., n}``.

    ``pairs`` holds ``(source, target)`` tuples, kept sorted by source.
    Maps act on the left: ``(s * t)(x) = s(t(x))``.
    """

    n: int
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((int(a), int(b)) for a, b in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        if self.n < 1:
            raise ValueError(f"ground size must be positive, got {self.n}")
        sources = [a for a, _ in pairs]
        targets = [b for _, b in pairs]
        if len(set(sources)) != len(sources):
            raise ValueError(f"sources are not distinct in {pairs}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"targets are not distinct in {pairs}")
        for p in itertools.chain(sources, targets):
            if not 1 <= p <= self.n:
                raise ValueError(f"point {p} outside 1..{self.n}")

    @classmethod
    def identity_on(cls, n, points):
        return cls(n, tuple((p, p) for p in points))

    @classmethod
    def from_images(cls, images):
        """Build from a one-line image list where ``0`` marks 'undefined'."""
        n = len(images)
        return cls(n, tuple((i + 1, t) for i, t in enumerate(images) if t))

    @property
    def images(self):
        img = [0] * (self.n + 1)
        for a, b in self.pairs:
            img[a] = b
        return tuple(img)

    @property
    def domain(self):
        return frozenset(a for a, _ in self.pairs)

    @property
    def image(self):
        return frozenset(b for _, b in self.pairs)

    @property
    def rank(self):
        return len(self.pairs)

    def __call__(self, x):
        for a, b in self.pairs:
            if a == x:
                return b
        raise KeyError(x)

    def compose(self, other):
        """``self * other``: apply ``other`` first."""
        if other.n != self.n:
            raise DomainMismatch(f"ground sizes differ: {self.n} vs {other.n}")
        mine = dict(self.pairs)
        return PartialBijection(
            self.n, tuple((a, mine[b]) for a, b in other.pairs if b in mine)
        )

    def inverse(self):
        return PartialBijection(self.n, tuple((b, a) for a, b in self.pairs))

    def __repr__(self):
        body = ",".join(f"{a}->{b}" for a, b in self.pairs)
        return f"PB{self.n}[{body}]"


def gamma(y, x, n):
    """The rank-one map sending ``x`` to ``y``."""
    return PartialBijection(n, ((x, y),))


# ---------------------------------------------------------------------------
# oracle interface
# ---------------------------------------------------------------------------


class InverseSemigroup:
    """Base class: exact multiplication and inversion on canonical keys.

    Subclasses implement ``_mul``, ``_inv`` and ``__contains__``; the public
    ``multiply``/``invert`` check membership first so that operands coming
    from a different oracle raise :class:`DomainMismatch`.
    """

    name = "semigroup"
    finite = False

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def __contains__(self, a):
        raise NotImplementedError

    def sort_key(self, a):
        return a

    def grade(self, a):
        """Size measure used to cut finite truncations out of infinite families."""
        return 0

    def identity(self):
        return None

    def elements(self, grade=None):
        """All elements of grade at most ``grade`` in canonical order."""
        raise NotImplementedError

    def encode(self, a):
        return a

    def decode(self, obj):
        return _tuplify(obj)

    def _check(self, *xs):
        for x in xs:
            if x not in self:
                raise DomainMismatch(f"{x!r} is not an element of {self.name}")

    def multiply(self, a, b):
        self._check(a, b)
        return self._mul(a, b)

    def invert(self, a):
        self._check(a)
        return self._inv(a)

    def is_idempotent(self, a):
        self._check(a)
        return self._mul(a, a) == a

    def natural_leq(self, a, b):
        """``a <= b`` in the natural partial order, i.e. ``a a* b = a``."""
        self._check(a, b)
        return self._mul(self._mul(a, self._inv(a)), b) == a

    def left_idempotent(self, a):
        """``a* a``, the idempotent of the L-class of ``a``."""
        return self._mul(self._inv(a), a)

    def right_idempotent(self, a):
        """``a a*``, the idempotent of the R-class of ``a``."""
        return self._mul(a, self._inv(a))

    def green_related(self, a, b, relation, scope=None):
        """Decide ``a L b``, ``a R b`` or ``a D b``.

        D needs a witness ``u`` with ``a L u R b``; it is searched inside
        ``scope`` (a :class:`FiniteSemigroup` or an iterable of elements),
        or inside the whole semigroup when it is finite.
        """
        self._check(a, b)
        relation = relation.upper()
        if relation == "L":
            return self.left_idempotent(a) == self.left_idempotent(b)
        if relation == "R":
            return self.right_idempotent(a) == self.right_idempotent(b)
        if relation != "D":
            raise ValueError(f"unknown Green relation {relation!r}")
        if scope is None:
            if not self.finite:
                raise ScopeRequired(
                    f"D-relation on the infinite semigroup {self.name} needs a search scope"
                )
            scope = self.elements()
        elif isinstance(scope, FiniteSemigroup):
            scope = scope.elements
        la, rb = self.left_idempotent(a), self.right_idempotent(b)
        return any(
            self.left_idempotent(u) == la and self.right_idempotent(u) == rb
            for u in scope
        )

    def product_table(self, elements, index):
        m = len(elements)
        table = np.full((m, m), -1, dtype=np.int64)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                table[i, j] = index.get(self._mul(a, b), -1)
        return table

    def __repr__(self):
        return self.name


def _tuplify(obj):
    if isinstance(obj, list):
        return tuple(_tuplify(o) for o in obj)
    return obj


class SymmetricInverseMonoid(InverseSemigroup):
    """All partial bijections of ``{1, ..., n}`` under composition."""

    finite = True

    def __init__(self, n):
        if n < 1:
            raise DescriptorError(f"symmetric_inverse_monoid needs n >= 1, got {n}")
        self.n = n
        self.name = f"I{n}"

    def __contains__(self, a):
        return isinstance(a, PartialBijection) and a.n == self.n

    def _mul(self, a, b):
        return a.compose(b)

    def _inv(self, a):
        return a.inverse()

    def identity(self):
        return PartialBijection.identity_on(self.n, range(1, self.n + 1))

    def elements(self, grade=None):
        n = self.n
        out = []
        pts = range(1, n + 1)
        for k in range(n + 1):
            for dom in itertools.combinations(pts, k):
                for img in itertools.permutations(pts, k):
                    out.append(PartialBijection(n, tuple(zip(dom, img))))
        return sorted(out)

    def encode(self, a):
        return [list(p) for p in a.pairs]

    def decode(self, obj):
        return PartialBijection(self.n, tuple(tuple(p) for p in obj))

    def product_table(self, elements, index):
        # images as rows of an (m, n+1) array, column 0 meaning 'undefined'
        imgs = np.array([a.images for a in elements], dtype=np.int64)
        m = len(elements)
        composed = imgs[np.arange(m)[:, None, None], imgs[None, :, :]]
        base = self.n + 1
        weights = base ** np.arange(base, dtype=np.int64)
        codes = imgs @ weights
        lookup = dict(zip(codes.tolist(), range(m)))
        flat = (composed @ weights).ravel().tolist()
        table = np.array([lookup.get(c, -1) for c in flat], dtype=np.int64)
        return table.reshape(m, m)


class Bicyclic(InverseSemigroup):
    """The bicyclic monoid ``<p, q | pq = 1>``; ``(a, b)`` stands for ``q^a p^b``."""

    name = "bicyclic"
    p = (0, 1)
    q = (1, 0)

    def __contains__(self, a):
        return (
            isinstance(a, tuple)
            and len(a) == 2
            and all(isinstance(v, int) and v >= 0 for v in a)
        )

    def _mul(self, x, y):
        a, b = x
        c, d = y
        m = min(b, c)
        return (a + c - m, b + d - m)

    def _inv(self, x):
        return (x[1], x[0])

    def identity(self):
        return (0, 0)

    def grade(self, a):
        return a[0] + a[1]

    def elements(self, grade=None):
        if grade is None:
            raise ScopeRequired("the bicyclic monoid is infinite; pass a grade")
        return sorted((a, s - a) for s in range(grade + 1) for a in range(s + 1))


class FreeInverseMonoid1(InverseSemigroup):
    """Free inverse monoid on one generator, as Munn triples ``(a, g, b)``.

    ``[a, b]`` is the interval of the integer line visited by a walk starting
    at 0 and ending at ``g``.
    """

    name = "fim1"
    x = (0, 1, 1)
    x_inv = (-1, -1, 0)

    def __contains__(self, t):
        if not (isinstance(t, tuple) and len(t) == 3):
            return False
        a, g, b = t
        return all(isinstance(v, int) for v in t) and a <= min(0, g) and b >= max(0, g)

    def _mul(self, s, t):
        a, g, b = s
        c, h, d = t
        return (min(a, g + c), g + h, max(b, g + d))

    def _inv(self, s):
        a, g, b = s
        return (a - g, -g, b - g)

    def identity(self):
        return (0, 0, 0)

    def grade(self, s):
        return s[2] - s[0]

    def elements(self, grade=None):
        if grade is None:
            raise ScopeRequired("fim1 is infinite; pass a grade")
        out = []
        for a in range(-grade, 1):
            for b in range(0, a + grade + 1):
                out.extend((a, g, b) for g in range(a, b + 1))
        return sorted(out)


class Chain(InverseSemigroup):
    """A chain of integers under ``min``; ``lo``/``hi`` may be ``None`` (unbounded)."""

    def __init__(self, lo=1, hi=None):
        if lo is None and hi is None:
            raise DescriptorError("a chain needs at least one finite end")
        if lo is not None and hi is not None and hi < lo:
            raise DescriptorError(f"empty chain {lo}..{hi}")
        self.lo, self.hi = lo, hi
        self.finite = lo is not None and hi is not None
        if self.finite:
            self.name = f"chain({lo}..{hi})"
        elif hi is None:
            self.name = f"chain({lo}..)"
        else:
            self.name = f"chain(..{hi})"

    def __contains__(self, a):
        if not isinstance(a, int) or isinstance(a, bool):
            return False
        return (self.lo is None or a >= self.lo) and (self.hi is None or a <= self.hi)

    def _mul(self, a, b):
        return min(a, b)

    def _inv(self, a):
        return a

    def identity(self):
        return self.hi

    def grade(self, a):
        if self.finite:
            return 0
        return a - self.lo + 1 if self.hi is None else self.hi - a + 1

    def elements(self, grade=None):
        if self.finite:
            return list(range(self.lo, self.hi + 1))
        if grade is None:
            raise ScopeRequired(f"{self.name} is infinite; pass a grade")
        if self.hi is None:
            return list(range(self.lo, self.lo + grade))
        return list(range(self.hi - grade + 1, self.hi + 1))


class ConcreteSemigroup(InverseSemigroup):
    """A finite inverse semigroup given by its multiplication table."""

    finite = True

    def __init__(self, labels, product, inverse=None, name="concrete", check=True):
        self.labels = tuple(labels)
        self.position = {a: i for i, a in enumerate(self.labels)}
        if len(self.position) != len(self.labels):
            raise DescriptorError("element labels are not distinct")
        table = np.asarray(product, dtype=np.int64)
        m = len(self.labels)
        if table.shape != (m, m):
            raise DescriptorError(f"product table must be {m}x{m}, got {table.shape}")
        if m and (table.min() < 0 or table.max() >= m):
            raise DescriptorError("product table entries must index the element list")
        self.table = table
        if inverse is None:
            inverse = self._find_inverses()
        self.inv_table = np.asarray(inverse, dtype=np.int64)
        if self.inv_table.shape != (m,):
            raise DescriptorError(f"inverse table must have length {m}")
        self.name = name
        if check:
            self._validate()

    def _find_inverses(self):
        t = self.table
        out = []
        for i in range(len(self.labels)):
            cands = [j for j in range(len(self.labels)) if t[t[i, j], i] == i and t[t[j, i], j] == j]
            if len(cands) != 1:
                raise DescriptorError(
                    f"element {self.labels[i]!r} has {len(cands)} inverses; need exactly one"
                )
            out.append(cands[0])
        return out

    def _validate(self):
        t, inv = self.table, self.inv_table
        m = len(self.labels)
        idx = np.arange(m)
        # (xy)z = x(yz) for all triples, vectorised
        left = t[t[idx[:, None, None], idx[None, :, None]], idx[None, None, :]]
        right = t[idx[:, None, None], t[idx[None, :, None], idx[None, None, :]]]
        if not np.array_equal(left, right):
            i, j, k = np.argwhere(left != right)[0]
            raise DescriptorError(
                f"product is not associative at {self.labels[i]!r}, {self.labels[j]!r}, {self.labels[k]!r}"
            )
        if not np.array_equal(t[t[idx, inv], idx], idx) or not np.array_equal(t[t[inv, idx], inv], inv):
            raise DescriptorError("inverse table does not satisfy s s* s = s and s* s s* = s*")
        idem = idx[t[idx, idx] == idx]
        sub = t[np.ix_(idem, idem)]
        if not np.array_equal(sub, sub.T):
            raise DescriptorError("idempotents do not commute, so the semigroup is not inverse")

    def __contains__(self, a):
        try:
            return a in self.position
        except TypeError:
            return False

    def _mul(self, a, b):
        return self.labels[self.table[self.position[a], self.position[b]]]

    def _inv(self, a):
        return self.labels[self.inv_table[self.position[a]]]

    def sort_key(self, a):
        return self.position[a]

    def identity(self):
        t = self.table
        m = len(self.labels)
        for i in range(m):
            if np.array_equal(t[i], np.arange(m)) and np.array_equal(t[:, i], np.arange(m)):
                return self.labels[i]
        return None

    def elements(self, grade=None):
        return list(self.labels)

    def decode(self, obj):
        key = _tuplify(obj)
        if key not in self.position:
            raise DomainMismatch(f"{obj!r} is not an element of {self.name}")
        return key

    def product_table(self, elements, index):
        pos = np.array([self.position[a] for a in elements], dtype=np.int64)
        back = np.full(len(self.labels), -1, dtype=np.int64)
        back[pos] = np.arange(len(elements))
        return back[self.table[np.ix_(pos, pos)]]


def cyclic_group(k, names=None):
    """Z_k as a concrete table; default labels are ``0..k-1``."""
    if k < 1:
        raise DescriptorError(f"cyclic group order must be positive, got {k}")
    labels = list(names) if names is not None else list(range(k))
    product = [[(i + j) % k for j in range(k)] for i in range(k)]
    inverse = [(-i) % k for i in range(k)]
    return ConcreteSemigroup(labels, product, inverse, name=f"Z{k}")


class ProductSemigroup(InverseSemigroup):
    """Direct product with componentwise arithmetic; keys are pairs."""

    def __init__(self, left, right):
        self.left, self.right = left, right
        self.finite = left.finite and right.finite
        self.name = f"product({left.name},{right.name})"

    def __contains__(self, a):
        return isinstance(a, tuple) and len(a) == 2 and a[0] in self.left and a[1] in self.right

    def _mul(self, a, b):
        return (self.left._mul(a[0], b[0]), self.right._mul(a[1], b[1]))

    def _inv(self, a):
        return (self.left._inv(a[0]), self.right._inv(a[1]))

    def sort_key(self, a):
        return (self.right.sort_key(a[1]), self.left.sort_key(a[0]))

    def grade(self, a):
        return max(self.left.grade(a[0]), self.right.grade(a[1]))

    def identity(self):
        l, r = self.left.identity(), self.right.identity()
        return None if l is None or r is None else (l, r)

    def elements(self, grade=None):
        if not self.finite and grade is None:
            raise ScopeRequired(f"{self.name} is infinite; pass a grade")
        out = [(a, b) for a in self.left.elements(grade) for b in self.right.elements(grade)]
        return sorted(out, key=self.sort_key)

    def encode(self, a):
        return [self.left.encode(a[0]), self.right.encode(a[1])]

    def decode(self, obj):
        return (self.left.decode(obj[0]), self.right.decode(obj[1]))


class _One:
    """The adjoined identity of ``S^1``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "1"

    def __reduce__(self):
        return (_One, ())


ONE = _One()


class AdjoinedIdentity(InverseSemigroup):
    """``S^1``: ``S`` with an external identity ``ONE`` adjoined."""

    def __init__(self, base):
        self.base = base
        self.finite = base.finite
        self.name = f"{base.name}^1"

    def __contains__(self, a):
        return a is ONE or a in self.base

    def _mul(self, a, b):
        if a is ONE:
            return b
        if b is ONE:
            return a
        return self.base._mul(a, b)

    def _inv(self, a):
        return a if a is ONE else self.base._inv(a)

    def sort_key(self, a):
        return (1,) if a is ONE else (0, self.base.sort_key(a))

    def grade(self, a):
        return 0 if a is ONE else self.base.grade(a)

    def identity(self):
        return ONE

    def elements(self, grade=None):
        return list(self.base.elements(grade)) + [ONE]

    def encode(self, a):
        return "1" if a is ONE else self.base.encode(a)

    def decode(self, obj):
        return ONE if obj == "1" else self.base.decode(obj)


# ---------------------------------------------------------------------------
# finite tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteSemigroup:
    """A finite (possibly truncated) piece of an inverse semigroup, tabulated.

    ``product[i, j]`` and ``inverse[i]`` are ``-1`` when the result falls
    outside the table, which only happens for truncations.  ``frontier``
    holds the elements whose neighbourhood in the ambient semigroup is not
    fully inside the table.
    """

    oracle: InverseSemigroup
    elements: tuple
    _product: np.ndarray | None = None
    _inverse: np.ndarray | None = None
    _idempotent: np.ndarray | None = None
    status: str = "Complete"
    cap: int | None = None
    depth: tuple = ()
    frontier: frozenset = frozenset()
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {a: i for i, a in enumerate(self.elements)})

    @classmethod
    def build(cls, oracle, elements, status="Complete", cap=None, depth=None, frontier=()):
        """Tables are filled in lazily, on first access."""
        elements = tuple(elements)
        if depth is None:
            depth = tuple(oracle.grade(a) for a in elements)
        return cls(
            oracle,
            elements,
            None,
            None,
            None,
            status,
            cap,
            tuple(int(x) for x in depth),
            frozenset(frontier),
        )

    @property
    def product(self):
        if self._product is None:
            object.__setattr__(self, "_product", self.oracle.product_table(self.elements, self.index))
        return self._product

    @property
    def inverse(self):
        if self._inverse is None:
            inv = [self.index.get(self.oracle._inv(a), -1) for a in self.elements]
            object.__setattr__(self, "_inverse", np.array(inv, dtype=np.int64))
        return self._inverse

    @property
    def idempotent(self):
        if self._idempotent is None:
            o = self.oracle
            mask = np.array([o._mul(a, a) == a for a in self.elements], dtype=bool)
            object.__setattr__(self, "_idempotent", mask)
        return self._idempotent

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a):
        return a in self.index

    @property
    def complete(self):
        return self.status == "Complete"

    @property
    def closed(self):
        return bool((self.product >= 0).all() and (self.inverse >= 0).all())

    @property
    def label(self):
        return "Complete" if self.complete else f"Truncated({self.cap})"

    def mul(self, a, b):
        return self.oracle._mul(a, b)

    def inv(self, a):
        return self.oracle._inv(a)

    def idempotents(self):
        return [a for a, e in zip(self.elements, self.idempotent) if e]

    def interior(self):
        return [a for i, a in enumerate(self.elements) if i not in self.frontier]


def generate_closure(oracle, generators, cap=10_000):
    """Inverse subsemigroup generated by ``generators``, breadth first.

    Level ``k`` holds the elements first reached by words of length ``k``;
    each level is sorted by canonical key.  Stops with status ``Truncated``
    once more than ``cap`` elements would be needed.
    """
    oracle._check(*generators)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    key = oracle.sort_key
    letters = sorted(set(generators) | {oracle._inv(g) for g in generators}, key=key)
    seen = set()
    order, depth = [], []
    level = letters
    k = 1
    truncated = False
    while level:
        room = cap - len(order)
        if len(level) > room:
            level = level[:room]
            truncated = True
        order.extend(level)
        depth.extend([k] * len(level))
        seen.update(level)
        if truncated:
            break
        nxt = {oracle._mul(g, x) for x in level for g in letters}
        level = sorted(nxt - seen, key=key)
        k += 1
    frontier = ()
    if truncated:
        frontier = [
            i
            for i, x in enumerate(order)
            if oracle._inv(x) not in seen or any(oracle._mul(g, x) not in seen for g in letters)
        ]
    return FiniteSemigroup.build(
        oracle,
        order,
        status="Truncated" if truncated else "Complete",
        cap=cap if truncated else None,
        depth=depth,
        frontier=frontier,
    )


def enumerate_all(oracle):
    """The whole of a finite oracle as a Complete table in canonical order."""
    if not oracle.finite:
        raise ScopeRequired(f"{oracle.name} is infinite")
    return FiniteSemigroup.build(oracle, sorted(oracle.elements(), key=oracle.sort_key))


def truncate(oracle, grade):
    """All elements of grade at most ``grade``; the top grade is the frontier."""
    if oracle.finite:
        return enumerate_all(oracle)
    elements = sorted(oracle.elements(grade), key=lambda a: (oracle.grade(a), oracle.sort_key(a)))
    frontier = [i for i, a in enumerate(elements) if oracle.grade(a) >= grade]
    return FiniteSemigroup.build(oracle, elements, status="Truncated", cap=grade, frontier=frontier)


# ---------------------------------------------------------------------------
# Green's relations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GreenTable:
    l_id: tuple
    r_id: tuple
    d_id: tuple
    l_classes: tuple
    r_classes: tuple
    d_classes: tuple

    def members(self, relation, i):
        relation = relation.upper()
        ids = {"L": self.l_id, "R": self.r_id, "D": self.d_id}[relation]
        classes = {"L": self.l_classes, "R": self.r_classes, "D": self.d_classes}[relation]
        return classes[ids[i]]


def _classes_by_key(keys):
    ids, classes, seen = [], [], {}
    for i, k in enumerate(keys):
        if k not in seen:
            seen[k] = len(classes)
            classes.append([])
        ids.append(seen[k])
        classes[seen[k]].append(i)
    return tuple(ids), tuple(tuple(c) for c in classes)


def green_table(S):
    """L-, R- and D-classes of a tabulated semigroup.

    Class ids are numbered by the first member in table order.  On a
    truncated table D is the join of L and R restricted to the table.
    """
    oracle = S.oracle
    l_id, l_classes = _classes_by_key([oracle.left_idempotent(a) for a in S.elements])
    r_id, r_classes = _classes_by_key([oracle.right_idempotent(a) for a in S.elements])
    ds = DisjointSet(range(len(S)))
    for cls in itertools.chain(l_classes, r_classes):
        for i in cls[1:]:
            ds.merge(cls[0], i)
    d_id, d_classes = _classes_by_key([ds[i] for i in range(len(S))])
    return GreenTable(l_id, r_id, d_id, l_classes, r_classes, d_classes)


# ---------------------------------------------------------------------------
# constructions on finite tables
# ---------------------------------------------------------------------------


def adjoin_identity(S):
    """``S^1`` with the new identity placed last."""
    oracle = AdjoinedIdentity(S.oracle)
    m = len(S)
    product = np.full((m + 1, m + 1), -1, dtype=np.int64)
    product[:m, :m] = S.product
    product[m, :] = np.arange(m + 1)
    product[:, m] = np.arange(m + 1)
    inverse = np.append(S.inverse, m)
    idempotent = np.append(S.idempotent, True)
    return FiniteSemigroup(
        oracle,
        S.elements + (ONE,),
        product,
        inverse,
        idempotent,
        S.status,
        S.cap,
        S.depth + (0,),
        S.frontier,
    )


@dataclass(frozen=True)
class Classification:
    kind: str  # "Group" | "Semilattice" | "General"
    idempotents: tuple
    warning: str | None = None


def classify(S):
    """Group iff exactly one idempotent, Semilattice iff all elements are idempotent."""
    idem = tuple(S.idempotents())
    if len(idem) == 1:
        kind = "Group"
    elif len(idem) == len(S):
        kind = "Semilattice"
    else:
        kind = "General"
    warning = None
    if not S.complete:
        warning = f"classification at scale: table is {S.label}"
    return Classification(kind, idem, warning)


# ---------------------------------------------------------------------------
# families and serialisation
# ---------------------------------------------------------------------------


def _group_from(desc):
    if isinstance(desc, str):
        m = re.fullmatch(r"Z(\d+)", desc)
        if not m:
            raise DescriptorError(f"unknown group {desc!r}; expected Z<k> or a table")
        k = int(m.group(1))
        names = ["e", "a"] if k == 2 else None
        return cyclic_group(k, names)
    if isinstance(desc, dict):
        g = ConcreteSemigroup(
            [_tuplify(x) for x in desc["elements"]],
            desc["product"],
            desc.get("inverse"),
            name=desc.get("name", "group"),
        )
        idem = [a for a in g.labels if g._mul(a, a) == a]
        if len(idem) != 1:
            raise DescriptorError(f"group table has {len(idem)} idempotents; a group has exactly one")
        return g
    raise DescriptorError(f"cannot read a group from {desc!r}")


def _chain_from(desc):
    if desc in ("N", "n", "nat"):
        return Chain(1, None)
    if desc in ("Z-", "z-"):
        return Chain(None, -1)
    if isinstance(desc, int) or (isinstance(desc, str) and desc.isdigit()):
        k = int(desc)
        if k < 1:
            raise DescriptorError(f"chain length must be positive, got {k}")
        return Chain(0, k - 1)
    if isinstance(desc, dict):
        return Chain(desc.get("lo", 1), desc.get("hi"))
    raise DescriptorError(f"unknown chain {desc!r}; expected N, Z-, or a length")


def make_family(desc):
    """Build an oracle from a descriptor.

    Strings: ``I3``, ``bicyclic``, ``fim1``, ``Z2``, ``chain(N)``,
    ``chain(10)``, ``product(Z2,N)``.  Dicts carry a ``family`` key plus
    its parameters; see the README for the full list.
    """
    if isinstance(desc, str):
        s = desc.strip()
        if s.startswith("{"):
            return make_family(json.loads(s))
        if m := re.fullmatch(r"I(\d+)", s):
            return SymmetricInverseMonoid(int(m.group(1)))
        if s == "bicyclic":
            return Bicyclic()
        if s == "fim1":
            return FreeInverseMonoid1()
        if re.fullmatch(r"Z\d+", s):
            return _group_from(s)
        if m := re.fullmatch(r"chain\((.+)\)", s):
            return _chain_from(m.group(1).strip())
        if m := re.fullmatch(r"product\(([^,]+),(.+)\)", s):
            return ProductSemigroup(_group_from(m.group(1).strip()), _chain_from(m.group(2).strip()))
        raise DescriptorError(f"unknown family {desc!r}")
    if not isinstance(desc, dict) or "family" not in desc:
        raise DescriptorError("descriptor must be a string or an object with a 'family' key")
    fam = desc["family"]
    if fam == "symmetric_inverse_monoid":
        n = desc.get("n")
        if not isinstance(n, int) or n < 1:
            raise DescriptorError(f"symmetric_inverse_monoid needs integer n >= 1, got {n!r}")
        return SymmetricInverseMonoid(n)
    if fam == "bicyclic":
        return Bicyclic()
    if fam == "fim1":
        return FreeInverseMonoid1()
    if fam == "chain":
        return _chain_from(desc.get("chain", desc.get("length", "N")))
    if fam == "product":
        if "group" not in desc or "chain" not in desc:
            raise DescriptorError("product needs both 'group' and 'chain'")
        return ProductSemigroup(_group_from(desc["group"]), _chain_from(desc["chain"]))
    if fam == "concrete":
        for k in ("elements", "product"):
            if k not in desc:
                raise DescriptorError(f"concrete family needs {k!r}")
        return ConcreteSemigroup(
            [_tuplify(x) for x in desc["elements"]], desc["product"], desc.get("inverse")
        )
    if fam == "generated":
        n = desc.get("n")
        if not isinstance(n, int) or n < 1:
            raise DescriptorError(f"generated family needs integer n >= 1, got {n!r}")
        ambient = SymmetricInverseMonoid(n)
        try:
            gens = [ambient.decode(g) for g in desc.get("generators", [])]
        except (TypeError, ValueError) as exc:
            raise DescriptorError(f"bad generator: {exc}") from None
        if not gens:
            raise DescriptorError("generated family needs at least one generator")
        S = generate_closure(ambient, gens, cap=10**6)
        return _concrete_from_table(S, name=f"<{len(gens)} gens in I{n}>", encode=ambient.encode)
    raise DescriptorError(f"unknown family {fam!r}")


def _concrete_from_table(S, name="concrete", encode=None):
    if not S.closed:
        raise DescriptorError("only closed tables can become concrete semigroups")
    g = ConcreteSemigroup(S.elements, S.product, S.inverse, name=name, check=False)
    if encode is not None:
        g.encode = encode
    return g


def semigroup_to_json(S):
    """Versioned JSON document for a closed table."""
    if not S.closed:
        raise ValueError("cannot export a table that is not closed under product and inverse")
    doc = {
        "version": JSON_VERSION,
        "elements": [S.oracle.encode(a) for a in S.elements],
        "product": S.product.tolist(),
        "inverse": S.inverse.tolist(),
    }
    return json.dumps(doc)


def semigroup_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else text
    if doc.get("version", JSON_VERSION) != JSON_VERSION:
        raise DescriptorError(f"unsupported document version {doc.get('version')}")
    oracle = make_family({"family": "concrete", **{k: doc[k] for k in ("elements", "product")}, "inverse": doc.get("inverse")})
    return enumerate_all(oracle)
