"""Brute-force reference implementations, independent of the package arithmetic."""
import itertools

import networkx as nx


def all_partial_maps(n):
    """Every injective partial map on 1..n as a frozenset of (source, target) pairs."""
    out = set()
    for imgs in itertools.product(range(n + 1), repeat=n):
        nz = [v for v in imgs if v]
        if len(nz) == len(set(nz)):
            out.add(frozenset((i + 1, v) for i, v in enumerate(imgs) if v))
    return out


def compose_maps(s, t):
    """s after t, both as frozensets of pairs."""
    sd = dict(s)
    return frozenset((a, sd[b]) for a, b in t if b in sd)


def brute_closure(gens):
    """Closure of a set of pair-sets under composition and inversion, by fixpoint."""
    cur = set(gens) | {frozenset((b, a) for a, b in g) for g in gens}
    while True:
        new = {compose_maps(a, b) for a in cur for b in cur} | cur
        if new == cur:
            return cur
        cur = new


# bicyclic monoid as partial shifts of {0..N}: p: x -> x-1 (x >= 1), q: x -> x+1 (x < N)


def shift_p(N):
    return {x: x - 1 for x in range(1, N + 1)}


def shift_q(N):
    return {x: x + 1 for x in range(N)}


def compose_dicts(s, t):
    return {x: s[y] for x, y in t.items() if y in s}


def word_shift(word, N):
    """Product of letters 'p'/'q' as a partial map, leftmost letter applied last."""
    m = {x: x for x in range(N + 1)}
    for letter in reversed(word):
        m = compose_dicts(shift_p(N) if letter == "p" else shift_q(N), m)
    return m


# free inverse monoid on one generator as walks on the integer line


def walk_triple(word):
    """Word over 'x' (step +1) and 'X' (step -1) read left to right as a walk.

    Left-to-right reading matches the product of the letters in order.
    """
    pos, lo, hi = 0, 0, 0
    for letter in word:
        pos += 1 if letter == "x" else -1
        lo, hi = min(lo, pos), max(hi, pos)
    return (lo, pos, hi)


def words(alphabet, max_len):
    for k in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=k)


def reference_word_metric(elements, mul, inv, gens):
    """All-pairs distances of the Schützenberger graph, via networkx on an explicit digraph.

    ``gens`` is a list of (generator, weight).  Returns {(a, b): distance} for
    reachable pairs only.
    """
    members = set(elements)
    g = nx.DiGraph()
    g.add_nodes_from(elements)
    for t in elements:
        for x, w in gens:
            if mul(mul(inv(x), x), t) == t:
                y = mul(x, t)
                if y in members and y != t:
                    if g.has_edge(t, y):
                        w = min(w, g[t][y]["weight"])
                    g.add_edge(t, y, weight=w)
    out = {}
    for a, lengths in nx.all_pairs_dijkstra_path_length(g):
        for b, v in lengths.items():
            out[(a, b)] = v
    return out
