import math

import pytest

from invcoarse import suite
from invcoarse.metric import (
    INF,
    NOT_FOUND,
    WeightedGenerators,
    chain_from_weights,
    check_axioms,
    check_d_class_isometry,
    check_domination,
    check_inverse_isometry,
    check_left_translation,
    check_subinvariance,
    check_witness,
    coarse_triviality,
    cylinder_and_fub,
    filtration_length,
    length_from_metric,
    metric_from_length,
    properness_witness,
    schuetzenberger_graph,
    validate_metric,
    weighted_word_metric,
    word_metric,
)
from invcoarse.semigroup import (
    Bicyclic,
    FreeInverseMonoid1,
    PartialBijection,
    SymmetricInverseMonoid,
    enumerate_all,
    gamma,
    generate_closure,
    green_table,
    truncate,
)

from oracles import reference_word_metric

I3 = SymmetricInverseMonoid(3)
B = Bicyclic()
F = FreeInverseMonoid1()


def i3_metric(weights=None):
    gens = suite.default_generators(I3)
    S = generate_closure(I3, gens)
    if weights is None:
        W = WeightedGenerators.unit(I3, gens)
    else:
        W = WeightedGenerators.from_pairs(I3, list(zip(gens, weights)))
    return S, W, word_metric(S, W)


def reference(S, W):
    o = S.oracle
    return reference_word_metric(S.elements, o._mul, o._inv, list(W.items()))


@pytest.mark.parametrize("weights", [None, (1, 1, 1), (2, 3, 1), (5, 1, 4)])
def test_word_metric_matches_reference_graph(weights):
    S, W, d = i3_metric(weights)
    ref = reference(S, W)
    for i, a in enumerate(S.elements):
        for j, b in enumerate(S.elements):
            assert d.d(i, j) == ref.get((a, b), INF)


def test_word_metric_is_symmetric_and_infinite_across_l_classes():
    S, W, d = i3_metric()
    for i, a in enumerate(S.elements):
        for j, b in enumerate(S.elements):
            same = I3.left_idempotent(a) == I3.left_idempotent(b)
            assert (d.d(i, j) < INF) == same
            assert d.d(i, j) == d.d(j, i)


def test_axioms_and_subinvariance_hold_on_i3():
    _, _, d = i3_metric((2, 3, 1))
    assert check_axioms(d).ok
    assert check_subinvariance(d).ok
    assert check_subinvariance(d).checked > 0


def test_lemma_checks_on_i3():
    S, _, d = i3_metric((2, 1, 3))
    assert check_left_translation(d).ok
    assert check_inverse_isometry(d).ok
    assert check_d_class_isometry(d, green_table(S)).ok


def test_length_metric_round_trip():
    _, _, d = i3_metric((3, 2, 1))
    l = length_from_metric(d)
    d2 = metric_from_length(l)
    n = len(d)
    assert all(d.d(i, j) == d2.d(i, j) for i in range(n) for j in range(n))
    assert length_from_metric(d2) == l


def test_length_function_properties():
    S, _, d = i3_metric((1, 2, 2))
    l = length_from_metric(d)
    for s in S.elements:
        assert (l(s) == 0) == I3.is_idempotent(s)
        assert l(s) == l(I3.invert(s))
    for s in S.elements:
        for t in S.elements:
            st = I3.multiply(s, t)
            assert l(st) <= l(s) + l(t)


@pytest.mark.parametrize("weights", [(1, 1, 1), (2, 3, 1), (4, 1, 2)])
def test_filtration_length_matches_word_length(weights):
    S, W, d = i3_metric(weights)
    via_filtration = filtration_length(S, chain_from_weights(W))
    assert via_filtration == length_from_metric(d)


def test_filtration_rejects_bad_chains():
    S = enumerate_all(I3)
    g = gamma(2, 1, 3)
    with pytest.raises(ValueError):
        filtration_length(S, [[g]])
    with pytest.raises(ValueError):
        filtration_length(S, [[g, I3.invert(g), gamma(3, 1, 3), gamma(1, 3, 3)], [g, I3.invert(g)]])
    with pytest.raises(ValueError):
        filtration_length(S, [])


def test_properness_witness_covers_every_pair():
    _, _, d = i3_metric()
    for r in (1, 2, 3):
        F_r = properness_witness(d, r)
        assert F_r != NOT_FOUND
        assert check_witness(d, F_r, r) == []


def test_properness_witness_from_explicit_candidates_can_fail():
    _, _, d = i3_metric()
    idem = [a for a in d.elements if I3.is_idempotent(a)]
    assert properness_witness(d, 1, candidates=idem) == NOT_FOUND


def test_validate_metric_report():
    _, _, d = i3_metric()
    rep = validate_metric(d, 2)
    assert rep.ok
    doc = rep.to_json(I3)
    assert set(doc["witnesses"]) == {"1", "2"}


def test_ball_mode_agrees_with_truncation_on_bicyclic():
    W = WeightedGenerators.unit(B, [B.p, B.q])
    ball = weighted_word_metric(B, W, [B.identity()], radius=4)
    assert ball.status == "Ball(4)"
    # the L-class of the identity is {q^a : a >= 0}; the ball holds q^0..q^4
    assert set(ball.elements) == {(a, 0) for a in range(5)}
    for a in range(5):
        for b in range(5):
            assert ball.distance((a, 0), (b, 0)) == abs(a - b)
    assert ball.frontier == frozenset({ball.index[(4, 0)]})


def test_ball_on_fim1_l_class():
    # s*s = (a-g, 0, b-g), so the L-class of (-1,0,1) is {(g-1, g, g+1): -1 <= g <= 1}
    W = WeightedGenerators.unit(F, [F.x])
    ball = weighted_word_metric(F, W, [(-1, 0, 1)], radius=1)
    assert set(ball.elements) == {(g - 1, g, g + 1) for g in (-1, 0, 1)}
    assert ball.distance((-2, -1, 0), (0, 1, 2)) == 2


def test_fim1_l_class_is_a_path():
    S = truncate(F, 6)
    d = word_metric(S, suite.weighted_defaults(F))
    # L-class of the idempotent (A,0,B): (A+g, g, B+g) for -B <= g <= -A
    for A in range(-3, 1):
        for Bv in range(0, 4):
            if Bv - A > 6:
                continue
            cls = [(A + g, g, Bv + g) for g in range(-Bv, -A + 1)]
            assert len(cls) == Bv - A + 1
            for s in cls:
                for t in cls:
                    assert d.distance(s, t) == abs(s[1] - t[1])


def test_restrict_keeps_distances():
    _, _, d = i3_metric()
    keep = list(range(0, len(d), 2))
    sub = d.restrict(keep)
    for p, i in enumerate(keep):
        for q, j in enumerate(keep):
            assert sub.d(p, q) == d.d(i, j)


def test_csv_and_json_export():
    _, _, d = i3_metric()
    text = d.to_csv()
    rows = text.strip().split("\n")
    assert len(rows) == len(d) + 1
    assert "inf" in text
    doc = d.to_json()
    assert doc["status"] == "Complete" and len(doc["elements"]) == 34


def test_cylinder_and_fub_bicyclic():
    S = truncate(B, 12)
    d = word_metric(S, suite.weighted_defaults(B))
    l = length_from_metric(d)
    out = cylinder_and_fub(l, 1)
    assert set(out["fub"]) == {B.p, B.q}
    assert all(B.natural_leq(s, B.p) or B.natural_leq(s, B.q) for s in out["cylinder"])


def test_cylinder_on_finite_semigroup():
    _, _, d = i3_metric()
    out = cylinder_and_fub(length_from_metric(d), 1)
    assert out["fub"] != NOT_FOUND
    for s in out["cylinder"]:
        assert any(I3.natural_leq(s, t) for t in out["fub"])


def test_coarse_triviality_finite_and_truncated():
    S, _, d = i3_metric()
    v = coarse_triviality(S, d)
    assert v.status == "Established" and v.statistics["supremum"] < math.inf
    T = truncate(B, 10)
    dB = word_metric(T, suite.weighted_defaults(B))
    w = coarse_triviality(T, dB)
    assert w.status == "EvidenceAtScale" and w.statistics["polarity"] == "negative"


def test_schuetzenberger_graph_edges():
    W = WeightedGenerators.unit(B, [B.p, B.q])
    G = schuetzenberger_graph(B, W, B.identity(), 2)
    assert G.vertices[0] == B.identity()
    assert set(G.vertices) == {(0, 0), (1, 0), (2, 0)}
    for s, g, t, _ in G.edges:
        assert B.multiply(g, s) == t
        assert B.multiply(B.multiply(B.invert(g), g), s) == s
    assert G.to_dot().startswith("digraph")


def test_weighted_generators_add_inverses():
    W = WeightedGenerators.from_pairs(B, [(B.p, 3)])
    assert dict(W.items()) == {B.p: 3, B.q: 3}
    with pytest.raises(ValueError):
        WeightedGenerators.from_pairs(B, [(B.p, 0)])


def test_domination_holds_on_subsemigroup():
    S, _, d = i3_metric()
    A = [PartialBijection(3, ((1, 2), (2, 3))), PartialBijection.identity_on(3, (1, 3))]
    assert check_domination(S, d, A).ok
