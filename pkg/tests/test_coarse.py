import networkx as nx
import pytest

from invcoarse import suite
from invcoarse.coarse import (
    AlignmentError,
    asdim0_evidence,
    coarse_profile,
    local_finiteness_probe,
    local_L_finiteness_probe,
    long_path,
    profile_growth,
    r_components,
    revalidate_path,
    sparse_evidence,
)
from invcoarse.metric import word_metric
from invcoarse.semigroup import (
    Bicyclic,
    FreeInverseMonoid1,
    SymmetricInverseMonoid,
    enumerate_all,
    make_family,
    truncate,
)

I3 = SymmetricInverseMonoid(3)
B = Bicyclic()
F = FreeInverseMonoid1()


def fim1_table(scope):
    return word_metric(truncate(F, scope), suite.weighted_defaults(F))


def bicyclic_table(scope):
    return word_metric(truncate(B, scope), suite.weighted_defaults(B))


def i3_table():
    S = enumerate_all(I3)
    return word_metric(S, suite.weighted_defaults(I3))


def reference_components(d, r):
    g = nx.Graph()
    g.add_nodes_from(range(len(d)))
    for i in range(len(d)):
        for j in range(len(d)):
            if i != j and d.d(i, j) <= r:
                g.add_edge(i, j)
    return {frozenset(c) for c in nx.connected_components(g)}


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_r_components_match_networkx(r):
    for d in (i3_table(), fim1_table(6), bicyclic_table(6)):
        part = r_components(d, r)
        assert {frozenset(b.members) for b in part.blocks} == reference_components(d, r)
        for b in part.blocks:
            for i in b.members:
                assert part.block_of[i] == part.blocks.index(b)


def test_zero_scale_gives_singletons():
    d = i3_table()
    assert all(b.size == 1 for b in r_components(d, 0).blocks)


def test_negative_scale_rejected():
    with pytest.raises(ValueError):
        r_components(i3_table(), -1)


def test_i3_one_components_are_l_classes():
    d = i3_table()
    part = r_components(d, 1)
    for b in part.blocks:
        e = {I3.left_idempotent(d.elements[i]) for i in b.members}
        assert len(e) == 1
    # the L-class of a rank-k map with domain A holds the injections of A into 3 points
    sizes = sorted(part.sizes())
    assert sizes == sorted([1] + [3] * 3 + [6] * 3 + [6])


def test_finite_scope_verdicts_established():
    d = i3_table()
    assert asdim0_evidence(d, [1, 2]).status == "Established"
    assert sparse_evidence(d, [1, 2]).status == "Established"


def test_fim1_closed_blocks_match_closed_form():
    d = fim1_table(8)
    part = r_components(d, 1)
    for b in part.blocks:
        if b.touches_frontier:
            continue
        A, _, Bv = F.left_idempotent(d.elements[b.members[0]])
        assert b.size == Bv - A + 1


def test_fim1_verdicts():
    d = fim1_table(8)
    sp = sparse_evidence(d, [1])
    assert sp.status == "EvidenceAtScale" and sp.statistics["polarity"] == "positive"
    asd = asdim0_evidence(d, [1])
    assert asd.status == "RefutedAtScale"
    assert asd.statistics["witness_length"] >= 8
    assert asd.statistics["witness_revalidated"]
    path = list(asd.witness)
    assert len(set(path)) == len(path)
    for a, b in zip(path, path[1:]):
        assert d.distance(a, b) <= 1


def test_bicyclic_verdicts_negative():
    d = bicyclic_table(8)
    assert sparse_evidence(d, [1]).statistics["polarity"] == "negative"
    assert asdim0_evidence(d, [1]).status == "RefutedAtScale"


def test_revalidate_rejects_bad_path():
    W = suite.weighted_defaults(F)
    assert revalidate_path(F, W, [(0, 0, 1), (-1, 0, 0)], 1) is False
    assert revalidate_path(F, W, [(0, 0, 1), (-1, -1, 0)], 1) is True
    assert revalidate_path(F, W, [(0, 0, 1), (-1, -1, 0), (0, 0, 1)], 1) is False


def test_long_path_is_a_shortest_path_in_fim1_block():
    d = fim1_table(6)
    part = r_components(d, 1)
    big = max(part.blocks, key=lambda b: b.size)
    path = long_path(d, big, 1)
    assert len(path) == big.size  # a block of fim1 is itself a path


def test_coarse_profile_on_product():
    _, _, d1, d2 = suite.product_tables(10)
    prof = coarse_profile(d1, d2)
    assert prof["violations"] == []
    assert prof["rho_plus"][1] == 10
    with pytest.raises(AlignmentError):
        coarse_profile(d1, i3_table())


def test_profile_growth_unbounded_on_product():
    tables = [(k,) + suite.product_tables(k)[2:] for k in (4, 6, 8)]
    g = profile_growth(tables, r=1)
    assert g["unbounded"]
    assert [v for _, v in g["series"]] == [4, 6, 8]


def test_profile_growth_bounded_when_identical():
    _, _, d1, _ = suite.product_tables(6)
    assert not profile_growth([(6, d1, d1), (6, d1, d1)], r=1)["unbounded"]


def test_local_finiteness_probe():
    v = local_finiteness_probe(I3, [suite.default_generators(I3)])
    assert v.status == "Established"
    w = local_finiteness_probe(B, [[B.p]], cap=50)
    assert w.status == "EvidenceAtScale" and w.statistics["polarity"] == "negative"
    C = make_family("chain(N)")
    u = local_finiteness_probe(C, [[3, 5], [1]])
    assert u.statistics["polarity"] == "positive"


def test_local_l_finiteness_probe():
    # fim1 has finite L-classes; the bicyclic monoid has infinite ones
    v = local_L_finiteness_probe(F, [[F.x]], cap=400)
    assert v.status == "EvidenceAtScale"
    assert v.statistics["polarity"] == "positive"
    w = local_L_finiteness_probe(B, [[B.p]], cap=400)
    assert w.status == "RefutedAtScale"
