import json
import random

import numpy as np
import pytest

from invcoarse import suite
from invcoarse.metric import INF, length_from_metric, word_metric
from invcoarse.roe import (
    AlignmentError,
    BandOperator,
    DecompositionUnavailable,
    decompose_band,
    diagonal,
    is_proper_isometry,
    path_shift,
    propagation,
    random_band_operator,
    reassemble,
    wagner_preston,
)
from invcoarse.semigroup import FreeInverseMonoid1, SymmetricInverseMonoid, enumerate_all, gamma, truncate

I3 = SymmetricInverseMonoid(3)
S = enumerate_all(I3)
D = word_metric(S, suite.weighted_defaults(I3))


def test_wagner_preston_entries_by_hand():
    s = gamma(2, 1, 3)
    v = wagner_preston(S, s)
    expected = np.zeros((len(S), len(S)), dtype=np.int64)
    for j, t in enumerate(S.elements):
        # s*s t = t  iff  the image of t lies in dom(s) = {1}
        if t.image <= {1}:
            expected[S.index[s.compose(t)], j] = 1
    assert np.array_equal(v.matrix, expected)
    assert v.exact


def test_wagner_preston_is_a_representation():
    rng = random.Random(1)
    for _ in range(30):
        s, t = rng.choice(S.elements), rng.choice(S.elements)
        vs, vt = wagner_preston(S, s), wagner_preston(S, t)
        assert np.array_equal((vs @ vt).matrix, wagner_preston(S, I3.multiply(s, t)).matrix)
        assert np.array_equal(vs.adjoint().matrix, wagner_preston(S, I3.invert(s)).matrix)


def test_wagner_preston_propagation_bounded_by_length():
    l = length_from_metric(D)
    for s in S.elements:
        assert propagation(wagner_preston(S, s), D) <= l(s)


def test_diagonal_has_zero_propagation():
    assert propagation(diagonal(S.elements, np.arange(len(S))), D) == 0


def test_propagation_across_l_classes_is_infinite():
    M = np.zeros((len(S), len(S)), dtype=np.int64)
    a, b = S.index[gamma(1, 1, 3)], S.index[gamma(2, 2, 3)]
    M[a, b] = 1
    assert propagation(BandOperator(S.elements, M), D) == INF
    with pytest.raises(DecompositionUnavailable):
        decompose_band(BandOperator(S.elements, M, I3), D, S)


@pytest.mark.parametrize("seed", range(10))
def test_random_band_decomposes(seed):
    T = random_band_operator(random.Random(seed), D, S, 2)
    res = decompose_band(T, D, S)
    assert res.residual <= 1e-9
    assert res.residual_frobenius <= 1e-9
    assert res.propagation <= 2
    assert np.allclose(reassemble(S, res.terms), T.matrix)
    for s, f in res.terms:
        assert s in res.witness or I3.is_idempotent(s)


def test_exact_operator_decomposes_with_zero_residual():
    T = wagner_preston(S, gamma(2, 1, 3))
    res = decompose_band(T, D, S)
    assert res.residual == 0.0
    assert np.array_equal(reassemble(S, res.terms, dtype=np.int64), T.matrix)


def test_alignment_error():
    T = BandOperator(S.elements[:-1], np.zeros((len(S) - 1, len(S) - 1)))
    with pytest.raises(AlignmentError):
        decompose_band(T, D, S)


def test_band_operator_json_round_trip():
    T = random_band_operator(random.Random(4), D, S, 1)
    doc = json.dumps(T.to_json())
    back = BandOperator.from_json(doc, I3)
    assert back.indices == T.indices
    assert np.allclose(back.matrix, T.matrix)
    E = wagner_preston(S, gamma(3, 1, 3))
    assert BandOperator.from_json(json.dumps(E.to_json()), I3).exact


def test_band_operator_shape_checked():
    with pytest.raises(ValueError):
        BandOperator(("a", "b"), np.zeros((3, 3)))


def test_path_shift_is_never_a_proper_isometry_in_finite_dimension():
    F = FreeInverseMonoid1()
    dF = word_metric(truncate(F, 6), suite.weighted_defaults(F))
    path = [(g - 3, g, g + 3) for g in range(-3, 4)]  # one L-class, consecutive at distance 1
    rep = path_shift(path, dF.elements, dF, 1, F)
    verdict = is_proper_isometry(rep.operator)
    assert verdict["verdict"] is False
    assert rep.source_defect == (path[-1],)
    assert rep.range_defect == (path[0],)


def test_path_shift_rejects_long_steps():
    F = FreeInverseMonoid1()
    dF = word_metric(truncate(F, 6), suite.weighted_defaults(F))
    with pytest.raises(ValueError):
        path_shift([(-3, 0, 3), (-1, 2, 5)], dF.elements, dF, 1, F)
    with pytest.raises(ValueError):
        path_shift([(-3, 0, 3), (-3, 0, 3)], dF.elements, dF, 1, F)


def test_unitary_is_isometry_but_not_proper():
    U = BandOperator(("a", "b"), np.array([[0, 1], [1, 0]]))
    rep = is_proper_isometry(U)
    assert rep["isometry"] and not rep["verdict"]
