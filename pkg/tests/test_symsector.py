import math

import numpy as np
import pytest

from quon.fock import FockVector, apply, inner_product, sandwich, vev_rewrite
from quon.qnum import QPoly, q_bracket, q_bracket_poly
from quon.symsector import (
    CapExceeded, OccupancyVector, attach_exact, berkowitz_charpoly,
    charpoly_from_roots, classify_sectors, enumerate_permutation_words,
    exact_eigen_polys, gram_matrix, label_projection, lower_symmetric,
    raise_symmetric_matrix_element, sector_directions, symmetric_matrix_element,
    symmetric_state, symmetrized_norm_poly, symmetrized_word,
)

S3 = QPoly([1, 2, 2, 1])
A3 = QPoly([1, -2, 2, -1])
M3a = QPoly([1, 1, -1, -1])
M3b = QPoly([1, -1, -1, 1])


def test_enumerate_examples():
    assert enumerate_permutation_words({1: 1, 2: 1}) == [(1, 2), (2, 1)]
    assert enumerate_permutation_words({1: 2}) == [(1, 1)]
    assert len(enumerate_permutation_words({1: 1, 2: 1, 3: 1})) == 6


def test_enumerate_counts_and_order():
    occ = OccupancyVector({0: 2, 1: 1, 2: 2})
    words = enumerate_permutation_words(occ)
    assert len(words) == math.factorial(5) // (2 * 1 * 2)
    assert words == sorted(set(words))


def test_enumerate_cap():
    with pytest.raises(CapExceeded):
        enumerate_permutation_words({1: 5, 2: 4})
    assert len(enumerate_permutation_words({1: 5, 2: 4}, cap=9)) == 126
    with pytest.raises(ValueError):
        enumerate_permutation_words({})


def test_occupancy_vector():
    occ = OccupancyVector.parse(["2:1", "1:2", "3:0"])
    assert dict(occ) == {1: 2, 2: 1}
    assert occ.total == 3 and occ.word() == (1, 1, 2)
    assert occ.shifted(1, -1) == {1: 1, 2: 1}
    with pytest.raises(ValueError):
        occ.shifted(3, -1)
    with pytest.raises(ValueError):
        OccupancyVector.parse(["12"])


def test_gram_two_modes():
    words = enumerate_permutation_words({1: 1, 2: 1})
    np.testing.assert_allclose(gram_matrix(words, 0.3), [[1, 0.3], [0.3, 1]])
    assert gram_matrix(words) == ((QPoly([1]), QPoly([0, 1])), (QPoly([0, 1]), QPoly([1])))


def test_gram_repeated_mode_and_q_zero():
    np.testing.assert_allclose(gram_matrix([(1, 1)], 0.4), [[1.4]])
    words = enumerate_permutation_words({1: 2, 2: 1, 3: 1})
    np.testing.assert_allclose(gram_matrix(words, 0.0), np.eye(len(words)))


def test_gram_entries_match_rewrite_oracle():
    words = enumerate_permutation_words({1: 2, 2: 1})
    exact = gram_matrix(words)
    for a, wa in enumerate(words):
        for b, wb in enumerate(words):
            assert exact[a][b] == vev_rewrite(sandwich(wa, wb))


def test_gram_threads_deterministic():
    words = enumerate_permutation_words({0: 2, 1: 2, 2: 2})
    one = gram_matrix(words, 0.7, threads=1)
    four = gram_matrix(words, 0.7, threads=4)
    assert one.tobytes() == four.tobytes()
    assert gram_matrix(words[:10], threads=3) == gram_matrix(words[:10])


@pytest.mark.parametrize("q", [-0.7, 0.2, 0.5, 0.9])
def test_classify_two_modes(q):
    words = enumerate_permutation_words({1: 1, 2: 1})
    spec = classify_sectors(gram_matrix(words, q), words)
    assert sorted(spec.sector_labels) == ["antisymmetric", "symmetric"]
    assert spec.sector("symmetric").eigenvalue == pytest.approx(1 + q)
    assert spec.sector("antisymmetric").eigenvalue == pytest.approx(1 - q)


@pytest.mark.parametrize("q", [-0.6, 0.3, 0.5, 0.8])
def test_classify_three_distinct_modes(q):
    words = enumerate_permutation_words({1: 1, 2: 1, 3: 1})
    spec = classify_sectors(gram_matrix(words, q), words)
    got = sorted((round(c.eigenvalue, 12), c.multiplicity, c.label[:5]) for c in spec.clusters)
    want = sorted([(round(S3(q), 12), 1, "symme"), (round(A3(q), 12), 1, "antis"),
                   (round(M3a(q), 12), 2, "mixed"), (round(M3b(q), 12), 2, "mixed")])
    assert got == want
    assert sum(spec.multiplicities) == 6
    V = spec.eigenvectors
    np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-10)


def test_classify_bosonic_limit():
    words = enumerate_permutation_words({1: 1, 2: 1, 3: 1})
    spec = classify_sectors(gram_matrix(words, 1.0), words)
    assert spec.sector("symmetric").eigenvalue == pytest.approx(6.0)
    assert [c.label for c in spec.non_null()] == ["symmetric"]
    assert sorted(spec.eigenvalues, reverse=True)[1] == pytest.approx(0.0, abs=1e-12)


def test_classify_q_zero_degenerate_labels():
    words = enumerate_permutation_words({1: 1, 2: 1, 3: 1})
    spec = classify_sectors(gram_matrix(words, 0.0), words)
    assert {c.label for c in spec.clusters} == {"symmetric", "antisymmetric", "mixed(1)"}


def test_label_projections():
    words = enumerate_permutation_words({1: 1, 2: 1, 3: 1})
    spec = classify_sectors(gram_matrix(words, 0.4), words)
    sym, anti = sector_directions(words)
    assert label_projection(spec.sector("symmetric").vectors, sym) > 1 - 1e-8
    assert label_projection(spec.sector("antisymmetric").vectors, anti) > 1 - 1e-8
    for c in spec.clusters:
        if c.label.startswith("mixed"):
            assert label_projection(c.vectors, sym) < 1e-8
            assert label_projection(c.vectors, anti) < 1e-8


def test_repeated_modes_have_no_antisymmetric_sector():
    words = enumerate_permutation_words({1: 2, 2: 1})
    spec = classify_sectors(gram_matrix(words, 0.5), words)
    assert "antisymmetric" not in spec.sector_labels
    assert spec.sector("symmetric").eigenvalue == pytest.approx(q_bracket(3, 0.5) * (1 + 0.5))


def test_exact_charpoly_three_modes():
    words = enumerate_permutation_words({1: 1, 2: 1, 3: 1})
    cp = berkowitz_charpoly(gram_matrix(words))
    assert cp == charpoly_from_roots([(S3, 1), (A3, 1), (M3a, 2), (M3b, 2)])


def test_berkowitz_against_numpy():
    rng = np.random.default_rng(0)
    M = rng.integers(-4, 5, size=(5, 5))
    cp = berkowitz_charpoly([[QPoly([int(x)]) for x in row] for row in M])
    np.testing.assert_allclose([c(0) for c in cp], np.poly(M), atol=1e-8)


def test_exact_eigen_polys_and_attach():
    words = enumerate_permutation_words({1: 1, 2: 1, 3: 1})
    roots, leftover = exact_eigen_polys(words)
    assert leftover == 0
    assert sorted(roots, key=lambda r: r[0].coeffs) == sorted(
        [(S3, 1), (A3, 1), (M3a, 2), (M3b, 2)], key=lambda r: r[0].coeffs)
    spec = attach_exact(classify_sectors(gram_matrix(words, 0.5), words), words, 0.5)
    by_label = {c.label: c.exact for c in spec.clusters}
    assert by_label["symmetric"] == S3 and by_label["antisymmetric"] == A3


def test_symmetric_state_examples():
    assert symmetric_state({1: 1}, 0.3).terms == {(1,): 1.0}
    q = 0.4
    st = symmetric_state({1: 1, 2: 1}, q)
    assert st[(1, 2)] == pytest.approx(1 / math.sqrt(2 * (1 + q)))
    assert st[(2, 1)] == pytest.approx(1 / math.sqrt(2 * (1 + q)))
    st = symmetric_state({1: 1, 2: 1, 3: 1}, q)
    assert len(st) == 6
    for _, c in st:
        assert c == pytest.approx(1 / math.sqrt(6 * S3(q)))


@pytest.mark.parametrize("occ", [{1: 3}, {1: 2, 2: 1}, {1: 1, 2: 2, 3: 1}, {2: 4, 3: 2}])
@pytest.mark.parametrize("q", [-0.9, 0.0, 0.5, 0.99, 1.0])
def test_symmetric_state_unit_norm(occ, q):
    st = symmetric_state(occ, q)
    assert inner_product(st, st, q) == pytest.approx(1.0, abs=1e-10)


def test_symmetric_state_rejects_fermionic_endpoint():
    with pytest.raises(ValueError):
        symmetric_state({1: 2}, -1.0)
    with pytest.raises(ValueError):
        symmetric_state({1: 1, 2: 1}, -1.0)
    assert len(symmetric_state({1: 1}, -1.0)) == 1


@pytest.mark.parametrize("occ", [{1: 1, 2: 1}, {1: 2, 2: 2}, {1: 3, 2: 1, 3: 1}])
def test_unnormalized_norm_formula(occ):
    w = symmetrized_word(occ)
    assert inner_product(w, w) == symmetrized_norm_poly(occ)


def test_symmetrizer_lowering_exact():
    occ = OccupancyVector({1: 2, 2: 1, 3: 1})
    for mode in (1, 2, 3):
        lhs = apply(((mode, False),), symmetrized_word(occ))
        rhs = symmetrized_word(occ.shifted(mode, -1)).scale(q_bracket_poly(4))
        assert lhs == rhs


def test_lower_symmetric_examples():
    assert lower_symmetric({1: 1}, 1, 0.3) == (1.0, OccupancyVector())
    coef, occ = lower_symmetric({1: 2}, 1, 0.6)
    assert coef == pytest.approx(math.sqrt(1.6)) and occ == {1: 1}
    coef, occ = lower_symmetric({1: 5}, 1, 1.0)
    assert coef == pytest.approx(math.sqrt(5)) and occ == {1: 4}
    assert lower_symmetric({1: 2}, 2, 0.5) == (0.0, OccupancyVector({1: 2}))


def test_lower_symmetric_against_brute_force():
    # <1:1; S| a_1 |1:2; S> by expanding a_1 (a+_1)^2 |0> with the rewrite rule
    q = 0.35
    lowered = apply(((1, False),), symmetric_state({1: 2}, q), q)
    proj = inner_product(symmetric_state({1: 1}, q), lowered, q)
    assert proj == pytest.approx(math.sqrt(1 + q), abs=1e-12)


def test_raise_matrix_element():
    assert raise_symmetric_matrix_element({}, 1, 0.4) == 1.0
    q = 0.45
    assert raise_symmetric_matrix_element({1: 1}, 1, q) == pytest.approx(math.sqrt(1 + q))
    assert raise_symmetric_matrix_element({1: 3, 2: 1}, 1, 1.0) == pytest.approx(2.0)
    # conjugate of the lowering element, checked through the rewrite engine
    raised = apply(((1, True),), symmetric_state({1: 1}, q), q)
    assert inner_product(symmetric_state({1: 2}, q), raised, q) == pytest.approx(math.sqrt(1 + q))


def test_raised_symmetric_state_is_not_symmetric():
    q = 0.5
    raised = apply(((2, True),), symmetric_state({1: 1}, q), q)
    target = symmetric_state({1: 1, 2: 1}, q)
    overlap = inner_product(target, raised, q)
    assert inner_product(raised, raised, q) > overlap ** 2 + 1e-6


@pytest.mark.parametrize("q", [0.3, 0.9])
def test_symmetric_matrix_element_brute_force(q):
    word = ((1, True), (2, False), (2, True), (1, False))
    bra = ket = OccupancyVector({1: 2, 2: 1})
    full = inner_product(symmetric_state(bra, q), apply(word, symmetric_state(ket, q), q), q)
    assert symmetric_matrix_element(bra, word, ket, q) == pytest.approx(full, abs=1e-12)
