import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlrep.qsu2 import (
    QContext,
    SpinLabel,
    cg,
    cg_orthogonality_residual,
    cg_row_lemma,
    cg_symmetry_residual,
    coeff_matrix,
    pair_family,
    q_value,
    qfact,
    qnum,
    scan_pairs,
    scan_vectors,
    spin_labels,
    tl_criterion_value,
    tl_root_scan,
)
from tlrep.tlcore import CoeffSet, build_projection, check_axioms

SPINS = (0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4)
L = SpinLabel.of


def test_qnum_examples():
    assert qnum(QContext(1.0), 7) == 7
    assert qnum(QContext(2.0), 3) == pytest.approx(5.25, abs=1e-14)
    assert qnum(QContext(0.37), 0) == 0


@pytest.mark.parametrize("t", range(11))
def test_qnum_continuous_at_one(t):
    for q in (1 - 1e-7, 1 + 1e-7):
        assert abs(qnum(QContext(q), t) - t) < 1e-5


def test_qfact_examples():
    assert qfact(QContext(1.0), 4) == 24
    assert qfact(QContext(1.7), -2) == math.inf
    assert qfact(QContext(2.0), 2) == pytest.approx(2.5, abs=1e-14)
    assert qfact(QContext(2.0), 0) == 1


def test_qcontext_validation():
    with pytest.raises(ValueError):
        QContext(0.0)
    assert QContext(1.0 + 1e-15).is_classical and not QContext(1.0 + 1e-12).is_classical


def test_spin_label_validation():
    assert L(1.5, 2, 0).n == 4 and L(0.5, 1, -1).to_json() == [2, -2]
    for bad in ((1, 3, 0), (1, 1, 2), (1, 1, 0.5), (0.3, 0, 0)):
        with pytest.raises(ValueError):
            L(*bad)


@pytest.mark.parametrize("q", [0.4, 1.0, 2.3])
def test_cg_singlet_spin_half(q):
    assert cg(QContext(q), 0.5, 0.5, -0.5, 0, 0) == pytest.approx(q / math.sqrt(q * q + 1), abs=1e-14)


@pytest.mark.parametrize("s", SPINS[:6])
def test_cg_classical_singlet(s):
    ctx = QContext(1.0)
    for k2 in range(int(2 * s) + 1):
        k = -s + k2
        want = (-1) ** round(s - k) / math.sqrt(2 * s + 1)
        assert cg(ctx, s, k, -k, 0, 0) == pytest.approx(want, abs=1e-14)


def test_cg_weight_selection():
    assert cg(QContext(1.3), 1, 1, 0, 2, 0) == 0.0


def test_row_lemma_examples():
    for s in (1, 1.5, 2):
        assert cg_row_lemma(s, 2 * s, 2 * s, 1) == 0.0
        assert cg_row_lemma(s, 2 * s, 2 * s, 0) == pytest.approx(1.0, abs=1e-14)
        assert cg_row_lemma(s, 2 * s, 2 * s - 1, 2) == 0.0
        assert cg_row_lemma(s, 2 * s - 1, 2 * s - 1, 2) == 0.0
    with pytest.raises(ValueError):
        cg_row_lemma(1, 1, 0, 3)


@pytest.mark.parametrize("s", SPINS)
def test_row_lemma_matches_cg(s):
    ctx = QContext(1.0)
    worst = 0.0
    for lab in spin_labels(s):
        if lab.m < 0:
            continue
        for p in (0, 1, 2):
            if p > 2 * s or lab.m > 2 * s - p:
                continue
            worst = max(worst, abs(cg(ctx, s, s - p, lab.m + p - s, lab.j, lab.m)
                                   - cg_row_lemma(s, lab.j, lab.m, p)))
    assert worst < 1e-10


def test_coeff_matrix_known_examples():
    for q in (0.6, 1.0, 1.9):
        ctx = QContext(q)
        c = 1 / math.sqrt(q * q + 1)
        assert np.allclose(coeff_matrix(ctx, 0.5, 0, 0), c * np.array([[0, q], [-1, 0]]), atol=1e-14)
        assert np.allclose(coeff_matrix(ctx, 0.5, 1, 0), c * np.array([[0, 1], [q, 0]]), atol=1e-14)
        c = 1 / math.sqrt(q ** 10 + q ** 6 + q ** 4 + 1)
        v232 = c * np.array([[0, 0, 0, q], [0, 0, q ** 4 + q ** 2 - 1, 0],
                             [0, q ** 5 - q ** 3 - q, 0, 0], [-q ** 4, 0, 0, 0]])
        assert np.allclose(coeff_matrix(ctx, 1.5, 2, 0), v232, atol=1e-13)
        c = 1 / math.sqrt(q ** 4 + 1)
        v = c * np.array([[0, 0, q], [0, q * q - 1, 0], [-q, 0, 0]])
        assert np.allclose(coeff_matrix(ctx, 1, 1, 0), v, atol=1e-14)


def test_coeff_matrix_pair_examples():
    ctx = QContext(1.0)
    r = 1 / math.sqrt(2)
    assert np.allclose(coeff_matrix(ctx, 1, 1, 1), r * np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]))
    q = 1.45
    ctx = QContext(q)
    c = 1 / math.sqrt(q ** 4 + 1)
    assert np.allclose(coeff_matrix(ctx, 1, 2, 1), c * np.array([[0, 1, 0], [q * q, 0, 0], [0, 0, 0]]))
    assert np.allclose(coeff_matrix(ctx, 1, 1, -1), c * np.array([[0, 0, 0], [0, 0, q * q], [0, -1, 0]]))


@pytest.mark.parametrize("q", [0.3, 1.0, 2.7])
def test_coeff_matrix_structure(q):
    ctx = QContext(q)
    for s in SPINS:
        for lab in spin_labels(s):
            v = coeff_matrix(ctx, lab)
            assert abs(np.linalg.norm(v) - 1) < 1e-10
            for m in (v @ v.conj(), v.T @ v):
                assert np.max(np.abs(m - np.diag(np.diag(m)))) < 1e-12


@pytest.mark.parametrize("q", [0.3, 1.0, 2.7])
@pytest.mark.parametrize("s", SPINS[:6])
def test_cg_orthogonality_and_symmetry(q, s):
    ctx = QContext(q)
    assert cg_orthogonality_residual(ctx, s) < 1e-10
    assert cg_symmetry_residual(ctx, s) < 1e-10


@pytest.mark.parametrize("s", SPINS[:6])
def test_classical_matrices_are_symmetric_or_antisymmetric(s):
    ctx = QContext(1.0)
    for lab in spin_labels(s):
        v = coeff_matrix(ctx, lab)
        sign = (-1) ** ((2 * lab.two_s - lab.two_j) // 2)
        assert np.max(np.abs(v.T - sign * v)) < 1e-14


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SPINS[:6]), st.floats(0.2, 5.0))
def test_singlet_identity(s, q):
    ctx = QContext(q)
    v = coeff_matrix(ctx, s, 0, 0)
    n = int(2 * s + 1)
    lhs = qnum(ctx, n) * v @ v.conj()
    assert np.max(np.abs(lhs - (-1) ** (n - 1) * np.eye(n))) < 1e-10


def test_singlet_criterion_vanishes_for_random_q(rng):
    for q in rng.uniform(0.2, 5.0, 50):
        ctx = QContext(float(q))
        for s in SPINS[:6]:
            assert abs(tl_criterion_value(ctx, [L(s, 0, 0)])) <= 1e-10


def test_criterion_value_examples():
    assert abs(tl_criterion_value(QContext(1.0), [L(1, 1, 0)])) > 1e-3
    assert abs(tl_criterion_value(QContext(1.7), [L(1, 2, 1), L(1, 1, -1)])) < 1e-10
    with pytest.raises(ValueError):
        tl_criterion_value(QContext(1.0), [L(1, 1, 0), L(1, 1, 0)])


def test_root_scan_232():
    hit = tl_root_scan([L(1.5, 2, 0)], (0.5, 2.0))
    want = [(2 - math.sqrt(3)) ** 0.25, 1.0, (2 + math.sqrt(3)) ** 0.25]
    assert hit.mode == "roots" and len(hit.q_points) == 3
    assert np.allclose(hit.q_points, want, rtol=1e-8)
    for i in (0, 2):
        assert abs(hit.q_values[i] ** 2 - (12 + 18 * math.sqrt(6))) < 1e-6


def test_root_scan_s1j1():
    hit = tl_root_scan([L(1, 1, 0)], (0.5, 2.0))
    assert np.allclose(hit.q_points, [(math.sqrt(5) - 1) / 2, (math.sqrt(5) + 1) / 2], rtol=1e-9)
    assert np.allclose(hit.q_values, 3.0, atol=1e-8)


def test_root_scan_all_q():
    hit = tl_root_scan([L(0.5, 1, 0)], (0.25, 4.0), grid=60)
    assert hit.mode == "all-q" and len(hit.q_points) == 20
    for q, big_q in zip(hit.q_points, hit.q_values):
        assert big_q == pytest.approx(qnum(QContext(q), 2), abs=1e-9)
    with pytest.raises(ValueError):
        tl_root_scan([L(0.5, 1, 0)], (2.0, 1.0))


def test_scan_vectors_examples():
    ctx = QContext(1.0)
    hits = scan_vectors(0.5, ctx)
    assert [h.labels[0] for h in hits] == [L(0.5, 0, 0), L(0.5, 1, 0)]
    assert all(h.q_values[0] == pytest.approx(2.0) for h in hits)
    hits = scan_vectors(2, ctx)
    assert [h.labels[0] for h in hits] == [L(2, 0, 0)] and hits[0].q_values[0] == pytest.approx(5.0)
    with pytest.raises(ValueError):
        scan_vectors(4.5, ctx)


def test_scan_pairs_spin_one():
    hits = scan_pairs(1, QContext(1.0))
    fams = sorted(pair_family(*h.labels) for h in hits)
    assert fams == ["i", "ii", "ii", "iii", "iii", "iv", "iv", "v"]
    for h in hits:
        assert h.labels[0].two_j >= h.labels[1].two_j
        assert {abs(lab.m) for lab in h.labels} <= {0, 1}
        assert h.q_values[0] == pytest.approx(2.0, abs=1e-9)


def test_hits_replay_through_axioms():
    ctx = QContext(1.0)
    for hit in scan_vectors(1.5, ctx) + scan_pairs(1, ctx):
        cs = CoeffSet.of([coeff_matrix(ctx, lab) for lab in hit.labels])
        q = hit.q_values[0]
        v = check_axioms(q * build_projection(cs), cs.n)
        assert v.passed and abs(v.q_value - q) < 1e-8
    hit = tl_root_scan([L(1, 1, 0)], (0.5, 2.0))
    for q, big_q in zip(hit.q_points, hit.q_values):
        cs = CoeffSet.of([coeff_matrix(QContext(q), 1, 1, 0)])
        v = check_axioms(big_q * build_projection(cs), 3)
        assert v.passed and abs(v.q_value - big_q) < 1e-8


def test_q_value_matches_singlet_formula():
    for s in (0.5, 1, 1.5):
        assert q_value(QContext(1.4), [L(s, 0, 0)]) == pytest.approx(qnum(QContext(1.4), 2 * s + 1))
