import cmath
import math

import numpy as np
import pytest

from tlrep import catalog
from tlrep.braid import make_family, ybe_residual
from tlrep.errors import NotInCatalogError
from tlrep.qsu2 import QContext, coeff_matrix, qnum
from tlrep.tlcore import build_projection, check_axioms

SQ2 = math.sqrt(2)


def passes(entry, rel=1e-9):
    v = check_axioms(entry.t, entry.n)
    return v.passed and abs(v.q_value - entry.expected_q) <= rel * entry.expected_q


def test_xxz_examples():
    e = catalog.xxz(1.0, 1.0)
    assert e.expected_q == 2 and passes(e)
    e = catalog.xxz(2.0, 1j)
    assert e.expected_q == 2.5 and passes(e)
    e = catalog.xxz(1e3, 1.0)
    assert e.expected_q == pytest.approx(1000.001) and passes(e)
    assert np.allclose(e.expected_q * build_projection(e.cs), e.t)
    with pytest.raises(ValueError):
        catalog.xxz(2.0, 1.5)


def test_rank2_examples(rng):
    for zeta in [1.0] + [cmath.exp(1j * th) for th in rng.uniform(0, 2 * math.pi, 3)]:
        e = catalog.rank2_n2(zeta)
        assert passes(e) and e.expected_q == SQ2
        assert np.max(np.abs(SQ2 * build_projection(e.cs) - e.t)) < 1e-12


def test_cg_entries():
    e = catalog.cg_entry(1.5, 0, 0, 1.4)
    assert e.expected_q == pytest.approx(qnum(QContext(1.4), 4)) and passes(e)
    e = catalog.cg_pair_entry(1, (2, -1), (1, 1), 0.8)
    assert e.expected_q == pytest.approx(0.8 ** 2 + 0.8 ** -2) and passes(e)
    e = catalog.cg_entry(1.5, 2, 0, (2 + math.sqrt(3)) ** 0.25)
    assert abs(e.expected_q ** 2 - (12 + 18 * math.sqrt(6))) < 1e-9 and passes(e)


def test_not_in_catalog_and_force():
    with pytest.raises(NotInCatalogError):
        catalog.cg_entry(1, 1, 0, 1.0)
    with pytest.raises(NotInCatalogError):
        catalog.cg_pair_entry(1, (2, 2), (1, 1), 1.0)
    e = catalog.cg_entry(1, 2, 0, 1.3, force=True)
    assert not check_axioms(e.t, e.n).passed
    with pytest.raises(ValueError):
        catalog.cg_pair_entry(1, (1, 1), (1, 1), 1.0)


def test_tower_entries():
    e = catalog.tower_entry(catalog.rank2_n2(1.0), 3)
    assert (e.n, e.r) == (6, 2) and e.expected_q == pytest.approx(3 * SQ2) and passes(e)
    e = catalog.tower_entry(catalog.xxz(1.7, -1.0), 2)
    assert e.n == 4 and e.expected_q == pytest.approx(2 * (1.7 + 1 / 1.7)) and passes(e)
    base = catalog.xxz(1.7, 1.0)
    assert catalog.tower_entry(base, 1) is base


def test_registry():
    e = catalog.build("tower:rank2-n2:2", zeta=1j)
    assert e.id == "tower:rank2-n2:2" and passes(e)
    assert catalog.build("cg-232").expected_q == pytest.approx(math.sqrt(12 + 18 * math.sqrt(6)))
    assert catalog.build("pair-s1j21", q=1.2).expected_q == pytest.approx(1.44 + 1.44 ** -1)
    with pytest.raises(NotInCatalogError):
        catalog.build("nope")
    with pytest.raises(NotInCatalogError):
        catalog.build("tower:xxz:two")
    assert "xxz" in catalog.list_ids()
    d = catalog.build("xxz", q=2, zeta=1j).to_dict()
    assert d["params"]["zeta"] == [0.0, 1.0] and d["r"] == 1


def test_explicit_matrices_coincide():
    for q in (0.5, 1.0, 2.2):
        ctx = QContext(q)
        v = catalog.xxz(q, -1.0).cs.vs[0]
        assert np.max(np.abs(v + coeff_matrix(ctx, 0.5, 0, 0))) < 1e-12
        v = catalog.xxz(q, 1.0).cs.vs[0]
        assert np.max(np.abs(v - coeff_matrix(ctx, 0.5, 1, 0).T)) < 1e-12


def test_232_normalization():
    for q in (0.7, 1.0, 1.3):
        v = coeff_matrix(QContext(q), 1.5, 2, 0).real
        raw = np.array([q, q ** 4 + q ** 2 - 1, q ** 5 - q ** 3 - q, -q ** 4])
        scale = v[0, 3] / q
        assert abs(np.sum(raw ** 2) - (q ** 10 + q ** 6 + q ** 4 + 1)) < 1e-10
        assert abs(scale ** -2 - (q ** 10 + q ** 6 + q ** 4 + 1)) < 1e-10


@pytest.mark.parametrize("entry", catalog.default_entries(), ids=lambda e: e.id)
def test_every_entry_passes(entry):
    assert passes(entry)
    assert ybe_residual(make_family(entry.t, entry.n)) < 1e-9
