"""Named, parameterized solutions of the TL relations.

Every factory returns a :class:`CatalogEntry` whose ``t`` satisfies the
relations with ``Q == expected_q``.  Entries are addressed by stable ids
(``"xxz"``, ``"rank2-n2"``, ``"cg-singlet"``, ...) through :func:`build`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .densec import CMatrix, matrix_to_dict
from .errors import NotInCatalogError
from .qsu2 import QContext, SpinLabel, coeff_matrix, pair_family, q_value, qnum
from .tlcore import CoeffSet, build_projection, scale_tower

# special points q at which isolated-root TL vectors occur
Q_232 = ((2 - math.sqrt(3)) ** 0.25, (2 + math.sqrt(3)) ** 0.25)
Q_S1J1 = ((math.sqrt(5) - 1) / 2, (math.sqrt(5) + 1) / 2)
_Q_MATCH = 1e-9


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    params: dict
    cs: CoeffSet | None
    t: CMatrix
    expected_q: float
    source: str
    n: int = field(default=0)

    def __post_init__(self):
        if not self.n:
            object.__setattr__(self, "n", int(round(math.sqrt(self.t.shape[0]))))

    @property
    def r(self) -> int:
        return self.cs.r if self.cs is not None else int(round(np.trace(self.t).real / self.expected_q))

    def to_dict(self) -> dict:
        params = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.params.items()}
        return {
            "id": self.id,
            "params": params,
            "n": self.n,
            "r": self.r,
            "expected_q": self.expected_q,
            "source": self.source,
            "t": matrix_to_dict(self.t),
            "cs": self.cs.to_dict() if self.cs is not None else None,
        }


def _unit(zeta) -> complex:
    zeta = complex(zeta)
    if abs(abs(zeta) - 1) > 1e-12:
        raise ValueError(f"zeta must have modulus one, got |zeta|={abs(zeta)!r}")
    return zeta


def xxz(q: float = 2.0, zeta: complex = 1.0) -> CatalogEntry:
    """The 4x4 XXZ generator; Q = q + 1/q."""
    if not q > 0:
        raise ValueError("q must be positive")
    z = _unit(zeta)
    t = np.zeros((4, 4), dtype=np.complex128)
    t[1, 1], t[1, 2], t[2, 1], t[2, 2] = q, z, 1 / z, 1 / q
    v = np.array([[0, z * q], [1, 0]], dtype=np.complex128) / math.sqrt(q * q + 1)
    return CatalogEntry("xxz", {"q": q, "zeta": z}, CoeffSet.of([v]), t, q + 1 / q,
                        "XXZ / Heisenberg generator, rank one, n = 2")


def rank2_n2(zeta: complex = 1.0) -> CatalogEntry:
    """Rank-two solution for n = 2; Q = sqrt(2)."""
    z = _unit(zeta)
    t = np.array([
        [1, 0, 0, 1j * z],
        [0, 1, 1j, 0],
        [0, -1j, 1, 0],
        [-1j / z, 0, 0, 1],
    ], dtype=np.complex128) / math.sqrt(2)
    v1 = np.array([[1j * z, 0], [0, 1]], dtype=np.complex128) / math.sqrt(2)
    v2 = np.array([[0, 1j], [1, 0]], dtype=np.complex128) / math.sqrt(2)
    return CatalogEntry("rank2-n2", {"zeta": z}, CoeffSet.of([v1, v2]), t, math.sqrt(2),
                        "n = r = 2 solution built from two unitary multiples")


def _near(q: float, points) -> bool:
    return any(abs(q - p) <= _Q_MATCH * p for p in points)


def _vector_q(lab: SpinLabel, q: float) -> float | None:
    """Known Q for a TL vector at q, or None."""
    ctx = QContext(q)
    if lab.two_j == 0:
        return qnum(ctx, lab.n)
    if (lab.two_s, lab.two_j, lab.two_m) == (1, 2, 0):
        return qnum(ctx, 2)
    if (lab.two_s, lab.two_j, lab.two_m) == (3, 4, 0):
        if ctx.is_classical:
            return 4.0
        if _near(q, Q_232):
            return math.sqrt(12 + 18 * math.sqrt(6))
    if (lab.two_s, lab.two_j, lab.two_m) == (2, 2, 0) and _near(q, Q_S1J1):
        return 3.0
    return None


def _pair_q(a: SpinLabel, b: SpinLabel, q: float) -> float | None:
    if a.two_s != 2:
        return None
    key = {(a.j, a.m), (b.j, b.m)}
    if key in ({(2, 1), (1, -1)}, {(2, -1), (1, 1)}):
        return q * q + q ** -2
    if QContext(q).is_classical and pair_family(a, b) is not None:
        return 2.0
    return None


def _from_labels(eid: str, labels, q: float, expected: float | None, force: bool,
                 params: dict, source: str) -> CatalogEntry:
    ctx = QContext(q)
    if expected is None:
        if not force:
            raise NotInCatalogError(f"{', '.join(map(str, labels))} at q={q!r} is not a known TL solution")
        expected = q_value(ctx, labels)
        source = "forced (not a TL solution in general)"
    cs = CoeffSet.of([coeff_matrix(ctx, lab) for lab in labels])
    return CatalogEntry(eid, params, cs, expected * build_projection(cs), expected, source)


def cg_entry(s=0.5, j=0, m=0, q: float = 1.0, force: bool = False,
             eid: str | None = None) -> CatalogEntry:
    lab = SpinLabel.of(s, j, m)
    return _from_labels(eid or "cg-vector", [lab], q, _vector_q(lab, q), force,
                        {"s": lab.s, "j": lab.j, "m": lab.m, "q": q},
                        "U_q(su2) Clebsch-Gordan TL vector")


def cg_pair_entry(s=1, first=(1, 1), second=(1, 0), q: float = 1.0, force: bool = False,
                  eid: str | None = None) -> CatalogEntry:
    a, b = SpinLabel.of(s, *first), SpinLabel.of(s, *second)
    if a == b:
        raise ValueError("the two labels must differ")
    if (a.two_j, a.two_m) < (b.two_j, b.two_m):
        a, b = b, a
    return _from_labels(eid or "cg-pair", [a, b], q, _pair_q(a, b, q), force,
                        {"s": a.s, "j1": a.j, "m1": a.m, "j2": b.j, "m2": b.m, "q": q},
                        "U_q(su2) Clebsch-Gordan TL pair")


def tower_entry(base: CatalogEntry, m: int, side: str = "left") -> CatalogEntry:
    if base.cs is None:
        raise ValueError(f"entry {base.id!r} has no coefficient set to scale")
    if m == 1:
        return base
    cs = scale_tower(base.cs, m, side)
    q = m * base.expected_q
    params = dict(base.params, m=m, side=side)
    return CatalogEntry(f"tower:{base.id}:{m}", params, cs, q * build_projection(cs), q,
                        f"scaling tower of {base.id} by {m}")


# -- registry -----------------------------------------------------------------

def _singlet(s=0.5, q=1.0, force=False):
    return cg_entry(s, 0, 0, q, force, eid="cg-singlet")


def _triplet(q=1.0, force=False):
    return cg_entry(0.5, 1, 0, q, force, eid="cg-triplet")


def _e232(q=Q_232[1], force=False):
    return cg_entry(1.5, 2, 0, q, force, eid="cg-232")


def _s1j1(q=Q_S1J1[1], force=False):
    return cg_entry(1, 1, 0, q, force, eid="cg-s1j1")


def _s1j11(q=1.0, force=False):
    return cg_pair_entry(1, (1, 1), (1, 0), q, force, eid="pair-s1j11")


def _s1j21(q=1.0, force=False):
    return cg_pair_entry(1, (2, 1), (1, -1), q, force, eid="pair-s1j21")


REGISTRY: dict[str, Callable[..., CatalogEntry]] = {
    "xxz": xxz,
    "rank2-n2": rank2_n2,
    "cg-singlet": _singlet,
    "cg-triplet": _triplet,
    "cg-232": _e232,
    "cg-s1j1": _s1j1,
    "pair-s1j11": _s1j11,
    "pair-s1j21": _s1j21,
}


def list_ids() -> list[str]:
    return sorted(REGISTRY) + ["tower:<base>:<m>"]


def build(eid: str, **params) -> CatalogEntry:
    """Build an entry by id; ``tower:<base>:<m>`` scales the base entry."""
    if eid.startswith("tower:"):
        try:
            _, base_id, m = eid.rsplit(":", 2)
            m = int(m)
        except ValueError:
            raise NotInCatalogError(f"malformed tower id {eid!r}") from None
        side = params.pop("side", "left")
        return tower_entry(build(base_id, **params), m, side)
    try:
        factory = REGISTRY[eid]
    except KeyError:
        raise NotInCatalogError(f"unknown catalog id {eid!r}") from None
    return factory(**params)


def default_entries() -> list[CatalogEntry]:
    """A representative instance of every family, used for bulk checks."""
    out = [
        xxz(2.0, 1.0), xxz(1.0, 1.0), xxz(5.0, cmath.exp(0.7j)), xxz(0.5, 1j),
        rank2_n2(1.0), rank2_n2(cmath.exp(1.1j)),
        _triplet(1.0), _triplet(0.7),
        _e232(Q_232[0]), _e232(Q_232[1]), _e232(1.0),
        _s1j1(Q_S1J1[0]), _s1j1(Q_S1J1[1]),
        _s1j11(1.0), _s1j21(0.8), _s1j21(1.3),
        cg_pair_entry(1, (2, -1), (1, 1), 1.7),
    ]
    for s in (0.5, 1, 1.5, 2, 2.5, 3):
        out += [_singlet(s, 1.0), _singlet(s, 1.4)]
    for first, second in (((1, 1), (1, -1)), ((1, -1), (1, 0)), ((2, 1), (1, -1)),
                          ((2, -1), (1, 0)), ((2, 1), (2, -1))):
        out.append(cg_pair_entry(1, first, second, 1.0))
    out += [tower_entry(rank2_n2(1.0), 2), tower_entry(rank2_n2(1.0), 3),
            tower_entry(xxz(2.0, -1.0), 2, "right"), tower_entry(_singlet(0.5, 1.0), 3)]
    return out
