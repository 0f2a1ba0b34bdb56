"""Exhaustive search for TL projections spanned by subsets of a fixed basis.

For an orthonormal basis ``B_1..B_{n^2}`` of coefficient matrices, every
subset ``S`` defines a projection ``P_S``.  The two traces entering the trace
identity are sums over ``S`` of entries of tables computed once per basis::

    tr(P12 P23)       = sum_{s,m in S}     A[s, m]
    tr((P12 P23)^2)   = sum_{s,a,b,t in S} G[s, a, b, t]

so the per-subset cost is ``O(|S|^4)`` table lookups.  Subsets are visited in
colex order of their bitmasks; each worker owns a contiguous range of colex
ranks, which keeps the merged output independent of the worker count.
Every fast-path hit is re-verified with :func:`tlcore.check_axioms`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .densec import DEFAULT_TOL, CMatrix, Tolerance
from .errors import InvalidBasisError
from .jwtower import allowed_q
from .qsu2 import QContext, cg_basis
from .tlcore import (
    TRACE_REL_TOL,
    CoeffSet,
    TLVerdict,
    _c_tensor,
    bound_suite,
    build_projection,
    check_axioms,
)


@dataclass(frozen=True)
class ScanConfig:
    basis: tuple[CMatrix, ...]
    max_rank: int | None = None
    include_high_ranks: bool = False
    tol: Tolerance = DEFAULT_TOL
    parallelism: int = 1
    # explicit rank list, overriding max_rank / include_high_ranks
    ranks: tuple[int, ...] | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        basis = tuple(np.asarray(b, dtype=np.complex128) for b in self.basis)
        object.__setattr__(self, "basis", basis)
        if not basis:
            raise InvalidBasisError("empty basis")
        n = basis[0].shape[0]
        if any(b.shape != (n, n) for b in basis):
            raise InvalidBasisError("basis matrices must all be n x n")
        if len(basis) != n * n:
            raise InvalidBasisError(f"need {n * n} basis matrices for n={n}, got {len(basis)}")
        flat = np.array([b.ravel() for b in basis])
        defect = float(np.max(np.abs(flat.conj() @ flat.T - np.eye(len(basis)))))
        if defect > self.tol.abs:
            raise InvalidBasisError(f"basis is not orthonormal (max defect {defect:.3e})")
        mr = n * n // 4 if self.max_rank is None else self.max_rank
        if not 1 <= mr <= n * n:
            raise ValueError(f"max_rank must lie in [1, {n * n}]")
        object.__setattr__(self, "max_rank", mr)
        if self.parallelism < 1:
            raise ValueError("parallelism must be positive")
        if self.labels is not None and len(self.labels) != len(basis):
            raise ValueError("one label per basis vector")

    @property
    def n(self) -> int:
        return self.basis[0].shape[0]

    def rank_list(self) -> list[int]:
        if self.ranks is not None:
            return sorted(set(self.ranks))
        out = list(range(1, self.max_rank + 1))
        if self.include_high_ranks:
            nn = self.n * self.n
            out += [r for r in range(self.max_rank + 1, nn + 1) if allowed_q(self.n, r) != "empty"]
        return out


@dataclass
class ScanHit:
    indices: tuple[int, ...]
    q_value: float
    verdict: TLVerdict

    @property
    def rank(self) -> int:
        return len(self.indices)

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        d = {"indices": list(self.indices), "rank": self.rank, "Q": self.q_value,
             "verdict": self.verdict.to_dict()}
        if labels is not None:
            d["labels"] = [labels[i] for i in self.indices]
        return d


# -- basis tables -------------------------------------------------------------

def trace_tables(basis: Sequence[CMatrix]) -> tuple[np.ndarray, np.ndarray]:
    """``A[s, m] = tr C[s,m,m]`` and ``G[s,a,b,t] = tr(C[s,a,b] C[t,b,a])``."""
    c = _c_tensor(np.stack(basis))
    a = np.einsum("smmii->sm", c).real
    g = np.einsum("sabij,tbaji->sabt", c, c, optimize=True).real
    return np.ascontiguousarray(a), np.ascontiguousarray(g)


def cg_scan_basis(s, q: float) -> tuple[list[CMatrix], list[str]]:
    labs, mats = cg_basis(QContext(q), s)
    return mats, [str(lab) for lab in labs]


# -- colex enumeration --------------------------------------------------------

def _unrank(rank: int, k: int) -> int:
    """Bitmask of the k-subset with the given colex rank."""
    mask = 0
    for i in range(k, 0, -1):
        c = i - 1
        while math.comb(c + 1, i) <= rank:
            c += 1
        rank -= math.comb(c, i)
        mask |= 1 << c
    return mask


def _next_mask(x: int) -> int:
    # Gosper's hack: next integer with the same popcount
    c = x & -x
    r = x + c
    return (((r ^ x) >> 2) // c) | r


def _bits(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


_STATE: dict = {}


def _init_worker(basis, a, g, tol_abs, tol_rel):
    _STATE.update(basis=basis, a=a, g=g, tol=Tolerance(tol_abs, tol_rel))


def _scan_range(k: int, start: int, count: int) -> list[tuple[tuple[int, ...], float, TLVerdict]]:
    basis, a, g, tol = _STATE["basis"], _STATE["a"], _STATE["g"], _STATE["tol"]
    n = basis[0].shape[0]
    nr = n * k
    hits = []
    mask = _unrank(start, k)
    for _ in range(count):
        idx = _bits(mask)
        t1 = a[np.ix_(idx, idx)].sum()
        if t1 > tol.abs:
            t2 = g[np.ix_(idx, idx, idx, idx)].sum()
            lhs, rhs = t1 * t1, nr * t2
            if abs(lhs - rhs) <= TRACE_REL_TOL * max(lhs, rhs):
                q = math.sqrt(nr / t1)
                cs = CoeffSet(n, k, tuple(basis[i] for i in idx))
                verdict = check_axioms(q * build_projection(cs, tol), n, tol)
                if verdict.passed:
                    hits.append((tuple(idx), q, verdict))
        mask = _next_mask(mask)
    return hits


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    size, extra = divmod(total, parts)
    out, start = [], 0
    for p in range(parts):
        cnt = size + (p < extra)
        if cnt:
            out.append((start, cnt))
        start += cnt
    return out


def scan(cfg: ScanConfig) -> list[ScanHit]:
    """All basis subsets (of the configured ranks) that span a TL projection."""
    a, g = trace_tables(cfg.basis)
    nn = len(cfg.basis)
    tasks = []
    for k in cfg.rank_list():
        total = math.comb(nn, k)
        tasks += [(k, s, c) for s, c in _chunks(total, cfg.parallelism * 4 if cfg.parallelism > 1 else 1)]

    init = (cfg.basis, a, g, cfg.tol.abs, cfg.tol.rel)
    if cfg.parallelism == 1:
        _init_worker(*init)
        results = [_scan_range(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(cfg.parallelism, initializer=_init_worker, initargs=init) as ex:
            results = list(ex.map(_scan_range, *zip(*tasks)))

    hits = [ScanHit(idx, q, v) for part in results for idx, q, v in part]
    hits.sort(key=lambda h: (h.rank, h.indices))
    return hits


def scan_report(hits: Sequence[ScanHit], cfg: ScanConfig | None = None,
                q_decimals: int = 9) -> dict:
    """Group hits by rank and Q, with bound and admissible-Q cross-checks."""
    if not hits:
        return {"groups": [], "total": 0}
    groups: dict[tuple[int, float], list[ScanHit]] = {}
    for h in hits:
        groups.setdefault((h.rank, round(h.q_value, q_decimals)), []).append(h)
    labels = cfg.labels if cfg is not None else None
    out = []
    for (rank, q), members in sorted(groups.items()):
        bounds_ok = True
        allowed = None
        if cfg is not None:
            for h in members:
                cs = CoeffSet(cfg.n, rank, tuple(cfg.basis[i] for i in h.indices))
                bounds_ok &= bound_suite(cs, h.verdict).all_satisfied
            allowed = allowed_q(cfg.n, rank)
        in_allowed = None
        if isinstance(allowed, list):
            in_allowed = any(abs(q - x) <= 1e-8 for x in allowed)
        out.append({
            "rank": rank,
            "Q": q,
            "count": len(members),
            "members": [h.to_dict(labels) for h in members],
            "bounds_satisfied": bounds_ok if cfg is not None else None,
            "allowed_q": allowed,
            "Q_in_allowed_set": in_allowed,
        })
    return {"groups": out, "total": len(hits)}
