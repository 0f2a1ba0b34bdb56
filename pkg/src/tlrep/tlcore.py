"""Projections from coefficient sets, the TL axioms and the two equivalent criteria.

A vector ``v = sum_ab V_ab e_a (x) e_b`` of ``C^n (x) C^n`` is carried by its
``n x n`` coefficient matrix ``V``; an orthonormal family ``V_1..V_r`` spans
the image of an orthogonal projection ``P``.  ``T = Q P`` generates a unitary
tensor space representation of TL_N(Q) iff

* the trace identity ``tr(P12 P23)^2 == n r tr((P12 P23)^2)`` holds, or
  equivalently
* ``Q W`` is unitary, ``W`` being the ``nr x nr`` block matrix with blocks
  ``V_m conj(V_s)``.

Both routes are implemented here, together with the direct check of the
matrix relations on ``(C^n)^{(x)3}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .densec import (
    DEFAULT_TOL,
    CMatrix,
    Tolerance,
    adjoint,
    cmatrix,
    fro_norm,
    gram_schmidt,
    identity,
    is_unitary,
    matrix_from_dict,
    matrix_to_dict,
    singular_values,
)
from .errors import (
    DimensionError,
    InvalidCoeffSetError,
    OrthogonalLegsError,
    RankOneImpossibleError,
)

# relative tolerance for equality of the two sides of the trace identity
TRACE_REL_TOL = 1e-8


@dataclass(frozen=True)
class CoeffSet:
    """Orthonormal coefficient matrices ``V_1..V_r`` of an r-dimensional subspace."""

    n: int
    r: int
    vs: tuple[CMatrix, ...]

    def __post_init__(self):
        if self.n < 1 or self.r < 1:
            raise InvalidCoeffSetError("n and r must be positive")
        if len(self.vs) != self.r:
            raise InvalidCoeffSetError(f"r={self.r} but {len(self.vs)} matrices given")
        if self.r > self.n * self.n:
            raise InvalidCoeffSetError(f"rank {self.r} exceeds n^2={self.n * self.n}")
        for i, v in enumerate(self.vs):
            if v.shape != (self.n, self.n):
                raise InvalidCoeffSetError(
                    f"matrix #{i + 1} has shape {v.shape}, expected ({self.n}, {self.n})"
                )

    @classmethod
    def of(cls, vs: Sequence) -> "CoeffSet":
        mats = tuple(cmatrix(v) for v in vs)
        if not mats:
            raise InvalidCoeffSetError("empty coefficient set")
        return cls(mats[0].shape[0], len(mats), mats)

    def stack(self) -> np.ndarray:
        return np.stack(self.vs)

    def gram(self) -> np.ndarray:
        a = self.stack().reshape(self.r, -1)
        return a.conj() @ a.T

    def orthonormality_defect(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(self.r))))

    def check(self, tol: Tolerance = DEFAULT_TOL) -> "CoeffSet":
        defect = self.orthonormality_defect()
        if defect > tol.abs:
            raise InvalidCoeffSetError(
                f"coefficient matrices are not orthonormal (max defect {defect:.3e})"
            )
        return self

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "vs": [matrix_to_dict(v) for v in self.vs]}

    @classmethod
    def from_dict(cls, d: dict) -> "CoeffSet":
        cs = cls.of([matrix_from_dict(m) for m in d["vs"]])
        if cs.n != int(d["n"]) or cs.r != int(d["r"]):
            raise InvalidCoeffSetError("declared n/r disagree with the matrices")
        return cs


@dataclass
class TLVerdict:
    q_value: float
    res_t1: float
    res_t2: float
    res_t3: float
    res_t4: float
    trace_lhs: float
    trace_rhs: float
    w_residual: float
    passed: bool
    status: Literal["pass", "fail", "nilpotent"] = "fail"
    rank: int = 0

    def to_dict(self) -> dict:
        return {
            "q_value": self.q_value,
            "res_t1": self.res_t1,
            "res_t2": self.res_t2,
            "res_t3": self.res_t3,
            "res_t4": self.res_t4,
            "trace_lhs": self.trace_lhs,
            "trace_rhs": self.trace_rhs,
            "w_residual": self.w_residual,
            "pass": self.passed,
            "status": self.status,
            "rank": self.rank,
        }


@dataclass
class TraceCriterion:
    """Both sides of the trace identity plus the Q it would give."""

    lhs: float
    rhs: float
    q_if_pass: float
    t1: float
    t2: float
    # max relative disagreement between the dense and the V-trace evaluation
    cross_residual: float

    def holds(self, rel: float = TRACE_REL_TOL) -> bool:
        return abs(self.lhs - self.rhs) <= rel * max(abs(self.lhs), abs(self.rhs))


@dataclass
class WCriterion:
    q_value: float
    residual: float
    passed: bool


@dataclass
class BoundReport:
    q_value: float
    n: int
    r: int
    bound_nr: float
    bound_quartic: float
    rank_one_floor: float | None
    satisfied: dict[str, bool] = field(default_factory=dict)
    hypotheses: dict[str, bool] = field(default_factory=dict)

    @property
    def all_satisfied(self) -> bool:
        return all(self.satisfied.values())

    def to_dict(self) -> dict:
        return {
            "q_value": self.q_value,
            "n": self.n,
            "r": self.r,
            "bound_nr": self.bound_nr,
            "bound_quartic": self.bound_quartic,
            "rank_one_floor": self.rank_one_floor,
            "satisfied": dict(self.satisfied),
            "hypotheses": dict(self.hypotheses),
        }


# -- construction -------------------------------------------------------------

def build_projection(cs: CoeffSet, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """Orthogonal projection onto the span of ``cs`` as an ``n^2 x n^2`` matrix.

    Entry ``((a,b),(c,d))`` is ``sum_s V_ab conj(V_cd)``, i.e. the sum of the
    outer products of the row-major flattened coefficient matrices.
    """
    cs.check(tol)
    flat = cs.stack().reshape(cs.r, -1)
    return flat.T @ flat.conj()


def legs(t: CMatrix, n: int) -> tuple[CMatrix, CMatrix]:
    """``(t (x) I_n, I_n (x) t)``."""
    if t.shape != (n * n, n * n):
        raise DimensionError(f"expected an {n * n}x{n * n} matrix, got {t.shape}")
    i = identity(n)
    return np.kron(t, i), np.kron(i, t)


def coeffset_from_projection(p: CMatrix, n: int) -> CoeffSet:
    """Recover an orthonormal spanning set of the image of a projection."""
    h = (p + adjoint(p)) / 2
    w, u = np.linalg.eigh(h)
    cols = u[:, w > 0.5]
    if cols.shape[1] == 0:
        raise InvalidCoeffSetError("projection has rank zero")
    return CoeffSet.of([cols[:, k].reshape(n, n) for k in range(cols.shape[1])])


def random_coeffset(n: int, r: int, rng: np.random.Generator) -> CoeffSet:
    """Complex-Gaussian matrices orthonormalized by Gram-Schmidt."""
    raw = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(r)]
    return CoeffSet.of(gram_schmidt(raw))


# -- the V-trace formulas -----------------------------------------------------

def _c_tensor(vs: np.ndarray) -> np.ndarray:
    """``C[s,a,b] = V_s conj(V_a) V_b^t V_s^*`` stacked as ``[s,a,b,i,j]``."""
    vb = vs.conj()
    return np.einsum("sij,ajk,blk,sml->sabim", vs, vb, vs, vb, optimize=True)


def v_traces(vs: np.ndarray) -> tuple[float, float]:
    """``tr(P12 P23)`` and ``tr((P12 P23)^2)`` from the coefficient matrices alone."""
    c = _c_tensor(vs)
    t1 = np.einsum("smmii->", c)
    t2 = np.einsum("sabij,tbaji->", c, c)
    return float(t1.real), float(t2.real)


def dense_traces(p: CMatrix, n: int) -> tuple[float, float]:
    p12, p23 = legs(p, n)
    m = p12 @ p23
    return float(np.trace(m).real), float(np.trace(m @ m).real)


# -- criteria -----------------------------------------------------------------

def trace_criterion(cs: CoeffSet, tol: Tolerance = DEFAULT_TOL) -> TraceCriterion:
    """Evaluate the trace identity on ``(C^n)^{(x)3}`` and via the V-trace sums."""
    p = build_projection(cs, tol)
    n, r = cs.n, cs.r
    d1, d2 = dense_traces(p, n)
    f1, f2 = v_traces(cs.stack())
    cross = max(abs(d1 - f1) / max(abs(d1), 1e-300), abs(d2 - f2) / max(abs(d2), 1e-300))
    if d1 <= tol.abs:
        raise OrthogonalLegsError("tr(P12 P23) vanishes: P12 P23 = 0")
    return TraceCriterion(
        lhs=d1 * d1,
        rhs=n * r * d2,
        q_if_pass=math.sqrt(n * r / d1),
        t1=d1,
        t2=d2,
        cross_residual=cross,
    )


def fast_trace_criterion(cs: CoeffSet) -> TraceCriterion:
    """Same as :func:`trace_criterion` using only the V-trace sums."""
    f1, f2 = v_traces(cs.stack())
    if f1 <= 0:
        raise OrthogonalLegsError("tr(P12 P23) vanishes: P12 P23 = 0")
    return TraceCriterion(f1 * f1, cs.n * cs.r * f2, math.sqrt(cs.n * cs.r / f1), f1, f2, 0.0)


def scalar_conditions(t: CMatrix, n: int) -> tuple[float, float]:
    """``tr(T12 T23)`` and ``tr((T12 T23)^2)``; both equal ``n r`` for a solution."""
    t12, t23 = legs(t, n)
    m = t12 @ t23
    return float(np.trace(m).real), float(np.trace(m @ m).real)


def build_w(cs: CoeffSet) -> CMatrix:
    """Block matrix with block ``(s, m) = V_m conj(V_s)``."""
    n, r = cs.n, cs.r
    w = np.zeros((n * r, n * r), dtype=np.complex128)
    for s in range(r):
        vbar = cs.vs[s].conj()
        for m in range(r):
            w[s * n:(s + 1) * n, m * n:(m + 1) * n] = cs.vs[m] @ vbar
    return w


def w_criterion(cs: CoeffSet, tol: Tolerance = DEFAULT_TOL) -> WCriterion:
    cs.check(tol)
    w = build_w(cs)
    norm2 = fro_norm(w) ** 2
    if norm2 <= tol.abs:
        raise OrthogonalLegsError("W vanishes: P12 P23 = 0")
    q = math.sqrt(cs.n * cs.r / norm2)
    ok, residual = is_unitary(q * w, tol)
    return WCriterion(q, residual, ok)


def check_axioms(t: CMatrix, n: int, tol: Tolerance = DEFAULT_TOL) -> TLVerdict:
    """Residuals of the four defining relations for a candidate ``T``.

    ``Q`` is taken as ``tr(T^2) / tr(T)``.  A nonzero ``T`` with vanishing
    trace is reported with status ``"nilpotent"`` and never passes.
    """
    t = cmatrix(t)
    t12, t23 = legs(t, n)
    tnorm = fro_norm(t)
    res_t1 = fro_norm(t - adjoint(t))
    tr1 = complex(np.trace(t))
    nan = float("nan")
    status = "fail"
    if abs(tr1) <= tol.abs * max(1.0, tnorm) and tnorm > tol.abs:
        status = "nilpotent"
        q = 0.0
    else:
        q = (complex(np.trace(t @ t)) / tr1).real if tr1 != 0 else 0.0
    res_t2 = fro_norm(t @ t - q * t)
    res_t3 = fro_norm(t12 @ t23 @ t12 - t12)
    res_t4 = fro_norm(t23 @ t12 @ t23 - t23)

    trace_lhs = trace_rhs = w_residual = nan
    rank = 0
    if q > 0 and status != "nilpotent":
        p = t / q
        rank = int(round(np.trace(p).real))
        if 1 <= rank <= n * n:
            d1, d2 = dense_traces(p, n)
            trace_lhs, trace_rhs = d1 * d1, n * rank * d2
            try:
                cs = coeffset_from_projection(p, n)
                if cs.r == rank:
                    _, w_residual = is_unitary(q * build_w(cs), tol)
            except InvalidCoeffSetError:
                pass

    scale = max(1.0, tnorm)
    passed = (
        status != "nilpotent"
        and q > 0
        and tol.allows(res_t1, scale)
        and tol.allows(res_t2, scale**2)
        and tol.allows(res_t3, scale**3)
        and tol.allows(res_t4, scale**3)
    )
    if passed:
        status = "pass"
    return TLVerdict(q, res_t1, res_t2, res_t3, res_t4, trace_lhs, trace_rhs,
                     w_residual, passed, status, rank)


def tl_matrix(cs: CoeffSet, tol: Tolerance = DEFAULT_TOL) -> tuple[CMatrix, float]:
    """``T = Q P`` with Q from the W-matrix formula (valid only if cs is TL)."""
    q = w_criterion(cs, tol).q_value
    return q * build_projection(cs, tol), q


def conjugate_family(cs: CoeffSet) -> tuple[CoeffSet, CoeffSet, CoeffSet]:
    """Entrywise-conjugate, transposed and adjoint coefficient sets."""
    return (
        CoeffSet(cs.n, cs.r, tuple(v.conj() for v in cs.vs)),
        CoeffSet(cs.n, cs.r, tuple(v.T.copy() for v in cs.vs)),
        CoeffSet(cs.n, cs.r, tuple(adjoint(v) for v in cs.vs)),
    )


# -- bounds on Q --------------------------------------------------------------

def rank_one_q(v: CMatrix, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """Q from ``|det V|^(-2/n)`` and from ``sqrt(tr((V* V)^-1))``."""
    v = cmatrix(v)
    n = v.shape[0]
    norm2 = fro_norm(v) ** 2
    if abs(norm2 - 1.0) > tol.abs:
        raise InvalidCoeffSetError(f"tr(V* V) = {norm2!r}, expected 1")
    sv = singular_values(v)
    if sv[-1] <= tol.abs:
        raise RankOneImpossibleError(
            f"coefficient matrix is singular (smallest singular value {sv[-1]:.3e})"
        )
    q_det = float(np.exp(-2.0 / n * np.sum(np.log(sv))))
    q_trace = float(math.sqrt(np.sum(sv ** -2.0)))
    return q_det, q_trace


def _is_sym_or_antisym(v: CMatrix, tol: float) -> bool:
    return fro_norm(v - v.T) < tol or fro_norm(v + v.T) < tol


def _is_unitary_multiple(v: CMatrix, n: int, tol: float) -> bool:
    # members have unit Frobenius norm, so the multiple is 1/sqrt(n)
    return fro_norm(v @ adjoint(v) - identity(n) / n) < tol


def _unitary_orbit(cs: CoeffSet, tol: float) -> bool:
    """True if ``V_k = V_1 g_k`` for all k, or ``V_k = g_k V_1``, with unitary g_k."""
    v1 = cs.vs[0]
    if singular_values(v1)[-1] <= tol:
        return False
    inv = np.linalg.inv(v1)
    right = all(is_unitary(inv @ v, Tolerance(tol))[0] for v in cs.vs[1:])
    left = all(is_unitary(v @ inv, Tolerance(tol))[0] for v in cs.vs[1:])
    return right or left


def bound_suite(cs: CoeffSet, verdict: TLVerdict, slack: float = 1e-9,
                detect_tol: float = 1e-9) -> BoundReport:
    """Evaluate every known lower bound / equality on Q for a verified solution."""
    if not verdict.passed:
        raise ValueError("bounds apply to verified solutions only")
    n, r, q = cs.n, cs.r, verdict.q_value
    rep = BoundReport(
        q_value=q,
        n=n,
        r=r,
        bound_nr=n / r,
        bound_quartic=(2 * n * n / (n * n + r)) ** 0.25,
        rank_one_floor=float(n) if r == 1 else None,
    )
    rep.satisfied["q_ge_n_over_r"] = q - rep.bound_nr >= -slack
    rep.satisfied["q4_ge_2n2_over_n2_plus_r"] = q - rep.bound_quartic >= -slack

    sym = any(_is_sym_or_antisym(v, detect_tol) for v in cs.vs)
    uni = any(_is_unitary_multiple(v, n, detect_tol) for v in cs.vs)
    rep.hypotheses["symmetric_member"] = sym
    rep.hypotheses["unitary_multiple_member"] = uni
    if sym:
        rep.satisfied["symmetric_q2_le_n2"] = q * q <= n * n * (1 + slack)
    if uni:
        target = n * n / r
        rep.satisfied["unitary_q2_eq_n2_over_r"] = abs(q * q - target) <= slack * max(1.0, target)
    if r == 1:
        rep.satisfied["rank_one_q_ge_n"] = q - n >= -slack
        at_floor = abs(q - n) <= slack * n
        rep.satisfied["rank_one_equality_iff_unitary"] = at_floor == uni
    else:
        orbit = _unitary_orbit(cs, detect_tol)
        rep.hypotheses["unitary_orbit"] = orbit
        if orbit:
            rep.satisfied["orbit_q2_ge_n2_over_r"] = q * q - n * n / r >= -slack * n * n
    return rep


def scale_tower(cs: CoeffSet, m: int, side: Literal["left", "right"] = "left") -> CoeffSet:
    """Lift a solution on ``C^n`` to one on ``C^(mn)`` of the same rank; Q scales by m."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    im = identity(m) / math.sqrt(m)
    if side == "left":
        vs = tuple(np.kron(im, v) for v in cs.vs)
    else:
        vs = tuple(np.kron(v, im) for v in cs.vs)
    return CoeffSet(m * cs.n, cs.r, vs)
