"""Spectral-parameter R-matrices built from a TL generator and their YBE residuals."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .densec import DEFAULT_TOL, CMatrix, Tolerance, fro_norm, identity
from .errors import BranchError
from .tlcore import check_axioms, legs

ADDITIVE_TOL = 1e-12
MULT_GRID = (0.5, 1.0, 2.0)
ADD_GRID = (-1.0, 0.0, 1.0)


@dataclass(frozen=True)
class RFamily:
    t: CMatrix
    n: int
    q_cap: float
    q_root: complex
    additive: bool

    @property
    def r(self) -> CMatrix:
        return self.q_root * identity(self.n ** 2) - self.t

    @property
    def r_inv(self) -> CMatrix:
        return identity(self.n ** 2) / self.q_root - self.t

    @property
    def branch(self) -> str:
        return "add" if self.additive else "mult"

    def compose(self, u: complex, v: complex) -> complex:
        return u + v if self.additive else u * v

    def default_grid(self) -> tuple[float, ...]:
        return ADD_GRID if self.additive else MULT_GRID


def q_root_of(q_cap: float) -> complex:
    """Root of ``q + 1/q = Q``: real and ``>= 1`` for ``Q >= 2``, on the unit circle for ``1 <= Q < 2``."""
    if q_cap >= 2:
        return complex((q_cap + math.sqrt(q_cap * q_cap - 4)) / 2)
    if q_cap >= 1:
        return cmath.exp(1j * math.acos(q_cap / 2))
    raise BranchError(f"Q={q_cap!r} < 1 is outside the supported branch")


def make_family(t: CMatrix, n: int, tol: Tolerance = DEFAULT_TOL) -> RFamily:
    verdict = check_axioms(t, n, tol)
    if not verdict.passed:
        raise ValueError("T does not satisfy the TL relations")
    q_cap = verdict.q_value
    additive = abs(q_cap - 2) < ADDITIVE_TOL
    # at Q = 2 the root is double; snapping avoids sqrt(Q^2 - 4) amplifying rounding
    q_root = 1.0 + 0j if additive else q_root_of(q_cap)
    fam = RFamily(np.array(t, dtype=np.complex128), n, q_cap, q_root, additive)
    res = inverse_residual(fam)
    scale = max(1.0, fro_norm(fam.r)) ** 2
    if not tol.allows(res, scale):
        raise ValueError(f"q^-1 I - T is not the inverse of q I - T (residual {res:.3e})")
    return fam


def inverse_residual(fam: RFamily) -> float:
    return fro_norm(fam.r @ fam.r_inv - identity(fam.n ** 2))


def r_at(fam: RFamily, u: complex) -> CMatrix:
    """``u R + I`` on the additive branch, ``u R - R^-1`` otherwise."""
    if fam.additive:
        return u * fam.r + identity(fam.n ** 2)
    return u * fam.r - fam.r_inv


def ybe_residual(fam: RFamily, us: Sequence[complex] | None = None,
                 vs: Sequence[complex] | None = None) -> float:
    """Max over the grid of ``|R12(u) R23(u.v) R12(v) - R23(v) R12(u.v) R23(u)|``."""
    us = fam.default_grid() if us is None else us
    vs = fam.default_grid() if vs is None else vs
    worst = 0.0
    for u in us:
        for v in vs:
            a12, a23 = legs(r_at(fam, u), fam.n)
            b12, b23 = legs(r_at(fam, fam.compose(u, v)), fam.n)
            c12, c23 = legs(r_at(fam, v), fam.n)
            worst = max(worst, fro_norm(a12 @ b23 @ c12 - c23 @ b12 @ a23))
    return worst


def ybe_report(fam: RFamily, us=None, vs=None) -> dict:
    us = list(fam.default_grid() if us is None else us)
    vs = list(fam.default_grid() if vs is None else vs)
    grid = [[_num(u), _num(v)] for u in us for v in vs]
    return {"grid": grid, "max_residual": ybe_residual(fam, us, vs), "branch": fam.branch}


def _num(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]
