"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the helpers here
add validation, the Frobenius inner product used for coefficient matrices,
Gram-Schmidt, unitarity testing and the JSON wire format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInputError, DimensionError

CMatrix = np.ndarray


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative residual thresholds."""

    abs: float = 1e-9
    rel: float = 0.0

    def __post_init__(self):
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.abs == 0 and self.rel == 0:
            raise ValueError("at least one tolerance must be positive")

    def allows(self, residual: float, scale: float = 0.0) -> bool:
        return residual <= self.abs + self.rel * scale


DEFAULT_TOL = Tolerance()


def cmatrix(data, rows: int | None = None, cols: int | None = None) -> CMatrix:
    """Build a validated complex matrix.

    ``data`` may be anything ``numpy`` accepts; a flat sequence is reshaped
    row-major when ``rows``/``cols`` are given.
    """
    a = np.array(data, dtype=np.complex128)
    if rows is not None or cols is not None:
        if rows is None or cols is None:
            raise DimensionError("give both rows and cols or neither")
        if a.size != rows * cols:
            raise DimensionError(f"{a.size} entries cannot fill a {rows}x{cols} matrix")
        a = a.reshape(rows, cols)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def identity(n: int) -> CMatrix:
    return np.eye(n, dtype=np.complex128)


def matrix_unit(n: int, a: int, b: int) -> CMatrix:
    """``E_ab`` in ``M_n`` with 0-based ``a``, ``b``."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[a, b] = 1.0
    return e


def _square(a: CMatrix, what: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    return a.shape[0]


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    return np.kron(a, b)


def kron_all(mats: Iterable[CMatrix]) -> CMatrix:
    out = None
    for m in mats:
        out = m if out is None else np.kron(out, m)
    if out is None:
        raise DimensionError("kron_all needs at least one factor")
    return out


def embed(t: CMatrix, n: int, k: int, legs: int) -> CMatrix:
    """``I^{(k-1)} (x) t (x) I^{(legs-k-1)}`` for a two-leg operator ``t``.

    ``k`` is 1-based as in ``T_k``; the result acts on ``(C^n)^legs``.
    """
    if t.shape != (n * n, n * n):
        raise DimensionError(f"expected an {n * n}x{n * n} operator, got {t.shape}")
    if not 1 <= k <= legs - 1:
        raise DimensionError(f"leg index {k} out of range for {legs} legs")
    left = identity(n ** (k - 1))
    right = identity(n ** (legs - k - 1))
    return np.kron(np.kron(left, t), right)


def matmul(a: CMatrix, b: CMatrix) -> CMatrix:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: CMatrix) -> CMatrix:
    return a.conj().T


def transpose(a: CMatrix) -> CMatrix:
    return a.T.copy()


def conj(a: CMatrix) -> CMatrix:
    return a.conj()


def trace(a: CMatrix) -> complex:
    _square(a)
    return complex(np.trace(a))


def fro_norm(a: CMatrix) -> float:
    return float(np.linalg.norm(a))


def inner(a: CMatrix, b: CMatrix) -> complex:
    """Frobenius inner product ``trace(a* b)``, conjugate-linear in ``a``."""
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def gram_schmidt(vs: Sequence[CMatrix], tol: Tolerance = DEFAULT_TOL) -> list[CMatrix]:
    """Orthonormalize ``vs`` under ``trace(A* B)``.

    Modified Gram-Schmidt with one re-orthogonalization pass.  Order is
    preserved; a vector whose residual norm drops below ``tol.abs`` raises
    :class:`DegenerateInputError`.
    """
    if not vs:
        return []
    shape = vs[0].shape
    out: list[CMatrix] = []
    for i, v in enumerate(vs):
        if v.shape != shape:
            raise DimensionError(f"vector #{i + 1} has shape {v.shape}, expected {shape}")
        w = np.array(v, dtype=np.complex128)
        for _ in range(2):
            for u in out:
                w = w - np.vdot(u, w) * u
        norm = float(np.linalg.norm(w))
        if norm < tol.abs:
            raise DegenerateInputError(i, norm)
        out.append(w / norm)
    return out


def is_unitary(a: CMatrix, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    """Return ``(flag, residual)`` with ``residual = |a a* - I|_F / sqrt(dim)``."""
    n = _square(a)
    residual = fro_norm(a @ adjoint(a) - identity(n)) / math.sqrt(n)
    return residual <= tol.abs + tol.rel, residual


def singular_values(a: CMatrix) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(a, compute_uv=False)


# -- JSON wire format ---------------------------------------------------------

def matrix_to_dict(a: CMatrix) -> dict:
    rows, cols = a.shape
    return {
        "rows": int(rows),
        "cols": int(cols),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_dict(d: dict) -> CMatrix:
    try:
        rows, cols, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from None
    flat = [complex(float(re), float(im)) for re, im in entries]
    return cmatrix(flat, rows, cols)


def dumps_matrix(a: CMatrix) -> str:
    # json emits repr(float), the shortest string that round-trips exactly
    return json.dumps(matrix_to_dict(a))


def loads_matrix(s: str) -> CMatrix:
    return matrix_from_dict(json.loads(s))
