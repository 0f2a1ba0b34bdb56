"""Jones-Wenzl projectors in a tensor space representation.

``rho_sequence`` iterates the scalar recursion, ``jw_matrix`` builds the image
of ``P_N`` on ``(C^n)^{(x)N}``, ``d_sequence`` gives its trace as a function of
``(n, r)`` only, and ``allowed_q`` lists the values of Q compatible with a
positive semidefinite tower when the rank is large.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .densec import DEFAULT_TOL, CMatrix, Tolerance, embed, fro_norm, identity
from .errors import SizeLimitError, UndefinedProjectorError
from .tlcore import check_axioms

RHO_INF_TOL = 1e-10
DEFAULT_SIZE_CAP = 4096


def rho_sequence(q_cap: float, n_max: int, inf_tol: float = RHO_INF_TOL) -> list[float]:
    """``rho_0 .. rho_{n_max}`` with ``rho_{k+1} = 1/(Q - rho_k)``.

    If ``|Q - rho_k| < inf_tol`` the next entry is ``math.inf`` and the
    sequence stops there, so the result may be shorter than ``n_max + 1``.
    """
    if not q_cap > 0:
        raise ValueError(f"Q must be positive, got {q_cap!r}")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    rho = [0.0]
    while len(rho) <= n_max:
        gap = q_cap - rho[-1]
        if abs(gap) < inf_tol:
            rho.append(math.inf)
            break
        rho.append(1.0 / gap)
    return rho


def _q_of(t: CMatrix, n: int, tol: Tolerance) -> float:
    verdict = check_axioms(t, n, tol)
    if not verdict.passed:
        raise ValueError("T does not satisfy the TL relations")
    return verdict.q_value


def jw_matrix(t: CMatrix, n: int, big_n: int, *, cap: int = DEFAULT_SIZE_CAP,
              tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """Image of ``P_N`` under ``T_k -> I..I (x) T (x) I..I``.

    Built from ``P_1 = I`` by ``P_{k+1} = P_k - rho_k P_k T_k P_k``.
    """
    if big_n < 1:
        raise ValueError("N must be at least 1")
    dim = n ** big_n
    if dim > cap:
        raise SizeLimitError(f"n^N = {dim} exceeds the size cap {cap}")
    q = _q_of(t, n, tol)
    rho = rho_sequence(q, big_n - 1)
    if len(rho) < big_n or math.isinf(rho[-1]):
        raise UndefinedProjectorError(
            f"rho_{len(rho) - 1} is infinite at Q={q!r}; P_N is defined only for N <= {len(rho) - 1}"
        )
    p = identity(n)
    for k in range(1, big_n):
        p = np.kron(p, identity(n))
        tk = embed(t, n, k, k + 1)
        p = p - rho[k] * (p @ tk @ p)
    return p


def jw_annihilation_residual(t: CMatrix, n: int, big_n: int, **kw) -> float:
    """``max_k max(|T_k P_N|, |P_N T_k|)``."""
    p = jw_matrix(t, n, big_n, **kw)
    worst = 0.0
    for k in range(1, big_n):
        tk = embed(t, n, k, big_n)
        worst = max(worst, fro_norm(tk @ p), fro_norm(p @ tk))
    return worst


# -- traces -------------------------------------------------------------------

def d_sequence(n: int, r: int, n_max: int) -> list[float]:
    """``d_0 .. d_{n_max}`` from ``d_{N+1} = n d_N - r d_{N-1}``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    d = [1.0, float(n)]
    while len(d) <= n_max:
        d.append(n * d[-1] - r * d[-2])
    return d[: n_max + 1]


def d_closed_form(n: int, r: int, big_n: int) -> float:
    """Closed-form ``d_N(n, r)``; ``xi`` is complex when ``r > n^2/4``."""
    if 4 * r == n * n:
        return r ** (big_n / 2) * (big_n + 1)
    x = n / math.sqrt(r)
    xi = (x + cmath.sqrt(x * x - 4)) / 2
    val = (xi ** (big_n + 1) - xi ** (-big_n - 1)) / (xi - 1 / xi)
    return float((r ** (big_n / 2) * val).real)


def closed_form_residual(n: int, r: int, n_max: int) -> float:
    """Max relative gap between recursion and closed form.

    The scale is ``max(|d_N|, r^(N/2))`` so that near-zero values of an
    oscillating sequence are compared at the size of their envelope.
    """
    worst = 0.0
    for k, dk in enumerate(d_sequence(n, r, n_max)):
        scale = max(abs(dk), r ** (k / 2))
        worst = max(worst, abs(dk - d_closed_form(n, r, k)) / scale)
    return worst


# -- admissible Q -------------------------------------------------------------

def allowed_q(n: int, r: int) -> str | list[float]:
    """``"unrestricted"``, ``"empty"`` or the finite list of admissible Q.

    For ``r > n^2/4`` take the largest m with ``4 cos^2(pi/(m+2)) <= n^2/r``;
    Q must lie in ``{2 cos(pi/(k+2)) : k = 1..m}``.  Q = 1 (k = 1) needs
    ``r = n^2``, which is also the only rank it is possible for.
    """
    if n < 1 or r < 1 or r > n * n:
        raise ValueError(f"need 1 <= r <= n^2, got n={n}, r={r}")
    if 4 * r <= n * n:
        return "unrestricted"
    if r == n * n:
        return [1.0]
    ratio = n * n / r
    m = 1
    while 4 * math.cos(math.pi / (m + 3)) ** 2 <= ratio + 1e-12:
        m += 1
    values = [2 * math.cos(math.pi / (k + 2)) for k in range(2, m + 1)]
    return values if values else "empty"


# -- report -------------------------------------------------------------------

@dataclass
class JWReport:
    n: int
    r: int
    q_cap: float | None
    rho: list[float] = field(default_factory=list)
    d: list[float] = field(default_factory=list)
    first_negative_d: int | None = None
    allowed_q: str | list[float] = "unrestricted"

    def to_dict(self) -> dict:
        enc = lambda x: "inf" if math.isinf(x) else x  # noqa: E731
        return {
            "n": self.n,
            "r": self.r,
            "q_cap": self.q_cap,
            "rho": [enc(x) for x in self.rho],
            "d": list(self.d),
            "first_negative_d": self.first_negative_d,
            "allowed_q": self.allowed_q,
        }


def jw_report(n: int, r: int, n_max: int = 10, q_cap: float | None = None) -> JWReport:
    d = d_sequence(n, r, n_max)
    neg = next((k for k, x in enumerate(d) if x < 0), None)
    rho = rho_sequence(q_cap, n_max) if q_cap is not None else []
    return JWReport(n, r, q_cap, rho, d, neg, allowed_q(n, r))
