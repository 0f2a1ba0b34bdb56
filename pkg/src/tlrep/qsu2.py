"""q-numbers, U_q(su2) Clebsch-Gordan coefficients and TL vectors/pairs.

Spins are passed around as ordinary numbers (``0.5``, ``1``, ``Fraction(3, 2)``)
at the API boundary and stored as doubled integers internally, so label
arithmetic is exact.

The tensor square of the spin-S module is identified with ``C^n (x) C^n``,
``n = 2S + 1``, by sending ``e_a`` to the weight vector ``|S + 1 - a>``.  Under
this identification the joint eigenvector ``|J, m>_q`` becomes an antidiagonal
``n x n`` coefficient matrix (see :func:`coeff_matrix`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal, Sequence

import numpy as np

from .densec import CMatrix

CLASSICAL_EPS = 1e-14
ROOT_TOL = 1e-9
FIXED_Q_REL_TOL = 1e-9
DEFAULT_Q_RANGE = (0.25, 4.0)
DEFAULT_GRID = 400
DEFAULT_MAX_SPIN = 4


def _dbl(x) -> int:
    """Twice a half-integer, exactly."""
    d = 2 * x
    k = int(round(float(d)))
    if abs(float(d) - k) > 1e-12:
        raise ValueError(f"{x!r} is not a half-integer")
    return k


def _half(k2: int) -> int:
    if k2 % 2:
        raise ValueError("internal: expected an even doubled value")
    return k2 // 2


@dataclass(frozen=True)
class QContext:
    q: float

    def __post_init__(self):
        if not (self.q > 0 and math.isfinite(self.q)):
            raise ValueError(f"q must be a positive real, got {self.q!r}")

    @property
    def is_classical(self) -> bool:
        return abs(self.q - 1.0) <= CLASSICAL_EPS

    def inverse(self) -> "QContext":
        return QContext(1.0 / self.q)


@dataclass(frozen=True, order=True)
class SpinLabel:
    """``|J, m>`` inside the tensor square of spin S; all fields doubled."""

    two_s: int
    two_j: int
    two_m: int

    def __post_init__(self):
        s2, j2, m2 = self.two_s, self.two_j, self.two_m
        if s2 < 0:
            raise ValueError("spin must be nonnegative")
        if j2 % 2 or not 0 <= j2 <= 2 * s2:
            raise ValueError(f"J={j2 / 2} must be an integer in [0, 2S]")
        if abs(m2) > j2 or (j2 - m2) % 2:
            raise ValueError(f"m={m2 / 2} is not a weight of J={j2 / 2}")

    @classmethod
    def of(cls, s, j, m) -> "SpinLabel":
        return cls(_dbl(s), _dbl(j), _dbl(m))

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def j(self) -> int:
        return self.two_j // 2

    @property
    def m(self) -> int:
        return self.two_m // 2

    @property
    def n(self) -> int:
        return self.two_s + 1

    def to_json(self) -> list[int]:
        return [self.two_j, self.two_m]

    def __str__(self):
        return f"|{self.j},{self.m}>"


# -- q-numbers ----------------------------------------------------------------

def qnum(ctx: QContext, t: float) -> float:
    """``[t]_q``; written as ``sinh(t log q) / sinh(log q)`` to stay accurate near q = 1."""
    if ctx.is_classical:
        return float(t)
    lq = math.log(ctx.q)
    return math.sinh(t * lq) / math.sinh(lq)


@lru_cache(maxsize=4096)
def _log_qfact(q: float, l: int) -> float:
    ctx = QContext(q)
    if l < 0:
        return math.inf
    if l <= 1:
        return 0.0
    return _log_qfact(q, l - 1) + math.log(qnum(ctx, l))


def qfact(ctx: QContext, l: int) -> float:
    """``[l]!``; ``inf`` for negative ``l`` (terms divided by it drop out)."""
    if l < 0:
        return math.inf
    out = 1.0
    for p in range(1, l + 1):
        out *= qnum(ctx, p)
    return out


# -- Clebsch-Gordan coefficients ---------------------------------------------

def _qkey(ctx: QContext) -> float:
    return 1.0 if ctx.is_classical else ctx.q


@lru_cache(maxsize=1 << 16)
def _cg2(q: float, s2: int, k1_2: int, k2_2: int, j2: int, m2: int) -> float:
    if k1_2 + k2_2 != m2:
        return 0.0
    if abs(k1_2) > s2 or abs(k2_2) > s2 or (s2 - k1_2) % 2 or (s2 - k2_2) % 2:
        raise ValueError("weights out of range for this spin")
    lf = lambda k: _log_qfact(q, k)  # noqa: E731
    lq = math.log(q)

    two_s_minus_j = _half(2 * s2 - j2)
    two_s_plus_j_1 = _half(2 * s2 + j2 + 2)
    j = _half(j2)
    s_p_k1, s_m_k1 = _half(s2 + k1_2), _half(s2 - k1_2)
    s_p_k2, s_m_k2 = _half(s2 + k2_2), _half(s2 - k2_2)
    j_p_m, j_m_m = _half(j2 + m2), _half(j2 - m2)
    if min(j_p_m, j_m_m) < 0:
        return 0.0

    exponent = (2 * s2 - j2) * (2 * s2 + j2 + 2) / 8 + s2 * (k2_2 - k1_2) / 4
    log_pre = (
        exponent * lq
        + lf(j)
        + 0.5 * (math.log(qnum(QContext(q), j2 + 1)) - lf(two_s_plus_j_1))
        + 0.5 * sum(lf(k) for k in (two_s_minus_j, s_p_k1, s_m_k1, s_p_k2, s_m_k2, j_p_m, j_m_m))
    )

    a = _half(j2 - s2 + k1_2)  # J - S + k1
    b = _half(j2 - s2 - k2_2)  # J - S - k2
    terms = []
    for l in range(max(0, -a, -b), min(two_s_minus_j, s_m_k1, s_p_k2) + 1):
        log_den = lf(l) + lf(two_s_minus_j - l) + lf(s_m_k1 - l) + lf(s_p_k2 - l) + lf(a + l) + lf(b + l)
        mag = math.exp(log_pre - l * (2 * s2 + j2 + 2) / 2 * lq - log_den)
        terms.append(-mag if l % 2 else mag)
    return math.fsum(terms)


def cg(ctx: QContext, s, k1, k2, j, m) -> float:
    """``{S, S, k1, k2 | J, m}_q``; zero unless ``k1 + k2 == m``."""
    lab = SpinLabel.of(s, j, m)
    return _cg2(_qkey(ctx), lab.two_s, _dbl(k1), _dbl(k2), lab.two_j, lab.two_m)


def cg_row_lemma(s, j, m, p: int) -> float:
    """Closed form of ``{S, S, S-p, m+p-S | J, m}`` at q = 1 for p in {0, 1, 2}.

    Independent of :func:`cg`; valid for ``0 <= m <= J``.  When ``m > 2S - p``
    the second weight leaves the spin-S range and the coefficient is zero.
    """
    if p not in (0, 1, 2):
        raise ValueError(f"p must be 0, 1 or 2, got {p!r}")
    S, J, M = _dbl(s) / 2, _dbl(j) / 2, _dbl(m) / 2
    SpinLabel.of(s, j, m)
    if not 0 <= M <= J:
        raise ValueError("the lemma needs 0 <= m <= J")
    if p > 2 * S or M > 2 * S - p:
        return 0.0
    f1 = J * (J + 1) - 2 * S * (M + 1)
    f = (1.0, f1, f1 * f1 + 2 * (M + 1 - 2 * S) * f1 + 2 * S * (M + 1) * (M - 2 * S))[p]
    if f == 0:
        return 0.0
    lg = lambda x: math.lgamma(x + 1)  # noqa: E731
    log_ratio = (
        math.log(2 * J + 1) + lg(2 * S - p) + lg(2 * S - M - p) + lg(J + M)
        - lg(p) - lg(M + p) - lg(2 * S - J) - lg(2 * S + J + 1) - lg(J - M)
    )
    return f * math.exp(0.5 * log_ratio)


def spin_labels(s) -> list[SpinLabel]:
    """All ``|J, m>`` for spin S, ordered by J then m ascending."""
    s2 = _dbl(s)
    return [SpinLabel(s2, 2 * j, 2 * m) for j in range(s2 + 1) for m in range(-j, j + 1)]


def coeff_matrix(ctx: QContext, s, j=None, m=None) -> CMatrix:
    """Coefficient matrix of ``|J, m>_q``: ``V_ab = {S,S,S+1-a,S+1-b | J,m}`` on ``a+b+m = 2S+2``.

    Accepts either ``(s, j, m)`` or a single :class:`SpinLabel`.
    """
    lab = s if isinstance(s, SpinLabel) else SpinLabel.of(s, j, m)
    return _coeff_matrix(_qkey(ctx), lab).copy()


@lru_cache(maxsize=1 << 14)
def _coeff_matrix(q: float, lab: SpinLabel) -> np.ndarray:
    n = lab.n
    v = np.zeros((n, n), dtype=np.complex128)
    for a in range(1, n + 1):
        b2 = 2 * lab.two_s + 4 - lab.two_m - 2 * a  # 2b from a + b + m = 2S + 2
        if b2 % 2:
            continue
        b = b2 // 2
        if 1 <= b <= n:
            v[a - 1, b - 1] = _cg2(q, lab.two_s, lab.two_s + 2 - 2 * a, lab.two_s + 2 - 2 * b,
                                   lab.two_j, lab.two_m)
    v.setflags(write=False)
    return v


def cg_basis(ctx: QContext, s) -> tuple[list[SpinLabel], list[CMatrix]]:
    labs = spin_labels(s)
    return labs, [coeff_matrix(ctx, lab) for lab in labs]


def cg_orthogonality_residual(ctx: QContext, s) -> float:
    _, mats = cg_basis(ctx, s)
    flat = np.array([v.ravel().real for v in mats])
    return float(np.max(np.abs(flat @ flat.T - np.eye(len(mats)))))


def cg_symmetry_residual(ctx: QContext, s) -> float:
    """Max of ``|{S,S,m2,m1|J,m}_q - (-1)^(2S-J) {S,S,m1,m2|J,m}_(1/q)|``."""
    s2 = _dbl(s)
    inv = ctx.inverse()
    worst = 0.0
    for lab in spin_labels(s):
        sign = -1.0 if (2 * s2 - lab.two_j) // 2 % 2 else 1.0
        for k1_2 in range(-s2, s2 + 1, 2):
            k2_2 = lab.two_m - k1_2
            if abs(k2_2) > s2:
                continue
            lhs = _cg2(_qkey(ctx), s2, k2_2, k1_2, lab.two_j, lab.two_m)
            rhs = _cg2(_qkey(inv), s2, k1_2, k2_2, lab.two_j, lab.two_m)
            worst = max(worst, abs(lhs - sign * rhs))
    return worst


# -- TL vectors and pairs -----------------------------------------------------

def _check_labels(labels: Sequence[SpinLabel]) -> tuple[SpinLabel, ...]:
    labels = tuple(labels)
    if not labels:
        raise ValueError("need at least one label")
    if len({lab.two_s for lab in labels}) != 1:
        raise ValueError("labels must share the same spin")
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct (orthogonal) basis vectors")
    return labels


def criterion_parts(ctx: QContext, labels: Sequence[SpinLabel]) -> tuple[float, float]:
    """``tr(P12 P23)`` and ``tr((P12 P23)^2)`` for the projection onto the labelled vectors.

    Uses the real-matrix trace sums; the CG matrices are real for q > 0.
    """
    labels = _check_labels(labels)
    vs = [coeff_matrix(ctx, lab).real for lab in labels]
    f1 = sum(np.trace(a @ a.T @ b.T @ b) for a in vs for b in vs)
    f2 = 0.0
    for k1, k2, k3, k4 in itertools.product(vs, repeat=4):
        f2 += np.trace(k1 @ k2.T @ k3.T @ k4 @ k2 @ k1.T @ k4.T @ k3)
    return float(f1), float(f2)


def tl_criterion_value(ctx: QContext, labels: Sequence[SpinLabel]) -> float:
    """``f(q) = tr(P12 P23)^2 - n r tr((P12 P23)^2)``; zero iff TL at this q."""
    labels = _check_labels(labels)
    f1, f2 = criterion_parts(ctx, labels)
    return f1 * f1 - labels[0].n * len(labels) * f2


def normalized_criterion(ctx: QContext, labels: Sequence[SpinLabel]) -> float:
    """``f / (n r tr((P12 P23)^2))``, a scale-free version of f in ``[-1, 0]``."""
    labels = _check_labels(labels)
    f1, f2 = criterion_parts(ctx, labels)
    nr = labels[0].n * len(labels)
    if f2 <= 0:
        return -1.0
    return f1 * f1 / (nr * f2) - 1.0


def q_value(ctx: QContext, labels: Sequence[SpinLabel]) -> float:
    """Q that a TL vector/pair would carry: ``sqrt(n r / tr(P12 P23))``."""
    labels = _check_labels(labels)
    f1, _ = criterion_parts(ctx, labels)
    return math.sqrt(labels[0].n * len(labels) / f1)


def is_tl(ctx: QContext, labels: Sequence[SpinLabel], rel: float = FIXED_Q_REL_TOL) -> bool:
    return abs(normalized_criterion(ctx, labels)) <= rel


@dataclass
class TLScanHit:
    labels: tuple[SpinLabel, ...]
    mode: Literal["all-q", "roots"]
    # for "all-q" hits these are sample points, for "roots" the roots themselves
    q_points: list[float] = field(default_factory=list)
    q_values: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "labels": [lab.to_json() for lab in self.labels],
            "spin2": self.labels[0].two_s,
            "mode": self.mode,
            "q_points": list(self.q_points),
            "Q_values": list(self.q_values),
        }


def _bisect(fn, lo: float, hi: float, flo: float, xtol: float) -> float:
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden_max(fn, lo: float, hi: float, xtol: float) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def tl_root_scan(
    labels: Sequence[SpinLabel],
    q_range: tuple[float, float] = DEFAULT_Q_RANGE,
    grid: int = DEFAULT_GRID,
    *,
    tol: float = ROOT_TOL,
    xtol: float = 1e-12,
    extra_checks: int = 10,
    all_q_samples: int = 20,
    seed: int = 0,
    peak_floor: float = 0.1,
) -> TLScanHit:
    """Locate the q > 0 at which the labelled vector/pair is TL.

    The criterion is sampled on a log-spaced grid.  If it vanishes everywhere
    (and at ``extra_checks`` random points) the hit is ``"all-q"``.  Otherwise
    sign changes are bisected, and because the criterion never exceeds zero
    its roots are typically tangential: each interior grid maximum is refined
    by bisecting a finite-difference derivative and kept when the
    normalized criterion is within ``tol`` of zero.  Maxima whose grid value
    is below ``-peak_floor`` are not refined.
    """
    labels = _check_labels(labels)
    lo, hi = map(float, q_range)
    if not 0 < lo < hi:
        raise ValueError(f"invalid q range {q_range!r}")
    if grid < 3:
        raise ValueError("grid needs at least 3 points")

    g = lambda q: normalized_criterion(QContext(q), labels)  # noqa: E731
    qs = np.geomspace(lo, hi, grid)
    gs = np.array([g(q) for q in qs])

    if np.all(np.abs(gs) <= tol):
        rng = np.random.default_rng(seed)
        extra = np.exp(rng.uniform(math.log(lo), math.log(hi), extra_checks))
        if all(abs(g(q)) <= tol for q in extra):
            pts = np.geomspace(lo, hi, all_q_samples)
            return TLScanHit(labels, "all-q", [float(q) for q in pts],
                             [q_value(QContext(q), labels) for q in pts])

    candidates: list[float] = []
    for i in range(grid - 1):
        if gs[i] == 0:
            candidates.append(float(qs[i]))
        elif gs[i] * gs[i + 1] < 0:
            candidates.append(_bisect(g, qs[i], qs[i + 1], gs[i], xtol))

    def deriv(q: float) -> float:
        # five-point stencil: truncation O(h^4) stays below the rounding noise
        h = 1e-4 * q
        return (8 * (g(q + h) - g(q - h)) - (g(q + 2 * h) - g(q - 2 * h))) / (12 * h)

    for i in range(1, grid - 1):
        if not (gs[i] >= gs[i - 1] and gs[i] >= gs[i + 1]):
            continue
        # skip flat stretches (rounding noise) and peaks far below zero
        if gs[i] - min(gs[i - 1], gs[i + 1]) <= 1e-13 or gs[i] < -peak_floor:
            continue
        a, b = float(qs[i - 1]), float(qs[i + 1])
        da, db = deriv(a), deriv(b)
        if da > 0 > db:
            candidates.append(_bisect(deriv, a, b, da, xtol))
        else:
            candidates.append(_golden_max(g, a, b, xtol))

    # f(q) = f(1/q), so q = 1 is always stationary and often of high order;
    # test it exactly instead of trusting a refined estimate nearby
    exact = [1.0] if lo < 1.0 < hi and abs(g(1.0)) <= tol else []
    roots: list[float] = list(exact)
    for q in sorted(candidates):
        if abs(g(q)) > tol or any(abs(q - e) <= 1e-3 * e for e in exact):
            continue
        if any(abs(q - r) <= 1e-8 * q for r in roots):
            continue
        roots.append(q)
    roots.sort()
    return TLScanHit(labels, "roots", roots, [q_value(QContext(q), labels) for q in roots])


def _pairs(labs: list[SpinLabel]) -> Iterable[tuple[SpinLabel, SpinLabel]]:
    for a, b in itertools.combinations(labs, 2):
        # J1 >= J2, ties broken by the larger weight first
        yield (a, b) if (a.two_j, a.two_m) > (b.two_j, b.two_m) else (b, a)


def _check_spin(s, max_spin) -> None:
    if _dbl(s) > _dbl(max_spin) or _dbl(s) < 0:
        raise ValueError(f"spin {s} outside the supported range [0, {max_spin}]")


def _scan(groups, ctx: QContext | None, sweep: bool, q_range, grid) -> list[TLScanHit]:
    hits = []
    for labels in groups:
        if sweep:
            hit = tl_root_scan(labels, q_range, grid)
            if hit.mode == "all-q" or hit.q_points:
                hits.append(hit)
        elif is_tl(ctx, labels):
            hits.append(TLScanHit(tuple(labels), "roots", [ctx.q], [q_value(ctx, labels)]))
    return hits


def scan_vectors(s, ctx: QContext | None = None, *, sweep: bool = False,
                 q_range=DEFAULT_Q_RANGE, grid: int = DEFAULT_GRID,
                 max_spin=DEFAULT_MAX_SPIN) -> list[TLScanHit]:
    """TL vectors among ``|J, m>`` for spin S, at ``ctx.q`` or swept over ``q_range``."""
    _check_spin(s, max_spin)
    if not sweep and ctx is None:
        raise ValueError("a QContext is required unless sweep=True")
    return _scan([(lab,) for lab in spin_labels(s)], ctx, sweep, q_range, grid)


def scan_pairs(s, ctx: QContext | None = None, *, sweep: bool = False,
               q_range=DEFAULT_Q_RANGE, grid: int = DEFAULT_GRID,
               max_spin=DEFAULT_MAX_SPIN) -> list[TLScanHit]:
    """TL pairs (unordered, normalized to ``J1 >= J2``) for spin S."""
    _check_spin(s, max_spin)
    if not sweep and ctx is None:
        raise ValueError("a QContext is required unless sweep=True")
    return _scan(list(_pairs(spin_labels(s))), ctx, sweep, q_range, grid)


def pair_family(a: SpinLabel, b: SpinLabel) -> str | None:
    """Name (``"i"`` .. ``"v"``) of the spin-1, q = 1 TL pair family, if any."""
    if a.two_s != 2 or b.two_s != 2:
        return None
    (j1, m1), (j2, m2) = sorted([(a.j, a.m), (b.j, b.m)], reverse=True)
    if j1 == 1 and j2 == 1 and {m1, m2} == {1, -1}:
        return "i"
    if j1 == 1 and j2 == 1 and abs(m1 + m2) == 1 and 0 in (m1, m2):
        return "ii"
    if j1 == 2 and j2 == 1 and abs(m1) == 1 and m2 == -m1:
        return "iii"
    if j1 == 2 and j2 == 1 and abs(m1) == 1 and m2 == 0:
        return "iv"
    if j1 == 2 and j2 == 2 and {m1, m2} == {1, -1}:
        return "v"
    return None
