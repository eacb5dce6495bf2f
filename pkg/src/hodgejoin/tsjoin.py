"""Twisted exterior product of mixed Hodge structures with monodromy.

For exponents ``a1, a2`` in ``(-1, 0]`` the tensor of the two parts lands
at ``a1 + a2`` (plus one when ``a1 + a2 <= -1``), the Hodge filtration is
the convolution lowered by one in that case, and the weight filtration is
the convolution raised by 0, 1 or 2 according to whether ``a1 a2 = 0``,
neither case, or ``a1 + a2 = -1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .mhsm import (
    MHSM,
    Part,
    _require_valid,
    _tensor_part,
    join_parts,
)
from .monrep import as_exponent, reduce_exponent
from .qlinalg import (
    Matrix,
    Q,
    Rational,
    block_diag,
    convolve_filtrations,
    direct_sum_filtration,
    kron,
    qstr,
    shift_block,
)

__all__ = [
    "ShiftCase", "classify_case", "twisted_join",
    "beta_value", "beta_value_quadrature", "BetaTwist", "beta_twist_operator",
    "GradedModuleModel", "graded_direct_image_model",
]


# -- case split -----------------------------------------------------------------

@dataclass(frozen=True)
class ShiftCase:
    f_shift: int
    w_shift: int


def classify_case(alpha, beta) -> ShiftCase:
    """Hodge and weight shifts for the exponent pair; exact rational comparisons."""
    a, b = as_exponent(alpha), as_exponent(beta)
    f_shift = 1 if a + b <= -1 else 0
    if a * b == 0:
        w_shift = 0
    elif a + b == -1:
        w_shift = 2
    else:
        w_shift = 1
    return ShiftCase(f_shift, w_shift)


def _output_exponent(a1: Rational, a2: Rational) -> Rational:
    s = a1 + a2
    return s + 1 if s <= -1 else s


def twisted_join(m1: MHSM, m2: MHSM, method: str = "split") -> MHSM:
    """The twisted exterior product.

    ``method="split"`` works in bases adapted to both filtrations and adds
    labels; ``method="literal"`` forms the filtration steps as sums of
    tensor products of subspaces.  Both give the same structure.
    """
    if method not in ("split", "literal"):
        raise ValueError(f"unknown method {method!r}")
    _require_valid(m1)
    _require_valid(m2)
    groups: dict = {}
    for a1, p1 in m1.parts:
        for a2, p2 in m2.parts:
            case = classify_case(a1, a2)
            groups.setdefault(_output_exponent(a1, a2), []).append((p1, p2, case))
    out = {}
    for a, items in sorted(groups.items()):
        if method == "split":
            out[a] = join_parts([_tensor_part(p1, p2, c.f_shift, c.w_shift) for p1, p2, c in items])
        else:
            out[a] = _literal_part(items)
    return MHSM(out)


def _literal_part(items: list) -> Part:
    fs, ws, ns = [], [], []
    for p1, p2, c in items:
        fs.append(convolve_filtrations(p1.F, p2.F, -c.f_shift))
        ws.append(convolve_filtrations(p1.W, p2.W, c.w_shift))
        ns.append(kron(p1.N, Matrix.identity(p2.dim)) + kron(Matrix.identity(p1.dim), p2.N))
    f = fs[0] if len(fs) == 1 else direct_sum_filtration(fs)
    w = ws[0] if len(ws) == 1 else direct_sum_filtration(ws)
    n = ns[0] if len(ns) == 1 else block_diag(*ns)
    return Part(n.rows, f, w, n)


# -- beta function derivatives -------------------------------------------------------

def _check_domain(alpha, beta) -> tuple[Rational, Rational]:
    a, b = Q(alpha), Q(beta)
    if a <= -1 or b <= -1:
        raise ValueError(f"beta integral diverges for ({qstr(a)}, {qstr(b)}); exponents must exceed -1")
    return a, b


@lru_cache(maxsize=4096)
def _beta_derivs(a: Rational, b: Rational, imax: int, jmax: int) -> tuple:
    """Table ``G[i][j] = d_a^i d_b^j B(a, b)`` for the integral
    ``int_0^1 x^a (1-x)^b dx = Gamma(a+1) Gamma(b+1) / Gamma(a+b+2)``.

    The Leibniz sums cancel badly at higher orders, so they run in
    extended precision and are rounded once at the end."""
    with mpmath.workdps(40):
        x = mpmath.mpf(int(a.numerator)) / int(a.denominator) + 1
        y = mpmath.mpf(int(b.numerator)) / int(b.denominator) + 1
        pg = mpmath.polygamma
        # derivatives of log B: L[i][j] = d_a^i d_b^j log B for i + j >= 1
        L = [[mpmath.mpf(0)] * (jmax + 2) for _ in range(imax + 2)]
        for i in range(1, imax + 2):
            L[i][0] = pg(i - 1, x) - pg(i - 1, x + y)
        for j in range(1, jmax + 2):
            L[0][j] = pg(j - 1, y) - pg(j - 1, x + y)
        for i in range(1, imax + 2):
            for j in range(1, jmax + 2):
                L[i][j] = -pg(i + j - 1, x + y)
        G = [[mpmath.mpf(0)] * (jmax + 1) for _ in range(imax + 1)]
        G[0][0] = mpmath.exp(mpmath.loggamma(x) + mpmath.loggamma(y) - mpmath.loggamma(x + y))
        # G = exp(log B): d_a G = G d_a log B, expanded by Leibniz
        for j in range(0, jmax + 1):
            if j > 0:
                G[0][j] = mpmath.fsum(math.comb(j - 1, l) * L[0][l + 1] * G[0][j - 1 - l] for l in range(j))
            for i in range(0, imax):
                G[i + 1][j] = mpmath.fsum(
                    math.comb(i, k) * math.comb(j, l) * L[k + 1][l] * G[i - k][j - l]
                    for k in range(i + 1)
                    for l in range(j + 1)
                )
        return tuple(tuple(float(v) for v in row) for row in G)


def _beta_table(a: Rational, b: Rational, imax: int, jmax: int) -> tuple:
    # one cached table per (a, b) covers all the small orders at once
    return _beta_derivs(a, b, max(imax, 4), max(jmax, 4))


def beta_value(alpha, beta, i: int = 0, j: int = 0) -> float:
    """``d_alpha^i d_beta^j`` of ``int_0^1 x^alpha (1-x)^beta dx`` via polygamma values."""
    a, b = _check_domain(alpha, beta)
    if i < 0 or j < 0:
        raise ValueError("derivative orders must be nonnegative")
    return _beta_table(a, b, i, j)[i][j]


def beta_value_quadrature(alpha, beta, i: int = 0, j: int = 0, dps: int = 30) -> float:
    """Independent value by adaptive quadrature of
    ``x^alpha (1-x)^beta log(x)^i log(1-x)^j`` on ``[0, 1]``."""
    a, b = _check_domain(alpha, beta)
    with mpmath.workdps(dps):
        fa = mpmath.mpf(int(a.numerator)) / int(a.denominator)
        fb = mpmath.mpf(int(b.numerator)) / int(b.denominator)
        half = mpmath.mpf(1) / 2

        # x = u^r near 0 (and 1 - x = u^s near 1) turns the algebraic
        # endpoint singularity into a bounded power, leaving only log factors
        def piece(e_sing, e_other, k_sing, k_other):
            r = 1 / (e_sing + 1)

            def g(u):
                x = u ** r
                return r * u ** (r * (e_sing + 1) - 1) * (1 - x) ** e_other * (r * mpmath.log(u)) ** k_sing * mpmath.log(1 - x) ** k_other

            return mpmath.quad(g, [0, half ** (e_sing + 1)])

        val = piece(fa, fb, i, j) + piece(fb, fa, j, i)
    return float(val)


# -- the twist operator ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BetaTwist:
    alpha: Rational
    beta: Rational
    sizes: tuple
    block: np.ndarray
    nilpotent: np.ndarray

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.block))

    def commutator_norm(self) -> float:
        return float(np.abs(self.block @ self.nilpotent - self.nilpotent @ self.block).max(initial=0.0))


def _shift_np(n: int) -> np.ndarray:
    return np.array(shift_block(n).to_lists(), dtype=float)


def beta_twist_operator(alpha, beta, n1_size: int, n2_size: int) -> BetaTwist:
    """``sum_{i,j} B^{i,j}(alpha, beta) / (i! j!) (-N1)^i (x) (-N2)^j`` on a
    pair of Jordan blocks, times ``(alpha + beta + 1 - N)`` when
    ``alpha + beta > -1``."""
    a, b = as_exponent(alpha), as_exponent(beta)
    if n1_size < 1 or n2_size < 1:
        raise ValueError("block sizes must be positive")
    n1, n2 = _shift_np(n1_size), _shift_np(n2_size)
    G = _beta_table(a, b, n1_size - 1, n2_size - 1)
    size = n1_size * n2_size
    block = np.zeros((size, size), dtype=complex)
    p1 = np.eye(n1_size)
    for i in range(n1_size):
        p2 = np.eye(n2_size)
        for j in range(n2_size):
            block += G[i][j] / (math.factorial(i) * math.factorial(j)) * np.kron(p1, p2)
            p2 = p2 @ (-n2)
        p1 = p1 @ (-n1)
    nil = np.kron(n1, np.eye(n2_size)) + np.kron(np.eye(n1_size), n2)
    if classify_case(a, b).f_shift == 0:
        block = ((float(a + b) + 1.0) * np.eye(size) - nil) @ block
    diag = np.diag(block)
    if not np.all(np.isfinite(diag)) or np.any(np.abs(diag) == 0):
        raise ArithmeticError("beta twist is not invertible")
    return BetaTwist(a, b, (n1_size, n2_size), block, nil)


# -- graded direct image model ------------------------------------------------------------

@dataclass(frozen=True)
class GradedModuleModel:
    """Cokernel dimensions of ``d_1 - d_2`` on a truncated graded tensor module.

    ``dims`` maps each degree to the cokernel dimension there; ``interior``
    lists the degrees unaffected by the truncation and ``predicted`` the
    dimensions expected from the exponent decomposition of the join.
    """

    window: int
    dims: dict
    interior: tuple
    predicted: dict

    @property
    def matches(self) -> bool:
        return all(self.dims.get(d, 0) == self.predicted.get(d, 0) for d in self.interior)


def graded_direct_image_model(m1: MHSM, m2: MHSM, window: int) -> GradedModuleModel:
    """Model each factor as graded pieces ``M^{alpha - j}`` (``0 <= j < window``)
    joined by identity maps ``d: M^{beta} -> M^{beta - 1}`` and compute
    ``coker(d_1 - d_2)`` degree by degree on the tensor product.

    A degree is interior when for every pair of exponents in its class the
    total shift ``J`` satisfies ``1 <= J <= window - 1``, so that all pieces
    feeding it, and their preimages under both maps, lie in the window.
    """
    _require_valid(m1)
    _require_valid(m2)
    if window < 2:
        raise ValueError("window must be at least 2 to contain an interior degree")
    pieces1 = [(a, p.dim) for a, p in m1.parts]
    pieces2 = [(a, p.dim) for a, p in m2.parts]
    # source and target pieces: (pair index, j1, j2) with degree a1 + a2 - j1 - j2
    pairs = [(a1, d1, a2, d2) for a1, d1 in pieces1 for a2, d2 in pieces2]
    target_deg: dict = {}
    for idx, (a1, d1, a2, d2) in enumerate(pairs):
        for j1 in range(window):
            for j2 in range(window):
                target_deg.setdefault(a1 + a2 - j1 - j2, []).append((idx, j1, j2))
    dims = {}
    for deg, targets in target_deg.items():
        tpos, off = {}, 0
        for key in targets:
            tpos[key] = off
            off += pairs[key[0]][1] * pairs[key[0]][3]
        n_target = off
        # sources in degree deg + 1 map into degree deg
        cols = []
        for idx, (a1, d1, a2, d2) in enumerate(pairs):
            size = d1 * d2
            for j1 in range(window):
                j2 = a1 + a2 - j1 - (deg + 1)
                if j2 != int(j2) or not 0 <= j2 < window:
                    continue
                j2 = int(j2)
                for e in range(size):
                    col = {}
                    t1 = tpos.get((idx, j1 + 1, j2))
                    if t1 is not None:
                        col[t1 + e] = Q(1)
                    t2 = tpos.get((idx, j1, j2 + 1))
                    if t2 is not None:
                        col[t2 + e] = Q(-1)
                    cols.append(col)
        rank = Matrix.from_columns(cols, n_target).rank() if cols else 0
        dims[deg] = n_target - rank
    interior = []
    for deg in dims:
        shifts = [a1 + a2 - deg for a1, _, a2, _ in pairs if (a1 + a2 - deg).denominator == 1]
        if shifts and all(1 <= s <= window - 1 for s in shifts):
            interior.append(deg)
    interior.sort()
    joined = twisted_join(m1, m2)
    predicted = {}
    for deg in interior:
        part = joined.part(reduce_exponent(deg))
        predicted[deg] = part.dim if part is not None else 0
    return GradedModuleModel(window, dict(sorted(dims.items())), tuple(interior), predicted)
