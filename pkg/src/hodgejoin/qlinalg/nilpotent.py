"""Nilpotent operators: Jordan types, monodromy weight filtrations, and the
multiplicative Jordan decomposition of an invertible matrix."""
from __future__ import annotations

from dataclasses import dataclass

from .matrix import ONE, Matrix, Q
from .poly import charpoly, pderiv, peval_matrix, squarefree_part
from .subspace import Filtration, Subspace, preimage


class NotNilpotentError(ValueError):
    pass


def rank_sequence(m: Matrix, limit: int | None = None) -> list[int]:
    """Ranks of ``m^0, m^1, ...`` up to the first repeat."""
    if not m.is_square:
        raise ValueError("rank sequence needs a square matrix")
    n = m.rows
    ranks = [n]
    if n == 0:
        return [0, 0]
    f = m.to_flint()
    power = f
    while True:
        ranks.append(power.rank())
        if ranks[-1] == ranks[-2] or (limit is not None and len(ranks) > limit):
            return ranks
        power = power * f


def partition_from_ranks(ranks: list[int]) -> tuple[int, ...]:
    """Jordan block sizes (of the nilpotent part) from ranks of successive powers.

    ``#{blocks >= j} = rank(N^{j-1}) - rank(N^j)``; a stabilised tail of
    nonzero rank belongs to an invertible summand and is ignored.
    """
    at_least = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))]
    sizes = []
    for j, cnt in enumerate(at_least, start=1):
        nxt = at_least[j] if j < len(at_least) else 0
        sizes.extend([j] * (cnt - nxt))
    return tuple(sorted(sizes, reverse=True))


@dataclass(frozen=True, eq=False)
class NilpotentOp:
    """A nilpotent endomorphism of ``Q^dim``; construction checks nilpotency."""

    matrix: Matrix

    def __post_init__(self):
        m = self.matrix
        if not m.is_square:
            raise ValueError("nilpotent operator must be square")
        ranks = rank_sequence(m)
        if ranks[-1] != 0:
            raise NotNilpotentError(f"matrix is not nilpotent (powers stabilise at rank {ranks[-1]})")
        object.__setattr__(self, "_ranks", tuple(ranks))

    @property
    def dim(self) -> int:
        return self.matrix.rows

    @property
    def ranks(self) -> tuple[int, ...]:
        return self._ranks

    @property
    def index(self) -> int:
        """Smallest ``l`` with ``N^l = 0``."""
        return len(self._ranks) - 2 if self.dim else 0

    def __eq__(self, other):
        return isinstance(other, NilpotentOp) and self.matrix == other.matrix

    __hash__ = None


def _as_nilpotent(n) -> NilpotentOp:
    return n if isinstance(n, NilpotentOp) else NilpotentOp(n)


def jordan_partition(n) -> tuple[int, ...]:
    """Jordan block sizes of a nilpotent operator, largest first."""
    op = _as_nilpotent(n)
    return partition_from_ranks(list(op.ranks))


def weight_filtration_of_N(n, center: int) -> Filtration:
    """Monodromy weight filtration of ``N`` centered at ``center``.

    Inductive construction on subquotients ``K/I``: if ``l`` is the
    nilpotency index of the induced operator minus one, then
    ``W_{c+l} = K``, ``W_{c-l-1} = I``, ``W_{c-l} = N^l K + I`` and
    ``W_{c+l-1} = {v in K : N^l v in I}``, and one recurses on the middle.
    """
    op = _as_nilpotent(n)
    N = op.matrix
    dim = op.dim
    steps: dict[int, Subspace] = {}
    if dim == 0:
        return Filtration(0, {})
    K = Subspace.full(dim)
    I = Subspace.zero(dim)
    c = int(center)
    while K.dim > I.dim:
        # l = largest exponent with N^l K not inside I
        l = 0
        img = K
        while True:
            nxt = img.image(N) + I
            if nxt == I:
                break
            img = nxt
            l += 1
        if l == 0:
            steps[c - 1] = I
            steps[c] = K
            break
        low = img  # N^l K + I
        high = preimage(N ** l, I, K)
        steps[c - l - 1] = I
        steps[c - l] = low
        steps[c + l - 1] = high
        steps[c + l] = K
        I, K = low, high
    # each pass only writes indices strictly inside the previous window
    return Filtration(dim, steps)


def check_monodromy_filtration(W: Filtration, n, center: int) -> list[str]:
    """Independent test of the defining properties of ``W(N)`` centered at ``center``.

    Checks ``N W_k <= W_{k-2}`` and that ``N^j`` induces an isomorphism
    ``Gr_{c+j} -> Gr_{c-j}`` for every ``j >= 0``.
    """
    N = n.matrix if isinstance(n, NilpotentOp) else n
    problems = []
    jumps = W.jumps()
    if not jumps:
        return problems
    lo, hi = jumps[0], jumps[-1]
    for k in range(lo, hi + 1):
        if not W[k].image(N) <= W[k - 2]:
            problems.append(f"N W_{k} not inside W_{k - 2}")
    c = int(center)
    span = max(abs(hi - c), abs(c - lo)) + 1
    for j in range(0, span + 1):
        top, bottom = c + j, c - j
        gtop = W[top].dim - W[top - 1].dim
        gbot = W[bottom].dim - W[bottom - 1].dim
        if gtop != gbot:
            problems.append(f"dim Gr_{top} = {gtop} but dim Gr_{bottom} = {gbot}")
            continue
        if not gtop:
            continue
        Nj = N ** j
        # complement of W_{top-1} inside W_{top}
        comp: list[dict] = []
        acc = W[top - 1]
        for v in W[top].sparse_basis():
            if acc.reduce(v):
                comp.append(v)
                acc = acc + Subspace(acc.ambient_dim, [v])
        images = Subspace(N.rows, [W[bottom - 1].reduce(Nj.apply(v)) for v in comp] + W[bottom - 1].sparse_basis())
        if images.dim != W[bottom - 1].dim + gtop:
            problems.append(f"N^{j} is not injective on Gr_{top}")
    return problems


def nilpotent_log(u: Matrix) -> Matrix:
    """``log(u)`` for a unipotent matrix, as the terminating series in ``u - 1``."""
    n = u.rows
    x = u - Matrix.identity(n)
    out = Matrix.zeros(n)
    power = Matrix.identity(n)
    k = 1
    while True:
        power = power @ x
        if power.is_zero():
            return out
        if k > n:
            raise NotNilpotentError("matrix is not unipotent")
        term = power * Q((-1) ** (k + 1)) * (ONE / k)
        out = out + term
        k += 1


def nilpotent_exp(nmat: Matrix) -> Matrix:
    n = nmat.rows
    out = Matrix.identity(n)
    power = Matrix.identity(n)
    fact = ONE
    k = 1
    while True:
        power = power @ nmat
        if power.is_zero():
            return out
        if k > n:
            raise NotNilpotentError("matrix is not nilpotent")
        fact *= k
        out = out + power * (ONE / fact)
        k += 1


def semisimple_unipotent_parts(t: Matrix) -> tuple[Matrix, Matrix]:
    """Multiplicative Jordan decomposition ``t = t_s t_u`` over Q.

    ``t_s`` is obtained by Newton iteration ``s <- s - P(s) P'(s)^{-1}`` on
    the squarefree part ``P`` of the characteristic polynomial, starting at
    ``t``; every iterate is a polynomial in ``t`` so the parts commute.
    """
    if not t.is_square:
        raise ValueError("Jordan decomposition of a non-square matrix")
    n = t.rows
    if n == 0:
        return t, t
    if t.rank() < n:
        raise ZeroDivisionError("matrix is singular")
    P = squarefree_part(charpoly(t))
    dP = pderiv(P)
    s = t
    for _ in range(n.bit_length() + 2):
        ps = peval_matrix(P, s)
        if ps.is_zero():
            break
        s = s - ps @ peval_matrix(dP, s).inverse()
    else:
        if not peval_matrix(P, s).is_zero():
            raise ArithmeticError("Newton iteration for the semisimple part did not converge")
    t_u = s.inverse() @ t
    return s, t_u
