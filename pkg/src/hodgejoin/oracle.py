"""Brieskorn-Pham ground truth by direct enumeration of the monomial basis.

For ``f = x_1^{a_1} + ... + x_n^{a_n}`` the Milnor algebra has the basis
``x^{k-1}`` with ``1 <= k_i <= a_i - 1``, and the monomial with exponent
vector ``k - 1`` contributes the spectral value ``sum k_i / a_i``.  The
monodromy is of finite order, so ``N = 0`` and the weight is ``n - 1`` for
non-integral values and ``n`` for integral ones.

Nothing here uses the join.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Iterable, Sequence

from .mhsm import MHSM, ElementaryBlock, from_blocks
from .qlinalg import Q, Rational

__all__ = ["BPExponents", "bp_spectrum", "bp_mhsm", "milnor_number", "symmetry_check"]


class BPExponents(tuple):
    """Exponents ``(a_1, ..., a_n)``, each an integer at least 2."""

    def __new__(cls, exps: Iterable[int]):
        vals = []
        for a in exps:
            if isinstance(a, bool) or not isinstance(a, int):
                try:
                    a = int(str(a))
                except ValueError:
                    raise ValueError(f"exponent {a!r} is not an integer") from None
            if a < 2:
                raise ValueError(f"exponent {a} is below 2")
            vals.append(a)
        if not vals:
            raise ValueError("need at least one exponent")
        return super().__new__(cls, vals)

    @property
    def n(self) -> int:
        return len(self)


def _as_exps(e) -> BPExponents:
    return e if isinstance(e, BPExponents) else BPExponents(e)


def milnor_number(e: Sequence[int]) -> int:
    return math.prod(a - 1 for a in _as_exps(e))


def bp_spectrum(e: Sequence[int]) -> Counter:
    """Multiset ``{sum k_i / a_i}`` over ``1 <= k_i <= a_i - 1``."""
    e = _as_exps(e)
    out: Counter = Counter()
    for ks in itertools.product(*(range(1, a) for a in e)):
        out[sum((Q(k) / a for k, a in zip(ks, e)), Q(0))] += 1
    return Counter(dict(sorted(out.items())))


def bp_mhsm(e: Sequence[int]) -> MHSM:
    """One block per spectral value: ``alpha = -frac(s)``, ``p = -(s + alpha)``,
    weight ``n - 1`` or ``n``, ``k = 1``."""
    e = _as_exps(e)
    n = e.n
    blocks = []
    for s, mult in bp_spectrum(e).items():
        frac = s - math.floor(s)
        alpha = -frac
        p = -(s + alpha)
        assert p.denominator == 1
        w = n if frac == 0 else n - 1
        blocks.append(ElementaryBlock(alpha, int(p), w, 1, mult))
    return from_blocks(blocks)


def symmetry_check(sp: Counter | Iterable[Rational], n: int) -> bool:
    """True when the multiset is invariant under ``s -> n - s``."""
    c = sp if isinstance(sp, Counter) else Counter(Q(s) for s in sp)
    return all(c[s] == c.get(n - s, 0) for s in c)
