"""Mixed Hodge structures with monodromy at a point.

An :class:`MHSM` is a finite collection of parts indexed by eigenvalue
exponents ``alpha`` in ``(-1, 0]``.  Each part is a rational vector space
with an increasing Hodge filtration ``F``, an increasing weight filtration
``W`` and a nilpotent ``N`` satisfying ``N W_k <= W_{k-2}`` and
``N F_p <= F_{p+1}``.

Spectral pairs use ``s = -(alpha + p)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .monrep import as_exponent, reduce_exponent
from .qlinalg import (
    Echelon,
    Filtration,
    Matrix,
    NilpotentOp,
    NotNilpotentError,
    Q,
    Rational,
    Subspace,
    block_diag,
    jordan_partition,
    kron,
    qstr,
    shift_block,
)
from .qlinalg.matrix import ZERO

__all__ = [
    "Part", "MHSM", "ElementaryBlock", "SpectralPairs", "InvalidMHSMError",
    "bisplit", "validate", "from_blocks", "graded_dims", "spectral_pairs",
    "tensor_plain", "iso_invariants", "blocks_from_invariants", "join_parts",
]


class InvalidMHSMError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Part:
    """One eigenvalue part: ``(F, W, N)`` on ``Q^dim``."""

    dim: int
    F: Filtration
    W: Filtration
    N: Matrix

    def __eq__(self, other):
        if not isinstance(other, Part):
            return NotImplemented
        return self.dim == other.dim and self.N == other.N and self.F == other.F and self.W == other.W

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MHSM:
    """Parts keyed by exponent, stored sorted; zero-dimensional parts are dropped."""

    parts: tuple = ()

    def __init__(self, parts: Mapping | Iterable = ()):
        items = parts.items() if isinstance(parts, Mapping) else parts
        clean = []
        seen = set()
        for a, p in items:
            a = as_exponent(a)
            if a in seen:
                raise ValueError(f"duplicate part alpha={qstr(a)}")
            seen.add(a)
            if p.dim:
                clean.append((a, p))
        object.__setattr__(self, "parts", tuple(sorted(clean, key=lambda x: x[0])))

    @classmethod
    def zero(cls) -> "MHSM":
        return cls(())

    @property
    def alphas(self) -> tuple[Rational, ...]:
        return tuple(a for a, _ in self.parts)

    def part(self, alpha) -> Part | None:
        alpha = Q(alpha)
        for a, p in self.parts:
            if a == alpha:
                return p
        return None

    @property
    def dim(self) -> int:
        return sum(p.dim for _, p in self.parts)

    def __eq__(self, other):
        if not isinstance(other, MHSM):
            return NotImplemented
        return self.parts == other.parts

    __hash__ = None

    def __repr__(self) -> str:
        inner = ", ".join(f"{qstr(a)}: dim {p.dim}" for a, p in self.parts)
        return f"MHSM({{{inner}}})"


@dataclass(frozen=True)
class ElementaryBlock:
    """``mult`` copies of a ``k``-dimensional block with one Jordan block of ``N``.

    Basis vector ``e_i`` (``0 <= i < k``, ``N e_i = e_{i+1}``) has Hodge
    index ``p + (k-1-i)`` and weight ``w + 2(k-1-i)``; the weights are
    centered at ``w + k - 1``.
    """

    alpha: Rational
    p: int
    w: int
    k: int = 1
    mult: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_exponent(self.alpha))
        if self.k < 1:
            raise ValueError("block length k must be positive")
        if self.mult < 1:
            raise ValueError("block multiplicity must be positive")

    @property
    def dim(self) -> int:
        return self.k * self.mult

    def key(self) -> tuple:
        return (self.alpha, self.p, self.w, self.k)

    def to_json(self) -> list:
        return [qstr(self.alpha), self.p, self.w, self.k, self.mult]


# -- common splittings ------------------------------------------------------

def bisplit(F: Filtration, W: Filtration) -> tuple[list[int], list[int], Matrix | None]:
    """A basis adapted to both ``F`` and ``W``.

    Returns Hodge labels, weight labels and the basis (as columns, ``None``
    for the standard basis).  In general the vectors for ``(p, w)`` are a
    complement of ``F_{p-1} W_w + F_p W_{w-1}`` in ``F_p W_w``.
    """
    n = F.ambient_dim
    if W.ambient_dim != n:
        raise ValueError("filtrations live on different spaces")
    fb, wb = F.basis, W.basis
    if fb is None and wb is None:
        return list(F.labels), list(W.labels), None
    if fb is not None and fb is wb:
        return list(F.labels), list(W.labels), fb
    fj, wj = F.jumps(), W.jumps()
    vecs, pl, wl = [], [], []
    ech = Echelon(n)
    for p in fj:
        for w in wj:
            inner = F[p] & W[w]
            for v in inner.sparse_basis():
                if ech.add(v):
                    vecs.append(v)
                    pl.append(p)
                    wl.append(w)
    if len(vecs) != n:
        raise ArithmeticError("failed to find a common splitting")
    return pl, wl, Matrix.from_columns(vecs, n)


def _in_basis(n: Matrix, basis: Matrix | None) -> Matrix:
    return n if basis is None else basis.inverse() @ n @ basis


# -- validation ----------------------------------------------------------------

def _part_violations(alpha, part: Part) -> list[str]:
    tag = f"part alpha={qstr(alpha)}"
    out = []
    d = part.dim
    if d < 0:
        return [f"{tag}: negative dimension"]
    if part.N.shape != (d, d):
        out.append(f"{tag}: N has shape {part.N.shape}, expected {(d, d)}")
    for name, filt in (("F", part.F), ("W", part.W)):
        if filt.ambient_dim != d:
            out.append(f"{tag}: {name} lives in dimension {filt.ambient_dim}, expected {d}")
            continue
        for msg in filt.violations():
            if msg.startswith("not increasing"):
                out.append(f"{tag}: {name} monotonicity violated ({msg})")
            else:
                out.append(f"{tag}: {name} exhaustiveness violated ({msg})")
    if out:
        return out
    if part.N.is_zero():
        return out
    try:
        NilpotentOp(part.N)
    except NotNilpotentError:
        return [f"{tag}: N is not nilpotent"]
    pl, wl, basis = bisplit(part.F, part.W)
    n = _in_basis(part.N, basis)
    bad_w = bad_f = False
    for i in range(d):
        for j, _ in n.row_items(i):
            # column j is a basis vector; row i a component of its image
            if wl[i] > wl[j] - 2:
                bad_w = True
            if pl[i] > pl[j] + 1:
                bad_f = True
    if bad_w:
        out.append(f"{tag}: N W_k is not inside W_(k-2)")
    if bad_f:
        out.append(f"{tag}: N F_p is not inside F_(p+1)")
    return out


def validate(m: MHSM) -> list[str]:
    """All violated invariants, each naming the part and the condition."""
    out = []
    for a, p in m.parts:
        out.extend(_part_violations(a, p))
    return out


def _require_valid(m: MHSM) -> None:
    bad = validate(m)
    if bad:
        raise InvalidMHSMError("; ".join(bad))


# -- construction from blocks ------------------------------------------------------

def _block_part(blocks: list[ElementaryBlock]) -> Part:
    fl, wl, ns = [], [], []
    for b in blocks:
        for _ in range(b.mult):
            fl.extend(b.p + (b.k - 1 - i) for i in range(b.k))
            wl.extend(b.w + 2 * (b.k - 1 - i) for i in range(b.k))
            ns.append(shift_block(b.k))
    d = len(fl)
    return Part(d, Filtration.from_labels(d, fl), Filtration.from_labels(d, wl), block_diag(*ns))


def from_blocks(blocks: Iterable[ElementaryBlock]) -> MHSM:
    """Direct sum of elementary blocks, grouped by exponent and sorted."""
    groups: dict = {}
    for b in blocks:
        groups.setdefault(b.alpha, []).append(b)
    return MHSM({a: _block_part(sorted(bs, key=lambda b: (b.p, b.w, b.k, b.mult))) for a, bs in groups.items()})


# -- invariants ------------------------------------------------------------------------

def _part_graded(part: Part) -> Counter:
    pl, wl, _ = bisplit(part.F, part.W)
    return Counter(zip(pl, wl))


def graded_dims(m: MHSM) -> dict:
    """``{(alpha, p, w): dim Gr^F_p Gr^W_w}``, sorted."""
    _require_valid(m)
    out = {}
    for a, part in m.parts:
        for (p, w), d in sorted(_part_graded(part).items()):
            out[(a, p, w)] = d
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class SpectralPairs:
    """Sorted multiset of ``(s, w)`` with multiplicities."""

    pairs: tuple = ()

    def __init__(self, pairs: Mapping | Iterable = ()):
        acc: Counter = Counter()
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        for item in items:
            if len(item) == 2 and isinstance(item[0], tuple):
                (s, w), c = item
            else:
                s, w, c = item
            if c:
                acc[(Q(s), int(w))] += int(c)
        object.__setattr__(self, "pairs", tuple((s, w, acc[(s, w)]) for s, w in sorted(acc)))

    @property
    def total(self) -> int:
        return sum(c for _, _, c in self.pairs)

    def spectrum(self) -> Counter:
        out: Counter = Counter()
        for s, _, c in self.pairs:
            out[s] += c
        return out

    def as_counter(self) -> Counter:
        return Counter({(s, w): c for s, w, c in self.pairs})

    def to_rows(self) -> list[list]:
        return [[qstr(s), w, c] for s, w, c in self.pairs]

    def __str__(self) -> str:
        return "{" + ", ".join(f"({qstr(s)},{w})" + (f"x{c}" if c > 1 else "") for s, w, c in self.pairs) + "}"


def spectral_pairs(m: MHSM) -> SpectralPairs:
    """Each ``Gr^F_p Gr^W_w`` of part ``alpha`` contributes ``(-(alpha + p), w)``."""
    acc: Counter = Counter()
    for (a, p, w), d in graded_dims(m).items():
        acc[(-(a + p), w)] += d
    return SpectralPairs(acc)


def _image_table(part: Part) -> dict:
    """``{(j, w, q): dim Gr^F_q image(N^j : Gr^W_w -> Gr^W_{w-2j})}``."""
    pl, wl, basis = bisplit(part.F, part.W)
    d = part.dim
    table: Counter = Counter()
    for p, w in zip(pl, wl):
        table[(0, w, p)] += 1
    if part.N.is_zero():
        return dict(table)
    n = _in_basis(part.N, basis)
    by_w: dict = {}
    for i, w in enumerate(wl):
        by_w.setdefault(w, []).append(i)
    cols = n.columns()
    power_cols = [dict(c) for c in cols]  # columns of N^j, starting at j = 1
    j = 1
    while any(power_cols):
        for w, idx in by_w.items():
            target = w - 2 * j
            tgt = [i for i in by_w.get(target, [])]
            if not tgt:
                continue
            # order target coordinates by decreasing Hodge index
            order = sorted(tgt, key=lambda i: -pl[i])
            pos = {i: r for r, i in enumerate(order)}
            ech = Echelon(len(order))
            for c in idx:
                ech.add({pos[i]: x for i, x in power_cols[c].items() if i in pos})
            for piv in ech.pivots():
                table[(j, w, pl[order[piv]])] += 1
        # next power: N^{j+1} e_c = N (N^j e_c)
        nxt = []
        for c in power_cols:
            acc: dict = {}
            for i, x in c.items():
                for r, y in cols[i].items():
                    v = acc.get(r, ZERO) + x * y
                    if v:
                        acc[r] = v
                    else:
                        acc.pop(r, None)
            nxt.append(acc)
        power_cols = nxt
        j += 1
        if j > d:
            break
    return dict(table)


def iso_invariants(m: MHSM) -> tuple:
    """Isomorphism certificate: per exponent, the dimension, the graded
    dimensions, the Jordan partition of ``N`` and the Hodge-graded ranks of
    ``N^j`` between weight-graded pieces.

    Two split structures have equal certificates exactly when their block
    multisets agree (see :func:`blocks_from_invariants`).
    """
    _require_valid(m)
    out = []
    for a, part in m.parts:
        graded = tuple(sorted(_part_graded(part).items()))
        jordan = (1,) * part.dim if part.N.is_zero() else jordan_partition(part.N)
        images = tuple(sorted(_image_table(part).items()))
        out.append((a, part.dim, graded, jordan, images))
    return tuple(out)


def blocks_from_invariants(cert: tuple) -> list[ElementaryBlock]:
    """Recover the elementary blocks of a split structure from its certificate.

    With ``C(t, h, q)`` the Hodge-graded rank of ``N^{(h-t)/2}`` from weight
    ``h`` to weight ``t``, the number of blocks spanning weights ``t..h``
    whose bottom vector has Hodge index ``q`` is
    ``C(t,h,q) - C(t-2,h,q-1) - C(t,h+2,q) + C(t-2,h+2,q-1)``.
    """
    blocks = []
    for a, _, _, _, images in cert:
        c = dict(images)

        def C(t, h, q):
            return c.get(((h - t) // 2, h, q), 0)

        for (j, h, q) in sorted(c):
            t = h - 2 * j
            e = C(t, h, q) - C(t - 2, h, q - 1) - C(t, h + 2, q) + C(t - 2, h + 2, q - 1)
            if e < 0:
                raise ArithmeticError("certificate is not that of a split structure")
            if e:
                blocks.append(ElementaryBlock(a, q, t, j + 1, e))
    return sorted(blocks, key=lambda b: (b.alpha, b.p, b.w, b.k))


# -- tensor products --------------------------------------------------------------------

def _tensor_part(p1: Part, p2: Part, f_shift: int, w_shift: int) -> tuple:
    """Labels, basis and ``N`` of the tensor product of two parts, with the
    Hodge labels lowered by ``f_shift`` and the weights raised by ``w_shift``."""
    fl1, wl1, b1 = bisplit(p1.F, p1.W)
    fl2, wl2, b2 = bisplit(p2.F, p2.W)
    fl = [x + y - f_shift for x in fl1 for y in fl2]
    wl = [x + y + w_shift for x in wl1 for y in wl2]
    if b1 is None and b2 is None:
        basis = None
    else:
        basis = kron(b1 if b1 is not None else Matrix.identity(p1.dim), b2 if b2 is not None else Matrix.identity(p2.dim))
    if p1.N.is_zero() and p2.N.is_zero():
        n = Matrix.zeros(p1.dim * p2.dim)
    else:
        n = kron(p1.N, Matrix.identity(p2.dim)) + kron(Matrix.identity(p1.dim), p2.N)
    return fl, wl, basis, n


def join_parts(pieces: list[tuple]) -> Part:
    """Direct sum of ``(fl, wl, basis, N)`` pieces as one labelled part."""
    fl, wl, ns, bases = [], [], [], []
    for f, w, b, n in pieces:
        fl.extend(f)
        wl.extend(w)
        ns.append(n)
        bases.append(b)
    d = len(fl)
    if all(b is None for b in bases):
        basis = None
    else:
        basis = block_diag(*[b if b is not None else Matrix.identity(n.rows) for b, n in zip(bases, ns)])
    n = ns[0] if len(ns) == 1 else block_diag(*ns)
    return Part(d, Filtration.from_labels(d, fl, basis), Filtration.from_labels(d, wl, basis), n)


def tensor_plain(m1: MHSM, m2: MHSM) -> MHSM:
    """Untwisted tensor product: exponents add and reduce, filtrations
    convolve without shifts, ``N = N1 (x) 1 + 1 (x) N2``."""
    _require_valid(m1)
    _require_valid(m2)
    groups: dict = {}
    for a1, p1 in m1.parts:
        for a2, p2 in m2.parts:
            a = reduce_exponent(a1 + a2)
            groups.setdefault(a, []).append(_tensor_part(p1, p2, 0, 0))
    return MHSM({a: join_parts(pieces) for a, pieces in groups.items()})


# -- JSON ----------------------------------------------------------------------------------

def _filtration_json(f: Filtration) -> dict:
    return {
        str(k): [[qstr(x) for x in row] for row in s.basis()]
        for k, s in f.normalized_steps().items()
    }


def _filtration_from_json(d: int, data: Mapping) -> Filtration:
    steps = {}
    for k in sorted(data, key=int):
        rows = data[k]
        for r in rows:
            if len(r) != d:
                raise ValueError(f"filtration step {k} has a vector of length {len(r)}, expected {d}")
        steps[int(k)] = Subspace(d, [[Q(x) for x in r] for r in rows])
    return Filtration(d, steps)


def to_json(m: MHSM, blocks: Iterable[ElementaryBlock] | None = None) -> dict:
    out: dict = {"parts": []}
    for a, p in m.parts:
        out["parts"].append({
            "alpha": qstr(a),
            "dim": p.dim,
            "F": _filtration_json(p.F),
            "W": _filtration_json(p.W),
            "N": [[qstr(x) for x in row] for row in p.N.to_lists()],
        })
    if blocks is not None:
        out["blocks"] = [b.to_json() for b in blocks]
    return out


def from_json(data: Mapping) -> MHSM:
    """Parse the JSON form; a ``blocks`` array alone is expanded with :func:`from_blocks`.

    When both are present the explicit parts win and the blocks must agree
    with them up to isomorphism.
    """
    if not isinstance(data, Mapping):
        raise ValueError("MHSM JSON must be an object")
    blocks = None
    if "blocks" in data:
        blocks = []
        for entry in data["blocks"]:
            if len(entry) not in (4, 5):
                raise ValueError(f"block entry {entry!r} needs [alpha, p, w, k] or [alpha, p, w, k, mult]")
            alpha, p, w, k = entry[:4]
            mult = entry[4] if len(entry) == 5 else 1
            blocks.append(ElementaryBlock(Q(alpha), int(p), int(w), int(k), int(mult)))
    if "parts" not in data:
        if blocks is None:
            raise ValueError("MHSM JSON needs 'parts' or 'blocks'")
        return from_blocks(blocks)
    parts = {}
    for entry in data["parts"]:
        d = int(entry["dim"])
        n_rows = entry.get("N", [])
        if d and not n_rows:
            n = Matrix.zeros(d)
        else:
            n = Matrix.from_rows([[Q(x) for x in r] for r in n_rows], cols=d)
        parts[Q(entry["alpha"])] = Part(d, _filtration_from_json(d, entry["F"]), _filtration_from_json(d, entry["W"]), n)
    m = MHSM(parts)
    if blocks is not None and not validate(m) and iso_invariants(m) != iso_invariants(from_blocks(blocks)):
        raise ValueError("'blocks' shorthand disagrees with the explicit parts")
    return m
