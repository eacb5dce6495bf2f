"""Subspaces of Q^n in canonical RREF form, and increasing filtrations."""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .matrix import ONE, ZERO, Echelon, Matrix, Q, Rational


def _as_sparse(v) -> dict:
    if isinstance(v, dict):
        return {j: Q(x) for j, x in v.items() if x}
    return {j: Q(x) for j, x in enumerate(v) if x}


class Subspace:
    """A linear subspace of ``Q^ambient_dim``.

    The basis is kept in reduced row-echelon form, so two subspaces are equal
    exactly when their stored rows are equal.
    """

    __slots__ = ("ambient_dim", "_rows", "_pivots", "_lookup", "_coord")

    def __init__(self, ambient_dim: int, rows: Sequence[dict] = (), *, _trusted: bool = False):
        self.ambient_dim = ambient_dim
        if not _trusted:
            ech = Echelon(ambient_dim)
            for r in rows:
                r = _as_sparse(r)
                if r and (min(r) < 0 or max(r) >= ambient_dim):
                    raise ValueError("vector index outside the ambient space")
                ech.add(r)
            rows = ech.basis()
        self._rows = tuple(rows)
        self._pivots = tuple(min(r) for r in self._rows)
        self._lookup = None
        self._coord = None

    # -- constructors -------------------------------------------------
    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable) -> "Subspace":
        return cls(ambient_dim, list(vectors))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, (), _trusted=True)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls.coordinate(ambient_dim, range(ambient_dim))

    @classmethod
    def coordinate(cls, ambient_dim: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        if idx and (idx[0] < 0 or idx[-1] >= ambient_dim):
            raise ValueError("coordinate index outside the ambient space")
        s = cls(ambient_dim, [{i: ONE} for i in idx], _trusted=True)
        s._coord = True
        return s

    @classmethod
    def column_space(cls, m: Matrix) -> "Subspace":
        return cls(m.rows, m.columns())

    @classmethod
    def from_echelon(cls, ech: Echelon) -> "Subspace":
        return cls(ech.ncols, [dict(r) for r in ech.basis()], _trusted=True)

    # -- basic data ---------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    @property
    def is_coordinate(self) -> bool:
        if self._coord is None:
            self._coord = all(len(r) == 1 for r in self._rows)
        return self._coord

    def basis(self) -> list[tuple[Rational, ...]]:
        n = self.ambient_dim
        return [tuple(r.get(j, ZERO) for j in range(n)) for r in self._rows]

    def sparse_basis(self) -> list[dict]:
        return [dict(r) for r in self._rows]

    def basis_matrix(self) -> Matrix:
        """Basis vectors as the rows of a matrix."""
        return Matrix(self.dim, self.ambient_dim, [dict(r) for r in self._rows])

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self._pivots == other._pivots
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self._pivots, tuple(frozenset(r.items()) for r in self._rows)))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    # -- membership ---------------------------------------------------
    def _table(self) -> dict:
        if self._lookup is None:
            self._lookup = dict(zip(self._pivots, self._rows))
        return self._lookup

    def reduce(self, v) -> dict:
        """Canonical remainder of ``v`` modulo this subspace."""
        v = _as_sparse(v)
        table = self._table()
        for p in [p for p in v if p in table]:
            c = v.get(p)
            if c:
                for j, x in table[p].items():
                    y = v.get(j, ZERO) - c * x
                    if y:
                        v[j] = y
                    else:
                        v.pop(j, None)
        return v

    def contains(self, v) -> bool:
        if isinstance(v, Subspace):
            return v <= self
        return not self.reduce(v)

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(
                f"ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        if self.dim > other.dim:
            return False
        if self.is_coordinate and other.is_coordinate:
            return set(self._pivots) <= set(other._pivots)
        return all(not other.reduce(r) for r in self._rows)

    def __ge__(self, other: "Subspace") -> bool:
        return other <= self

    # -- lattice operations -------------------------------------------
    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.is_coordinate and other.is_coordinate:
            return Subspace.coordinate(self.ambient_dim, set(self._pivots) | set(other._pivots))
        big, small = (self, other) if self.dim >= other.dim else (other, self)
        ech = Echelon(self.ambient_dim)
        ech.rows = {p: dict(r) for p, r in zip(big._pivots, big._rows)}
        for r in small._rows:
            ech.add(r)
        return Subspace.from_echelon(ech)

    def __and__(self, other: "Subspace") -> "Subspace":
        """Intersection by the Zassenhaus sum/intersection algorithm."""
        self._check(other)
        n = self.ambient_dim
        if self.is_coordinate and other.is_coordinate:
            return Subspace.coordinate(n, set(self._pivots) & set(other._pivots))
        if not self.dim or not other.dim:
            return Subspace.zero(n)
        ech = Echelon(2 * n)
        for r in self._rows:
            row = dict(r)
            row.update({n + j: x for j, x in r.items()})
            ech.add(row)
        for r in other._rows:
            ech.add(dict(r))
        inter = [
            {j - n: x for j, x in row.items()}
            for p, row in ech.rows.items()
            if p >= n
        ]
        return Subspace(n, inter)

    intersect = __and__

    def tensor(self, other: "Subspace") -> "Subspace":
        """``self (x) other`` inside the Kronecker-ordered tensor space.

        Kronecker products of RREF rows are again RREF once sorted by pivot.
        """
        m = other.ambient_dim
        rows = []
        for a in self._rows:
            for b in other._rows:
                rows.append({i * m + j: x * y for i, x in a.items() for j, y in b.items()})
        rows.sort(key=min)
        s = Subspace(self.ambient_dim * m, rows, _trusted=True)
        if self.is_coordinate and other.is_coordinate:
            s._coord = True
        return s

    def image(self, m: Matrix) -> "Subspace":
        if m.cols != self.ambient_dim:
            raise ValueError("matrix does not act on this ambient space")
        return Subspace(m.rows, apply_to_rows(m, self._rows))


def apply_to_rows(m: Matrix, vectors: Sequence[dict]) -> list[dict]:
    """``[m v for v in vectors]`` using the columns of ``m``."""
    cols = m.columns()
    out = []
    for v in vectors:
        acc: dict = {}
        for j, x in v.items():
            for i, a in cols[j].items():
                y = acc.get(i, ZERO) + x * a
                if y:
                    acc[i] = y
                else:
                    acc.pop(i, None)
        out.append(acc)
    return out


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a + b


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    return a & b


def subspace_contains(a: Subspace, b) -> bool:
    """True when ``b`` (a subspace or a vector) lies in ``a``."""
    if isinstance(b, Subspace):
        a._check(b)
        return b <= a
    return a.contains(b)


def direct_sum(parts: Sequence[Subspace]) -> Subspace:
    """Embed subspaces of consecutive blocks into the block direct sum."""
    rows = []
    off = 0
    coord = True
    for s in parts:
        rows.extend({off + j: x for j, x in r.items()} for r in s._rows)
        coord = coord and s.is_coordinate
        off += s.ambient_dim
    out = Subspace(off, rows, _trusted=True)
    out._coord = coord
    return out


def preimage(m: Matrix, target: Subspace, domain: Subspace | None = None) -> Subspace:
    """``{v in domain : m v in target}``; the domain defaults to everything."""
    if domain is None:
        domain = Subspace.full(m.cols)
    vecs = domain.sparse_basis()
    if not vecs:
        return Subspace.zero(m.cols)
    rems = [target.reduce(w) for w in apply_to_rows(m, vecs)]
    # kernel of the coefficient map c -> sum c_i rems_i
    coeff_matrix = Matrix.from_columns(rems, m.rows)
    ker = kernel_vectors(coeff_matrix)
    out = []
    for c in ker:
        v: dict = {}
        for i, ci in c.items():
            for j, x in vecs[i].items():
                y = v.get(j, ZERO) + ci * x
                if y:
                    v[j] = y
                else:
                    v.pop(j, None)
        out.append(v)
    return Subspace(m.cols, out)


def kernel_vectors(m: Matrix) -> list[dict]:
    ech = Echelon(m.cols)
    for i in range(m.rows):
        ech.add(dict(m.row_items(i)))
    pivset = set(ech.rows)
    out = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = {f: ONE}
        for p, row in ech.rows.items():
            x = row.get(f)
            if x:
                v[p] = -x
        out.append(v)
    return out


def solve(m: Matrix) -> tuple[int, Subspace, Subspace]:
    """Rank, kernel and image (column space) of ``m``."""
    ker = Subspace(m.cols, kernel_vectors(m))
    img = Subspace.column_space(m)
    return img.dim, ker, img


class Filtration:
    """An increasing, exhaustive filtration of ``Q^ambient_dim``.

    Two equivalent descriptions are kept, each computed lazily from the other:

    * ``steps``: jump index -> Subspace (the value at ``k`` is the step at the
      largest jump ``<= k``, and zero below the first jump);
    * an adapted basis with one integer label per basis vector, so that the
      step at ``k`` is spanned by the vectors labelled ``<= k``.  A ``basis``
      of ``None`` means the standard basis, i.e. a coordinate filtration.

    Raw step data is accepted as is; :meth:`violations` reports whether it is
    actually increasing and exhaustive.
    """

    __slots__ = ("ambient_dim", "_steps", "_labels", "_basis")

    def __init__(self, ambient_dim: int, steps: Mapping[int, Subspace]):
        for k, s in steps.items():
            if s.ambient_dim != ambient_dim:
                raise ValueError(f"step {k} lives in dimension {s.ambient_dim}, expected {ambient_dim}")
        self.ambient_dim = ambient_dim
        self._steps = {int(k): steps[k] for k in sorted(steps)}
        self._labels = None
        self._basis = None

    @classmethod
    def from_labels(cls, ambient_dim: int, labels: Sequence[int], basis: Matrix | None = None) -> "Filtration":
        if len(labels) != ambient_dim:
            raise ValueError("need one label per basis vector")
        if basis is not None and basis.shape != (ambient_dim, ambient_dim):
            raise ValueError("adapted basis must be square")
        f = cls.__new__(cls)
        f.ambient_dim = ambient_dim
        f._steps = None
        f._labels = tuple(int(x) for x in labels)
        f._basis = basis
        return f

    @classmethod
    def trivial(cls, ambient_dim: int, index: int = 0) -> "Filtration":
        """Single jump: zero below ``index``, everything from ``index`` on."""
        return cls.from_labels(ambient_dim, [index] * ambient_dim)

    # -- the two descriptions -----------------------------------------
    @property
    def steps(self) -> dict[int, Subspace]:
        if self._steps is None:
            self._steps = self._steps_from_labels()
        return dict(self._steps)

    def _steps_from_labels(self) -> dict[int, Subspace]:
        n = self.ambient_dim
        labels = self._labels
        order = sorted(range(n), key=lambda i: labels[i])
        steps = {}
        if self._basis is None:
            acc: list[int] = []
            pos = 0
            for k in sorted(set(labels)):
                while pos < n and labels[order[pos]] <= k:
                    acc.append(order[pos])
                    pos += 1
                steps[k] = Subspace.coordinate(n, acc)
            return steps
        cols = self._basis.columns()
        ech = Echelon(n)
        pos = 0
        for k in sorted(set(labels)):
            while pos < n and labels[order[pos]] <= k:
                ech.add(cols[order[pos]])
                pos += 1
            steps[k] = Subspace.from_echelon(ech)
        return steps

    @property
    def labels(self) -> tuple[int, ...]:
        self._ensure_adapted()
        return self._labels

    @property
    def basis(self) -> Matrix | None:
        """Adapted basis as columns, or None for the standard basis."""
        self._ensure_adapted()
        return self._basis

    def _ensure_adapted(self) -> None:
        if self._labels is not None:
            return
        bad = self.violations()
        if bad:
            raise ValueError("; ".join(bad))
        n = self.ambient_dim
        steps = self._steps
        if all(s.is_coordinate for s in steps.values()):
            labels = [None] * n
            for k, s in steps.items():
                for i in s.pivots:
                    if labels[i] is None:
                        labels[i] = k
            self._labels = tuple(labels)
            self._basis = None
            return
        ech = Echelon(n)
        vecs, labels = [], []
        for k, s in steps.items():
            for r in s.sparse_basis():
                if ech.add(r):
                    vecs.append(r)
                    labels.append(k)
        self._labels = tuple(labels)
        self._basis = Matrix.from_columns(vecs, n)

    # -- queries ------------------------------------------------------
    def jumps(self) -> list[int]:
        """Indices ``k`` with ``Gr_k != 0``."""
        if self._labels is not None:
            return sorted(set(self._labels))
        out = []
        prev = Subspace.zero(self.ambient_dim)
        for k, s in self._steps.items():
            if s != prev:
                out.append(k)
            prev = s
        return out

    def __getitem__(self, k: int) -> Subspace:
        steps = self.steps if self._steps is None else self._steps
        best = None
        for j in steps:
            if j <= k:
                best = j
            else:
                break
        if best is None:
            return Subspace.zero(self.ambient_dim)
        return steps[best]

    def graded_dims(self) -> dict[int, int]:
        if self._labels is not None:
            out: dict[int, int] = {}
            for x in self._labels:
                out[x] = out.get(x, 0) + 1
            return dict(sorted(out.items()))
        out = {}
        prev = 0
        for k, s in self._steps.items():
            if s.dim != prev:
                out[k] = s.dim - prev
            prev = s.dim
        return out

    def violations(self) -> list[str]:
        """Why this is not an increasing exhaustive filtration (empty if it is)."""
        if self._labels is not None:
            return []
        out = []
        keys = list(self._steps)
        for a, b in zip(keys, keys[1:]):
            if not self._steps[a] <= self._steps[b]:
                out.append(f"not increasing: step {a} is not contained in step {b}")
        if self.ambient_dim and (not keys or self._steps[keys[-1]].dim != self.ambient_dim):
            out.append("not exhaustive: the last step is not the whole space")
        return out

    def normalized_steps(self) -> dict[int, Subspace]:
        """Steps at the jump indices only."""
        steps = self.steps if self._steps is None else self._steps
        out = {}
        prev = Subspace.zero(self.ambient_dim)
        for k, s in steps.items():
            if s != prev:
                out[k] = s
            prev = s
        return out

    def shifted(self, d: int) -> "Filtration":
        """The filtration ``G_k = F_{k-d}``."""
        if self._labels is not None:
            return Filtration.from_labels(self.ambient_dim, [x + d for x in self._labels], self._basis)
        return Filtration(self.ambient_dim, {k + d: s for k, s in self._steps.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Filtration):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            return False
        if (
            self._labels is not None
            and other._labels is not None
            and self._basis is None
            and other._basis is None
        ):
            return self._labels == other._labels
        return self.normalized_steps() == other.normalized_steps()

    __hash__ = None

    def __repr__(self) -> str:
        return f"Filtration(ambient={self.ambient_dim}, graded={self.graded_dims()})"


def convolve_filtrations(f1: Filtration, f2: Filtration, shift: int = 0) -> Filtration:
    """Tensor filtration ``G_k = sum_{i+j=k-shift} F1_i (x) F2_j``, built from subspaces.

    This is the literal sum of tensor products of steps; it does not use the
    adapted bases.
    """
    n = f1.ambient_dim * f2.ambient_dim
    s1 = f1.normalized_steps()
    s2 = f2.normalized_steps()
    targets = sorted({i + j + shift for i in s1 for j in s2})
    steps = {}
    for k in targets:
        acc = Subspace.zero(n)
        for i, a in s1.items():
            b = f2[k - shift - i]
            if b.dim:
                acc = acc + a.tensor(b)
        steps[k] = acc
    return Filtration(n, steps)


def direct_sum_filtration(parts: Sequence[Filtration]) -> Filtration:
    """Blockwise direct sum of filtrations on consecutive blocks."""
    n = sum(f.ambient_dim for f in parts)
    idx = sorted({k for f in parts for k in f.normalized_steps()})
    steps = {k: direct_sum([f[k] for f in parts]) for k in idx}
    return Filtration(n, steps)
