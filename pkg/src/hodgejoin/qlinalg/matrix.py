"""Sparse exact matrices over the rationals.

Entries are ``gmpy2.mpq`` values; rows are stored as ``{column: value}``
dictionaries with zeros omitted.  Matrices are treated as immutable: every
operation returns a new object and the row dictionaries are never exposed
for mutation.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

import flint
from gmpy2 import mpq

Rational = type(mpq())
ZERO = mpq(0)
ONE = mpq(1)

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def Q(x) -> Rational:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational.

    Floats are refused: nothing in this package is allowed to round.
    """
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        if not _RATIONAL_RE.match(x):
            raise ValueError(f"not a rational literal: {x!r}")
        s = x.replace(" ", "")
        if "/" in s:
            num, den = s.split("/")
            if int(den) == 0:
                raise ValueError(f"zero denominator in {x!r}")
            return mpq(int(num), int(den))
        return mpq(int(s))
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted as exact rationals")
    # gmpy2.mpz and other integral types
    try:
        return mpq(x)
    except TypeError as exc:
        raise TypeError(f"cannot interpret {x!r} as a rational") from exc


def qstr(x) -> str:
    """Canonical string of a rational: ``"p/q"`` or ``"p"`` when integral."""
    x = Q(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def _clean(row: dict) -> dict:
    return {j: v for j, v in row.items() if v}


def _axpy(target: dict, coeff, row: dict) -> None:
    """target += coeff * row, in place, dropping cancellations."""
    for j, x in row.items():
        v = target.get(j, ZERO) + coeff * x
        if v:
            target[j] = v
        else:
            target.pop(j, None)


class Matrix:
    """A rows x cols matrix with exact rational entries, stored sparsely."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Iterable[dict] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        if data is None:
            self._data = tuple({} for _ in range(rows))
        else:
            self._data = tuple(data)
            if len(self._data) != rows:
                raise ValueError("row count does not match data")

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        data = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged row list")
            data.append({j: Q(v) for j, v in enumerate(r) if v})
        return cls(len(rows), cols, [_clean(d) for d in data])

    @classmethod
    def from_columns(cls, columns: Sequence[dict | Sequence], rows: int) -> "Matrix":
        data = [{} for _ in range(rows)]
        for j, col in enumerate(columns):
            items = col.items() if isinstance(col, dict) else enumerate(col)
            for i, v in items:
                if v:
                    data[i][j] = Q(v)
        return cls(rows, len(columns), data)

    @classmethod
    def from_dict(cls, rows: int, cols: int, entries: dict) -> "Matrix":
        data = [{} for _ in range(rows)]
        for (i, j), v in entries.items():
            if v:
                data[i][j] = Q(v)
        return cls(rows, cols, data)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{i: ONE} for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def diagonal(cls, values: Sequence) -> "Matrix":
        return cls(len(values), len(values), [{i: Q(v)} if v else {} for i, v in enumerate(values)])

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._data)

    def __getitem__(self, ij) -> Rational:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self._data[i].get(j, ZERO)

    def row(self, i: int) -> dict:
        return dict(self._data[i])

    def row_items(self, i: int):
        return self._data[i].items()

    def to_lists(self) -> list[list[Rational]]:
        return [[r.get(j, ZERO) for j in range(self.cols)] for r in self._data]

    def columns(self) -> list[dict]:
        cols = [{} for _ in range(self.cols)]
        for i, r in enumerate(self._data):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def is_zero(self) -> bool:
        return not any(self._data)

    def is_identity(self) -> bool:
        return self.is_square and all(r == {i: ONE} for i, r in enumerate(self._data))

    # -- arithmetic ---------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, self.columns())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    __hash__ = None

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        data = []
        for a, b in zip(self._data, other._data):
            r = dict(a)
            _axpy(r, ONE, b)
            data.append(r)
        return Matrix(self.rows, self.cols, data)

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [{j: -v for j, v in r.items()} for r in self._data])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __mul__(self, c) -> "Matrix":
        c = Q(c)
        if not c:
            return Matrix.zeros(self.rows, self.cols)
        return Matrix(self.rows, self.cols, [{j: c * v for j, v in r.items()} for r in self._data])

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        odata = other._data
        data = []
        for r in self._data:
            acc: dict = {}
            for k, a in r.items():
                for j, b in odata[k].items():
                    acc[j] = acc.get(j, ZERO) + a * b
            data.append(_clean(acc))
        return Matrix(self.rows, other.cols, data)

    def apply(self, v: dict) -> dict:
        """Matrix times a sparse column vector ``{index: value}``."""
        out = {}
        for i, r in enumerate(self._data):
            s = ZERO
            if len(r) < len(v):
                for j, a in r.items():
                    x = v.get(j)
                    if x:
                        s += a * x
            else:
                for j, x in v.items():
                    a = r.get(j)
                    if a:
                        s += a * x
            if s:
                out[i] = s
        return out

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        cpos = {c: n for n, c in enumerate(cols)}
        data = []
        for i in rows:
            data.append({cpos[j]: v for j, v in self._data[i].items() if j in cpos})
        return Matrix(len(rows), len(cols), data)

    def rank(self) -> int:
        if not self.rows or not self.cols:
            return 0
        return self.to_flint().rank()

    def to_flint(self) -> "flint.fmpq_mat":
        """Dense copy as a FLINT rational matrix (used for heavy elimination)."""
        entries = [flint.fmpq(0)] * (self.rows * self.cols)
        for i, r in enumerate(self._data):
            base = i * self.cols
            for j, v in r.items():
                entries[base + j] = flint.fmpq(int(v.numerator), int(v.denominator))
        return flint.fmpq_mat(self.rows, self.cols, entries)

    @classmethod
    def from_flint(cls, f) -> "Matrix":
        rows, cols = f.nrows(), f.ncols()
        ent = f.entries()
        data = []
        for i in range(rows):
            row = {}
            for j in range(cols):
                x = ent[i * cols + j]
                if x != 0:
                    row[j] = mpq(int(x.p), int(x.q))
            data.append(row)
        return cls(rows, cols, data)

    def inverse(self) -> "Matrix":
        """Exact inverse by Gauss-Jordan on ``[A | I]``; raises on singular input."""
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        ech = Echelon(2 * n)
        for i, r in enumerate(self._data):
            aug = dict(r)
            aug[n + i] = ONE
            ech.add(aug)
        pivots = ech.pivots()
        if len(pivots) < n or pivots[n - 1] >= n:
            raise ZeroDivisionError("matrix is singular")
        data = []
        for p in pivots:
            row = ech.rows[p]
            data.append({j - n: v for j, v in row.items() if j >= n})
        return Matrix(n, n, data)

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            body = "; ".join(" ".join(qstr(x) for x in r) for r in self.to_lists())
            return f"Matrix({self.rows}x{self.cols}: [{body}])"
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz})"


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; index ``(i, k)`` of the result is ``i * b.rows + k``."""
    data = []
    bdata = b._data
    for ra in a._data:
        for rb in bdata:
            row = {}
            for j, x in ra.items():
                off = j * b.cols
                for l, y in rb.items():
                    row[off + l] = x * y
            data.append(row)
    return Matrix(a.rows * b.rows, a.cols * b.cols, data)


def block_diag(*blocks: Matrix) -> Matrix:
    data = []
    off = 0
    for m in blocks:
        for r in m._data:
            data.append({off + j: v for j, v in r.items()})
        off += m.cols
    return Matrix(sum(m.rows for m in blocks), off, data)


def shift_block(n: int) -> Matrix:
    """Nilpotent lower shift ``e_i -> e_{i+1}`` on ``A^n`` (one Jordan block)."""
    return Matrix(n, n, [{i - 1: ONE} if i else {} for i in range(n)])


class Echelon:
    """Incrementally maintained reduced row-echelon basis.

    ``rows`` maps a pivot column to a row with a 1 at the pivot and zeros at
    every other pivot column, so reduction of a new vector needs a single
    pass over the pivots it touches.
    """

    __slots__ = ("ncols", "rows")

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        v = dict(v)
        rows = self.rows
        for p in [p for p in v if p in rows]:
            c = v.get(p)
            if c:
                _axpy(v, -c, rows[p])
        return v

    def add(self, v: dict) -> bool:
        """Insert ``v``; return False when it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        c = r[p]
        if c != ONE:
            inv = ONE / c
            r = {j: x * inv for j, x in r.items()}
        for row in self.rows.values():
            x = row.get(p)
            if x:
                _axpy(row, -x, r)
        self.rows[p] = r
        return True

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def basis(self) -> list[dict]:
        return [self.rows[p] for p in sorted(self.rows)]
