"""Quasi-unipotent monodromy representations over Q.

A representation is stored in canonical form as a sorted multiset of
``(alpha, size, mult)``: ``mult`` Jordan blocks of length ``size`` for the
eigenvalue ``exp(-2 pi i alpha)`` of ``T``, with ``alpha`` in ``(-1, 0]``.
Exponents are stored individually; a rational realization exists exactly
when the multiset is stable under the Galois action on each cyclotomic
orbit.

The eigenvalue attached to ``alpha`` follows the counterclockwise
orientation of the monodromy generator: ``alpha = -k/m`` with ``k/m`` in
lowest terms corresponds to the root of unity ``exp(2 pi i k / m)``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import sympy

from .qlinalg import (
    Matrix,
    NotQuasiUnipotentError,
    Q,
    Rational,
    Subspace,
    apply_to_rows,
    block_diag,
    charpoly,
    companion,
    cyclotomic,
    cyclotomic_factorization,
    cyclotomic_index,
    kron,
    nilpotent_log,
    partition_from_ranks,
    power_sums,
    qstr,
    semisimple_unipotent_parts,
    shift_block,
    solve,
    totient,
)
from .qlinalg.matrix import ZERO
from .qlinalg.poly import pmonic

__all__ = [
    "EigExp", "GalOrbit", "MonRep", "StdVariation", "EtaCertificate",
    "as_exponent", "reduce_exponent", "exponent_order", "orbit_members",
    "canonical_form", "make_std", "tensor_join", "clebsch_gordan",
    "lambda_part", "restrict_to_orbit", "eta_inverse", "realize",
]


# -- eigenvalue exponents -----------------------------------------------

EigExp = Rational


def reduce_exponent(x) -> Rational:
    """The representative of ``x`` modulo Z in ``(-1, 0]``."""
    x = Q(x)
    return x - math.ceil(x)


def as_exponent(x) -> Rational:
    """Validate that ``x`` is an eigenvalue exponent, i.e. ``-1 < x <= 0``."""
    x = Q(x)
    if not (-1 < x <= 0):
        raise ValueError(f"eigenvalue exponent {qstr(x)} outside (-1, 0]")
    return x


def exponent_order(alpha) -> int:
    """Multiplicative order of the eigenvalue ``exp(-2 pi i alpha)``."""
    return int(as_exponent(alpha).denominator)


def orbit_members(m: int) -> tuple[Rational, ...]:
    """The exponents whose eigenvalues are the roots of the m-th cyclotomic polynomial."""
    if m == 1:
        return (Q(0),)
    return tuple(sorted(Q(-k) / m for k in range(1, m) if math.gcd(k, m) == 1))


# -- Galois orbits and standard variations --------------------------------

@dataclass(frozen=True)
class GalOrbit:
    """A monic irreducible rational polynomial with nonzero constant term.

    ``coeffs`` are listed constant term first.
    """

    coeffs: tuple

    def __post_init__(self):
        c = pmonic([Q(x) for x in self.coeffs])
        if len(c) < 2:
            raise ValueError("orbit polynomial must have positive degree")
        if not c[0]:
            raise ValueError("orbit polynomial must have nonzero constant term")
        x = sympy.Symbol("x")
        poly = sympy.Poly([sympy.Rational(int(a.numerator), int(a.denominator)) for a in reversed(c)], x, domain="QQ")
        if not poly.is_irreducible:
            raise ValueError("orbit polynomial is reducible over Q")
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def cyclotomic(cls, m: int) -> "GalOrbit":
        return cls(cyclotomic(m))

    @classmethod
    def of_exponent(cls, alpha) -> "GalOrbit":
        return cls.cyclotomic(exponent_order(alpha))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def cyclotomic_order(self) -> int | None:
        return cyclotomic_index(list(self.coeffs))

    def members(self) -> tuple[Rational, ...]:
        """Exponents of the roots; empty unless the roots are roots of unity."""
        m = self.cyclotomic_order
        return () if m is None else orbit_members(m)

    def inverse_members(self) -> tuple[Rational, ...]:
        """Exponents of the inverted roots."""
        return tuple(sorted(reduce_exponent(-a) for a in self.members()))


@dataclass(frozen=True)
class StdVariation:
    """One of the standard variations ``E_k``, ``E^lambda`` or ``E_k^lambda``."""

    kind: str
    k: int = 0
    orbit: GalOrbit | None = None

    def __post_init__(self):
        if self.kind not in ("E_k", "E_lambda", "E_k_lambda"):
            raise ValueError(f"unknown standard variation kind {self.kind!r}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.kind != "E_k" and self.orbit is None:
            raise ValueError(f"{self.kind} needs an orbit polynomial")

    @property
    def rank(self) -> int:
        if self.kind == "E_k":
            return self.k + 1
        if self.kind == "E_lambda":
            return self.orbit.degree
        return (self.k + 1) * self.orbit.degree


# -- the representation type -----------------------------------------------

def _canonical(entries: Iterable) -> tuple:
    acc: Counter = Counter()
    for alpha, size, mult in entries:
        alpha = as_exponent(alpha)
        size, mult = int(size), int(mult)
        if size < 1 or mult < 0:
            raise ValueError("block size must be positive and multiplicity nonnegative")
        if mult:
            acc[(alpha, size)] += mult
    return tuple((a, s, acc[(a, s)]) for a, s in sorted(acc))


@dataclass(frozen=True)
class MonRep:
    """Canonical multiset of ``(alpha, size, mult)``."""

    blocks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", _canonical(self.blocks))

    @classmethod
    def unit(cls) -> "MonRep":
        return cls(((0, 1, 1),))

    @property
    def dim(self) -> int:
        return sum(s * m for _, s, m in self.blocks)

    def exponents(self) -> Counter:
        out: Counter = Counter()
        for a, s, m in self.blocks:
            out[a] += s * m
        return out

    def orders(self) -> tuple[int, ...]:
        return tuple(sorted({int(a.denominator) for a, _, _ in self.blocks}))

    def part(self, alphas) -> "MonRep":
        keep = set(alphas)
        return MonRep(b for b in self.blocks if b[0] in keep)

    def is_galois_closed(self) -> bool:
        by_alpha: dict = {}
        for a, s, m in self.blocks:
            by_alpha.setdefault(a, Counter())[s] += m
        for m in self.orders():
            members = orbit_members(m)
            ref = by_alpha.get(members[0], Counter())
            if any(by_alpha.get(a, Counter()) != ref for a in members):
                return False
        return True

    def to_json(self) -> dict:
        return {"blocks": [[qstr(a), s, m] for a, s, m in self.blocks]}

    @classmethod
    def from_json(cls, data: dict) -> "MonRep":
        if "blocks" in data:
            return cls(tuple((Q(a), int(s), int(m)) for a, s, m in data["blocks"]))
        if "matrix" in data:
            return canonical_form(Matrix.from_rows([[Q(x) for x in r] for r in data["matrix"]]))
        raise ValueError("representation JSON needs 'blocks' or 'matrix'")

    def __str__(self) -> str:
        return "{" + ", ".join(f"({qstr(a)},{s},{m})" for a, s, m in self.blocks) + "}"


# -- realizations -----------------------------------------------------------

def _unipotent(size: int) -> Matrix:
    return Matrix.identity(size) + shift_block(size)


def realize(r: MonRep) -> Matrix:
    """A rational matrix whose canonical form is ``r``.

    Each orbit block is ``companion(Phi_m) (x) (1 + shift)``; raises if
    ``r`` is not Galois closed.
    """
    if not r.is_galois_closed():
        raise ValueError(f"representation {r} is not Galois closed and has no rational realization")
    parts = []
    for m in r.orders():
        lead = orbit_members(m)[0]
        comp = companion(list(cyclotomic(m)))
        for a, size, mult in r.blocks:
            if a == lead:
                block = kron(comp, _unipotent(size))
                parts.extend([block] * mult)
    return block_diag(*parts) if parts else Matrix.zeros(0)


def _orbit_blocks(m: int, sizes: dict[int, int]) -> list:
    return [(a, s, c) for a in orbit_members(m) for s, c in sizes.items()]


def canonical_form(t: Matrix, dim: int | None = None) -> MonRep:
    """Canonical form of an invertible quasi-unipotent rational matrix.

    For each cyclotomic factor ``Phi_m`` of the characteristic polynomial the
    ranks of ``Phi_m(t)^j`` give, through the conjugate-partition rule, the
    Jordan sizes at every root of ``Phi_m`` at once (each size repeated
    ``totient(m)`` times).
    """
    if not t.is_square:
        raise ValueError("monodromy matrix must be square")
    if dim is not None and dim != t.rows:
        raise ValueError(f"declared dimension {dim} does not match matrix size {t.rows}")
    n = t.rows
    if n == 0:
        return MonRep()
    f = t.to_flint()
    if f.rank() < n:
        raise ZeroDivisionError("monodromy matrix is singular")
    factors = cyclotomic_factorization(charpoly(t))
    blocks = []
    ident = type(f)(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])
    for m, e in sorted(factors.items()):
        phi = cyclotomic(m)
        a = ident * 0
        for c in reversed(phi):
            a = a * f + ident * int(c)
        ranks = [n]
        power = a
        while True:
            ranks.append(power.rank())
            if ranks[-1] == ranks[-2]:
                break
            power = power * a
        deg = totient(m)
        sizes = Counter(partition_from_ranks(ranks))
        if any(c % deg for c in sizes.values()):
            raise ArithmeticError("Jordan data is not Galois symmetric")
        if sum(s * c for s, c in sizes.items()) != e * deg:
            raise ArithmeticError("generalized eigenspace dimension disagrees with the characteristic polynomial")
        blocks.extend(_orbit_blocks(m, {s: c // deg for s, c in sizes.items()}))
    return MonRep(blocks)


def make_std(v: StdVariation) -> tuple[MonRep, Matrix]:
    """Canonical form and matrix realization of a standard variation."""
    if v.kind == "E_k":
        t = _unipotent(v.k + 1)
    else:
        comp = companion(list(v.orbit.coeffs))
        if v.orbit.cyclotomic_order is None:
            raise NotQuasiUnipotentError(
                "orbit polynomial is not cyclotomic, so the variation has no eigenvalue exponents"
            )
        t = comp if v.kind == "E_lambda" else kron(comp, _unipotent(v.k + 1))
    return canonical_form(t), t


# -- tensor products ---------------------------------------------------------

def clebsch_gordan(k: int, l: int) -> tuple[int, ...]:
    """Jordan sizes of ``J_k (x) J_l`` for the unipotent (or nilpotent-sum) action."""
    return tuple(k + l - 1 - 2 * i for i in range(min(k, l)))


def tensor_join(r1: MonRep, r2: MonRep) -> MonRep:
    """Canonical form of ``T1 (x) T2``: exponents add, Jordan blocks by Clebsch-Gordan."""
    out = []
    for a1, k1, m1 in r1.blocks:
        for a2, k2, m2 in r2.blocks:
            a = reduce_exponent(a1 + a2)
            for size in clebsch_gordan(k1, k2):
                out.append((a, size, m1 * m2))
    return MonRep(out)


# -- lambda parts ----------------------------------------------------------------

def _std_parts(orbit: GalOrbit, k: int) -> tuple[Matrix, Matrix]:
    """Semisimple part and nilpotent logarithm of ``E_k^lambda``."""
    d = orbit.degree
    comp = companion(list(orbit.coeffs))
    ts = kron(comp, Matrix.identity(k + 1))
    n = kron(Matrix.identity(d), nilpotent_log(_unipotent(k + 1)))
    return ts, n


def _rep_parts(r: MonRep) -> tuple[Matrix, Matrix, Matrix]:
    """``(T, T_s, N)`` for the standard realization of ``r``."""
    t = realize(r)
    if t.rows == 0:
        return t, t, t
    ts, tu = semisimple_unipotent_parts(t)
    return t, ts, nilpotent_log(tu)


def _trace_bottom_functional(orbit: GalOrbit, k: int) -> dict[int, Rational]:
    """The functional on ``E_k^lambda`` given by the orbit trace times the
    coefficient of the bottom (kernel of N) basis vector of ``E_k``."""
    d = orbit.degree
    sums = power_sums(list(orbit.coeffs), d)
    return {a * (k + 1) + k: sums[a] for a in range(d) if sums[a]}


def _restrict(t: Matrix, s: Subspace) -> Matrix:
    """Matrix of ``t`` on the invariant subspace ``s`` in its RREF basis."""
    piv = s.pivots
    images = apply_to_rows(t, s.sparse_basis())
    cols = []
    for v in images:
        if s.reduce(v):
            raise ValueError("subspace is not invariant")
        cols.append({i: v[p] for i, p in enumerate(piv) if v.get(p)})
    return Matrix.from_columns(cols, s.dim)


def _project(kernel: Subspace, n: int, e_dim: int, phi: dict) -> Subspace:
    """Image of ``kernel`` inside ``Q^n (x) Q^e_dim`` under ``id (x) phi``."""
    out = []
    for v in kernel.sparse_basis():
        w: dict = {}
        for idx, x in v.items():
            i, b = divmod(idx, e_dim)
            c = phi.get(b)
            if c:
                y = w.get(i, ZERO) + x * c
                if y:
                    w[i] = y
                else:
                    w.pop(i, None)
        out.append(w)
    return Subspace(n, out)


def _stack(*ms: Matrix) -> Matrix:
    rows = []
    for m in ms:
        rows.extend(m.row(i) for i in range(m.rows))
    return Matrix(len(rows), ms[0].cols, rows)


def lambda_part(r: MonRep, orbit: GalOrbit, k: int) -> MonRep:
    """The lambda-part of ``r`` extracted through the kernel of
    ``(T_s (x) T_s - 1) + (N (x) 1 + 1 (x) N)`` on ``r (x) E_k^lambda``.

    The result lives at the eigenvalues ``lambda^{-1}`` (inverse roots of
    the orbit polynomial); for ``k`` below the Jordan lengths the blocks
    come out truncated by ``N``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    t, ts, nr = _rep_parts(r)
    n = t.rows
    if n == 0:
        return MonRep()
    tse, ne = _std_parts(orbit, k)
    de = tse.rows
    idn, ide = Matrix.identity(n), Matrix.identity(de)
    semisimple = kron(ts, tse) - Matrix.identity(n * de)
    nilpotent = kron(nr, ide) + kron(idn, ne)
    _, kernel, _ = solve(_stack(semisimple, nilpotent))
    image = _project(kernel, n, de, _trace_bottom_functional(orbit, k))
    return canonical_form(_restrict(t, image)) if image.dim else MonRep()


def restrict_to_orbit(r: MonRep, orbit: GalOrbit, invert: bool = True) -> MonRep:
    """Blocks of ``r`` whose eigenvalue lies in ``lambda^{-1}`` (or ``lambda``)."""
    members = orbit.inverse_members() if invert else orbit.members()
    return r.part(members)


# -- the inverse functor -------------------------------------------------------------

@dataclass(frozen=True)
class EtaCertificate:
    """Per-orbit kernel dimensions and the reconstructed representation."""

    source: MonRep
    kernels: tuple = ()
    round_trip: MonRep = field(default_factory=MonRep)

    @property
    def ok(self) -> bool:
        return self.round_trip == self.source and all(d == r.dim for _, d, r in self.kernels)

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "round_trip": self.round_trip.to_json(),
            "orbits": [{"order": m, "kernel_dim": d, "part": r.to_json()} for m, d, r in self.kernels],
            "ok": self.ok,
        }


def eta_inverse(r: MonRep) -> EtaCertificate:
    """Rebuild ``r`` orbit by orbit from the kernel of
    ``(T_s (x) T_s^{-1} - 1) + (N (x) 1 - 1 (x) N)`` on ``r_lambda (x) E_k^lambda``
    with ``k = dim r_lambda``, followed by the trace projection.
    """
    kernels = []
    recovered = []
    for m in r.orders():
        orbit = GalOrbit.cyclotomic(m)
        sub = r.part(orbit_members(m))
        t, ts, nr = _rep_parts(sub)
        n = t.rows
        k = n
        tse, ne = _std_parts(orbit, k)
        de = tse.rows
        semisimple = kron(ts, tse.inverse()) - Matrix.identity(n * de)
        nilpotent = kron(nr, Matrix.identity(de)) - kron(Matrix.identity(n), ne)
        _, kernel, _ = solve(_stack(semisimple, nilpotent))
        image = _project(kernel, n, de, _trace_bottom_functional(orbit, k))
        part = canonical_form(_restrict(t, image)) if image.dim else MonRep()
        kernels.append((m, kernel.dim, part))
        recovered.extend(part.blocks)
    return EtaCertificate(r, tuple(kernels), MonRep(recovered))
