"""Dense univariate polynomials over Q, characteristic polynomials and
cyclotomic factorization.

A polynomial is a list of coefficients, constant term first, with no
trailing zeros (the zero polynomial is ``[]``).
"""
from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

from .matrix import ONE, ZERO, Matrix, Q


def trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def padd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def psub(a: list, b: list) -> list:
    return padd(a, [-x for x in b])


def pmul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pdivmod(a: list, b: list) -> tuple[list, list]:
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Q(x) for x in trim(a)]
    lead = b[-1]
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], r
    q = [ZERO] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] / lead
        if c:
            q[k - db] = c
            for i in range(db + 1):
                r[k - db + i] -= c * b[i]
    return trim(q), trim(r[:db])


def pmonic(p: list) -> list:
    p = trim(p)
    if not p:
        return p
    lead = p[-1]
    return [x / lead for x in p]


def pgcd(a: list, b: list) -> list:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def pderiv(p: list) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def peval(p: list, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def peval_matrix(p: list, m: Matrix) -> Matrix:
    """``p(m)`` by Horner's rule."""
    n = m.rows
    if not p:
        return Matrix.zeros(n)
    acc = Matrix.identity(n) * p[-1]
    for c in reversed(p[:-1]):
        acc = acc @ m
        if c:
            acc = acc + Matrix.identity(n) * c
    return acc


def squarefree_part(p: list) -> list:
    p = pmonic(p)
    if len(p) <= 1:
        return p
    g = pgcd(p, pderiv(p))
    return pmonic(pdivmod(p, g)[0])


def charpoly(m: Matrix) -> list:
    """Monic characteristic polynomial ``det(x I - m)``, computed by FLINT."""
    if not m.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    if m.rows == 0:
        return [ONE]
    cp = m.to_flint().charpoly()
    return [mpq(int(c.p), int(c.q)) for c in cp.coeffs()]


def charpoly_hessenberg(m: Matrix) -> list:
    """Monic characteristic polynomial ``det(x I - m)``, in pure Python.

    Kept as an independent route to cross-check :func:`charpoly`.  Hessenberg reduction by similarity followed by the standard
    three-term recurrence; O(n^3) exact operations.
    """
    if not m.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.rows
    H = m.to_lists()
    for k in range(1, n - 1):
        piv = next((i for i in range(k, n) if H[i][k - 1]), None)
        if piv is None:
            continue
        if piv != k:
            H[piv], H[k] = H[k], H[piv]
            for row in H:
                row[piv], row[k] = row[k], row[piv]
        pk = H[k][k - 1]
        for i in range(k + 1, n):
            u = H[i][k - 1]
            if not u:
                continue
            u = u / pk
            ri, rk = H[i], H[k]
            for j in range(k - 1, n):
                if rk[j]:
                    ri[j] -= u * rk[j]
            for row in H:
                if row[i]:
                    row[k] += u * row[i]
    polys = [[ONE]]
    for k in range(1, n + 1):
        p = pmul([-H[k - 1][k - 1], ONE], polys[k - 1])
        t = ONE
        for i in range(1, k):
            t *= H[k - i][k - i - 1]
            if not t:
                break
            c = t * H[k - i - 1][k - 1]
            if c:
                p = psub(p, [c * x for x in polys[k - i - 1]])
        polys.append(p)
    return polys[n]


@lru_cache(maxsize=None)
def totient(m: int) -> int:
    out, n, d = m, m, 2
    while d * d <= n:
        if n % d == 0:
            while n % d == 0:
                n //= d
            out -= out // d
        d += 1
    if n > 1:
        out -= out // n
    return out


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> tuple:
    """Integer coefficients of the m-th cyclotomic polynomial, constant first."""
    if m < 1:
        raise ValueError("cyclotomic index must be positive")
    p = [Q(-1)] + [ZERO] * (m - 1) + [ONE]
    for d in range(1, m):
        if m % d == 0:
            p = pdivmod(p, list(cyclotomic(d)))[0]
    return tuple(p)


@lru_cache(maxsize=None)
def cyclotomic_orders_up_to_degree(deg: int) -> tuple[int, ...]:
    """All m with ``totient(m) <= deg``, increasing."""
    # totient(m) >= sqrt(m / 2) bounds the search
    limit = max(2, 2 * deg * deg + 2)
    return tuple(m for m in range(1, limit + 1) if totient(m) <= deg)


def cyclotomic_index(p: list) -> int | None:
    """m if ``p`` equals the m-th cyclotomic polynomial, else None."""
    p = pmonic(p)
    deg = len(p) - 1
    if deg < 1 or any(x.denominator != 1 for x in p):
        return None
    for m in cyclotomic_orders_up_to_degree(deg):
        if totient(m) == deg and list(cyclotomic(m)) == p:
            return m
    return None


class NotQuasiUnipotentError(ValueError):
    """The characteristic polynomial is not a product of cyclotomic polynomials."""


def cyclotomic_factorization(p: list) -> dict[int, int]:
    """Exponents ``{m: e}`` with ``p = prod Phi_m^e``; raises if impossible."""
    p = pmonic(p)
    if not p:
        raise NotQuasiUnipotentError("zero polynomial")
    if any(x.denominator != 1 for x in p):
        raise NotQuasiUnipotentError("non-integral characteristic polynomial")
    rad = squarefree_part(p)
    orders = []
    for m in cyclotomic_orders_up_to_degree(len(rad) - 1):
        if len(rad) <= 1:
            break
        if totient(m) > len(rad) - 1:
            continue
        q, r = pdivmod(rad, list(cyclotomic(m)))
        if not r:
            orders.append(m)
            rad = q
    if len(rad) > 1:
        raise NotQuasiUnipotentError("characteristic polynomial has a non-cyclotomic factor")
    out = {}
    rest = p
    for m in orders:
        phi = list(cyclotomic(m))
        e = 0
        while True:
            q, r = pdivmod(rest, phi)
            if r:
                break
            rest, e = q, e + 1
        out[m] = e
    if len(rest) > 1:
        raise NotQuasiUnipotentError("characteristic polynomial has a non-cyclotomic factor")
    return out


def companion(p: list) -> Matrix:
    """Multiplication by x on ``Q[x]/(p)`` in the basis ``1, x, ..., x^{d-1}``."""
    p = pmonic([Q(c) for c in p])
    d = len(p) - 1
    if d < 1:
        raise ValueError("companion matrix needs a polynomial of positive degree")
    entries = {}
    for i in range(d - 1):
        entries[(i + 1, i)] = ONE
    for i in range(d):
        if p[i]:
            entries[(i, d - 1)] = -p[i]
    return Matrix.from_dict(d, d, entries)


def power_sums(p: list, count: int) -> list:
    """``sum over roots r of r^i`` for ``i = 0..count-1`` (Newton's identities)."""
    p = pmonic([Q(c) for c in p])
    d = len(p) - 1
    c = {d - i: p[i] for i in range(d + 1)}  # c[k] multiplies x^(d-k)
    out = [Q(d)]
    for k in range(1, count):
        s = ZERO
        for i in range(1, min(k, d + 1)):
            s += c[i] * out[k - i]
        if k <= d:
            s += k * c[k]
        out.append(-s)
    return out
