"""Random generators shared by the property tests."""
from __future__ import annotations

import random

from hodgejoin.mhsm import ElementaryBlock
from hodgejoin.monrep import MonRep, orbit_members, realize
from hodgejoin.qlinalg import Matrix, shift_block, totient
from hodgejoin.qlinalg.matrix import block_diag

ORDERS = (1, 2, 3, 4, 5, 6, 8, 10, 12)


def random_unimodular(rng: random.Random, n: int, steps: int | None = None) -> Matrix:
    """Product of elementary integer row operations (determinant 1)."""
    m = Matrix.identity(n)
    if n < 2:
        return m
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        e = Matrix.identity(n) + Matrix.from_dict(n, n, {(i, j): rng.choice((-2, -1, 1, 2))})
        m = m @ e
    return m


def conjugate(t: Matrix, rng: random.Random) -> Matrix:
    p = random_unimodular(rng, t.rows)
    return p @ t @ p.inverse()


def random_monrep(rng: random.Random, max_dim: int, min_dim: int = 1) -> MonRep:
    """A Galois-closed representation with ``min_dim <= dim <= max_dim``."""
    target = rng.randint(min_dim, max_dim)
    blocks = []
    dim = 0
    while dim < target:
        room = target - dim
        m = rng.choice([m for m in ORDERS if totient(m) <= room])
        size = rng.randint(1, room // totient(m))
        blocks.extend((a, size, 1) for a in orbit_members(m))
        dim += size * totient(m)
    return MonRep(blocks)


def random_quasi_unipotent(rng: random.Random, max_dim: int, min_dim: int = 1) -> tuple[Matrix, MonRep]:
    r = random_monrep(rng, max_dim, min_dim)
    return conjugate(realize(r), rng), r


def random_nilpotent(rng: random.Random, n: int) -> Matrix:
    sizes = []
    left = n
    while left:
        s = rng.randint(1, left)
        sizes.append(s)
        left -= s
    base = block_diag(*[shift_block(s) for s in sizes])
    return conjugate(base, rng)


EXPONENTS = ("0", "-1/2", "-1/3", "-2/3", "-1/4", "-3/4", "-1/6", "-5/6")


def random_blocks(rng: random.Random, count: int, max_k: int = 3) -> list[ElementaryBlock]:
    return [
        ElementaryBlock(rng.choice(EXPONENTS), rng.randint(-2, 2), rng.randint(-2, 3), rng.randint(1, max_k), rng.randint(1, 2))
        for _ in range(count)
    ]
