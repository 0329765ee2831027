#!/usr/bin/env python3
"""Arithmetic and linear algebra over Z_m.

Residues are plain ints kept in the canonical range [0, m - 1]. Field
operations (square roots, division, Gaussian elimination) require a prime
modulus; the witness solver additionally requires it to be odd.
"""

import functools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from sympy.ntheory.primetest import isprime

from qec.errors import DimensionMismatchError, ModulusError

Vector = Tuple[int, ...]


@functools.lru_cache(maxsize=1024)
def is_prime(n: int) -> bool:
    """Deterministic primality test for desk-scale moduli."""
    return bool(isprime(n))


@dataclass(frozen=True)
class Modulus:
    """A modulus m >= 2 with its primality precomputed."""

    m: int
    is_prime: bool = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ModulusError(f"modulus must be >= 2, got {self.m}")
        object.__setattr__(self, "is_prime", is_prime(self.m))

    @property
    def is_odd_prime(self) -> bool:
        return self.is_prime and self.m != 2

    def reduce(self, x: int) -> int:
        return x % self.m

    def inverse(self, x: int) -> int:
        return inverse(x, self.m)


def require_odd_prime(p: int) -> int:
    """Return p unchanged, raising ModulusError unless it is an odd prime."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ModulusError(f"requires odd prime, got {p}")
    return p


def inverse(x: int, m: int) -> int:
    """Multiplicative inverse of x mod m; defined for units only."""
    try:
        return pow(x % m, -1, m)
    except ValueError:
        raise ModulusError(f"{x % m} is not invertible mod {m}") from None


def legendre_symbol(x: int, p: int) -> int:
    """Legendre symbol (x / p) by Euler's criterion.

    Args:
        x: Any integer; reduced mod p.
        p: Odd prime modulus.

    Returns:
        0 if x = 0 mod p, 1 if x is a nonzero square, -1 otherwise.
    """
    require_odd_prime(p)
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def _tonelli_shanks(x: int, p: int) -> int:
    # p - 1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    if s == 1:
        return pow(x, (p + 1) // 4, p)

    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1

    m = s
    c = pow(z, q, p)
    t = pow(x, q, p)
    r = pow(x, (q + 1) // 2, p)
    while t != 1:
        # least i with t^(2^i) = 1
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


def sqrt_mod(x: int, p: int) -> Optional[Tuple[int, int]]:
    """Both square roots of x modulo an odd prime p, smaller root first.

    Returns:
        (r, p - r) ordered ascending, (0, 0) for x = 0, or None when x is a
        non-residue.
    """
    x %= p
    symbol = legendre_symbol(x, p)
    if symbol == 0:
        return (0, 0)
    if symbol < 0:
        return None
    r = _tonelli_shanks(x, p)
    return (min(r, p - r), max(r, p - r))


def solve_univariate_quadratic(a: int, b: int, c: int, p: int) -> List[int]:
    """All x in Z_p with a*x^2 + b*x + c = 0, ascending.

    An identically zero polynomial yields every residue of Z_p.
    """
    require_odd_prime(p)
    a, b, c = a % p, b % p, c % p
    if a == 0:
        if b != 0:
            return [(-c) * inverse(b, p) % p]
        return list(range(p)) if c == 0 else []

    # (2a x + b)^2 = b^2 - 4ac
    roots = sqrt_mod(b * b - 4 * a * c, p)
    if roots is None:
        return []
    inv_2a = inverse(2 * a, p)
    return sorted({(r - b) * inv_2a % p for r in roots})


def dot(x: Sequence[int], y: Sequence[int], m: int) -> int:
    """Inner product of two coefficient vectors mod m."""
    if len(x) != len(y):
        raise DimensionMismatchError(f"vector lengths differ: {len(x)} != {len(y)}")
    return sum(a * b for a, b in zip(x, y)) % m


@dataclass(frozen=True)
class LinearSystem:
    """Rows <coeffs, X> = rhs over a prime field Z_p."""

    p: int
    d: int
    rows: Tuple[Tuple[Vector, int], ...] = ()

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ModulusError(f"linear algebra requires a prime modulus, got {self.p}")
        canonical = []
        for coeffs, rhs in self.rows:
            if len(coeffs) != self.d:
                raise DimensionMismatchError(f"row of length {len(coeffs)} in a system of dimension {self.d}")
            canonical.append((tuple(c % self.p for c in coeffs), rhs % self.p))
        object.__setattr__(self, "rows", tuple(canonical))

    @classmethod
    def of(cls, p: int, d: int, rows: Sequence[Tuple[Sequence[int], int]]) -> "LinearSystem":
        return cls(p, d, tuple((tuple(coeffs), rhs) for coeffs, rhs in rows))

    def homogeneous(self) -> "LinearSystem":
        return LinearSystem(self.p, self.d, tuple((coeffs, 0) for coeffs, _ in self.rows))

    def is_solution(self, x: Sequence[int]) -> bool:
        return all(dot(coeffs, x, self.p) == rhs for coeffs, rhs in self.rows)


def row_reduce(system: LinearSystem) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form of the augmented matrix.

    Pivots are taken column by column (first nonzero column) using the
    smallest available row index, which makes the output deterministic.

    Returns:
        The nonzero reduced rows (augmented, length d + 1) and the pivot
        column of each row.
    """
    p, d = system.p, system.d
    matrix = [list(coeffs) + [rhs] for coeffs, rhs in system.rows]
    pivots: List[int] = []
    top = 0
    for col in range(d):
        pivot_row = next((r for r in range(top, len(matrix)) if matrix[r][col] != 0), None)
        if pivot_row is None:
            continue
        matrix[top], matrix[pivot_row] = matrix[pivot_row], matrix[top]
        scale = inverse(matrix[top][col], p)
        matrix[top] = [v * scale % p for v in matrix[top]]
        for r in range(len(matrix)):
            if r != top and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [(v - factor * w) % p for v, w in zip(matrix[r], matrix[top])]
        pivots.append(col)
        top += 1
        if top == len(matrix):
            break
    return matrix[:top] + [row for row in matrix[top:] if any(row)], pivots


def rank(system: LinearSystem) -> int:
    _, pivots = row_reduce(system.homogeneous())
    return len(pivots)


def particular_solution(system: LinearSystem) -> Optional[Vector]:
    """One solution with every free variable set to 0, or None if inconsistent."""
    reduced, pivots = row_reduce(system)
    for row in reduced[len(pivots) :]:
        # remaining rows have all-zero coefficients
        if row[-1] != 0:
            return None
    x = [0] * system.d
    for row, col in zip(reduced, pivots):
        x[col] = row[-1]
    return tuple(x)


def null_space_basis(system: LinearSystem) -> List[Vector]:
    """Basis of the homogeneous solution space, one vector per free column (ascending)."""
    p, d = system.p, system.d
    reduced, pivots = row_reduce(system.homogeneous())
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(d):
        if free in pivot_set:
            continue
        v = [0] * d
        v[free] = 1
        for row, col in zip(reduced, pivots):
            v[col] = (-row[free]) % p
        basis.append(tuple(v))
    return basis
