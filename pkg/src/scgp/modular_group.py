"""Exact arithmetic in SL(2, Z_n) and the closed-form counting functions.

Everything in this module is integer-exact: group and coset sizes come from
the prime factorization of the modulus, never from floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

ENUMERATION_GUARD = 12  # n^4 candidate matrices; 12^4 = 20736 stays trivial


def check_modulus(n: int) -> int:
    """Validate a modulus (any integer n >= 2) and return it."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"modulus must be an int, got {type(n).__name__}")
    if n < 2:
        raise ValueError(f"modulus must be >= 2, got {n}")
    return n


@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of n, ascending, by trial division."""
    check_modulus(n)
    primes = []
    m, p = n, 2
    while p * p <= m:
        if m % p:
            p += 1
        else:
            primes.append(p)
            while m % p == 0:
                m //= p
    if m > 1:
        primes.append(m)
    return tuple(primes)


@dataclass(frozen=True, slots=True)
class Mat2:
    """A 2x2 matrix over Z_n with determinant 1.

    Entries are canonical residues in [0, n), so equality, hashing and
    lexicographic comparison of (a, b, c, d) are all well defined.
    """

    a: int
    b: int
    c: int
    d: int
    n: int

    def __post_init__(self) -> None:
        check_modulus(self.n)
        n = self.n
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not 0 <= v < n:
                raise ValueError(f"entry {name}={v} not reduced mod {n}")
        if (self.a * self.d - self.b * self.c) % n != 1:
            raise ValueError(f"matrix {self.entries()} has det != 1 mod {n}")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def from_entries(cls, a: int, b: int, c: int, d: int, n: int) -> "Mat2":
        """Build a Mat2, reducing arbitrary integer entries mod n."""
        check_modulus(n)
        return cls(a % n, b % n, c % n, d % n, n)

    @classmethod
    def identity(cls, n: int) -> "Mat2":
        return cls(1, 0, 0, 1, check_modulus(n))


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    """Matrix product x*y with entries reduced mod n.

    Raises ValueError if the operands carry different moduli.
    """
    if x.n != y.n:
        raise ValueError(f"modulus mismatch: {x.n} != {y.n}")
    n = x.n
    return Mat2(
        (x.a * y.a + x.b * y.c) % n,
        (x.a * y.b + x.b * y.d) % n,
        (x.c * y.a + x.d * y.c) % n,
        (x.c * y.b + x.d * y.d) % n,
        n,
    )


def mat_inverse(x: Mat2) -> Mat2:
    """Inverse via the adjugate: det 1 makes it (d, -b; -c, a) mod n."""
    n = x.n
    return Mat2((x.d) % n, (-x.b) % n, (-x.c) % n, (x.a) % n, n)


def group_order(n: int) -> int:
    """|SL(2, Z_n)| = n^3 * prod_{p | n} (1 - 1/p^2), evaluated exactly.

    Computed as n^3 * prod(p^2 - 1) / prod(p^2) with exact integer division
    (p^2 divides n^3 for every prime p | n, so the division never truncates).
    """
    check_modulus(n)
    order = n**3
    for p in prime_factors(n):
        order, rem = divmod(order, p * p)
        assert rem == 0, f"internal error: p^2 does not divide running order (n={n}, p={p})"
        order *= p * p - 1
    return order


def euler_phi(n: int) -> int:
    """Euler totient of n via factorization."""
    check_modulus(n)
    phi = n
    for p in prime_factors(n):
        phi = phi // p * (p - 1)
    return phi


def coset_count(n: int) -> int:
    """Index [SL(2, Z_n) : H] = |G| / phi(n) for the diagonal subgroup H.

    Algebraically equal to n^2 * prod_{p | n} (1 + 1/p); the division is
    exact and asserted.
    """
    q, rem = divmod(group_order(n), euler_phi(n))
    if rem != 0:
        raise AssertionError(f"internal error: phi({n}) does not divide group order")
    return q


def units(n: int) -> list[int]:
    """Units of Z_n in ascending order, paired later into diag(a, a^-1)."""
    check_modulus(n)
    primes = prime_factors(n)
    return [a for a in range(1, n) if all(a % p for p in primes)]


def enumerate_group(n: int, guard: int = ENUMERATION_GUARD) -> list[Mat2]:
    """All of SL(2, Z_n) in lexicographic (a, b, c, d) order.

    Brute force over n^4 candidates; intended as an exhaustive realization
    for small n, guarded so callers cannot accidentally request huge scans.
    """
    check_modulus(n)
    if n > guard:
        raise ValueError(
            f"enumerate_group guard exceeded: n={n} > {guard} "
            f"(would scan {n**4} candidate matrices)"
        )
    return [
        Mat2(a, b, c, d, n)
        for a, b, c, d in product(range(n), repeat=4)
        if (a * d - b * c) % n == 1
    ]
