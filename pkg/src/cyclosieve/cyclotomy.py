"""Cyclotomic polynomials, multiplicative orders and the (p, q, n) frame."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

from sympy import factorint, isprime

MAX_DISTINCT_PRIMES = 8
DEFAULT_SIZE_BUDGET_BITS = 10**6


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer as ``{prime: exponent}``."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    return dict(_factor_cached(n))


def euler_phi(m: int) -> int:
    result = m
    for ell in factorize(m):
        result = result // ell * (ell - 1)
    return result


def divisors(m: int) -> list[int]:
    divs = [1]
    for ell, e in factorize(m).items():
        divs = [d * ell**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def _mobius(m: int) -> int:
    fac = factorize(m)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=512)
def _cyclotomic_cached(m: int) -> tuple[int, ...]:
    num = [1]
    den = []
    for d in divisors(m):
        mu = _mobius(m // d)
        if mu == 1:
            num.append(d)
        elif mu == -1:
            den.append(d)
    poly = [1]
    for d in num[1:]:
        # multiply by (X^d - 1)
        out = [0] * (len(poly) + d)
        for i, c in enumerate(poly):
            out[i] -= c
            out[i + d] += c
        poly = out
    for d in den:
        # exact division by (X^d - 1): a[i] = b[i-d] - b[i]
        size = len(poly) - d
        quo = [0] * size
        for i in range(size):
            quo[i] = (quo[i - d] if i >= d else 0) - poly[i]
        poly = quo
    return tuple(poly)


def cyclotomic_poly(m: int) -> list[int]:
    """Integer coefficients of the m-th cyclotomic polynomial, constant term first.

    >>> cyclotomic_poly(6)
    [1, -1, 1]
    """
    if m < 1:
        raise ValueError("cyclotomic_poly needs m >= 1")
    if len(factorize(m)) > MAX_DISTINCT_PRIMES:
        raise ValueError(f"m = {m} has more than {MAX_DISTINCT_PRIMES} distinct prime factors")
    return list(_cyclotomic_cached(m))


def phi_homogeneous(m: int, a: int, b: int) -> int:
    """b**phi(m) * Phi_m(a/b), evaluated exactly as sum c_i a^i b^(phi(m)-i)."""
    if a == 0 and b == 0:
        raise ValueError("phi_homogeneous undefined at (0, 0)")
    coeffs = cyclotomic_poly(m)
    deg = len(coeffs) - 1
    total = 0
    a_pow = 1
    for i, c in enumerate(coeffs):
        if c:
            total += c * a_pow * b ** (deg - i)
        a_pow *= a
    return total


def order_mod(a: int, m: int) -> int:
    """Multiplicative order of a modulo any m >= 2 (gcd(a, m) must be 1)."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 1
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit modulo {m}")
    n = euler_phi(m)
    a %= m
    for ell in factorize(n):
        while n % ell == 0 and pow(a, n // ell, m) == 1:
            n //= ell
    return n


def mult_order(a: int, q: int) -> int:
    """Order of a in (Z/qZ)^x for a prime q, by descent over the primes of q - 1."""
    if a % q == 0:
        raise ValueError(f"{a} is 0 modulo {q}")
    n = q - 1
    a %= q
    for ell in factorize(n) if n > 1 else ():
        while n % ell == 0 and pow(a, n // ell, q) == 1:
            n //= ell
    return n


def _require_odd_prime(p: int, name: str = "p") -> None:
    if p < 3 or not is_prime(p):
        raise ValueError(f"{name} = {p} must be an odd prime")


def residue_frame(p: int, q: int) -> tuple[int, int]:
    """Return (f, kappa): f the order of q mod p and kappa = (q^f - 1)/p."""
    _require_odd_prime(p)
    if q == p:
        raise ValueError("q must differ from p")
    if not is_prime(q):
        raise ValueError(f"q = {q} must be prime")
    f = mult_order(q, p)
    return f, (q**f - 1) // p


def split_n(n: int, p: int) -> tuple[int, int]:
    """Write n = d * p**r with p not dividing d."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = 0
    while n % p == 0:
        n //= p
        r += 1
    return n, r


@dataclass(frozen=True)
class IntPair:
    u: int
    v: int

    def __post_init__(self):
        if self.u == 0 or self.v == 0:
            raise ValueError("u and v must be nonzero")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError(f"gcd(u, v) = {math.gcd(self.u, self.v)} != 1")


@dataclass(frozen=True)
class CycloParams:
    """Arithmetic frame tying q to the exponent p and a ratio order n = d * p**r."""

    p: int
    q: int
    f: int
    kappa: int
    n: int
    d: int
    r: int
    pair: IntPair | None = None
    # None when the q | Phi_n(u, v) cross-check was skipped for size.
    phi_check: bool | None = None

    @classmethod
    def build(cls, p: int, q: int, n: int) -> CycloParams:
        if q == 2:
            raise ValueError("q must be odd")
        f, kappa = residue_frame(p, q)
        if n < 1 or n % q == 0:
            raise ValueError(f"n = {n} must be positive and prime to q")
        d, r = split_n(n, p)
        return cls(p, q, f, kappa, n, d, r)

    @property
    def n_divides_q_minus_1(self) -> bool:
        return (self.q - 1) % self.n == 0


def attach_pair(p: int, q: int, pair: IntPair, size_budget_bits: int = DEFAULT_SIZE_BUDGET_BITS) -> CycloParams:
    """Frame for a coprime pair (u, v): n is the order of v/u modulo q."""
    if not isinstance(pair, IntPair):
        pair = IntPair(*pair)
    _require_odd_prime(p)
    if q in (2, p) or not is_prime(q):
        raise ValueError(f"q = {q} must be an odd prime different from p")
    if (pair.u * pair.v) % q == 0:
        raise ValueError("pair degenerate at q")
    ratio = pair.v * pow(pair.u, -1, q) % q
    n = mult_order(ratio, q)
    params = CycloParams.build(p, q, n)
    size = euler_phi(n) * math.log2(max(abs(pair.u), abs(pair.v), 2))
    check = None
    if size <= size_budget_bits:
        check = phi_homogeneous(n, pair.u, pair.v) % q == 0
        if not check:
            raise ArithmeticError(f"q = {q} does not divide Phi_{n}(u, v)")
    return replace(params, pair=pair, phi_check=check)
