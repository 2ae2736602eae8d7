"""Arithmetic in F_q and F_{q^f} with dense coefficient vectors.

Polynomials are tuples of residues, constant term first.  An element of
F_{q^f} is identified with its integer code ``sum(c_i * q**i)``; that code
order is what "smallest" means for moduli and generators, so every choice
made here is reproducible.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import kernels
from .cyclotomy import factorize, is_prime

MAX_DEGREE = 64


# -- polynomial helpers over F_q (lists, constant term first) ---------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, g, q):
    a = [c % q for c in a]
    dg = len(g) - 1
    inv_lead = pow(g[-1], -1, q)
    for deg in range(len(a) - 1, dg - 1, -1):
        c = a[deg] * inv_lead % q
        if c:
            base = deg - dg
            for j, gj in enumerate(g):
                a[base + j] = (a[base + j] - c * gj) % q
    return _trim(a[:dg] if len(a) > dg else a)


def _poly_mulmod(a, b, g, q):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _poly_mod(prod, g, q)


def _poly_powmod(a, e, g, q):
    result = [1]
    base = _poly_mod(list(a), g, q)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, g, q)
        e >>= 1
        if e:
            base = _poly_mulmod(base, base, g, q)
    return result


def _poly_gcd(a, b, q):
    a, b = _trim([c % q for c in a]), _trim([c % q for c in b])
    while b:
        a, b = b, _poly_mod(a, b, q)
    return a


def is_irreducible(g, q: int) -> bool:
    """Rabin's test for a monic polynomial g over F_q (constant term first)."""
    g = [c % q for c in g]
    f = len(g) - 1
    if f < 1 or g[-1] != 1:
        raise ValueError("expected a monic polynomial of positive degree")
    if f == 1:
        return True
    x = [0, 1]
    # X^{q^k} mod g for k = 0..f
    frob = [x]
    for k in range(f):
        frob.append(_poly_powmod(frob[-1], q, g, q))
        if k == 0:
            # cheap early exit: a root in F_q
            h = list(frob[1]) + [0] * 2
            h[1] = (h[1] - 1) % q
            if len(_poly_gcd(h, g, q)) != 1:
                return False
    if _trim(list(frob[f])) != x:
        return False
    for ell in factorize(f):
        h = list(frob[f // ell]) + [0] * 2
        h[1] = (h[1] - 1) % q
        if len(_poly_gcd(h, g, q)) != 1:
            return False
    return True


# -- fields and elements -----------------------------------------------------

class ExtField:
    """The field F_q[X]/(modulus) with q prime and modulus monic irreducible."""

    __slots__ = ("q", "f", "modulus", "card_minus_1", "factorization", "_tail", "_generator", "__weakref__")

    def __init__(self, q: int, f: int, modulus):
        if not is_prime(q):
            raise ValueError(f"q = {q} is not prime")
        if not 1 <= f <= MAX_DEGREE:
            raise ValueError(f"degree f = {f} outside 1..{MAX_DEGREE}")
        modulus = tuple(int(c) % q for c in modulus)
        if len(modulus) != f + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        if not is_irreducible(modulus, q):
            raise ValueError("modulus is reducible")
        self.q = q
        self.f = f
        self.modulus = modulus
        self.card_minus_1 = q**f - 1
        self.factorization = factorize(self.card_minus_1)
        prod = 1
        for ell, e in self.factorization.items():
            prod *= ell**e
        assert prod == self.card_minus_1
        self._tail = modulus[:f]
        self._generator = None

    def __repr__(self):
        return f"ExtField(q={self.q}, f={self.f}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, ExtField) and (self.q, self.modulus) == (other.q, other.modulus)

    def __hash__(self):
        return hash((self.q, self.modulus))

    @property
    def size(self) -> int:
        return self.card_minus_1 + 1

    # constructors
    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to another field")
            return value
        if isinstance(value, int):
            return self.lift(value)
        coeffs = [int(c) % self.q for c in value]
        if len(coeffs) > self.f:
            raise ValueError("too many coefficients")
        return FieldElement(self, tuple(coeffs + [0] * (self.f - len(coeffs))))

    def lift(self, a: int) -> FieldElement:
        """Image of a rational integer in the prime subfield."""
        return FieldElement(self, (a % self.q,) + (0,) * (self.f - 1))

    def one(self) -> FieldElement:
        return self.lift(1)

    def zero(self) -> FieldElement:
        return self.lift(0)

    def from_code(self, code: int) -> FieldElement:
        q = self.q
        coeffs = []
        for _ in range(self.f):
            code, c = divmod(code, q)
            coeffs.append(c)
        return FieldElement(self, tuple(coeffs))

    def random_element(self, rng, nonzero: bool = False) -> FieldElement:
        lo = 1 if nonzero else 0
        return self.from_code(rng.randrange(lo, self.size))

    def generator(self) -> FieldElement:
        if self._generator is None:
            self._generator = find_generator(self)
        return self._generator

    # raw arithmetic on coefficient tuples
    def _mul(self, a, b):
        q = self.q
        if self.f == 1:
            return (a[0] * b[0] % q,)
        f = self.f
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        tail = self._tail
        for deg in range(2 * f - 2, f - 1, -1):
            c = prod[deg] % q
            if c:
                base = deg - f
                for j in range(f):
                    prod[base + j] -= c * tail[j]
        return tuple(x % q for x in prod[:f])

    def _pow(self, a, e):
        if self.f == 1:
            return (pow(a[0], e, self.q),)
        result = (1,) + (0,) * (self.f - 1)
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            e >>= 1
            if e:
                base = self._mul(base, base)
        return result


class FieldElement:
    """An element of an ExtField; a value object."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def __repr__(self):
        if self.field.f == 1:
            return f"{self.coeffs[0]} (mod {self.field.q})"
        return f"FieldElement({list(self.coeffs)} in F_{self.field.q}^{self.field.f})"

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.lift(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.field == other.field

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    @property
    def code(self) -> int:
        q = self.field.q
        code = 0
        for c in reversed(self.coeffs):
            code = code * q + c
        return code

    def __int__(self):
        if any(self.coeffs[1:]):
            raise ValueError("element is not in the prime subfield")
        return self.coeffs[0]

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements of different fields")
            return other.coeffs
        if isinstance(other, int):
            return self.field.lift(other).coeffs
        return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        q = self.field.q
        return FieldElement(self.field, tuple((x + y) % q for x, y in zip(self.coeffs, b)))

    __radd__ = __add__

    def __neg__(self):
        q = self.field.q
        return FieldElement(self.field, tuple(-x % q for x in self.coeffs))

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        q = self.field.q
        return FieldElement(self.field, tuple((x - y) % q for x, y in zip(self.coeffs, b)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field._mul(self.coeffs, b))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e and not self:
            return self
        return FieldElement(self.field, self.field._pow(self.coeffs, e))

    def inverse(self) -> FieldElement:
        if not self:
            raise ZeroDivisionError("zero has no inverse")
        return self ** (self.field.card_minus_1 - 1)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self * FieldElement(self.field, b).inverse()


@lru_cache(maxsize=256)
def build_extension(q: int, f: int) -> ExtField:
    """F_{q^f} with the smallest monic irreducible modulus in code order.

    Candidates X^f + c_{f-1} X^{f-1} + ... + c_0 are scanned by the integer
    ``sum(c_i q^i)`` (c_0 varies fastest).  For f = 1 the modulus is X.
    """
    if not is_prime(q):
        raise ValueError(f"q = {q} is not prime")
    if f == 1:
        return ExtField(q, 1, (0, 1))
    if not 1 <= f <= MAX_DEGREE:
        raise ValueError(f"degree f = {f} outside 1..{MAX_DEGREE}")
    if q >= kernels.MAX_KERNEL_MODULUS:
        return _first_irreducible_slow(q, f)
    checks = [f // ell for ell in factorize(f)]
    code, chunk = 1, 64
    while code < q**f:
        codes = np.arange(code, min(code + chunk, q**f), dtype=np.int64)
        codes = codes[codes % q != 0]  # X divides those
        moduli = np.ones((len(codes), f + 1), dtype=np.int64)
        rest = codes.copy()
        for i in range(f):
            rest, moduli[:, i] = np.divmod(rest, q)
        frob = kernels.frobenius_powers(moduli, q)
        # Rabin: X^(q^f) = X, then gcd(X^(q^(f/l)) - X, g) = 1 for primes l | f
        last = frob[:, f - 1]
        fixed = (last[:, 1] == 1) & (last[:, 0] == 0) & ~last[:, 2:].any(axis=1)
        for k in checks:
            # necessary for the gcd condition below, and cheap to vectorise
            sub = frob[:, k - 1]
            fixed &= (sub[:, 1] != 1) | (sub[:, 0] != 0) | sub[:, 2:].any(axis=1)
        for i in np.flatnonzero(fixed):
            g = moduli[i].tolist()
            ok = True
            for k in checks:
                h = frob[i, k - 1].tolist() + [0]
                h[1] = (h[1] - 1) % q
                if len(_poly_gcd(h, g, q)) != 1:
                    ok = False
                    break
            if ok:
                return ExtField(q, f, tuple(g))
        code += chunk
        chunk = min(chunk * 2, 8192)
    raise AssertionError("no irreducible polynomial found")  # impossible


def _first_irreducible_slow(q, f):
    for code in range(1, q**f):
        if code % q == 0:
            continue
        coeffs = []
        c = code
        for _ in range(f):
            c, digit = divmod(c, q)
            coeffs.append(digit)
        modulus = tuple(coeffs) + (1,)
        if is_irreducible(modulus, q):
            return ExtField(q, f, modulus)
    raise AssertionError("no irreducible polynomial found")  # impossible


def _has_full_order(field: ExtField, coeffs) -> bool:
    one = field.one().coeffs
    n = field.card_minus_1
    return all(field._pow(coeffs, n // ell) != one for ell in field.factorization)


def _frobenius_matrix(field) -> np.ndarray:
    """Row j holds (X^j)^q, so x^q = x @ M for a coefficient row x."""
    q, f = field.q, field.f
    h = field._pow((0, 1) + (0,) * (f - 2), q)
    rows = [field.one().coeffs]
    for _ in range(f - 1):
        rows.append(field._mul(rows[-1], h))
    return np.array(rows, dtype=np.int64)


def _norms(elems, frob, modulus, q):
    # N(x) = x * x^q * ... * x^(q^(f-1)), a constant
    f = elems.shape[1]
    acc = elems
    y = elems
    for _ in range(f - 1):
        nxt = np.zeros_like(y)
        for j in range(f):
            nxt = (nxt + y[:, j:j + 1] * frob[j]) % q
        y = nxt
        acc = kernels.ext_mul_array(acc, y, modulus, q)
    return acc[:, 0]


def _find_generator_batched(field, start, chunk=32):
    # x^((q^f-1)/l) = N(x)^((q-1)/l) when l | q-1, so those primes are
    # tested on norms in F_q; the rest need full exponentiations
    q, f, n = field.q, field.f, field.card_minus_1
    frob = _frobenius_matrix(field)
    small = [ell for ell in field.factorization if (q - 1) % ell == 0]
    large = [ell for ell in field.factorization if (q - 1) % ell]
    code = start
    while code < field.size:
        codes = list(range(code, min(code + chunk, field.size)))
        elems = np.array([[(c // q**i) % q for i in range(f)] for c in codes], dtype=np.int64)
        good = np.ones(len(codes), dtype=bool)
        if small:
            norms = _norms(elems, frob, field.modulus, q)
            for ell in small:
                good &= kernels.powmod_array(norms, (q - 1) // ell, q) != 1
        for ell in large:
            idx = np.flatnonzero(good)
            if not len(idx):
                break
            pw = kernels.ext_powmod_array(elems[idx], n // ell, field.modulus, q)
            good[idx] = (pw[:, 0] != 1) | pw[:, 1:].any(axis=1)
        hits = np.flatnonzero(good)
        if len(hits):
            return field.from_code(codes[hits[0]])
        code += chunk
        chunk = min(2 * chunk, 4096)
    raise AssertionError("multiplicative group is not cyclic?")  # impossible


def find_generator(field: ExtField) -> FieldElement:
    """Smallest element (in code order) of order q^f - 1."""
    if field.card_minus_1 == 1:
        return field.one()
    # constants lie in F_q^x, too small to generate when f > 1
    start = 1 if field.f == 1 else field.q
    if field.f > 1 and field.q < kernels.MAX_KERNEL_MODULUS:
        return _find_generator_batched(field, start)
    for code in range(start, field.size):
        x = field.from_code(code)
        if _has_full_order(field, x.coeffs):
            return x
    raise AssertionError("multiplicative group is not cyclic?")  # impossible


def exact_order(x: FieldElement) -> int:
    if not x:
        raise ValueError("zero has no multiplicative order")
    field = x.field
    one = field.one().coeffs
    n = field.card_minus_1
    for ell in field.factorization:
        while n % ell == 0 and field._pow(x.coeffs, n // ell) == one:
            n //= ell
    return n


def element_of_order(field: ExtField, m: int) -> FieldElement:
    """g ** ((q^f - 1)/m) for the canonical generator g."""
    if m < 1 or field.card_minus_1 % m:
        raise ValueError(f"{m} does not divide q^f - 1 = {field.card_minus_1}")
    return field.generator() ** (field.card_minus_1 // m)


def dlog_small_subgroup(x: FieldElement, z: FieldElement, p: int) -> int:
    """mu in 0..p-1 with x = z**mu, by linear scan; z must have order p."""
    one = x.field.one()
    if z == one or z**p != one:
        raise ValueError("z does not have exact order p")
    if x**p != one:
        raise ValueError("not in mu_p")
    acc = one
    for mu in range(p):
        if acc == x:
            return mu
        acc = acc * z
    raise AssertionError("x^p = 1 but x is not a power of z")  # only if p is not prime
