"""Vectorised evaluation of the eps-family symbols for many xi at one prime q.

This is the hot path of every scan.  It computes the same exponents as
``criteria.check_main`` on contexts built by ``make_context`` with
xi_bar in F_q, but for a whole batch at once through ``kernels``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import kernels
from ..cyclotomy import divisors, mult_order
from ..finite_field import build_extension, element_of_order, find_generator
from ..residue_symbol import forced_zeta_exponent


@dataclass(frozen=True)
class PrimeFrame:
    p: int
    q: int
    f: int
    kappa: int
    modulus: tuple
    generator: int  # smallest primitive root mod q
    z_base: tuple  # canonical order-p element of F_{q^f}, as coefficients


@lru_cache(maxsize=64)
def prime_frame(p: int, q: int) -> PrimeFrame:
    if q >= kernels.MAX_KERNEL_MODULUS:
        raise ValueError("q too large for the batch engine")
    f = mult_order(q, p)
    field = build_extension(q, f)
    g = int(find_generator(build_extension(q, 1)))
    z = element_of_order(field, p)
    return PrimeFrame(p, q, f, field.card_minus_1 // p, field.modulus, g, z.coeffs)


def main_exponents(p: int, q: int, xis, orders) -> np.ndarray:
    """Symbol exponents of eps_k = 1 + xi z^k for k = 0..p-1, one row per xi.

    ``xis`` are residues in F_q^x with multiplicative orders ``orders``.
    When p | n the row uses z = xi^t; otherwise the canonical z of F_{q^f}.
    Entries are -1 where eps_k = 0.
    """
    fr = prime_frame(p, q)
    xis = np.asarray(xis, dtype=np.int64)
    orders = list(orders)
    nrows = len(orders)
    f = fr.f
    if nrows == 0:
        return np.zeros((0, p), dtype=np.int64)
    table = np.zeros((nrows, p, f), dtype=np.int64)
    if f == 1:
        z = np.empty(nrows, dtype=np.int64)
        zb = fr.z_base[0]
        for i, (xi, n) in enumerate(zip(xis.tolist(), orders)):
            if n % p == 0:
                z[i] = pow(xi, forced_zeta_exponent(n, p), q)
            else:
                z[i] = zb
        table[:, 0, 0] = 1
        for k in range(1, p):
            table[:, k, 0] = table[:, k - 1, 0] * z % q
    else:
        if any(n % p == 0 for n in orders):
            raise ValueError("p | n forces q = 1 mod p")
        field = build_extension(q, f)
        zf = field(list(fr.z_base))
        acc = field.one()
        row = np.zeros((p, f), dtype=np.int64)
        for k in range(p):
            row[k] = acc.coeffs
            acc = acc * zf
        table[:] = row
    eps = table * xis[:, None, None] % q
    eps[:, :, 0] = (eps[:, :, 0] + 1) % q
    flat = eps.reshape(nrows * p, f)
    if f == 1:
        powered = kernels.powmod_array(flat[:, 0], fr.kappa, q)[:, None]
    else:
        powered = kernels.ext_powmod_array(flat, fr.kappa, fr.modulus, q)
    lookup = np.repeat(table, p, axis=0)
    mus = kernels.match_powers(powered, lookup)
    zero = ~flat.any(axis=1)
    mus[zero] = -1
    return mus.reshape(nrows, p)


def summarize_main(mus: np.ndarray) -> dict[str, np.ndarray]:
    """Row-wise verdict data for the ratio family eps_k/eps_1, k = 2..p-1."""
    ratios = mus[:, 2:] == mus[:, 1:2]
    return {
        "holds": ratios.all(axis=1),
        "pass_count": ratios.sum(axis=1),
        "single": ratios[:, 0],
    }


def xi_choices(p: int, q: int, policy: str, exclude=None) -> list[tuple[int, int, int]]:
    """(ordinal, xi, n) triples for the embedding sampling policy.

    ``divisors``: one canonical xi = g^((q-1)/n) per divisor n of q - 1
    (ordinal n).  ``all``: every xi = g^e, 1 <= e <= q - 2 (ordinal e).
    ``generators``: xi = g^e with gcd(e, q-1) = 1.
    """
    fr = prime_frame(p, q)
    g = fr.generator
    if exclude is None:
        exclude = {1, 2, 2 * p}
    out = []
    if policy == "divisors":
        for n in divisors(q - 1):
            if n not in exclude:
                out.append((n, pow(g, (q - 1) // n, q), n))
    elif policy in ("all", "generators"):
        xi = 1
        for e in range(1, q - 1):
            xi = xi * g % q
            n = (q - 1) // math.gcd(e, q - 1)
            if policy == "generators" and n != q - 1:
                continue
            if n not in exclude:
                out.append((e, xi, n))
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return out
