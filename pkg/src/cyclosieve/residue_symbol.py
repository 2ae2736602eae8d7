"""Embeddings of Q(xi, zeta) into F_{q^f'} and the p-th power residue symbol.

An :class:`EmbeddingContext` fixes images ``xi_bar`` (order n) and ``z``
(order p) in a finite field; each such choice corresponds to one prime of
Q(xi, zeta) above q.  The symbol of alpha is the exponent mu in Z/pZ with
``alpha**kappa == z**mu``, kappa = (|F| - 1)/p.

For r = 0 and a context not coming from a pair, F may be larger than
F_{q^f} (it must hold both mu_n and mu_p); the exponent then uses the actual
field size and ``extended_field`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache

from .cyclotomy import CycloParams, IntPair, order_mod, split_n
from .finite_field import ExtField, FieldElement, build_extension, element_of_order, exact_order


def crt_exponent(d: int, p: int, r: int, residue: int, d_residue: int) -> int:
    """The t in [0, d p^r) with t = d_residue (mod d) and t = residue (mod p^r)."""
    pr = p**r
    n = d * pr
    # d and p^r are coprime
    if d == 1:
        return residue % pr
    return (d_residue * pr * pow(pr, -1, d) + residue * d * pow(d, -1, pr)) % n


@lru_cache(maxsize=4096)
def forced_zeta_exponent(n: int, p: int) -> int:
    """t with xi**t of exact order p when p | n: t = 0 mod d, t = p^(r-1) mod p^r."""
    d, r = split_n(n, p)
    if r < 1:
        raise ValueError("zeta is a power of xi only when p | n")
    return crt_exponent(d, p, r, p ** (r - 1), 0)


def zeta_exponent(params: CycloParams) -> int:
    return forced_zeta_exponent(params.n, params.p)


@dataclass(frozen=True, eq=False)
class EmbeddingContext:
    params: CycloParams
    field: ExtField
    xi_bar: FieldElement
    z: FieldElement
    u_bar: FieldElement | None = None
    v_bar: FieldElement | None = None
    # cumulative Galois twist applied by galois_transport (1 = none)
    transport: int = 1
    extended_field: bool = False

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def kappa(self) -> int:
        """Exponent (|F| - 1)/p for the context's field."""
        return self.field.card_minus_1 // self.params.p

    @cached_property
    def _z_table(self) -> dict:
        table = {}
        acc = self.field.one()
        for j in range(self.params.p):
            table[acc.coeffs] = j
            acc = acc * self.z
        return table

    @property
    def z_powers(self) -> list[FieldElement]:
        table = self._z_table
        out = [None] * len(table)
        for coeffs, j in table.items():
            out[j] = FieldElement(self.field, coeffs)
        return out

    @property
    def pair_relation_holds(self) -> bool | None:
        if self.u_bar is None:
            return None
        return self.u_bar * self.xi_bar == self.v_bar

    def element(self, value) -> FieldElement:
        return self.field(value)


def make_context(params: CycloParams, pair: IntPair | None = None, z_choice: int | None = None,
                 xi=None) -> EmbeddingContext:
    """Build the embedding for a frame.

    With a pair attached, xi_bar = v/u in F_q.  Otherwise xi_bar is the
    canonical element of order n.  When p | n, z is forced to xi_bar**t;
    when p does not divide n, z is the canonical order-p element raised to
    ``z_choice`` (default 1), one choice per prime above the fixed ideal.
    ``xi`` pins xi_bar to a given element of order n instead.
    """
    p, q, n = params.p, params.q, params.n
    if pair is None:
        pair = params.pair
    f_field = order_mod(q, math.lcm(n, p))
    fld = build_extension(q, f_field)
    u_bar = v_bar = None
    if pair is not None:
        if (pair.u * pair.v) % q == 0:
            raise ValueError("pair degenerate at q")
        u_bar, v_bar = fld.lift(pair.u), fld.lift(pair.v)
        xi_bar = fld.lift(pair.v * pow(pair.u, -1, q))
        if exact_order(xi_bar) != n:
            raise ValueError("pair/params inconsistent")
    elif xi is not None:
        xi_bar = fld(xi)
        if exact_order(xi_bar) != n:
            raise ValueError(f"xi does not have order n = {n}")
    else:
        xi_bar = element_of_order(fld, n)
    if params.r >= 1:
        if z_choice not in (None, 1):
            raise ValueError("z is determined by xi when p | n")
        z = xi_bar ** zeta_exponent(params)
    else:
        j = 1 if z_choice is None else z_choice
        if j % p == 0:
            raise ValueError("z_choice must be a unit modulo p")
        z = element_of_order(fld, p) ** (j % p)
    return EmbeddingContext(params, fld, xi_bar, z, u_bar, v_bar, 1, f_field > params.f)


def symbol(ctx: EmbeddingContext, alpha) -> int:
    """Exponent mu in 0..p-1 of the p-th power residue symbol of alpha."""
    a = ctx.field(alpha)
    if not a:
        raise ValueError("symbol undefined: alpha vanishes at this prime")
    powered = a.field._pow(a.coeffs, ctx.kappa)
    try:
        return ctx._z_table[powered]
    except KeyError:
        raise AssertionError("alpha^kappa is not a p-th root of unity") from None


def galois_transport(ctx: EmbeddingContext, j: int) -> EmbeddingContext:
    """Context for the conjugate prime under zeta -> zeta^j.

    For r = 0, xi_bar is kept and z -> z^j.  For r >= 1 (xi generates zeta)
    xi_bar -> xi_bar^j' with j' = j mod p^r, j' = 1 mod d, which gives
    z -> z^j; this moves the underlying ideal (q, u xi - v) as well.
    """
    p = ctx.params.p
    if j % p == 0:
        raise ValueError("j must be a unit modulo p")
    j %= p
    params = ctx.params
    if params.r == 0:
        xi_bar = ctx.xi_bar
    else:
        jp = crt_exponent(params.d, p, params.r, j, 1)
        xi_bar = ctx.xi_bar**jp
    z = ctx.z**j
    return replace(ctx, xi_bar=xi_bar, z=z, transport=ctx.transport * j % p)
