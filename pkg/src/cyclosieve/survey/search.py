"""Prime lists and searches built on the criteria: even-order primes,
generator searches over F_q^x, and Kummer-rank lower bounds."""

from __future__ import annotations

import json
import math
from collections import Counter
from importlib import resources

from sympy import primerange

from ..criteria import check_main
from ..cyclotomy import CycloParams, euler_phi, is_prime, mult_order
from ..residue_symbol import galois_transport, make_context
from .engine import main_exponents, prime_frame, summarize_main, xi_choices


def even_order_primes(p: int, bound: int) -> list[int]:
    """Primes q < bound, q != p, of even order f mod p with q^f != 1 mod p^2."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    out = []
    for q in primerange(2, bound):
        if q == p:
            continue
        f = mult_order(q, p)
        if f % 2 == 0 and pow(q, f, p * p) != 1:
            out.append(int(q))
    return out


def load_published_list() -> dict:
    text = resources.files("cyclosieve").joinpath("data/published_491.json").read_text(encoding="utf-8")
    return json.loads(text)


def compare_with_published(computed: list[int], published: list[int]) -> dict:
    """Item-by-item comparison after deduplicating the published values."""
    counts = Counter(published)
    pub = set(published)
    comp = set(computed)
    return {
        "match": comp == pub,
        "published_duplicates": sorted(v for v, c in counts.items() if c > 1),
        "only_computed": sorted(comp - pub),
        "only_published": sorted(pub - comp),
        "computed_count": len(comp),
        "published_distinct_count": len(pub),
    }


def hypothesis_search(p: int, q: int) -> dict:
    """Check the main congruence at every prime of Q(xi_{q-1}) above q.

    Each generator g of F_q^x models one such prime (xi_{q-1} -> g).  Returns
    whether some generator passes and which ones do.
    """
    if not is_prime(q) or q < 3 or q == p:
        raise ValueError(f"q = {q} must be an odd prime different from p")
    n = q - 1
    result = {"p": p, "q": q, "n": n, "f": mult_order(q, p), "generators": euler_phi(n),
              "exists_ideal": False, "passing_generators": [], "excluded": None}
    if n == 2 * p:
        result["excluded"] = "n = 2p"
        return result
    choices = xi_choices(p, q, "generators", exclude=set())
    mus = main_exponents(p, q, [xi for _, xi, _ in choices], [m for _, _, m in choices])
    holds = summarize_main(mus)["holds"]
    passing = sorted(xi for (_, xi, _), ok in zip(choices, holds.tolist()) if ok)
    result["passing_generators"] = passing
    result["exists_ideal"] = bool(passing)
    result["special_case_applicable"] = n in (1, 2, p)
    return result


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    basis: dict[int, list[int]] = {}  # pivot column -> reduced row
    for row in rows:
        v = [x % p for x in row]
        for col, b in basis.items():
            if v[col]:
                c = v[col]
                v = [(x - c * y) % p for x, y in zip(v, b)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            continue
        inv = pow(v[piv], -1, p)
        v = [x * inv % p for x in v]
        for col, b in list(basis.items()):
            if b[piv]:
                c = b[piv]
                basis[col] = [(x - c * y) % p for x, y in zip(b, v)]
        basis[piv] = v
    return len(basis)


def estimate_kummer_rank(p: int, n: int, trials: int, offset: int = 0, max_prime: int = 10**8) -> dict:
    """Certified lower bound for delta from symbol vectors at split primes.

    Uses the primes l = 1 mod lcm(n, p) in increasing order, skipping the
    first ``offset``.  Each contributes (mu_k - mu_1)_{k=2..p-1} over Z/pZ;
    the rank of the stacked rows is returned with its running history.
    """
    if trials < p:
        raise ValueError("trials must be at least p")
    if n == 2 * p:
        raise ValueError("n = 2p has a vanishing eps_{p-1}")
    step = math.lcm(n, p)
    rows: list[list[int]] = []
    history: list[int] = []
    primes: list[int] = []
    skipped = 0
    ell = 1
    while len(primes) < trials:
        ell += step
        if ell > max_prime:
            break
        if not is_prime(ell) or ell == p:
            continue
        if skipped < offset:
            skipped += 1
            continue
        ctx = make_context(CycloParams.build(p, ell, n))
        mus = [mu for _, mu in check_main(ctx).witnesses]
        rows.append([(m - mus[0]) % p for m in mus[1:]])
        primes.append(ell)
        history.append(_rank_mod_p(rows, p))
    rank = history[-1] if history else 0
    return {
        "p": p,
        "n": n,
        "trials": len(primes),
        "offset": offset,
        "rank": rank,
        "history": history,
        "primes": primes,
        "partial": len(primes) < trials,
        "width": p - 2,
        "bound_phi_n": euler_phi(n) / p**rank,
    }


def probability_bounds(p: int, n: int, rank: int, q: int | None = None) -> dict:
    """phi(n)/p^delta and, when q is known, phi(q-1)/p^delta."""
    out = {"phi_n_over_p_delta": euler_phi(n) / p**rank}
    if q is not None:
        out["phi_q_minus_1_over_p_delta"] = euler_phi(q - 1) / p**rank
    return out


def frobenius_orbit_check(p: int, q: int) -> bool:
    """Verdicts at (g, z) and (g, z^q) agree for every generator g of F_q^x."""
    fr = prime_frame(p, q)
    if q - 1 == 2 * p or fr.f == 1:
        return True  # excluded, or z^q = z
    for _, xi, n in xi_choices(p, q, "generators", exclude=set()):
        ctx = make_context(CycloParams.build(p, q, n), xi=xi)
        if check_main(ctx).holds != check_main(galois_transport(ctx, q % p)).holds:
            return False
    return True
