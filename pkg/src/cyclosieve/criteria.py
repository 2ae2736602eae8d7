"""Congruence criteria on the family eps_k = 1 + xi zeta^k.

Every check works inside the residue field of one embedding and returns a
:class:`CriterionVerdict` carrying the symbol exponent of each eps_k it
used, so callers can count component-level passes as well as full passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cyclotomy import IntPair, attach_pair, is_prime, split_n
from .finite_field import FieldElement
from .residue_symbol import EmbeddingContext, make_context, symbol

SPECIAL_CASES = {"n-p": "p", "n-1": 1, "n-2p": "2p", "n-2": 2}

CYCLOTOMIC_UNIT = "cyclotomic-unit"
ONE_MINUS_ZETA = "(1-zeta)-type"
ZERO = "zero"
TWO = "two"
OTHER_NONUNIT = "nonunit-prime-power"


def _is_prime_power(m: int) -> bool:
    if m < 2:
        return False
    ell = min(ell for ell in range(2, m + 1) if m % ell == 0)
    while m % ell == 0:
        m //= ell
    return m == 1


def classify_epsilon(n: int, p: int, k: int) -> str:
    """Arithmetic type of 1 + xi zeta^k for xi of order n = d p^r.

    With omega = xi zeta^k, 1 + omega = 1 - (-omega) is 0 when -omega = 1,
    2 when -omega = -1, and otherwise a unit exactly when the order of
    -omega is not a prime power.  For k >= 1 this reproduces the d > 2 /
    d = 2 / d = 1 split; at k = 0 it also catches 1 + psi for d = 4, 6, ...
    """
    # order of omega: write omega = psi * eta, psi of order d, eta of p-power order
    d, r = split_n(n, p)
    pr = p**r
    # eta = zeta_r * zeta^k = zeta_r^(1 + k p^(r-1)) when r >= 1, else zeta^k
    if r >= 1:
        e = (1 + k * p ** (r - 1)) % pr
        eta_order = pr // math.gcd(e, pr)
    else:
        eta_order = 1 if k % p == 0 else p
    # -psi has order 2d (d odd), d/2 (d = 2 mod 4) or d (4 | d)
    if d % 2:
        minus_psi = 2 * d
    elif d % 4 == 2:
        minus_psi = d // 2
    else:
        minus_psi = d
    order = minus_psi * eta_order  # coprime factors
    if order == 1:
        return ZERO
    if order == 2:
        return TWO
    if not _is_prime_power(order):
        return CYCLOTOMIC_UNIT
    return ONE_MINUS_ZETA if order % p == 0 else OTHER_NONUNIT


@dataclass
class EpsilonFamily:
    ctx: EmbeddingContext
    eps: list[FieldElement]
    classification: list[str]

    @property
    def zero_indices(self) -> list[int]:
        return [k for k, e in enumerate(self.eps) if not e]


@dataclass
class CriterionVerdict:
    kind: str
    holds: bool
    witnesses: list[tuple[int, int]] = field(default_factory=list)
    aux: dict = field(default_factory=dict)
    failed: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "holds": self.holds,
            "witnesses": [[k, mu] for k, mu in self.witnesses],
            "failed": list(self.failed),
            "aux": self.aux,
        }


def epsilon_family(ctx: EmbeddingContext) -> EpsilonFamily:
    p = ctx.params.p
    powers = ctx.z_powers
    eps = [1 + ctx.xi_bar * powers[k] for k in range(p)]
    kinds = [classify_epsilon(ctx.params.n, p, k) for k in range(p)]
    return EpsilonFamily(ctx, eps, kinds)


def _mus(ctx, fam, ks):
    out = []
    excluded = []
    for k in ks:
        if not fam.eps[k]:
            excluded.append(k)
            continue
        out.append((k, symbol(ctx, fam.eps[k])))
    return out, excluded


def check_main(ctx: EmbeddingContext, include_last: bool = True) -> CriterionVerdict:
    """All ratios eps_k / eps_1 are p-th powers at the context's prime.

    k runs over 2..p-1 (2..p-2 with ``include_last=False``); any k with
    eps_k = 0 is dropped and listed in ``aux["excluded_k"]``.
    """
    params = ctx.params
    p, n = params.p, params.n
    if n == 2 * p:
        raise ValueError("excluded case n = 2p, use check_special")
    fam = epsilon_family(ctx)
    last = p - 1 if include_last else p - 2
    witnesses, excluded = _mus(ctx, fam, range(1, last + 1))
    mu1 = witnesses[0][1]
    bad = [k for k, mu in witnesses if mu != mu1]
    aux = {
        "mu_1": mu1,
        "excluded_k": excluded,
        "ratio_failures": bad,
        "special_case_applicable": n in (1, 2, p),
        "kappa_mod_p": ctx.kappa % p,
    }
    if include_last:
        head = [mu for k, mu in witnesses if k <= p - 2]
        aux["holds_k_le_p_minus_2"] = all(mu == mu1 for mu in head)
    if ctx.u_bar is not None:
        aux["symbol(u)"] = symbol(ctx, ctx.u_bar)
    kind = "main-with-k-p-1" if include_last else "main"
    return CriterionVerdict(kind, not bad, witnesses, aux, ["ratio congruence"] if bad else [])


def _case_n(case: str, p: int) -> int:
    if case not in SPECIAL_CASES:
        raise ValueError(f"unknown special case {case!r}")
    tag = SPECIAL_CASES[case]
    return {"p": p, "2p": 2 * p}.get(tag, tag)


def special_case_for(n: int, p: int) -> str | None:
    for case in SPECIAL_CASES:
        if _case_n(case, p) == n:
            return case
    return None


def check_special(ctx: EmbeddingContext, case: str | None = None) -> CriterionVerdict:
    """Furtwaengler-type conditions for n in {p, 1, 2p, 2}.

    n = p, 1:   q^f = 1 mod p^2, symbol(1 + z^j) = 0 for all j, and the
                symbols of u, v and 2 vanish.
    n = 2p, 2:  q^f = 1 mod p^2, symbol(1 - z^j) + symbol(p) = 0 for all j,
                and symbol(u) = symbol(v) = -symbol(1 - z).
    u/v clauses are only evaluated when the context carries a pair.
    """
    params = ctx.params
    p, q, n = params.p, params.q, params.n
    if case is None:
        case = special_case_for(n, p)
        if case is None:
            raise ValueError(f"n = {n} is not a special case for p = {p}")
    if _case_n(case, p) != n:
        raise ValueError(f"case {case} does not match n = {n}")
    qf = q**ctx.field.f
    z_mu = symbol(ctx, ctx.z)
    clauses = {}
    aux = {"q^f mod p^2": qf % (p * p), "symbol(z)": z_mu, "kappa_mod_p": ctx.kappa % p}
    clauses["q^f = 1 mod p^2"] = qf % (p * p) == 1
    aux["furtwaengler_equivalence"] = clauses["q^f = 1 mod p^2"] == (z_mu == 0)
    powers = ctx.z_powers
    witnesses = []
    if case in ("n-p", "n-1"):
        for j in range(1, p):
            witnesses.append((j, symbol(ctx, 1 + powers[j])))
        clauses["symbol(1+z^j) = 0"] = all(mu == 0 for _, mu in witnesses)
        two = symbol(ctx, 2)
        aux["symbol(2)"] = two
        clauses["symbol(2) = 0"] = two == 0
        if ctx.u_bar is not None:
            su, sv = symbol(ctx, ctx.u_bar), symbol(ctx, ctx.v_bar)
            aux["symbol(u)"], aux["symbol(v)"] = su, sv
            clauses["symbol(u) = 0"] = su == 0
            clauses["symbol(v) = 0"] = sv == 0
    else:
        sp = symbol(ctx, p)
        aux["symbol(p)"] = sp
        for j in range(1, p):
            witnesses.append((j, symbol(ctx, 1 - powers[j])))
        clauses["symbol(1-z^j) + symbol(p) = 0"] = all((mu + sp) % p == 0 for _, mu in witnesses)
        s1 = witnesses[0][1]
        aux["symbol(1-z)+symbol(p)"] = (s1 + sp) % p
        if ctx.u_bar is not None:
            su, sv = symbol(ctx, ctx.u_bar), symbol(ctx, ctx.v_bar)
            aux["symbol(u)"], aux["symbol(v)"] = su, sv
            clauses["symbol(u) = -symbol(1-z)"] = (su + s1) % p == 0
            clauses["symbol(v) = -symbol(1-z)"] = (sv + s1) % p == 0
    aux["clauses"] = clauses
    failed = [name for name, ok in clauses.items() if not ok]
    return CriterionVerdict(f"special-{case}", not failed, witnesses, aux, failed)


def check_twisted(ctx: EmbeddingContext, m: int) -> CriterionVerdict:
    """(zeta^{-k^m} eps_k / zeta^{-1} eps_1)^kappa = 1 for k = 2..p-2.

    In exponents: mu_k - kappa k^m = mu_1 - kappa (mod p).
    """
    p = ctx.params.p
    if m % p == 0:
        raise ValueError("m must be nonzero modulo p")
    fam = epsilon_family(ctx)
    witnesses, excluded = _mus(ctx, fam, range(1, p - 1))
    if excluded:
        raise ValueError(f"eps_k vanishes for k in {excluded}")
    kap = ctx.kappa % p
    mu1 = witnesses[0][1]
    target = (mu1 - kap) % p
    bad = [k for k, mu in witnesses[1:] if (mu - kap * pow(k, m, p)) % p != target]
    aux = {"m": m, "kappa_mod_p": kap, "mu_1": mu1, "twist_failures": bad}
    return CriterionVerdict("twisted", not bad, witnesses, aux, ["twisted congruence"] if bad else [])


def twisted_passing_exponents(ctx: EmbeddingContext) -> list[int]:
    p = ctx.params.p
    return [m for m in range(1, p) if check_twisted(ctx, m).holds]


def product_identity(ctx: EmbeddingContext) -> bool:
    """prod_{j=0}^{p-1} (1 + xi z^j) == 1 + xi^p in the residue field."""
    acc = ctx.field.one()
    for e in epsilon_family(ctx).eps:
        acc = acc * e
    return acc == 1 + ctx.xi_bar ** ctx.params.p


def norm_identity(ctx: EmbeddingContext) -> bool | None:
    """u^{p-1} prod_{j=1}^{p-1} eps_j == (u^p + v^p)/(u + v) mod q, when a pair is attached."""
    pair = ctx.params.pair
    if pair is None or ctx.u_bar is None or ctx.transport != 1:
        return None
    p = ctx.params.p
    acc = ctx.u_bar ** (p - 1)
    for e in epsilon_family(ctx).eps[1:]:
        acc = acc * e
    u, v = pair.u, pair.v
    # (u^p + v^p)/(u + v) = sum (-1)^i u^(p-1-i) v^i, valid even when u + v = 0
    norm = sum((-1) ** i * u ** (p - 1 - i) * v**i for i in range(p))
    return acc == ctx.field.lift(norm)


# -- audits ------------------------------------------------------------------

P_PRINCIPAL_POLICIES = ("regular", "always", "never")


def p_principal_assumed(p: int, policy: str = "regular") -> bool:
    if policy == "always":
        return True
    if policy == "never":
        return False
    if policy == "regular":
        from .survey.bounds import is_regular

        return is_regular(p)
    raise ValueError(f"unknown p-principal policy {policy!r}")


def audit_pair(p: int, pair, q_list, assume_p_principal: str = "regular") -> list[dict]:
    """Run every applicable criterion for (u, v) at each q in q_list.

    Degenerate q (not prime, dividing p u v, ...) are reported inline.
    """
    if not isinstance(pair, IntPair):
        pair = IntPair(*pair)
    applicable = p_principal_assumed(p, assume_p_principal)
    dossier = []
    for q in q_list:
        entry = {"q": q, "status": "ok", "error": None, "params": None, "verdicts": [],
                 "first_violation": None, "applicable": applicable,
                 "second_case": pair.v % p == 0}
        try:
            if not is_prime(q) or q in (2, p):
                raise ValueError(f"q = {q} must be an odd prime different from p")
            params = attach_pair(p, q, pair)
            ctx = make_context(params)
        except (ValueError, ArithmeticError) as exc:
            entry["status"] = "degenerate"
            entry["error"] = str(exc)
            dossier.append(entry)
            continue
        entry["params"] = params_dict(params)
        verdicts = []
        if special_case_for(params.n, p) is not None:
            verdicts.append(check_special(ctx))
        if params.n != 2 * p:
            verdicts.append(check_main(ctx))
        entry["verdicts"] = [v.to_dict() for v in verdicts]
        for v in verdicts:
            if v.failed:
                entry["first_violation"] = f"{v.kind}: {v.failed[0]}"
                break
        dossier.append(entry)
    return dossier


def audit_summary(dossier: list[dict]) -> str:
    for entry in dossier:
        if entry["first_violation"]:
            note = "" if entry["applicable"] else " (p-principality not assumed)"
            return f"q = {entry['q']}: {entry['first_violation']} violated{note}"
    return "no necessary condition violated"


def params_dict(params) -> dict:
    out = {"p": params.p, "q": params.q, "f": params.f, "kappa": str(params.kappa),
           "n": params.n, "d": params.d, "r": params.r}
    if params.pair is not None:
        out["u"], out["v"] = str(params.pair.u), str(params.pair.v)
        out["phi_check"] = params.phi_check
    return out
