"""Minkowski and GRH bounds for Q(zeta_p), and regularity of p."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from ..cyclotomy import is_prime
from ..kernels import bernoulli_even_mod_p

MAX_P = 10**4


@dataclass
class BoundsReport:
    p: int
    minkowski: float | str
    log_minkowski: float
    grh: float
    grh_simplified: float
    regular: bool | None
    irregular_indices: list[int] = field(default_factory=list)

    @property
    def c_p(self):
        # no sharper constant is available; the Minkowski bound stands in for it
        return self.minkowski

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "minkowski": self.minkowski,
            "log_minkowski": self.log_minkowski,
            "c_p": self.c_p,
            "grh": self.grh,
            "grh_simplified": self.grh_simplified,
            "regular": self.regular,
            "irregular_indices": list(self.irregular_indices),
        }


def _check_p(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p = {p} must be an odd prime")
    if p > MAX_P:
        raise ValueError(f"p = {p} exceeds {MAX_P}")


def log_minkowski_bound(p: int) -> float:
    """log of (4/pi)^((p-1)/2) (p-1)!/(p-1)^(p-1) sqrt(p^(p-2))."""
    return ((p - 1) / 2 * math.log(4 / math.pi) + math.lgamma(p)
            - (p - 1) * math.log(p - 1) + (p - 2) / 2 * math.log(p))


def minkowski_bound(p: int) -> float | str:
    """The bound as a float, or a decimal string when it overflows a double."""
    lg = log_minkowski_bound(p)
    if lg < 700:
        return math.exp(lg)
    return mpmath.nstr(mpmath.exp(mpmath.mpf(lg)), 12)


def grh_bounds(p: int) -> tuple[float, float]:
    """(12 (log Delta)^2 with Delta = p^(p-2), 12 (p-2)^2 (log p)^2)."""
    log_disc = math.log(p ** (p - 2))  # exact big integer, then log
    return 12 * log_disc**2, 12 * (p - 2) ** 2 * math.log(p) ** 2


def irregular_indices(p: int) -> list[int]:
    """Even k in [2, p-3] with B_k = 0 mod p."""
    residues = bernoulli_even_mod_p(p)
    return [2 * i for i in range(1, len(residues)) if residues[i] == 0]


@lru_cache(maxsize=None)
def is_regular(p: int) -> bool:
    _check_p(p)
    return not irregular_indices(p)


def bounds_report(p: int, with_regularity: bool = True) -> BoundsReport:
    _check_p(p)
    grh, grh_s = grh_bounds(p)
    irr = irregular_indices(p) if with_regularity else []
    return BoundsReport(
        p=p,
        minkowski=minkowski_bound(p),
        log_minkowski=log_minkowski_bound(p),
        grh=grh,
        grh_simplified=grh_s,
        regular=(not irr) if with_regularity else None,
        irregular_indices=irr,
    )
