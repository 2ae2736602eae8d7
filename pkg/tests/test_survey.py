import json
import math

import numpy as np
import pytest
from sympy import primerange

from cyclosieve import CycloParams, check_main, make_context
from cyclosieve.cyclotomy import mult_order
from cyclosieve.survey import bounds_report, even_order_primes, estimate_kummer_rank, hypothesis_search, is_regular
from cyclosieve.survey.bounds import grh_bounds, irregular_indices, minkowski_bound
from cyclosieve.survey.engine import main_exponents, prime_frame, xi_choices
from cyclosieve.survey.scan import FIELDS, derived_rates, satisfaction_scan
from cyclosieve.survey.search import compare_with_published, frobenius_orbit_check, load_published_list


# -- bounds -------------------------------------------------------------------

def test_minkowski_p5():
    direct = (4 / math.pi) ** 2 * (24 / 256) * math.sqrt(125)
    assert abs(bounds_report(5).minkowski - 1.699) < 1e-3
    assert math.isclose(bounds_report(5).minkowski, direct, rel_tol=1e-12)


def test_minkowski_no_overflow():
    rep = bounds_report(9973, with_regularity=False)
    assert isinstance(rep.minkowski, str) and "e+" in rep.minkowski
    assert rep.log_minkowski > 700
    assert isinstance(minkowski_bound(101), float)


def test_regularity():
    assert is_regular(5) and is_regular(7)
    assert not is_regular(37)
    assert irregular_indices(37) == [32]
    assert irregular_indices(59) == [44]
    assert irregular_indices(67) == [58]
    assert irregular_indices(157) == [62, 110]
    assert [p for p in primerange(3, 110) if not is_regular(p)] == [37, 59, 67, 101, 103]


def test_grh_pair():
    for p in (3, 5, 101, 9973):
        g, s = grh_bounds(p)
        assert math.isclose(g, s, rel_tol=1e-9)


def test_bounds_rejects():
    for bad in (4, 9, 2, 10007):
        with pytest.raises(ValueError):
            bounds_report(bad)


# -- prime lists ----------------------------------------------------------------

def _even_order_oracle(p, bound):
    out = []
    for q in range(2, bound):
        if q == p or any(q % d == 0 for d in range(2, int(q**0.5) + 1)):
            continue
        f = next(e for e in range(1, p) if pow(q, e, p) == 1)
        if f % 2 == 0 and pow(q, f, p * p) != 1:
            out.append(q)
    return out


def test_even_order_small():
    assert even_order_primes(5, 5) == [2, 3] == _even_order_oracle(5, 5)
    assert even_order_primes(491, 3) == _even_order_oracle(491, 3)
    assert even_order_primes(7, 500) == _even_order_oracle(7, 500)
    with pytest.raises(ValueError):
        even_order_primes(5, 1)


def test_even_order_491_prefix():
    got = even_order_primes(491, 491)
    assert got[:11] == [2, 7, 19, 23, 29, 47, 53, 59, 67, 73, 89]
    assert got == _even_order_oracle(491, 491)


def test_published_asset():
    pub = load_published_list()
    assert pub["p"] == 491 and pub["bound"] == 491
    assert len(pub["values"]) == 48
    assert pub["values"].count(193) == 2 and pub["values"].count(439) == 2


def test_compare_with_published():
    cmp = compare_with_published([2, 3, 5, 11], [2, 3, 3, 7, 11])
    assert cmp["match"] is False
    assert cmp["published_duplicates"] == [3]
    assert cmp["only_computed"] == [5]
    assert cmp["only_published"] == [7]


# -- engine --------------------------------------------------------------------

@pytest.mark.parametrize("q", [31, 41, 61, 11, 7, 13, 19, 29, 101, 131])
def test_engine_matches_check_main(q):
    p = 5
    choices = xi_choices(p, q, "all")
    mus = main_exponents(p, q, [x for _, x, _ in choices], [n for _, _, n in choices])
    for (ordinal, xi, n), row in zip(choices, mus):
        ctx = make_context(CycloParams.build(p, q, n), xi=xi)
        v = check_main(ctx)
        assert [mu for _, mu in v.witnesses] == row[1:].tolist()
        assert row[0] == (-1 if n == 2 else row[0])


def test_engine_p7_extension():
    for q in (3, 5, 13, 43, 29):
        choices = xi_choices(7, q, "divisors")
        mus = main_exponents(7, q, [x for _, x, _ in choices], [n for _, _, n in choices])
        for (_, xi, n), row in zip(choices, mus):
            ctx = make_context(CycloParams.build(7, q, n), xi=xi)
            assert [mu for _, mu in check_main(ctx).witnesses] == row[1:].tolist()


def test_prime_frame():
    fr = prime_frame(5, 31)
    assert (fr.f, fr.kappa, fr.generator) == (1, 6, 3)
    assert fr.z_base == (pow(3, 6, 31),)


def test_xi_choices_policies():
    assert [n for n, _, _ in xi_choices(5, 31, "divisors")] == [3, 5, 6, 15, 30]
    assert len(xi_choices(5, 31, "generators", exclude=set())) == 8
    assert len(xi_choices(5, 31, "all", exclude=set())) == 29
    with pytest.raises(ValueError):
        xi_choices(5, 31, "bogus")


# -- searches ----------------------------------------------------------------------

def test_hypothesis_q3():
    res = hypothesis_search(5, 3)
    assert res["generators"] == 1 and res["n"] == 2 and res["f"] == 4
    ctx = make_context(CycloParams.build(5, 3, 2))
    assert res["exists_ideal"] == check_main(ctx).holds


@pytest.mark.parametrize("q", [31, 41, 61, 71, 7, 13, 17, 23])
def test_hypothesis_oracle(q):
    res = hypothesis_search(5, q)
    if res["excluded"]:
        return
    passing = []
    for g in range(1, q):
        if mult_order(g, q) == q - 1:
            ctx = make_context(CycloParams.build(5, q, q - 1), xi=g)
            if check_main(ctx).holds:
                passing.append(g)
    assert res["passing_generators"] == passing
    assert res["exists_ideal"] == bool(passing)


def test_hypothesis_excludes_2p():
    assert hypothesis_search(5, 11)["excluded"] == "n = 2p"
    with pytest.raises(ValueError):
        hypothesis_search(5, 5)


def test_frobenius_orbit_consistency():
    for q in primerange(3, 200):
        if q != 5:
            assert frobenius_orbit_check(5, q)


def test_kummer_rank_properties():
    a = estimate_kummer_rank(5, 12, 50)
    assert a["rank"] <= 3 == a["width"]
    assert all(x <= y for x, y in zip(a["history"], a["history"][1:]))
    b = estimate_kummer_rank(5, 12, 50, offset=50)
    assert not set(a["primes"]) & set(b["primes"])
    assert a["rank"] == b["rank"]
    with pytest.raises(ValueError):
        estimate_kummer_rank(5, 12, 3)


def test_kummer_rank_partial():
    res = estimate_kummer_rank(5, 12, 50, max_prime=200)
    assert res["partial"] and res["trials"] < 50


# -- scans ---------------------------------------------------------------------------

def test_empty_scan():
    lines = []
    doc = satisfaction_scan(5, 24, 28, record_sink=lines.append)
    assert lines == []
    assert doc["aggregates"]["evaluations"] == 0 and doc["last_q_done"] is None


def test_scan_records_shape():
    lines = []
    satisfaction_scan(5, 7, 100, record_sink=lines.append)
    recs = [json.loads(x) for x in lines]
    assert all(tuple(r) == FIELDS for r in recs)
    qs = [r["q"] for r in recs]
    assert qs == sorted(qs)
    keys = {(r["p"], r["q"], r["ordinal"], r["kind"]) for r in recs}
    assert len(keys) == len(recs)


def test_scan_workers_identical():
    a, b = [], []
    da = satisfaction_scan(5, 7, 400, record_sink=a.append)
    db = satisfaction_scan(5, 7, 400, record_sink=b.append, workers=3)
    assert a == b and da == db


def test_scan_resume(tmp_path):
    full = satisfaction_scan(5, 7, 600)
    ck, rec = tmp_path / "ck.json", tmp_path / "rec.jsonl"
    part = satisfaction_scan(5, 7, 600, checkpoint=str(ck), records_path=str(rec), stop_after=20)
    assert part["last_q_done"] < 600
    # simulate a torn write after the checkpoint
    with open(rec, "a") as fh:
        fh.write('{"p": 5, "q": 99999, "f": 1')
    done = satisfaction_scan(5, 7, 600, checkpoint=str(ck), records_path=str(rec))
    assert json.dumps(done["aggregates"]) == json.dumps(full["aggregates"])
    lines = []
    satisfaction_scan(5, 7, 600, record_sink=lines.append)
    assert rec.read_text().splitlines() == lines


def test_scan_checkpoint_mismatch(tmp_path):
    ck = tmp_path / "ck.json"
    satisfaction_scan(5, 7, 50, checkpoint=str(ck))
    with pytest.raises(ValueError, match="different scan"):
        satisfaction_scan(5, 7, 60, checkpoint=str(ck))


def test_scan_special_mode():
    doc = satisfaction_scan(5, 3, 300, mode="special-auto")
    agg = doc["aggregates"]
    assert agg["equivalence_failures"] == 0
    assert set(agg["per_case"]) == {"n-1", "n-2", "n-p", "n-2p"}


def test_scan_degree_filter_and_rates():
    doc = satisfaction_scan(5, 7, 500, policy="all", degrees=[1])
    assert list(doc["aggregates"]["per_f"]) == ["1"]
    rates = derived_rates(doc)
    assert rates["per_f"]["1"]["full_expected"] == 5**-3


def test_scan_rejects():
    with pytest.raises(ValueError):
        satisfaction_scan(5, 7, 50, mode="other")
    with pytest.raises(ValueError):
        satisfaction_scan(5, 7, 50, policy="other")


def test_frobenius_tie_in_f_gt_1():
    # for f > 1, mu_{qk} = q mu_k on every row (q acts on z by z -> z^q)
    for q in (7, 13, 19, 29):
        choices = xi_choices(5, q, "all")
        mus = main_exponents(5, q, [x for _, x, _ in choices], [n for _, _, n in choices])
        for row in mus:
            for k in range(1, 5):
                assert row[q * k % 5] == q * row[k] % 5
