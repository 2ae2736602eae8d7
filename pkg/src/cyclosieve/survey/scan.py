"""Deterministic, resumable scans of the criteria over a range of primes q.

Work is split per prime q.  Workers (processes) evaluate primes in any
order; the parent consumes results strictly in increasing q, appends the
records to the JSONL sink, merges the integer aggregates and then rewrites
the checkpoint.  A killed run therefore resumes at the first q after
``last_q_done`` and reproduces the same aggregates and record stream.
"""

from __future__ import annotations

import json
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from sympy import primerange

from .. import kernels
from ..criteria import check_special, special_case_for
from ..cyclotomy import CycloParams, mult_order
from ..residue_symbol import make_context
from .engine import main_exponents, prime_frame, summarize_main, xi_choices

SCHEMA_VERSION = 1
MODES = ("main", "special-auto")
POLICIES = ("divisors", "all")


@dataclass
class ScanRecord:
    # field order is the on-disk key order
    p: int
    q: int
    f: int
    n: int
    ordinal: int
    kind: str
    holds: bool
    pass_count: int
    single_pass: bool | None

    def to_json(self) -> str:
        return json.dumps(asdict(self))


FIELDS = tuple(ScanRecord.__dataclass_fields__)


def empty_aggregates(mode: str) -> dict:
    agg = {"primes_done": 0, "evaluations": 0, "holds": 0, "errors": 0}
    if mode == "main":
        agg.update(single_evaluations=0, single_pass=0, ratio_evaluations=0, ratio_pass=0,
                   per_n={}, per_f={})
    else:
        agg.update(per_case={}, equivalence_failures=0, clause_pass={})
    return agg


def _bump(table: dict, key, values) -> None:
    key = str(key)
    row = table.setdefault(key, [0] * len(values))
    for i, v in enumerate(values):
        row[i] += int(v)


def merge_aggregates(total: dict, part: dict) -> dict:
    for key, value in part.items():
        if isinstance(value, dict):
            for sub, row in value.items():
                _bump(total.setdefault(key, {}), sub, row)
        else:
            total[key] = total.get(key, 0) + value
    return total


def canonical_aggregates(agg: dict) -> dict:
    """Same content with every mapping ordered by numeric (then text) key."""
    def order(k):
        return (0, int(k), "") if str(k).lstrip("-").isdigit() else (1, 0, str(k))

    out = {}
    for key, value in agg.items():
        out[key] = {k: value[k] for k in sorted(value, key=order)} if isinstance(value, dict) else value
    return out


# -- per-prime work ------------------------------------------------------------

def _scan_main(p, q, policy, want_records):
    fr = prime_frame(p, q)
    agg = empty_aggregates("main")
    records = []
    choices = xi_choices(p, q, policy)
    if choices:
        mus = main_exponents(p, q, [xi for _, xi, _ in choices], [n for _, _, n in choices])
        summary = summarize_main(mus)
        holds = summary["holds"].tolist()
        counts = summary["pass_count"].tolist()
        single = summary["single"].tolist()
        width = p - 2
        for (ordinal, _, n), h, c, s in zip(choices, holds, counts, single):
            _bump(agg["per_n"], n, (1, h, s))
            if want_records:
                records.append(ScanRecord(p, q, fr.f, n, ordinal, "main-with-k-p-1", bool(h), int(c), bool(s)))
        m = len(choices)
        agg["evaluations"] = m
        agg["holds"] = sum(holds)
        agg["single_evaluations"] = m
        agg["single_pass"] = sum(single)
        agg["ratio_evaluations"] = m * width
        agg["ratio_pass"] = sum(counts)
        _bump(agg["per_f"], fr.f, (m, agg["holds"], agg["single_pass"]))
    return agg, records


def _scan_special(p, q, want_records):
    agg = empty_aggregates("special-auto")
    records = []
    f = mult_order(q, p)
    ns = [1, 2] + ([p, 2 * p] if (q - 1) % p == 0 else [])
    for n in sorted(ns):
        try:
            ctx = make_context(CycloParams.build(p, q, n))
            verdict = check_special(ctx)
        except (ValueError, ArithmeticError):
            agg["errors"] += 1
            continue
        clauses = verdict.aux["clauses"]
        agg["evaluations"] += 1
        agg["holds"] += verdict.holds
        agg["equivalence_failures"] += not verdict.aux["furtwaengler_equivalence"]
        _bump(agg["per_case"], special_case_for(n, p), (1, verdict.holds))
        for name, ok in clauses.items():
            _bump(agg["clause_pass"], name, (1, ok))
        if want_records:
            records.append(ScanRecord(p, q, f, n, n, verdict.kind, verdict.holds,
                                      sum(clauses.values()), None))
    return agg, records


def scan_prime(task):
    """Evaluate one prime; top-level so worker processes can unpickle it."""
    p, q, mode, policy, degrees, want_records = task
    if degrees is not None and mult_order(q, p) not in degrees:
        agg = empty_aggregates(mode)
    elif mode == "main":
        agg, records = _scan_main(p, q, policy, want_records)
        return q, agg, [r.to_json() for r in records]
    else:
        agg, records = _scan_special(p, q, want_records)
        return q, agg, [r.to_json() for r in records]
    return q, agg, []


# -- orchestration ---------------------------------------------------------------

def scan_policy(p, q_min, q_max, mode, policy, degrees) -> dict:
    return {"mode": mode, "policy": policy, "q_min": q_min, "q_max": q_max,
            "degrees": sorted(degrees) if degrees else None}


def load_checkpoint(path: str, p: int, policy: dict) -> dict | None:
    if not path or not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION or doc.get("p") != p or doc.get("policy") != policy:
        raise ValueError(f"checkpoint {path} belongs to a different scan")
    return doc


def write_checkpoint(path: str, p: int, policy: dict, last_q: int | None, agg: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "p": p, "policy": policy,
           "last_q_done": last_q, "aggregates": canonical_aggregates(agg)}
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _truncate_records(path: str, last_q: int | None) -> None:
    """Drop records of primes past the checkpoint (written before a kill)."""
    if not path or not os.path.exists(path):
        return
    keep = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.endswith("\n"):
                break  # torn final line
            if last_q is not None and json.loads(line)["q"] <= last_q:
                keep.append(line)
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(keep)


def _warm_kernels():
    # compile (or load cached) numba kernels once before forking workers
    import numpy as np

    kernels.powmod_array(np.arange(3), 5, 7)
    kernels.ext_powmod_array(np.ones((2, 2), dtype=np.int64), 5, (2, 0, 1), 5)
    kernels.match_powers(np.zeros((1, 1)), np.zeros((1, 2, 1)))


def satisfaction_scan(p: int, q_min: int, q_max: int, mode: str = "main", policy: str = "divisors",
                      degrees=None, workers: int = 1, checkpoint: str | None = None,
                      records_path: str | None = None, record_sink=None, stop_after: int | None = None) -> dict:
    """Scan primes q in [q_min, q_max] (q != p, q odd) and aggregate verdicts.

    ``record_sink`` receives each JSON record line in q order; ``records_path``
    appends them to a JSONL file kept consistent with ``checkpoint``.
    ``stop_after`` processes at most that many primes (an orderly stop that
    leaves a resumable checkpoint).  Returns the checkpoint-shaped document.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    if q_max >= kernels.MAX_KERNEL_MODULUS:
        raise ValueError("q_max must be below 2**31")
    degrees = set(degrees) if degrees else None
    pol = scan_policy(p, q_min, q_max, mode, policy, degrees)
    agg = empty_aggregates(mode)
    last_q = None
    done = load_checkpoint(checkpoint, p, pol)
    if done is not None:
        last_q = done["last_q_done"]
        agg = merge_aggregates(empty_aggregates(mode), done["aggregates"])
    if records_path:
        if done is None:
            open(records_path, "w").close()
        else:
            _truncate_records(records_path, last_q)
    start = max(q_min, 3) if last_q is None else last_q + 1
    primes = [int(q) for q in primerange(start, q_max + 1) if q != p]
    if stop_after is not None:
        primes = primes[:stop_after]
    want = record_sink is not None or records_path is not None
    tasks = [(p, q, mode, policy, degrees, want) for q in primes]
    if checkpoint and done is None:
        write_checkpoint(checkpoint, p, pol, None, agg)

    out_fh = open(records_path, "a", encoding="utf-8") if records_path else None
    try:
        if workers > 1 and len(tasks) > 1:
            _warm_kernels()
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                chunk = max(1, min(16, len(tasks) // (4 * workers) or 1))
                results = pool.map(scan_prime, tasks, chunksize=chunk)
                last_q = _consume(results, agg, out_fh, record_sink, checkpoint, p, pol, last_q)
        else:
            last_q = _consume(map(scan_prime, tasks), agg, out_fh, record_sink, checkpoint, p, pol, last_q)
    finally:
        if out_fh:
            out_fh.close()
    return {"schema_version": SCHEMA_VERSION, "p": p, "policy": pol, "last_q_done": last_q,
            "aggregates": canonical_aggregates(agg)}


def _consume(results, agg, out_fh, sink, checkpoint, p, pol, last_q):
    for q, part, lines in results:
        if out_fh:
            out_fh.writelines(line + "\n" for line in lines)
            out_fh.flush()
        if sink is not None:
            for line in lines:
                sink(line)
        merge_aggregates(agg, part)
        agg["primes_done"] += 1
        last_q = q
        if checkpoint:
            write_checkpoint(checkpoint, p, pol, last_q, agg)
    return last_q


def derived_rates(doc: dict) -> dict:
    """Pass fractions with their heuristic expectations (main mode only).

    For f = 1 the p - 2 ratios behave like independent uniform symbols, so a
    full pass has probability p^-(p-2).  For f > 1 Frobenius ties
    mu_{qk} = q mu_k, which forces every mu_k = 0 and gives p^-((p-1)/f).
    A single ratio passes with probability 1/p in both regimes.
    """
    p = doc["p"]
    agg = doc["aggregates"]
    if doc["policy"]["mode"] != "main":
        return {}
    out = {
        "single_rate": agg["single_pass"] / agg["single_evaluations"] if agg["single_evaluations"] else None,
        "single_expected": 1 / p,
        "full_rate": agg["holds"] / agg["evaluations"] if agg["evaluations"] else None,
        "per_f": {},
    }
    for f, (ev, full, single) in agg["per_f"].items():
        f = int(f)
        expected = p ** -(p - 2) if f == 1 else p ** -((p - 1) // f)
        out["per_f"][str(f)] = {"evaluations": ev, "full_rate": full / ev if ev else None,
                                "full_expected": expected,
                                "single_rate": single / ev if ev else None}
    return out
