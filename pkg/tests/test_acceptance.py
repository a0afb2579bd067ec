"""Acceptance criteria.

Each test prints one ``criterion N: PASS|FAIL`` line, bypassing output
capture, and asserts both the property and its runtime bound.  The file
also runs as a script.
"""

import math
import sys
import time

import numpy as np
import pytest

from helpers import linear_polar_conditions, lattice, polar_suite
from pmono import finite_op as fo
from pmono import instances, oracle
from pmono import linear_rel as lr
from pmono import product_op as po
from pmono import subspace as ss
from pmono.finite_op import FiniteOperator, Pair
from pmono.linear_rel import LinearRelation

_CAPSYS = []


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    _CAPSYS[:] = [capsys]
    yield
    _CAPSYS.clear()


def _say(line):
    if _CAPSYS:
        with _CAPSYS[0].disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)


def _report(n, ok, elapsed, bound, detail=""):
    within = elapsed < bound
    status = "PASS" if ok and within else "FAIL"
    line = (f"criterion {n}: {status} ({elapsed:.3f}s, bound {bound}s)"
            + (f" {detail}" if detail else ""))
    _say(line)
    assert ok, line
    assert within, line


def test_criterion_01_three_chain_sums():
    chain = [Pair([0.0], [0.0]), Pair([1.0], [1.0]), Pair([-1.0], [1.0])]
    fo.cyclic_sum(chain), fo.inverse_cyclic_sum(chain)          # warm caches
    t0 = time.perf_counter()
    a = fo.cyclic_sum(chain)
    b = fo.inverse_cyclic_sum(chain)
    elapsed = time.perf_counter() - t0
    _report(1, a == -1.0 and b == 1.0, elapsed, 1e-3,
            f"cyclic={a} inverse={b}")


def test_criterion_02_singleton_polar_region():
    T = instances.named("singleton")
    tol = 1e-9
    t0 = time.perf_counter()
    masks = [fo.polar_region_grid(T, p, [(-2.0, 2.0, 0.05)], tol)
             for p in (1, 2, 3)]
    elapsed = time.perf_counter() - t0
    pts = masks[0].points
    expected = pts[:, 0] * pts[:, 1] >= -tol
    ok = (len(pts) == 81 * 81
          and all(np.array_equal(m.member, expected) for m in masks))
    _report(2, ok, elapsed, 5.0, f"{len(pts)} cells x 3 orders")


def test_criterion_03_engine_oracle():
    kinds = ("any", "affine", "gradient")
    mismatches = 0
    fitz_err = 0.0
    holds = 0
    t0 = time.perf_counter()
    for seed in range(200):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        p = int(rng.integers(1, 5))
        T = instances.random_finite(rng, n, d, kinds[seed % 3])
        tol = fo.default_tol(T)
        eng = fo.is_p_monotone(T, p, tol)
        ref = oracle.brute_p_monotone(T, p, tol)
        mismatches += eng.decision != ref.decision
        mismatches += not math.isclose(eng.value, ref.value, abs_tol=1e-12)
        holds += eng.holds
        for _ in range(3):
            q = Pair(rng.standard_normal(d), rng.standard_normal(d))
            fitz_err = max(fitz_err, abs(fo.fitzpatrick_p(T, p, q)
                                         - oracle.brute_fitzpatrick(T, p, q)))
    elapsed = time.perf_counter() - t0
    _report(3, mismatches == 0 and fitz_err <= 1e-12, elapsed, 120.0,
            f"mismatches={mismatches} holds={holds}/200 "
            f"max|dF|={fitz_err:.1e}")


def test_criterion_04_polar_calculus():
    totals = {}
    t0 = time.perf_counter()
    for seed in range(50):
        for k, v in polar_suite(seed).items():
            totals[k] = totals.get(k, 0) + v
    elapsed = time.perf_counter() - t0
    _report(4, sum(totals.values()) == 0, elapsed, 180.0,
            " ".join(f"{k}={v}" for k, v in totals.items()))


def _random_relation(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    fam = ["monotone", "maximal", "general"][seed % 3]
    return instances.random_linear(rng, d, fam), rng


def test_criterion_05_linear_polar_conditions():
    disagree = 0
    pm = 0
    t0 = time.perf_counter()
    for seed in range(100):
        T, rng = _random_relation(seed)
        p = int(rng.integers(1, 4))
        conds = linear_polar_conditions(T, p, rng)
        disagree += len(set(conds.values())) != 1
        pm += conds["eigen"]
    elapsed = time.perf_counter() - t0
    _report(5, disagree == 0, elapsed, 120.0,
            f"disagreements={disagree} p-monotone={pm}/100")


def _non_maximal(rng):
    """p-monotone for every p, proper domain, T(0) strictly inside dom^perp."""
    d = int(rng.integers(2, 5))
    r = int(rng.integers(0, d))
    D = ss.span(rng.standard_normal((r, d)), n=d) if r else ss.Subspace.zero(d)
    G = rng.standard_normal((d, d))
    A = G @ G.T
    perp = ss.ortho_complement(D).basis
    m = int(rng.integers(0, perp.shape[0]))
    N = rng.standard_normal((m, perp.shape[0])) @ perp if m else np.zeros((0, d))
    rows = [np.concatenate([u, A @ u]) for u in D.basis]
    rows += [np.concatenate([np.zeros(d), v]) for v in N]
    return LinearRelation(d, ss.span(rows, n=2 * d))


def test_criterion_06_maximalization():
    bad = 0
    used = 0
    t0 = time.perf_counter()
    for seed in range(100):
        T, rng = _random_relation(seed)
        p = int(rng.integers(1, 4))
        if lr.is_p_monotone_linear(T, p).holds:
            used += 1
            bad += not lr.is_maximal_p_monotone_linear(lr.maximalize(T), p).holds
        S = _non_maximal(rng)
        bad += not lr.is_maximal_p_monotone_linear(S, p).fails
        bad += not lr.is_maximal_p_monotone_linear(lr.maximalize(S), p).holds
    elapsed = time.perf_counter() - t0
    _report(6, bad == 0, elapsed, 60.0,
            f"violations={bad} maximalized={used} constructed=100")


def test_criterion_07_rotation():
    t0 = time.perf_counter()
    R = instances.named("rotation")
    mono = lr.is_monotone_linear(R).holds
    maximal = lr.is_maximal_p_monotone_linear(R, 1).holds
    two = lr.is_p_monotone_linear(R, 2).fails
    S = instances.rotation_samples()
    v = fo.is_p_monotone(S, 2)
    cert = fo.cyclic_sum([S[i] for i in v.certificate]) if v.fails else None
    elapsed = time.perf_counter() - t0
    _report(7, mono and maximal and two and cert == 2.0, elapsed, 1.0,
            f"certificate sum={cert}")


def test_criterion_08_double_polar_empty():
    T = instances.named("singleton")
    pts = lattice(-2.0, 2.0, 0.1, 2)
    not_excluded = 0
    t0 = time.perf_counter()
    for z in pts:
        q = Pair(z[:1], z[1:])
        v = fo.falsify_double_polar(T, 2, q, budget=100_000, seed=0)
        ok = v.fails and fo.cyclic_sum([q] + v.certificate) > v.tol and all(
            fo.polar_membership(T, 2, y).holds for y in v.certificate)
        not_excluded += not ok
    elapsed = time.perf_counter() - t0
    _report(8, len(pts) == 41 * 41 and not_excluded == 0, elapsed, 60.0,
            f"{len(pts) - not_excluded}/{len(pts)} candidates excluded")


def test_criterion_09_product_suite():
    failures = {"transfer": 0, "maxtp": 0, "inclusion": 0, "bb": 0}
    fns = {"transfer": po.verify_transfer, "maxtp": po.verify_maxtp,
           "inclusion": po.verify_adjoint_inclusion,
           "bb": po.brezis_browder_verify}
    t0 = time.perf_counter()
    for seed in range(100):
        T, rng = _random_relation(seed)
        p = int(rng.integers(1, 4))
        for name, fn in fns.items():
            failures[name] += fn(T, p)["equivalence"] != "pass"
    elapsed = time.perf_counter() - t0
    _report(9, sum(failures.values()) == 0, elapsed, 300.0,
            " ".join(f"{k}={v}" for k, v in failures.items()))


def test_criterion_10_cone_counterexample():
    t0 = time.perf_counter()
    T = FiniteOperator([Pair([1.0], [1.0]), Pair([2.0], [8.0])])
    a = fo.ray_scale(T, 1, 0.5)
    b = fo.ray_scale(T, 0, 2.0)
    val = float((a.x - b.x) @ (a.xstar - b.xstar))
    elapsed = time.perf_counter() - t0
    _report(10, a == Pair([1.0], [4.0]) and b == Pair([2.0], [2.0])
            and val == -2.0, elapsed, 1.0, f"pairing={val}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
