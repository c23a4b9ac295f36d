"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed even without -s).
All checks are exact; there is no tolerance anywhere.
"""
import random
import time
import warnings
from fractions import Fraction

import pytest

from gcmax.certificate import (check_max_nonneg, check_nf_condition, helly_check, solve_lp, solve_recursive,
                               solve_two, verify_certificate)
from gcmax.convexity import fn_add, fn_max, fn_scale, is_convex
from gcmax.core import ConvexityParams, Fn
from gcmax.generate import (MAGMA_KINDS, STRATEGIES, GenerationError, Stats, generate_family,
                            generate_kkt_instance, make_magma)
from gcmax.kkt import DegenerateMultiplierWarning, kkt_multipliers, kkt_verify_converse, solve_mp_bruteforce
from gcmax.opcalc import Base, Compose, Swap, power_term, ratio, realize_table, synthesize_ratio, \
    term_family, transport_failures

pytestmark = pytest.mark.acceptance

PARAMS = [ConvexityParams(1, 1), ConvexityParams(Fraction(1, 2), Fraction(1, 2)), ConvexityParams(1, 2),
          ConvexityParams(3, Fraction(1, 3))]
SEED = 20241017


@pytest.fixture
def report(capsys):
    def emit(tag: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
    return emit


# -- shared corpus for the first two criteria -----------------------------------

@pytest.fixture(scope="module")
def corpus():
    r = random.Random(SEED)
    items, stats, fallbacks = [], Stats(), 0
    k = 0
    while len(items) < 1200:
        kind = MAGMA_KINDS[k % 3]
        params = PARAMS[(k // 3) % 4]
        first = STRATEGIES[(k // 12) % 3]
        k += 1
        mg = make_magma(kind, r.randint(1, 6), r)
        n = r.randint(1, 4)
        order = [first] + [s for s in STRATEGIES if s != first]
        for i, strategy in enumerate(order):
            try:
                fns = generate_family(mg, params, n, strategy, r, stats=stats, tries=20)
            except GenerationError:
                continue
            fallbacks += i > 0
            items.append((mg, params, fns, kind, strategy))
            break
    return items, fallbacks


def test_c1_maximum_theorem(corpus, report):
    items, fallbacks = corpus
    t0 = time.perf_counter()
    failures = []
    for mg, params, fns, _, _ in items:
        assert all(is_convex(mg, params.p, params.q, f) for f in fns)
        assert check_max_nonneg(fns)[0]
        cert = solve_lp(fns)
        if not (cert.feasible and verify_certificate(fns, cert.lam) == (cert.margin, True) and cert.margin >= 0):
            failures.append((mg.op_table, params, fns))
    kinds = {it[3] for it in items}
    pqs = {(it[1].p, it[1].q) for it in items}
    ok = not failures and len(items) >= 1000 and len(kinds) == 3 and len(pqs) == 4
    report("C1 maximum theorem", ok,
           f"{len(items)} instances, {len(failures)} failures, {fallbacks} strategy fallbacks, "
           f"solve+verify {time.perf_counter() - t0:.1f}s")
    assert ok, failures[:3]


def test_c2_solver_agreement(corpus, report):
    items, _ = corpus
    bad = 0
    twos = 0
    for mg, params, fns, _, _ in items:
        lp = solve_lp(fns)
        rec = solve_recursive(fns, mg, params)
        agree = lp.feasible == rec.feasible
        for c in (lp, rec):
            if c.feasible:
                margin, valid = verify_certificate(fns, c.lam)
                agree &= valid and margin >= 0
        if len(fns) == 2:
            twos += 1
            two = solve_two(*fns)
            agree &= two.feasible == lp.feasible and (not two.feasible or verify_certificate(fns, two.lam)[1])
        bad += not agree
    report("C2 solver agreement", bad == 0, f"{len(items)} instances ({twos} with n=2), {bad} disagreements")
    assert bad == 0


def test_c3_nf_equivalence(report):
    r = random.Random(SEED + 3)
    bad, feasible = 0, 0
    total = 600
    for _ in range(total):
        n, m = r.randint(1, 3), r.randint(1, 4)
        fns = [Fn.of([r.randint(-3, 3) for _ in range(m)]) for _ in range(n)]
        lp = solve_lp(fns).feasible
        feasible += lp
        bad += not (lp == check_nf_condition(fns).holds == helly_check(fns).holds)
    report("C3 tuple condition and Helly equivalence", bad == 0,
           f"{total} families ({feasible} feasible), {bad} discrepancies")
    assert bad == 0


def test_c4_counterexample(report, counterexample):
    f1, f2 = counterexample
    lp, two = solve_lp(counterexample), solve_two(f1, f2)
    nf, helly = check_nf_condition(counterexample), helly_check(counterexample)
    margin, valid = verify_certificate(counterexample, [Fraction(1, 2), Fraction(1, 2)])
    ok = (not lp.feasible and not two.feasible and not nf.holds and not helly.holds
          and margin == Fraction(-1, 2) and not valid and lp.margin == Fraction(-1, 2))
    report("C4 counterexample", ok, f"lp/two/tuple/Helly all fail, value at (1/2, 1/2) = {margin}")
    assert ok


def _synth_intervals(r: random.Random, count: int):
    out = []
    while len(out) < count:
        den = r.choice([100, 1000, 997, 360])
        lo = Fraction(r.randint(1, den - 1), den)
        width = Fraction(r.randint(1, 40), 100)
        hi = lo + width
        if hi < 1:
            out.append((lo, hi))
    return out


@pytest.fixture(scope="module")
def synthesized():
    r = random.Random(SEED + 6)
    out = []
    for lo, hi in _synth_intervals(r, 240):
        params = r.choice(PARAMS)
        out.append((params, lo, hi, synthesize_ratio(params, lo, hi)))
    return out


def test_c5_transport(report, synthesized):
    r = random.Random(SEED + 5)
    fam = term_family(5)
    draws, failures, synth_checks = 0, 0, 0
    t0 = time.perf_counter()
    by_params: dict = {}
    for params, _, _, term in synthesized:
        by_params.setdefault((params.p, params.q), []).append(term)
    while draws < 200:
        params = PARAMS[draws % 4]
        mg = make_magma(MAGMA_KINDS[(draws // 4) % 3], r.randint(1, 6), r)
        try:
            f = generate_family(mg, params, 1, STRATEGIES[draws % 3], r, tries=5)[0]
        except GenerationError:
            f = generate_family(mg, params, 1, "structured", r)[0]
        draws += 1
        failures += len(transport_failures(mg, params, f, max_depth=5))
        for term in by_params.get((params.p, params.q), []):
            synth_checks += 1
            failures += not is_convex(realize_table(term, mg), term.a, term.b, f)
    report("C5 transport", failures == 0,
           f"{draws} draws x {len(fam)} terms to depth 5 + {synth_checks} synthesized-term checks, "
           f"{failures} failures, {time.perf_counter() - t0:.1f}s")
    assert failures == 0


def test_c6_density(report, synthesized):
    bad = [(lo, hi) for _, lo, hi, t in synthesized if not lo <= ratio(t) <= hi]
    worked = synthesize_ratio(ConvexityParams(1, 2), Fraction(2, 5), Fraction(1, 2))
    exact = ratio(worked) == Fraction(262144, 531441) == Fraction(8, 9) ** 6
    ok = not bad and exact and len(synthesized) >= 200
    report("C6 density synthesis", ok,
           f"{len(synthesized)} intervals, {len(bad)} misses, worked value {ratio(worked)}")
    assert ok


def _random_term(r: random.Random, params, depth):
    if depth <= 1 or r.random() < 0.2:
        return Base.of(params)
    if r.random() < 0.35:
        return Swap(_random_term(r, params, depth - 1))
    return Compose(_random_term(r, params, depth - 1), _random_term(r, params, depth - 1))


def test_c7_identities(report):
    r = random.Random(SEED + 7)
    bad = 0
    total = 1200
    for _ in range(total):
        params = ConvexityParams(Fraction(r.randint(1, 9), r.randint(1, 9)), Fraction(r.randint(1, 9), r.randint(1, 9)))
        s, t = _random_term(r, params, r.randint(1, 7)), _random_term(r, params, r.randint(1, 7))
        c, w = Compose(s, t), Swap(t)
        bad += ratio(c) != ratio(s) * ratio(t)
        bad += ratio(w) != 1 - ratio(t)
        bad += c.a + c.b != (s.a + s.b) * (t.a + t.b)
    report("C7 algebraic identities", bad == 0, f"{total} random term pairs, {bad} identity failures")
    assert bad == 0


def test_c8_kkt(report):
    r = random.Random(SEED + 8)
    done, bad, converse, degenerate = 0, 0, 0, 0
    while done < 320:
        params = PARAMS[done % 4]
        mg = make_magma(MAGMA_KINDS[(done // 4) % 3], r.randint(1, 6), r)
        try:
            f0, cons, x0 = generate_kkt_instance(mg, params, r.randint(0, 3), STRATEGIES[done % 3], r, tries=50)
        except GenerationError:
            f0, cons, x0 = generate_kkt_instance(mg, params, r.randint(0, 3), "structured", r)
        done += 1
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateMultiplierWarning)
            res = kkt_multipliers(f0, cons, x0, mg, params)
        fns = [f0, *cons]
        ok = all(res.lam[i] * fns[i][x0] == 0 for i in range(1, len(fns)))
        ok &= res.transversality_products == tuple(res.lam[i] * fns[i][x0] for i in range(1, len(fns)))
        ok &= verify_certificate(fns, res.lam)[1] and res.margin >= 0
        ok &= x0 in solve_mp_bruteforce(f0, cons)
        if res.lam[0] > 0:
            converse += 1
            ok &= kkt_verify_converse(f0, cons, x0, res.lam)
        else:
            degenerate += 1
        bad += not ok
    report("C8 KKT forward and converse", bad == 0,
           f"{done} instances, {converse} converse checks, {degenerate} degenerate, {bad} failures")
    assert bad == 0


def test_c9_closure(report):
    r = random.Random(SEED + 9)
    pairs, bad = 0, 0
    while pairs < 600:
        params = PARAMS[pairs % 4]
        mg = make_magma(MAGMA_KINDS[(pairs // 4) % 3], r.randint(1, 6), r)
        try:
            f, g = generate_family(mg, params, 2, STRATEGIES[pairs % 3], r, tries=5)
        except GenerationError:
            f, g = generate_family(mg, params, 2, "structured", r)
        pairs += 1
        c = Fraction(r.randint(1, 20), r.randint(1, 20))
        for h in (fn_add(f, g), fn_scale(c, f), fn_max([f, g])):
            bad += not is_convex(mg, params.p, params.q, h)
    report("C9 closure", bad == 0, f"{pairs} convex pairs, {bad} closure failures")
    assert bad == 0
