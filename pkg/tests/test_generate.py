import random
from fractions import Fraction

import pytest

from gcmax.convexity import is_convex
from gcmax.core import ConvexityParams, Fn, Magma, parse_instance, serialize_instance
from gcmax.generate import (MAGMA_KINDS, STRATEGIES, GenerationError, GeneratorSpec, Stats, anchored_sample,
                            convex_function, generate_instances, generate_kkt_instance, lift_to_max_nonneg,
                            make_magma, repair, structured_sample)
from gcmax.kkt import solve_mp_bruteforce

HALF = ConvexityParams(Fraction(1, 2), Fraction(1, 2))


def test_magma_kinds():
    assert make_magma("cyclic-addition", 3).op_table == ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    assert make_magma("max-semilattice", 2).op_table == ((0, 1), (1, 1))
    assert make_magma("random-table", 4, random.Random(1)).size == 4
    with pytest.raises(ValueError):
        make_magma("free", 2)


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("random-table", 0, 1, 1, "structured", 1)
    with pytest.raises(ValueError):
        GeneratorSpec("random-table", 2, 0, 1, "structured", 1)
    with pytest.raises(ValueError):
        GeneratorSpec("random-table", 2, 1, 1, "guess", 1)


def test_same_seed_same_bytes():
    spec = GeneratorSpec("random-table", 4, Fraction(1, 2), Fraction(1, 2), "structured", 99, count=5, n_functions=3)
    a, _ = generate_instances(spec)
    b, _ = generate_instances(spec)
    assert [serialize_instance(i) for i in a] == [serialize_instance(i) for i in b]
    c, _ = generate_instances(GeneratorSpec("random-table", 4, Fraction(1, 2), Fraction(1, 2), "structured", 100,
                                            count=5, n_functions=3))
    assert [serialize_instance(i) for i in a] != [serialize_instance(i) for i in c]


def test_cyclic_rejection_subadditive():
    insts, stats = generate_instances(GeneratorSpec("cyclic-addition", 5, 1, 1, "rejection", 42, count=10))
    assert stats.accepted >= 20
    for inst in insts:
        for f in inst.functions:
            # subadditivity checked directly
            assert all(f[(x + y) % 5] <= f[x] + f[y] for x in range(5) for y in range(5))


def test_repair_idempotent_half():
    mg = make_magma("max-semilattice", 3)
    r = random.Random(4)
    outcomes = set()
    for _ in range(200):
        start = [r.randint(-4, 4) for _ in range(3)]
        start[r.randrange(3)] = -r.randint(1, 4)
        stats = Stats()
        f = repair(mg, HALF, start, stats)
        if f is None:
            assert stats.diverged == 1
            outcomes.add("diverged")
        else:
            assert is_convex(mg, HALF.p, HALF.q, f)
            assert all(a <= b for a, b in zip(f.values, start))
            outcomes.add("fixpoint")
    assert "fixpoint" in outcomes


def test_repair_floor_trips():
    # x o x = y, y o y = x: f(y) <= 3 f(x) and f(x) <= 3 f(y) drives a negative start to -infinity
    mg = Magma(((1, 1), (0, 0)))
    stats = Stats()
    assert repair(mg, ConvexityParams(1, 2), [-1, 0], stats) is None
    assert stats.diverged == 1 and stats.accepted == 0


def test_convex_function_failure_is_reported():
    # Z6 with p, q = 1/2, 1/3: a uniform draw from [-4, 4]^6 is almost never convex
    mg = make_magma("cyclic-addition", 6)
    with pytest.raises(GenerationError, match="2000 attempts"):
        convex_function(mg, ConvexityParams(Fraction(1, 2), Fraction(1, 3)), "rejection", random.Random(0),
                        stats=Stats())


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("kind", MAGMA_KINDS)
def test_outputs_self_validate(kind, strategy):
    r = random.Random(f"{kind}/{strategy}")
    for pq in ((1, 1), (Fraction(1, 2), Fraction(1, 2)), (1, 2), (3, Fraction(1, 3))):
        params = ConvexityParams(*pq)
        if strategy == "repair" and params.p + params.q < 1:
            continue
        spec = GeneratorSpec(kind, r.randint(1, 5), params.p, params.q, strategy, r.randrange(2 ** 32), count=3,
                             n_functions=r.randint(1, 3))
        try:
            insts, _ = generate_instances(spec)
        except GenerationError:
            continue
        for inst in insts:
            inst2 = parse_instance(serialize_instance(inst))
            assert inst2 == inst
            for f in inst.functions:
                assert is_convex(inst.magma, params.p, params.q, f)
            assert min(max(col) for col in zip(*(f.values for f in inst.functions))) >= 0


def test_lift_only_when_sound():
    fns = [Fn.of([-1, -1]), Fn.of([-2, 0])]
    lifted = lift_to_max_nonneg(fns, ConvexityParams(1, 1))
    assert [f.values for f in lifted] == [(0, 0), (-1, 1)]
    assert lift_to_max_nonneg(fns, ConvexityParams(Fraction(1, 3), Fraction(1, 3))) is None
    assert lift_to_max_nonneg([Fn.of([0, 1])], HALF)[0].values == (0, 1)


def test_structured_and_anchored():
    r = random.Random(2)
    for _ in range(50):
        mg = make_magma(r.choice(MAGMA_KINDS), r.randint(1, 5), r)
        params = ConvexityParams(Fraction(r.randint(1, 3), r.randint(1, 3)), Fraction(r.randint(1, 3), r.randint(1, 3)))
        f = structured_sample(mg, params, r)
        assert f is None or is_convex(mg, params.p, params.q, f)
        x0 = r.randrange(mg.size)
        g = anchored_sample(mg, params, x0, r)
        assert g is not None and g[x0] == 0 and is_convex(mg, params.p, params.q, g)


def test_kkt_instances_meet_hypotheses():
    r = random.Random(6)
    for _ in range(60):
        params = ConvexityParams(*r.choice([(1, 1), (Fraction(1, 2), Fraction(1, 2)), (1, 2), (3, Fraction(1, 3))]))
        mg = make_magma(r.choice(MAGMA_KINDS), r.randint(1, 5), r)
        f0, cons, x0 = generate_kkt_instance(mg, params, r.randint(0, 3), "structured", r)
        assert f0[x0] == 0 and x0 in solve_mp_bruteforce(f0, cons)
        assert all(is_convex(mg, params.p, params.q, f) for f in (f0, *cons))
