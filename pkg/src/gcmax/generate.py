"""Seeded generators of magmas, convex functions and whole instances.

Every function a generator returns has passed :func:`check_convexity`.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .certificate import check_max_nonneg
from .convexity import fn_add, fn_max, fn_scale, is_convex
from .core import ConvexityParams, Fn, Instance, Magma
from .kkt import admissible_set

MAGMA_KINDS = ("random-table", "cyclic-addition", "max-semilattice")
STRATEGIES = ("rejection", "repair", "structured")


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    magma_kind: str
    m: int
    p: Fraction
    q: Fraction
    fn_strategy: str
    seed: int
    count: int = 1
    n_functions: int = 2
    value_range: int = 4
    attempts: int = 2000

    def __post_init__(self):
        if self.magma_kind not in MAGMA_KINDS:
            raise ValueError(f"unknown magma kind {self.magma_kind!r}")
        if self.fn_strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.fn_strategy!r}")
        if self.m < 1 or self.count < 0 or self.n_functions < 1:
            raise ValueError("m >= 1, count >= 0 and n_functions >= 1 required")
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        ConvexityParams(self.p, self.q)

    @property
    def params(self) -> ConvexityParams:
        return ConvexityParams(self.p, self.q)


def make_magma(kind: str, m: int, rng: random.Random | None = None) -> Magma:
    if kind == "cyclic-addition":
        return Magma.from_function(m, lambda x, y: (x + y) % m)
    if kind == "max-semilattice":
        return Magma.from_function(m, max)
    if kind == "random-table":
        rng = rng or random.Random(0)
        return Magma(tuple(tuple(rng.randrange(m) for _ in range(m)) for _ in range(m)))
    raise ValueError(f"unknown magma kind {kind!r}")


@dataclass
class Stats:
    attempts: int = 0
    accepted: int = 0
    diverged: int = 0

    def __str__(self):
        return f"{self.accepted} accepted / {self.attempts} attempts ({self.diverged} diverged)"


def rejection_sample(magma: Magma, params: ConvexityParams, rng: random.Random, value_range: int = 4,
                     attempts: int = 2000, stats: Stats | None = None) -> Fn | None:
    stats = stats if stats is not None else Stats()
    m = magma.size
    for _ in range(attempts):
        stats.attempts += 1
        f = Fn.of([rng.randint(-value_range, value_range) for _ in range(m)])
        if is_convex(magma, params.p, params.q, f):
            stats.accepted += 1
            return f
    return None


def repair(magma: Magma, params: ConvexityParams, start, stats: Stats | None = None) -> Fn | None:
    """Lower f(x o y) to floor(p f(x) + q f(y)) until nothing changes.

    Rounding down keeps values integral, so every lowering drops a value by
    at least one and the loop ends at a fixpoint or at the floor.  Exact
    lowering can creep toward a limit forever (e.g. p = q = 1/2 on a chain).
    Returns None when a value drops below -(p+q+1) max|start| m or when 10 m^2
    sweeps pass without reaching a fixpoint.
    """
    stats = stats if stats is not None else Stats()
    stats.attempts += 1
    p, q = params.p, params.q
    m = magma.size
    f = [Fraction(v) for v in start]
    floor = -(p + q + 1) * max(abs(v) for v in f) * m
    for _ in range(10 * m * m):
        changed = False
        for x in range(m):
            for y in range(m):
                z = magma.op_table[x][y]
                bound = p * f[x] + q * f[y]
                if f[z] > bound:
                    f[z] = Fraction(math.floor(bound))
                    changed = True
                    if bound < floor:
                        stats.diverged += 1
                        return None
        if not changed:
            out = Fn.of(f)
            if not is_convex(magma, p, q, out):  # pragma: no cover - a fixpoint is convex
                raise AssertionError("repair fixpoint failed the convexity check")
            stats.accepted += 1
            return out
    stats.diverged += 1
    return None


def repair_sample(magma: Magma, params: ConvexityParams, rng: random.Random, value_range: int = 4,
                  attempts: int = 200, stats: Stats | None = None) -> Fn | None:
    for _ in range(attempts):
        start = [rng.randint(-value_range, value_range) for _ in range(magma.size)]
        f = repair(magma, params, start, stats)
        if f is not None:
            return f
    return None


def _seeds(magma: Magma, params: ConvexityParams, rng: random.Random, value_range: int) -> list[Fn]:
    m = magma.size
    s = params.p + params.q
    seeds = [Fn.of([0] * m)]
    c = rng.randint(1, value_range)
    # a constant c is convex iff c <= (p+q) c
    if s >= 1:
        seeds.append(Fn.of([c] * m))
    if s <= 1:
        seeds.append(Fn.of([-c] * m))
    for _ in range(2 * m):
        inside = [rng.random() < 0.5 for _ in range(m)]
        hi, lo = rng.randint(-value_range, value_range), rng.randint(-value_range, value_range)
        step = Fn.of([hi if b else lo for b in inside])
        if is_convex(magma, params.p, params.q, step):
            seeds.append(step)
    return seeds


def structured_sample(magma: Magma, params: ConvexityParams, rng: random.Random, value_range: int = 4,
                      attempts: int = 200, stats: Stats | None = None) -> Fn | None:
    """Nonnegative combinations and maxima of validated convex seeds."""
    stats = stats if stats is not None else Stats()
    for _ in range(attempts):
        stats.attempts += 1
        pool = _seeds(magma, params, rng, value_range)
        extra = rejection_sample(magma, params, rng, value_range, attempts=20)
        if extra is not None:
            pool.append(extra)

        def combo() -> Fn:
            picks = rng.sample(pool, min(len(pool), rng.randint(1, 3)))
            out = fn_scale(Fraction(rng.randint(1, 4), rng.randint(1, 3)), picks[0])
            for g in picks[1:]:
                out = fn_add(out, fn_scale(Fraction(rng.randint(1, 4), rng.randint(1, 3)), g))
            return out

        f = combo()
        if rng.random() < 0.5:
            f = fn_max([f, combo()])
        f = Fn.of(f.values)
        if is_convex(magma, params.p, params.q, f):
            stats.accepted += 1
            return f
    return None


SAMPLERS: dict[str, Callable[..., Fn | None]] = {
    "rejection": rejection_sample,
    "repair": repair_sample,
    "structured": structured_sample,
}


def convex_function(magma: Magma, params: ConvexityParams, strategy: str, rng: random.Random,
                    value_range: int = 4, stats: Stats | None = None, name: str = "f") -> Fn:
    f = SAMPLERS[strategy](magma, params, rng, value_range, stats=stats)
    if f is None:
        raise GenerationError(f"{strategy} produced no convex function ({stats or 'no stats'})")
    return Fn(name, f.values)


def lift_to_max_nonneg(fns: list[Fn], params: ConvexityParams) -> list[Fn] | None:
    """Add the least constant c >= 0 making max_i f_i >= 0 everywhere.

    Adding c >= 0 keeps convexity only when p + q >= 1; otherwise None is
    returned if a lift would be needed.
    """
    worst = min(max(col) for col in zip(*fns))
    if worst >= 0:
        return fns
    if params.p + params.q < 1:
        return None
    c = -worst
    return [Fn(f.name, tuple(v + c for v in f.values)) for f in fns]


def generate_family(magma: Magma, params: ConvexityParams, n: int, strategy: str, rng: random.Random,
                    value_range: int = 4, tries: int = 50, stats: Stats | None = None) -> list[Fn]:
    """n convex functions whose pointwise maximum is nonnegative."""
    for _ in range(tries):
        fns = [convex_function(magma, params, strategy, rng, value_range, stats, name=f"f{i + 1}")
               for i in range(n)]
        fns = lift_to_max_nonneg(fns, params)
        if fns is None:
            continue
        if not all(is_convex(magma, params.p, params.q, f) for f in fns):  # pragma: no cover
            raise AssertionError("lifted family lost convexity")
        return fns
    raise GenerationError(f"no family with nonnegative maximum in {tries} tries")


def generate_instance(spec: GeneratorSpec, rng: random.Random, stats: Stats | None = None) -> Instance:
    magma = make_magma(spec.magma_kind, spec.m, rng)
    fns = generate_family(magma, spec.params, spec.n_functions, spec.fn_strategy, rng, spec.value_range,
                          stats=stats)
    return Instance(magma, spec.params, tuple(fns))


def generate_instances(spec: GeneratorSpec) -> tuple[list[Instance], Stats]:
    rng = random.Random(spec.seed)
    stats = Stats()
    return [generate_instance(spec, rng, stats) for _ in range(spec.count)], stats


def anchored_sample(magma: Magma, params: ConvexityParams, x0: int, rng: random.Random, value_range: int = 4,
                    attempts: int = 50) -> Fn | None:
    """A convex function vanishing at x0, built from validated step seeds that vanish there."""
    m = magma.size
    for _ in range(attempts):
        pool = [Fn.of([0] * m)]
        for _ in range(2 * m):
            side = [rng.random() < 0.5 for _ in range(m)]
            other = rng.randint(-value_range, value_range)
            step = Fn.of([0 if side[x] == side[x0] else other for x in range(m)])
            if is_convex(magma, params.p, params.q, step):
                pool.append(step)
        picks = rng.sample(pool, min(len(pool), rng.randint(1, 3)))
        f = picks[0]
        for g in picks[1:]:
            f = fn_add(f, fn_scale(Fraction(rng.randint(1, 4), rng.randint(1, 3)), g))
        if rng.random() < 0.5:
            f = fn_max([f, rng.choice(pool)])
        f = Fn.of(f.values)
        if f[x0] == 0 and is_convex(magma, params.p, params.q, f):
            return f
    return None


def generate_kkt_instance(magma: Magma, params: ConvexityParams, n: int, strategy: str, rng: random.Random,
                          value_range: int = 4, tries: int = 200) -> tuple[Fn, list[Fn], int]:
    """(f0, constraints, x0) with x0 minimizing f0 on the admissible set and f0(x0) = 0.

    The objective is shifted by its admissible minimum only in the direction
    that keeps it convex (up when p + q >= 1, down when p + q <= 1).  When a
    sampled objective would need the other direction, an objective vanishing
    at a random admissible point is built instead.  Constraint draws with an
    empty admissible set are replaced by constraints sharing a planted zero.
    """
    s = params.p + params.q
    m = magma.size
    for _ in range(tries):
        cons = [convex_function(magma, params, strategy, rng, value_range, name=f"g{i + 1}") for i in range(n)]
        adm = admissible_set(cons, m)
        if not adm:
            # p + q > 1 forces constraints >= 0, so a shared zero is rare; plant one
            anchor = rng.randrange(m)
            planted = [anchored_sample(magma, params, anchor, rng, value_range) for _ in cons]
            if any(g is None for g in planted):
                continue
            cons = [Fn(g.name, f.values) for g, f in zip(cons, planted)]
            adm = admissible_set(cons, m)
        h = convex_function(magma, params, strategy, rng, value_range, name="f0")
        v = min(h[x] for x in adm)
        if v != 0 and not ((v < 0 and s >= 1) or (v > 0 and s <= 1)):
            anchored = anchored_sample(magma, params, rng.choice(adm), rng, value_range)
            if anchored is None:
                continue
            h = anchored
            v = min(h[x] for x in adm)
            if v < 0 and s < 1:
                continue
        f0 = Fn("f0", tuple(val - v for val in h.values))
        if not is_convex(magma, params.p, params.q, f0):  # pragma: no cover
            raise AssertionError("objective shift lost convexity")
        x0 = next(x for x in adm if f0[x] == 0)
        ok, _ = check_max_nonneg([f0, *cons])
        assert ok
        return f0, cons, x0
    raise GenerationError(f"no KKT instance in {tries} tries")
