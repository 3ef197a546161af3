"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line in RESULTS; conftest.py prints them at
the end of the run. Running this file directly prints the same lines.
"""

import itertools
import random
import time

from clonelab.clone_engine import clone_closure, normal_closure_check
from clonelab.core import FnTable, Permutation, Universe, conjugate
from clonelab.funcgraph import canonical_form, find_conjugator, realize_spectrum, spectrum
from clonelab.suites import (
    approx_ext,
    glambda_oracle,
    predicate_invariance,
    rep_binary_alpha,
    rep_unary,
    schreier_ulam,
)

RESULTS: dict[int, str] = {}


def record(num, name, ok, elapsed, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {name}: {detail} ({elapsed:.2f}s)"
    RESULTS[num] = line
    print(line)
    return ok


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_01_conjugacy_completeness():
    def work():
        funcs = list(Universe(4).all_unary())
        perms = list(Universe(4).all_permutations())
        forms = {f: canonical_form(f) for f in funcs}
        orbit_of = {}
        for f in funcs:
            if f not in orbit_of:
                orbit = frozenset(conjugate(f, g) for g in perms)
                for h in orbit:
                    orbit_of[h] = orbit
        mismatches = 0
        for f, g in itertools.product(funcs, repeat=2):
            brute = g in orbit_of[f]
            if (forms[f] == forms[g]) != brute:
                mismatches += 1
        return mismatches, len(set(orbit_of.values()))

    (mismatches, classes), dt = timed(work)
    ok = mismatches == 0 and dt < 10
    record(1, "conjugacy completeness n=4", ok, dt, f"{mismatches} mismatches, {classes} classes")
    assert ok


def test_02_conjugator_validity():
    def work():
        rng = random.Random(2024)
        bad = 0
        for i in range(1000):
            n = 5 + i % 4
            f = FnTable(n, 1, tuple(rng.randrange(n) for _ in range(n)))
            vals = list(range(n))
            rng.shuffle(vals)
            g = conjugate(f, Permutation.from_values(vals))
            gamma = find_conjugator(f, g)
            if gamma is None or conjugate(g, gamma) != f:
                bad += 1
        return bad

    bad, dt = timed(work)
    ok = bad == 0 and dt < 30
    record(2, "conjugator validity (1000 pairs, n=5..8)", ok, dt, f"{bad} failures")
    assert ok


def test_03_representation_unary():
    res, dt = timed(lambda: rep_unary(n=3, max_seeds=2))
    ok = res.passed and not res.witnesses and dt < 300
    s = res.stats
    record(3, "unary normal forms (n=3)", ok, dt,
           f"{s['distinct_monoids']} monoids from {s['seed_sets']} seed sets, "
           f"{s['checks']} checks, {len(res.witnesses)} witnesses")
    assert ok


def test_04_representation_binary_alpha():
    res, dt = timed(lambda: rep_binary_alpha(n=2, cap=4, clones=24, seed=0))
    s = res.stats
    both_directions = s["holds_and_member"] > 0 and s["neither"] > 0
    ok = res.passed and s["instances"] >= 20 and both_directions
    record(4, "binary normal forms (alpha^2=id, n=2, cap 4)", ok, dt,
           f"{s['instances']} seeded clones ({s['distinct_clones']} distinct), "
           f"{s['holds_and_member']} holds+member, {s['neither']} neither, "
           f"{len(res.witnesses)} witnesses")
    assert ok


def test_05_glambda_closed_forms():
    res, dt = timed(lambda: glambda_oracle(n_max=7, exhaustive_max=4, samples=10_000, seed=0))
    ok = res.passed and dt < 60
    record(5, "G_lambda / lambda-injective closed forms", ok, dt,
           f"{res.stats['functions']} functions, {len(res.witnesses)} disagreements")
    assert ok


def _naive_order(gens):
    n = gens[0].n
    group, frontier = {Permutation.identity(n)}, [Permutation.identity(n)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g @ x
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(group)


def test_06_schreier_ulam():
    def work():
        res = schreier_ulam(ns=(4, 5, 6, 7))
        # independent orders for a 3-cycle and a transposition at n = 5
        oracle = {}
        for name, cyc in (("A_5", [(0, 1, 2)]), ("S_5", [(0, 1)])):
            a = Permutation.from_cycles(5, cyc)
            conj = list({g.inv() @ a @ g for g in Universe(5).all_permutations()})
            oracle[name] = (_naive_order(conj), normal_closure_check(a).order)
        return res, oracle

    (res, oracle), dt = timed(work)
    orders = res.stats["orders"]
    expected = {"5": {"A_n": 60, "S_n": 120}, "6": {"A_n": 360, "S_n": 720},
                "7": {"A_n": 2520, "S_n": 5040}}
    exact = all(orders[n] == o for n, o in expected.items())
    klein = any(p["n"] == 4 and p["order"] == 4 for p in res.stats["proper_subgroups"])
    oracle_ok = oracle == {"A_5": (60, 60), "S_5": (120, 120)}
    ok = res.passed and exact and klein and oracle_ok
    record(6, "normal closures in S_n", ok, dt,
           f"{res.stats['checked']} permutations, orders {orders}, Klein four at n=4: {klein}")
    assert ok


def test_07_predicate_invariance():
    res, dt = timed(lambda: predicate_invariance(n=4))
    ok = res.passed
    record(7, "conjugation invariance of monoid predicates (n=4)", ok, dt,
           f"{res.stats['checks']} checks, {len(res.witnesses)} violations")
    assert ok


def test_08_extend_polEF_containment():
    res, dt = timed(lambda: approx_ext(n=3, seed=0))
    ok = res.passed and dt < 60
    record(8, "extend_polEF containment (n=3)", ok, dt,
           f"{res.stats['pairs_checked']} (S, g1, g2) checks, {len(res.witnesses)} violations")
    assert ok


AND = FnTable(2, 2, (0, 0, 0, 1))
OR = FnTable(2, 2, (0, 1, 1, 1))
NOT = FnTable(2, 1, (1, 0))


def test_09_closure_determinism(tmp_path):
    def work():
        runs = [clone_closure([AND, OR, NOT], 2, workers=w) for w in (1, 2, 8)]
        miss = clone_closure([AND, OR, NOT], 2, cache_dir=tmp_path)
        hit = clone_closure([AND, OR, NOT], 2, cache_dir=tmp_path)
        return runs, miss, hit

    (runs, miss, hit), dt = timed(work)
    base = runs[0]
    counts_ok = base.counts() == {1: 4, 2: 16}
    # all 4 unary and all 16 binary tables on {0, 1}
    full = {FnTable(2, m, v) for m in (1, 2) for v in itertools.product((0, 1), repeat=2**m)}
    tables_ok = base.table_set() == full
    same = all(r.same_members(base) and r.depth_histogram() == base.depth_histogram()
               for r in runs[1:] + [miss, hit])
    ok = counts_ok and tables_ok and same and hit.from_cache and not miss.from_cache
    record(9, "closure determinism (workers 1/2/8, cache hit vs recompute)", ok, dt,
           f"counts {base.counts()}, cache hit={hit.from_cache}")
    assert ok


def _random_spectrum(rng, n):
    spec, used = {}, 0
    while True:
        room = n - used
        if room < 1 or (spec and rng.random() < 0.35):
            return spec, used
        p = rng.randint(1, room)
        spec[p] = spec.get(p, 0) + 1
        used += p


def test_10_spectrum_round_trip():
    def work():
        rng = random.Random(10)
        bad = 0
        for _ in range(1000):
            n = rng.randint(1, 10)
            spec, used = _random_spectrum(rng, n)
            sizes = None
            if rng.random() < 0.5:
                periods = [p for p in sorted(spec) for _ in range(spec[p])]
                sizes = list(periods)
                for _ in range(n - used):
                    sizes[rng.randrange(len(sizes))] += 1
            f = realize_spectrum(n, spec, sizes, width=rng.randint(1, 3))
            if spectrum(f) != dict(sorted(spec.items())):
                bad += 1
        return bad

    bad, dt = timed(work)
    ok = bad == 0
    record(10, "spectrum realization round trip (1000 spectra, n<=10)", ok, dt, f"{bad} failures")
    assert ok


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
