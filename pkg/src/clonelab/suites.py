"""Invariant suites run by ``clonelab lemma-check`` and the acceptance tests.

Each suite returns a SuiteResult with summary statistics and the witnesses
of any failure; witnesses are plain JSON-friendly values.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .approx import PartialFn, apply_binary, containment_holds, extend_polEF
from .clone_engine import (
    alpha_extension,
    check_representation_binary_alpha,
    check_representation_unary,
    clone_closure,
    monoid_closure,
    normal_closure_check,
)
from .core import FnTable, Permutation, SmallnessIdeal, Universe, conjugate
from .funcgraph import canonical_form
from .monoids import (
    RichnessParams,
    in_E,
    in_G_lambda,
    in_G_lambda_oracle,
    min_injective_removal,
    min_injective_removal_oracle,
    unary_predicates,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    stats: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "stats": self.stats,
            "witnesses": self.witnesses,
        }


def _t(f: FnTable) -> list:
    return [f.m, list(f.values)]


def rep_unary(n: int = 3, max_seeds: int = 2) -> SuiteResult:
    """Every symmetric monoid generated by <= max_seeds functions, every alpha."""
    funcs = list(Universe(n).all_unary())
    perms = list(Universe(n).all_permutations())
    monoids = {}
    seed_sets = 0
    for size in range(max_seeds + 1):
        for seeds in itertools.combinations(funcs, size):
            seed_sets += 1
            G = monoid_closure(seeds, n=n, symmetric=True)
            monoids.setdefault(G.rows(1).tobytes(), G)
    witnesses, checks = [], 0
    for G in monoids.values():
        for alpha in perms:
            checks += 1
            v = check_representation_unary(G, alpha)
            if not v.equal:
                witnesses.append(
                    {"alpha": list(alpha.values), "side": v.side, "witness": _t(v.witness),
                     "monoid_size": len(G)}
                )
    return SuiteResult(
        "rep-unary",
        not witnesses,
        {"n": n, "seed_sets": seed_sets, "distinct_monoids": len(monoids), "checks": checks},
        witnesses,
    )


def _boolean_pool(n: int) -> tuple[list[FnTable], list[FnTable]]:
    """Seed pool: all unary and binary operations, plus majority and minority
    (used alone or next to one unary seed)."""
    small = list(Universe(n).all_unary()) + [
        FnTable(n, 2, v) for v in itertools.product(range(n), repeat=n * n)
    ]
    ternary = []
    if n == 2:
        ternary = [
            FnTable.from_function(2, 3, lambda a, b, c: int(a + b + c >= 2)),
            FnTable.from_function(2, 3, lambda a, b, c: a ^ b ^ c),
        ]
    return small, ternary


def involutions(n: int) -> list[Permutation]:
    return [p for p in Universe(n).all_permutations() if (p @ p).values == tuple(range(n))]


def rep_binary_alpha(n: int = 2, cap: int = 4, clones: int = 24, seed: int = 0) -> SuiteResult:
    """Both directions of the alpha^2 = id representation, over seeded
    symmetric clones and every involution alpha."""
    rng = random.Random(seed)
    small, ternary = _boolean_pool(n)
    unary = small[: n**n]
    alphas = involutions(n)
    witnesses = []
    counts = {"holds_and_member": 0, "neither": 0}
    memo: dict = {}

    def closure(gens):
        key = (tuple(sorted(gens)), "C")
        if key not in memo:
            memo[key] = clone_closure(gens, cap, n=n, symmetric=True)
        return memo[key]

    def extension(C, alpha):
        key = (tuple(sorted(C.generators)), tuple(alpha.values))
        if key not in memo:
            memo[key] = alpha_extension(C, alpha)
        return memo[key]

    distinct = set()
    for _ in range(clones):
        if ternary and rng.random() < 0.3:
            seeds = [rng.choice(ternary)]
            if rng.random() < 0.5:
                seeds.append(rng.choice(unary))
        else:
            seeds = rng.sample(small, rng.choice((1, 2)))
        C = closure(seeds)
        distinct.add(tuple(C.rows(m).tobytes() for m in C.arities))
        for alpha in alphas:
            ext = extension(C, alpha)
            for m in range(1, cap // 2 + 1):
                for vals in itertools.product(range(n), repeat=n**m):
                    t = FnTable(n, m, vals)
                    v = check_representation_binary_alpha(C, alpha, t, closure=ext)
                    if v.consistent:
                        counts["holds_and_member" if v.holds else "neither"] += 1
                    else:
                        witnesses.append(
                            {"seeds": [_t(s) for s in seeds], "alpha": list(alpha.values),
                             "t": _t(t), "holds": v.holds, "in_closure": v.in_closure}
                        )
    stats = {"n": n, "cap": cap, "instances": clones, "distinct_clones": len(distinct),
             "involutions": len(alphas), **counts}
    return SuiteResult("rep-binary-alpha", not witnesses, stats, witnesses)


def _expected_normal_closure(alpha: Permutation) -> tuple[str, int]:
    from math import factorial

    n = alpha.n
    if alpha.values == tuple(range(n)):
        return ("S_n" if n == 1 else "A_n" if n == 2 else "proper"), 1
    if n == 4 and alpha.cycle_type() == (2, 2):
        return "proper", 4
    if alpha.is_even():
        return "A_n", factorial(n) // 2
    return "S_n", factorial(n)


def schreier_ulam(ns=(4, 5, 6, 7)) -> SuiteResult:
    """Normal closures in S_n: A_n or S_n for n >= 5; the Klein four group
    shows up at n = 4."""
    witnesses, proper, checked = [], [], 0
    orders = {}
    for n in ns:
        seen_types = {}
        for vals in itertools.permutations(range(n)):
            alpha = Permutation.from_values(vals)
            if vals == tuple(range(n)):
                continue
            checked += 1
            res = normal_closure_check(alpha)
            expected = _expected_normal_closure(alpha)
            if (res.generates, res.order) != expected:
                witnesses.append({"alpha": list(vals), "got": [res.generates, res.order],
                                  "expected": list(expected)})
            if res.generates == "proper" and alpha.cycle_type() not in seen_types:
                seen_types[alpha.cycle_type()] = res
                proper.append({"n": n, "alpha": list(vals), "order": res.order,
                               "subgroup": [list(p.values) for p in res.witness or ()]})
            orders.setdefault(str(n), {})[res.generates] = res.order
    ok = not witnesses
    if 4 in ns:
        ok = ok and any(p["n"] == 4 and p["order"] == 4 for p in proper)
    return SuiteResult(
        "schreier-ulam", ok, {"checked": checked, "orders": orders, "proper_subgroups": proper},
        witnesses,
    )


def glambda_oracle(
    n_max: int = 7, exhaustive_max: int = 4, samples: int = 10_000, seed: int = 0
) -> SuiteResult:
    rng = random.Random(seed)
    witnesses = []
    checked = 0

    def check(f: FnTable):
        nonlocal checked
        checked += 1
        for lam in range(1, f.n + 1):
            if in_G_lambda(f, lam) != in_G_lambda_oracle(f, lam):
                witnesses.append({"f": list(f.values), "lambda": lam, "kind": "G_lambda"})
        if min_injective_removal(f) != min_injective_removal_oracle(f):
            witnesses.append({"f": list(f.values), "kind": "lambda_injective"})

    for n in range(1, min(exhaustive_max, n_max) + 1):
        for f in Universe(n).all_unary():
            check(f)
    for n in range(exhaustive_max + 1, n_max + 1):
        for _ in range(samples):
            check(FnTable(n, 1, tuple(rng.randrange(n) for _ in range(n))))
    return SuiteResult("glambda-oracle", not witnesses,
                       {"n_max": n_max, "functions": checked, "samples": samples}, witnesses)


def approx_ext(n: int = 3, seed: int = 0) -> SuiteResult:
    """The inclusion g(g1,g2)[X] >= gamma[(X\\S) & g1[X]] over every S, every
    unary pair; plus agreement on S^2 and the constant-first-argument case."""
    rng = random.Random(seed)
    funcs = list(Universe(n).all_unary())
    witnesses = []
    checked = 0
    boundary = {}
    for size in range(n):
        for S in itertools.combinations(range(n), size):
            p = PartialFn(n, 2, S, {t: rng.randrange(n) for t in itertools.product(S, repeat=2)})
            ext = extend_polEF(p)
            if not p.agrees(ext.table):
                witnesses.append({"S": list(S), "kind": "agreement"})
            for c in range(n):
                if c in S:
                    continue
                for g2 in funcs:
                    h = apply_binary(ext.table, FnTable.constant(n, c), g2)
                    if set(h.values) != {ext.gamma[c]}:
                        witnesses.append({"S": list(S), "c": c, "g2": list(g2.values),
                                          "kind": "constant-case"})
            for g1 in funcs:
                for g2 in funcs:
                    checked += 1
                    if not containment_holds(ext, S, g1, g2):
                        witnesses.append({"S": list(S), "g1": list(g1.values),
                                          "g2": list(g2.values), "kind": "containment"})
            # how often E is preserved, per threshold k
            for k in range(1, n + 1):
                ideal = SmallnessIdeal(n, k)
                E = [f for f in funcs if in_E(f, ideal)]
                kept = sum(
                    in_E(apply_binary(ext.table, a, b), ideal) for a in E for b in E
                )
                boundary.setdefault(str(k), []).append(
                    {"S": list(S), "onto": ext.onto, "preserved": kept, "pairs": len(E) ** 2}
                )
    return SuiteResult("approx-ext", not witnesses,
                       {"n": n, "pairs_checked": checked, "preservation": boundary}, witnesses)


def conjugacy(n: int = 4) -> SuiteResult:
    """canonical_form equality against orbit enumeration under S_n."""
    funcs = list(Universe(n).all_unary())
    perms = list(Universe(n).all_permutations())
    orbit = {}
    for f in funcs:
        if f in orbit:
            continue
        label = len(set(orbit.values()))
        for gamma in perms:
            orbit[conjugate(f, gamma)] = label
    forms = {f: canonical_form(f) for f in funcs}
    witnesses = []
    for f in funcs:
        for g in funcs:
            if (forms[f] == forms[g]) != (orbit[f] == orbit[g]):
                witnesses.append({"f": list(f.values), "g": list(g.values)})
    return SuiteResult("conjugacy", not witnesses,
                       {"n": n, "functions": len(funcs), "classes": len(set(orbit.values()))},
                       witnesses)


def predicate_invariance(n: int = 4) -> SuiteResult:
    funcs = list(Universe(n).all_unary())
    perms = list(Universe(n).all_permutations())
    conj = {f: [conjugate(f, g) for g in perms] for f in funcs}
    witnesses, checks = [], 0
    richness = RichnessParams(frozenset({1, 2}), 1)
    for k in range(1, n + 1):
        ideal = SmallnessIdeal(n, k)
        for lam in range(1, n + 1):
            for name, pred in unary_predicates(ideal, lam, richness).items():
                for f in funcs:
                    base = pred(f)
                    for h in conj[f]:
                        checks += 1
                        if pred(h) != base:
                            witnesses.append({"predicate": name, "k": k, "lambda": lam,
                                              "f": list(f.values), "conjugate": list(h.values)})
    return SuiteResult("predicate-invariance", not witnesses, {"n": n, "checks": checks},
                       witnesses)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "rep-unary": rep_unary,
    "rep-binary-alpha": rep_binary_alpha,
    "schreier-ulam": schreier_ulam,
    "glambda-oracle": glambda_oracle,
    "approx-ext": approx_ext,
    "conjugacy": conjugacy,
    "predicate-invariance": predicate_invariance,
}
