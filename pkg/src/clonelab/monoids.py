"""Membership predicates for the named transformation monoids.

"Almost all y" is read as "all y outside a small exceptional set", small
being taken w.r.t. the same threshold ideal as everything else. Cardinal
parameters lambda range over the integers 1..n.

Several classes degenerate on finite sets: G_lambda contains every function
(|f[X\\A]| <= |X\\A| = n - lambda always), and with lambda-surjective read as
|X \\ f[X]| < lambda it coincides with lambda-injective, so M_lambda is
everything as well. The exhaustive oracles below are what confirm this.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import (
    FnTable,
    SmallnessIdeal,
    Universe,
    _require_unary,
    compose_unary,
    fiber_sizes,
    image,
    kernel_classes,
)
from .funcgraph import spectrum


def _ideal(f: FnTable, ideal: SmallnessIdeal | None) -> SmallnessIdeal:
    if ideal is None:
        return SmallnessIdeal(f.n)
    if ideal.n != f.n:
        raise ValueError(f"ideal is over n={ideal.n} but f is over n={f.n}")
    return ideal


def _check_lambda(f: FnTable, lam: int) -> None:
    if not 1 <= lam <= f.n:
        raise ValueError(f"lambda={lam} must lie in [1, {f.n}]")


def in_A(f: FnTable, ideal: SmallnessIdeal | None = None) -> bool:
    """Fibers are small for almost all y."""
    _require_unary(f)
    ideal = _ideal(f, ideal)
    exceptional = sum(1 for s in fiber_sizes(f) if ideal.large(s))
    return ideal.small(exceptional)


def in_B(f: FnTable, ideal: SmallnessIdeal | None = None) -> bool:
    _require_unary(f)
    ideal = _ideal(f, ideal)
    return all(ideal.small(s) for s in fiber_sizes(f))


def in_E(f: FnTable, ideal: SmallnessIdeal | None = None) -> bool:
    """Almost surjective: the set of missed values is small."""
    _require_unary(f)
    ideal = _ideal(f, ideal)
    return ideal.small(f.n - len(image(f)))


def in_F(f: FnTable, ideal: SmallnessIdeal | None = None) -> bool:
    return in_E(f, ideal) or f.is_constant()


def max_image_avoiding(f: FnTable, lam: int) -> int:
    """max over |A| = lam of |f[X \\ A]|, in closed form."""
    r = len(image(f))
    return r - max(0, lam - (f.n - r))


def in_G_lambda(f: FnTable, lam: int) -> bool:
    _require_unary(f)
    _check_lambda(f, lam)
    return max_image_avoiding(f, lam) <= f.n - lam


def in_G_lambda_oracle(f: FnTable, lam: int) -> bool:
    """Checks |X \\ f[X\\A]| >= lam over every A of size lam."""
    _require_unary(f)
    _check_lambda(f, lam)
    n, vals = f.n, f.values
    for A in itertools.combinations(range(n), lam):
        rest = set(range(n)).difference(A)
        if n - len({vals[x] for x in rest}) < lam:
            return False
    return True


def min_injective_removal(f: FnTable) -> int:
    """Size of the smallest A with f injective on X \\ A."""
    _require_unary(f)
    return f.n - len(image(f))


def min_injective_removal_oracle(f: FnTable) -> int:
    n, vals = f.n, f.values
    for size in range(n + 1):
        for A in itertools.combinations(range(n), size):
            rest = [vals[x] for x in range(n) if x not in A]
            if len(set(rest)) == len(rest):
                return size
    raise AssertionError("unreachable: removing everything is injective")


def lambda_injective(f: FnTable, lam: int) -> bool:
    _check_lambda(f, lam)
    return min_injective_removal(f) < lam


def lambda_surjective(f: FnTable, lam: int) -> bool:
    """Interpretation: fewer than lam values are missed."""
    _require_unary(f)
    _check_lambda(f, lam)
    return f.n - len(image(f)) < lam


def in_M_lambda(f: FnTable, lam: int) -> bool:
    return lambda_surjective(f, lam) or not lambda_injective(f, lam)


def in_A_prime(
    f: FnTable, ideal: SmallnessIdeal | None = None, lambda_bound: int | None = None
) -> bool:
    """Some lam <= lambda_bound bounds almost all fiber sizes.

    With lambda_bound = n every function qualifies; the default n - 1 mirrors
    the strict bound lam < |X|.
    """
    _require_unary(f)
    ideal = _ideal(f, ideal)
    if lambda_bound is None:
        lambda_bound = max(f.n - 1, 0)
    sizes = fiber_sizes(f)
    return any(
        ideal.small(sum(1 for s in sizes if s > lam)) for lam in range(lambda_bound + 1)
    )


def is_generous(f: FnTable, ideal: SmallnessIdeal | None = None) -> bool:
    ideal = _ideal(f, ideal)
    return all(ideal.large(len(c)) for c in kernel_classes(f))


def in_chi(f: FnTable, ideal: SmallnessIdeal | None = None) -> bool:
    return len(image(f)) <= 2 and is_generous(f, ideal)


@dataclass(frozen=True)
class RichnessParams:
    periods: frozenset[int] = frozenset({1})
    min_count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "periods", frozenset(self.periods))
        if self.min_count < 1 or any(p < 1 for p in self.periods):
            raise ValueError("periods and min_count must be >= 1")


def is_rich(f: FnTable, params: RichnessParams) -> bool:
    spec = spectrum(f)
    return all(spec.get(p, 0) >= params.min_count for p in params.periods)


PREDICATE_NAMES = (
    "A",
    "A_prime",
    "B",
    "E",
    "F",
    "G_lambda",
    "M_lambda",
    "lambda_injective",
    "lambda_surjective",
    "generous",
    "chi",
    "rich",
)


@dataclass(frozen=True)
class MonoidPredicateReport:
    function_id: str
    n: int
    k: int
    lambdas: tuple[int, ...]
    lambda_bound: int
    richness: RichnessParams
    predicates: dict = field(hash=False)

    def to_json(self) -> dict:
        return {
            "function_id": self.function_id,
            "parameters": {
                "n": self.n,
                "k": self.k,
                "lambdas": list(self.lambdas),
                "lambda_bound": self.lambda_bound,
                "richness": {
                    "periods": sorted(self.richness.periods),
                    "min_count": self.richness.min_count,
                },
            },
            "predicates": {
                name: ({str(l): v for l, v in val.items()} if isinstance(val, dict) else val)
                for name, val in self.predicates.items()
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def membership_report(
    f: FnTable,
    ideal: SmallnessIdeal | None = None,
    lambdas: Iterable[int] | None = None,
    richness: RichnessParams | None = None,
    lambda_bound: int | None = None,
) -> MonoidPredicateReport:
    _require_unary(f)
    ideal = _ideal(f, ideal)
    lams = tuple(sorted(set(lambdas))) if lambdas is not None else tuple(range(1, f.n + 1))
    richness = richness or RichnessParams()
    if lambda_bound is None:
        lambda_bound = max(f.n - 1, 0)
    preds = {
        "A": in_A(f, ideal),
        "A_prime": in_A_prime(f, ideal, lambda_bound),
        "B": in_B(f, ideal),
        "E": in_E(f, ideal),
        "F": in_F(f, ideal),
        "G_lambda": {l: in_G_lambda(f, l) for l in lams},
        "M_lambda": {l: in_M_lambda(f, l) for l in lams},
        "lambda_injective": {l: lambda_injective(f, l) for l in lams},
        "lambda_surjective": {l: lambda_surjective(f, l) for l in lams},
        "generous": is_generous(f, ideal),
        "chi": in_chi(f, ideal),
        "rich": is_rich(f, richness),
    }
    return MonoidPredicateReport(f.digest, f.n, ideal.k, lams, lambda_bound, richness, preds)


def unary_predicates(
    ideal: SmallnessIdeal, lam: int, richness: RichnessParams | None = None
) -> dict[str, Callable[[FnTable], bool]]:
    """Every predicate as a one-argument callable, parameters bound."""
    richness = richness or RichnessParams()
    return {
        "A": lambda f: in_A(f, ideal),
        "A_prime": lambda f: in_A_prime(f, ideal),
        "B": lambda f: in_B(f, ideal),
        "E": lambda f: in_E(f, ideal),
        "F": lambda f: in_F(f, ideal),
        "G_lambda": lambda f: in_G_lambda(f, lam),
        "M_lambda": lambda f: in_M_lambda(f, lam),
        "lambda_injective": lambda f: lambda_injective(f, lam),
        "lambda_surjective": lambda f: lambda_surjective(f, lam),
        "generous": lambda f: is_generous(f, ideal),
        "chi": lambda f: in_chi(f, ideal),
        "rich": lambda f: is_rich(f, richness),
    }


@dataclass
class ClosureMeasurement:
    name: str
    k: int
    size: int
    closed: bool
    counterexample: tuple[FnTable, FnTable] | None = None


def composition_closure_survey(
    n: int, predicates: dict[str, Callable[[FnTable], bool]], k: int
) -> list[ClosureMeasurement]:
    """For each predicate, whether its extension is closed under composition.

    This is a measurement, not an assertion: the monoid claims concern infinite
    sets and fail for various finite (n, k).
    """
    funcs = list(Universe(n).all_unary())
    out = []
    for name, pred in predicates.items():
        members = [f for f in funcs if pred(f)]
        member_set = set(members)
        witness = None
        for a in members:
            for b in members:
                if compose_unary(a, b) not in member_set:
                    witness = (a, b)
                    break
            if witness:
                break
        out.append(ClosureMeasurement(name, k, len(members), witness is None, witness))
    return out

