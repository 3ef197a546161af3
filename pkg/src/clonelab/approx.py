"""Extending partial functions on co-large sets, and probing closure sets for
the co-large approximation property.

Wherever the construction wants a map from X\\S onto X with large fibers, a
round-robin map is used instead: the i-th element of X\\S (ascending) goes
to i mod n. It is onto exactly when |X\\S| >= n.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .clone_engine import ClosureSet
from .core import FnTable, InfeasibleError, ParseError, SmallnessIdeal, _digits
from .funcgraph import realize_spectrum, spectrum
from .monoids import RichnessParams


@dataclass(frozen=True)
class PartialFn:
    """A map S^m -> X for S a subset of X = {0..n-1}."""

    n: int
    m: int
    domain: tuple[int, ...]
    values: dict[tuple[int, ...], int] = field(hash=False)

    def __post_init__(self):
        dom = tuple(sorted(set(self.domain)))
        object.__setattr__(self, "domain", dom)
        if any(not 0 <= x < self.n for x in dom):
            raise ValueError(f"domain {dom} not inside [0, {self.n})")
        S = set(dom)
        for tup, v in self.values.items():
            if len(tup) != self.m or not set(tup) <= S:
                raise ValueError(f"tuple {tup} is not in S^{self.m}")
            if not 0 <= v < self.n:
                raise ValueError(f"value {v} outside [0, {self.n})")

    @classmethod
    def from_table(cls, f: FnTable, domain: Sequence[int]) -> "PartialFn":
        return cls(f.n, f.m, tuple(domain), {t: f(*t) for t in itertools.product(sorted(domain), repeat=f.m)})

    @property
    def complement(self) -> tuple[int, ...]:
        S = set(self.domain)
        return tuple(x for x in range(self.n) if x not in S)

    def is_total_on_domain(self) -> bool:
        return len(self.values) == len(self.domain) ** self.m

    def is_co_large(self, ideal: SmallnessIdeal) -> bool:
        return ideal.co_large(self.domain)

    def agrees(self, g: FnTable) -> bool:
        return all(g(*t) == v for t, v in self.values.items())


def format_partial(p: PartialFn) -> str:
    lines = [f"{p.n} {p.m} {len(p.domain)}", " ".join(map(str, p.domain))]
    for tup in sorted(p.values):
        lines.append(f"{' '.join(map(str, tup))} -> {p.values[tup]}")
    return "\n".join(lines) + "\n"


def parse_partial(text: str) -> PartialFn:
    lines = text.splitlines()
    if len(lines) < 2:
        raise ParseError("expected a header and a domain line", len(lines) + 1)
    try:
        n, m, size = map(int, lines[0].split())
    except ValueError:
        raise ParseError("header must be 'n m |S|'", 1) from None
    try:
        dom = [int(t) for t in lines[1].split()]
    except ValueError:
        raise ParseError("domain must be integers", 2) from None
    if len(dom) != size:
        raise ParseError(f"expected {size} domain elements, found {len(dom)}", 2)
    values = {}
    for i, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        sep = "->" if "->" in line else "→"
        if sep not in line:
            raise ParseError("expected 'x1 ... xm -> v'", i)
        lhs, rhs = line.split(sep, 1)
        try:
            tup = tuple(int(t) for t in lhs.split())
            values[tup] = int(rhs)
        except ValueError:
            raise ParseError("non-integer entry", i) from None
    try:
        return PartialFn(n, m, tuple(dom), values)
    except ValueError as exc:
        raise ParseError(str(exc), 3) from None


def round_robin(outside: Sequence[int], n: int) -> dict[int, int]:
    """Spread X\\S over X as evenly as possible, in element order."""
    return {x: i % n for i, x in enumerate(sorted(outside))}


def _check_domain_total(p: PartialFn) -> None:
    if not p.is_total_on_domain():
        missing = next(t for t in itertools.product(p.domain, repeat=p.m) if t not in p.values)
        raise InfeasibleError(f"partial function has no value at {missing}")


def extend_generic(p: PartialFn) -> FnTable:
    """Unary extension: p on S, round-robin on X\\S."""
    if p.m != 1:
        raise ValueError("extend_generic takes a unary partial function")
    _check_domain_total(p)
    gamma = round_robin(p.complement, p.n)
    values = [p.values[(x,)] if (x,) in p.values else gamma[x] for x in range(p.n)]
    g = FnTable(p.n, 1, tuple(values))
    assert p.agrees(g)
    return g


@dataclass(frozen=True)
class EFExtension:
    table: FnTable
    gamma: dict[int, int] = field(hash=False)
    onto: bool = False

    def gamma_image(self, xs) -> frozenset[int]:
        return frozenset(self.gamma[x] for x in xs if x in self.gamma)


def extend_polEF(p: PartialFn) -> EFExtension:
    """Binary extension g with g = p on S^2, g(x1, x2) = gamma(x1) for x1 outside
    S and gamma(x2) for x1 in S, x2 outside S."""
    if p.m != 2:
        raise ValueError("extend_polEF takes a binary partial function")
    outside = p.complement
    if not outside:
        raise InfeasibleError("X \\ S must be nonempty")
    _check_domain_total(p)
    gamma = round_robin(outside, p.n)
    S = set(p.domain)
    values = []
    for x1, x2 in itertools.product(range(p.n), repeat=2):
        if x1 in S and x2 in S:
            values.append(p.values[(x1, x2)])
        elif x1 not in S:
            values.append(gamma[x1])
        else:
            values.append(gamma[x2])
    g = FnTable(p.n, 2, tuple(values))
    assert p.agrees(g)
    return EFExtension(g, gamma, len(set(gamma.values())) == p.n)


def apply_binary(g: FnTable, g1: FnTable, g2: FnTable) -> FnTable:
    """The unary function x |-> g(g1(x), g2(x))."""
    return FnTable(g.n, 1, tuple(g.values[a * g.n + b] for a, b in zip(g1.values, g2.values)))


def containment_holds(ext: EFExtension, S: Sequence[int], g1: FnTable, g2: FnTable) -> bool:
    """g(g1, g2)[X] contains gamma[(X\\S) & g1[X]]."""
    img = set(apply_binary(ext.table, g1, g2).values)
    outside_hit = set(g1.values).difference(S)
    return ext.gamma_image(outside_hit) <= img


# -- probing -----------------------------------------------------------------


@dataclass
class ProbeInstance:
    domain: tuple[int, ...]
    values: tuple[int, ...]
    witness: FnTable | None


@dataclass
class ApproxProbeReport:
    arity: int
    n: int
    k: int
    seed: int
    exhaustive: bool
    instances: list[ProbeInstance]

    @property
    def hits(self) -> int:
        return sum(1 for i in self.instances if i.witness is not None)

    @property
    def hit_rate(self) -> float:
        return self.hits / len(self.instances) if self.instances else 1.0

    def misses(self) -> list[ProbeInstance]:
        return [i for i in self.instances if i.witness is None]


def _co_large_domains(n: int, ideal: SmallnessIdeal) -> list[tuple[int, ...]]:
    return [
        S
        for size in range(n + 1)
        for S in itertools.combinations(range(n), size)
        if ideal.co_large(S)
    ]


def probe_approximation(
    cs: ClosureSet,
    m: int,
    ideal: SmallnessIdeal | None = None,
    trials: int = 200,
    seed: int = 0,
    exhaustive_limit: int = 10**5,
) -> ApproxProbeReport:
    """Sample (co-large S, partial f on S^m) and look for an extension in cs.

    Enumerates every instance instead when there are at most
    ``exhaustive_limit`` of them; the report flags which happened.
    """
    if m > cs.arity_cap:
        raise ValueError(f"arity {m} exceeds the closure's cap {cs.arity_cap}")
    n = cs.n
    ideal = ideal or SmallnessIdeal(n)
    domains = _co_large_domains(n, ideal)
    space = sum(n ** (len(S) ** m) for S in domains)
    rows = cs.rows(m)
    digits = _digits(n, m)
    exhaustive = space <= exhaustive_limit

    index: dict[tuple[int, ...], dict[bytes, int]] = {}
    for S in domains:
        cells = [i for i, t in enumerate(digits.tolist()) if set(t) <= set(S)]
        restricted = rows[:, cells] if len(rows) else np.zeros((0, len(cells)), dtype=np.int64)
        table: dict[bytes, int] = {}
        for j in range(len(restricted) - 1, -1, -1):
            table[restricted[j].astype(np.int64).tobytes()] = j
        index[S] = table

    def lookup(S, vals):
        j = index[S].get(np.asarray(vals, dtype=np.int64).tobytes())
        return None if j is None else FnTable(n, m, tuple(rows[j].tolist()))

    instances = []
    if exhaustive:
        for S in domains:
            for vals in itertools.product(range(n), repeat=len(S) ** m):
                instances.append(ProbeInstance(S, vals, lookup(S, vals)))
    else:
        rng = random.Random(seed)
        for _ in range(trials):
            S = domains[rng.randrange(len(domains))]
            vals = tuple(rng.randrange(n) for _ in range(len(S) ** m))
            instances.append(ProbeInstance(S, vals, lookup(S, vals)))
    return ApproxProbeReport(m, n, ideal.k, seed, exhaustive, instances)


# -- rich extensions ---------------------------------------------------------


@dataclass(frozen=True)
class RichExtension:
    table: FnTable
    core_domain: tuple[int, ...]
    core: FnTable


def build_rich_extension(
    n: int,
    S: Sequence[int],
    richness: RichnessParams,
    spec: Mapping[int, int] | None = None,
    T: Sequence[int] | None = None,
    width: int = 2,
    ideal: SmallnessIdeal | None = None,
) -> RichExtension:
    """A unary f realising ``spec`` on a T inside S, other points spread evenly.

    ``spec`` defaults to ``min_count`` pure cycles of every requested period,
    and T to the smallest prefix of S that hosts it. Points outside T go
    round-robin over X, so fibers are as even as possible; they can only add
    snails, never remove those living on T.
    """
    S = sorted(set(S))
    if spec is None:
        spec = {p: richness.min_count for p in sorted(richness.periods)}
    needed = sum(p * c for p, c in spec.items())
    if T is None:
        T = S[:needed]
    T = sorted(set(T))
    if not set(T) <= set(S):
        raise InfeasibleError("T must lie inside S")
    if len(T) < needed:
        raise InfeasibleError(f"spectrum needs {needed} elements but |T| = {len(T)}")
    core = realize_spectrum(len(T), spec, width=width)
    values = list(range(n))
    for i, x in enumerate(T):
        values[x] = T[core.values[i]]
    rest = [x for x in range(n) if x not in set(T)]
    for x, y in round_robin(rest, n).items():
        values[x] = y
    f = FnTable(n, 1, tuple(values))
    relabel = {x: i for i, x in enumerate(T)}
    restricted = FnTable(len(T), 1, tuple(relabel[f.values[x]] for x in T))
    assert restricted == core and spectrum(restricted) == dict(sorted(spec.items()))
    return RichExtension(f, tuple(T), core)


def cross_section_example(
    n: int, T: Sequence[int], zero: int, seed: int = 0
) -> FnTable:
    """Binary f constant ``zero`` on T^2 with f(s, zero) = f(zero, s) spread
    round-robin for s outside T; remaining cells seeded at random."""
    T = sorted(set(T))
    if zero not in T:
        raise ValueError("the distinguished point must lie in T")
    outside = [x for x in range(n) if x not in set(T)]
    gamma = round_robin(outside, n)
    rng = random.Random(seed)
    values = []
    for a, b in itertools.product(range(n), repeat=2):
        if a in T and b in T:
            values.append(zero)
        elif b == zero and a in gamma:
            values.append(gamma[a])
        elif a == zero and b in gamma:
            values.append(gamma[b])
        else:
            values.append(rng.randrange(n))
    return FnTable(n, 2, tuple(values))

