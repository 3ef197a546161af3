"""Closure computations: monoids, clones under an arity cap, symmetric closure.

The p-ary part of a clone only depends on p-ary members: every p-ary term is
a generator applied to p-ary subterms. So each arity is closed separately,
starting from the p-ary projections (plus fictitious-variable copies of the
(p-1)-ary part) and applying every generator semi-naively until nothing new
appears. Variable permutation is applied as an explicit rule on each round.

If the binary part turns out to be every binary operation, all higher
arities are filled directly: binary operations generate every finitary
operation on a finite set.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    ArityError,
    CloneLabError,
    FnTable,
    GuardError,
    Permutation,
    Universe,
    _digits,
    _weights,
    compose_unary,
    conjugate,
)

MAX_MEMBERS = 2_000_000
MAX_FILL_ENTRIES = 1 << 24
CHUNK_ENTRIES = 1 << 22
FILLED = -1


class NotSymmetricError(CloneLabError, ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# -- row encoding ------------------------------------------------------------


class _Keyer:
    """Integer keys for rows when n**L fits in int64, bytes otherwise."""

    def __init__(self, n: int, length: int):
        self.small = length * math.log2(max(n, 2)) < 62
        if self.small:
            self.weights = _weights(n, length)

    def keys(self, rows: np.ndarray):
        if self.small:
            return rows @ self.weights
        rows = np.ascontiguousarray(rows.astype(np.uint8))
        return [r.tobytes() for r in rows]


def _unique_new(keyer: _Keyer, rows: np.ndarray, *known_sets: set) -> np.ndarray:
    """Rows in none of ``known_sets``, deduplicated and sorted lexicographically."""
    if len(rows) == 0:
        return rows
    if keyer.small:
        keys, first = np.unique(keyer.keys(rows), return_index=True)
        mask = np.fromiter(
            (all(int(k) not in ks for ks in known_sets) for k in keys), bool, len(keys)
        )
        return rows[first[mask]]
    seen: dict[bytes, int] = {}
    for i, k in enumerate(keyer.keys(rows)):
        if k not in seen and all(k not in ks for ks in known_sets):
            seen[k] = i
    order = [seen[k] for k in sorted(seen)]
    return rows[order]


def _key_list(keyer: _Keyer, rows: np.ndarray) -> list:
    ks = keyer.keys(rows)
    return [int(k) for k in ks] if keyer.small else ks


# -- minor operations --------------------------------------------------------


def permute_variables(f: FnTable, sigma: Sequence[int]) -> FnTable:
    """h(x_1..x_m) = f(x_sigma(1), ..., x_sigma(m)), sigma 0-based."""
    if sorted(sigma) != list(range(f.m)):
        raise ValueError(f"{sigma} is not a permutation of the {f.m} variables")
    d = _digits(f.n, f.m)
    return FnTable(f.n, f.m, tuple(f.array[d[:, list(sigma)] @ _weights(f.n, f.m)].tolist()))


def identify_variables(f: FnTable, i: int, j: int) -> FnTable:
    """Set x_j := x_i (0-based) and drop x_j; arity drops by one."""
    if f.m < 2 or i == j or not (0 <= i < f.m and 0 <= j < f.m):
        raise ArityError("identification needs two distinct variable positions")
    d = _digits(f.n, f.m - 1)
    keep = [v for v in range(f.m) if v != j]
    full = np.zeros((len(d), f.m), dtype=np.int64)
    full[:, keep] = d
    full[:, j] = full[:, i]
    return FnTable(f.n, f.m - 1, tuple(f.array[full @ _weights(f.n, f.m)].tolist()))


def add_fictitious(f: FnTable, position: int | None = None) -> FnTable:
    """Insert a dummy variable at ``position`` (default: last)."""
    pos = f.m if position is None else position
    d = _digits(f.n, f.m + 1)
    used = np.delete(d, pos, axis=1)
    return FnTable(f.n, f.m + 1, tuple(f.array[used @ _weights(f.n, f.m)].tolist()))


def diagonal(g: FnTable) -> FnTable:
    """h(x_1..x_k) = g(x_1..x_k, x_1..x_k) for g of even arity 2k."""
    if g.m % 2:
        raise ArityError("diagonal identification needs an even arity")
    k = g.m // 2
    d = _digits(g.n, k)
    return FnTable(g.n, k, tuple(g.array[np.hstack([d, d]) @ _weights(g.n, g.m)].tolist()))


# -- closure sets ------------------------------------------------------------


class ClosureSet:
    """Deduplicated operations closed under composition up to ``arity_cap``.

    Members of each arity are kept as a sorted table array; ``generation``
    holds the BFS round at which each member appeared (``FILLED`` for
    arities filled wholesale).
    """

    def __init__(
        self,
        n: int,
        arity_cap: int,
        rows: dict[int, np.ndarray],
        depths: dict[int, np.ndarray],
        generators: Sequence[FnTable],
        symmetric: bool,
        kind: str = "clone",
        filled_arities: Sequence[int] = (),
        from_cache: bool = False,
    ):
        self.n = n
        self.arity_cap = arity_cap
        self._rows = rows
        self._depths = depths
        self.generators = tuple(generators)
        self.symmetric = symmetric
        self.kind = kind
        self.projections_included = kind == "clone"
        self.filled_arities = tuple(filled_arities)
        self.from_cache = from_cache
        self._keyers = {m: _Keyer(n, n**m) for m in rows}
        self._index = {
            m: {k: i for i, k in enumerate(_key_list(self._keyers[m], r))} for m, r in rows.items()
        }
        self._tables: dict[int, tuple[FnTable, ...]] = {}

    @property
    def arities(self) -> list[int]:
        return sorted(self._rows)

    def rows(self, m: int) -> np.ndarray:
        return self._rows.get(m, np.zeros((0, self.n**m), dtype=np.int64))

    def of_arity(self, m: int) -> tuple[FnTable, ...]:
        if m not in self._tables:
            self._tables[m] = tuple(FnTable(self.n, m, tuple(r)) for r in self.rows(m).tolist())
        return self._tables[m]

    @property
    def members(self) -> list[FnTable]:
        return [f for m in self.arities for f in self.of_arity(m)]

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def __contains__(self, f: FnTable) -> bool:
        if f.n != self.n or f.m not in self._rows:
            return False
        key = _key_list(self._keyers[f.m], f.array[None, :])[0]
        return key in self._index[f.m]

    def generation(self, f: FnTable) -> int:
        key = _key_list(self._keyers[f.m], f.array[None, :])[0]
        return int(self._depths[f.m][self._index[f.m][key]])

    def counts(self) -> dict[int, int]:
        return {m: len(self._rows[m]) for m in self.arities}

    def depth_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for d in self._depths.values():
            for v, c in zip(*np.unique(d, return_counts=True)):
                hist[int(v)] = hist.get(int(v), 0) + int(c)
        return dict(sorted(hist.items()))

    def table_set(self) -> frozenset[FnTable]:
        return frozenset(self.members)

    def same_members(self, other: "ClosureSet") -> bool:
        return self.n == other.n and self.arities == other.arities and all(
            np.array_equal(self.rows(m), other.rows(m)) for m in self.arities
        )

    def effective_generators(self) -> tuple[FnTable, ...]:
        """Generators including every conjugate when the set is symmetric."""
        if not self.symmetric:
            return self.generators
        return _with_conjugates(self.generators, self.n)

    def cache_key(self) -> dict:
        return _cache_key(self.n, self.arity_cap, self.symmetric, self.kind, self.generators)

    def __repr__(self) -> str:
        return (
            f"ClosureSet(n={self.n}, cap={self.arity_cap}, kind={self.kind}, "
            f"symmetric={self.symmetric}, counts={self.counts()})"
        )


def _with_conjugates(gens: Iterable[FnTable], n: int) -> tuple[FnTable, ...]:
    out = set(gens)
    perms = list(Universe(n).all_permutations())
    for g in list(out):
        for gamma in perms:
            out.add(conjugate(g, gamma))
    return tuple(sorted(out))


# -- the fixpoint ------------------------------------------------------------


def _variable_permutation_indices(n: int, p: int) -> list[np.ndarray]:
    """Index maps for a transposition and a p-cycle of the variables. They
    generate S_p, and the fixpoint applies them until nothing new appears."""
    d = _digits(n, p)
    w = _weights(n, p)
    swap = [1, 0] + list(range(2, p))
    cycle = list(range(1, p)) + [0]
    sigmas = [swap] if p == 2 else [swap, cycle]
    return [d[:, s] @ w for s in sigmas]


def _apply_chunk(g: np.ndarray, n: int, rows: np.ndarray, ranges, lo: int, hi: int) -> np.ndarray:
    sizes = [len(r) for r in ranges]
    flat = np.arange(lo, hi, dtype=np.int64)
    coords = np.unravel_index(flat, sizes)
    idx = np.zeros((hi - lo, rows.shape[1]), dtype=np.int64)
    for rng, c in zip(ranges, coords):
        idx = idx * n + rows[rng[c]]
    return g[idx]


def _close_arity(
    n: int,
    p: int,
    gens: Sequence[FnTable],
    seed_rows: np.ndarray,
    seed_depths: np.ndarray,
    workers: int,
    max_members: int,
    permute: bool,
) -> tuple[np.ndarray, np.ndarray]:
    length = n**p
    keyer = _Keyer(n, length)
    known: set = set()

    start = _unique_new(keyer, seed_rows, known)
    # depth of a seed row = its smallest given depth
    seed_keys = _key_list(keyer, seed_rows)
    best: dict = {}
    for k, d in zip(seed_keys, seed_depths.tolist()):
        best[k] = min(d, best.get(k, d))
    start_keys = _key_list(keyer, start)
    known.update(start_keys)
    all_rows = [start]
    all_depths = [np.array([best[k] for k in start_keys], dtype=np.int64)]

    perm_idx = _variable_permutation_indices(n, p) if permute and p > 1 else []
    n_old = 0
    delta = start
    depth = int(all_depths[0].max()) if len(start) else 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while len(delta):
            rows = np.concatenate(all_rows)
            n_all = len(rows)
            old = np.arange(0, n_old)
            new = np.arange(n_old, n_all)
            everything = np.arange(0, n_all)
            jobs = []
            for g in gens:
                for i in range(g.m):
                    ranges = [old] * i + [new] + [everything] * (g.m - 1 - i)
                    total = math.prod(len(r) for r in ranges)
                    step = max(1, CHUNK_ENTRIES // max(1, length * g.m))
                    for lo in range(0, total, step):
                        jobs.append((g.array, ranges, lo, min(total, lo + step)))
            if perm_idx:
                jobs.append(("perm", None, 0, 0))

            def run(job):
                garr, ranges, lo, hi = job
                if isinstance(garr, str):
                    return np.concatenate([delta[:, ix] for ix in perm_idx])
                return _apply_chunk(garr, n, rows, ranges, lo, hi)

            round_keys: set = set()
            parts = []
            batch = max(1, 2 * workers)
            for b in range(0, len(jobs), batch):
                chunk = jobs[b : b + batch]
                outs = pool.map(run, chunk) if pool else map(run, chunk)
                for out in outs:
                    u = _unique_new(keyer, out, known, round_keys)
                    if len(u):
                        round_keys.update(_key_list(keyer, u))
                        parts.append(u)
                if len(known) + len(round_keys) > max_members:
                    raise GuardError(
                        f"closure of arity {p} exceeded {max_members} members; "
                        f"lower --arity-cap or the universe size",
                        "arity_cap",
                    )
            if parts:
                fresh = np.concatenate(parts)
                fresh = fresh[np.lexsort(fresh.T[::-1])]
            else:
                fresh = np.zeros((0, length), dtype=np.int64)
            depth += 1
            n_old = n_all
            if len(fresh):
                known.update(round_keys)
                all_rows.append(fresh)
                all_depths.append(np.full(len(fresh), depth, dtype=np.int64))
            delta = fresh
    finally:
        if pool:
            pool.shutdown()

    rows = np.concatenate(all_rows)
    depths = np.concatenate(all_depths)
    order = np.lexsort(rows.T[::-1]) if len(rows) else np.arange(0)
    return rows[order], depths[order]


def _projection_rows(n: int, p: int) -> np.ndarray:
    return _digits(n, p).T.copy()


def _fill_all(n: int, p: int) -> np.ndarray:
    length = n**p
    if n**length * length > MAX_FILL_ENTRIES:
        raise GuardError(
            f"arity {p} would hold all {n}^{length} operations; lower --arity-cap", "arity_cap"
        )
    return _digits(n, length)


def _check_gens(gens: Sequence[FnTable]) -> int:
    ns = {g.n for g in gens}
    if len(ns) > 1:
        raise ArityError(f"generators live on different universes: {sorted(ns)}")
    return ns.pop() if ns else 0


def _closure(
    n: int,
    gens: Sequence[FnTable],
    m_max: int,
    symmetric: bool,
    kind: str,
    workers: int,
    max_members: int,
) -> ClosureSet:
    base_gens = tuple(sorted(set(gens)))
    use = _with_conjugates(base_gens, n) if symmetric else base_gens
    rows: dict[int, np.ndarray] = {}
    depths: dict[int, np.ndarray] = {}
    filled = []
    if kind == "monoid":
        ident = np.arange(n, dtype=np.int64)[None, :]
        rows[1], depths[1] = _close_arity(
            n, 1, use, ident, np.zeros(1, dtype=np.int64), workers, max_members, False
        )
    else:
        for p in range(1, m_max + 1):
            if 2 in rows and len(rows[2]) == n ** (n**2) and p > 2:
                rows[p] = _fill_all(n, p)
                depths[p] = np.full(len(rows[p]), FILLED, dtype=np.int64)
                filled.append(p)
                continue
            seeds = [_projection_rows(n, p)]
            seed_depths = [np.zeros(p, dtype=np.int64)]
            if p - 1 in rows:
                prev = rows[p - 1]
                # h(x_1..x_p) = f(x_1..x_{p-1})
                seeds.append(prev[:, np.arange(n**p) // n])
                seed_depths.append(np.maximum(depths[p - 1], 0))
            rows[p], depths[p] = _close_arity(
                n,
                p,
                use,
                np.concatenate(seeds),
                np.concatenate(seed_depths),
                workers,
                max_members,
                True,
            )
    return ClosureSet(n, m_max, rows, depths, base_gens, symmetric, kind, filled)


def monoid_closure(
    gens: Iterable[FnTable],
    n: int | None = None,
    workers: int = 1,
    max_members: int = MAX_MEMBERS,
    symmetric: bool = False,
) -> ClosureSet:
    """The monoid generated by unary ``gens`` (identity included)."""
    gens = list(gens)
    n = n or _check_gens(gens)
    _check_gens(gens)
    if not n:
        raise ValueError("universe size needed when there are no generators")
    if any(g.m != 1 for g in gens):
        raise ArityError("monoid generators must be unary")
    if n > 12:
        raise GuardError(f"universe size n={n} exceeds the unary guard 12", "n")
    return _closure(n, gens, 1, symmetric, "monoid", workers, max_members)


def clone_closure(
    gens: Iterable[FnTable],
    m_max: int,
    n: int | None = None,
    symmetric: bool = False,
    workers: int = 1,
    max_members: int = MAX_MEMBERS,
    cache_dir: str | os.PathLike | None = None,
) -> ClosureSet:
    """Least set of operations of arity <= m_max containing ``gens`` and the
    projections, closed under composition and the minor operations."""
    gens = list(gens)
    found = _check_gens(gens)
    n = n or found
    if not n:
        raise ValueError("universe size needed when there are no generators")
    if found and found != n:
        raise ArityError(f"generators are over n={found}, requested n={n}")
    if m_max < 1:
        raise ValueError("arity cap must be >= 1")
    if any(g.m > m_max for g in gens):
        raise ArityError(f"generator arity exceeds the cap {m_max}")
    if n**m_max > 10**6:
        raise GuardError(f"tables of size {n}^{m_max} exceed the table guard", "arity_cap")
    if cache_dir is not None:
        path = cache_path(cache_dir, _cache_key(n, m_max, symmetric, "clone", gens))
        if path.exists():
            return load_closure(path)
    cs = _closure(n, gens, m_max, symmetric, "clone", workers, max_members)
    if cache_dir is not None:
        save_closure(cs, cache_dir)
    return cs


def symmetric_closure(cs: ClosureSet, workers: int = 1) -> ClosureSet:
    """Least superset closed under composition and conjugation by all of S_n."""
    if cs.symmetric:
        return cs
    return _closure(
        cs.n, cs.generators, cs.arity_cap, True, cs.kind, workers, MAX_MEMBERS
    )


# -- lemma checks ------------------------------------------------------------


@dataclass(frozen=True)
class RepresentationVerdict:
    equal: bool
    closure_size: int
    witness: FnTable | None = None
    side: str | None = None


def _assert_symmetric_monoid(G: ClosureSet) -> list[FnTable]:
    members = list(G.of_arity(1))
    if any(m != 1 for m in G.arities):
        raise NotSymmetricError("expected a unary closure set")
    table = set(members)
    ident = FnTable.identity(G.n)
    if ident not in table:
        raise NotSymmetricError("identity missing", ident)
    for a in members:
        for b in members:
            c = compose_unary(a, b)
            if c not in table:
                raise NotSymmetricError("not closed under composition", (a, b))
    for gamma in Universe(G.n).all_permutations():
        for a in members:
            c = conjugate(a, gamma)
            if c not in table:
                raise NotSymmetricError("not closed under conjugation", (a, gamma))
    return members


def check_representation_unary(G: ClosureSet, alpha) -> RepresentationVerdict:
    """Compare the monoid generated by G and alpha with {alpha^k o g} and {g o alpha^k}."""
    alpha = Permutation.coerce(alpha)
    members = _assert_symmetric_monoid(G)
    a = alpha.forward
    closure = monoid_closure(members + [a], n=G.n)
    got = closure.table_set()
    powers = [alpha.power(k).forward for k in range(alpha.order())]
    left = {compose_unary(pw, g) for pw in powers for g in members}
    right = {compose_unary(g, pw) for pw in powers for g in members}
    for side, forms in (("left", left), ("right", right)):
        if forms != got:
            witness = min(forms.symmetric_difference(got))
            return RepresentationVerdict(False, len(got), witness, side)
    return RepresentationVerdict(True, len(got))


@dataclass(frozen=True)
class AlphaVerdict:
    holds: bool
    in_closure: bool
    witness: FnTable | None = None

    @property
    def consistent(self) -> bool:
        return self.holds == self.in_closure


def _is_involution(alpha: Permutation) -> bool:
    return all(alpha(alpha(x)) == x for x in range(alpha.n))


def alpha_extension(C: ClosureSet, alpha, workers: int = 1) -> ClosureSet:
    """clone_closure(C u {alpha}) built from C's (effective) generators."""
    alpha = Permutation.coerce(alpha)
    gens = list(C.effective_generators()) + [alpha.forward]
    return clone_closure(gens, C.arity_cap, n=C.n, workers=workers)


def alpha_normal_forms(C: ClosureSet, alpha, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows of x |-> f(alpha(x), x) for every f in C of arity 2m, and the f rows."""
    alpha = Permutation.coerce(alpha)
    n = C.n
    d = _digits(n, m)
    args = np.hstack([alpha.forward.array[d], d])
    f_rows = C.rows(2 * m)
    return f_rows[:, args @ _weights(n, 2 * m)], f_rows


def check_representation_binary_alpha(
    C: ClosureSet, alpha, t: FnTable, closure: ClosureSet | None = None
) -> AlphaVerdict:
    """Whether t(x) = f(alpha(x_1..x_m), x_1..x_m) for some f in C of arity 2m,
    cross-checked against membership of t in the clone generated by C and alpha."""
    alpha = Permutation.coerce(alpha)
    if not _is_involution(alpha):
        raise ValueError(f"{alpha} is not an involution")
    if not C.symmetric:
        raise NotSymmetricError("C must be a symmetric closure set")
    if 2 * t.m > C.arity_cap:
        raise ArityError(f"need arity {2 * t.m} members but the cap is {C.arity_cap}")
    derived, f_rows = alpha_normal_forms(C, alpha, t.m)
    hits = np.flatnonzero((derived == t.array).all(axis=1))
    witness = FnTable(C.n, 2 * t.m, tuple(f_rows[hits[0]].tolist())) if len(hits) else None
    ext = closure if closure is not None else alpha_extension(C, alpha)
    return AlphaVerdict(len(hits) > 0, t in ext, witness)


def pol_membership(
    f: FnTable,
    pred: Callable[[FnTable], bool],
    sample: int | None = None,
    seed: int = 0,
    limit: int = 10**6,
) -> bool:
    """Whether f(g_1..g_m) satisfies pred whenever every g_i does.

    The extension of pred is enumerated over all n**n unary functions; if the
    number of m-tuples exceeds ``limit`` a ``sample`` size must be given and
    that many seeded random tuples are checked instead.
    """
    ext = [g for g in Universe(f.n).all_unary() if pred(g)]
    if not ext:
        return True
    total = len(ext) ** f.m
    arr = np.array([g.values for g in ext], dtype=np.int64)
    w = _weights(f.n, f.m)
    if total <= limit:
        tuples: Iterable = itertools.product(range(len(ext)), repeat=f.m)
    elif sample is None:
        raise GuardError(f"{total} argument tuples exceed {limit}; pass a sample size", "sample")
    else:
        rng = np.random.default_rng(seed)
        tuples = rng.integers(0, len(ext), size=(sample, f.m)).tolist()
    for tup in tuples:
        idx = arr[list(tup)].T @ w
        if not pred(FnTable(f.n, 1, tuple(f.array[idx].tolist()))):
            return False
    return True


# -- normal closure in S_n ---------------------------------------------------


@dataclass(frozen=True)
class NormalClosure:
    n: int
    generates: str
    order: int
    witness: tuple[Permutation, ...] | None = None


_GROUP_MEMO: dict[tuple[int, bytes], NormalClosure] = {}


@functools.lru_cache(maxsize=None)
def _all_perm_rows(n: int) -> np.ndarray:
    rows = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    rows.setflags(write=False)
    return rows


def _generated_group(n: int, gens: np.ndarray) -> np.ndarray:
    """All products of ``gens`` (rows), identity included."""
    w = _weights(n, n)
    ident = np.arange(n, dtype=np.int64)[None, :]
    elements = [ident]
    known = {int(k) for k in ident @ w}
    frontier = ident
    while len(frontier):
        # g o x for every generator g and frontier element x
        prod = gens[:, frontier].reshape(-1, n)
        keys, first = np.unique(prod @ w, return_index=True)
        mask = np.fromiter((int(k) not in known for k in keys), bool, len(keys))
        frontier = prod[first[mask]]
        known.update(int(k) for k in keys[mask])
        elements.append(frontier)
    return np.concatenate(elements)


def _parity(rows: np.ndarray) -> np.ndarray:
    """0 for even, 1 for odd permutations (inversion count)."""
    n = rows.shape[1]
    inv = np.zeros(len(rows), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += rows[:, i] > rows[:, j]
    return inv % 2


def normal_closure_check(alpha) -> NormalClosure:
    """Subgroup of S_n generated by all conjugates of alpha.

    The conjugacy class is the generating set, so results are memoized per
    class.
    """
    alpha = Permutation.coerce(alpha)
    n = alpha.n
    if n > 8:
        raise GuardError(f"n={n} is too large for exhaustive normal closure", "n")
    perms = _all_perm_rows(n)
    inv = np.argsort(perms, axis=1)
    a = alpha.forward.array
    # gamma^-1 o alpha o gamma for every gamma
    conj = inv[np.arange(len(perms))[:, None], a[perms]]
    keys, first = np.unique(conj @ _weights(n, n), return_index=True)
    memo_key = (n, keys.tobytes())
    if memo_key in _GROUP_MEMO:
        return _GROUP_MEMO[memo_key]
    group = _generated_group(n, conj[first])
    order = len(group)
    full = math.factorial(n)
    if order == full:
        label = "S_n"
    elif n >= 2 and order == full // 2 and not _parity(group).any():
        label = "A_n"
    else:
        label = "proper"
    witness = None
    if label == "proper" and order <= 64:
        group = group[np.lexsort(group.T[::-1])]
        witness = tuple(Permutation.from_values(g) for g in group.tolist())
    result = NormalClosure(n, label, order, witness)
    _GROUP_MEMO[memo_key] = result
    return result


# -- cache -------------------------------------------------------------------


def _cache_key(n, m_max, symmetric, kind, gens) -> dict:
    return {
        "n": n,
        "m_max": m_max,
        "symmetric": bool(symmetric),
        "kind": kind,
        "generators": sorted(g.digest for g in set(gens)),
    }


def cache_path(cache_dir, key: dict) -> Path:
    h = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:24]
    return Path(cache_dir) / f"closure-{h}.txt"


def save_closure(cs: ClosureSet, cache_dir) -> Path:
    """Header line with parameters, then every member in operation format.

    Written to a temporary file and renamed into place.
    """
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    key = cs.cache_key()
    header = dict(key)
    header.update(
        {
            "counts": {str(m): c for m, c in cs.counts().items()},
            "filled_arities": list(cs.filled_arities),
            "generation": [int(d) for m in cs.arities for d in cs._depths[m]],
            "generator_tables": [[g.m, list(g.values)] for g in cs.generators],
        }
    )
    path = cache_path(cache_dir, key)
    lines = ["# clonelab-closure " + json.dumps(header, sort_keys=True)]
    for m in cs.arities:
        for r in cs.rows(m).tolist():
            lines.append(f"{cs.n} {m}")
            lines.append(" ".join(map(str, r)))
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=".closure-", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    return path


def load_closure(path) -> ClosureSet:
    with open(path) as fh:
        head = fh.readline()
        if not head.startswith("# clonelab-closure "):
            raise ValueError(f"{path} is not a closure cache file")
        meta = json.loads(head[len("# clonelab-closure "):])
        n = meta["n"]
        by_arity: dict[int, list[list[int]]] = {}
        while True:
            hdr = fh.readline()
            if not hdr.strip():
                break
            _, m = map(int, hdr.split())
            by_arity.setdefault(m, []).append(list(map(int, fh.readline().split())))
    rows = {m: np.array(v, dtype=np.int64).reshape(len(v), n**m) for m, v in by_arity.items()}
    flat = meta["generation"]
    depths, pos = {}, 0
    for m in sorted(rows):
        depths[m] = np.array(flat[pos : pos + len(rows[m])], dtype=np.int64)
        pos += len(rows[m])
    gens = [FnTable(n, m, tuple(v)) for m, v in meta["generator_tables"]]
    cs = ClosureSet(
        n, meta["m_max"], rows, depths, gens, meta["symmetric"], meta["kind"],
        meta["filled_arities"], from_cache=True,
    )
    if cs.counts() != {int(m): c for m, c in meta["counts"].items()}:
        raise ValueError(f"{path}: member counts disagree with the header")
    return cs
