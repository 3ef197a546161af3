"""Functional-graph structure of endofunctions.

A unary f on a finite set splits into connected components ("snails"), each
made of one cycle with in-trees hanging off the cycle nodes. Two functions
are conjugate exactly when their graphs are isomorphic, which the canonical
form below decides; ``find_conjugator`` builds the isomorphism by walking the
cycle first and then the fibers level by level.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    FnTable,
    InfeasibleError,
    Permutation,
    _require_unary,
    conjugate,
    kernel_classes,
)


@dataclass(frozen=True)
class Snail:
    period: int
    cycle: tuple[int, ...]
    levels: dict[int, int] = field(hash=False)
    parent: dict[int, int] = field(hash=False)

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(sorted(self.levels))

    @property
    def size(self) -> int:
        return len(self.levels)

    @property
    def height(self) -> int:
        return max(self.levels.values())


@dataclass(frozen=True)
class SnailDecomposition:
    components: tuple[Snail, ...]
    component_of: dict[int, int] = field(hash=False)

    def level(self, x: int) -> int:
        return self.components[self.component_of[x]].levels[x]

    def to_json(self) -> list[dict]:
        return [
            {
                "period": s.period,
                "cycle": list(s.cycle),
                "levels": {str(x): s.levels[x] for x in sorted(s.levels)},
            }
            for s in self.components
        ]


def _preimages(f: FnTable) -> list[list[int]]:
    pre: list[list[int]] = [[] for _ in range(f.n)]
    for x, y in enumerate(f.values):
        pre[y].append(x)
    return pre


def decompose(f: FnTable) -> SnailDecomposition:
    _require_unary(f)
    n, vals = f.n, f.values
    # colour: 0 unvisited, 1 on current path, 2 done
    on_cycle = [False] * n
    state = [0] * n
    for start in range(n):
        path, x = [], start
        while state[x] == 0:
            state[x] = 1
            path.append(x)
            x = vals[x]
        if state[x] == 1:
            for y in path[path.index(x):]:
                on_cycle[y] = True
        for y in path:
            state[y] = 2

    pre = _preimages(f)
    snails: list[Snail] = []
    component_of: dict[int, int] = {}
    seen = [False] * n
    # components in order of their minimal element: scanning x ascending
    # hits each component first at its minimum
    for x0 in range(n):
        if seen[x0]:
            continue
        c = x0
        while not on_cycle[c]:
            c = vals[c]
        cyc = [c]
        y = vals[c]
        while y != c:
            cyc.append(y)
            y = vals[y]
        start = cyc.index(min(cyc))
        cyc = cyc[start:] + cyc[:start]
        levels = {c: 0 for c in cyc}
        frontier = list(cyc)
        while frontier:
            nxt = []
            for y in frontier:
                for z in pre[y]:
                    if not on_cycle[z]:
                        levels[z] = levels[y] + 1
                        nxt.append(z)
            frontier = nxt
        idx = len(snails)
        for z in levels:
            seen[z] = True
            component_of[z] = idx
        snails.append(
            Snail(len(cyc), tuple(cyc), levels, {z: vals[z] for z in sorted(levels)})
        )
    return SnailDecomposition(tuple(snails), component_of)


def spectrum(f: FnTable) -> dict[int, int]:
    """Number of p-snails per period p."""
    return dict(sorted(Counter(s.period for s in decompose(f).components).items()))


# -- canonical forms ---------------------------------------------------------


def _tree_codes(f: FnTable, dec: SnailDecomposition) -> dict[int, str]:
    """Sorted-children encoding of the in-tree rooted at every element.

    Cycle nodes only count their off-cycle preimages as children.
    """
    pre = _preimages(f)
    codes: dict[int, str] = {}
    order = sorted(range(f.n), key=dec.level, reverse=True)
    for x in order:
        kids = [codes[z] for z in pre[x] if dec.level(z) > 0]
        codes[x] = "(" + "".join(sorted(kids)) + ")"
    return codes


def _min_rotation(seq: Sequence[str]) -> int:
    """Offset of the lexicographically least rotation; smallest offset on ties."""
    p = len(seq)
    best = 0
    for r in range(1, p):
        if list(seq[r:]) + list(seq[:r]) < list(seq[best:]) + list(seq[:best]):
            best = r
    return best


@dataclass(frozen=True)
class CanonicalForm:
    """Multiset of per-snail codes; equal forms iff conjugate functions."""

    snails: tuple[str, ...]

    def __str__(self) -> str:
        return ";".join(self.snails)


def _snail_code(snail: Snail, codes: Mapping[int, str]) -> tuple[str, int]:
    seq = [codes[c] for c in snail.cycle]
    r = _min_rotation(seq)
    rotated = seq[r:] + seq[:r]
    return f"{snail.period}[{','.join(rotated)}]", r


def canonical_form(f: FnTable) -> CanonicalForm:
    dec = decompose(f)
    codes = _tree_codes(f, dec)
    return CanonicalForm(tuple(sorted(_snail_code(s, codes)[0] for s in dec.components)))


def find_conjugator(f: FnTable, g: FnTable) -> Permutation | None:
    """A permutation gamma with gamma^-1 o g o gamma == f, or None.

    Snails of f are paired with snails of g carrying the same code, the cycles
    are aligned at their canonical rotation, and gamma is then extended down
    the levels, sending the fiber of each mapped x bijectively onto the fiber
    of gamma(x) (children matched by subtree code).
    """
    _require_unary(f)
    _require_unary(g)
    if f.n != g.n:
        return None
    dec_f, dec_g = decompose(f), decompose(g)
    codes_f, codes_g = _tree_codes(f, dec_f), _tree_codes(g, dec_g)

    pool: dict[str, list[tuple[Snail, int]]] = {}
    for s in dec_g.components:
        code, r = _snail_code(s, codes_g)
        pool.setdefault(code, []).append((s, r))
    pairs = []
    for s in dec_f.components:
        code, r = _snail_code(s, codes_f)
        bucket = pool.get(code)
        if not bucket:
            return None
        pairs.append(((s, r), bucket.pop(0)))
    if any(pool.values()):
        return None

    pre_f, pre_g = _preimages(f), _preimages(g)
    gamma: dict[int, int] = {}
    for (sf, rf), (sg, rg) in pairs:
        p = sf.period
        for k in range(p):
            gamma[sf.cycle[(rf + k) % p]] = sg.cycle[(rg + k) % p]
        frontier = [sf.cycle[(rf + k) % p] for k in range(p)]
        while frontier:
            nxt = []
            for x in frontier:
                kids_f = sorted((codes_f[z], z) for z in pre_f[x] if sf.levels[z] > 0)
                kids_g = sorted((codes_g[z], z) for z in pre_g[gamma[x]] if sg.levels[z] > 0)
                if [c for c, _ in kids_f] != [c for c, _ in kids_g]:
                    return None
                for (_, zf), (_, zg) in zip(kids_f, kids_g):
                    gamma[zf] = zg
                    nxt.append(zf)
            frontier = nxt

    if len(gamma) != f.n or len(set(gamma.values())) != f.n:
        return None
    result = Permutation.from_values([gamma[x] for x in range(f.n)])
    if conjugate(g, result) != f:
        raise AssertionError("constructed conjugator failed verification")
    return result


def are_conjugate(f: FnTable, g: FnTable) -> bool:
    return f.n == g.n and canonical_form(f) == canonical_form(g)


# -- constructions -----------------------------------------------------------


def _snail_plan(
    n: int, spec: Mapping[int, int], sizes: Sequence[int] | None
) -> list[tuple[int, int]]:
    periods = []
    for p, count in sorted(spec.items()):
        if p < 1:
            raise InfeasibleError(f"period {p} < 1 (0-snails cannot live on a finite set)")
        if count < 0:
            raise InfeasibleError(f"negative count for period {p}")
        periods.extend([p] * count)
    if not periods:
        raise InfeasibleError("spectrum requests no snails at all")
    if sizes is None:
        base = sum(periods)
        if base > n:
            raise InfeasibleError(f"cycles need {base} elements but n={n}")
        sizes = list(periods)
        for i in range(n - base):
            sizes[i % len(sizes)] += 1
    sizes = list(sizes)
    if len(sizes) != len(periods):
        raise InfeasibleError(f"{len(periods)} snails requested but {len(sizes)} sizes given")
    for p, s in zip(periods, sizes):
        if s < p:
            raise InfeasibleError(f"snail size {s} is smaller than its period {p}")
    if sum(sizes) != n:
        raise InfeasibleError(f"snail sizes sum to {sum(sizes)}, not n={n}")
    return list(zip(periods, sizes))


def realize_spectrum(
    n: int,
    spec: Mapping[int, int],
    sizes: Sequence[int] | None = None,
    width: int = 2,
) -> FnTable:
    """A unary function with exactly ``spec[p]`` snails of period p.

    Snails are laid out in order of increasing period on consecutive blocks of
    elements. ``sizes`` gives each snail's size in that order (default: cycles
    only, surplus elements dealt round-robin). Inside a snail the cycle is
    ``x_i -> x_{i+1}``; the remaining elements hang off it breadth-first with
    at most ``width`` children per node.
    """
    if width < 1:
        raise InfeasibleError("fiber width must be at least 1")
    values = [0] * n
    start = 0
    for p, s in _snail_plan(n, spec, sizes):
        block = list(range(start, start + s))
        for i in range(p):
            values[block[i]] = block[(i + 1) % p]
        parents = list(block[:p])
        slots = {x: width for x in parents}
        head = 0
        for x in block[p:]:
            while slots[parents[head]] == 0:
                head += 1
            par = parents[head]
            values[x] = par
            slots[par] -= 1
            parents.append(x)
            slots[x] = width
        start += s
    return FnTable(n, 1, tuple(values))


def _binary_matrix(margins: Sequence[int]) -> list[list[int]] | None:
    """0/1 matrix with row sums = column sums = margins, or None."""
    k = len(margins)
    remaining = list(margins)
    rows = sorted(range(k), key=lambda i: (-margins[i], i))
    mat = [[0] * k for _ in range(k)]
    for i in rows:
        cols = sorted(range(k), key=lambda j: (-remaining[j], j))[: margins[i]]
        if len(cols) < margins[i] or any(remaining[j] == 0 for j in cols):
            return None
        for j in cols:
            mat[i][j] = 1
            remaining[j] -= 1
    return mat


def kernel_transpose(g: FnTable) -> Permutation:
    """A permutation gamma such that g(x) == g(y), x != y implies g(gamma x) != g(gamma y).

    Kernel classes theta_i (listed by minimum) with elements x_i^j (ascending)
    are sent across classes: on a square array this is the transpose
    x_i^j -> x_j^i. For unequal class sizes a 0/1 incidence matrix with the
    class sizes as both margins decides which target class each x_i^j goes to.
    """
    classes = kernel_classes(g)
    k = len(classes)
    sizes = [len(c) for c in classes]
    for c in classes:
        if len(c) > k:
            raise InfeasibleError(
                f"kernel class {list(c)} has {len(c)} elements but there are only {k} classes"
            )
    mat = _binary_matrix(sizes)
    if mat is None:
        raise InfeasibleError(f"no cross-class permutation exists for class sizes {sizes}")
    sources = [[i for i in range(k) if mat[i][j]] for j in range(k)]
    values = [0] * g.n
    for i, cls in enumerate(classes):
        targets = [j for j in range(k) if mat[i][j]]
        for a, x in enumerate(cls):
            j = targets[a]
            values[x] = classes[j][sources[j].index(i)]
    gamma = Permutation.from_values(values)
    for cls in classes:
        hit = [g.values[gamma(x)] for x in cls]
        if len(set(hit)) != len(hit):
            raise AssertionError("kernel transpose failed verification")
    return gamma

