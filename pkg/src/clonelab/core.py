"""Universe, smallness ideal, operation tables and the primitive algebra.

Every operation on ``X = {0, ..., n-1}`` is stored as a flat value table.
Argument tuples index the table lexicographically with the FIRST argument
most significant, i.e. ``index(x1, ..., xm) = x1*n**(m-1) + ... + xm``.
Every module and every file format uses this order.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

MAX_UNARY_N = 12
MAX_TABLE_ENTRIES = 10**6


class CloneLabError(Exception):
    """Base class for library errors."""


class ArityError(CloneLabError, ValueError):
    """Arity or universe mismatch between operands."""


class GuardError(CloneLabError):
    """A size guard was exceeded; ``parameter`` names the limiting input."""

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.parameter = parameter


class InfeasibleError(CloneLabError, ValueError):
    """A construction was asked for something that cannot exist."""


class ParseError(CloneLabError, ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def check_unary_guard(n: int, limit: int = MAX_UNARY_N) -> None:
    if n > limit:
        raise GuardError(f"universe size n={n} exceeds the unary guard {limit}", "n")


@dataclass(frozen=True)
class Universe:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("universe size must be at least 1")

    @property
    def elements(self) -> range:
        return range(self.n)

    def all_unary(self) -> Iterator["FnTable"]:
        """All n**n endofunctions in table order."""
        check_unary_guard(self.n, 8)
        for values in itertools.product(range(self.n), repeat=self.n):
            yield FnTable(self.n, 1, values)

    def all_permutations(self) -> Iterator["Permutation"]:
        check_unary_guard(self.n, 10)
        for values in itertools.permutations(range(self.n)):
            yield Permutation.from_values(values)


@dataclass(frozen=True)
class SmallnessIdeal:
    """Finite stand-in for the small/large dichotomy: small means fewer than k.

    ``k = n`` is the literal reading (small iff smaller than the whole set).
    Subsets of small sets are small; the union of two small sets need not be.
    """

    n: int
    k: int | None = None

    def __post_init__(self):
        if self.k is None:
            object.__setattr__(self, "k", self.n)
        if not 1 <= self.k <= self.n:
            raise ValueError(f"threshold k={self.k} must lie in [1, {self.n}]")

    def _size(self, s: Union[int, Iterable[int]]) -> int:
        return s if isinstance(s, int) else len(set(s))

    def small(self, s) -> bool:
        return self._size(s) < self.k

    def large(self, s) -> bool:
        return self._size(s) >= self.k

    def co_small(self, s) -> bool:
        return self.small(self.n - self._size(s))

    def co_large(self, s) -> bool:
        return self.large(self.n - self._size(s))


def _digits(n: int, m: int) -> np.ndarray:
    """Argument tuples in table order, shape (n**m, m)."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((n,) * m).reshape(m, -1).T
    return grids.astype(np.int64)


def _weights(n: int, m: int) -> np.ndarray:
    return n ** np.arange(m - 1, -1, -1, dtype=np.int64)


@dataclass(frozen=True, order=True)
class FnTable:
    """An m-ary operation on {0..n-1} as a flat value table."""

    n: int
    m: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and arity m >= 1")
        size = self.n**self.m
        if size > MAX_TABLE_ENTRIES:
            raise GuardError(
                f"table of size {self.n}^{self.m} exceeds {MAX_TABLE_ENTRIES} entries", "arity"
            )
        vals = tuple(int(v) for v in self.values)
        if len(vals) != size:
            raise ValueError(f"expected {size} values for n={self.n}, m={self.m}, got {len(vals)}")
        if any(v < 0 or v >= self.n for v in vals):
            raise ValueError(f"table entries must lie in [0, {self.n})")
        object.__setattr__(self, "values", vals)

    @classmethod
    def unary(cls, values: Sequence[int]) -> "FnTable":
        return cls(len(values), 1, tuple(values))

    @classmethod
    def identity(cls, n: int) -> "FnTable":
        return cls(n, 1, tuple(range(n)))

    @classmethod
    def constant(cls, n: int, c: int, m: int = 1) -> "FnTable":
        return cls(n, m, (c,) * n**m)

    @classmethod
    def projection(cls, n: int, m: int, k: int) -> "FnTable":
        """pi^m_k with 1-based k."""
        if not 1 <= k <= m:
            raise ValueError(f"projection index {k} out of range for arity {m}")
        return cls(n, m, tuple(_digits(n, m)[:, k - 1]))

    @classmethod
    def from_function(cls, n: int, m: int, fn) -> "FnTable":
        return cls(n, m, tuple(fn(*t) for t in itertools.product(range(n), repeat=m)))

    @classmethod
    def from_array(cls, n: int, m: int, arr) -> "FnTable":
        return cls(n, m, tuple(np.asarray(arr).tolist()))

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.values, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def index(self, args: Sequence[int]) -> int:
        if len(args) != self.m:
            raise ArityError(f"expected {self.m} arguments, got {len(args)}")
        i = 0
        for a in args:
            i = i * self.n + a
        return i

    def __call__(self, *args: int) -> int:
        return self.values[self.index(args)]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.m, self.values)

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256(f"{self.n} {self.m}:{' '.join(map(str, self.values))}".encode())
        return h.hexdigest()[:16]

    def is_permutation(self) -> bool:
        return self.m == 1 and len(set(self.values)) == self.n

    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def __repr__(self) -> str:
        if self.m == 1:
            return f"FnTable({list(self.values)})"
        return f"FnTable(n={self.n}, m={self.m}, {list(self.values)})"


@dataclass(frozen=True)
class Permutation:
    forward: FnTable
    inverse: FnTable

    def __post_init__(self):
        f, g = self.forward, self.inverse
        if f.m != 1 or g.m != 1 or f.n != g.n:
            raise ArityError("permutation tables must be unary on a common universe")
        if any(g.values[f.values[x]] != x or f.values[g.values[x]] != x for x in range(f.n)):
            raise ValueError("forward and inverse do not compose to the identity")

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "Permutation":
        values = tuple(values)
        n = len(values)
        if sorted(values) != list(range(n)):
            raise ValueError(f"{list(values)} is not a permutation of range({n})")
        inv = [0] * n
        for x, y in enumerate(values):
            inv[y] = x
        return cls(FnTable(n, 1, values), FnTable(n, 1, tuple(inv)))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls.from_values(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        values = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                values[a] = b
        return cls.from_values(values)

    @classmethod
    def coerce(cls, gamma) -> "Permutation":
        if isinstance(gamma, Permutation):
            return gamma
        if isinstance(gamma, FnTable):
            if not gamma.is_permutation():
                raise ValueError("table is not a bijection")
            return cls.from_values(gamma.values)
        return cls.from_values(gamma)

    @property
    def n(self) -> int:
        return self.forward.n

    @property
    def values(self) -> tuple[int, ...]:
        return self.forward.values

    def __call__(self, x: int) -> int:
        return self.forward.values[x]

    def inv(self) -> "Permutation":
        return Permutation(self.inverse, self.forward)

    def __matmul__(self, other: "Permutation") -> "Permutation":
        """(self @ other)(x) = self(other(x))."""
        return Permutation.from_values(self.values[x] for x in other.values)

    def power(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inv()
        result = Permutation.identity(self.n)
        for _ in range(abs(k)):
            result = base @ result
        return result

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for x in range(self.n):
            if x in seen:
                continue
            cyc = [x]
            seen.add(x)
            y = self(x)
            while y != x:
                cyc.append(y)
                seen.add(y)
                y = self(y)
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def order(self) -> int:
        from math import lcm

        return lcm(*self.cycle_type()) if self.n else 1

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def __repr__(self) -> str:
        return f"Permutation({list(self.values)})"


def _same_universe(*tables: FnTable) -> int:
    ns = {t.n for t in tables}
    if len(ns) != 1:
        raise ArityError(f"tables live on different universes: {sorted(ns)}")
    return ns.pop()


def compose(f: FnTable, gs: Sequence[FnTable]) -> FnTable:
    """f(g1, ..., gm) as a p-ary operation, all gi of common arity p."""
    if len(gs) != f.m:
        raise ArityError(f"f has arity {f.m} but {len(gs)} inner functions were given")
    n = _same_universe(f, *gs)
    arities = {g.m for g in gs}
    if len(arities) != 1:
        raise ArityError(f"inner functions must share one arity, got {sorted(arities)}")
    p = arities.pop()
    idx = np.zeros(n**p, dtype=np.int64)
    for g in gs:
        idx = idx * n + g.array
    return FnTable(n, p, tuple(f.array[idx].tolist()))


def conjugate(f: FnTable, gamma) -> FnTable:
    """x |-> gamma^-1(f(gamma(x1), ..., gamma(xm))).

    With ``gamma @ delta`` meaning gamma after delta, the action law reads
    ``conjugate(f, gamma @ delta) == conjugate(conjugate(f, gamma), delta)``.
    """
    gamma = Permutation.coerce(gamma)
    n = _same_universe(f, gamma.forward)
    fwd = gamma.forward.array
    idx = fwd[_digits(n, f.m)] @ _weights(n, f.m)
    return FnTable(n, f.m, tuple(gamma.inverse.array[f.array[idx]].tolist()))


def _require_unary(f: FnTable) -> None:
    if f.m != 1:
        raise ArityError(f"expected a unary function, got arity {f.m}")


def kernel_classes(f: FnTable) -> list[tuple[int, ...]]:
    """Fibers of f, sorted by their minimal element."""
    _require_unary(f)
    fibers: dict[int, list[int]] = {}
    for x, y in enumerate(f.values):
        fibers.setdefault(y, []).append(x)
    return sorted((tuple(b) for b in fibers.values()), key=lambda b: b[0])


def fiber_sizes(f: FnTable) -> list[int]:
    """|f^-1[{y}]| for every y in X (zeros included)."""
    _require_unary(f)
    sizes = [0] * f.n
    for y in f.values:
        sizes[y] += 1
    return sizes


def image(f: FnTable) -> frozenset[int]:
    _require_unary(f)
    return frozenset(f.values)


def support(alpha) -> frozenset[int]:
    if isinstance(alpha, Permutation):
        alpha = alpha.forward
    _require_unary(alpha)
    return frozenset(x for x, y in enumerate(alpha.values) if x != y)


def compose_unary(f: FnTable, g: FnTable) -> FnTable:
    """(f o g)(x) = f(g(x))."""
    _require_unary(f)
    _require_unary(g)
    _same_universe(f, g)
    return FnTable(f.n, 1, tuple(f.values[y] for y in g.values))


# -- text formats ------------------------------------------------------------


def format_table(f: FnTable) -> str:
    """Endofunction format for unary tables, operation format otherwise."""
    head = f"{f.n}" if f.m == 1 else f"{f.n} {f.m}"
    return f"{head}\n{' '.join(map(str, f.values))}\n"


def format_operation(f: FnTable) -> str:
    return f"{f.n} {f.m}\n{' '.join(map(str, f.values))}\n"


def _ints(line: str, lineno: int) -> list[int]:
    out, col = [], 1
    for tok in line.split():
        col = line.index(tok, col - 1) + 1
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, found {tok!r}", lineno, col) from None
        col += len(tok)
    return out


def parse_table(text: str, first_line: int = 1) -> FnTable:
    """Parse either the endofunction format (``n``) or the operation format (``n m``)."""
    lines = [ln for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != 2:
        raise ParseError(f"expected 2 lines, found {len(lines)}", first_line + min(len(lines), 2))
    head = _ints(lines[0], first_line)
    if len(head) == 1:
        n, m = head[0], 1
    elif len(head) == 2:
        n, m = head
    else:
        raise ParseError("header must be 'n' or 'n m'", first_line)
    if n < 1 or m < 1:
        raise ParseError("n and m must be positive", first_line)
    values = _ints(lines[1], first_line + 1)
    if len(values) != n**m:
        raise ParseError(f"expected {n**m} values, found {len(values)}", first_line + 1)
    for i, v in enumerate(values):
        if not 0 <= v < n:
            col = 1 + sum(len(str(w)) + 1 for w in values[:i])
            raise ParseError(f"value {v} outside [0, {n})", first_line + 1, col)
    return FnTable(n, m, tuple(values))


def parse_endofunction(text: str) -> FnTable:
    f = parse_table(text)
    if f.m != 1:
        raise ParseError(f"expected a unary endofunction, got arity {f.m}", 1)
    return f
