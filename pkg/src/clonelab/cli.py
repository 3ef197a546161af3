"""Command-line entry point: ``clonelab <command> [options]``.

Exit codes: 0 success, 1 suite failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .clone_engine import ClosureSet, cache_path, clone_closure
from .core import (
    CloneLabError,
    FnTable,
    GuardError,
    ParseError,
    SmallnessIdeal,
    conjugate,
    format_table,
    parse_endofunction,
    parse_table,
)
from .funcgraph import (
    are_conjugate,
    canonical_form,
    decompose,
    find_conjugator,
    realize_spectrum,
    spectrum,
)
from .monoids import RichnessParams, membership_report
from .suites import SUITES

SCHEMA = 1
CACHE_ENV = "CLONELAB_CACHE"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int | None
    k: int | None
    arity_cap: int
    seed: int
    cache_dir: str | None
    format: str
    symmetric: bool = False

    def validate(self) -> "RunConfig":
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        if self.k is not None:
            if self.k < 1:
                raise UsageError("--k must be positive")
            if self.n is not None and self.k > self.n:
                raise UsageError(f"--k {self.k} exceeds --n {self.n}")
        if self.arity_cap < 1:
            raise UsageError("--arity-cap must be positive")
        if self.format not in ("text", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        return self

    def ideal(self, n: int) -> SmallnessIdeal:
        if self.n is not None and self.n != n:
            raise UsageError(f"input is over n={n} but --n {self.n} was given")
        try:
            return SmallnessIdeal(n, self.k)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def _config(args) -> RunConfig:
    cache_dir = args.cache_dir or os.environ.get(CACHE_ENV) or None
    return RunConfig(
        args.n, args.k, args.arity_cap, args.seed, cache_dir, args.format, args.symmetric
    ).validate()


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_unary(path: str) -> FnTable:
    try:
        return parse_endofunction(_read(path))
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_tables(path: str) -> list[FnTable]:
    """Tables separated by blank lines; each in endofunction or operation format."""
    text = _read(path)
    out, block, start = [], [], 1
    for i, line in enumerate(text.splitlines() + [""], start=1):
        if line.strip():
            if not block:
                start = i
            block.append(line)
        elif block:
            try:
                out.append(parse_table("\n".join(block), first_line=start))
            except ParseError as exc:
                raise UsageError(f"{path}: {exc}") from None
            block = []
    if not out:
        raise UsageError(f"{path}: no table found")
    return out


def _emit(cfg: RunConfig, command: str, payload: dict, text_lines: list[str]) -> None:
    if cfg.format == "json":
        doc = {"schema": SCHEMA, "command": command, "config": asdict(cfg), **payload}
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print("\n".join(text_lines))


# -- commands ----------------------------------------------------------------


def analyze_report(f: FnTable, cfg: RunConfig, richness: RichnessParams) -> dict:
    ideal = cfg.ideal(f.n)
    return {
        "function": list(f.values),
        "n": f.n,
        "decomposition": decompose(f).to_json(),
        "spectrum": {str(p): c for p, c in spectrum(f).items()},
        "canonical_form": str(canonical_form(f)),
        "predicates": membership_report(f, ideal, richness=richness).to_json(),
    }


def cmd_analyze(args, cfg: RunConfig) -> int:
    f = _load_unary(args.file)
    periods = frozenset(int(p) for p in args.periods.split(",") if p.strip())
    report = analyze_report(f, cfg, RichnessParams(periods, args.min_count))
    lines = [
        f"function: {' '.join(map(str, f.values))}",
        f"spectrum: {report['spectrum']}",
        f"canonical form: {report['canonical_form']}",
        "decomposition:",
    ]
    for s in report["decomposition"]:
        lines.append(f"  period {s['period']} cycle {s['cycle']} levels {s['levels']}")
    lines.append("predicates:")
    for name, val in report["predicates"]["predicates"].items():
        lines.append(f"  {name}: {json.dumps(val, sort_keys=True)}")
    _emit(cfg, "analyze", report, lines)
    return 0


def cmd_conj(args, cfg: RunConfig) -> int:
    f, g = _load_unary(args.f), _load_unary(args.g)
    if f.n != g.n:
        raise UsageError(f"universe mismatch: n={f.n} vs n={g.n}")
    cfg.ideal(f.n)
    verdict = are_conjugate(f, g)
    payload: dict = {"conjugate": verdict}
    lines = ["CONJUGATE" if verdict else "NOT"]
    if args.find and verdict:
        gamma = find_conjugator(f, g)
        # find_conjugator verifies internally; repeat it here before printing
        assert gamma is not None and conjugate(g, gamma) == f
        payload["gamma"] = list(gamma.values)
        lines.append(format_table(FnTable(f.n, 1, gamma.values)).rstrip())
    _emit(cfg, "conj", payload, lines)
    return 0


def _closure_summary(cs: ClosureSet, cache: str) -> dict:
    return {
        "counts": {str(m): c for m, c in cs.counts().items()},
        "total": len(cs),
        "depth_histogram": {str(d): c for d, c in cs.depth_histogram().items()},
        "filled_arities": list(cs.filled_arities),
        "cache": cache,
    }


def cmd_closure(args, cfg: RunConfig) -> int:
    gens = [g for path in args.generators for g in _load_tables(path)]
    ns = {g.n for g in gens}
    if len(ns) > 1:
        raise UsageError(f"generators live on different universes: {sorted(ns)}")
    n = ns.pop() if ns else cfg.n
    if n is None:
        raise UsageError("--n is required when no generators are given")
    cfg.ideal(n)
    cache_dir = cfg.cache_dir
    if args.cache and cache_dir is None:
        cache_dir = ".clonelab-cache"
    cs = clone_closure(
        gens, cfg.arity_cap, n=n, symmetric=cfg.symmetric, workers=args.workers,
        cache_dir=cache_dir,
    )
    state = "off" if cache_dir is None else "hit" if cs.from_cache else "miss"
    payload = _closure_summary(cs, state)
    if cache_dir is not None:
        payload["cache_file"] = str(cache_path(cache_dir, cs.cache_key()))
    lines = [f"n={n} arity cap={cfg.arity_cap} symmetric={cfg.symmetric} cache={state}"]
    lines += [f"arity {m}: {c}" for m, c in cs.counts().items()]
    lines.append(f"total: {len(cs)}")
    lines.append("generation depths: " + ", ".join(
        f"{'filled' if d < 0 else d}:{c}" for d, c in cs.depth_histogram().items()))
    if args.dump:
        with open(args.dump, "w") as fh:
            fh.write("\n".join(format_table(f) for f in cs.members))
        lines.append(f"members written to {args.dump}")
    _emit(cfg, "closure", payload, lines)
    return 0


def _suite_kwargs(name: str, cfg: RunConfig) -> dict:
    n = cfg.n
    if name == "schreier-ulam":
        return {"ns": (n,)} if n else {}
    kw: dict = {}
    if name == "glambda-oracle":
        kw["seed"] = cfg.seed
        if n:
            kw["n_max"] = n
            kw["exhaustive_max"] = min(4, n)
        return kw
    if n:
        kw["n"] = n
    if name == "rep-binary-alpha":
        kw["seed"] = cfg.seed
        kw["cap"] = cfg.arity_cap if cfg.arity_cap > 1 else 4
    if name == "approx-ext":
        kw["seed"] = cfg.seed
    return kw


def cmd_lemma_check(args, cfg: RunConfig) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    result = SUITES[args.suite](**_suite_kwargs(args.suite, cfg))
    doc = result.to_json()
    lines = [f"{'PASS' if result.passed else 'FAIL'} {result.name}",
             "stats: " + json.dumps(result.stats, sort_keys=True)]
    lines += ["witness: " + json.dumps(w, sort_keys=True) for w in result.witnesses]
    _emit(cfg, "lemma-check", doc, lines)
    return 0 if result.passed else 1


def _parse_spectrum(text: str) -> dict[int, int]:
    spec = {}
    for part in text.split(","):
        if not part.strip():
            continue
        try:
            p, c = part.split(":")
            spec[int(p)] = spec.get(int(p), 0) + int(c)
        except ValueError:
            raise UsageError(f"bad spectrum entry {part!r}; expected period:count") from None
    return spec


def generate(kind: str, n: int, seed: int, arity: int = 1, spec=None, sizes=None,
             width: int = 2) -> FnTable:
    rng = random.Random(seed)
    if kind == "random":
        return FnTable(n, arity, tuple(rng.randrange(n) for _ in range(n**arity)))
    if kind == "permutation":
        vals = list(range(n))
        rng.shuffle(vals)
        return FnTable(n, 1, tuple(vals))
    if kind == "spectrum":
        return realize_spectrum(n, spec, sizes, width=width)
    raise UsageError(f"unknown kind {kind!r}")


def cmd_gen(args, cfg: RunConfig) -> int:
    spec = sizes = None
    if args.kind == "spectrum":
        if not args.spectrum:
            raise UsageError("--spectrum is required for kind=spectrum")
        spec = _parse_spectrum(args.spectrum)
        if args.sizes:
            sizes = [int(s) for s in args.sizes.split(",")]
    n = cfg.n
    if n is None:
        if spec is None:
            raise UsageError("--n is required")
        n = sum(sizes) if sizes else sum(p * c for p, c in spec.items())
    f = generate(args.kind, n, cfg.seed, args.arity, spec, sizes, args.width)
    text = format_table(f)
    if args.output:
        Path(args.output).write_text(text)
    if cfg.format == "json":
        _emit(cfg, "gen", {"kind": args.kind, "table": [f.m, list(f.values)],
                           "output": args.output}, [])
    elif not args.output:
        sys.stdout.write(text)
    return 0


# -- parser ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, help="universe size")
    p.add_argument("--k", type=int, help="smallness threshold (default n)")
    p.add_argument("--arity-cap", type=int, default=2)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir", help=f"closure cache directory (env {CACHE_ENV})")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="clonelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="decompose a unary function")
    p.add_argument("file")
    p.add_argument("--periods", default="1", help="richness periods, comma separated")
    p.add_argument("--min-count", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("conj", parents=[common], help="decide conjugacy of two functions")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--find", action="store_true", help="also print a conjugator")
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("closure", parents=[common], help="generate a clone up to the arity cap")
    p.add_argument("generators", nargs="*")
    p.add_argument("--cache", action="store_true", help="read/write the closure cache")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump", help="write every member to this file")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("lemma-check", parents=[common], help="run an invariant suite")
    p.add_argument("suite", help=", ".join(SUITES))
    p.set_defaults(func=cmd_lemma_check)

    p = sub.add_parser("gen", parents=[common], help="generate a function file")
    p.add_argument("kind", choices=("random", "spectrum", "permutation"))
    p.add_argument("--spectrum", help="period:count pairs, e.g. 1:2,2:1")
    p.add_argument("--sizes", help="snail sizes in increasing-period order, e.g. 1,1,4")
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except GuardError as exc:
        print(f"error: {exc} (limiting parameter: {exc.parameter})", file=sys.stderr)
    except (UsageError, CloneLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
