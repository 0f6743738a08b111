"""Command-line entry point: ``locclab <command> ...``.

Exit codes: 0 Distinguishable, 3 Indistinguishable, 4 Undetermined,
2 input error, 1 regression mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import regress
from .decider import (
    DecideConfig,
    NotGloballyOrthogonal,
    Status,
    bound_check,
    decide_one_way,
    find_indistinguishable_subset,
    min_product_bound,
)
from .numerics import DEFAULT_RESTARTS, TOL
from .render import render_grid
from .states import (
    NAMED_SETS,
    StateSet,
    globally_distinguishable,
    make_named,
    make_tiling,
    random_orthogonal_products,
    state_set_from_json,
    state_set_to_json,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_BY_STATUS = {
    Status.DISTINGUISHABLE: 0,
    Status.INDISTINGUISHABLE: 3,
    Status.UNDETERMINED: 4,
}
DEFAULT_SEED = 42
DEFAULT_MAX_SUBSET = 6


class InputError(Exception):
    """Bad parameters or unreadable input; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    side: str = "both"
    tol: float = TOL
    seed: int = DEFAULT_SEED
    restarts: int = DEFAULT_RESTARTS
    max_subset: int = DEFAULT_MAX_SUBSET
    out: str | None = None

    def decide_config(self) -> DecideConfig:
        return DecideConfig(tol=self.tol, seed=self.seed, restarts=self.restarts)

    def to_json(self) -> dict:
        return asdict(self)


def resolve_seed(flag: int | None) -> int:
    """An explicit ``--seed`` wins, then ``LOCCLAB_SEED``, then the default."""
    if flag is not None:
        return flag
    env = os.environ.get("LOCCLAB_SEED")
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"LOCCLAB_SEED must be an integer, got {env!r}") from exc


def run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        side=getattr(args, "side", "both"),
        tol=args.tol,
        seed=resolve_seed(args.seed),
        restarts=args.restarts,
        max_subset=args.max_subset,
        out=args.out,
    )


def load_state_set(path: str) -> StateSet:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    try:
        return state_set_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid state set: {exc}") from exc


def dump_json(data, path: Path) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def certificate_path(cfg: RunConfig, suffix: str) -> Path:
    if cfg.out:
        return Path(cfg.out)
    src = Path(cfg.input)
    return src.with_name(f"{src.stem}.{suffix}.json")


def certificate(cfg: RunConfig, body: dict) -> dict:
    return {"tool": "locclab", "version": __version__, "config": cfg.to_json(), **body}


# --- commands ------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    if args.kind == "tiling":
        if not 1 <= args.la <= args.lb:
            raise InputError(f"tiling needs 1 <= la <= lb, got la={args.la}, lb={args.lb}")
        states, default = make_tiling(args.la, args.lb), f"tiling_{args.la}_{args.lb}.json"
    elif args.kind == "named":
        if args.name not in NAMED_SETS:
            raise InputError(f"unknown named set {args.name!r}; choose from {', '.join(NAMED_SETS)}")
        states, default = make_named(args.name), f"{args.name}.json"
    else:
        if args.n < 1 or args.da < 1 or args.db < 1:
            raise InputError("random sets need n, da, db >= 1")
        rng = np.random.default_rng(seed)
        try:
            states = random_orthogonal_products(args.n, args.da, args.db, rng)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        default = f"random_{args.n}_{args.da}x{args.db}_s{seed}.json"
    out = Path(args.out or default)
    dump_json(state_set_to_json(states), out)
    check = globally_distinguishable(states)
    print(f"wrote {out}: {len(states)} states in C^{states.d_a} x C^{states.d_b}, "
          f"max pairwise overlap {check.max_overlap:.3e}")
    return EXIT_OK


def _summary(verdict) -> str:
    lines = [f"verdict: {verdict.status.value} ({verdict.side_policy.value}, stage {verdict.stage})"]
    if verdict.scope is not None:
        lines.append(f"scope: {verdict.scope.value}")
    if verdict.reason:
        lines.append(f"reason: {verdict.reason}")
    for side, v in verdict.per_side.items():
        scope = f", scope {v.scope.value}" if v.scope is not None else ""
        lines.append(f"  {side} first: {v.status.value} via {v.stage}{scope}")
    if verdict.protocol is not None:
        p = verdict.protocol
        lines.append(f"protocol: {p.first.value} measures first in a {p.first_basis.dim}-outcome basis")
    for w in verdict.warnings:
        lines.append(f"note: {w}")
    return "\n".join(lines)


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    states = load_state_set(cfg.input)
    try:
        verdict = decide_one_way(states, cfg.side, cfg.decide_config())
    except NotGloballyOrthogonal as exc:
        raise InputError(f"{cfg.input}: {exc}") from exc
    path = certificate_path(cfg, "cert")
    dump_json(certificate(cfg, {"verdict": verdict.to_json()}), path)
    print(_summary(verdict))
    print(f"certificate: {path}")
    return EXIT_BY_STATUS[verdict.status]


def cmd_render(args: argparse.Namespace) -> int:
    states = load_state_set(args.input)
    drawing, warnings = render_grid(states, args.tol)
    print(drawing)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_regress(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    rows = regress.run_regression(cfg.decide_config())
    for row in rows:
        print(row.format())
    failed = sum(not r.ok for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} rows pass")
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    if args.input:
        rep = bound_check(load_state_set(args.input), args.tol)
        status = "violated" if rep.violated else "satisfied"
        print(f"N={rep.n} in C^{rep.d_a} x C^{rep.d_b}: {rep.product_count} product members, "
              f"at least {rep.required} needed: {status}")
        return EXIT_BY_STATUS[Status.INDISTINGUISHABLE] if rep.violated else EXIT_OK
    if None in (args.da, args.db, args.n):
        raise InputError("bound needs an input file or all of --da, --db, --n")
    if min(args.da, args.db, args.n) < 1:
        raise InputError("--da, --db, --n must be positive")
    print(min_product_bound(args.da, args.db, args.n))
    return EXIT_OK


def cmd_subset(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    states = load_state_set(cfg.input)
    try:
        result = find_indistinguishable_subset(states, cfg.side, cfg.max_subset, cfg.decide_config())
    except NotGloballyOrthogonal as exc:
        raise InputError(f"{cfg.input}: {exc}") from exc
    path = certificate_path(cfg, "subset")
    dump_json(certificate(cfg, {"subset": result.to_json()}), path)
    if result.indices is None:
        print(f"no certified subset: {result.reason}")
        code = EXIT_BY_STATUS[Status.UNDETERMINED]
    else:
        labels = ", ".join(states.labels[i] for i in result.indices)
        print(f"indistinguishable subset of size {len(result.indices)}: {labels}")
        code = EXIT_BY_STATUS[Status.INDISTINGUISHABLE]
    print(f"certificate: {path}")
    return code


# --- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=TOL)
    common.add_argument("--seed", type=int, default=None, help="default 42, or $LOCCLAB_SEED")
    common.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    common.add_argument("--max-subset", type=int, default=DEFAULT_MAX_SUBSET)
    common.add_argument("--out", default=None)
    sided = argparse.ArgumentParser(add_help=False)
    sided.add_argument("--side", choices=("alice", "bob", "both"), default="both")

    parser = argparse.ArgumentParser(prog="locclab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"locclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="write a state-set JSON file")
    kinds = gen.add_subparsers(dest="kind", required=True)
    til = kinds.add_parser("tiling", parents=[common])
    til.add_argument("--la", type=int, required=True)
    til.add_argument("--lb", type=int, required=True)
    named = kinds.add_parser("named", parents=[common])
    named.add_argument("name")
    rnd = kinds.add_parser("random", parents=[common])
    rnd.add_argument("--n", type=int, default=3)
    rnd.add_argument("--da", type=int, default=3)
    rnd.add_argument("--db", type=int, default=3)
    gen.set_defaults(func=cmd_generate)

    ana = sub.add_parser("analyze", parents=[common, sided], help="decide one-way distinguishability")
    ana.add_argument("input")
    ana.set_defaults(func=cmd_analyze)

    ren = sub.add_parser("render", parents=[common], help="draw tiles as an ASCII grid")
    ren.add_argument("input")
    ren.set_defaults(func=cmd_render)

    reg = sub.add_parser("regress", parents=[common], help="claim-vs-computed table")
    reg.set_defaults(func=cmd_regress)

    bnd = sub.add_parser("bound", parents=[common], help="product-count bound")
    bnd.add_argument("input", nargs="?")
    bnd.add_argument("--da", type=int)
    bnd.add_argument("--db", type=int)
    bnd.add_argument("--n", type=int)
    bnd.set_defaults(func=cmd_bound)

    sst = sub.add_parser("subset", parents=[common, sided], help="smallest certified subset")
    sst.add_argument("input")
    sst.set_defaults(func=cmd_subset)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
