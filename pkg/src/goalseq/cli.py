"""Command-line entry points.

Every command reads one JSON config (``--config``; defaults apply when
omitted) and a handful of overrides. Outputs depend only on the config and
seed, so repeated runs are byte-identical. Config and input errors exit
with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from dataclasses import replace

from .config import ConfigError, ExperimentConfig
from .experiments import (
    build_library,
    build_scorer,
    gridworld_table,
    make_demos,
    noiseless_optimum,
    run_sweep,
    selector_config,
)
from .goalscore import Demonstration, fit_from_demos, monotonicity_report
from .gridworld import GridSpec, InvalidGridSpec
from .selector import execute_episode


class InputError(ValueError):
    pass


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if getattr(args, "max_planning_steps", None) is not None:
        over["max_planning_steps"] = args.max_planning_steps
    if getattr(args, "replan_every_step", False):
        over["replan_every_step"] = True
    if getattr(args, "beta_semantics", None):
        over["beta_semantics"] = args.beta_semantics
    if getattr(args, "scorer", None):
        over["scorer_path"] = args.scorer
    return replace(cfg, **over) if over else cfg


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _decode(obj):
    return tuple(obj) if isinstance(obj, list) else obj


def read_demos(path: str) -> list[Demonstration]:
    """Parse a demos JSONL file, naming the offending line on failure."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read demos: {exc}") from None
    demos = []
    for no, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            states = [_decode(s) for s in doc["states"]]
            demos.append(Demonstration(states, int(doc.get("id", len(demos))), doc.get("times")))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}:{no}: bad demonstration ({exc})") from None
    if not demos:
        raise InputError(f"{path}: no demonstrations")
    return demos


def _modal(terminals, encode):
    if not terminals:
        return "-"
    counts = Counter(terminals)
    best = max(counts.values())
    # lowest index among the most frequent, for a stable display
    top = min(t for t, n in counts.items() if n == best)
    return json.dumps(encode(top), separators=(",", ":"))


def format_trace_table(trace, world) -> str:
    enc = world.encode
    lines = [f"seed {trace.seed}",
             f"{'step':>4}  {'state':>8}  {'candidates (id: mean score -> modal terminal)':<60}  chosen  {'after':>8}"]
    for i, st in enumerate(trace.steps):
        cells = []
        for c in st.candidates:
            if c.applicable:
                cells.append(f"{c.controller_id}: {c.mean:.3f} -> {_modal(c.terminals, enc)}")
            else:
                cells.append(f"{c.controller_id}: n/a")
        lines.append(f"{i:>4}  {json.dumps(enc(st.state)):>8}  {' | '.join(cells):<60}  "
                     f"{st.chosen:>6}  {json.dumps(enc(st.post_state)):>8}")
    status = "success" if trace.success else f"failure ({trace.diagnostic})"
    lines.append(f"{status}: {trace.activations} activations, {trace.primitive_steps} primitive steps")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_plan(args) -> int:
    cfg = _load_config(args)
    world = cfg.world()
    lib = build_library(cfg, world)
    g = build_scorer(cfg, world)
    trace = execute_episode(world, lib, g, selector_config(cfg), cfg.seed)
    sys.stdout.write(format_trace_table(trace, world))
    out = args.out or cfg.out
    if out:
        header = {"environment": world.describe(), "controllers": lib.describe(),
                  "config": cfg.to_dict()}
        _emit(trace.to_json(world, header) + "\n", out)
    return 0 if trace.success else 1


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if args.episodes is not None:
        cfg = replace(cfg, sweep=replace(cfg.sweep, episodes=args.episodes))
        cfg.validate()
    result = run_sweep(cfg)
    out = args.out or cfg.out
    _emit(result.to_csv(), out)
    if out:
        from .chain import ChainSpec

        ref_world = ChainSpec(cfg.sweep.n_states)
        ref = noiseless_optimum(ref_world, build_library(cfg, ref_world, 0.0))
        print(f"noiseless optimum: {ref:.3f} activations")
        for c in result.cells:
            print(f"p_dyn={c.p_dyn:.2f} p_goal={c.p_goal:.2f}  mean={c.mean_activations:7.2f}  "
                  f"median={c.median_activations:6.1f}  success={c.success_rate:.3f}")
    return 0


def cmd_demo_gen(args) -> int:
    cfg = _load_config(args)
    world = cfg.world()
    demos = make_demos(cfg, world, args.count)
    lines = []
    for d in demos:
        doc = {"id": d.id, "states": [world.encode(s) for s in d.states]}
        if d.times is not None:
            doc["times"] = list(d.times)
        lines.append(json.dumps(doc))
    _emit("\n".join(lines) + "\n", args.out or cfg.out)
    return 0


def cmd_fit_gsm(args) -> int:
    demos = read_demos(args.demos)
    metric = "manhattan" if isinstance(demos[0].states[0], tuple) else "abs"
    try:
        g = fit_from_demos(demos, metric)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    encode = list if metric == "manhattan" else (lambda s: s)
    _emit(g.to_json(encode) + "\n", args.out)
    if not args.out:
        return 0
    ok = True
    for d in demos:
        start, end = g.score(d.states[0]).mean, g.score(d.states[-1]).mean
        _, drops = monotonicity_report(g, d)
        good = start == 0.0 and end == 1.0 and drops == 0
        ok &= good
        print(f"demo {d.id}: start {start:.3f}  end {end:.3f}  decreases {drops}  "
              f"{'ok' if good else 'CHECK'}")
    print(f"{len(g.table)} states fitted from {len(demos)} demonstrations")
    return 0 if ok else 1


def cmd_gridworld(args) -> int:
    cfg = _load_config(args)
    if not isinstance(cfg.world(), GridSpec):
        raise ConfigError("the gridworld command needs a gridworld environment section")
    n = args.episodes if args.episodes is not None else max(cfg.episodes, 100)
    rows, trace = gridworld_table(cfg, n)
    print(f"{'library':<14}{'successes':>12}{'mean activations':>18}")
    for r in rows:
        print(f"{r.name:<14}{f'{r.successes}/{r.episodes}':>12}{r.mean_activations:>18.2f}")
    out = args.out or cfg.out
    if out:
        world = cfg.world()
        doc = {
            "table": [r.__dict__ for r in rows],
            "composed_trace": trace.to_dict(world, {"environment": world.describe()}),
        }
        _emit(json.dumps(doc, indent=1) + "\n", out)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="goalseq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, episodes=False, planning=True):
        sp.add_argument("--config", help="experiment config JSON")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path (stdout when omitted)")
        if episodes:
            sp.add_argument("--episodes", type=int)
        if planning:
            sp.add_argument("--max-planning-steps", type=int)
            sp.add_argument("--replan-every-step", action="store_true")
            sp.add_argument("--beta-semantics", choices=("terminate", "continue"))
            sp.add_argument("--scorer", help="fitted scorer JSON (fits from demos when omitted)")

    sp = sub.add_parser("plan", help="run one episode and print the per-step selection table")
    common(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("sweep", help="noise sweep on the long chain, CSV output")
    common(sp, episodes=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("demo-gen", help="write demonstrations as JSON lines")
    common(sp, planning=False)
    sp.add_argument("--count", type=int)
    sp.set_defaults(func=cmd_demo_gen)

    sp = sub.add_parser("fit-gsm", help="fit a goal scorer from a demos file")
    sp.add_argument("--demos", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit_gsm)

    sp = sub.add_parser("gridworld", help="composition table on the gridworld")
    common(sp, episodes=True)
    sp.set_defaults(func=cmd_gridworld)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidGridSpec, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
