"""Activation counts over the (dynamics noise, goal noise) grid on the 100-chain."""

import argparse
import time
from pathlib import Path

import numpy as np

from goalseq import ChainSpec, ExperimentConfig, benchmark_library
from goalseq.experiments import noiseless_optimum, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--episodes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--corruption", choices=("local", "global"), default="local")
    ap.add_argument("--beta-semantics", choices=("terminate", "continue"), default="terminate")
    ap.add_argument("--out", default="results/noise_sweep.csv")
    args = ap.parse_args()

    cfg = ExperimentConfig.from_dict({
        "seed": args.seed, "corruption": args.corruption, "beta_semantics": args.beta_semantics,
        "sweep": {"episodes": args.episodes},
    })
    t0 = time.perf_counter()
    res = run_sweep(cfg, progress=lambda c: print(
        f"p_dyn {c.p_dyn:.1f}  p_goal {c.p_goal:.1f}  mean {c.mean_activations:6.2f}", flush=True))
    levels = cfg.sweep.p_dyn
    grid = np.array([[res.cell(d, g).mean_activations for g in cfg.sweep.p_goal] for d in levels])
    spec = ChainSpec(cfg.sweep.n_states)
    ref = noiseless_optimum(spec, benchmark_library(spec, beta_semantics=cfg.beta_semantics))
    print(f"\nnoiseless optimum {ref:.2f}; rows p_dyn {levels}, columns p_goal {cfg.sweep.p_goal}")
    print(np.array2string(grid, precision=2))
    print(f"{time.perf_counter() - t0:.1f}s")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(res.to_csv())


if __name__ == "__main__":
    main()
