"""Full-task successes of the composed library against each controller alone."""

import argparse

from goalseq import ExperimentConfig
from goalseq.experiments import gridworld_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--episodes", type=int, default=100)
    ap.add_argument("--p-dyn", type=float, default=0.0)
    ap.add_argument("--p-goal", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = ExperimentConfig(env={"kind": "gridworld"}, p_dyn=args.p_dyn, p_goal=args.p_goal, seed=args.seed)
    rows, _ = gridworld_table(cfg, args.episodes)
    print(f"{'library':<14}{'full task':>12}{'activations':>14}")
    for r in rows:
        print(f"{r.name:<14}{f'{r.successes}/{r.episodes}':>12}{r.mean_activations:>14.2f}")


if __name__ == "__main__":
    main()
