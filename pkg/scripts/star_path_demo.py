"""Two-hop transition probability on the star-path graph.

s connects to n spokes u_i and every spoke connects to v, so the exact
two-hop walk from s ends at s or v with probability 1/2 each.  Any rule that
discards residues below a fixed threshold loses all mass headed for v once n
is large; sampling keeps the estimate unbiased.

    python scripts/star_path_demo.py --spokes 10000 100000 --runs 1000
"""

import argparse

import numpy as np

from agp import RandomizedConfig, RepeatedRunner, WeightScheme, basic_propagate, from_edges


def star_path(spokes):
    u = np.arange(2, spokes + 2)
    return from_edges(np.concatenate([np.stack([np.zeros_like(u), u], 1),
                                      np.stack([u, np.ones_like(u)], 1)]))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--spokes", type=int, nargs="+", default=[1000, 10000, 100000])
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--runs", type=int, default=1000)
    args = p.parse_args(argv)
    s = WeightScheme("transition", hops=2)
    print("spokes,exact_v,mean_v,frac_within_0.15,mean_push_count,push_count_over_n")
    for n in args.spokes:
        g = star_path(n)
        exact = basic_propagate(g, s, 0, 2).pi[1]
        runner = RepeatedRunner(g, s, 0, RandomizedConfig(delta=args.delta))
        res = [runner.run(k) for k in range(args.runs)]
        v = np.array([r.pi[1] for r in res])
        c = np.array([r.push_count for r in res])
        print(f"{n},{exact:.6f},{v.mean():.6f},{np.mean(np.abs(v - 0.5) <= 0.15):.3f},"
              f"{c.mean():.1f},{c.mean() / n:.4f}")


if __name__ == "__main__":
    main()
