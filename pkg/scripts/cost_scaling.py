"""Mean push count as delta shrinks, on Barabasi-Albert graphs of several sizes.

Shows where cost stops tracking 1/delta: once eps falls below the typical
per-neighbor share, every push is deterministic and cost saturates near m*L.

    python scripts/cost_scaling.py --nodes 1000 100000
"""

import argparse

import networkx as nx
import numpy as np

from agp import RandomizedConfig, RepeatedRunner, WeightScheme, from_edges


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, nargs="+", default=[1000, 100000])
    p.add_argument("--deltas", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--runs", type=int, default=20)
    args = p.parse_args(argv)
    s = WeightScheme("hkpr", t=5.0)
    print("nodes,edges,delta,epsilon,L,mean_push_count,ratio_to_previous")
    for n in args.nodes:
        G = nx.barabasi_albert_graph(n, 3, seed=7)
        g = from_edges(np.array(G.edges(), dtype=np.int64), n=n)
        prev = None
        for delta in (float(d) for d in args.deltas.split(",")):
            cfg = RandomizedConfig(delta=delta)
            L, eps = cfg.resolve(s)
            runner = RepeatedRunner(g, s, 0, cfg)
            cost = np.mean([runner.run(k).push_count for k in range(args.runs)])
            ratio = "" if prev is None else f"{cost / prev:.2f}"
            print(f"{n},{g.m // 2},{delta:g},{eps:.3g},{L},{cost:.0f},{ratio}")
            prev = cost


if __name__ == "__main__":
    main()
