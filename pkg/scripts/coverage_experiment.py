"""Coverage |I_e| on complete 3-graphs: empirical mean vs exact and leading-order r*p1."""

import argparse
import math

import numpy as np

from hyperpack.hypergraph import complete_kgraph, derive_params
from hyperpack.labeling import (
    ProcedureParams,
    complete_graph_coverage_probability,
    edge_coverage_probability,
    run_procedure1,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 12, 16, 24])
    ap.add_argument("--r", type=int, default=20)
    ap.add_argument("--seeds", type=int, default=50)
    a = ap.parse_args()
    print(f"{'n':>4} {'mean':>8} {'se':>7} {'exact':>8} {'leading':>8} {'z_exact':>8} {'z_lead':>8}")
    for n in a.sizes:
        P = derive_params(3, 1, n)
        H = complete_kgraph(n, 3)
        pooled = []
        for seed in range(a.seeds):
            out = run_procedure1(H, P, ProcedureParams(1, a.r, "override", "override"), seed=seed)
            pooled += [len(ix) for ix in out.state.coverage.values()]
        x = np.asarray(pooled, float)
        mean, se = x.mean(), x.std(ddof=1) / math.sqrt(len(x))
        exact = a.r * complete_graph_coverage_probability(P)
        lead = a.r * edge_coverage_probability(P, n, 1.0)[1]
        print(f"{n:>4} {mean:8.4f} {se:7.4f} {exact:8.4f} {lead:8.4f} "
              f"{(mean - exact) / se:8.2f} {(mean - lead) / se:8.2f}")


if __name__ == "__main__":
    main()
