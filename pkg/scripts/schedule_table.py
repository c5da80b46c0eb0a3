"""Tabulate the peeling schedule: T, final eps_t, regime exits, step counts."""

import argparse
import warnings

from hyperpack.hypergraph import derive_params
from hyperpack.peeling import compute_schedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", default="3,1 4,1 5,2 7,3", help="space separated k,ell pairs")
    ap.add_argument("--n", type=int, nargs="+", default=[24, 1200, 12000])
    ap.add_argument("--p", type=float, default=0.8)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.2, 0.1])
    a = ap.parse_args()
    warnings.simplefilter("ignore")
    print(f"{'k':>2} {'l':>2} {'z':>2} {'n':>6} {'eps':>5} {'T':>9} {'x_0':>10} {'eps_T':>10} {'p_T':>8} exit")
    for pair in a.pairs.split():
        k, ell = map(int, pair.split(","))
        for n in a.n:
            P = derive_params(k, ell, n, check_divisibility=False)
            for eps in a.eps:
                S = compute_schedule(P, n, a.p, eps)
                flag = "x>=1" if S.regime_exit else ("trunc" if S.truncated else "")
                print(f"{k:>2} {ell:>2} {P.z:>2} {n:>6} {eps:5.2f} {S.T:>9} {S.x_t[0]:10.3e} "
                      f"{S.eps_t[S.T]:10.3e} {S.p_t[S.T]:8.4f} {flag}")


if __name__ == "__main__":
    main()
