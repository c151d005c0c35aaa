#!/usr/bin/env python3
"""Differential sweep over random instances.

Compiles each instance in lazy, eager and agnostic mode, compares the counts
against the brute-force oracle, and prints aggregate search statistics.

    python3 scripts/sweep.py --instances 200 --seed 0
"""

import argparse
import time

import smtrace as st


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-atoms", type=int, default=8)
    ap.add_argument("--max-clauses", type=int, default=12)
    args = ap.parse_args()

    totals = {k: 0 for k in ("decisions", "theory_props", "conflicts", "learned", "cache_hits")}
    mismatches = []
    start = time.perf_counter()
    for i in range(args.instances):
        f = st.random_formula(args.seed + i, max_atoms=args.max_atoms, max_clauses=args.max_clauses)
        prop, amap = st.boolean_abstract(f)
        db = st.to_cnf(prop)
        agnostic, aware = st.brute_counts(f)

        g_lazy = st.compile(db, amap, st.CompileConfig(mode="lazy"))
        g_agn = st.compile(db, amap, st.CompileConfig(mode="agnostic"))
        g_eager = st.compile(st.eager_encode(db, amap), amap, st.CompileConfig(mode="eager"))

        got = (st.count(g_lazy), st.count(g_eager), st.count(g_agn))
        if got != (aware, aware, agnostic):
            mismatches.append((args.seed + i, got, (aware, aware, agnostic)))
        for k in totals:
            totals[k] += getattr(g_lazy.stats, k)
    elapsed = time.perf_counter() - start

    print(f"instances      {args.instances}")
    print(f"elapsed_s      {elapsed:.2f}")
    print(f"mismatches     {len(mismatches)}")
    for k, v in totals.items():
        print(f"{k:14} {v}")
    for seed, got, want in mismatches[:10]:
        print(f"MISMATCH seed={seed} got={got} want={want}")
    raise SystemExit(1 if mismatches else 0)


if __name__ == "__main__":
    main()
