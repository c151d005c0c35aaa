#!/usr/bin/env python3
"""Effect of component decomposition on disjoint copies of one formula.

Builds k variable-renamed copies of a small mixed formula, conjoins them and
reports compiled graph sizes with components on versus off (cache disabled on
the off side so repeated subproblems are actually recompiled).

    python3 scripts/component_growth.py --copies 4
"""

import argparse

import smtrace as st

BASE = "(assert (and (or (<= {x} 0) (>= {x} 1)) (or {a} (<= {x} 0))))"


def family(k: int) -> str:
    decls = []
    asserts = []
    for i in range(k):
        decls.append(f"(declare-const x{i} Real)(declare-const A{i} Bool)")
        asserts.append(BASE.format(x=f"x{i}", a=f"A{i}"))
    return "\n".join(decls + asserts)


def sizes(text: str):
    f = st.parse_smt2(text)
    prop, amap = st.boolean_abstract(f)
    db = st.to_cnf(prop)
    on = st.compile(db, amap, st.CompileConfig(mode="lazy"))
    off = st.compile(db, amap, st.CompileConfig(mode="lazy", components=False, cache=False))
    assert st.count(on) == st.count(off)
    return len(on), len(off), st.count(on)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--copies", type=int, default=4)
    args = ap.parse_args()

    print(f"{'copies':>6} {'nodes(on)':>10} {'nodes(off)':>11} {'count':>8}")
    for k in range(1, args.copies + 1):
        on, off, count = sizes(family(k))
        print(f"{k:>6} {on:>10} {off:>11} {count:>8}")


if __name__ == "__main__":
    main()
