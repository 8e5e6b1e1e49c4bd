#!/usr/bin/env python3
"""Sweep random unipotent instances and tabulate which (alpha, beta) act as witnesses.

For each trial a positive instance (base2 a conjugate of base1) and an
independent instance are tested with one substitution per (alpha, beta).
Prints a table of hit counts; only pairs with beta^3 = alpha^2 should appear.

    python scripts/theorem_sweep.py --field 7 --n 2 --trials 5
"""

from __future__ import annotations

import argparse
import collections
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from pairlab.theorem import (
    TheoremInstance,
    random_e1_base,
    random_invertible,
    scalar_law_probe,
    verify_converse,
)


@dataclass
class SweepConfig:
    p: int = 7
    n: int = 2
    trials: int = 5
    seed: int = 0
    budget: int = 64


def run(cfg: SweepConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    hits = collections.Counter()
    rows = []
    for t in range(cfg.trials):
        b1 = random_e1_base(cfg.n, cfg.p, rng)
        for kind in ("conjugate", "independent"):
            if kind == "conjugate":
                b2 = b1.conjugate(random_invertible(cfg.n, cfg.p, rng))
            else:
                b2 = random_e1_base(cfg.n, cfg.p, rng)
            t0 = time.perf_counter()
            rep = verify_converse(TheoremInstance(b1, b2), cfg.budget, cfg.seed + t,
                                  probe=scalar_law_probe(cfg.p, rng))
            for w in rep.witnesses:
                hits[(int(w.coeffs.alpha), int(w.coeffs.beta))] += 1
            rows.append(dict(trial=t, kind=kind, base_similar=rep.base_similar,
                             poly_similar=rep.poly_similar, certified=rep.certified,
                             probe_hits=rep.probe_similar, seconds=round(time.perf_counter() - t0, 2)))
    return dict(config=asdict(cfg), rows=rows,
                hits={f"{a},{b}": c for (a, b), c in sorted(hits.items())})


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", type=int, default=7, dest="p")
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    out = run(SweepConfig(args.p, args.n, args.trials, args.seed))
    if args.json:
        print(json.dumps(out, indent=2))
        return
    for r in out["rows"]:
        print(f"trial {r['trial']:3d} {r['kind']:12s} base={r['base_similar']!s:5s} "
              f"poly={r['poly_similar']!s:5s} certified={r['certified']!s:5s} "
              f"hits={r['probe_hits']:2d}  {r['seconds']:.2f}s")
    print("witness (alpha, beta) counts:")
    p = args.p
    for key, c in out["hits"].items():
        a, b = map(int, key.split(","))
        print(f"  alpha={a} beta={b}  beta^3-alpha^2={(b ** 3 - a * a) % p}  count={c}")


if __name__ == "__main__":
    main()
