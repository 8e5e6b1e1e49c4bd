#!/usr/bin/env python3
"""Dimensions of intertwiner spaces between P0 pairs, plus the size of their tops.

Useful for seeing why the certified searches stay small: the top quotient
of a P0 pair has dimension about 4n, far below the 13n of the pair.

    python scripts/intertwiner_dims.py --field 2 --max-n 3
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from pairlab.construction import build_P0
from pairlab.similarity import intertwiner_space, top_quotient
from pairlab.theorem import random_e1_base


@dataclass
class DimsConfig:
    p: int = 2
    max_n: int = 3
    samples: int = 3
    seed: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", type=int, default=2, dest="p")
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = DimsConfig(a.p, a.max_n, a.samples, a.seed)
    rng = np.random.default_rng(cfg.seed)
    print(f"{'n':>2} {'size':>5} {'dim End(P1)':>12} {'dim Hom(P1,P2)':>15} {'top dim':>8}")
    for n in range(1, cfg.max_n + 1):
        for _ in range(cfg.samples):
            P1 = build_P0(random_e1_base(n, cfg.p, rng)).pair
            P2 = build_P0(random_e1_base(n, cfg.p, rng)).pair
            end = intertwiner_space(P1, P1).dim
            hom = intertwiner_space(P2, P1).dim
            top = top_quotient(P1).dim
            print(f"{n:>2} {13 * n:>5} {end:>12} {hom:>15} {top:>8}")


if __name__ == "__main__":
    main()
