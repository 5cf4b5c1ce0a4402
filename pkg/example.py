#!/usr/bin/env python3
"""
Example usage of the khtorsion package.

Computes Kh_t of a few small knots, then builds the maps of two bundled
movies and checks the round-trip relation on them.
"""

import sys
import os
sys.path.insert(0, os.path.dirname(__file__))

from khtorsion import (
    KhtError,
    build_complex,
    corollary_bounds,
    homology,
    load_movie,
    parse_pd,
    specialize_dimension,
    verify_theorem1,
)

KNOTS = {
    "unknot": "O(1)",
    "trefoil": "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)",
    "figure-eight": "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)",
}
CORPUS = os.path.join(os.path.dirname(__file__), "khtorsion", "corpus")


def show_knots(p: int):
    print("Kh_t over F_%d[x]:" % p)
    print("-" * 40)
    for name, pd in KNOTS.items():
        c = build_complex(parse_pd(pd), p)
        h = homology(c)
        dims = specialize_dimension(c, 0)
        print(f"{name:14} free={h.free_rank_total} torsion={list(h.torsion_exponents_total)} "
              f"xo={h.xo} dim Kh={sum(dims.values())}")
    print("-" * 40)


def show_movies(p: int):
    for name in ("ribbon", "trefoil_band_death"):
        mov = load_movie(os.path.join(CORPUS, f"{name}.json"))
        report = verify_theorem1(mov, p)
        bounds = corollary_bounds(mov.frames[0], mov, p)
        verdict = "PASS" if report.passed else "FAIL"
        print(f"{name:20} (m,b,M)={mov.statistics} theorem1 {verdict} scalar={report.unit_scalar} "
              f"xo={bounds.details['xo']}")


def main():
    p = int(sys.argv[1]) if len(sys.argv) > 1 else 10007
    try:
        show_knots(p)
        show_movies(p)
    except KhtError as e:
        print(f"Error: {e}")
        return e.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
