#!/usr/bin/env python3
"""Compare the scanned singularity verdict with the published condition over an m range.

Prints one CSV row per m: m, scanned verdict, pole witness, published verdict,
and whether the two disagree.
"""

import argparse
import csv
import sys

import numpy as np

from sipw import catalog
from sipw.catalog import FamilyId, FamilyParams


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family", help="family name, e.g. scarf-trigonometric")
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--d", type=float, default=0.5)
    ap.add_argument("--m-min", type=float, default=-5.0)
    ap.add_argument("--m-max", type=float, default=5.0)
    ap.add_argument("--steps", type=int, default=101)
    args = ap.parse_args(argv)

    family = FamilyId.parse(args.family)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["m", "verdict", "witness_x", "published_free", "disagree"])
    for m in np.linspace(args.m_min, args.m_max, args.steps):
        p = FamilyParams(b=args.b, c=args.c, d=args.d, m=float(m))
        verdict = catalog.singularity_verdict(family, p)
        published = catalog.published_free_condition(family, p)
        witness = "" if verdict else repr(verdict.witness)
        disagree = published is not None and published != bool(verdict)
        out.writerow([repr(float(m)), "free" if verdict else "singular", witness,
                      "" if published is None else published, disagree])
    for t in catalog.published_thresholds(family, FamilyParams(b=args.b, c=args.c, d=args.d)):
        print(f"# threshold m = {t.value:.6g}, free {t.free_side}", file=sys.stderr)


if __name__ == "__main__":
    main()
