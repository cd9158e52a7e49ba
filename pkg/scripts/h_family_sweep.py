"""Sweep the H family over a (tau0, eta0) grid and tabulate the qualitative reports.

    python3 scripts/h_family_sweep.py --grid 11 --a 1 --out h_sweep.json
"""
import argparse
import collections
import json

from hypercsf.cli import RunConfig, run_sweep, write_json
from hypercsf.soliton_ode import FamilyKind


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=11)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--family", default="H", choices=["H", "C", "S"])
    ap.add_argument("--out")
    args = ap.parse_args()

    family = FamilyKind(args.family)
    cfg = RunConfig(a=args.a, family=family, grid=(args.grid, args.grid))
    reports = run_sweep(cfg, family)
    ok = [r for r in reports if r["status"] == "ok"]
    classes = collections.Counter((r["k_limit_class_neg"], r["k_limit_class_pos"]) for r in ok)
    counts = collections.Counter(r["tau_critical_count"] for r in ok)
    print(f"{len(ok)}/{len(reports)} cells integrated")
    print(f"embedded: {sum(bool(r['embedded']) for r in ok)}  eta monotone: {sum(r['eta_monotone'] for r in ok)}")
    print("k-limit classes (s -> -inf, s -> +inf):")
    for key, n in sorted(classes.items(), key=str):
        print(f"  {key}: {n}")
    print("tau critical counts:", dict(sorted(counts.items())))
    print(f"max invariant drift: {max(r['invariant_drift'] for r in ok):.2e}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(write_json(reports))


if __name__ == "__main__":
    main()
