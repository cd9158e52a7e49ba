"""Write SVG drawings of a few solitons in the disk and half-plane models.

    python3 scripts/export_figures.py --outdir figures
"""
import argparse
import pathlib

from hypercsf.cli import main as cli

CURVES = {
    "h_family": "1.4142135623730951,1,0",
    "c_family": "1,1,0",
    "s_family": "0,0.6,0.8",
    "constant_curvature": "0,-1,0",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--window", default="-10:10")
    args = ap.parse_args()

    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, psi0 in CURVES.items():
        for model in ("disk", "halfplane"):
            path = out / f"{name}_{model}.svg"
            code = cli(["reconstruct", "--psi0", psi0, "--window", args.window,
                        "--model", model, "--format", "svg", "--out", str(path)])
            print(f"{path}: {'ok' if code == 0 else f'exit {code}'}")


if __name__ == "__main__":
    main()
