"""Run the temperature pipeline on the platinum-like scenario and compare with the source curves.

    python3 scripts/platinum_pipeline.py --config configs/platinum_pipeline.ini --outdir out/pt
"""

import argparse
import csv

from threeomega import load_config, run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/platinum_pipeline.ini")
    ap.add_argument("--outdir", default="out/platinum_pipeline")
    args = ap.parse_args()

    result = run_pipeline(load_config(args.config), args.outdir)
    results = next(p for p in result.files if p.name.endswith("results.csv"))
    print("T0_K   kappa_fit/src-1   cp_fit/src-1   status")
    with open(results, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["status"] != "ok":
                print(f"{float(row['T0_K']):5.0f}   {row['status']}: {row['message']}")
                continue
            dk = float(row["kappa_W_per_mK"]) / float(row["source_kappa_W_per_mK"]) - 1
            dc = float(row["cp_J_per_kgK"]) / float(row["source_cp_J_per_kgK"]) - 1
            print(f"{float(row['T0_K']):5.0f}   {dk:+14.3%}   {dc:+12.3%}   ok")
    print(f"outputs in {args.outdir}")


if __name__ == "__main__":
    main()
