"""Run the full pipeline end to end and print the comparison summary.

    python scripts/reproduce_pipeline.py --out runs/demo --rounds 625

Steps: scenarios from seeded ride rounds, teacher labels, MLP training,
then the three-agent comparison report.
"""
import argparse
import json
import sys
from pathlib import Path

from ridexplain.cli import main as cli


def run(argv):
    code = cli(argv)
    if code:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/demo")
    ap.add_argument("--passengers", type=int, default=8)
    ap.add_argument("--rounds", type=int, default=125)
    ap.add_argument("--noise", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    s, l, m, r = (str(out / n) for n in ("scenarios.csv", "labels.csv", "model.json", "report.csv"))
    run(["gen-scenarios", "--passengers", str(args.passengers), "--rounds", str(args.rounds),
         "--seed", str(args.seed), "--out", s])
    run(["synth-labels", "--scenarios", s, "--noise", str(args.noise), "--seed", str(args.seed),
         "--out", l])
    run(["train", "--data", l, "--seed", str(args.seed), "--report", str(out / "train.json"),
         "--out", m])
    run(["agents-compare", "--scenarios", s, "--model", m, "--seed", str(args.seed), "--out", r])
    summary = json.loads((out / "report.summary.json").read_text())
    print(json.dumps(summary["mean_count"], indent=2))


if __name__ == "__main__":
    main()
