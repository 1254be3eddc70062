"""Show disclosure unravelling on a price prior.

Each line is the receiver's answer to silence once every sender strictly
above the previous answer has started revealing. The sequence ends at the
lowest price, where the equilibrium sits.
"""
import argparse

from ridexplain.game import (DiscreteDistribution, compute_pbe, expected_utilities,
                             simulate_threshold, unravel)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--values", type=float, nargs="+", default=[2.5, 5.0, 7.5, 10.0, 12.5, 15.0])
    ap.add_argument("--probs", type=float, nargs="+")
    args = ap.parse_args()
    probs = args.probs or [1.0] * len(args.values)
    prior = DiscreteDistribution.from_pairs(args.values, probs, normalize=True)

    for step, answer in enumerate(unravel(prior)):
        print(f"step {step}: quiet answer {answer:.4f}")

    print("\nthreshold  quiet-answer  sender  receiver")
    for c in (prior.max, *reversed(prior.support[:-1])):
        _, recv, (u1, u2) = simulate_threshold(prior, c)
        print(f"{c:9.3f}  {recv.on_quiet:12.4f}  {u1:6.3f}  {u2:8.4f}")
    res = compute_pbe(prior)
    print("\nequilibrium payoffs:", expected_utilities(prior, res.sender, res.receiver))


if __name__ == "__main__":
    main()
