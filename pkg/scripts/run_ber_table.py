#!/usr/bin/env python3
"""Tabulate theoretical vs Monte Carlo bit error rates.

For each quality factor q = (mu1 - mu0) / (2 sigma), the closed-form
prediction Q(q) is compared with a Monte Carlo estimate over simulated
threshold decisions; the 3-sigma binomial halfwidth bounds the match.
"""

import argparse

from brightlink import BerModel, monte_carlo_ber, q_function, theoretical_ber


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--q", default="0.5,1,1.5,2,2.5,3",
                        help="comma-separated quality factors")
    parser.add_argument("--symbols", type=int, default=100_000,
                        help="Monte Carlo symbols per point")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    args = parser.parse_args()

    print(f"{'q':>5} {'Q(q)':>12} {'pe_theory':>12} {'pe_mc':>12} "
          f"{'ci':>10} {'ok':>3}")
    all_ok = True
    for tok in args.q.split(","):
        q = float(tok)
        model = BerModel.from_levels(0.0, 1.0, 1.0 / (2.0 * q))
        pe_theory = theoretical_ber(model)
        pe_mc, halfwidth = monte_carlo_ber(model, args.symbols, seed=args.seed)
        ok = abs(pe_mc - pe_theory) <= halfwidth
        all_ok &= ok
        print(f"{q:>5g} {q_function(q):>12.6g} {pe_theory:>12.6g} "
              f"{pe_mc:>12.6g} {halfwidth:>10.3g} {'y' if ok else 'N':>3}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
