#!/usr/bin/env python3
"""Sweep viewing distance and check the inverse-square amplitude law.

For each distance the full encode/transmit/decode pipeline runs on a
noiseless channel; the recovered level separation delta_mu is fitted
against distance on log-log axes. The expected slope is -2.
"""

import argparse

from brightlink import (
    ChannelParams,
    ModulationParams,
    as_bits,
    distance_sweep,
    make_carrier,
    frames_needed,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--distances", default="1,2,3,4,5,6,7,8,9",
                        help="comma-separated distances in meters")
    parser.add_argument("--payload", default="1010101010101010",
                        help="payload as a bit string")
    parser.add_argument("--out", default=None,
                        help="optional CSV output path")
    args = parser.parse_args()

    distances = [float(tok) for tok in args.distances.split(",")]
    payload = as_bits(args.payload)
    modulation = ModulationParams()
    # 16-bit quantization keeps the tiny far-distance swings off the
    # 8-bit grid so the fitted slope reflects geometry, not rounding.
    channel = ChannelParams(noise_sigma=0.0, quantizer_bits=16)
    carrier = make_carrier("gradient", 64, 48,
                           frames_needed(payload.size, modulation))

    result = distance_sweep(distances, payload, carrier, modulation, channel)

    print(f"{'d_m':>6} {'delta_mu':>12} {'pe_theory':>11} {'pe_measured':>11}")
    for row in result.rows:
        if row.error is not None:
            print(f"{row.distance_m:>6g} failed: {row.error}")
            continue
        print(f"{row.distance_m:>6g} {row.delta_mu:>12.6g} "
              f"{row.pe_theory:>11.4g} {row.pe_measured:>11.4g}")
    print(f"log-log slope = {result.slope:.6g} (expected -2)")

    if args.out:
        lines = ["d_m,delta_mu,pe_theory,pe_measured,ci_halfwidth"]
        for row in result.rows:
            if row.error is None:
                lines.append(f"{row.distance_m:.12g},{row.delta_mu:.12g},"
                             f"{row.pe_theory:.12g},{row.pe_measured:.12g},"
                             f"{row.ci_halfwidth:.12g}")
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
