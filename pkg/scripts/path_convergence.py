#!/usr/bin/env python3
"""Convergence-rate study for the basic q -> 1 limit laws.

Tabulates the error of (q-1) qlog(Q) against log Q, of the scaled infinite
Pochhammer against exp, and of q^mu-characters against powers, along
q = q0^t with t halving.  All three decay linearly in t, which is what the
two-point Richardson extrapolation used across the package assumes.
"""

import argparse
import math

from qonf.qspecial import q_character, q_log, qpoch_infinite


def rate_table(name, f, target, q0, jmax):
    print(f"\n{name} (target {target:.8g}):")
    prev = None
    for j in range(4, jmax + 1):
        t = 2.0**-j
        err = abs(f(q0**t) - target)
        ratio = f"   ratio {err / prev:.3f}" if prev else ""
        print(f"  t = 2^-{j:<2d}  error {err:.3e}{ratio}")
        prev = err


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q0", type=float, default=0.8)
    ap.add_argument("--jmax", type=int, default=12)
    args = ap.parse_args()

    q0, jmax = args.q0, args.jmax
    rate_table("(q-1) qlog(2)", lambda q: (q - 1) * q_log(q, 2.0), math.log(2), q0, jmax)
    rate_table(
        "1/((1-q) 0.3; q)_inf",
        lambda q: 1 / qpoch_infinite((1 - q) * 0.3, q, 1e-13),
        math.exp(0.3),
        q0,
        jmax,
    )
    for mu in (0.5, 2 + 1j):
        rate_table(
            f"e_(q, q^{mu})(3)",
            lambda q, mu=mu: q_character(q**mu, q, 3.0),
            3.0**mu,
            q0,
            jmax,
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
