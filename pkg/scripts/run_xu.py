"""Simulate the scalar recursion s_{n+1} = (1 - a_n) s_n + a_n b_n + g_n for a few families."""

import argparse

from catvisc.viscosity import ConstantSeq, Harmonic, xu_simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-N", type=int, default=100_000)
    args = ap.parse_args()

    cases = {
        "harmonic": (Harmonic(), Harmonic(), Harmonic(p=2.0)),
        "geometric": (ConstantSeq(0.5), ConstantSeq(0.0), ConstantSeq(0.0)),
        "slow": (Harmonic(p=0.5), Harmonic(p=0.5), Harmonic(p=1.5)),
    }
    for name, (a, b, g) in cases.items():
        r = xu_simulate(1.0, a, b, g, args.N)
        blocks = " ".join(f"{m:.2e}" for _, m in r.envelope[-6:])
        print(f"{name:<10} s_N = {r.s_final:.6e}  clamped={r.clamped}  last block maxima: {blocks}")


if __name__ == "__main__":
    main()
