#!/usr/bin/env python3
"""Generate the Daubechies-45 lowpass filter shipped in src/aepipeline/data/.

High-order Daubechies filters are numerically delicate: the classic
construction factorizes |m0|^2 = cos^{2p}(w/2) * P(sin^2(w/2)) where P is a
degree p-1 polynomial with huge integer coefficients.  We do the whole
factorization in mpmath at 250 decimal digits and only round to float64 at
the very end, so the shipped coefficients are correct to full double
precision.

Usage:
    python tools/make_db45.py [--order 45] [--out src/aepipeline/data/db45_lowpass.txt]

The output file has one coefficient per line (repr precision), oldest tap
first, and a short comment header.  `aepipeline.denoise` validates the
orthonormality invariants every time it loads the file.
"""

import argparse
from mpmath import mp, mpf, binomial, polyroots, sqrt, fabs, im, re


def daubechies_lowpass(p: int):
    """Return the 2p extremal-phase Daubechies lowpass taps (sum = sqrt(2))."""
    # P(y) = sum_k C(p-1+k, k) y^k, the Daubechies polynomial.
    a = [binomial(p - 1 + k, k) for k in range(p)]
    # mpmath wants descending powers.
    yroots = polyroots(a[::-1], maxsteps=200, extraprec=200)

    # Each root y maps to a reciprocal pair in z via z^2 - (2 - 4y) z + 1 = 0;
    # keeping |z| < 1 selects the extremal-phase factor.
    zroots = []
    for y in yroots:
        b = 2 - 4 * y
        disc = sqrt(b * b - 4)
        z1 = (b + disc) / 2
        z2 = (b - disc) / 2
        zroots.append(z1 if fabs(z1) < 1 else z2)

    # Q(z) = prod (z - r) / prod (1 - r)  so that Q(1) = 1.
    q = [mpf(1)]
    for r in zroots:
        nxt = [mpf(0)] * (len(q) + 1)
        for i, c in enumerate(q):
            nxt[i + 1] += c          # z * q
            nxt[i] += -r * c         # -r * q
        q = nxt
    norm = sum(q)                    # Q(1) before scaling
    q = [c / norm for c in q]

    # ((1+z)/2)^p has coefficients C(p, k) / 2^p.
    spline = [binomial(p, k) / mpf(2) ** p for k in range(p + 1)]

    h = [mpf(0)] * (len(spline) + len(q) - 1)
    for i, s in enumerate(spline):
        for j, c in enumerate(q):
            h[i + j] += s * c
    h = [sqrt(mpf(2)) * c for c in h]

    worst_imag = max(float(fabs(im(c))) for c in h)
    if worst_imag > 1e-60:
        raise RuntimeError(f"residual imaginary part {worst_imag:g}; raise precision")
    return [re(c) for c in h]


def check(h) -> None:
    p = len(h) // 2
    s = sum(h) - sqrt(mpf(2))
    e = sum(c * c for c in h) - 1
    if fabs(s) > mpf(10) ** -40 or fabs(e) > mpf(10) ** -40:
        raise RuntimeError(f"normalization off: sum err {float(s):g}, energy err {float(e):g}")
    for k in range(1, p):
        dot = sum(h[n] * h[n + 2 * k] for n in range(len(h) - 2 * k))
        if fabs(dot) > mpf(10) ** -40:
            raise RuntimeError(f"double-shift orthogonality fails at k={k}: {float(dot):g}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=45)
    ap.add_argument("--out", default="src/aepipeline/data/db45_lowpass.txt")
    args = ap.parse_args()

    mp.dps = 250
    h = daubechies_lowpass(args.order)
    check(h)

    with open(args.out, "w") as f:
        f.write(f"# Daubechies-{args.order} orthonormal lowpass filter, {2 * args.order} taps.\n")
        f.write("# Generated by tools/make_db45.py (mpmath, 250 digits); sum = sqrt(2).\n")
        for c in h:
            f.write(repr(float(c)) + "\n")
    print(f"wrote {len(h)} taps to {args.out}")


if __name__ == "__main__":
    main()
