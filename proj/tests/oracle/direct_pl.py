#!/usr/bin/env python3
"""Direct double-loop transcription of the profile-likelihood objective and
the residual error-density estimator, used to freeze expected values for
tests/unit/test_oracle_equivalence.cpp. Pure Python + mpmath, no shared code
with the C++ library."""
import mpmath as mp

mp.mp.dps = 40


def quartic(v):
    v = mp.mpf(v)
    return mp.mpf(15) / 16 * (1 - v * v) ** 2 if abs(v) <= 1 else mp.mpf(0)


def manly(theta, y):
    theta, y = mp.mpf(theta), mp.mpf(y)
    return y if theta == 0 else (mp.e ** (theta * y) - 1) / theta


def manly_dy(theta, y):
    return mp.e ** (mp.mpf(theta) * mp.mpf(y))


def residuals(xs, ys, theta, h):
    out = []
    for xi, yi in zip(xs, ys):
        num = den = mp.mpf(0)
        for xj, yj in zip(xs, ys):
            w = quartic((mp.mpf(xj) - mp.mpf(xi)) / h)
            num += manly(theta, yj) * w
            den += w
        out.append(manly(theta, yi) - num / den)
    return out


def used(xs, lo, hi):
    return [lo <= x <= hi for x in xs]


def objective(xs, ys, theta, h, g, lo, hi):
    eps = residuals(xs, ys, theta, h)
    mask = used(xs, lo, hi)
    ue = [e for e, u in zip(eps, mask) if u]
    total = mp.mpf(0)
    for e, y, u in zip(eps, ys, mask):
        if not u:
            continue
        dens = sum(quartic((ej - e) / g) for ej in ue) / (len(ue) * g)
        if dens <= mp.mpf("1e-12"):
            return -mp.inf
        total += mp.log(dens) + mp.log(manly_dy(theta, y))
    return total


def density(xs, ys, theta, h, b, lo, hi, t):
    eps = residuals(xs, ys, theta, h)
    mask = used(xs, lo, hi)
    ue = [e for e, u in zip(eps, mask) if u]
    return sum(quartic((e - t) / b) for e in ue) / (len(ue) * b)


TOYS = [
    # xs, ys, theta, h, g, b, trim_lo, trim_hi, t
    ([0.0, 0.3, 0.5, 0.8, 1.0], [1.0, 1.4, 1.1, 1.9, 2.2], 0.0, 0.6, 0.8, 0.7, 0.0, 1.0, 0.1),
    ([-0.4, -0.1, 0.0, 0.2, 0.45, 0.5], [2.0, 2.5, 2.2, 3.1, 2.9, 3.3], 0.5, 0.5, 1.2, 1.0, -0.3, 0.45, -0.2),
    ([0.1, 0.2, 0.35, 0.4, 0.6, 0.7, 0.9], [0.5, 0.9, 0.7, 1.3, 1.0, 1.6, 1.2], 1.0, 0.4, 0.9, 0.6, 0.15, 0.8, 0.0),
    ([-1.0, -0.6, -0.3, 0.0, 0.2, 0.5, 0.7, 1.0], [3.0, 2.6, 2.9, 2.1, 2.4, 2.8, 3.5, 3.9], -0.5, 0.7, 1.5, 1.1, -0.7, 0.8, 0.3),
    ([0.05, 0.12, 0.2, 0.33, 0.41, 0.5, 0.58, 0.66, 0.8, 0.95], [1.2, 1.5, 1.1, 1.8, 1.6, 2.0, 1.7, 2.3, 2.1, 2.6], 0.25, 0.3, 0.6, 0.5, 0.1, 0.9, 0.05),
]

if __name__ == "__main__":
    for k, (xs, ys, th, h, g, b, lo, hi, t) in enumerate(TOYS):
        obj = objective(xs, ys, th, h, g, lo, hi)
        dens = density(xs, ys, th, h, b, lo, hi, t)
        print(f"toy{k}: objective={mp.nstr(obj, 20)} density={mp.nstr(dens, 20)}")
