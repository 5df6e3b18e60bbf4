"""Independent quadrature oracle for the product moment providers.

Integrates each normalized 1-D weight numerically with mpmath at 40 digits
(no closed forms for the moments are used) and multiplies across coordinates.
Regenerate with:

    python3 quadrature.py > moments.txt

Line format: family | params | beta | moment | mass
"""

import random

import mpmath as mp

mp.mp.dps = 80
DIGITS = 40
SEED = 20240611
SAMPLES = 20
D = 3

HALVES = ["-1/2", "0", "1/2", "1", "3/2", "5/2"]


def q(s):
    n, _, d = s.partition("/")
    return mp.mpf(int(n)) / (int(d) if d else 1)


def gaussian_1d(k):
    w = lambda x: mp.exp(-x * x)
    mass = mp.quad(w, [-mp.inf, -4, 0, 4, mp.inf])
    return mp.quad(lambda x: x**k * w(x), [-mp.inf, -4, 0, 4, mp.inf]) / mass, mass


def gamma_1d(alpha, k):
    a = q(alpha)
    w = lambda x: x**a * mp.exp(-x)
    mass = mp.quad(w, [0, 1, 8, 32, mp.inf])
    return mp.quad(lambda x: x**k * w(x), [0, 1, 8, 32, mp.inf]) / mass, mass


def beta_1d(a, b, k):
    a, b = q(a), q(b)
    w = lambda x: (1 - x) ** a * (1 + x) ** b
    mass = mp.quad(w, [-1, 0, 1])
    return mp.quad(lambda x: x**k * w(x), [-1, 0, 1]) / mass, mass


def product(one_d, params, beta):
    m, mass = mp.mpf(1), mp.mpf(1)
    for p, k in zip(params, beta):
        mk, w = one_d(*p, k)
        m *= mk
        mass *= w
    return m, mass


def fmt(x):
    return mp.nstr(x, DIGITS, min_fixed=-mp.inf, max_fixed=mp.inf)


def main():
    rng = random.Random(SEED)
    rows = []
    for family in ["gaussian", "gamma", "beta"]:
        for _ in range(SAMPLES):
            beta = [rng.randint(0, 6) for _ in range(D)]
            if family == "gaussian":
                params, text = [()] * D, "-"
                m, mass = product(lambda k: gaussian_1d(k), params, beta)
            elif family == "gamma":
                alpha = [rng.choice(HALVES) for _ in range(D)]
                params, text = [(a,) for a in alpha], ",".join(alpha)
                m, mass = product(gamma_1d, params, beta)
            else:
                a = [rng.choice(HALVES) for _ in range(D)]
                b = [rng.choice(HALVES) for _ in range(D)]
                params, text = list(zip(a, b)), ",".join(a) + ";" + ",".join(b)
                m, mass = product(beta_1d, params, beta)
            rows.append(f"{family}|{text}|{','.join(map(str, beta))}|{fmt(m)}|{fmt(mass)}")
    print("\n".join(rows))


if __name__ == "__main__":
    main()
