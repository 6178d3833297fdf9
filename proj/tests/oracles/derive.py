"""Independent reference values for the unit and acceptance tests.

Run once and commit the output; the tests read derived.json and never call
this script.  Uses mpmath for the scalar values and plain Python loops for the
brute-force counts, so nothing here shares code with the C++ library.
"""
import itertools
import json
import pathlib

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def affine_maps(nu):
    # On I both maps are affine: f0 fixes 0 with slope 1 - nu/2, f1 fixes 1 with slope 1/4 - nu.
    s0 = 1 - nu / 2
    s1 = mp.mpf(1) / 4 - nu
    return (lambda x: s0 * x), (lambda x: 1 + s1 * (x - 1))


def composed_fixed_point(n):
    nu = mp.mpf(1) / n
    f0, f1 = affine_maps(nu)
    x = mp.mpf(0)
    for _ in range(2000):
        x = f1(f0(x))
    return x


def phi(n):
    n = mp.mpf(n)
    return (1 - 1 / n) ** (n - 1) * (mp.mpf(3) / 4 - 1 / n) + 1 / n


def doubled(n):
    n = mp.mpf(n)
    return (1 - 1 / (2 * n)) ** (2 * n - 1) * mp.mpf(3) / 4


def solenoid_points(lam):
    lam = mp.mpf(lam)
    z = mp.mpc(0)
    for _ in range(200):
        z = 1 + lam * z
    b0 = z
    w1 = mp.expjpi(mp.mpf(2) / 3)
    w2 = mp.expjpi(mp.mpf(4) / 3)
    z = mp.mpc(0)
    for _ in range(200):
        z = w2 + lam * (w1 + lam * z)
    return b0, z


def cone_model_expansion(alpha, samples=200000, seed=3):
    # min |M v| / |v| over v in C+ = {|v-| <= alpha |v+|}, M = diag(2, .05, .05, .95).
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(samples, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    r = alpha * rng.uniform(0, 1, size=samples) ** (1 / 3)
    r[: samples // 2] = alpha  # boundary
    v = np.column_stack([np.ones(samples), d * r[:, None]])
    mv = v * np.array([2.0, 0.05, 0.05, 0.95])
    return float(np.min(np.linalg.norm(mv, axis=1) / np.linalg.norm(v, axis=1)))


def exhaustive_bernoulli(n, depth, grid):
    nu = 1.0 / n
    s0, s1 = 1 - nu / 2, 0.25 - nu
    visits = checks = violations = 0
    starts = [-nu + (1 + 2 * nu) * g / (grid - 1) for g in range(grid)]
    for word in itertools.product((0, 1), repeat=depth):
        for x0 in starts:
            x = x0
            run = 0
            for k, d in enumerate(word, start=1):
                x = 1 + s1 * (x - 1) if d else s0 * x
                run = 0 if d else run + 1
                if 0 < x < 0.25:
                    visits += 1
                    if k > n:
                        checks += 1
                        violations += run < n
    return visits, checks, violations


def main():
    out = {}
    for n in (10, 100):
        nu = mp.mpf(1) / n
        out[f"a_n{n}"] = float(composed_fixed_point(n))
        closed = (mp.mpf(3) / 4 + nu) / (mp.mpf(3) / 4 + nu + nu / 2 * (mp.mpf(1) / 4 - nu))
        assert abs(closed - composed_fixed_point(n)) < mp.mpf(10) ** -40
    nu = mp.mpf(1) / 10
    f0, f1 = affine_maps(nu)
    out["isotopy_half_at_0_n10"] = float(mp.mpf(3) / 4 * f0(0) + mp.mpf(1) / 4 * f1(0))
    out["f1_at_minus_nu_n10"] = float(f1(-nu))
    for n in (5, 10, 100, 200, 10**6):
        out[f"phi_n{n}"] = float(phi(n))
        out[f"doubled_n{n}"] = float(doubled(n))
    out["phi_min_5_200"] = float(min(phi(n) for n in range(5, 201)))
    out["phi_limit"] = float(mp.mpf(3) / (4 * mp.e))
    b0, b1 = solenoid_points(0.05)
    out["b0_z"] = [float(b0.real), float(b0.imag)]
    out["b1_z"] = [float(b1.real), float(b1.imag)]
    out["cone_model_min_expansion_alpha0.3"] = cone_model_expansion(0.3)
    out["cone_model_bound_alpha0.3"] = float(2 / mp.sqrt(1 + mp.mpf("0.09")))
    v, c, bad = exhaustive_bernoulli(6, 12, 64)
    out["exhaustive_bernoulli_n6_d12_g64"] = {"v_visits": v, "checks": c, "violations": bad}
    path = pathlib.Path(__file__).with_name("derived.json")
    path.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
