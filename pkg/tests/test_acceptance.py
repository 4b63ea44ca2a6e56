"""The fourteen acceptance criteria, checked against one `verify --suite all` run.

Each test records a PASS/FAIL line (printed in the terminal summary) and
asserts at the stated tolerance.
"""
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.special import gamma

from transradon.verify import bench_forward_oracle

from conftest import ACCEPTANCE

CMD = [sys.executable, "-m", "transradon.cli", "verify", "--suite", "all", "--seed", "7",
       "--threads", "4"]


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    d = tmp_path_factory.mktemp("acceptance")
    out, elapsed = [], []
    for k in range(2):
        path = d / f"run{k}.json"
        t0 = time.perf_counter()
        subprocess.run(CMD + ["--out", str(path), "--csv", str(d / f"run{k}.csv")], check=True,
                       capture_output=True)
        elapsed.append(time.perf_counter() - t0)
        out.append(path.read_bytes())
    return out, elapsed, d


@pytest.fixture(scope="session")
def reports(runs):
    data = json.loads(runs[0][0])
    return {r["name"]: r for reps in data["reports"].values() for r in reps}


def test_criterion_01_forward_oracle():
    t0 = time.perf_counter()
    rep = bench_forward_oracle()
    wall = time.perf_counter() - t0
    err = rep.details["max_rel_error"]
    record(1, err <= 1e-4 and wall <= 30 and rep.details["threads"] == 1,
           f"max rel error {err:.2e} <= 1e-4, {wall:.1f} s <= 30 s single-threaded")


def test_criterion_02_projection_slice(reports):
    r2 = reports["projection_slice_m2"]["measure"][1]
    r3 = reports["projection_slice_m3"]["measure"][1]
    record(2, r2 <= 1e-4 and r3 <= 1e-3, f"residual m=2 {r2:.2e} <= 1e-4, m=3 {r3:.2e} <= 1e-3")


def test_criterion_03_weighted_identity(reports):
    r = reports["eq1"]
    lam = r["constant"]["value"]
    ok = r["rel_error"] <= 1e-2 and abs(lam - np.pi) <= 1e-12 * np.pi
    record(3, ok, f"sides differ by {r['rel_error']:.2e} <= 1e-2, |lambda - pi| = "
                  f"{abs(lam - np.pi):.1e}")


def test_criterion_04_semyanistyi_point(reports):
    r = reports["semyanistyi_point"]
    # 2 pi I^{3/2} f(0) = 2 pi Gamma(1/4) / 2^{3/2} for exp(-|x|^2) in the plane
    closed = 2 * np.pi * gamma(0.25) / 2 ** 1.5
    right = r["right"] if not isinstance(r["right"], list) else complex(*r["right"])
    ok = r["rel_error"] <= 1e-3 and abs(right - closed) <= 1e-3 * closed
    record(4, ok, f"relative difference {r['rel_error']:.2e} <= 1e-3")


def test_criterion_05_intertwining(reports):
    e = reports["intertwining"]["measure"][1]
    record(5, e <= 1e-3, f"rel L2 {e:.2e} <= 1e-3")


def test_criterion_06_fourier_inversion(reports):
    e2 = reports["fourier_inversion_m2"]["measure"][1]
    e3 = reports["fourier_inversion_m3"]["measure"][1]
    record(6, e2 <= 1e-3 and e3 <= 5e-3, f"rel L2 m=2 {e2:.2e} <= 1e-3, m=3 {e3:.2e} <= 5e-3")


def test_criterion_07_derivative_inversion(reports):
    d = reports["derivative_inversion"]["details"]
    e = max(d["errors"].values())
    agree = d["placement_agreement"]
    record(7, e <= 1e-2 and agree <= 1e-8,
           f"rel L2 {e:.2e} <= 1e-2, placements agree to {agree:.1e} <= 1e-8")


def test_criterion_08_heisenberg_inversion(reports):
    d = reports["heisenberg_inversion"]["details"]
    ok = (d["error_derivative"] <= 1e-2 and d["error_sign_flipped"] > 1.0
          and d["fourier_vs_derivative"] <= 1e-3)
    record(8, ok, f"rel L2 {d['error_derivative']:.2e} <= 1e-2, flipped sign "
                  f"{d['error_sign_flipped']:.2f} > 1, fourier vs derivative "
                  f"{d['fourier_vs_derivative']:.2e} <= 1e-3")


def test_criterion_09_convolution_backprojection(reports):
    r = reports["cbp"]
    d = r["details"]
    g = r["left"]
    plateau = d["plateau_rel_to_gamma"]
    pair = max(p["rel_diff"] for p in d["two_evaluations"])
    ok = (abs(g - np.pi ** 2) <= 1e-10 * np.pi ** 2 and plateau is not None and plateau <= 0.05
          and pair <= 1e-3)
    record(9, ok, f"|gamma - pi^2| = {abs(g - np.pi ** 2):.1e}, plateau within {plateau:.2%} "
                  f"<= 5%, evaluations agree to {pair:.1e} <= 1e-3")


def test_criterion_10_scaling_slope(reports):
    s = reports["scaling_exponent"]["measure"][1]
    pert = reports["scaling_exponent_perturbed_r"]
    # the perturbed slope is pinned by the exponent count 1 - m - 1/r + m/p
    assert abs(pert["measure"][1] - pert["details"]["predicted_slope"]) <= 1e-3
    record("10", abs(s) <= 0.05, f"|slope| {abs(s):.1e} <= 0.05 at p=1.5, q=3, r=3")


@pytest.mark.xfail(strict=True, reason="r + 0.5 moves the exact exponent by 1/3 - 1/3.5 = "
                                       "0.0476, below the 0.1 threshold; unattainable")
def test_criterion_10_perturbed_slope(reports):
    s = reports["scaling_exponent_perturbed_r"]["measure"][1]
    record("10", abs(s) >= 0.1, f"perturbed |slope| {abs(s):.4f} >= 0.1 (exact value "
                              f"{1 / 3 - 1 / 3.5:.4f}; unattainable)")


def test_criterion_11_duality(reports):
    errs = {k: reports[f"duality_{k}"]["rel_error"] for k in ("transversal", "heisenberg")}
    record(11, max(errs.values()) <= 1e-5,
           f"mismatch m=2 {errs['transversal']:.1e}, n=1 {errs['heisenberg']:.1e} <= 1e-5")


def test_criterion_12_measure_change(reports):
    r = reports["measure_change_sphere_to_plane"]
    four_pi = 4 * math.pi
    ok = abs(r["left"] - four_pi) <= 1e-6 * four_pi and abs(r["right"] - four_pi) <= 1e-6 * four_pi
    record(12, ok, f"sphere {r['left']:.10f}, slopes {r['right']:.10f}, 4 pi {four_pi:.10f}")


def test_criterion_13_hypersingular(reports):
    r = reports["hypersingular"]
    errs = [e["error"] for e in r["details"]["errors"]]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    imag = r["details"]["d_imag_over_real"]
    record(13, decreasing and imag <= 1e-8,
           "errors " + ", ".join(f"{e:.3f}" for e in errs) + f" decrease; |Im d|/Re d = {imag:.1e}")


def test_criterion_14_determinism(runs):
    (a, b), elapsed, d = runs
    ok = a == b and max(elapsed) <= 15 * 60
    record(14, ok, f"two runs byte-identical: {a == b}; runtime {max(elapsed):.0f} s <= 900 s")
    assert (d / "run0.csv").read_text().splitlines()[0] == "x,y,label"
