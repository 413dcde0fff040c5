"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with its wall time.  Tolerances are fixed here and nowhere else."""

import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from bnls import dynamics as dy
from bnls import experiments as ex
from bnls import regimes as rg
from bnls import spectral as sp
from test_regimes import TRUTH_TABLE

SQRT_PI = math.sqrt(math.pi)


class _Criterion:
    def __init__(self, number, name):
        self.number = number
        self.name = name
        self.t0 = time.perf_counter()

    def report(self, ok, detail=""):
        dt = time.perf_counter() - self.t0
        word = "PASS" if ok else "FAIL"
        print(f"ACCEPTANCE {self.number:02d} {self.name}: {word} "
              f"[{dt:.2f}s] {detail}")
        assert ok, f"criterion {self.number} ({self.name}): {detail}"


def test_criterion_01_norm_oracles():
    c = _Criterion(1, "norm-oracles")
    g = sp.make_grid(1, 16.0, 256)
    gauss = sp.field_from_function(g, lambda x: np.exp(-x**2 / 2))
    p = dy.EquationParams(dim=1, nu=3.0, mu=1)
    checks = {
        "L2": (sp.lq_norm(gauss, 2), np.pi**0.25),
        "Hdot1": (sp.sobolev_norm(gauss, sp.SobolevSpec(1.0, homogeneous=True)),
                  math.sqrt(SQRT_PI / 2)),
        "H11": (sp.weighted_norm(gauss, sp.WeightedSpec(1)),
                math.sqrt(1.5 * SQRT_PI) + math.sqrt(SQRT_PI / 2)),
        "mass": (dy.conserved(gauss, p).mass, SQRT_PI),
        "energy": (dy.conserved(gauss, p).energy,
                   0.375 * SQRT_PI + 0.25 * math.sqrt(math.pi / 2)),
    }
    errs = {k: abs(a - b) / abs(b) for k, (a, b) in checks.items()}
    c.report(max(errs.values()) < 1e-6,
             " ".join(f"{k}={v:.2e}" for k, v in errs.items()))


def test_criterion_02_data_norm_scaling_law():
    c = _Criterion(2, "data-norm-scaling-law")
    worst = 0.0
    lams = (0.5, 1.0, 2.0)
    for nu in (3.0, 5.0):
        for gamma in (0.0, 0.5, 1.0):
            vals = []
            for lam in lams:
                gl = sp.make_grid(1, 16.0 * lam, 256)
                u = sp.field_from_function(
                    gl, lambda x: lam ** (-4 / (nu - 1)) *
                    np.exp(-((x / lam) ** 2) / 2))
                vals.append(sp.sobolev_norm(
                    u, sp.SobolevSpec(gamma, homogeneous=True)))
            slope = np.polyfit(np.log(lams), np.log(vals), 1)[0]
            worst = max(worst, abs(slope - (0.5 - 4 / (nu - 1) - gamma)))
    c.report(worst < 1e-3, f"max slope error {worst:.2e}")


def test_criterion_03_conservation():
    c = _Criterion(3, "conservation")
    details = []
    ok = True
    for mu in (1, -1):
        res = ex.conservation_study(nu=3.0, mu=mu, t_end=1.0, dt=1e-2)
        ok &= res.outputs["mass_drift"] < 1e-10
        ok &= 3.0 <= res.outputs["energy_ratio"] <= 5.0
        details.append(
            f"mu={mu:+d}: mass {res.outputs['mass_drift']:.1e} "
            f"energy-ratio {res.outputs['energy_ratio']:.2f}")
    c.report(ok, "; ".join(details))


def test_criterion_04_splitting_self_convergence():
    c = _Criterion(4, "splitting-order")
    g = sp.make_grid(1, 16.0, 256)
    u0 = sp.field_from_function(g, lambda x: np.exp(-x**2 / 2))
    p = dy.EquationParams(dim=1, nu=3.0, mu=1)

    def final(dt):
        ctrl = dy.StepControl(dt=dt, t_end=1.0, guard=False,
                              record_every=10**9)
        return dy.evolve(u0, ctrl, p).final.values

    dt = 1 / 32
    f1, f2, f4 = final(dt), final(dt / 2), final(dt / 4)
    e12 = np.sqrt(np.sum(np.abs(f1 - f2) ** 2))
    e24 = np.sqrt(np.sum(np.abs(f2 - f4) ** 2))
    order = math.log2(e12 / e24)
    c.report(1.8 <= order <= 2.2, f"observed order {order:.3f}")


def test_criterion_05_solver_scaling_covariance():
    c = _Criterion(5, "solver-scaling-covariance")
    res = ex.scaling_invariance_study(lams=(0.5, 1.0, 2.0))
    worst = max(res.outputs["covariance_mismatch"].values())
    c.report(worst < 1e-6, f"max rescaled-run mismatch {worst:.2e}")


def test_criterion_06_small_dispersion_law():
    c = _Criterion(6, "small-dispersion-law")
    res = ex.small_dispersion_study(
        nu=3.0, mu=1, deltas=(0.2, 0.1, 0.05), t_checks=(1.0,), k=1)
    o = res.outputs
    ok = (o["slope_hk"] >= 2.75 and o["slope_hkk"] >= 2.75
          and o["r2_hk"] >= 0.99 and o["r2_hkk"] >= 0.99 and o["monotone"])
    c.report(ok, f"slopes Hk {o['slope_hk']:.2f} / Hkk {o['slope_hkk']:.2f}, "
                 f"r2 {o['r2_hk']:.4f}/{o['r2_hkk']:.4f}")


def test_criterion_07_initial_data_norm_law():
    c = _Criterion(7, "initial-data-norm-law")
    details, ok = [], True
    cases = [
        (ex.ProfileSpec.make(ex.MOMENT_VANISHING, m=2), 3.0, -2.0),  # <= -d/2
        (ex.ProfileSpec(ex.GAUSSIAN), 5.0, 0.25),
    ]
    for profile, nu, gamma in cases:
        res = ex.initial_norm_scaling_study(profile, nu=nu, gamma=gamma)
        o = res.outputs
        lam_err = abs(o["lam_slope"] - o["lam_slope_expected"]) / \
            abs(o["lam_slope_expected"])
        del_err = abs(o["del_slope"] - o["del_slope_expected"]) / \
            abs(o["del_slope_expected"])
        ok &= lam_err <= 0.05 and del_err <= 0.05
        details.append(f"(nu={nu},gamma={gamma}): lam {lam_err:.1%} "
                       f"del {del_err:.1%}")
    c.report(ok, "; ".join(details))


def test_criterion_08_norm_inflation():
    c = _Criterion(8, "norm-inflation")
    res = ex.norm_inflation_study()
    o = res.outputs
    slope_err = abs(o["closed_slope"] - o["gamma"]) / o["gamma"]
    ok = (slope_err <= 0.15 and o["ratio_spread"] < 2.0
          and o["initial_constant_spread"] < 2.0)
    c.report(ok, f"closed slope {o['closed_slope']:.4f} (gamma {o['gamma']}), "
                 f"ratio spread {o['ratio_spread']:.3f}, "
                 f"C spread {o['initial_constant_spread']:.5f}")


def test_criterion_09_low_frequency_growth():
    c = _Criterion(9, "low-frequency-growth")
    res = ex.low_frequency_study()
    o = res.outputs
    err = abs(o["slope"] - o["slope_expected"]) / abs(o["slope_expected"])
    c.report(res.passed and err <= 0.10,
             f"growth slope {o['slope']:.4f} vs {o['slope_expected']} "
             f"({err:.2%})")


def test_criterion_10_uniform_discontinuity():
    c = _Criterion(10, "uniform-discontinuity")
    res = ex.uniform_discontinuity_suite()
    o = res.outputs
    prop = max(o["initial_diff_per_gap"]) / min(o["initial_diff_per_gap"])
    c.report(res.passed,
             f"initial-diff proportionality spread {prop:.3f}, evolved "
             f"floor {o['floor']:.3f} (ratio {o['floor_ratio']:.3f})")


def test_criterion_11_classifier_truth_table():
    c = _Criterion(11, "classifier-truth-table")
    assert len(TRUTH_TABLE) >= 25
    bad = []
    for query, verdict, tag in TRUTH_TABLE:
        v = rg.classify(rg.RegimeQuery(**query))
        if v.verdict != verdict or v.statement != tag:
            bad.append((query, v.verdict))
    c.report(not bad, f"{len(TRUTH_TABLE)} queries, {len(bad)} mismatches")


def test_criterion_12_exponent_identities():
    c = _Criterion(12, "exponent-identities")
    rng = np.random.default_rng(2024)
    count, bad = 0, 0
    while count < 1000:
        d = int(rng.integers(1, 9))
        nu = F(int(rng.integers(2, 40)), int(rng.integers(1, 8)))
        if nu <= 1:
            continue
        gc = rg.critical_exponent(d, nu)
        lo, hi = max(F(0), gc), F(d, 2)
        if lo >= hi:
            continue
        gamma = lo + (hi - lo) * F(int(rng.integers(0, 64)), 64)
        if gamma >= hi:
            continue
        r = rg.working_exponents(rg.RegimeQuery(d=d, nu=nu, gamma=gamma))
        theta_sign_ok = (r.theta > 0) == (gamma > gc) and \
            (r.theta == 0) == (gamma == gc)
        dual_ok = rg.gamma_pq(d, r.p, r.q) == \
            rg.gamma_pq(d, rg.conjugate(r.p), rg.conjugate(r.q)) + 4
        if not (r.gamma_pq_check == 0 and r.admissible_ok and theta_sign_ok
                and dual_ok):
            bad += 1
        count += 1
    c.report(bad == 0, f"1000 random valid queries, {bad} failures (exact "
                       "rational arithmetic)")


def test_criterion_13_duhamel_residual():
    c = _Criterion(13, "duhamel-residual")
    g = sp.make_grid(1, 16.0, 256)
    u0 = sp.field_from_function(g, lambda x: np.exp(-x**2 / 2))
    p = dy.EquationParams(dim=1, nu=3.0, mu=1)

    def residual(dt, samples):
        cadence = max(1, int(round(1.0 / dt / samples)))
        ctrl = dy.StepControl(dt=dt, t_end=1.0, guard=False,
                              record_every=cadence)
        return dy.duhamel_residual(dy.evolve(u0, ctrl, p), p)

    r1 = residual(1 / 64, 32)
    r2 = residual(1 / 128, 64)
    order = math.log2(r1 / r2)
    c.report(order >= 1.8, f"residual {r1:.2e} -> {r2:.2e}, order {order:.2f}")


def test_criterion_14_scattering_probe():
    c = _Criterion(14, "scattering-probe")
    res = ex.scattering_study()
    o = res.outputs
    ratios = [a / b for a, b in zip(o["differences"], o["differences"][1:])]
    c.report(res.passed,
             f"H^{o['gamma_c']:.1f} Cauchy differences "
             + " -> ".join(f"{v:.2e}" for v in o["differences"])
             + f", dyadic decay x{min(ratios):.2f}")
