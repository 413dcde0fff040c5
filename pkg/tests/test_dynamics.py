import math

import numpy as np
import pytest

from bnls import dynamics as dy
from bnls import spectral as sp

SQRT_PI = math.sqrt(math.pi)


@pytest.fixture(scope="module")
def grid():
    return sp.make_grid(1, 16.0, 256)


@pytest.fixture(scope="module")
def gaussian(grid):
    return sp.field_from_function(grid, lambda x: np.exp(-x**2 / 2))


@pytest.fixture(scope="module")
def cubic():
    return dy.EquationParams(dim=1, nu=3.0, mu=1)


def l2(grid, values):
    return math.sqrt(grid.cell * float(np.sum(np.abs(values) ** 2)))


# --------------------------------------------------------------------------
# sign conventions: the residual-substitution oracle
# --------------------------------------------------------------------------

def pde_residual_zero_dispersion(grid, phi0, sigma, mu, nu, t, h):
    """|i d/dt phi + mu |phi|^(nu-1) phi| for the candidate phase sign."""
    G = np.abs(phi0) ** (nu - 1)
    phi = lambda s: phi0 * np.exp(1j * sigma * mu * s * G)
    dphi = (phi(t + h) - phi(t - h)) / (2 * h)
    return l2(grid, 1j * dphi + mu * np.abs(phi(t)) ** (nu - 1) * phi(t))


def test_phase_flow_sign_fixed_by_residual_oracle(grid, gaussian):
    # The sign with residual -> 0 under h-refinement wins; freeze sigma = +1.
    for mu in (1, -1):
        res = {}
        for sigma in (1, -1):
            r1 = pde_residual_zero_dispersion(grid, gaussian.values, sigma,
                                              mu, 3.0, 0.7, 1e-4)
            r2 = pde_residual_zero_dispersion(grid, gaussian.values, sigma,
                                              mu, 3.0, 0.7, 5e-5)
            res[sigma] = (r1, r2)
        assert res[1][1] < 1e-8 and res[1][1] < res[1][0]
        assert res[-1][1] > 1e-1
    # the implementation uses the winning sign
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=0.0)
    out = dy.phase_flow(gaussian, 0.7, p)
    expect = gaussian.values * np.exp(
        1j * 0.7 * np.abs(gaussian.values) ** 2)
    assert np.max(np.abs(out.values - expect)) < 1e-14


def test_linear_sign_fixed_by_residual_oracle(grid):
    # candidate e^{i sgn t |xi|^4} on a single mode; residual of
    # i u_t + Lap^2 u must vanish for sgn = +1.
    xi0 = 4 * np.pi / 16
    x = grid.axis_coords(0)
    for sgn in (1, -1):
        u = lambda s: np.exp(1j * xi0 * x) * np.exp(1j * sgn * s * xi0**4)
        h = 1e-5
        du = (u(0.3 + h) - u(0.3 - h)) / (2 * h)
        resid = np.max(np.abs(1j * du + xi0**4 * u(0.3)))
        assert (resid < 1e-9) == (sgn == 1)
    p = dy.EquationParams(dim=1, nu=3.0, mu=1)
    mode = sp.field_from_function(grid, lambda xx: np.exp(1j * xi0 * xx))
    out = dy.linear_propagate(mode, 0.3, p)
    assert np.max(np.abs(out.values - mode.values * np.exp(1j * 0.3 * xi0**4))) \
        < 1e-12


# --------------------------------------------------------------------------
# linear propagator
# --------------------------------------------------------------------------

def test_linear_propagate_identity_at_t0(gaussian, cubic):
    out = dy.linear_propagate(gaussian, 0.0, cubic)
    assert np.array_equal(out.values, gaussian.values)


def test_linear_propagate_single_mode_phase(grid, cubic):
    # |xi0|^4 = 16, t = 0.1: phase 1.6 rad, modulus unchanged
    xi0 = 2.0
    g = sp.make_grid(1, 8 * np.pi, 256)
    mode = sp.field_from_function(g, lambda x: np.exp(1j * xi0 * x))
    out = dy.linear_propagate(mode, 0.1, cubic)
    ratio = out.values / mode.values
    assert np.allclose(np.abs(ratio), 1.0, atol=1e-12)
    assert np.angle(ratio[0]) == pytest.approx(1.6, abs=1e-12)


def test_linear_propagate_unitary(grid, cubic, rng=np.random.default_rng(7)):
    vals = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    f = sp.Field(grid, vals)
    for t in (1.0, -1.0):
        out = dy.linear_propagate(f, t, cubic)
        assert sp.lq_norm(out, 2) == pytest.approx(sp.lq_norm(f, 2), rel=1e-12)


def test_linear_propagate_group_property(gaussian, cubic):
    a = dy.linear_propagate(dy.linear_propagate(gaussian, 0.3, cubic), 0.2, cubic)
    b = dy.linear_propagate(gaussian, 0.5, cubic)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


# --------------------------------------------------------------------------
# phase flow
# --------------------------------------------------------------------------

def test_phase_flow_identity_and_modulus(gaussian, cubic):
    out = dy.phase_flow(gaussian, 0.0, cubic)
    assert np.array_equal(out.values, gaussian.values)
    out = dy.phase_flow(gaussian, 3.7, cubic)
    assert np.max(np.abs(np.abs(out.values) - np.abs(gaussian.values))) < 1e-14


def test_phase_flow_constant_field(grid):
    # |c| = 1, nu = 3: phase advances by mu t exactly
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=0.0)
    c = sp.Field(grid, np.ones(256, dtype=complex))
    out = dy.phase_flow(c, np.pi, p)
    assert np.allclose(out.values, -1.0, atol=1e-12)


# --------------------------------------------------------------------------
# strang step / evolve
# --------------------------------------------------------------------------

def test_strang_equals_phase_flow_when_dispersionless(grid, gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=0.0)
    a = dy.strang_step(gaussian, 0.37, p)
    b = dy.phase_flow(gaussian, 0.37, p)
    assert np.max(np.abs(a.values - b.values)) < 1e-13


def test_strang_equals_linear_when_nonlinearity_disabled(grid, gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, nonlinearity_enabled=False)
    a = dy.strang_step(gaussian, 0.37, p)
    b = dy.linear_propagate(gaussian, 0.37, p)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


def test_strang_self_convergence_order(grid, gaussian, cubic):
    # errors against a dt/8 reference: e(dt)/e(dt/2) in [3.6, 4.4]
    def final(dt):
        ctrl = dy.StepControl(dt=dt, t_end=1.0, guard=False,
                              record_every=10**9)
        return dy.evolve(gaussian, ctrl, cubic).final.values

    dt = 1 / 32
    ref = final(dt / 8)
    e1 = l2(grid, final(dt) - ref)
    e2 = l2(grid, final(dt / 2) - ref)
    assert 3.6 <= e1 / e2 <= 4.4


def test_strang_rejects_zero_dt(gaussian, cubic):
    with pytest.raises(ValueError):
        dy.strang_step(gaussian, 0.0, cubic)


def test_time_reversibility(grid, gaussian, cubic):
    fwd = dy.strang_step(gaussian, 0.02, cubic)
    back = dy.strang_step(fwd, -0.02, cubic)
    rel = l2(grid, back.values - gaussian.values) / l2(grid, gaussian.values)
    assert rel < 1e-9


def test_evolve_mass_conservation(grid, gaussian):
    for mu in (1, -1):
        p = dy.EquationParams(dim=1, nu=3.0, mu=mu)
        ctrl = dy.StepControl(dt=1e-3, t_end=1.0, guard=True, record_every=100)
        traj = dy.evolve(gaussian, ctrl, p)
        mass = np.asarray(traj.mass)
        assert np.max(np.abs(mass - mass[0])) / mass[0] < 1e-10


def test_evolve_energy_drift_second_order(gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1)

    def drift(dt):
        ctrl = dy.StepControl(dt=dt, t_end=1.0, guard=False, record_every=5)
        traj = dy.evolve(gaussian, ctrl, p)
        e = np.asarray(traj.energy)
        return np.max(np.abs(e - e[0])) / abs(e[0])

    ratio = drift(1e-2) / drift(5e-3)
    assert ratio == pytest.approx(4.0, rel=0.25)


def test_evolve_exact_final_partial_step(gaussian, cubic):
    ctrl = dy.StepControl(dt=0.03, t_end=0.1, guard=False, record_every=1)
    traj = dy.evolve(gaussian, ctrl, cubic)
    assert traj.times[-1] == pytest.approx(0.1, abs=1e-14)


def test_evolve_zero_dispersion_matches_phase_flow(grid, gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=0.0)
    ctrl = dy.StepControl(dt=0.01, t_end=0.73, guard=False, record_every=10**9)
    traj = dy.evolve(gaussian, ctrl, p)
    exact = dy.phase_flow(gaussian, 0.73, p)
    assert np.max(np.abs(traj.final.values - exact.values)) < 1e-12


def test_evolve_blowup_flag_mass_critical_focusing(grid):
    # focusing, nu = 9 (mass-critical in d=1), large data: the monitored
    # H^2 norm explodes and the flag fires before t_end.
    u0 = sp.field_from_function(grid, lambda x: 3.0 * np.exp(-x**2))
    p = dy.EquationParams(dim=1, nu=9.0, mu=-1)
    ctrl = dy.StepControl(dt=5e-4, t_end=1.0, guard=False, record_every=20,
                          monitor_gamma=2.0, blowup_factor=100.0)
    traj = dy.evolve(u0, ctrl, p)
    assert traj.status == dy.STATUS_BLOWUP
    assert traj.times[-1] < 1.0
    assert traj.monitor[-1] > 100.0 * traj.monitor[0]


def test_evolve_small_data_stays_unflagged(grid):
    u0 = sp.field_from_function(grid, lambda x: 0.1 * np.exp(-x**2))
    p = dy.EquationParams(dim=1, nu=9.0, mu=-1)
    ctrl = dy.StepControl(dt=1e-3, t_end=0.5, guard=True, record_every=20,
                          monitor_gamma=2.0, blowup_factor=100.0)
    traj = dy.evolve(u0, ctrl, p)
    assert traj.status == dy.STATUS_COMPLETED


def test_evolve_nan_abort_keeps_last_good_state(grid, cubic):
    vals = np.ones(256, dtype=complex)
    vals[10] = np.nan
    bad = sp.Field(grid, vals)
    ctrl = dy.StepControl(dt=0.01, t_end=0.1, guard=False, record_every=1)
    traj = dy.evolve(bad, ctrl, cubic)
    assert traj.status == dy.STATUS_NAN
    assert len(traj.fields) == 1  # only the initial record survives


def test_evolve_guard_abort(grid, cubic):
    noisy = sp.field_from_function(
        grid, lambda x: np.exp(-x**2 / 2) + 1e-3 * np.cos(120 * np.pi / 16 * x))
    ctrl = dy.StepControl(dt=0.01, t_end=0.1, guard=True, record_every=1)
    traj = dy.evolve(noisy, ctrl, cubic)
    assert traj.status == dy.STATUS_GUARD
    assert "aliasing" in traj.message


# --------------------------------------------------------------------------
# conserved quantities (Gaussian-moment oracles)
# --------------------------------------------------------------------------

def test_mass_energy_gaussian(gaussian, cubic):
    pair = dy.conserved(gaussian, cubic)
    assert pair.mass == pytest.approx(SQRT_PI, rel=1e-8)
    # (1/2) int |g''|^2 = (1/2) int (x^2-1)^2 e^{-x^2} = (3/8) sqrt(pi)
    # (mu/4) int |g|^4 = (1/4) sqrt(pi/2)
    kinetic = 0.375 * SQRT_PI
    potential = 0.25 * math.sqrt(math.pi / 2)
    assert pair.energy == pytest.approx(kinetic + potential, rel=1e-8)


def test_gaussian_fourth_moment_oracle():
    # guard for the energy oracle above: int x^4 e^{-x^2} = (3/4) sqrt(pi)
    from scipy.integrate import quad
    val, _ = quad(lambda x: x**4 * np.exp(-x**2), -np.inf, np.inf)
    assert val == pytest.approx(0.75 * SQRT_PI, rel=1e-12)


def test_energy_sign_focusing(gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=-1)
    pair = dy.conserved(gaussian, p)
    kinetic = 0.375 * SQRT_PI
    potential = -0.25 * math.sqrt(math.pi / 2)
    assert pair.energy == pytest.approx(kinetic + potential, rel=1e-8)


# --------------------------------------------------------------------------
# Duhamel residual
# --------------------------------------------------------------------------

def run_traj(gaussian, p, dt, samples, t_end=1.0):
    cadence = max(1, int(round(t_end / dt / samples)))
    ctrl = dy.StepControl(dt=dt, t_end=t_end, guard=False,
                          record_every=cadence)
    return dy.evolve(gaussian, ctrl, p)


def test_duhamel_linear_run(gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, nonlinearity_enabled=False)
    traj = run_traj(gaussian, p, 1 / 32, 32)
    assert dy.duhamel_residual(traj, p) < 1e-10


def test_duhamel_zero_dispersion_quadrature_error(gaussian):
    # disp = 0: residual is the trapezoid error of int |u|^(nu-1) u,
    # second order in the cadence.
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=0.0)
    r1 = dy.duhamel_residual(run_traj(gaussian, p, 1 / 64, 16), p)
    r2 = dy.duhamel_residual(run_traj(gaussian, p, 1 / 128, 32), p)
    assert r1 < 1e-3
    assert r1 / r2 >= 3.5


def test_duhamel_full_run_refinement(gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1)
    r1 = dy.duhamel_residual(run_traj(gaussian, p, 1 / 64, 32), p)
    r2 = dy.duhamel_residual(run_traj(gaussian, p, 1 / 128, 64), p)
    assert r1 / r2 >= 3.5


def test_duhamel_needs_16_samples(gaussian, cubic):
    traj = run_traj(gaussian, cubic, 1 / 32, 8)
    with pytest.raises(ValueError):
        dy.duhamel_residual(traj, cubic)


# --------------------------------------------------------------------------
# scattering probe
# --------------------------------------------------------------------------

def test_scattering_probe_zero_data(grid, cubic):
    z = sp.zero_field(grid)
    ctrl = dy.StepControl(dt=0.25, t_end=8.0, guard=False, record_every=4)
    traj = dy.evolve(z, ctrl, cubic)
    probe = dy.scattering_probe(traj, cubic, gamma=0.0,
                                times=[1.0, 2.0, 4.0, 8.0])
    assert all(v == 0.0 for (_, _, v) in probe)


def test_scattering_probe_linear_run(grid, gaussian):
    p = dy.EquationParams(dim=1, nu=3.0, mu=1, nonlinearity_enabled=False)
    ctrl = dy.StepControl(dt=0.125, t_end=8.0, guard=False, record_every=8)
    traj = dy.evolve(gaussian, ctrl, p)
    probe = dy.scattering_probe(traj, p, gamma=0.5,
                                times=[1.0, 2.0, 4.0, 8.0])
    assert all(v < 1e-10 for (_, _, v) in probe)


# --------------------------------------------------------------------------
# covariance properties
# --------------------------------------------------------------------------

def test_scaling_covariance(grid, gaussian, cubic):
    # u_lam(t, x) = lam^(-4/(nu-1)) u(t/lam^4, x/lam): evolving rescaled
    # data on the co-scaled grid for lam^4 t matches the original run.
    nu = 3.0
    T, dt = 1.0, 1e-2
    ref = dy.evolve(gaussian, dy.StepControl(dt=dt, t_end=T, guard=False,
                                             record_every=10**9), cubic).final
    ref_l2 = l2(grid, ref.values)
    for lam in (0.5, 2.0):
        gl = sp.make_grid(1, 16.0 * lam, 256)
        ul = sp.Field(gl, lam ** (-4 / (nu - 1)) * gaussian.values)
        got = dy.evolve(ul, dy.StepControl(dt=lam**4 * dt, t_end=lam**4 * T,
                                           guard=False, record_every=10**9),
                        cubic).final
        back = lam ** (4 / (nu - 1)) * got.values
        assert l2(grid, back - ref.values) / ref_l2 < 1e-6


def test_back_transformation(grid, gaussian):
    # evolving with dispersion delta on [-L, L) matches evolving the full
    # equation on the delta-dilated box, sample for sample.
    delta, T, dt = 0.3, 1.0, 1e-2
    weak = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=delta)
    full = dy.EquationParams(dim=1, nu=3.0, mu=1, disp=1.0)
    phi = dy.evolve(gaussian, dy.StepControl(dt=dt, t_end=T, guard=False,
                                             record_every=10**9), weak).final
    gu = sp.make_grid(1, 16.0 / delta, 256)
    u = sp.Field(gu, gaussian.values)
    uf = dy.evolve(u, dy.StepControl(dt=dt, t_end=T, guard=False,
                                     record_every=10**9), full).final
    assert np.max(np.abs(phi.values - uf.values)) < 1e-12


# --------------------------------------------------------------------------
# d = 2
# --------------------------------------------------------------------------

def test_evolve_2d_conserves_mass():
    g = sp.make_grid(2, 8.0, 64)
    u0 = sp.field_from_function(g, lambda x, y: np.exp(-(x**2 + y**2) / 2))
    p = dy.EquationParams(dim=2, nu=3.0, mu=1)
    ctrl = dy.StepControl(dt=5e-3, t_end=0.5, guard=True, record_every=10)
    traj = dy.evolve(u0, ctrl, p)
    assert traj.status == dy.STATUS_COMPLETED
    mass = np.asarray(traj.mass)
    assert np.max(np.abs(mass - mass[0])) / mass[0] < 1e-10


def test_params_validation():
    with pytest.raises(ValueError):
        dy.EquationParams(dim=1, nu=1.0, mu=1)
    with pytest.raises(ValueError):
        dy.EquationParams(dim=1, nu=3.0, mu=0)
    with pytest.raises(ValueError):
        dy.EquationParams(dim=1, nu=3.0, mu=1, disp=-0.1)
    with pytest.raises(ValueError):
        dy.StepControl(dt=0.0, t_end=1.0)
