"""Acceptance suite: one test per criterion, each reporting a pass/fail line."""

import csv
import math
import time
from dataclasses import replace

import numpy as np

from sgdkf import battery_model as bm
from sgdkf.cli import cmd_estimate
from sgdkf.filters import NoiseConfig
from sgdkf.numerics import lyapunov_residual, numeric_jacobian, solve_discrete_lyapunov
from sgdkf.scenario import (
    ALGORITHMS,
    EstimatorSettings,
    generate_profile,
    initial_theta,
    run_estimator,
    simulate_truth,
)
from sgdkf.supervisor import SupervisorOptions

PARAMS = bm.CellParameters()
THETA = bm.nominal_theta(PARAMS)
NOISE = NoiseConfig.default(PARAMS)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh, strict=True))


def summary_table(out):
    return {(r["condition"], float(r["init_soc_err_pct"]), r["algorithm"]): float(r["rmse_pct"])
            for r in read_rows(out / "summary.csv")}


# 1 -----------------------------------------------------------------------------

def test_c1_lyapunov_solver(acceptance_report):
    rng = np.random.default_rng(2024)
    worst, start = 0.0, time.perf_counter()
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a = rng.standard_normal((n, n))
        a *= rng.uniform(0.05, 0.99) / max(abs(np.linalg.eigvals(a)))
        q = np.eye(n)
        p = solve_discrete_lyapunov(a, q)
        worst = max(worst, lyapunov_residual(a, p, q) / np.linalg.norm(q, "fro"))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 1.0
    acceptance_report(1, "Lyapunov solver", ok, f"max residual {worst:.2e}, {elapsed:.3f} s")
    assert ok


# 2 -----------------------------------------------------------------------------

def descent_audit(lyapunov_q):
    """Check V_{k+1} - V_k <= -alpha |z|^2 + beta |w|^2 wherever the premise holds."""
    trace = simulate_truth(np.full(1000, 2.9), THETA, PARAMS, 1.0, 0.0, 0)
    settings = replace(EstimatorSettings(), options=SupervisorOptions(lyapunov_q=lyapunov_q))
    steps = []
    run_estimator(
        trace, "sg_dkf", 30.0, (0.05, -0.05, 0.05, -0.05, 0.05),
        NOISE, PARAMS, settings,
        observer=lambda before, after, rec: steps.append((after.constants, np.array(rec.state_mean))),
    )
    applicable = violations = 0
    for k in range(len(steps) - 1):
        c, est = steps[k]
        z = trace.true_state[k] - est
        z1 = trace.true_state[k + 1] - steps[k + 1][1]
        w = z1 - c.a_used @ z
        zz, ww = float(z @ z), float(w @ w)
        if not ww < (c.alpha / c.beta) * zz:
            continue
        applicable += 1
        lhs = float(z1 @ c.p_lyap @ z1 - z @ c.p_lyap @ z)
        rhs = -c.alpha * zz + c.beta * ww
        slack = 1e-12 * np.linalg.norm(c.p_lyap, 2) * (zz + float(z1 @ z1))  # rounding only
        if lhs > rhs + slack:
            violations += 1
    return applicable, violations, len(steps)


def test_c2_descent_inequality_audit(acceptance_report):
    app_default, viol_default, n = descent_audit(None)
    app_unit, viol_unit, _ = descent_audit(np.eye(5))
    ok = viol_default == 0 and viol_unit == 0 and n == 1000
    detail = (f"process-noise Q: {app_default} applicable steps, {viol_default} violations; "
              f"Q = I: {app_unit} applicable, {viol_unit} violations")
    acceptance_report(2, "descent inequality audit", ok, detail)
    assert ok


# 3 -----------------------------------------------------------------------------

def test_c3_nominal_exactness(acceptance_report):
    trace = simulate_truth(np.full(1000, 2.9), THETA, PARAMS, 1.0, 0.0, 0)
    worst_rmse = worst_e = 0.0
    for algo in ALGORITHMS:
        records, m = run_estimator(trace, algo, 0.0, 0.0, NOISE, PARAMS)
        worst_rmse = max(worst_rmse, m.rmse_soc_pct)
        worst_e = max(worst_e, max(abs(r.innovation_v) for r in records))
        assert m.n_steps == 1000
    ok = worst_rmse <= 1e-6 and worst_e <= 1e-9
    acceptance_report(3, "nominal exactness", ok, f"rmse {worst_rmse:.2e} %, max |E| {worst_e:.2e} V")
    assert ok


# 4 -----------------------------------------------------------------------------

def test_c4_table_structure_on_twin(suite_run, acceptance_report):
    table = summary_table(suite_run.out)
    parts, ok = [], suite_run.exit_code == 0
    for cond in ("UDDS", "1C"):
        d0, s0 = table[(cond, 0.0, "dual_ekf")], table[(cond, 0.0, "sg_dkf")]
        d30, s30 = table[(cond, 30.0, "dual_ekf")], table[(cond, 30.0, "sg_dkf")]
        ok &= abs(s0 - d0) <= 0.1 and s30 <= 0.7 * d30
        parts.append(f"{cond} 0%: {d0:.2f}/{s0:.2f}, 30%: {d30:.2f}/{s30:.2f} (ratio {s30 / d30:.2f})")
    ok &= suite_run.elapsed < 60.0
    parts.append(f"suite {suite_run.elapsed:.1f} s")
    acceptance_report(4, "twin table structure (dual/sg RMSE %)", ok, "; ".join(parts))
    assert ok


# 5 -----------------------------------------------------------------------------

def test_c5_dead_zone_behaviour(suite_run, acceptance_report):
    parts, ok = [], True
    for name in ("udds_30", "1c_30"):
        rows = read_rows(suite_run.out / f"records_{name}_sg_dkf.csv")
        sigma = np.array([int(r["sigma"]) for r in rows])
        early = int(np.sum(sigma[:500] == 0))
        tail = sigma[int(0.8 * len(sigma)):]
        open_frac = float(np.mean(tail == 1))
        ok &= early >= 1 and open_frac >= 0.9
        parts.append(f"{name}: {early} early freezes, tail open {open_frac:.3f}")
    acceptance_report(5, "dead-zone behaviour", ok, "; ".join(parts))
    assert ok


# 6 -----------------------------------------------------------------------------

def test_c6_jacobian_fidelity(acceptance_report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(50):
        x = [rng.uniform(0.1, 1.0), rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
             rng.uniform(-80, 80), rng.uniform(-80, 80)]
        i = rng.uniform(-5.8, 8.7)
        analytic = bm.jacobian_A(x, THETA, PARAMS, i)
        fd = bm.jacobian_A(x, THETA, PARAMS, i, method="fd")
        worst = max(worst, np.max(np.abs(fd - analytic)) / np.max(np.abs(analytic)))

    # order-2 check on the kinetic overpotential against its closed-form derivative
    params = replace(PARAMS, peukert_n=1.0)
    state = (0.6, 0.002, -0.002, 0.0, 0.0)
    x_sp, x_sn = bm.surface_stoichiometries(state, THETA)
    kp = THETA.d_p * params.p_rxn_p / (6 * THETA.q_all * math.sqrt(1 - x_sp))
    kn = THETA.d_n * params.p_rxn_n / (6 * THETA.q_all * math.sqrt(1 - x_sn))
    i0 = 2.9
    exact = params.thermal_factor * (kp / math.hypot(1, kp * i0) + kn / math.hypot(1, kn * i0))
    errs = [abs(numeric_jacobian(lambda v: np.array([bm.reaction_overpotential(state, THETA, params, v[0])]),
                                 [i0], h)[0, 0] - exact) for h in (8e-3, 4e-3, 2e-3)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    ok = worst <= 1e-6 and all(3.5 < r < 4.5 for r in ratios)
    acceptance_report(6, "Jacobian fidelity", ok,
                      f"max rel A error {worst:.1e}; FD error ratios {', '.join(f'{r:.2f}' for r in ratios)}")
    assert ok


# 7 -----------------------------------------------------------------------------

def test_c7_model_fixed_points(acceptance_report):
    s = bm.ElectrochemicalState(1.0, 0.0, 0.0, 0.0, 0.0)
    for _ in range(int(10 * PARAMS.tau_e / PARAMS.dt)):
        s = bm.step_state(s, THETA, PARAMS, 2.9)
    electro = abs(s.dc1 - PARAMS.p_con_a * 2.9) / (PARAMS.p_con_a * 2.9)

    peukert_exact = bm.effective_capacity(PARAMS, THETA, 2.9) == THETA.q_all and all(
        bm.effective_capacity(replace(PARAMS, peukert_n=1.0), THETA, i) == THETA.q_all
        for i in (0.3, 2.9, 5.0, -7.0)
    )

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        profile = rng.uniform(-5.8, 8.7, int(rng.integers(10, 2000)))
        x = bm.ElectrochemicalState(1.0, 0.0, 0.0, 0.0, 0.0)
        for i in profile:
            x = bm.step_state(x, THETA, PARAMS, float(i))
        expected = 1.0 - math.fsum(profile) * PARAMS.dt / THETA.q_all
        worst = max(worst, abs(x.soc - expected) / max(1.0, abs(expected)))
    ok = electro <= 0.01 and peukert_exact and worst <= 1e-12
    acceptance_report(7, "model fixed points", ok,
                      f"electrolyte off by {electro:.1e}; Peukert exact {peukert_exact}; SOC rel err {worst:.1e}")
    assert ok


# 8 -----------------------------------------------------------------------------

def test_c8_determinism(suite_run, tmp_path, acceptance_report):
    code = cmd_estimate(suite_run.config, "both", tmp_path)
    first = sorted(p.name for p in suite_run.out.glob("*.csv"))
    second = sorted(p.name for p in tmp_path.glob("*.csv"))
    same = first == second and all(
        (suite_run.out / n).read_bytes() == (tmp_path / n).read_bytes() for n in first
    )
    ok = code == 0 and same and len(first) == 9
    acceptance_report(8, "determinism", ok, f"{len(first)} CSV files byte-identical: {same}")
    assert ok


# 9 -----------------------------------------------------------------------------

THETA_COLS = ("theta_dp", "theta_dn", "theta_qall", "theta_xsp0", "theta_xsn0")


def test_c9_freeze_and_gate_invariants(suite_run, acceptance_report):
    cfg = suite_run.config
    theta0 = tuple(initial_theta(THETA, cfg.init_theta_error))
    n_records = bad_gate = bad_freeze = 0
    for path in sorted(suite_run.out.glob("records_*.csv")):
        prev = theta0
        for r in read_rows(path):
            n_records += 1
            sigma, e, delta = int(r["sigma"]), abs(float(r["innovation_v"])), float(r["delta_k"])
            theta = tuple(float(r[c]) for c in THETA_COLS)
            bad_gate += sigma not in (0, 1) or sigma != (1 if e < delta else 0)
            if sigma == 0:
                bad_freeze += theta != prev
            prev = theta

    # covariance side of freeze exactness, checked on live sessions
    bad_cov = 0

    def watch(before, after, rec):
        nonlocal bad_cov
        if rec.sigma == 0:
            same = (after.theta_est is before.theta_est
                    and np.array_equal(after.theta_est.covariance, before.theta_est.covariance))
            bad_cov += not same

    noise, settings = cfg.noise_config(), cfg.estimator_settings()
    for scenario in cfg.scenarios:
        spec = scenario.to_spec()
        trace = simulate_truth(generate_profile(spec.profile), THETA, cfg.cell, spec.initial_soc,
                               cfg.noise_std_v, cfg.seed)
        run_estimator(trace, "sg_dkf", spec.init_soc_err_pct, cfg.init_theta_error, noise, cfg.cell,
                      settings, observer=watch)

    ok = bad_gate == 0 and bad_freeze == 0 and bad_cov == 0 and n_records > 0
    acceptance_report(9, "freeze exactness and gate consistency", ok,
                      f"{n_records} records; gate {bad_gate}, theta {bad_freeze}, covariance {bad_cov} violations")
    assert ok
