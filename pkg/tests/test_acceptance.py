"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The benchmark criteria run the scenario shipped in ``scenarios/`` and take
roughly half an hour in total on one core.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from driftsearch import control, coverage, detection, flow, harness, hypergraph, search_theory
from driftsearch.cli import main
from driftsearch.config import parse_config
from driftsearch.grid import Domain, GridSpec, ScalarField, SpectralBasis
from driftsearch.kernels import splat

ROOT = Path(__file__).resolve().parents[1]
BENCHMARK = ROOT / "scenarios" / "double_gyre_benchmark.cfg"
H = 1 / 3600.0


@pytest.fixture(scope="module")
def benchmark_cfg():
    return parse_config(BENCHMARK)


def test_criterion_1_conservation_and_runtime(benchmark_cfg, report):
    cfg = benchmark_cfg.replace(nx=128, ny=128, n_tracers=10_000)
    assert len(cfg.days) == 3 and all(d.agents == 10 for d in cfg.days)
    worst, durations = 0.0, []
    for run in range(3):
        t0 = time.perf_counter()
        ep = harness.run_episode(cfg, run)     # first episode also pays for the shared drift track
        durations.append(time.perf_counter() - t0)
        for c_total, hours in ep.audits:
            worst = max(worst, abs(c_total - hours) / hours)

    # smoothing-only invariant: grid integral equals the deposited weight, edges included
    rng = np.random.default_rng(1)
    grid = GridSpec(cfg.domain, 128, 128)
    pts = np.vstack([rng.uniform([0, 0], [800, 400], (500, 2)), [[0, 0], [800, 400], [0, 400], [799.9, 0.1]]])
    w = rng.uniform(0.001, 0.05, len(pts))
    smooth_err = abs(splat(pts, w, grid, cfg.sigma_km).sum() * grid.cell_area - w.sum()) / w.sum()

    ok = worst < 2e-2 and smooth_err < 1e-9 and max(durations) < 60.0
    report(1, ok, f"max |int c - Nt|/Nt = {worst:.2e}, smoothing residual {smooth_err:.1e}, "
                  f"slowest episode {max(durations):.1f} s (128x128, 1e4 tracers)")
    assert ok


def test_criterion_2_integrator(report):
    f = flow.RotationFlow(1.0)
    x0 = np.array([[10.0, 0.0], [0.0, -4.0]])
    T = 3.0
    c, s = math.cos(T), math.sin(T)
    exact = x0 @ np.array([[c, s], [-s, c]])
    steps = [1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64]
    err = [np.abs(flow.integrate(f, x0, 0, T, method="rk4", step=h) - exact).max() for h in steps]
    order = float(np.min(np.log2(np.array(err[:-1]) / np.array(err[1:]))))

    g = flow.RotationFlow(2 * math.pi / 24, 0.0, 0.0)
    pts = np.array([[100.0, 0.0], [0.0, 50.0], [-30.0, -30.0]])
    closure = float(np.hypot(*(flow.integrate(g, pts, 0.0, 24.0, tol=1e-6) - pts).T).max())
    ok = order >= 3.9 and closure <= 1e-6
    report(2, ok, f"RK4 observed order {order:.3f}, adaptive period closure {closure:.2e} km")
    assert ok


def test_criterion_3_alpha_solver(report):
    rng = np.random.default_rng(3)
    g = GridSpec(Domain(0, 128, 0, 64), 64, 32)
    worst = 0.0
    for _ in range(20):
        v = rng.gamma(0.5, size=(64, 32))
        v[rng.random(v.shape) < 0.3] = 0
        p = ScalarField(g, v / (v.sum() * g.cell_area))
        B = float(rng.uniform(0, 2000))
        a = search_theory.solve_alpha(p, B).alpha
        worst = max(worst, abs(search_theory.budget_used(p, a) - B) / max(B, 1.0))

    A = g.domain.area
    uni = ScalarField(g, np.full((64, 32), 1 / A))
    B = 37.5
    plan = search_theory.solve_alpha(uni, B)
    closed = max(abs(plan.alpha - (math.log(1 / A) - B / A)), float(np.abs(plan.c_opt.values - B / A).max()))

    p = ScalarField(g, np.exp(-((g.centers() - [40, 30]) ** 2).sum(-1) / 200.0))
    p = p.with_values(p.values / p.integrate())
    c1 = search_theory.solve_alpha(p, 30.0).c_opt.values
    post = p.values * np.exp(-c1)
    c2 = search_theory.solve_alpha(p.with_values(post / (post.sum() * g.cell_area)), 45.0).c_opt.values
    whole = search_theory.solve_alpha(p, 75.0).c_opt.values
    l1 = float(np.abs(c1 + c2 - whole).sum() * g.cell_area)

    ok = worst <= 1e-6 and closed <= 1e-9 and l1 <= 1e-5
    report(3, ok, f"worst relative residual {worst:.1e}, uniform closed form error {closed:.1e}, "
                  f"incremental L1 gap {l1:.1e}")
    assert ok


def test_criterion_4_detection_law(report):
    model = detection.DetectionModel(1.5, 2.0)
    n = 10_000
    details, ok = [], True
    for t_s in (1, 2, 4):
        targets = detection.TargetSet(np.zeros((n, 2)))
        dt_s = 0.25
        for k in range(int(t_s / dt_s)):
            detection.detect_step(model, np.zeros((1, 1, 2)), [True], targets, dt_s * H, k * dt_s * H,
                                  seed=2024, stream=t_s, step=k)
        p = 1 - math.exp(-t_s / 2.0)
        z = (targets.detected.mean() - p) / math.sqrt(p * (1 - p) / n)
        ok &= abs(z) <= 3
        details.append(f"t={t_s}s z={z:+.2f}")
    report(4, ok, ", ".join(details))
    assert ok


def test_criterion_5_ergodic_tendency(report):
    dom = Domain(0, 100, 0, 100)
    g = GridSpec(dom, 64, 64)
    basis = SpectralBasis(dom, 32, -1.5)
    p = ScalarField(g, np.full((64, 64), 1 / dom.area))
    agents = control.AgentState([[20.0, 30.0]], [[1.0, 0.0]], 380.0)
    state = coverage.CoverageState(sigma=3.0)
    dt = 1 / 60
    deviation = []
    for k in range(12 * 60):
        c = coverage.smooth(state, g)
        mismatch = search_theory.mismatch_dsmc(p, c, 1, state.total_searched)
        agents = control.smc_step(agents, mismatch, basis, dt)
        state = coverage.deposit(state, agents.positions, dt)
        if (k + 1) % 60 == 0:
            t = (k + 1) * dt
            d = coverage.smooth(state, g).values / t - p.values
            deviation.append(math.sqrt(np.sum(d ** 2) * g.cell_area))
    falling = np.diff(deviation) <= 0
    ok = falling.mean() >= 0.8
    report(5, ok, f"L2 deviation from uniform nonincreasing at {falling.sum()}/{len(falling)} hourly "
                  f"checkpoints ({deviation[0]:.2e} -> {deviation[-1]:.2e})")
    assert ok


def test_criterion_6_benchmark_ordering(benchmark_cfg, report):
    t0 = time.perf_counter()
    finals = {}
    worst_audit = 0.0
    for ctrl in ("mdsmc", "dsmc", "lawnmower_drifted"):
        stats = harness.run_ensemble(benchmark_cfg.replace(controller=ctrl, trajectories="none"))
        finals[ctrl] = stats.final_rates
        for ep in stats.episodes:
            for c_total, hours in ep.audits:
                worst_audit = max(worst_audit, abs(c_total - hours) / hours)
    elapsed = time.perf_counter() - t0

    m, d, lw = (finals[k].mean() for k in ("mdsmc", "dsmc", "lawnmower_drifted"))
    diff = finals["mdsmc"] - finals["lawnmower_drifted"]
    rng = np.random.default_rng(0)
    boot = diff[rng.integers(0, len(diff), (10_000, len(diff)))].mean(axis=1)
    lo, hi = np.percentile(boot, [2.5, 97.5])
    ok = m >= 1.2 * lw and m >= d - 0.02 and (lo > 0 or hi < 0) and elapsed < 7200 and worst_audit < 2e-2
    report(6, ok, f"mean final: mDSMC {m:.3f}, DSMC {d:.3f}, lawnmower {lw:.3f} "
                  f"(ratio {m / lw:.2f}); paired 95% CI [{lo:.3f}, {hi:.3f}]; "
                  f"{len(diff)} runs in {elapsed / 60:.1f} min")
    assert ok


def test_criterion_7_hypergraph(benchmark_cfg, report):
    dom = Domain(-50, 50, -50, 50)
    grid = GridSpec(dom, 32, 32)
    saddle = hypergraph.classify(flow.SaddleFlow(0.1), Domain(-1e4, 1e4, -1e4, 1e4), grid, 0.0, 10.0)
    rot = hypergraph.classify(flow.RotationFlow(0.25), Domain(-1e4, 1e4, -1e4, 1e4), grid, 0.0, 10.0)

    vel = harness.velocity_for(benchmark_cfg.flow)
    bgrid = GridSpec(benchmark_cfg.domain, 128, 64)
    a = hypergraph.classify(vel, benchmark_cfg.domain, bgrid, 0.0, 48.0, h=0.5)
    b = hypergraph.classify(vel, benchmark_cfg.domain, bgrid, 0.0, 48.0, h=0.25)
    churn = float(np.mean(a.labels != b.labels))
    ok = saddle.hyperbolic_fraction == 1.0 and rot.hyperbolic_fraction == 0.0 and churn <= 0.02
    report(7, ok, f"saddle {saddle.hyperbolic_fraction:.0%} mesohyperbolic, rotation (omega dt = 2.5) "
                  f"{1 - rot.hyperbolic_fraction:.0%} mesoelliptic, double-gyre churn {churn:.2%} "
                  f"(hyperbolic share {a.hyperbolic_fraction:.1%})")
    assert ok


def test_criterion_8_delayed_start(tmp_path, report):
    out = tmp_path / "delayed"
    code = main(["delayed", "--config", str(BENCHMARK), "--out", str(out), "--offsets", "0,5,10",
                 "--set", "schedule.days=0,1,2", "--set", "run.n_runs=5"])
    curves = (out / "delayed_curves.csv").read_text().splitlines()
    daily = (out / "delayed_daily.csv").read_text().splitlines()
    offsets = sorted({float(r.split(",")[0]) for r in curves[1:]})
    rows = [r.split(",") for r in daily[1:]]
    ok = code == 0 and offsets == [0.0, 5.0, 10.0] and len(rows) == 9
    first_day = {float(r[0]): float(r[2]) for r in rows if r[1] == "0"}
    report(8, ok, "day-one success by offset: " + ", ".join(f"{o:g} d -> {v:.3f}" for o, v in first_day.items()))
    assert ok


def test_criterion_9_determinism(tmp_path, report):
    args = ["simulate", "--config", str(BENCHMARK), "--set", "run.n_runs=2", "--seed", "99"]
    outs = [tmp_path / "a", tmp_path / "b", tmp_path / "c"]
    codes = [main(args + ["--out", str(outs[0])]), main(args + ["--out", str(outs[1])]),
             main(args + ["--out", str(outs[2]), "--jobs", "2"])]
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
    same = all((o / f).read_bytes() == (outs[0] / f).read_bytes() for o in outs[1:] for f in files)
    ok = codes == [0, 0, 0] and same and len(files) >= 5
    report(9, ok, f"{len(files)} output files byte-identical across two serial runs and --jobs 2")
    assert ok
