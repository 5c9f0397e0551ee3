"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (or ``python -m
tests.test_acceptance``); the verdict lines are written straight to the
terminal even when output capture is on.
"""

import itertools
import math
import sys

import numpy as np
import pytest

from codecselect import (
    Beta,
    BoundMethod,
    ConstraintSpace,
    GsConfig,
    Objective,
    PspConfig,
    SyntheticWorld,
    Uniform,
    batch_schedule,
    epsilon_finite_emd,
    epsilon_hoeffding,
    global_sampling,
    hoeffding_dominates,
    io,
    oracle_select,
    psp,
    sample_matrix,
)
from codecselect.cli import run_cli
from codecselect.gs import select
from codecselect.synth import binomial_tolerance, coverage_trial, evaluate_report, widths_monotone

from .worlds import random_constraints, random_objective, random_world, separated_point_problem

BOUNDED = (BoundMethod.FINITE_SAMPLE_EMD, BoundMethod.HOEFFDING_UNION)
ALL_METHODS = tuple(BoundMethod)


@pytest.fixture
def verdict(capsys):
    """Print one ``[PASS]``/``[FAIL]`` line per criterion, then assert."""

    def report(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return report


# -- 1, 2: closed-form widths -------------------------------------------------


def test_c1_finite_emd_width(verdict):
    width = 2 * epsilon_finite_emd(0.0, 16000, 2, 0.01)
    verdict(1, abs(width - 0.0821) <= 5e-4, f"finite-EMD width {width:.5f} (target 0.0821 +/- 0.0005)")


def test_c2_hoeffding_width(verdict):
    width = 2 * epsilon_hoeffding(16000, 13, 2, 0.01)
    verdict(2, 0.031 <= width <= 0.034, f"Hoeffding width {width:.5f} (target [0.031, 0.034])")


# -- 3: GS coverage for the bounded methods -----------------------------------


def test_c3_gs_coverage_bounded_methods(verdict):
    world = SyntheticWorld.from_grid([[Uniform(0, 1), Uniform(0, 1)] for _ in range(3)])
    obj = Objective.uniform(world.criterion_ids)
    rows, ok = [], True
    for method, delta in itertools.product(BOUNDED, (0.05, 0.2)):
        stats = coverage_trial(world, 400, GsConfig(delta, method, obj), trials=2000, seed=11)
        tol = binomial_tolerance(delta, 2000)
        good = stats.rejections == 0 and stats.failure_fraction <= tol
        ok &= good
        rows.append(f"{method.cli_name}@{delta}: {stats.failure_fraction:.4f}<={tol:.4f}")
    verdict(3, ok, "; ".join(rows))


# -- 4: GS properties over random worlds --------------------------------------


def test_c4_gs_random_worlds(verdict):
    rng = np.random.default_rng(2024)
    delta, trials = 0.1, 500
    clause_failures = 0
    structural = []
    for t in range(trials):
        world = random_world(rng)
        crits = list(world.criterion_ids)
        obj, W = random_objective(rng, crits), random_constraints(rng, crits)
        method = ALL_METHODS[rng.integers(len(ALL_METHODS))]
        cfg = GsConfig(delta, method, obj, W)
        matrix = sample_matrix(world, int(rng.integers(200, 1001)), int(rng.integers(2**31)))
        report = global_sampling(matrix, cfg)

        # structural invariants, recomputed independently from the rectangle
        sel = select(report.rectangle, obj, W)
        ids = np.array(world.codec_ids)
        certainly = set(ids[sel.feasible_conservative])
        possibly = set(ids[sel.feasible_liberal])
        if not set(report.conservative_set) <= certainly:
            structural.append((t, "conservative outside certainly-feasible"))
        if not set(report.liberal_set) <= possibly:
            structural.append((t, "liberal outside possibly-feasible"))
        iv = report.objective_interval
        for chosen, pool in ((report.liberal_set, possibly), (report.conservative_set, certainly)):
            if not pool:
                if chosen:
                    structural.append((t, "nonempty set with empty pool"))
                continue
            threshold = min(iv[h][1] for h in pool)
            if set(chosen) != {h for h in pool if iv[h][0] <= threshold}:
                structural.append((t, "threshold semantics"))

        clauses = evaluate_report(report, world, cfg, oracle_select(world, obj, W))
        clause_failures += int(
            clauses["liberal_empty"] or clauses["conservative_infeasible"] or clauses["sandwich"]
        )
    frac = clause_failures / trials
    tol = binomial_tolerance(delta, trials)
    ok = not structural and frac <= tol
    verdict(4, ok, f"structural violations {len(structural)}; clause failures {frac:.3f}<={tol:.3f}")


# -- 5: PSP properties ----------------------------------------------------------


def test_c5_psp_properties(verdict):
    n, sizes = batch_schedule(16000, 25)
    schedule_ok = n == 9 and sizes == [25 * 2**i for i in range(9)] and sizes[-1] == 6400

    rng = np.random.default_rng(77)
    delta, trials = 0.1, 300
    non_monotone = pruned = overspend = 0
    for _ in range(trials):
        world = random_world(rng)
        crits = list(world.criterion_ids)
        obj, W = random_objective(rng, crits), random_constraints(rng, crits)
        method = ALL_METHODS[rng.integers(len(ALL_METHODS))]
        s0 = int(rng.choice([10, 25, 50]))
        m = int(rng.integers(400, 4001))
        cfg = PspConfig(s0, 0.02, delta, method, obj, W)
        report = psp(sample_matrix(world, m, int(rng.integers(2**31))), cfg)
        n_max, sched = batch_schedule(m, s0)
        used = report.params["samples_used"]
        if used != sum(sched[: len(report.trace)]) or used > s0 * (2**n_max - 1):
            overspend += 1
        non_monotone += int(not widths_monotone(report))
        pruned += int(evaluate_report(report, world, cfg)["optimum_pruned"])
    tol = binomial_tolerance(delta, trials)
    ok = schedule_ok and non_monotone == 0 and overspend == 0 and pruned / trials <= tol
    verdict(
        5,
        ok,
        f"schedule(16000,25)={n}x{sizes[0]}..{sizes[-1]}; non-monotone {non_monotone}/{trials}; "
        f"budget overruns {overspend}; optimum pruned {pruned / trials:.3f}<={tol:.3f}",
    )


# -- 6: convergence ordering on a low-variance family --------------------------


def low_variance_world():
    """13 codecs, two criteria, std 0.1; the optimum leads by 0.08 on a 1/3-2/3 objective."""
    targets = [0.30] + list(np.linspace(0.38, 0.70, 12))
    quality = np.linspace(0.2, 0.7, 13)
    grid = []
    for v, p in zip(targets, quality):
        r = (3 * v - p) / 2
        grid.append([Beta.from_moments(float(p), 0.1), Beta.from_moments(float(r), 0.1)])
    ids = [f"v{k}" for k in range(13)]
    return SyntheticWorld.from_grid(grid, codec_ids=ids, criterion_ids=["peaq", "cr"], seed=5)


def test_c6_convergence_ordering(verdict):
    world = low_variance_world()
    obj = Objective({"peaq": 1 / 3, "cr": 2 / 3})
    widths = {m: [] for m in BoundMethod}
    for seed in range(5):
        matrix = sample_matrix(world, 16000, seed)
        for method in BoundMethod:
            rect = global_sampling(matrix, GsConfig(0.01, method, obj)).rectangle
            widths[method].append(float(np.mean(rect.widths)))
    mean_w = {m: float(np.mean(w)) for m, w in widths.items()}
    order = [
        BoundMethod.GAUSSIAN_CHERNOFF_UNION,
        BoundMethod.ASYMPTOTIC_EMD,
        BoundMethod.HOEFFDING_UNION,
        BoundMethod.FINITE_SAMPLE_EMD,
    ]
    ordered = all(mean_w[a] < mean_w[b] for a, b in zip(order, order[1:]))

    matrix = sample_matrix(world, 16000, 0)
    outcome = {}
    for method in BoundMethod:
        report = psp(matrix, PspConfig(25, 0.001, 0.01, method, obj))
        outcome[method] = (report.terminated_reason, len(report.trace), report.liberal_set)
    singleton = all(
        outcome[m][0] == "singleton" and outcome[m][1] <= 9 and outcome[m][2] == ("v0",)
        for m in (BoundMethod.GAUSSIAN_CHERNOFF_UNION, BoundMethod.ASYMPTOTIC_EMD)
    )
    finite_not = outcome[BoundMethod.FINITE_SAMPLE_EMD][0] != "singleton"
    detail = ", ".join(f"{m.cli_name}={mean_w[m]:.4f}" for m in order)
    detail += "; psp " + ", ".join(f"{m.cli_name}:{outcome[m][0]}@{outcome[m][1]}" for m in order)
    verdict(6, ordered and singleton and finite_not, detail)


# -- 7: oracle equivalence on well-separated point worlds -----------------------


def test_c7_oracle_equivalence(verdict):
    rng = np.random.default_rng(7)
    mismatches, trials = [], 0
    for t in range(60):
        world, obj, W = separated_point_problem(rng)
        star = tuple(sorted(oracle_select(world, obj, W).h_star))
        for method in ALL_METHODS:
            gs_report = global_sampling(sample_matrix(world, 2000, t), GsConfig(0.05, method, obj, W))
            psp_report = psp(sample_matrix(world, 8000, t), PspConfig(50, 0.05, 0.05, method, obj, W))
            for name, rep in (("gs", gs_report), ("psp", psp_report)):
                trials += 1
                if rep.liberal_set != star or rep.conservative_set != star:
                    mismatches.append((t, method.cli_name, name, rep.liberal_set, rep.conservative_set, star))
    verdict(7, not mismatches, f"{trials - len(mismatches)}/{trials} selections equal the oracle optimum")


# -- 8: dominance predicate ------------------------------------------------------


def test_c8_dominance_predicate(verdict):
    anchor = hoeffding_dominates(BoundMethod.FINITE_SAMPLE_EMD, 13, 0.01)
    contradictions, checked = [], 0
    for m, n_h, n_c, delta in itertools.product(
        [10, 50, 100, 1000, 16000, 10**6], [2, 13, 100, 10**4], [1, 2, 5], [0.001, 0.01, 0.1, 0.5]
    ):
        if hoeffding_dominates(BoundMethod.FINITE_SAMPLE_EMD, n_h, delta):
            checked += 1
            if not epsilon_finite_emd(0.0, m, n_c, delta) > epsilon_hoeffding(m, n_h, n_c, delta):
                contradictions.append((m, n_h, n_c, delta))
    verdict(8, anchor and checked > 0 and not contradictions,
            f"predicate(|H|=13, delta=0.01)={anchor}; {checked} grid points, {len(contradictions)} contradictions")


# -- 9: CLI determinism ----------------------------------------------------------


def test_c9_cli_determinism(verdict, tmp_path):
    world = low_variance_world()
    cfg_path = tmp_path / "world.cfg"
    cfg = io.world_to_config(world)
    cfg.update({"method": "asymptotic-emd", "delta": "0.01", "objective": "peaq:0.3333333333333333,cr:0.6666666666666666"})
    io.write_config(cfg, cfg_path)

    def run(tag):
        d = tmp_path / tag
        d.mkdir()
        codes = [
            run_cli(["synth-gen", "--config", str(cfg_path), "--m", "3000", "--seed", "9", "--out", str(d / "m.csv")]),
            run_cli(["select-gs", "--input", str(d / "m.csv"), "--method", "hoeffding", "--delta", "0.05",
                     "--constraint", "cr<=0.8", "--out", str(d / "gs.json")]),
            run_cli(["select-psp", "--config", str(cfg_path), "--m", "3000", "--seed", "9", "--s0", "25",
                     "--shuffle-seed", "4", "--out", str(d / "psp.json"), "--trace", str(d / "trace.csv")]),
            run_cli(["coverage", "--config", str(cfg_path), "--m", "400", "--trials", "10", "--seed", "3",
                     "--algorithm", "psp", "--out", str(d / "cov.json")]),
        ]
        return codes, {p.name: p.read_bytes() for p in sorted(d.iterdir())}

    codes_a, files_a = run("a")
    codes_b, files_b = run("b")
    same = codes_a == codes_b and files_a == files_b and len(files_a) == 5
    verdict(9, same and all(c in (0, 1) for c in codes_a),
            f"exit codes {codes_a}; {len(files_a)} artefacts byte-identical across runs: {files_a == files_b}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
