import csv
import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from dfwlearn.distributed import partition_atoms
from dfwlearn.fw import SolverConfig, solve_fw
from dfwlearn.harness import cli
from dfwlearn.harness.baselines import (baseline_local_fw, baseline_random,
                                        compare_at_matched_cost, objective_at_cost,
                                        transfer_cost)
from dfwlearn.harness.data import (DataFormatError, SynthLassoParams, lasso_penalized,
                                   load_libsvm, project_l1_ball, synth_lasso, write_libsvm)
from dfwlearn.harness.experiment import ConfigError, ExperimentConfig, run, run_experiment
from dfwlearn.netsim import build_topology, parse_topology
from dfwlearn.objectives import AtomMatrix, L1Ball, Lasso

from conftest import make_lasso


# ------------------------------------------------------------------ data

def test_load_libsvm_line(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("+1 1:0.5 3:1.0\n")
    atoms, labels = load_libsvm(f)
    assert labels.tolist() == [1.0]
    idx, val = atoms.column_sparse(0) if atoms.is_sparse else (None, None)
    np.testing.assert_allclose(atoms.column(0), [0.5, 0.0, 1.0])


@pytest.mark.parametrize("text, msg", [
    ("", "no examples"),
    ("1 2:1 1:3\n", "line 1"),
    ("1 1:1\n-1 1:x\n", "line 2"),
    ("abc 1:1\n", "line 1"),
    ("1 0:1\n", "line 1"),
    ("1 11\n", "line 1"),
])
def test_load_libsvm_errors(tmp_path, text, msg):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    with pytest.raises(DataFormatError, match=msg):
        load_libsvm(f)


def test_load_libsvm_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_libsvm(tmp_path / "nope.txt")


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 10_000), st.booleans())
def test_libsvm_round_trip(d, n, seed, transpose):
    import tempfile
    from pathlib import Path
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, n)) * (rng.random((d, n)) < 0.4)
    labels = rng.standard_normal(d if transpose else n)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "rt.txt"
        write_libsvm(path, AtomMatrix(A), labels, transpose=transpose)
        n_feat = n if transpose else d
        back, lab = load_libsvm(path, transpose=transpose, n_features=n_feat)
    np.testing.assert_array_equal(back.toarray(), A)
    np.testing.assert_array_equal(lab, labels)


def test_synth_lasso_dense_tiny():
    inst = synth_lasso(SynthLassoParams(3, 3, 1.0, 1.0, seed=4))
    assert np.count_nonzero(inst.atoms.toarray()) == 9
    assert np.count_nonzero(inst.alpha_true) == 3


def test_synth_lasso_counts_and_determinism():
    p = SynthLassoParams(20, 50, 0.1, 1 / 50, seed=2)
    a, b = synth_lasso(p), synth_lasso(p)
    assert np.count_nonzero(a.alpha_true) == 1
    assert a.atoms.nnz == 100
    np.testing.assert_array_equal(a.y, b.y)
    assert a.beta == b.beta > 0
    assert a.lambda_max == pytest.approx(np.max(np.abs(a.atoms.rmatvec(a.y))))
    for bad in (0.0, 1.5):
        with pytest.raises(ValueError):
            SynthLassoParams(5, 5, bad)


@pytest.mark.parametrize("d, n, s_a, s_alpha, seed, converges", [
    (40, 20, 0.5, 0.1, 0, True),
    (30, 60, 0.3, 0.05, 1, False),
])
def test_synth_suggested_beta_recovers_projected_truth(d, n, s_a, s_alpha, seed, converges):
    inst = synth_lasso(SynthLassoParams(d, n, s_a, s_alpha, seed=seed))
    obj = Lasso(inst.atoms, inst.y)
    tr = solve_fw(obj, L1Ball(inst.beta), SolverConfig(1e-4, 5000, "linesearch"))
    ref = obj.value(project_l1_ball(inst.alpha_true, inst.beta))
    # plain FW is sublinear, so the larger instance is checked at the iteration cap
    assert tr.converged is converges
    assert tr.final_objective <= 1.1 * ref


def test_penalized_solver_and_projection():
    rng = np.random.default_rng(0)
    A = AtomMatrix(rng.standard_normal((15, 8)))
    y = rng.standard_normal(15)
    lam = 0.5
    x = lasso_penalized(A, y, lam)
    # optimality: |A^T(y - A x)| <= lam, with equality on the support
    corr = A.rmatvec(y - A.matvec(x))
    assert np.all(np.abs(corr) <= lam + 1e-6)
    np.testing.assert_allclose(corr[x != 0], lam * np.sign(x[x != 0]), atol=1e-6)
    v = np.array([3.0, -1.0, 0.5])
    p = project_l1_ball(v, 2.0)
    assert np.abs(p).sum() == pytest.approx(2.0)
    np.testing.assert_allclose(p, [2.0, 0.0, 0.0])
    np.testing.assert_array_equal(project_l1_ball(v, 10.0), v)


# ------------------------------------------------------------------ baselines

def test_baseline_all_atoms_recovers_full_optimum():
    obj = make_lasso(24, 10, seed=1)
    dom = L1Ball(1.0)
    topo = parse_topology("full:3")
    parts = partition_atoms(24, 3, seed=0)
    cfg = SolverConfig(1e-9, 5000, "linesearch")
    full = solve_fw(obj, dom, cfg).final_objective
    assert baseline_random(obj, dom, parts, topo, 8, 0, cfg).objective == pytest.approx(
        full, abs=1e-7)
    assert baseline_local_fw(obj, dom, parts, topo, 8, cfg).objective <= full + 1e-2


def test_random_baseline_misses_needed_atom():
    # only atom 5 explains y; each node ships one random atom
    A = np.eye(6)
    y = np.zeros(6)
    y[5] = 1.0
    obj = Lasso(AtomMatrix(A), y)
    parts = [np.array([0, 1, 2]), np.array([3, 4, 5])]
    topo = build_topology("full", 2)
    seed = next(s for s in range(50) if 5 not in baseline_random(
        obj, L1Ball(1.0), parts, topo, 1, s).atoms)
    pt = baseline_random(obj, L1Ball(1.0), parts, topo, 1, seed)
    assert pt.objective > 0.5
    assert baseline_local_fw(obj, L1Ball(1.0), parts, topo, 1).objective < 1e-6


def test_baseline_determinism_and_cost():
    obj = make_lasso(40, 6, seed=2)
    topo = parse_topology("tree:2:5")
    parts = partition_atoms(40, 5, seed=1)
    a = baseline_random(obj, L1Ball(1.0), parts, topo, 3, seed=9)
    b = baseline_random(obj, L1Ball(1.0), parts, topo, 3, seed=9)
    assert a.objective == b.objective and np.array_equal(a.atoms, b.atoms)
    hops = sum(topo.hops_to_root(i) for i in range(5))
    assert a.cost == 3 * 6 * hops == transfer_cost(topo, [[0] * 3] * 5, 6)
    with pytest.raises(ValueError):
        baseline_random(obj, L1Ball(1.0), parts, topo, 100)


def test_local_fw_single_node_is_truncated_centralized():
    obj = make_lasso(30, 8, seed=3)
    dom = L1Ball(1.0)
    topo = build_topology("full", 1)
    pt = baseline_local_fw(obj, dom, [np.arange(30)], topo, 4)
    ref = solve_fw(obj, dom, SolverConfig(1e-300, 4, "linesearch"))
    assert sorted(pt.atoms) == sorted(set(ref.steps))
    assert pt.cost == 0


def test_objective_at_cost_uses_paid_rounds():
    from dfwlearn.fw import RunTrace, TraceRecord
    recs = [TraceRecord(0, 0, 0, 1.0, 5.0, 1.0, cum_reals=10),
            TraceRecord(1, 0, 0, 0.5, 3.0, 1.0, cum_reals=20),
            TraceRecord(2, 0, 0, 0.0, 2.0, 0.1, cum_reals=24)]
    tr = RunTrace(recs)
    assert objective_at_cost(tr, 5) == 5.0
    assert objective_at_cost(tr, 10) == 3.0
    assert objective_at_cost(tr, 19) == 3.0
    assert objective_at_cost(tr, 20) == 2.0
    from dfwlearn.harness.baselines import BaselinePoint
    assert compare_at_matched_cost(tr, [BaselinePoint(1, 10, 4.0, np.zeros(0))]) == [
        (10, 3.0, 4.0)]


# ------------------------------------------------------------------ experiment

def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_quadratic_experiment_summary(tmp_path):
    cfg = ExperimentConfig(mode="centralized", objective="quadratic", d=10, simplex=True,
                           epsilon=1e-6)
    res = run_experiment(cfg, tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert abs(summary["final_objective"] - 0.1) <= 1e-6
    assert summary["converged"] and summary["total_communication"] == 0
    assert {"final_gap", "rounds", "total_communication"} <= set(summary)
    rows = _read_csv(tmp_path / "trace.csv")
    assert list(rows[0]) == ["iter", "selected_atom", "owner_node", "objective", "gap",
                             "cum_reals", "wallclock_ns"]
    assert len(rows) == res.summary["rounds"] + 1


def test_dfw_and_centralized_csv_agree(tmp_path):
    base = dict(objective="lasso", d=30, n=90, topology="tree:2:5", epsilon=1e-4,
                max_iter=200, seed=3)
    run_experiment(ExperimentConfig(mode="centralized", **base), tmp_path / "c")
    run_experiment(ExperimentConfig(mode="dfw", **base), tmp_path / "d")
    c, d = _read_csv(tmp_path / "c/trace.csv"), _read_csv(tmp_path / "d/trace.csv")
    assert len(c) == len(d)
    for rc, rd in zip(c, d):
        for col in ("iter", "selected_atom", "owner_node"):
            assert rc[col] == rd[col]
        for col in ("objective", "gap"):
            assert float(rc[col]) == pytest.approx(float(rd[col]), abs=1e-9)
    cum = [int(r["cum_reals"]) for r in d]
    assert cum == sorted(cum)
    summary = json.loads((tmp_path / "d/summary.json").read_text())
    assert summary["total_communication"] == cum[-1]


def test_drop_adds_node_columns(tmp_path):
    cfg = ExperimentConfig(mode="dfw", objective="quadratic", d=10, simplex=True,
                           topology="full:5", drop=0.4, max_iter=50)
    run_experiment(cfg, tmp_path)
    rows = _read_csv(tmp_path / "trace.csv")
    assert [c for c in rows[0] if c.startswith("node")] == [f"node{i}_objective"
                                                             for i in range(5)]


def test_runs_are_reproducible():
    cfg = ExperimentConfig(mode="approx", d=20, n=60, topology="general:4:2", centers="fixed:3",
                           max_iter=50)
    a, b = run(cfg), run(cfg)
    assert a.trace.atoms == b.trace.atoms and list(a.trace.objectives) == list(
        b.trace.objectives)


@pytest.mark.parametrize("bad", [
    {"mode": "gradient-descent"}, {"epsilon": -1}, {"seed": "x"}, {"topology": "ring:3"},
    {"drop": 1.0}, {"partition": "weird"}, {"m": "0"}, {"unknown_key": 1},
    {"mode": "centralized", "drop": 0.2}, {"epsilon": "small"},
])
def test_config_schema_errors(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(bad)


def test_config_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"objective": "quadratic", "d": 4, "simplex": True}))
    assert ExperimentConfig.from_file(p).d == 4
    p.write_text(json.dumps({"nested": {"a": 1}}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(p)
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(p)


# ------------------------------------------------------------------ cli

def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["solve", "--objective", "quadratic", "--d", "10", "--simplex",
                     "--epsilon", "1e-6", "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["dfw", "--objective", "quadratic", "--d", "10", "--simplex",
                     "--max-iter", "2", "--epsilon", "1e-9"]) == 1
    assert cli.main(["dfw", "--topology", "ring:3"]) == 2
    assert cli.main(["dfw", "--data", str(tmp_path / "missing.txt"), "--beta", "1"]) == 2
    bad = tmp_path / "nan.txt"
    bad.write_text("nan 1:1\n1 1:2\n")
    assert cli.main(["dfw", "--data", str(bad), "--transpose", "--beta", "1",
                     "--topology", "full:1"]) == 3


def test_cli_config_file_and_flag_override(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"objective": "quadratic", "d": 6, "simplex": True,
                             "epsilon": 1e-8, "topology": "star:3"}))
    out = tmp_path / "o"
    assert cli.main(["dfw", "--config", str(p), "--topology", "full:3", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["topology"] == "full:3" and summary["config"]["d"] == 6


def test_cli_synth_then_dfw_and_baseline(tmp_path):
    assert cli.main(["synth", "--d", "20", "--n", "40", "--density-alpha", "0.1",
                     "--out", str(tmp_path / "s")]) == 0
    info = json.loads((tmp_path / "s/summary.json").read_text())
    data = str(tmp_path / "s/data.libsvm")
    assert cli.main(["dfw", "--data", data, "--transpose", "--beta",
                     str(info["suggested_beta"]), "--topology", "tree:2:3",
                     "--max-iter", "3000", "--epsilon", "1e-3"]) == 0
    out = tmp_path / "b"
    assert cli.main(["baseline", "--kind", "localfw", "--m", "1,2", "--data", data,
                     "--transpose", "--beta", "1", "--topology", "star:3",
                     "--out", str(out)]) == 0
    rows = _read_csv(out / "curve.csv")
    assert [int(r["m"]) for r in rows] == [1, 2]


def test_cli_approx_centers(tmp_path):
    for spec in ("fixed:2", "fixed:auto-balance", "linear:1"):
        assert cli.main(["approx", "--d", "10", "--n", "40", "--beta", "1", "--centers", spec,
                         "--topology", "full:3", "--max-iter", "30"]) in (0, 1)
    assert cli.main(["approx", "--centers", "bogus"]) == 2
