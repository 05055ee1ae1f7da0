import logging

import numpy as np
import pytest

from qrc import experiments as ex
from qrc.errors import ConfigurationError, FormatError


@pytest.fixture(scope="module")
def small_data():
    return ex.synthetic_dataset(3, length=120, n_regressors=2)


def test_g3_cardinality():
    data = ex.synthetic_dataset(1)
    plan = ex.SweepPlan(families=("G3",), gate_counts=(150,), n_sims=3, qubit_counts=(7,))
    rows = ex.run_sweep(plan, data)
    assert len(rows) == 6
    assert sorted((r.sim, r.split) for r in rows) == [(s, sp) for s in range(3) for sp in ("test", "val")]
    for r in rows:
        assert 0 <= r.mda <= 1 and np.isfinite(r.mae_scaled) and np.isfinite(r.mae_unscaled)


def test_fixed_size_families_ignore_grid():
    plan = ex.SweepPlan(families=("D2", "D3", "DN", "ISING"), gate_counts=(10, 20), n_sims=1)
    counts = {it.family: it.gate_count for it in ex.work_items(plan)}
    assert counts == {"D2": 21, "D3": 35, "DN": 1, "ISING": 0}
    assert len(ex.work_items(plan)) == 4


def test_d2_row_records_fixed_count(small_data):
    plan = ex.SweepPlan(families=("D2",), gate_counts=(150,), n_sims=1, qubit_counts=(7,))
    rows = ex.run_sweep(plan, small_data)
    assert {r.gate_count for r in rows} == {21}


def test_seed_is_stable_under_grid_growth():
    a = ex.work_items(ex.SweepPlan(families=("G1",), gate_counts=(10,), n_sims=2))
    b = ex.work_items(ex.SweepPlan(families=("G2", "G1"), gate_counts=(5, 10), n_sims=3))
    seeds_b = {(it.family, it.gate_count, it.sim): it.seed for it in b}
    for it in a:
        assert seeds_b[(it.family, it.gate_count, it.sim)] == it.seed
    assert len({it.seed for it in b}) == len(b)


def test_rerun_identical_csv(tmp_path, small_data):
    plan = ex.SweepPlan(families=("G1", "MG", "ISING"), gate_counts=(15,), n_sims=2, qubit_counts=(3,))
    ex.run_sweep(plan, small_data, tmp_path / "a.csv")
    ex.run_sweep(plan, small_data, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    back = ex.read_results(tmp_path / "a.csv")
    assert back == ex.run_sweep(plan, small_data)


def test_serial_and_parallel_agree(small_data):
    plan = ex.SweepPlan(families=("G3", "D3"), gate_counts=(12,), n_sims=2, qubit_counts=(3, 4))
    serial = ex.run_sweep(plan, small_data, workers=1)
    parallel = ex.run_sweep(plan, small_data, workers=2)
    key = lambda r: (r.family, r.n_qubits, r.sim, r.split)
    assert sorted(serial, key=key) == sorted(parallel, key=key)


def test_infeasible_config_is_skipped(small_data, caplog):
    plan = ex.SweepPlan(families=("MG",), gate_counts=(5,), n_sims=1, qubit_counts=(1, 3))
    with caplog.at_level(logging.WARNING, logger="qrc"):
        rows = ex.run_sweep(plan, small_data)
    assert {r.n_qubits for r in rows} == {3}
    assert any("N=1" in rec.message for rec in caplog.records)


def test_regressor_scenario_needs_columns():
    data = ex.synthetic_dataset(0, length=80, n_regressors=0)
    plan = ex.SweepPlan(families=("G1",), gate_counts=(5,), n_sims=1, qubit_counts=(3,),
                        scenario="with_regressors")
    assert ex.run_sweep(plan, data) == []


def test_gamma_presets():
    assert ex.load_preset("paper-fig2").ridge_gamma == 1e-10
    assert ex.load_preset("paper-fig5").ridge_gamma == 0.1
    fig4 = ex.load_preset("paper-fig4")
    assert fig4.families == ("G3",) and fig4.gate_counts == (150,) and fig4.qubit_counts == tuple(range(2, 9))
    with pytest.raises(ConfigurationError):
        ex.load_preset("nope")


def _result(mda, sim=0, **kw):
    base = dict(family="G1", gate_count=10, n_qubits=7, sim=sim, seed=sim, scenario="no_regressors",
                split="test", mae_scaled=0.1, mae_unscaled=0.2, mda=mda)
    base.update(kw)
    return ex.ExperimentResult(**base)


def test_aggregate_statistics():
    (row,) = ex.aggregate([_result(0.4, 0), _result(0.6, 1)])
    assert row["mda_mean"] == pytest.approx(0.5)
    assert row["mda_std"] == pytest.approx(0.1414213562373095)
    assert row["mae_scaled_std"] == 0.0
    assert (row["family"], row["gate_count"], row["n_qubits"], row["split"]) == ("G1", 10, 7, "test")
    (single,) = ex.aggregate([_result(0.3)])
    assert single["mda_std"] == 0.0


def test_emit_plotdata(tmp_path):
    results = [_result(0.5, s, family="G3", gate_count=150, n_qubits=n) for n in range(2, 9) for s in range(2)]
    summary = ex.aggregate(results)
    counts = ex.ising_counts(100)
    ex.emit_plotdata(summary, tmp_path, counts)
    fig4 = (tmp_path / "fig4.csv").read_text().splitlines()
    assert [int(ln.split(",")[2]) for ln in fig4[1:]] == list(range(2, 9))
    fig3 = (tmp_path / "fig3.csv").read_text().splitlines()
    assert len(fig3) == 101
    fit = (tmp_path / "fig3_fit.csv").read_text().splitlines()
    assert fit[0] == "mu,sigma,mean"
    assert float(fit[1].split(",")[2]) == pytest.approx(np.mean([c for _, c in counts]))
    assert "fig2.csv" in (tmp_path / "README.md").read_text()


def test_emit_refuses_empty(tmp_path):
    with pytest.raises(ConfigurationError, match="empty"):
        ex.emit_plotdata([], tmp_path)


def test_lognormal_fit_matches_moments():
    rng = np.random.default_rng(0)
    counts = rng.lognormal(9.0, 0.2, 5000)
    mu, sigma = ex.lognormal_fit(counts)
    assert mu == pytest.approx(9.0, abs=0.02) and sigma == pytest.approx(0.2, abs=0.01)
    assert np.exp(mu + sigma**2 / 2) == pytest.approx(counts.mean(), rel=1e-12)


def test_parse_plan():
    plan = ex.parse_plan("""
        # qubit sweep
        preset = paper-fig4
        n_sims = 5
        qubit_counts = 2, 3
        gamma = 0.01
        fit_intercept = no
    """)
    assert plan.n_sims == 5 and plan.qubit_counts == (2, 3) and plan.families == ("G3",)
    assert plan.ridge_gamma == 0.01 and plan.fit_intercept is False


@pytest.mark.parametrize("text, err", [
    ("n_sims 3", FormatError),
    ("colour = red", FormatError),
    ("n_sims = many", FormatError),
    ("n_sims = 0", ConfigurationError),
    ("families = G9", ConfigurationError),
    ("scenario = both", ConfigurationError),
])
def test_parse_plan_errors(text, err):
    with pytest.raises(err):
        ex.parse_plan(text)


def test_no_skill_mda_constant_predictor(small_data):
    sp = small_data.split
    y = small_data.scaled
    mean = y[: sp.train_end].mean()
    hits = [np.sign(mean - y[t - 1]) == np.sign(y[t] - y[t - 1]) for t in range(sp.val_end, len(y))]
    assert ex.no_skill_mda(small_data) == pytest.approx(np.mean(hits))


def test_dataset_scaling(small_data):
    sp = small_data.split
    train = small_data.scaled[: sp.train_end]
    assert train.min() == 0.0 and train.max() == 1.0
    assert small_data.encoded.min() >= 0 and small_data.encoded.max() <= 1
    np.testing.assert_allclose(small_data.scaler.invert(small_data.scaled), small_data.series.values, atol=1e-12)
    assert small_data.regressors.shape == (120, 2)


def test_load_dataset_specs(tmp_path):
    with pytest.raises(ConfigurationError):
        ex.load_dataset("synthetic:x")
    p = tmp_path / "d.csv"
    start = np.datetime64("2019-01-07")
    lines = ["date,price"] + [f"{start + i},{1 + np.sin(i / 20):.4f}" for i in range(7 * 60)]
    p.write_text("\n".join(lines) + "\n")
    data = ex.load_dataset(str(p))
    assert len(data.series) == 60 and data.split == ex.dataio.split_paper_default(60)
