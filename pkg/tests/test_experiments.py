import json

import numpy as np
import pytest

from curvecast import (
    Grid,
    ProcessSpec,
    RunReport,
    ingest,
    load_numeric_csv,
    make_pm10_analog,
    run_benchmark,
    run_forecast_experiment,
    save_curves_csv,
    simulate,
)
from curvecast.experiments import THREADS_ENV, _rep_rng, _worker_count

SPEC_PAYLOAD = {
    "kind": "far",
    "D": 2,
    "sigma": [1.0, 0.7],
    "ar": [[[0.5, 0.0], [0.0, 0.4]]],
    "ma": {},
    "burn_in": 100,
}


def tiny_config(**extra):
    config = {
        "source": {"type": "process", "spec": SPEC_PAYLOAD},
        "n": 40,
        "grid_T": 32,
        "train": 36,
        "horizon": 1,
        "fit_mode": "fixed",
        "seed": 11,
        "reps": 2,
        "methods": [{"name": "fixed-var", "p": 1, "d": 2}],
    }
    config.update(extra)
    return config


def test_report_json_round_trip(tmp_path):
    report = run_forecast_experiment(tiny_config())
    path = tmp_path / "report.json"
    report.save(path)
    back = RunReport.from_json(path.read_text())
    assert back.command == "run_forecast_experiment"
    assert back.config == report.config
    assert back.replications == report.replications
    assert back.aggregates == report.aggregates
    assert back.frequencies == report.frequencies


def test_same_seed_reproduces_exactly():
    a = run_forecast_experiment(tiny_config())
    b = run_forecast_experiment(tiny_config())
    assert a.replications == b.replications
    assert a.aggregates == b.aggregates
    c = run_forecast_experiment(tiny_config(seed=12))
    assert c.replications != a.replications


def test_thread_pool_matches_serial(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    serial = run_forecast_experiment(tiny_config(reps=4))
    monkeypatch.setenv(THREADS_ENV, "4")
    threaded = run_forecast_experiment(tiny_config(reps=4))
    assert serial.replications == threaded.replications


def test_worker_count_parsing(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert _worker_count() == 1
    monkeypatch.setenv(THREADS_ENV, "4")
    assert _worker_count() == 4
    monkeypatch.setenv(THREADS_ENV, "soon")
    assert _worker_count() == 1
    monkeypatch.setenv(THREADS_ENV, "0")
    assert _worker_count() == 1


def test_replication_seed_streams():
    report = run_forecast_experiment(tiny_config())
    assert [rec["seed"] for rec in report.replications] == [[11, 0], [11, 1]]
    assert _rep_rng(3, 1).normal() == np.random.default_rng([3, 1]).normal()


def test_aggregates_match_pooled_records():
    report = run_forecast_experiment(tiny_config(reps=3))
    pooled = [e for rec in report.replications for e in rec["errors"]["fixed-var"]]
    assert len(pooled) == 3 * (40 - 36)
    agg = report.aggregates["fixed-var"]
    assert agg["mse"] == pytest.approx(float(np.mean(pooled)), rel=1e-12)
    assert agg["medse"] == pytest.approx(float(np.median(pooled)), rel=1e-12)
    assert agg["sd"] == pytest.approx(float(np.std(pooled, ddof=1)), rel=1e-12)


def test_selection_frequencies_count_every_replication():
    config = tiny_config(methods=[{"name": "ffpe-var", "p_max": 2, "d_max": 2}], reps=3)
    report = run_forecast_experiment(config)
    counts = report.frequencies["ffpe-var"]
    assert sum(counts.values()) == 3
    assert all("," in key for key in counts)
    assert "mean_criterion" in report.aggregates["ffpe-var"]


def test_config_validation():
    bad = tiny_config()
    del bad["seed"]
    with pytest.raises(ValueError, match="seed"):
        run_forecast_experiment(bad)
    with pytest.raises(ValueError, match="fit_mode"):
        run_forecast_experiment(tiny_config(fit_mode="both"))
    with pytest.raises(ValueError, match="reps"):
        run_forecast_experiment(tiny_config(reps=0))
    with pytest.raises(ValueError, match="unique"):
        run_forecast_experiment(
            tiny_config(methods=[{"name": "fixed-var", "p": 1, "d": 1}] * 2)
        )
    with pytest.raises(ValueError, match="method"):
        run_forecast_experiment(tiny_config(methods=[{"name": "oracle"}]))
    with pytest.raises(ValueError, match="source"):
        run_forecast_experiment(tiny_config(source={"type": "quantum"}))
    with pytest.raises(ValueError, match="train"):
        run_forecast_experiment(tiny_config(train=1))


def test_method_labels_allow_repeats_of_one_name():
    config = tiny_config(
        methods=[
            {"name": "fixed-var", "p": 1, "d": 1, "label": "small"},
            {"name": "fixed-var", "p": 1, "d": 2, "label": "big"},
        ]
    )
    report = run_forecast_experiment(config)
    assert set(report.aggregates) == {"small", "big"}


def test_horizon_guards():
    with pytest.raises(ValueError, match="one step"):
        run_forecast_experiment(
            tiny_config(horizon=2, methods=[{"name": "bosq", "d": 2}])
        )
    config = tiny_config(horizon=2, methods=[{"name": "fixed-var", "p": 1, "d": 2}])
    report = run_forecast_experiment(config)
    assert len(report.replications[0]["errors"]["fixed-var"]) == 4


def test_expanding_mode_refits_each_step():
    config = tiny_config(
        fit_mode="expanding",
        methods=[
            {"name": "fixed-var", "p": 1, "d": 2},
            {"name": "scalar", "p": 1, "d": 2},
            {"name": "bosq", "d": 2},
        ],
        reps=1,
    )
    report = run_forecast_experiment(config)
    rec = report.replications[0]
    for key in ("fixed-var", "scalar", "bosq"):
        errs = rec["errors"][key]
        assert len(errs) == 4 and all(np.isfinite(errs))


def test_fixed_and_expanding_agree_on_single_step():
    # with train = n - 1 there is one evaluation point and the fixed-fit
    # model sees exactly the data an expanding refit would use
    fixed = run_forecast_experiment(tiny_config(train=39, reps=1))
    expanding = run_forecast_experiment(
        tiny_config(train=39, reps=1, fit_mode="expanding")
    )
    a = fixed.replications[0]["errors"]["fixed-var"]
    b = expanding.replications[0]["errors"]["fixed-var"]
    assert a == pytest.approx(b, rel=1e-10)


def test_file_source_reproduces_process_run(tmp_path):
    process = run_forecast_experiment(tiny_config(reps=1, seed=5))
    spec = ProcessSpec.from_json(json.dumps(SPEC_PAYLOAD))
    data = simulate(spec, 40, Grid(32), np.random.default_rng([5, 0]))
    path = tmp_path / "curves.csv"
    save_curves_csv(data, path)
    file_run = run_forecast_experiment(
        tiny_config(source={"type": "file", "path": str(path)}, reps=1, seed=5)
    )
    assert file_run.replications[0]["errors"] == process.replications[0]["errors"]


def test_file_source_rejects_multiple_reps(tmp_path):
    data = simulate(
        ProcessSpec.from_json(json.dumps(SPEC_PAYLOAD)), 40, Grid(32),
        np.random.default_rng(0),
    )
    path = tmp_path / "curves.csv"
    save_curves_csv(data, path)
    with pytest.raises(ValueError, match="reps=1"):
        run_forecast_experiment(
            tiny_config(source={"type": "file", "path": str(path)}, reps=2)
        )


def test_pm10_analog_files(tmp_path):
    curves_path, cov_path = make_pm10_analog(tmp_path, n_days=42, seed=3)
    lines = open(curves_path).read().splitlines()
    assert len(lines) == 1 + 42
    assert lines[0].split(",")[0] == "weekday"
    assert lines[0].count(",") == 48
    labels = [line.split(",", 1)[0] for line in lines[1:8]]
    assert labels == ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
    data = ingest(curves_path, transform="sqrt", weekday_adjust="weekday")
    assert data.n == 42 and data.grid.T == 48
    assert np.all(np.isfinite(data.values))
    rmat = load_numeric_csv(cov_path)
    assert rmat.shape == (42, 2)


def test_pm10_analog_has_missing_cells(tmp_path):
    curves_path, _ = make_pm10_analog(tmp_path, n_days=60, seed=1, missing_rate=0.05)
    body = "".join(open(curves_path).read().splitlines()[1:])
    assert ",," in body


def test_benchmark_requires_known_preset_and_seed():
    with pytest.raises(ValueError, match="psi1-ratio"):
        run_benchmark("psi9-ratio", seed=0)
    with pytest.raises(ValueError, match="seed"):
        run_benchmark("psi1-ratio")


def test_ratio_preset_small():
    report = run_benchmark(
        "psi1-ratio", reps=2, seed=4, n=40, train=36, grid_T=32, p_max=2, d_max=2
    )
    assert report.command == "benchmark:psi1-ratio"
    ratio = report.aggregates["ratio"]
    assert set(ratio) == {"median", "frac_below_one"}
    assert 0.0 <= ratio["frac_below_one"] <= 1.0


def test_order_selection_preset_small():
    report = run_benchmark(
        "order-selection", reps=2, seed=4, n=60, D=5, grid_T=48, p_max=2, d_max=3
    )
    assert report.command == "benchmark:order-selection"
    assert sum(report.frequencies["ffpe-var"].values()) == 2
    assert report.aggregates == {}


def test_far2_table_preset_small():
    report = run_benchmark(
        "far2-table", reps=1, seed=4, n=60, D=5, grid_T=48, p_max=2, d_max=3,
        kappa=(0.4, 0.4),
    )
    assert {"ffpe-var", "bosq"} <= set(report.aggregates)
    assert report.aggregates["bosq"]["mse"] > 0.0


def test_fma_farma_preset_small():
    report = run_benchmark(
        "fma-farma", reps=2, seed=4, n=60, D=5, grid_T=48, p_max=3, d_max=3
    )
    comp = report.aggregates["comparison"]
    assert set(comp) == {"frac_ffpe_wins", "mean_selected_p"}
    with pytest.raises(ValueError, match="kind"):
        run_benchmark("fma-farma", reps=1, seed=4, kind="arma")


def test_equivalence_rate_preset_small():
    report = run_benchmark("equivalence-rate", reps=2, seed=4, ns=(30, 60), grid_T=48)
    medians = report.aggregates["median_gap"]
    assert list(medians) == ["30", "60"]
    assert all(v > 0.0 for v in medians.values())
    assert len(report.replications) == 4


def test_bands_coverage_preset_small():
    report = run_benchmark("bands-coverage", reps=2, seed=4, n=80, grid_T=48, L=40)
    assert 0.0 <= report.aggregates["coverage"] <= 1.0
    assert 0.0 <= report.aggregates["min_in_sample_coverage"] <= 1.0


def test_covariate_gain_preset_small():
    report = run_benchmark("covariate-gain", reps=2, seed=4, n=60, train=50, grid_T=32)
    assert 0.0 <= report.aggregates["frac_improved"] <= 1.0


def test_pm10_preset_single_replication(tmp_path):
    report = run_benchmark(
        "pm10-analog", seed=4, n_days=42, eval_days=5, out_dir=str(tmp_path),
        p_max=1, d_max=2,
    )
    assert report.config["synthetic_analog"] is True
    assert {"ffpe-var", "covariate"} <= set(report.aggregates)
    assert len(report.replications[0]["errors"]["covariate"]) == 5
    with pytest.raises(ValueError, match="single"):
        run_benchmark("pm10-analog", reps=2, seed=4)


def test_preset_reruns_are_identical():
    a = run_benchmark("order-selection", reps=2, seed=9, n=60, D=5, grid_T=48,
                      p_max=2, d_max=3)
    b = run_benchmark("order-selection", reps=2, seed=9, n=60, D=5, grid_T=48,
                      p_max=2, d_max=3)
    assert a.replications == b.replications
