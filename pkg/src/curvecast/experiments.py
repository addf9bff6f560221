"""Replicated forecasting evaluations and canned benchmark studies.

A run draws replications with per-replication generators seeded from
(seed, index), evaluates one or more prediction methods out of sample
with a rolling origin, and collects everything into a serializable
report.  Canned presets reproduce the simulation studies used to vet
the pipeline.  Replications can run on a small thread pool capped by
the FTSP_THREADS environment variable; records are merged in index
order so reports do not depend on scheduling.
"""

import csv
import json
import os
import tempfile
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bands import prediction_band, rolling_residuals
from .curves import (
    FunctionalDataset,
    Grid,
    load_curves_csv,
    make_fourier_basis,
    synthesize,
)
from .forecast import (
    EIGENVALUE_RTOL,
    equivalence_gap,
    predict_fts,
    predict_with_covariates,
    bosq_predict,
    bosq_predict_state_space,
    scalar_predict,
)
from .fpca import eigensystem, pve_dimension, scores
from .ingest import ingest
from .multivar import fit_var_ols, fit_varx_ols, predict_var
from .selection import select_pd
from .simulate import ProcessSpec, fixed_psi, random_operator, sigma_scheme, simulate

THREADS_ENV = "FTSP_THREADS"


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _rep_rng(seed: int, idx: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(idx)])


def _run_replications(reps: int, worker):
    limit = _worker_count()
    if limit <= 1 or reps <= 1:
        return [worker(i) for i in range(reps)]
    with ThreadPoolExecutor(max_workers=min(limit, reps)) as pool:
        return list(pool.map(worker, range(reps)))


@dataclass
class RunReport:
    """Everything a replicated run produced, in JSON-stable form."""

    command: str
    config: dict
    replications: list
    aggregates: dict
    frequencies: dict
    wall_clock: float

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "replications": self.replications,
            "aggregates": self.aggregates,
            "frequencies": self.frequencies,
            "wall_clock": self.wall_clock,
        }
        return json.dumps(payload, sort_keys=True)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        raw = json.loads(text)
        return cls(
            command=raw["command"],
            config=raw["config"],
            replications=raw["replications"],
            aggregates=raw["aggregates"],
            frequencies=raw["frequencies"],
            wall_clock=raw["wall_clock"],
        )


def _slice(data: FunctionalDataset, upto: int) -> FunctionalDataset:
    return FunctionalDataset(grid=data.grid, values=data.values[:upto])


def _sq_err(data: FunctionalDataset, target: int, curve: np.ndarray) -> float:
    diff = data.values[target] - curve
    return float(diff @ diff) / data.T


def _resolve_train(train, n: int) -> int:
    m = round(train * n) if isinstance(train, float) and 0.0 < train < 1.0 else int(train)
    if not 2 <= m < n:
        raise ValueError(f"train size {m} must satisfy 2 <= m < n={n}")
    return m


# ---------------------------------------------------------------------------
# data sources


def _spec_from_payload(payload: dict) -> ProcessSpec:
    return ProcessSpec.from_json(json.dumps(payload))


def _scaled_family(rng, D, sig, kappas, theta_scales, burn_in):
    """Draw one unit-norm operator and scale it into AR and MA terms."""
    psi = random_operator(D, sig, rng)
    ar = tuple(float(k) * psi for k in kappas)
    ma = {lag: float(s) * psi for lag, s in theta_scales.items()}
    if ar and ma:
        kind = "farma"
    elif ar:
        kind = "far"
    else:
        kind = "fma"
    return ProcessSpec(kind=kind, D=D, sigma=sig, ar=ar, ma=ma, burn_in=burn_in)


def _source_factory(source: dict):
    """Return make(rng, n, grid) -> (dataset, covariate matrix or None)."""
    kind = source.get("type")
    burn_in = int(source.get("burn_in", 200))
    if kind == "process":
        spec = _spec_from_payload(source["spec"])

        def make(rng, n, grid):
            return simulate(spec, n, grid, rng), None

        return make
    if kind in ("kappa-far", "fma", "farma"):
        D = int(source.get("D", 21))
        sig = sigma_scheme(source.get("sigma_scheme", "s1"), D)
        if kind == "kappa-far":
            kappas = [float(k) for k in source["kappa"]]
            thetas = {}
        elif kind == "fma":
            kappas = []
            thetas = {2: float(source.get("theta_scale", 0.8))}
        else:
            kappas = [float(source.get("kappa", 0.1))]
            pair = source.get("theta_scales", [0.1, 0.9])
            thetas = {1: float(pair[0]), 2: float(pair[1])}

        def make(rng, n, grid):
            spec = _scaled_family(rng, D, sig, kappas, thetas, burn_in)
            return simulate(spec, n, grid, rng), None

        return make
    if kind == "covariate-far1":

        def make(rng, n, grid):
            coeffs, rmat = _coupled_far1_coeffs(n, rng, burn_in=burn_in)
            basis = make_fourier_basis(3, grid)
            return synthesize(coeffs, basis), rmat

        return make
    if kind == "file":
        data = load_curves_csv(source["path"])
        rmat = None
        if source.get("covariates_path"):
            rmat = load_numeric_csv(source["covariates_path"])

        def make(rng, n, grid):
            return data, rmat

        return make
    raise ValueError(f"unknown source type {kind!r}")


def _coupled_far1_coeffs(
    n: int,
    rng: np.random.Generator,
    psi=None,
    b=None,
    sigma_y=(1.0, 0.7, 0.5),
    rho: float = 0.5,
    sigma_r: float = 0.8,
    burn_in: int = 200,
):
    """First-order coefficient recursion driven by a 2-dim covariate.

    c_k = Psi c_{k-1} + B r_{k-1} + a_k with an AR(1) covariate, so the
    covariate carries real predictive signal at lag one.
    """
    psi = np.diag([0.6, 0.5, 0.4]) if psi is None else np.asarray(psi, dtype=float)
    b = (
        np.array([[0.9, 0.0], [0.0, 0.7], [0.35, 0.35]])
        if b is None
        else np.asarray(b, dtype=float)
    )
    sigma_y = np.asarray(sigma_y, dtype=float)
    D, r = b.shape
    steps = burn_in + n
    coeffs = np.zeros((steps + 1, D))
    rvals = np.zeros((steps + 1, r))
    for k in range(1, steps + 1):
        rvals[k] = rho * rvals[k - 1] + rng.normal(size=r) * sigma_r
        coeffs[k] = psi @ coeffs[k - 1] + b @ rvals[k - 1] + rng.normal(size=D) * sigma_y
    return coeffs[1 + burn_in :], rvals[1 + burn_in :]


def load_numeric_csv(path) -> np.ndarray:
    """Read a plain numeric matrix CSV, skipping one header row if present."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if rows and any(not _is_number(c) for c in rows[0]):
        rows = rows[1:]
    return np.array([[float(c) for c in row] for row in rows])


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# per-method evaluation


def _eval_method_fixed(data, rmat, m, h, method):
    """Fit once on the first m curves, then roll one prediction per step."""
    name = method["name"]
    n = data.n
    train = _slice(data, m)
    if name in ("ffpe-var", "fixed-var"):
        criterion = None
        if name == "ffpe-var":
            table = select_pd(train, method["p_max"], method["d_max"])
            p, d = table.best
            criterion = table.best_cell().value
        else:
            p, d = int(method["p"]), int(method["d"])
        eig = eigensystem(train, d)
        s_all = scores(data, eig).scores
        model = fit_var_ols(s_all[:m], p)
        errors = []
        for t in range(m, n):
            hist = s_all[max(0, t - h - max(p, 1) + 1) : t - h + 1]
            pred = predict_var(model, hist, h)
            errors.append(_sq_err(data, t, eig.mean + pred @ eig.eigenfunctions))
        return {"errors": errors, "selected": {"p": p, "d": d}, "criterion": criterion}
    if name == "scalar":
        p, d = int(method["p"]), int(method["d"])
        eig = eigensystem(train, d)
        s_all = scores(data, eig).scores
        models = [fit_var_ols(s_all[:m, j : j + 1], p) for j in range(d)]
        errors = []
        for t in range(m, n):
            pred = np.empty(d)
            for j, mod in enumerate(models):
                hist = s_all[max(0, t - h - max(p, 1) + 1) : t - h + 1, j : j + 1]
                pred[j] = predict_var(mod, hist, h)[0]
            errors.append(_sq_err(data, t, eig.mean + pred @ eig.eigenfunctions))
        return {"errors": errors, "selected": {"p": p, "d": d}, "criterion": None}
    if name == "bosq":
        if h != 1:
            raise ValueError("the first-order benchmark predicts one step only")
        p = int(method.get("p", 1))
        d = method.get("d")
        d = int(d) if d is not None else pve_dimension(train, float(method.get("pve", 0.8)))
        return _eval_bosq_fixed(data, m, p, d)
    if name == "covariate":
        if h != 1:
            raise ValueError("covariate prediction is defined for h = 1 only")
        if rmat is None:
            raise ValueError("source provides no covariates for the covariate method")
        criterion = None
        if "p_max" in method:
            table = select_pd(train, method["p_max"], method["d_max"], covariate_scores=rmat[:m])
            p, d = table.best
            criterion = table.best_cell().value
        else:
            p, d = int(method["p"]), int(method["d"])
        eig = eigensystem(train, d)
        s_all = scores(data, eig).scores
        model = fit_varx_ols(s_all[:m], rmat[:m], p)
        errors = []
        for t in range(m, n):
            hist = s_all[max(0, t - max(p, 1)) : t]
            pred = predict_var(model, hist, 1, covariate=rmat[t - 1])
            errors.append(_sq_err(data, t, eig.mean + pred @ eig.eigenfunctions))
        return {"errors": errors, "selected": {"p": p, "d": d}, "criterion": criterion}
    raise ValueError(f"unknown method {name!r}")


def _eval_bosq_fixed(data, m, p, d):
    n, T = data.n, data.T
    if p == 1:
        train = _slice(data, m)
        eig = eigensystem(train, d)
        lams = eig.eigenvalues
        if lams[-1] <= EIGENVALUE_RTOL * lams[0]:
            raise ValueError(f"benchmark dimension d={d} hits a negligible eigenvalue")
        s_all = scores(data, eig).scores
        s_tr = s_all[:m]
        op = (s_tr[1:].T @ s_tr[:-1] / (m - 1)) / lams[None, :]
        errors = []
        for t in range(m, n):
            pred = op @ s_all[t - 1]
            errors.append(_sq_err(data, t, eig.mean + pred @ eig.eigenfunctions))
        return {"errors": errors, "selected": {"p": 1, "d": d}, "criterion": None}
    big = Grid(p * T)
    stacked_train = FunctionalDataset(
        grid=big, values=np.hstack([data.values[p - 1 - j : m - j] for j in range(p)])
    )
    eig = eigensystem(stacked_train, d)
    lams = eig.eigenvalues
    if lams[-1] <= EIGENVALUE_RTOL * lams[0]:
        raise ValueError(f"benchmark dimension d={d} hits a negligible eigenvalue")
    s_tr = scores(stacked_train, eig).scores
    op = (s_tr[1:].T @ s_tr[:-1] / (s_tr.shape[0] - 1)) / lams[None, :]
    errors = []
    for t in range(m, n):
        x = np.concatenate([data.values[t - 1 - j] for j in range(p)])
        sc = (x - eig.mean) @ eig.eigenfunctions.T / (p * T)
        pred = op @ sc
        errors.append(_sq_err(data, t, (eig.mean + pred @ eig.eigenfunctions)[:T]))
    return {"errors": errors, "selected": {"p": p, "d": d}, "criterion": None}


def _eval_method_expanding(data, rmat, m, h, method):
    """Refit everything on all data before each evaluation index."""
    name = method["name"]
    n = data.n
    errors = []
    selected = None
    criterion = None
    for t in range(m, n):
        cut = t - h + 1
        sub = _slice(data, cut)
        if name == "ffpe-var":
            res = predict_fts(sub, h=h, p_max=method["p_max"], d_max=method["d_max"])
        elif name == "fixed-var":
            res = predict_fts(sub, h=h, p=int(method["p"]), d=int(method["d"]))
        elif name == "scalar":
            res = scalar_predict(sub, int(method["d"]), int(method["p"]), h=h)
        elif name == "bosq":
            if h != 1:
                raise ValueError("the first-order benchmark predicts one step only")
            p = int(method.get("p", 1))
            d = method.get("d")
            d = int(d) if d is not None else pve_dimension(sub, float(method.get("pve", 0.8)))
            res = bosq_predict(sub, d) if p == 1 else bosq_predict_state_space(sub, d, p)
        elif name == "covariate":
            if rmat is None:
                raise ValueError("source provides no covariates for the covariate method")
            kw = (
                {"p_max": method["p_max"], "d_max": method["d_max"]}
                if "p_max" in method
                else {"p": int(method["p"]), "d": int(method["d"])}
            )
            res = predict_with_covariates(sub, rmat[:cut], h=h, **kw)
        else:
            raise ValueError(f"unknown method {name!r}")
        selected = {"p": res.p, "d": res.d}
        errors.append(_sq_err(data, t, res.curve))
    return {"errors": errors, "selected": selected, "criterion": criterion}


def _method_key(method: dict) -> str:
    return method.get("label", method["name"])


def run_forecast_experiment(config: dict) -> RunReport:
    """Rolling-origin one-step (or h-step) evaluation over replications.

    config keys: source (see _source_factory), n, grid_T, train (count
    or fraction), horizon, fit_mode ('fixed' refits nothing after the
    training origin; 'expanding' refits on all prior data at each
    step), methods (list of method dicts), seed, reps.

    Returns
    -------
    RunReport
        Per-replication squared errors and selections keyed by method,
        with pooled aggregates and selection frequencies.
    """
    start = time.perf_counter()
    echo = json.loads(json.dumps(config, sort_keys=True))
    if "seed" not in config:
        raise ValueError("config must carry a seed")
    seed = int(config["seed"])
    reps = int(config.get("reps", 1))
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    h = int(config.get("horizon", 1))
    fit_mode = config.get("fit_mode", "fixed")
    if fit_mode not in ("fixed", "expanding"):
        raise ValueError(f"fit_mode must be 'fixed' or 'expanding', got {fit_mode!r}")
    methods = config["methods"]
    if not methods:
        raise ValueError("config needs at least one method")
    keys = [_method_key(mm) for mm in methods]
    if len(set(keys)) != len(keys):
        raise ValueError(f"method keys must be unique, got {keys}")
    make = _source_factory(config["source"])
    if config["source"].get("type") == "file" and reps != 1:
        raise ValueError("a file source is deterministic; use reps=1")
    grid = Grid(int(config.get("grid_T", 256)))
    evaluate = _eval_method_fixed if fit_mode == "fixed" else _eval_method_expanding

    n_cfg = config.get("n")

    def worker(idx):
        rng = _rep_rng(seed, idx)
        data, rmat = make(rng, None if n_cfg is None else int(n_cfg), grid)
        m = _resolve_train(config.get("train", 0.9), data.n)
        rec = {"idx": idx, "seed": [seed, idx], "errors": {}, "selected": {}}
        for meth in methods:
            out = evaluate(data, rmat, m, h, meth)
            key = _method_key(meth)
            rec["errors"][key] = out["errors"]
            rec["selected"][key] = out["selected"]
            if out.get("criterion") is not None:
                rec.setdefault("criterion", {})[key] = out["criterion"]
        return rec

    records = _run_replications(reps, worker)
    aggregates, frequencies = _aggregate(records, keys)
    return RunReport(
        command="run_forecast_experiment",
        config=echo,
        replications=records,
        aggregates=aggregates,
        frequencies=frequencies,
        wall_clock=time.perf_counter() - start,
    )


def _aggregate(records, keys):
    aggregates = {}
    frequencies = {}
    for key in keys:
        pooled = [e for rec in records for e in rec["errors"].get(key, [])]
        entry = {}
        if pooled:
            entry = {
                "mse": float(np.mean(pooled)),
                "medse": float(np.median(pooled)),
                "sd": float(np.std(pooled, ddof=1)) if len(pooled) > 1 else 0.0,
            }
        crits = [rec["criterion"][key] for rec in records if key in rec.get("criterion", {})]
        if crits:
            entry["mean_criterion"] = float(np.mean(crits))
        aggregates[key] = entry
        counts = Counter(
            f"{sel['p']},{sel['d']}"
            for rec in records
            for sel in [rec["selected"].get(key)]
            if sel is not None
        )
        if counts:
            frequencies[key] = dict(sorted(counts.items()))
    return aggregates, frequencies


# ---------------------------------------------------------------------------
# simulation-generate helper for raw ingestion demos

WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
WEEKDAY_OFFSETS = {
    "Mon": 0.22, "Tue": 0.18, "Wed": 0.15, "Thu": 0.12, "Fri": 0.10,
    "Sat": -0.32, "Sun": -0.45,
}


def make_pm10_analog(out_dir, n_days: int = 175, seed: int = 0, missing_rate: float = 0.01):
    """Write a synthetic pollutant-style raw CSV plus a covariate CSV.

    Half-hourly daily records (48 samples) on a squared scale with a
    weekday column, occasional missing cells, and a 2-column numeric
    covariate whose previous row drives the next day.  Purely synthetic;
    a stand-in for confidential monitoring data with a similar shape.

    Returns
    -------
    (curves_path, covariates_path)
    """
    rng = np.random.default_rng(seed)
    grid = Grid(48)
    basis = make_fourier_basis(3, grid)
    t = grid.points
    base = 3.0 + 0.8 * np.exp(-40.0 * (t - 0.33) ** 2) + 0.6 * np.exp(-55.0 * (t - 0.8) ** 2)
    coeffs, rmat = _coupled_far1_coeffs(
        n_days,
        rng,
        psi=np.diag([0.55, 0.45, 0.4]),
        b=np.array([[0.5, 0.0], [0.0, 0.35], [0.2, 0.2]]),
        sigma_y=(0.3, 0.2, 0.15),
        rho=0.5,
        sigma_r=0.6,
    )
    fluctuations = coeffs @ basis.values
    labels = [WEEKDAYS[k % 7] for k in range(n_days)]
    offsets = np.array([WEEKDAY_OFFSETS[lab] for lab in labels])
    sqrt_scale = np.maximum(base + offsets[:, None] + fluctuations, 0.05)
    raw = sqrt_scale**2
    mask = rng.random(raw.shape) < missing_rate
    curves_path = os.path.join(out_dir, "pm10_analog_raw.csv")
    with open(curves_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["weekday"] + [f"t_{i + 1}" for i in range(48)])
        for lab, row, hide in zip(labels, raw, mask):
            cells = ["" if h else repr(float(v)) for v, h in zip(row, hide)]
            writer.writerow([lab] + cells)
    covariates_path = os.path.join(out_dir, "pm10_analog_covariates.csv")
    with open(covariates_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_1", "x_2"])
        for row in rmat:
            writer.writerow([repr(float(v)) for v in row])
    return curves_path, covariates_path


# ---------------------------------------------------------------------------
# canned presets


def _finish_report(report: RunReport, name: str) -> RunReport:
    report.command = f"benchmark:{name}"
    return report


def _ratio_preset(name: str, psi_name: str):
    def build(reps=None, seed=None, n=200, train=180, grid_T=256, p_max=3, d_max=3,
              scalar_p=1, scalar_d=3):
        reps = 200 if reps is None else int(reps)
        payload = {
            "kind": "far",
            "D": 3,
            "sigma": [1.0, 1.0, 1.0],
            "ar": [fixed_psi(psi_name).tolist()],
            "ma": {},
            "burn_in": 200,
        }
        config = {
            "source": {"type": "process", "spec": payload},
            "n": n, "grid_T": grid_T, "train": train, "horizon": 1,
            "fit_mode": "fixed", "seed": seed, "reps": reps,
            "methods": [
                {"name": "ffpe-var", "p_max": p_max, "d_max": d_max},
                {"name": "scalar", "p": scalar_p, "d": scalar_d},
            ],
        }
        report = run_forecast_experiment(config)
        ratios = [
            float(np.mean(rec["errors"]["ffpe-var"]) / np.mean(rec["errors"]["scalar"]))
            for rec in report.replications
        ]
        report.aggregates["ratio"] = {
            "median": float(np.median(ratios)),
            "frac_below_one": float(np.mean([r < 1.0 for r in ratios])),
        }
        return _finish_report(report, name)

    return build


def _order_selection_preset(reps=None, seed=None, kappa=(0.8, 0.0), sigma="s1", n=200,
                            D=21, grid_T=256, p_max=3, d_max=10):
    reps = 100 if reps is None else int(reps)
    start = time.perf_counter()
    sig = sigma_scheme(sigma, D)
    grid = Grid(grid_T)

    def worker(idx):
        rng = _rep_rng(seed, idx)
        spec = _scaled_family(rng, D, sig, [float(k) for k in kappa], {}, 200)
        data = simulate(spec, n, grid, rng)
        table = select_pd(data, p_max, d_max)
        return {
            "idx": idx, "seed": [seed, idx], "errors": {},
            "selected": {"ffpe-var": {"p": table.p_best, "d": table.d_best}},
        }

    records = _run_replications(reps, worker)
    _, frequencies = _aggregate(records, ["ffpe-var"])
    config = {"kappa": list(kappa), "sigma": sigma, "n": n, "D": D, "grid_T": grid_T,
              "p_max": p_max, "d_max": d_max, "seed": seed, "reps": reps}
    return RunReport(
        command="benchmark:order-selection", config=config, replications=records,
        aggregates={}, frequencies=frequencies, wall_clock=time.perf_counter() - start,
    )


def _far2_table_preset(reps=None, seed=None, kappa=(0.8, 0.0), sigma="s1", n=1000,
                       D=21, grid_T=256, train=0.9, p_max=3, d_max=10,
                       bosq_p=1, bosq_pve=0.8):
    reps = 100 if reps is None else int(reps)
    config = {
        "source": {"type": "kappa-far", "kappa": list(kappa), "sigma_scheme": sigma, "D": D},
        "n": n, "grid_T": grid_T, "train": train, "horizon": 1,
        "fit_mode": "fixed", "seed": seed, "reps": reps,
        "methods": [
            {"name": "ffpe-var", "p_max": p_max, "d_max": d_max},
            {"name": "bosq", "p": bosq_p, "pve": bosq_pve},
        ],
    }
    return _finish_report(run_forecast_experiment(config), "far2-table")


def _fma_farma_preset(reps=None, seed=None, kind="farma", sigma="s1", n=1000, D=21,
                      grid_T=256, train=0.9, p_max=10, d_max=10, bosq_p=1, bosq_pve=0.8):
    reps = 50 if reps is None else int(reps)
    if kind == "farma":
        source = {"type": "farma", "kappa": 0.1, "theta_scales": [0.1, 0.9],
                  "sigma_scheme": sigma, "D": D}
    elif kind == "fma":
        source = {"type": "fma", "theta_scale": 0.8, "sigma_scheme": sigma, "D": D}
    else:
        raise ValueError(f"kind must be 'fma' or 'farma', got {kind!r}")
    config = {
        "source": source, "n": n, "grid_T": grid_T, "train": train, "horizon": 1,
        "fit_mode": "fixed", "seed": seed, "reps": reps,
        "methods": [
            {"name": "ffpe-var", "p_max": p_max, "d_max": d_max},
            {"name": "bosq", "p": bosq_p, "pve": bosq_pve},
        ],
    }
    report = run_forecast_experiment(config)
    wins = [
        float(np.mean(rec["errors"]["ffpe-var"]) < np.mean(rec["errors"]["bosq"]))
        for rec in report.replications
    ]
    orders = [rec["selected"]["ffpe-var"]["p"] for rec in report.replications]
    report.aggregates["comparison"] = {
        "frac_ffpe_wins": float(np.mean(wins)),
        "mean_selected_p": float(np.mean(orders)),
    }
    return _finish_report(report, "fma-farma")


def _equivalence_rate_preset(reps=None, seed=None, ns=(100, 200, 400, 800), d=3, grid_T=256):
    reps = 100 if reps is None else int(reps)
    start = time.perf_counter()
    grid = Grid(grid_T)
    spec = ProcessSpec(
        kind="far", D=3, sigma=np.ones(3), ar=(fixed_psi("psi1"),), burn_in=200
    )
    ns = [int(v) for v in ns]

    def worker(idx):
        rng = _rep_rng(seed, idx)
        n = ns[idx // reps]
        data = simulate(spec, n, grid, rng)
        gap = equivalence_gap(data, d).gap
        return {"idx": idx, "seed": [seed, idx], "n": n, "errors": {"gap": [gap]},
                "selected": {}}

    records = _run_replications(reps * len(ns), worker)
    medians = {}
    for j, n in enumerate(ns):
        gaps = [rec["errors"]["gap"][0] for rec in records[j * reps : (j + 1) * reps]]
        medians[str(n)] = float(np.median(gaps))
    config = {"ns": ns, "d": d, "grid_T": grid_T, "seed": seed, "reps": reps}
    return RunReport(
        command="benchmark:equivalence-rate", config=config, replications=records,
        aggregates={"median_gap": medians}, frequencies={},
        wall_clock=time.perf_counter() - start,
    )


def _bands_coverage_preset(reps=None, seed=None, n=400, alpha=0.8, p=1, d=3,
                           L=None, grid_T=256):
    reps = 100 if reps is None else int(reps)
    start = time.perf_counter()
    grid = Grid(grid_T)
    spec = ProcessSpec(
        kind="far", D=3, sigma=np.ones(3), ar=(fixed_psi("psi1"),), burn_in=200
    )

    def worker(idx):
        rng = _rep_rng(seed, idx)
        full = simulate(spec, n + 1, grid, rng)
        fit = _slice(full, n)
        resid = rolling_residuals(fit, d, p, L)
        band = prediction_band(resid, alpha)
        fc = predict_fts(fit, p=p, d=d)
        covered = band.contains(fc.curve, full.values[n])
        zeros = np.zeros(grid.T)
        inside = [band.contains(zeros, row) for row in resid.values]
        return {
            "idx": idx, "seed": [seed, idx],
            "errors": {"bands": [float(covered)]},
            "selected": {},
            "in_sample_coverage": float(np.mean(inside)),
        }

    records = _run_replications(reps, worker)
    coverage = float(np.mean([rec["errors"]["bands"][0] for rec in records]))
    in_sample = float(min(rec["in_sample_coverage"] for rec in records))
    config = {"n": n, "alpha": alpha, "p": p, "d": d, "L": L, "grid_T": grid_T,
              "seed": seed, "reps": reps}
    return RunReport(
        command="benchmark:bands-coverage", config=config, replications=records,
        aggregates={"coverage": coverage, "min_in_sample_coverage": in_sample},
        frequencies={}, wall_clock=time.perf_counter() - start,
    )


def _covariate_gain_preset(reps=None, seed=None, n=300, train=250, grid_T=64, p=1, d=3):
    reps = 50 if reps is None else int(reps)
    config = {
        "source": {"type": "covariate-far1"},
        "n": n, "grid_T": grid_T, "train": train, "horizon": 1,
        "fit_mode": "fixed", "seed": seed, "reps": reps,
        "methods": [
            {"name": "fixed-var", "p": p, "d": d},
            {"name": "covariate", "p": p, "d": d},
        ],
    }
    report = run_forecast_experiment(config)
    gains = [
        float(np.mean(rec["errors"]["covariate"]) <= np.mean(rec["errors"]["fixed-var"]))
        for rec in report.replications
    ]
    report.aggregates["frac_improved"] = float(np.mean(gains))
    return _finish_report(report, "covariate-gain")


def _pm10_analog_preset(reps=None, seed=None, n_days=175, eval_days=20, out_dir=None,
                        p_max=2, d_max=4):
    if reps not in (None, 1):
        raise ValueError("the ingestion demo runs a single replication")
    start = time.perf_counter()
    workdir = out_dir or tempfile.mkdtemp(prefix="pm10_analog_")
    curves_path, cov_path = make_pm10_analog(workdir, n_days=n_days, seed=seed)
    data = ingest(curves_path, transform="sqrt", weekday_adjust="weekday")
    rmat = load_numeric_csv(cov_path)
    m = data.n - int(eval_days)
    rec = {"idx": 0, "seed": [seed, 0], "errors": {}, "selected": {}}
    for meth in (
        {"name": "ffpe-var", "p_max": p_max, "d_max": d_max},
        {"name": "covariate", "p_max": p_max, "d_max": d_max},
    ):
        out = _eval_method_fixed(data, rmat, m, 1, meth)
        rec["errors"][meth["name"]] = out["errors"]
        rec["selected"][meth["name"]] = out["selected"]
    aggregates, frequencies = _aggregate([rec], ["ffpe-var", "covariate"])
    config = {"synthetic_analog": True, "n_days": n_days, "eval_days": eval_days,
              "p_max": p_max, "d_max": d_max, "seed": seed, "reps": 1,
              "curves_csv": curves_path, "covariates_csv": cov_path}
    return RunReport(
        command="benchmark:pm10-analog", config=config, replications=[rec],
        aggregates=aggregates, frequencies=frequencies,
        wall_clock=time.perf_counter() - start,
    )


PRESETS = {
    "psi1-ratio": _ratio_preset("psi1-ratio", "psi1"),
    "psi2-ratio": _ratio_preset("psi2-ratio", "psi2"),
    "order-selection": _order_selection_preset,
    "far2-table": _far2_table_preset,
    "fma-farma": _fma_farma_preset,
    "equivalence-rate": _equivalence_rate_preset,
    "bands-coverage": _bands_coverage_preset,
    "covariate-gain": _covariate_gain_preset,
    "pm10-analog": _pm10_analog_preset,
}


def run_benchmark(preset: str, reps: int = None, seed: int = None, **overrides) -> RunReport:
    """Run one of the canned studies; seed is mandatory."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    if seed is None:
        raise ValueError("seed is required for benchmark runs")
    return PRESETS[preset](reps=reps, seed=int(seed), **overrides)
