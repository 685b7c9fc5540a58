"""Batch experiment harness: seeded trials, sweeps, metrics and CSV/JSON output.

A run is fully determined by its config (including the master seed): per-trial
seeds are derived from the master seed with splitmix64 in a fixed order, each
trial generates its scenario and runs the requested policies, and rows are
sorted by (policy, seed) before emission.  Worker processes only change wall
time, never results or output bytes.

Outputs per run directory:

* ``metrics.csv``     -- one row per (policy, trial); deterministic bytes.
* ``summary.csv``     -- exact arithmetic means per (policy, sweep point).
* ``config_echo.json``-- the resolved config, for provenance; deterministic.

Wall-clock timings are kept on the in-memory rows and printed to stderr; they
are deliberately left out of the files so that identical configs produce
identical bytes.
"""

from __future__ import annotations

import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .assignment import BenefitMatrix, brute_force_assignment, pad_to_square, solve_max_assignment
from .channel import PathLossModel, RadioConfig, default_radio_config, rate_v2i
from .mobility import BasePosition, VehicleState
from .rng import Xoshiro256StarStar, split_seeds
from .scenario import ScenarioSpec, generate
from .scheduler import (
    build_service_tables,
    solve_irrs,
    solve_msrs,
    solve_noncooperative,
    solve_optimal_bruteforce,
    validate_schedule,
)
from .service import Period, QuadratureSpec, service_v2i

POLICIES = ("msrs", "irrs", "noncoop", "optimal")

DEFAULT_N_VALUES = tuple(range(20, 201, 20))
DEFAULT_SPEED_VALUES = tuple(float(s) for s in range(4, 45, 4))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; resolved from defaults, config file and CLI flags."""

    seed: int | None = None
    trials: int = 200
    policies: tuple[str, ...] = ("msrs", "irrs", "noncoop")
    n_vehicles: int = 100
    coverage_radius: float = 500.0
    bs_offset: float = 15.0
    lane_offsets: tuple[float, float] = (1.75, 5.25)
    speed_range: tuple[float, float] = (4.0, 35.0)
    period_start: float = 0.0
    period_duration: float = 5.0
    radio: RadioConfig = field(default_factory=default_radio_config)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    oracle_cap: int = 12
    search_mode: str = "exhaustive"
    workers: int = 1
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    speed_values: tuple[float, ...] = DEFAULT_SPEED_VALUES

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        unknown = [p for p in self.policies if p not in POLICIES]
        if unknown:
            raise ValueError(f"unknown policies {unknown}; choose from {POLICIES}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def scenario_spec(self, seed: int, n_vehicles: int | None = None,
                      speed_range: tuple[float, float] | None = None) -> ScenarioSpec:
        return ScenarioSpec(
            n_vehicles=self.n_vehicles if n_vehicles is None else n_vehicles,
            seed=seed,
            coverage_radius=self.coverage_radius,
            bs_offset=self.bs_offset,
            lane_offsets=self.lane_offsets,
            speed_range=self.speed_range if speed_range is None else speed_range,
            period_start=self.period_start,
            period_duration=self.period_duration,
        )


@dataclass(frozen=True)
class MetricsRow:
    """One policy's outcome on one trial scenario."""

    policy: str
    seed: int
    n_vehicles: int
    speed_range: tuple[float, float]
    total_service: float | None
    loss_ratio: float | None = None
    wall_time_ms: float = 0.0
    note: str = ""


def load_config_file(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config root must be an object")
    return doc


def _path_loss_from_doc(doc: dict, fallback: PathLossModel) -> PathLossModel:
    return PathLossModel(
        reference_loss=doc.get("reference_loss_db", fallback.reference_loss),
        slope=doc.get("slope_db_per_decade", fallback.slope),
        distance_divisor=doc.get("distance_divisor_m", fallback.distance_divisor),
        min_distance=doc.get("min_distance_m", fallback.min_distance),
    )


def config_from_doc(doc: dict, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from a parsed JSON document; `overrides` wins over the file."""
    scen = doc.get("scenario", {})
    radio_doc = doc.get("radio", {})
    quad_doc = doc.get("quadrature", {})
    run = doc.get("run", {})
    sweep = doc.get("sweep", {})

    base_radio = default_radio_config()
    if "p_bs_per_rb_dbm" in radio_doc:
        p_bs = radio_doc["p_bs_per_rb_dbm"]
    else:
        k_lte = radio_doc.get("k_lte", base_radio.k_lte)
        p_bs = radio_doc.get("p_bs_total_dbm", 52.0) - 10.0 * math.log10(k_lte)
    radio = RadioConfig(
        k_lte=radio_doc.get("k_lte", base_radio.k_lte),
        k_dsrc=radio_doc.get("k_dsrc", base_radio.k_dsrc),
        p_bs_per_rb=p_bs,
        p_vn_per_rb=radio_doc.get("p_vn_per_rb_dbm", base_radio.p_vn_per_rb),
        noise_v2i_per_rb=radio_doc.get("noise_v2i_per_rb_dbm", base_radio.noise_v2i_per_rb),
        noise_v2v_per_rb=radio_doc.get("noise_v2v_per_rb_dbm", base_radio.noise_v2v_per_rb),
        v2i_model=_path_loss_from_doc(radio_doc.get("v2i_path_loss", {}), base_radio.v2i_model),
        v2v_model=_path_loss_from_doc(radio_doc.get("v2v_path_loss", {}), base_radio.v2v_model),
    )
    quad = QuadratureSpec(
        initial_subintervals=quad_doc.get("initial_subintervals", 16),
        relative_tolerance=quad_doc.get("relative_tolerance", 1e-6),
        max_refinements=quad_doc.get("max_refinements", 12),
    )
    speed = scen.get("speed_range_mps", (4.0, 35.0))
    if isinstance(speed, (int, float)):
        speed = (float(speed), float(speed))
    cfg = ExperimentConfig(
        seed=run.get("seed"),
        trials=run.get("trials", 200),
        policies=tuple(run.get("policies", ("msrs", "irrs", "noncoop"))),
        n_vehicles=scen.get("n_vehicles", 100),
        coverage_radius=scen.get("coverage_radius_m", 500.0),
        bs_offset=scen.get("bs_offset_m", 15.0),
        lane_offsets=tuple(scen.get("lane_offsets_m", (1.75, 5.25))),
        speed_range=tuple(speed),
        period_start=doc.get("period", {}).get("t_start_s", 0.0),
        period_duration=doc.get("period", {}).get("duration_s", 5.0),
        radio=radio,
        quad=quad,
        oracle_cap=run.get("oracle_cap", 12),
        search_mode=run.get("search_mode", "exhaustive"),
        workers=run.get("workers", 1),
        n_values=tuple(sweep.get("n_values", DEFAULT_N_VALUES)),
        speed_values=tuple(sweep.get("speed_values", DEFAULT_SPEED_VALUES)),
    )
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _run_trial(args) -> list[MetricsRow]:
    """One seed, all requested policies.  Module-level so worker pools can pickle it."""
    config, seed, n_vehicles, speed_range = args
    spec = config.scenario_spec(seed, n_vehicles, speed_range)
    scenario = generate(spec)
    tables = build_service_tables(scenario, config.radio, quad=config.quad)
    schedules = {}
    timings = {}
    notes = {}
    for policy in config.policies:
        t0 = time.perf_counter()
        if policy == "msrs":
            schedules[policy] = solve_msrs(
                scenario, config.radio, quad=config.quad,
                search_mode=config.search_mode, tables=tables,
            )
        elif policy == "irrs":
            schedules[policy] = solve_irrs(scenario, config.radio, quad=config.quad, tables=tables)
        elif policy == "noncoop":
            schedules[policy] = solve_noncooperative(
                scenario, config.radio, quad=config.quad, tables=tables
            )
        elif policy == "optimal":
            if scenario.n > config.oracle_cap:
                schedules[policy] = None
                notes[policy] = f"refused: n_vehicles={scenario.n} exceeds oracle cap {config.oracle_cap}"
            else:
                schedules[policy] = solve_optimal_bruteforce(
                    scenario, config.radio, quad=config.quad,
                    cap=config.oracle_cap, tables=tables,
                )
        timings[policy] = 1000.0 * (time.perf_counter() - t0)

    opt = schedules.get("optimal")
    rows = []
    for policy in config.policies:
        sched = schedules[policy]
        if sched is None:
            rows.append(MetricsRow(policy, seed, scenario.n, spec.speed_range, None,
                                   None, timings[policy], notes.get(policy, "")))
            continue
        validate_schedule(sched, scenario.n)
        loss = None
        if opt is not None and opt.total_service > 0:
            loss = (opt.total_service - sched.total_service) / opt.total_service
        rows.append(MetricsRow(policy, seed, scenario.n, spec.speed_range,
                               sched.total_service, loss, timings[policy]))
    return rows


def _run_points(config: ExperimentConfig, points: list[tuple[int | None, tuple | None]]) -> list[MetricsRow]:
    """Run `config.trials` seeded trials at every (n_vehicles, speed_range) point."""
    if config.seed is None:
        raise ValueError("a master seed is required (wall-clock seeding is not supported)")
    seeds = split_seeds(config.seed, len(points) * config.trials)
    jobs = []
    for p, (n_vehicles, speed_range) in enumerate(points):
        for k in range(config.trials):
            jobs.append((config, seeds[p * config.trials + k], n_vehicles, speed_range))
    if config.workers == 1:
        results = [_run_trial(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_trial, jobs, chunksize=8))
    rows = [row for trial_rows in results for row in trial_rows]
    rows.sort(key=lambda r: (r.policy, r.seed))
    return rows


def cmd_run(config: ExperimentConfig) -> list[MetricsRow]:
    """Trials at the configured single (n_vehicles, speed) point."""
    return _run_points(config, [(None, None)])


def cmd_sweep_n(config: ExperimentConfig) -> list[MetricsRow]:
    """Trials at each fleet size in `config.n_values`."""
    return _run_points(config, [(n, None) for n in config.n_values])


def cmd_sweep_speed(config: ExperimentConfig) -> list[MetricsRow]:
    """Trials at each fixed speed in `config.speed_values`."""
    return _run_points(config, [(None, (s, s)) for s in config.speed_values])


def _fmt(x: float | None) -> str:
    return "" if x is None else format(float(x), ".12g")


CSV_HEADER = "policy,seed,n_vehicles,speed_min_mps,speed_max_mps,total_service,loss_ratio,note"


def rows_to_csv(rows: list[MetricsRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.policy,
                    str(r.seed),
                    str(r.n_vehicles),
                    _fmt(r.speed_range[0]),
                    _fmt(r.speed_range[1]),
                    _fmt(r.total_service),
                    _fmt(r.loss_ratio),
                    r.note,
                ]
            )
        )
    return "\n".join(lines) + "\n"


SUMMARY_HEADER = "policy,n_vehicles,speed_min_mps,speed_max_mps,trials,mean_total_service"


def summarize(rows: list[MetricsRow]) -> str:
    """Means per (policy, point); arithmetic means of the per-trial totals."""
    groups: dict[tuple, list[MetricsRow]] = {}
    for r in rows:
        if r.total_service is None:
            continue
        groups.setdefault((r.policy, r.n_vehicles, r.speed_range), []).append(r)
    lines = [SUMMARY_HEADER]
    for key in sorted(groups):
        policy, n_vehicles, speed_range = key
        members = sorted(groups[key], key=lambda r: r.seed)
        mean = sum(m.total_service for m in members) / len(members)
        lines.append(
            ",".join(
                [
                    policy,
                    str(n_vehicles),
                    _fmt(speed_range[0]),
                    _fmt(speed_range[1]),
                    str(len(members)),
                    _fmt(mean),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def config_echo(config: ExperimentConfig) -> str:
    from relaysched import __version__

    doc = asdict(config)
    doc["package_version"] = __version__
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_outputs(rows: list[MetricsRow], config: ExperimentConfig, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.csv").write_text(rows_to_csv(rows), encoding="utf-8")
    (out / "summary.csv").write_text(summarize(rows), encoding="utf-8")
    (out / "config_echo.json").write_text(config_echo(config), encoding="utf-8")
    by_policy: dict[str, list[float]] = {}
    for r in rows:
        by_policy.setdefault(r.policy, []).append(r.wall_time_ms)
    for policy, times in sorted(by_policy.items()):
        print(
            f"[timing] {policy}: mean {sum(times) / len(times):.2f} ms over {len(times)} trials",
            file=sys.stderr,
        )


# --- self-check suite (the `validate` subcommand) ---------------------------

_REFERENCE_BENEFITS = [
    [2, 3, 0, 1],
    [3, 2, 3, 6],
    [4, 0, 3, 0],
    [5, 2, 4, 6],
    [1, 0, 0, 2],
]
_REFERENCE_TOTAL = 17.0
_REFERENCE_MATCH = {0: 3, 1: 0, 2: 2, 3: 1}


def _check_reference_assignment() -> dict:
    padded = pad_to_square(BenefitMatrix(_REFERENCE_BENEFITS))
    got = solve_max_assignment(padded)
    ok = got.total == _REFERENCE_TOTAL and got.match == _REFERENCE_MATCH
    return {"name": "reference_assignment", "passed": bool(ok),
            "detail": f"total={got.total} match={got.match}"}


def _check_assignment_oracle(trials_per_size: int = 200) -> dict:
    gen = Xoshiro256StarStar(101)
    worst = 0.0
    for size in range(1, 8):
        for _ in range(trials_per_size):
            if gen.random() < 0.5:
                vals = [[float(int(gen.random() * 10)) for _ in range(size)] for _ in range(size)]
            else:
                vals = [[gen.random() * 10 for _ in range(size)] for _ in range(size)]
            w = BenefitMatrix(vals)
            fast = solve_max_assignment(w)
            slow = brute_force_assignment(w)
            worst = max(worst, abs(fast.total - slow.total) / max(1.0, slow.total))
    return {"name": "assignment_oracle", "passed": bool(worst <= 1e-9),
            "detail": f"worst relative total gap {worst:.3e}"}


def _check_scheduler_oracle(config: ExperimentConfig) -> dict:
    losses = []
    dominated = True
    for n in (6, 8):
        for seed in range(25):
            scenario = generate(config.scenario_spec(seed=seed, n_vehicles=n))
            tables = build_service_tables(scenario, config.radio, quad=config.quad)
            msrs = solve_msrs(scenario, config.radio, quad=config.quad, tables=tables)
            noncoop = solve_noncooperative(scenario, config.radio, quad=config.quad, tables=tables)
            opt = solve_optimal_bruteforce(scenario, config.radio, quad=config.quad, tables=tables)
            dominated &= opt.total_service >= msrs.total_service >= noncoop.total_service
            losses.append((opt.total_service - msrs.total_service) / opt.total_service)
    frac_ok = float(np.mean([loss <= 0.05 for loss in losses]))
    passed = dominated and frac_ok >= 0.95
    return {"name": "scheduler_vs_oracle", "passed": bool(passed),
            "detail": f"loss<=5% on {frac_ok:.0%} of instances; dominance={'ok' if dominated else 'VIOLATED'}"}


def _check_quadrature(config: ExperimentConfig) -> dict:
    bs = BasePosition(0.0, -15.0)
    period = Period(0.0, config.period_duration)
    worst_static = 0.0
    parked = VehicleState(0, 120.0, 1.75, 0.0, 0.0)
    s = service_v2i(parked, bs, config.radio, 10, period, config.quad)
    expected = period.duration * float(rate_v2i(parked, bs, config.radio, 10, 0.0))
    worst_static = abs(s - expected) / expected

    gen = Xoshiro256StarStar(77)
    worst_moving = 0.0
    for _ in range(20):
        v = VehicleState(0, gen.uniform(-400, 400), 1.75, gen.uniform(4, 35),
                         0.0 if gen.random() < 0.5 else math.pi)
        s = service_v2i(v, bs, config.radio, 10, period, config.quad)
        t = np.linspace(0.0, period.duration, 10_000)
        dense = np.trapezoid(rate_v2i(v, bs, config.radio, 10, t), t)
        worst_moving = max(worst_moving, abs(s - dense) / dense)
    passed = worst_static <= 1e-9 and worst_moving <= 1e-5
    return {"name": "quadrature", "passed": bool(passed),
            "detail": f"static rel err {worst_static:.2e}, moving vs trapezoid {worst_moving:.2e}"}


def cmd_validate(config: ExperimentConfig | None = None) -> dict:
    """Run the built-in correctness suite; returns a machine-readable report."""
    config = config or ExperimentConfig(seed=0, trials=1)
    checks = [
        _check_reference_assignment(),
        _check_assignment_oracle(),
        _check_scheduler_oracle(config),
        _check_quadrature(config),
    ]
    report = {"passed": all(c["passed"] for c in checks), "checks": checks}
    return report
