"""Experiment harness: run a configuration, persist telemetry and metrics, compare runs.

Each run writes three files into ``<output_dir>/<name>/``:

* ``telemetry.csv``: one row per control tick, fixed column order
* ``metrics.txt``: flat ``key = value`` summary (same dialect as configs)
* ``config.txt``: the fully resolved configuration, reloadable as-is

With ``[sim] weight_decimation = N > 0`` an NN run also writes
``weights.csv``: ``t`` followed by every entry of V0 and V1 (labelled
``v0_<row>_<col>``, ``v1_<row>_<col>``), one row every N ticks.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, dump_config, iter_entries
from .sim import SimResult, simulate

log = logging.getLogger(__name__)

AXES = ("x", "y", "z")
CSV_VECTORS = (("p", "p"), ("pd", "pd"), ("y1", "y1"), ("y2", "y2"), ("u_held", "u_held"))
CSV_COLUMNS = (
    ["t"]
    + [f"{name}_{a}" for name, _ in CSV_VECTORS for a in AXES]
    + ["kappa", "event", "V_s"]
    + [f"fhat_{a}" for a in AXES]
)

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3


@dataclass
class MetricsReport:
    controller: str
    trajectory: str
    t_end: float
    window_start: float
    max_x: float
    max_y: float
    max_z: float
    mean_x: float
    mean_y: float
    mean_z: float
    event_count: int
    total_ticks: int
    transmission_ratio: float
    min_inter_event: float
    mean_inter_event: float
    final_V_s: float
    runtime: float
    diverged: bool = False

    @property
    def max_err(self) -> np.ndarray:
        return np.array([self.max_x, self.max_y, self.max_z])

    @property
    def mean_err(self) -> np.ndarray:
        return np.array([self.mean_x, self.mean_y, self.mean_z])


def error_stats(t: np.ndarray, p: np.ndarray, pd: np.ndarray, window_start: float):
    """Per-axis max and mean ``|p - p_d|`` over ticks with ``t >= window_start``."""
    err = np.abs(np.asarray(p) - np.asarray(pd))[np.asarray(t) >= window_start]
    if err.shape[0] == 0:
        nan = np.full(3, np.nan)
        return nan, nan
    return err.max(axis=0), err.mean(axis=0)


def inter_event_stats(event_times: np.ndarray):
    """``(min, mean)`` gap between consecutive events; NaN with fewer than two events."""
    gaps = np.diff(np.asarray(event_times, dtype=float))
    if gaps.size == 0:
        return math.nan, math.nan
    return float(gaps.min()), float(gaps.mean())


def compute_metrics(result: SimResult, cfg: RunConfig, runtime: float) -> MetricsReport:
    mx, mn = error_stats(result["t"], result["p"], result["pd"], cfg.window_start)
    gmin, gmean = inter_event_stats(result.event_times())
    vs = result["V_s"]
    return MetricsReport(
        controller=result.controller, trajectory=cfg.model.traj.kind, t_end=cfg.model.sim.t_end,
        window_start=cfg.window_start,
        max_x=float(mx[0]), max_y=float(mx[1]), max_z=float(mx[2]),
        mean_x=float(mn[0]), mean_y=float(mn[1]), mean_z=float(mn[2]),
        event_count=result.event_count, total_ticks=result.n_ticks,
        transmission_ratio=result.transmission_ratio,
        min_inter_event=gmin, mean_inter_event=gmean,
        final_V_s=float(vs[-1]) if vs.size else math.nan,
        runtime=runtime, diverged=result.diverged,
    )


def _num(x) -> str:
    return repr(float(x))


def format_metrics(m: MetricsReport) -> str:
    lines = ["[metrics]"]
    for f in fields(m):
        v = getattr(m, f.name)
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = _num(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def read_metrics(path) -> MetricsReport:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read metrics: {exc.strerror}", str(p)) from None
    types = {f.name: f.type for f in fields(MetricsReport)}
    values = {}
    for section, key, raw, line in iter_entries(text, str(p)):
        if key is None:
            if section != "metrics":
                raise ConfigError(f"unknown section [{section}]", str(p), line)
            continue
        if key not in types:
            raise ConfigError(f"unknown key {key!r}", str(p), line)
        kind = types[key]
        try:
            if kind == "float":
                values[key] = float(raw)
            elif kind == "int":
                values[key] = int(raw)
            elif kind == "bool":
                if raw not in ("true", "false"):
                    raise ValueError(raw)
                values[key] = raw == "true"
            else:
                values[key] = raw
        except ValueError:
            raise ConfigError(f"{key}: expected {kind}, got {raw!r}", str(p), line) from None
    missing = [k for k, f in types.items() if k not in values and k != "diverged"]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}", str(p))
    return MetricsReport(**values)


def csv_rows(result: SimResult):
    """Telemetry rows as strings; floats use ``repr`` so values round-trip exactly."""
    d = result.data
    n = len(d["t"])
    cols = [d["t"][:, None]] + [d[key] for _, key in CSV_VECTORS] + [d["kappa"][:, None]]
    head = np.hstack(cols)
    tail = np.hstack([d["V_s"][:, None], d["fhat"]])
    for i in range(n):
        yield (",".join(map(_num, head[i])) + f",{int(result.event[i])},"
               + ",".join(map(_num, tail[i])))


def write_csv(result: SimResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in csv_rows(result):
            fh.write(row + "\n")


def read_csv(path) -> dict:
    """Load a telemetry CSV into ``{column: array}``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header in {path}")
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: arr[:, i] for i, name in enumerate(header)}


def weight_columns(nn) -> list:
    """Header of the weight stream for a network of the given shape."""
    return (["t"] + [f"v0_{i}_{j}" for i in range(nn.n0 + 1) for j in range(nn.n1)]
            + [f"v1_{i}_{j}" for i in range(nn.n1 + 1) for j in range(nn.n2)])


def write_weights_csv(result: SimResult, nn, decimation: int, path) -> None:
    """Decimated NN weight snapshots, starting with the tick at t = 0."""
    if decimation < 1:
        raise ValueError(f"decimation must be >= 1, got {decimation}")
    w = result["weights"]
    cols = weight_columns(nn)
    if w.shape[1] != len(cols) - 1:
        raise ValueError(f"result carries {w.shape[1]} weights, network shape needs {len(cols) - 1}")
    t = result["t"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(0, len(t), decimation):
            fh.write(_num(t[i]) + "," + ",".join(map(_num, w[i])) + "\n")


@dataclass
class RunOutcome:
    metrics: MetricsReport
    result: SimResult
    out_dir: Path
    exit_code: int


def run_experiment(cfg: RunConfig, output_dir=None) -> RunOutcome:
    """Simulate ``cfg`` and write telemetry, metrics and the resolved config.

    A diverged run keeps its partial telemetry and returns exit code 3.
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir) / (cfg.name or "run")
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(dump_config(cfg), encoding="utf-8")
    t0 = time.perf_counter()
    result = simulate(cfg.model)
    runtime = time.perf_counter() - t0
    metrics = compute_metrics(result, cfg, runtime)
    write_csv(result, out / "telemetry.csv")
    dec = cfg.model.sim.weight_decimation
    if dec > 0 and result["weights"].shape[1] > 0:
        write_weights_csv(result, cfg.model.nn, dec, out / "weights.csv")
    (out / "metrics.txt").write_text(format_metrics(metrics), encoding="utf-8")
    code = EXIT_DIVERGED if result.diverged else EXIT_OK
    if result.diverged:
        log.error("run %s diverged (%s)", cfg.name, result.message)
    return RunOutcome(metrics, result, out, code)


def diagnostic_tail(result: SimResult, n: int = 5) -> str:
    """Last few telemetry ticks, for divergence reports."""
    d = result.data
    lines = [f"diverged: {result.message}"]
    for i in range(max(0, len(d["t"]) - n), len(d["t"])):
        lines.append(
            f"t={d['t'][i]:.3f} |y1|={np.linalg.norm(d['y1'][i]):.4g} |y2|={np.linalg.norm(d['y2'][i]):.4g} "
            f"|iota1|={np.linalg.norm(d['iota1'][i]):.4g} kappa={d['kappa'][i]:.4g}"
        )
    return "\n".join(lines)


def reduction(ref: float, ours: float) -> float:
    """Percentage reduction ``100 (ref - ours) / ref``; positive means ``ours`` is better."""
    if ref == 0.0:
        return 0.0 if ours == 0.0 else -math.inf
    return 100.0 * (ref - ours) / ref


@dataclass
class Comparison:
    ours: MetricsReport
    ref: MetricsReport
    max_reduced: np.ndarray
    mean_reduced: np.ndarray


def compare(ours: MetricsReport, ref: MetricsReport) -> Comparison:
    """Per-axis reductions of ``ours`` relative to the reference run ``ref``."""
    if ours.t_end != ref.t_end or ours.window_start != ref.window_start:
        raise ValueError(
            f"horizons differ: t_end {ours.t_end} vs {ref.t_end}, "
            f"window_start {ours.window_start} vs {ref.window_start}"
        )
    if ours.trajectory != ref.trajectory:
        raise ValueError(f"trajectories differ: {ours.trajectory} vs {ref.trajectory}")
    mx = np.array([reduction(r, o) for r, o in zip(ref.max_err, ours.max_err)])
    mn = np.array([reduction(r, o) for r, o in zip(ref.mean_err, ours.mean_err)])
    return Comparison(ours, ref, mx, mn)


def _pct(x: float) -> str:
    return f"{x:+.2f}%" if math.isfinite(x) else "n/a"


def format_comparison(c: Comparison) -> str:
    """Error table with Max / Mean blocks, each listing both runs and the reduction."""
    w = max(len(c.ours.controller), len(c.ref.controller), 7)
    head = f"{'Error':<6}{'Method':<{w + 2}}" + "".join(f"{a + ' (m)':>11}" for a in AXES)
    lines = [f"trajectory: {c.ours.trajectory}  window: [{c.ours.window_start:g}, {c.ours.t_end:g}] s", head]
    for label, o, r, red in (("Max", c.ours.max_err, c.ref.max_err, c.max_reduced),
                             ("Mean", c.ours.mean_err, c.ref.mean_err, c.mean_reduced)):
        lines.append(f"{label:<6}{c.ours.controller:<{w + 2}}" + "".join(f"{v:>11.4f}" for v in o))
        lines.append(f"{'':<6}{c.ref.controller:<{w + 2}}" + "".join(f"{v:>11.4f}" for v in r))
        lines.append(f"{'':<6}{'Reduced':<{w + 2}}" + "".join(f"{_pct(v):>11}" for v in red))
    return "\n".join(lines)


def format_comparison_kv(c: Comparison) -> str:
    lines = ["[comparison]", f"ours = {c.ours.controller}", f"ref = {c.ref.controller}"]
    for label, red in (("max", c.max_reduced), ("mean", c.mean_reduced)):
        for a, v in zip(AXES, red):
            lines.append(f"{label}_reduced_{a} = {v:.2f}")
    return "\n".join(lines) + "\n"
