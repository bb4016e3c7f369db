"""Experiment configuration, execution, dwell-time sweeps and output files.

Configuration documents are plain text with ``[section]`` headers::

    # three agents, leaders rotating every step
    [params]
    N = 3
    d = 3              # default 3
    h = 0.2
    beta = 0.25
    steps = 500        # default 500
    mode = exploration # or: certificate
    threshold = 1e-3   # near-alignment threshold on |vhat|_inf
    lambda = 2.5       # optional; default sqrt(d (N-1))

    [graph 1]
    1 2                # arc "j i": agent j influences agent i
    1 3

    [signal]
    cycle 1 2 3 dwell 1
    # or, piecewise constant with the last graph held forever:
    # at 0 1
    # at 40 2

    [init]
    seed = 7
    position_length = 10
    velocity_length = 1
    # or explicit coordinates, one line per agent:
    # x1 = 0 0 0
    # v1 = 1 0 0

A ``[signal]`` section may be omitted when there is exactly one graph, and
``[init]`` defaults to seed 0 with lengths 10 and 1.

Stand-alone graph files (checked by ``csflock graphs check``) use the same
arc and signal lines under a ``N <count>`` header, with ``graph <id>`` lines
starting each graph::

    N 3
    graph 1
    1 2
    1 3
    cycle 1 dwell 1
"""

from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import theory
from .dynamics import FlockParams, FlockState, Trajectory, random_initial_state, simulate
from .errors import ConfigError
from .topology import (
    CyclicSchedule,
    Digraph,
    ExplicitSchedule,
    SwitchingSignal,
    is_rooted,
    is_rooted_leadership,
    is_strongly_rooted,
)

log = logging.getLogger(__name__)

__all__ = [
    "RandomInit",
    "ExplicitInit",
    "OutputPaths",
    "ExperimentConfig",
    "RunResult",
    "SweepRow",
    "GraphFile",
    "parse_config",
    "load_config",
    "parse_graph_file",
    "check_graphs",
    "initial_state",
    "run",
    "dwell_sweep",
    "trajectory_header",
    "write_trajectory_csv",
    "format_keyvalue",
    "write_keyvalue",
    "write_outputs",
    "certificate_record",
    "write_sweep_csv",
    "EXPLORATION",
    "CERTIFICATE",
]

EXPLORATION = "exploration"
CERTIFICATE = "certificate"
DEFAULT_D = 3
DEFAULT_STEPS = 500
DEFAULT_THRESHOLD = 1e-3
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class RandomInit:
    """Coordinates drawn uniformly from ``[0, position_length]`` / ``[0, velocity_length]``.

    Draws use numpy's PCG64 generator seeded with ``seed``: positions first
    (row-major ``N x d``), then velocities.
    """

    seed: int = 0
    position_length: float = 10.0
    velocity_length: float = 1.0

    def __post_init__(self):
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not (self.position_length > 0 and self.velocity_length > 0):
            raise ValueError("random init interval lengths must be positive")


@dataclass(frozen=True)
class ExplicitInit:
    x: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class OutputPaths:
    trajectory: Path
    metrics: Path
    certificate: Path

    @classmethod
    def in_dir(cls, out_dir) -> OutputPaths:
        out = Path(out_dir)
        return cls(out / "trajectory.csv", out / "metrics.txt", out / "certificate.txt")


@dataclass(frozen=True)
class ExperimentConfig:
    params: FlockParams
    signal: SwitchingSignal
    steps: int = DEFAULT_STEPS
    init: RandomInit | ExplicitInit = field(default_factory=RandomInit)
    mode: str = EXPLORATION
    threshold: float = DEFAULT_THRESHOLD
    lam: float | None = None
    outputs: OutputPaths | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.mode not in (EXPLORATION, CERTIFICATE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.signal.n != self.params.N:
            raise ValueError(f"graphs have {self.signal.n} vertices but N = {self.params.N}")

    def with_seed(self, seed: int) -> ExperimentConfig:
        if isinstance(self.init, ExplicitInit):
            return self
        return replace(self, init=replace(self.init, seed=int(seed)))

    def with_dwell(self, dwell: int) -> ExperimentConfig:
        sched = self.signal.schedule
        if not isinstance(sched, CyclicSchedule):
            raise ValueError("dwell sweeps need a cyclic signal")
        sig = SwitchingSignal(self.signal.graphs, CyclicSchedule(sched.order, int(dwell)))
        return replace(self, signal=sig)


# ---------------------------------------------------------------- parsing

_SECTION = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+(\S+))?\s*\]$")
_KEYVAL = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")

_PARAM_KEYS = {"N", "d", "h", "beta", "steps", "mode", "threshold", "lambda"}
_INIT_KEYS = {"seed", "position_length", "velocity_length"}


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_arc(text: str, n: int | None, lineno: int, errors: list):
    parts = text.split()
    if len(parts) != 2:
        errors.append((lineno, f"expected an arc '<j> <i>', got {text!r}"))
        return None
    try:
        j, i = int(parts[0]), int(parts[1])
    except ValueError:
        errors.append((lineno, f"arc endpoints must be integers, got {text!r}"))
        return None
    if j == i:
        errors.append((lineno, f"self-loop ({j}, {i}) is not allowed"))
        return None
    if n is not None and not (1 <= j <= n and 1 <= i <= n):
        errors.append((lineno, f"arc ({j}, {i}) has a vertex outside 1..{n}"))
        return None
    return (j, i)


def _parse_signal_lines(lines, errors):
    """Turn ``cycle``/``at`` lines into a schedule (or None)."""
    cycle = None
    changes = []
    for lineno, text in lines:
        parts = text.split()
        if parts[0] == "cycle":
            if "dwell" in parts:
                k = parts.index("dwell")
                order, rest = parts[1:k], parts[k + 1 :]
            else:
                order, rest = parts[1:], ["1"]
            if not order or len(rest) != 1:
                errors.append((lineno, "expected 'cycle <g1> <g2> ... dwell <k>'"))
                continue
            try:
                dwell = int(rest[0])
            except ValueError:
                errors.append((lineno, f"dwell must be an integer, got {rest[0]!r}"))
                continue
            if dwell < 1:
                errors.append((lineno, "dwell must be at least 1 step"))
                continue
            if cycle is not None:
                errors.append((lineno, "only one cycle line is allowed"))
                continue
            cycle = (lineno, CyclicSchedule(tuple(order), dwell))
        elif parts[0] == "at":
            if len(parts) != 3:
                errors.append((lineno, "expected 'at <t> <g>'"))
                continue
            try:
                t = int(parts[1])
            except ValueError:
                errors.append((lineno, f"time must be an integer, got {parts[1]!r}"))
                continue
            if t < 0:
                errors.append((lineno, "time must be nonnegative"))
                continue
            changes.append((lineno, t, parts[2]))
        else:
            errors.append((lineno, f"unknown signal line {text!r}"))
    if cycle is not None and changes:
        errors.append((cycle[0], "use either a cycle line or at lines, not both"))
        return None, []
    if cycle is not None:
        return cycle[1], [(cycle[0], g) for g in cycle[1].order]
    if changes:
        times = [t for _, t, _ in changes]
        if 0 not in times:
            errors.append((changes[0][0], "at lines must assign a graph at t = 0"))
            return None, []
        if len(set(times)) != len(times):
            errors.append((changes[0][0], "two at lines share a time"))
            return None, []
        return ExplicitSchedule(tuple((t, g) for _, t, g in changes)), [(ln, g) for ln, _, g in changes]
    return None, []


def _number(value: str, kind, lineno: int, key: str, errors: list):
    try:
        if kind is int:
            f = float(value)
            if not f.is_integer():
                raise ValueError
            return int(value) if value.lstrip("+-").isdigit() else int(f)
        return float(value)
    except (ValueError, OverflowError):
        what = "an integer" if kind is int else "a number"
        errors.append((lineno, f"{key} must be {what}, got {value!r}"))
        return None


def parse_config(text: str, base_dir=None) -> ExperimentConfig:
    """Parse a configuration document, collecting every error with its line number.

    Raises ``ConfigError`` listing all problems found.
    """
    errors: list = []
    params: dict = {}
    param_lines: dict = {}
    graphs: dict = {}
    graph_lines: dict = {}
    signal_lines: list = []
    init: dict = {}
    coords: dict = {}
    section = None
    graph_id = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            name, arg = m.group(1), m.group(2)
            if name == "graph":
                if arg is None:
                    errors.append((lineno, "graph section needs an id: [graph <id>]"))
                    section = None
                    continue
                if arg in graphs:
                    errors.append((lineno, f"graph {arg!r} defined twice"))
                graphs.setdefault(arg, [])
                graph_lines[arg] = lineno
                section, graph_id = "graph", arg
            elif name in ("params", "signal", "init") and arg is None:
                section = name
            else:
                errors.append((lineno, f"unknown section [{line[1:-1].strip()}]"))
                section = None
            continue
        if section is None:
            errors.append((lineno, "content outside of any known section"))
        elif section == "graph":
            graphs[graph_id].append((lineno, line))
        elif section == "signal":
            signal_lines.append((lineno, line))
        else:
            kv = _KEYVAL.match(line)
            if not kv:
                errors.append((lineno, f"expected 'key = value', got {line!r}"))
                continue
            key, value = kv.group(1), kv.group(2).strip()
            if section == "params":
                if key not in _PARAM_KEYS:
                    errors.append((lineno, f"unknown key {key!r} in [params]"))
                    continue
                params[key] = value
                param_lines[key] = lineno
            elif re.fullmatch(r"[xv]\d+", key):
                coords[key] = (lineno, value)
            elif key in _INIT_KEYS:
                init[key] = (lineno, value)
            else:
                errors.append((lineno, f"unknown key {key!r} in [init]"))

    # params
    def get(key, kind, default=None, required=False):
        if key not in params:
            if required:
                errors.append((None, f"[params] is missing required key {key!r}"))
            return default
        return _number(params[key], kind, param_lines[key], key, errors)

    N = get("N", int, required=True)
    d = get("d", int, DEFAULT_D)
    h = get("h", float, required=True)
    beta = get("beta", float, required=True)
    steps = get("steps", int, DEFAULT_STEPS)
    threshold = get("threshold", float, DEFAULT_THRESHOLD)
    lam = get("lambda", float, None)
    mode = params.get("mode", EXPLORATION)
    if mode not in (EXPLORATION, CERTIFICATE):
        errors.append((param_lines.get("mode"), f"mode must be {EXPLORATION!r} or {CERTIFICATE!r}"))
    if N is not None and N < 1:
        errors.append((param_lines["N"], "N must be at least 1"))
        N = None
    if d is not None and d < 1:
        errors.append((param_lines.get("d"), "d must be at least 1"))
    if steps is not None and steps < 1:
        errors.append((param_lines.get("steps"), "steps must be at least 1"))
    if h is not None and not h > 0:
        errors.append((param_lines["h"], "h must be positive"))
    if beta is not None and not beta >= 0:
        errors.append((param_lines["beta"], "beta must be nonnegative"))
    if threshold is not None and not threshold > 0:
        errors.append((param_lines.get("threshold"), "threshold must be positive"))
    if lam is not None and lam < 1:
        errors.append((param_lines.get("lambda"), "lambda must be at least 1"))

    # graphs
    if not graphs:
        errors.append((None, "no [graph <id>] section"))
    digraphs = {}
    for gid, lines in graphs.items():
        arcs = [_parse_arc(text, N, ln, errors) for ln, text in lines]
        if all(a is not None for a in arcs) and N is not None:
            digraphs[gid] = Digraph(N, frozenset(arcs))

    # signal
    schedule, refs = _parse_signal_lines(signal_lines, errors)
    for ln, g in refs:
        if g not in graphs:
            errors.append((ln, f"signal refers to undefined graph {g!r}"))
    if schedule is None and not signal_lines:
        if len(graphs) == 1:
            only = next(iter(graphs))
            schedule = CyclicSchedule((only,), 1)
        elif graphs:
            errors.append((None, "[signal] is required when more than one graph is defined"))

    # init
    init_obj = None
    if coords and init:
        ln = min(v[0] for v in init.values())
        errors.append((ln, "use either explicit x/v coordinates or random settings in [init]"))
    elif coords:
        if N is not None and d is not None:
            x = np.zeros((N, d))
            v = np.zeros((N, d))
            for key, (ln, value) in coords.items():
                idx = int(key[1:])
                if not 1 <= idx <= N:
                    errors.append((ln, f"agent index {idx} outside 1..{N}"))
                    continue
                try:
                    vals = [float(c) for c in value.split()]
                except ValueError:
                    errors.append((ln, f"coordinates must be numbers, got {value!r}"))
                    continue
                if len(vals) != d:
                    errors.append((ln, f"expected {d} coordinates, got {len(vals)}"))
                    continue
                (x if key[0] == "x" else v)[idx - 1] = vals
            missing = [f"{c}{i}" for c in "xv" for i in range(1, N + 1) if f"{c}{i}" not in coords]
            if missing:
                errors.append((None, f"[init] is missing coordinates for {', '.join(missing)}"))
            init_obj = ExplicitInit(x, v)
    else:
        kw = {}
        for key, (ln, value) in init.items():
            kind = int if key == "seed" else float
            val = _number(value, kind, ln, key, errors)
            if val is None:
                continue
            if key == "seed" and not 0 <= val <= MAX_SEED:
                errors.append((ln, "seed must be an unsigned 64-bit integer"))
                continue
            if key != "seed" and not val > 0:
                errors.append((ln, f"{key} must be positive"))
                continue
            kw[key] = val
        init_obj = RandomInit(**kw)

    if errors:
        raise ConfigError(errors)
    params_obj = FlockParams(h=h, beta=beta, N=N, d=d)
    signal = SwitchingSignal(digraphs, schedule)
    outputs = OutputPaths.in_dir(base_dir) if base_dir is not None else None
    return ExperimentConfig(
        params=params_obj,
        signal=signal,
        steps=steps,
        init=init_obj,
        mode=mode,
        threshold=threshold,
        lam=lam,
        outputs=outputs,
    )


def load_config(path, out_dir=None) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base_dir=out_dir)


@dataclass(frozen=True)
class GraphFile:
    n: int
    graphs: dict
    schedule: CyclicSchedule | ExplicitSchedule | None

    @property
    def signal(self) -> SwitchingSignal | None:
        if self.schedule is None:
            return None
        return SwitchingSignal(self.graphs, self.schedule)


def parse_graph_file(text: str) -> GraphFile:
    """Parse an ``N <count>`` header, ``graph <id>`` blocks of arcs and signal lines."""
    errors: list = []
    n = None
    graphs: dict = {}
    current = None
    signal_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if n is None:
            if parts[0] == "N" and len(parts) == 2 and parts[1].isdigit() and int(parts[1]) >= 1:
                n = int(parts[1])
            else:
                errors.append((lineno, "first line must be 'N <count>'"))
                break
            continue
        if parts[0] == "graph":
            if len(parts) != 2:
                errors.append((lineno, "expected 'graph <id>'"))
                continue
            current = parts[1]
            if current in graphs:
                errors.append((lineno, f"graph {current!r} defined twice"))
            graphs.setdefault(current, [])
        elif parts[0] in ("cycle", "at"):
            signal_lines.append((lineno, line))
        else:
            if current is None:
                current = "1"
                graphs.setdefault(current, [])
            arc = _parse_arc(line, n, lineno, errors)
            if arc is not None:
                graphs[current].append(arc)
    if n is None and not errors:
        errors.append((None, "empty graph file"))
    schedule, refs = _parse_signal_lines(signal_lines, errors)
    for ln, g in refs:
        if g not in graphs:
            errors.append((ln, f"signal refers to undefined graph {g!r}"))
    if errors:
        raise ConfigError(errors)
    return GraphFile(n, {k: Digraph(n, frozenset(a)) for k, a in graphs.items()}, schedule)


def check_graphs(graphs: dict) -> list[dict]:
    """Rootedness summary for each graph."""
    rows = []
    for gid, g in graphs.items():
        rooted = is_rooted(g)
        lead = is_rooted_leadership(g)
        strong = is_strongly_rooted(g)
        rows.append(
            {
                "graph": gid,
                "rooted": rooted.rooted,
                "roots": sorted(rooted.roots),
                "rooted_leadership": lead.valid,
                "leader": lead.leader,
                "reason": lead.reason,
                "strongly_rooted": strong.strongly_rooted,
                "strong_roots": sorted(strong.strong_roots),
            }
        )
    return rows


# ---------------------------------------------------------------- running


def initial_state(config: ExperimentConfig) -> FlockState:
    p = config.params
    if isinstance(config.init, ExplicitInit):
        return FlockState(config.init.x, config.init.v, 0)
    rng = np.random.Generator(np.random.PCG64(config.init.seed))
    return random_initial_state(
        p.N, p.d, rng, config.init.position_length, config.init.velocity_length
    )


def _signal_problems(config: ExperimentConfig) -> list[str]:
    problems = []
    for gid, g in config.signal.used_graphs().items():
        info = is_rooted_leadership(g)
        if not info.valid:
            problems.append(f"graph {gid!r} lacks rooted leadership: {info.reason}")
    return problems


@dataclass
class RunResult:
    trajectory: Trajectory
    metrics: dict
    certificate: theory.CertificateReport | None
    inputs: theory.CertificateInputs | None = None


def _alignment_time(series: np.ndarray, threshold: float):
    """First step from which ``series`` stays below ``threshold``; None if never."""
    above = np.flatnonzero(series >= threshold)
    if above.size == 0:
        return 0
    t = int(above[-1]) + 1
    return t if t < series.size else None


def run(config: ExperimentConfig) -> RunResult:
    """Simulate a configuration and compute its metrics and certificate.

    In certificate mode every scheduled graph must have rooted leadership and
    ``h < 1/(N+1)``; otherwise a ``ConfigError`` explains the refusal.  In
    exploration mode those problems are recorded as warnings in the metrics.
    """
    p = config.params
    problems = _signal_problems(config)
    if not p.satisfies_step_condition:
        problems.append(f"h = {p.h} violates h < 1/(N+1) = {p.h_max:.6g}")
    if config.mode == CERTIFICATE and problems:
        raise ConfigError([(None, "certificate mode refused: " + msg) for msg in problems])
    for msg in problems:
        log.warning(msg)

    state = initial_state(config)
    traj = simulate(state, config.signal, p, config.steps)
    vhat_inf = traj.vhat_inf_norms()
    xhat = traj.xhat_norms()
    consensus = bool(np.all(vhat_inf == 0.0))
    metrics = {
        "steps": config.steps,
        "seed": getattr(config.init, "seed", None),
        "sup_xhat": float(xhat.max()),
        "final_xhat": float(xhat[-1]),
        "final_vhat_inf": float(vhat_inf[-1]),
        "fitted_rate": 0.0 if consensus else theory.fit_log_slope(vhat_inf),
        "exact_consensus": consensus,
        "alignment_threshold": config.threshold,
        "alignment_step": _alignment_time(vhat_inf, config.threshold),
        "mean_final_velocity": traj.v[-1].mean(axis=0).tolist(),
        "warnings": problems,
    }

    cert = inputs = None
    if p.satisfies_step_condition and p.N >= 2 and not _signal_problems(config):
        inputs = theory.CertificateInputs.from_state(state, p, lam=config.lam)
        cert = theory.certify(inputs)
        if cert.hypothesis_holds:
            metrics["certified_B0_respected"] = bool(xhat.max() <= cert.B0)
    return RunResult(traj, metrics, cert, inputs)


@dataclass(frozen=True)
class SweepRow:
    dwell: int
    asymptotic_velocity: np.ndarray
    distances: np.ndarray
    alignment_step: int | None
    final_vhat_inf: float


def dwell_sweep(base: ExperimentConfig, dwells: Sequence[int]) -> list[SweepRow]:
    """Re-run ``base`` with each dwell time (in steps) for its cyclic signal.

    The asymptotic velocity is estimated by the mean final velocity; the
    distances are its 2-norm distances from each agent's initial velocity.
    """
    rows = []
    for dwell in dwells:
        if int(dwell) < 1:
            raise ValueError(f"dwell must be at least one step, got {dwell}")
        result = run(base.with_dwell(int(dwell)))
        traj = result.trajectory
        v_inf = traj.v[-1].mean(axis=0)
        dist = np.linalg.norm(traj.v[0] - v_inf[None, :], axis=1)
        rows.append(
            SweepRow(
                int(dwell),
                v_inf,
                dist,
                result.metrics["alignment_step"],
                result.metrics["final_vhat_inf"],
            )
        )
    return rows


# ---------------------------------------------------------------- output


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return "none"
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def trajectory_header(N: int, d: int) -> list[str]:
    cols = ["t"]
    cols += [f"x{i}_{k}" for i in range(1, N + 1) for k in range(1, d + 1)]
    cols += [f"v{i}_{k}" for i in range(1, N + 1) for k in range(1, d + 1)]
    cols += ["xhat_norm", "vhat_inf", "graph"]
    return cols


def write_trajectory_csv(target, traj: Trajectory) -> None:
    """Write one row per step; ``target`` is a path or a text stream."""
    N, d = traj.x.shape[1], traj.x.shape[2]
    xh = traj.xhat_norms() if N > 1 else np.zeros(traj.x.shape[0])
    vh = traj.vhat_inf_norms() if N > 1 else np.zeros(traj.x.shape[0])

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(N, d))
        for t in range(traj.x.shape[0]):
            row = [str(t)]
            row += [_fmt(c) for c in traj.x[t].ravel()]
            row += [_fmt(c) for c in traj.v[t].ravel()]
            row += [_fmt(xh[t]), _fmt(vh[t]), str(traj.graph_keys[t])]
            w.writerow(row)

    if isinstance(target, io.TextIOBase):
        emit(target)
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


def format_keyvalue(data: dict) -> str:
    lines = []
    for key, value in data.items():
        if key == "warnings":
            for msg in value:
                lines.append(f"warning = {msg}")
            continue
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def write_keyvalue(path, data: dict) -> None:
    Path(path).write_text(format_keyvalue(data), encoding="utf-8")


def certificate_record(result: RunResult, config: ExperimentConfig) -> dict:
    p = config.params
    record = {"N": p.N, "d": p.d, "h": p.h, "beta": p.beta}
    if result.certificate is None:
        record["status"] = "not applicable"
        reasons = _signal_problems(config)
        if not p.satisfies_step_condition:
            reasons.append(f"h = {p.h} violates h < 1/(N+1)")
        record["warnings"] = reasons
        return record
    inp = result.inputs
    record.update(
        x0_hat_norm=inp.x0_hat_norm, v0_norm=inp.v0_norm, v0_inf_norm=inp.v0_inf_norm
    )
    record.update(result.certificate.as_dict())
    return record


def write_outputs(result: RunResult, config: ExperimentConfig, outputs: OutputPaths) -> None:
    outputs.trajectory.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(outputs.trajectory, result.trajectory)
    write_keyvalue(outputs.metrics, result.metrics)
    write_keyvalue(outputs.certificate, certificate_record(result, config))


def write_sweep_csv(target, rows: Sequence[SweepRow]) -> None:
    N = len(rows[0].distances) if rows else 0
    d = len(rows[0].asymptotic_velocity) if rows else 0
    header = ["dwell"] + [f"vinf_{k}" for k in range(1, d + 1)]
    header += [f"dist_agent{i}" for i in range(1, N + 1)] + ["alignment_step", "final_vhat_inf"]

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(
                [r.dwell]
                + [_fmt(c) for c in r.asymptotic_velocity]
                + [_fmt(c) for c in r.distances]
                + [_fmt(r.alignment_step), _fmt(r.final_vhat_inf)]
            )

    if isinstance(target, io.TextIOBase):
        emit(target)
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            emit(fh)

