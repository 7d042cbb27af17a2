"""CSV serialization of traces, fit reports, sweep observations, task lists
and schedules.

Numbers are written with ``repr`` so floats round-trip to the exact same
value; headers are fixed byte-for-byte. Multi-part files (reports,
schedules) are CSV blocks separated by single blank lines, each block with
its own header row.
"""

from __future__ import annotations

import math
from typing import Sequence

from .energy_core import CONSTITUENT_ORDER, CoefficientVector, Constituent, ConstituentFlowVector
from .estimation import ErrorReport, FitResult, ObservationSet, RollingFit
from .policy import ScheduleResult, TaskDescriptor, task_cost
from .simulator import Phase, SliceRecord

TRACE_HEADER = "slice,phase,b_individual,b_local,b_global,b_environment,b_snk,energy_j,alive_nodes"
OBSERVATIONS_HEADER = "run,b_individual,b_local,b_global,b_environment,b_snk,energy_j"
TASKS_HEADER = "id,constituent,pf_size,importance,mandatory"

_PHASES = {p.value: p for p in Phase}
_CONSTITUENTS = {c.value: c for c in CONSTITUENT_ORDER}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _fmt(x: float) -> str:
    return repr(float(x))


def _split_blocks(text: str) -> list[list[str]]:
    blocks: list[list[str]] = [[]]
    for line in text.splitlines():
        if line.strip() == "":
            if blocks[-1]:
                blocks.append([])
        else:
            blocks[-1].append(line)
    if blocks and not blocks[-1]:
        blocks.pop()
    return blocks


# ---------------------------------------------------------------------------
# Trace files

def write_trace(path: str, records: Sequence[SliceRecord]) -> None:
    lines = [TRACE_HEADER]
    for rec in records:
        f = rec.flows
        lines.append(",".join([
            str(rec.index), rec.phase.value,
            _fmt(f.b_individual), _fmt(f.b_local), _fmt(f.b_global),
            _fmt(f.b_environment), _fmt(f.b_snk),
            _fmt(rec.energy_j), str(rec.alive_nodes),
        ]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace(path: str, delta_t: float = 1.0) -> list[SliceRecord]:
    """Read a trace file back into slice records.

    The slice duration is scenario configuration, not trace data, so the
    caller supplies it (it defaults to the default scenario's 1 s).
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() != ""]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"trace header must be exactly {TRACE_HEADER!r}")
    records = []
    previous = None
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise ValueError(f"malformed trace row: {ln!r}")
        index = int(parts[0])
        if previous is not None and index <= previous:
            raise ValueError(f"slice indices must increase (got {index} after {previous})")
        previous = index
        phase = _PHASES.get(parts[1])
        if phase is None:
            raise ValueError(f"unknown phase {parts[1]!r}")
        records.append(SliceRecord(
            index=index, delta_t=delta_t, phase=phase,
            flows=ConstituentFlowVector(*(float(p) for p in parts[2:7])),
            energy_j=float(parts[7]), alive_nodes=int(parts[8])))
    return records


def observations_from_slices(records: Sequence[SliceRecord],
                             active=(True, True, True, False, False)) -> ObservationSet:
    return ObservationSet.from_flow_vectors(
        [r.flows for r in records], [r.energy_j for r in records], active,
        slices=[r.index for r in records], phases=[r.phase.value for r in records])


# ---------------------------------------------------------------------------
# Sweep observation files

def write_observations(path: str, rows: Sequence[tuple[int, ConstituentFlowVector, float]]) -> None:
    lines = [OBSERVATIONS_HEADER]
    for run, flows, energy in rows:
        lines.append(",".join([str(run)] + [_fmt(v) for v in flows.as_tuple()] + [_fmt(energy)]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_observations(path: str,
                      active=(True, True, True, False, False)) -> ObservationSet:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() != ""]
    if not lines or lines[0] != OBSERVATIONS_HEADER:
        raise ValueError(f"observations header must be exactly {OBSERVATIONS_HEADER!r}")
    flows, energies, runs = [], [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise ValueError(f"malformed observation row: {ln!r}")
        runs.append(int(parts[0]))
        flows.append(ConstituentFlowVector(*(float(p) for p in parts[1:6])))
        energies.append(float(parts[6]))
    return ObservationSet.from_flow_vectors(flows, energies, active, slices=runs)


# ---------------------------------------------------------------------------
# Fit reports

def write_report(path: str, fit: FitResult,
                 predictions: Sequence[tuple[int, float, float]],
                 errors: ErrorReport, dominant: Constituent) -> None:
    """Single-fit report: coefficients, per-slice predictions, summary."""
    lines = ["constituent,alpha,stderr_proxy"]
    stderr = list(fit.stderr)
    i = 0
    for c, is_active in zip(CONSTITUENT_ORDER, fit.coefficients.active):
        if not is_active:
            continue
        se = stderr[i] if i < len(stderr) else math.nan
        lines.append(f"{c.value},{_fmt(fit.coefficients.get(c))},{_fmt(se)}")
        i += 1
    lines.append("")
    lines.append("slice,observed_j,predicted_j,pct_error")
    for (idx, observed, predicted), pct in zip(predictions, errors.pct_errors):
        lines.append(f"{idx},{_fmt(observed)},{_fmt(predicted)},{_fmt(pct)}")
    lines.append("")
    lines.append("mape_pct,max_abs_pct_error,dominant_constituent")
    lines.append(f"{_fmt(errors.mape)},{_fmt(errors.max_abs_pct)},{dominant.value}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_rolling_report(path: str, rolling: RollingFit,
                         predictions: Sequence[tuple[int, float, float]],
                         errors: ErrorReport | None) -> None:
    """Rolling-fit report: per-window coefficients, one-step predictions."""
    lines = ["window_start,window_stop,constituent,alpha"]
    for wf in rolling.fits:
        for c in wf.result.coefficients.active_constituents():
            lines.append(f"{wf.start},{wf.stop},{c.value},{_fmt(wf.result.coefficients.get(c))}")
    lines.append("")
    lines.append("slice,observed_j,predicted_j,pct_error")
    pcts = errors.pct_errors if errors is not None else ()
    for (idx, observed, predicted), pct in zip(predictions, pcts):
        lines.append(f"{idx},{_fmt(observed)},{_fmt(predicted)},{_fmt(pct)}")
    lines.append("")
    lines.append("mape_pct,max_abs_pct_error,skipped_windows")
    if errors is not None:
        lines.append(f"{_fmt(errors.mape)},{_fmt(errors.max_abs_pct)},{len(rolling.skipped)}")
    else:
        lines.append(f"nan,nan,{len(rolling.skipped)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coefficients(path: str) -> CoefficientVector:
    """Load a coefficient vector from a fit report (its first block) or from
    a bare ``constituent,alpha`` CSV; constituents not listed are inactive."""
    with open(path, encoding="utf-8") as fh:
        blocks = _split_blocks(fh.read())
    if not blocks:
        raise ValueError("empty model file")
    header = blocks[0][0].split(",")
    if header[0] != "constituent" or "alpha" not in header:
        raise ValueError("model file must start with a constituent,alpha block")
    alpha_col = header.index("alpha")
    alpha = [0.0] * 5
    active = [False] * 5
    for ln in blocks[0][1:]:
        parts = ln.split(",")
        constituent = _CONSTITUENTS.get(parts[0])
        if constituent is None:
            raise ValueError(f"unknown constituent {parts[0]!r}")
        k = CONSTITUENT_ORDER.index(constituent)
        alpha[k] = float(parts[alpha_col])
        active[k] = True
    return CoefficientVector(alpha, active)


# ---------------------------------------------------------------------------
# Task lists and schedules

def read_tasks(path: str) -> list[TaskDescriptor]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() != ""]
    if not lines or lines[0] != TASKS_HEADER:
        raise ValueError(f"task file header must be exactly {TASKS_HEADER!r}")
    tasks = []
    for ln in lines[1:]:
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 5:
            raise ValueError(f"malformed task row: {ln!r}")
        constituent = _CONSTITUENTS.get(parts[1])
        if constituent is None:
            raise ValueError(f"unknown constituent {parts[1]!r} in task row")
        flag = parts[4].lower()
        if flag in _TRUE:
            mandatory = True
        elif flag in _FALSE:
            mandatory = False
        else:
            raise ValueError(f"mandatory flag must be true/false, got {parts[4]!r}")
        tasks.append(TaskDescriptor(int(parts[0]), constituent, int(parts[2]),
                                    float(parts[3]), mandatory))
    return tasks


def write_schedule(path: str, result: ScheduleResult,
                   coefficients: CoefficientVector) -> None:
    lines = ["order,task_id,constituent,pf_size,importance,cost_j,cumulative_cost_j"]
    cumulative = 0.0
    for order, task in enumerate(result.scheduled):
        cost = task_cost(task, coefficients)
        cumulative += cost
        lines.append(",".join([
            str(order), str(task.task_id), task.constituent.value, str(task.pf_size),
            _fmt(task.importance), _fmt(cost), _fmt(cumulative)]))
    lines.append("")
    lines.append("feasible,method,total_cost_j,total_importance,slack_j,e_battery_j")
    lines.append(",".join([
        str(result.feasible).lower(), result.method, _fmt(result.total_cost),
        _fmt(result.total_importance), _fmt(result.slack), _fmt(result.e_battery)]))
    lines.append("")
    lines.append("constraint,satisfied")
    for name, ok in result.constraints.items():
        lines.append(f"{name},{str(ok).lower()}")
    lines.append("")
    lines.append("constituent,energy_j")
    for c in CONSTITUENT_ORDER:
        lines.append(f"{c.value},{_fmt(result.per_constituent[c])}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
