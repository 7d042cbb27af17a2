"""Energy-budget task selection for a single node.

Given the fitted per-constituent coefficients and the node's residual
battery, pick which tasks to run. Mandatory tasks are always included;
optional tasks are a 0/1 knapsack maximizing total importance with the
battery as a strict budget. Costs are real-valued joules, so the exact
solver is a Pareto-frontier dynamic program (non-dominated cost/importance
states per item prefix) rather than an integer-capacity table; past 64
optional tasks it falls back to a density greedy and says so in the report.

The budget inequality is strict: a schedule consuming exactly the battery
is not feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .energy_core import CONSTITUENT_ORDER, CoefficientVector, Constituent

#: Optional-task count above which selection switches to the greedy heuristic.
EXACT_LIMIT = 64

CONSTRAINT_LOCAL = "local_energy_positive"
CONSTRAINT_GLOBAL = "global_energy_positive"
CONSTRAINT_BUDGET = "within_budget"


@dataclass(frozen=True)
class TaskDescriptor:
    """One schedulable task: its constituent, packet-flow size and importance."""

    task_id: int
    constituent: Constituent
    pf_size: int
    importance: float
    mandatory: bool = False

    def __post_init__(self):
        if not isinstance(self.pf_size, int) or self.pf_size < 1:
            raise ValueError(f"pf_size must be an integer >= 1, got {self.pf_size!r}")
        if not math.isfinite(self.importance) or self.importance <= 0:
            raise ValueError(f"importance must be finite and > 0, got {self.importance!r}")


def task_cost(task: TaskDescriptor, coefficients: CoefficientVector) -> float:
    """Energy of running one task: its constituent coefficient times PF size."""
    if not coefficients.is_active(task.constituent):
        raise ValueError(f"constituent {task.constituent.value!r} is inactive in the model")
    return coefficients.get(task.constituent) * task.pf_size


@dataclass(frozen=True)
class BudgetProblem:
    """Task list, fitted coefficients and the residual battery budget.

    With ``enforce_positivity`` (the default) the problem must contain at
    least one mandatory local and one mandatory global task, so the
    positivity constraints on local/global energy can be satisfiable at all.
    """

    tasks: tuple[TaskDescriptor, ...]
    coefficients: CoefficientVector
    e_battery: float
    enforce_positivity: bool = True

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not math.isfinite(self.e_battery) or self.e_battery < 0:
            raise ValueError(f"e_battery must be finite and >= 0, got {self.e_battery!r}")
        ids = [t.task_id for t in self.tasks]
        if len(ids) != len(set(ids)):
            raise ValueError("task ids must be unique")
        for t in self.tasks:
            task_cost(t, self.coefficients)  # validates constituent activity
        if self.enforce_positivity:
            mand = [t.constituent for t in self.tasks if t.mandatory]
            if Constituent.LOCAL not in mand or Constituent.GLOBAL not in mand:
                raise ValueError(
                    "positivity constraints require at least one mandatory local "
                    "and one mandatory global task")


def check_constraints(selection: Iterable[TaskDescriptor],
                      coefficients: CoefficientVector,
                      e_battery: float) -> dict[str, bool]:
    """Evaluate the three feasibility constraints for a selection.

    The budget constraint sums individual + local + global + sink energy
    (environment energy is excluded from it) and is strict.
    """
    per = per_constituent_energy(selection, coefficients)
    budget_sum = math.fsum(per[c] for c in (Constituent.INDIVIDUAL, Constituent.LOCAL,
                                            Constituent.GLOBAL, Constituent.SINK))
    return {
        CONSTRAINT_LOCAL: per[Constituent.LOCAL] > 0,
        CONSTRAINT_GLOBAL: per[Constituent.GLOBAL] > 0,
        CONSTRAINT_BUDGET: budget_sum < e_battery,
    }


def per_constituent_energy(selection: Iterable[TaskDescriptor],
                           coefficients: CoefficientVector) -> dict[Constituent, float]:
    per = {c: 0.0 for c in CONSTITUENT_ORDER}
    for t in selection:
        per[t.constituent] += task_cost(t, coefficients)
    return per


@dataclass
class ScheduleResult:
    feasible: bool
    scheduled: tuple[TaskDescriptor, ...]        # ordered by importance per joule
    total_cost: float
    total_importance: float
    per_constituent: dict[Constituent, float]
    slack: float
    constraints: dict[str, bool]
    failed_constraints: tuple[str, ...]
    method: str                                  # "exact-dp" or "greedy"
    e_battery: float

    @property
    def selected_ids(self) -> tuple[int, ...]:
        return tuple(t.task_id for t in self.scheduled)


def _density_order(tasks: Sequence[TaskDescriptor],
                   coefficients: CoefficientVector) -> list[TaskDescriptor]:
    def key(t: TaskDescriptor):
        cost = task_cost(t, coefficients)
        density = math.inf if cost <= 0 else t.importance / cost
        return (-density, t.task_id)
    return sorted(tasks, key=key)


def _knapsack_exact(costs: list[float], values: list[float], capacity: float) -> int:
    """Max-importance subset with total cost strictly below capacity.

    Pareto-frontier DP: after each item, keep only non-dominated
    (cost, value) states; the chosen subset rides along as a bitmask.
    Returns the winning bitmask (ties: cheapest, then lowest ids).
    """
    frontier: list[tuple[float, float, int]] = [(0.0, 0.0, 0)]
    for i, (cost, value) in enumerate(zip(costs, values)):
        extended = []
        for c, v, mask in frontier:
            nc = c + cost
            if nc < capacity:
                extended.append((nc, v + value, mask | (1 << i)))
        merged = sorted(frontier + extended, key=lambda s: (s[0], -s[1], s[2]))
        pruned: list[tuple[float, float, int]] = []
        best_value = -math.inf
        for c, v, mask in merged:
            if v > best_value:
                pruned.append((c, v, mask))
                best_value = v
        frontier = pruned
    best = max(frontier, key=lambda s: (s[1], -s[0], -s[2]))
    # max() keeps the first of equal keys; resolve ties explicitly instead.
    candidates = [s for s in frontier if s[1] == best[1]]
    min_cost = min(c for c, _, _ in candidates)
    masks = sorted(mask for c, _, mask in candidates if c == min_cost)
    return masks[0]


def _knapsack_greedy(costs: list[float], values: list[float], capacity: float,
                     ids: list[int]) -> int:
    order = sorted(range(len(costs)),
                   key=lambda i: (-(math.inf if costs[i] <= 0 else values[i] / costs[i]), ids[i]))
    mask, total = 0, 0.0
    for i in order:
        if total + costs[i] < capacity:
            mask |= 1 << i
            total += costs[i]
    return mask


def select_tasks(problem: BudgetProblem) -> ScheduleResult:
    """Choose and order tasks under the battery budget.

    Every mandatory task is included; optional tasks maximize total
    importance subject to the strict budget. The schedule is ordered by
    descending importance per joule (ties: lower task id).
    """
    coeffs, battery = problem.coefficients, problem.e_battery
    mandatory = [t for t in problem.tasks if t.mandatory]
    optional = [t for t in problem.tasks if not t.mandatory]
    mandatory_cost = math.fsum(task_cost(t, coeffs) for t in mandatory)

    def build(selection: list[TaskDescriptor], feasible: bool, method: str) -> ScheduleResult:
        per = per_constituent_energy(selection, coeffs)
        constraints = check_constraints(selection, coeffs, battery)
        if not problem.enforce_positivity:
            active = {CONSTRAINT_BUDGET: constraints[CONSTRAINT_BUDGET]}
        else:
            active = constraints
        failed = tuple(name for name, ok in active.items() if not ok)
        total = math.fsum(task_cost(t, coeffs) for t in selection)
        return ScheduleResult(
            feasible=feasible and not failed and total < battery,
            scheduled=tuple(_density_order(selection, coeffs)),
            total_cost=total,
            total_importance=math.fsum(t.importance for t in selection),
            per_constituent=per,
            slack=battery - total,
            constraints=constraints,
            failed_constraints=failed,
            method=method,
            e_battery=battery,
        )

    if mandatory_cost >= battery:
        # Mandatory load alone breaks the strict budget: structured infeasibility.
        return build(mandatory, feasible=False, method="exact-dp")

    capacity = battery - mandatory_cost
    costs = [task_cost(t, coeffs) for t in optional]
    values = [t.importance for t in optional]
    if len(optional) <= EXACT_LIMIT:
        mask = _knapsack_exact(costs, values, capacity)
        method = "exact-dp"
    else:
        mask = _knapsack_greedy(costs, values, capacity, [t.task_id for t in optional])
        method = "greedy"
    chosen = mandatory + [t for i, t in enumerate(optional) if mask & (1 << i)]
    return build(chosen, feasible=True, method=method)
