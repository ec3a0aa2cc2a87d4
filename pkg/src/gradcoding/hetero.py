"""Per-type task loads for heterogeneous worker groups.

Workers of type i (tau_i machines, expected unit_time t_i per partial
gradient) should all finish at the same expected time, so loads satisfy

    t_1 * L_1 = t_2 * L_2 = ... = t_m * L_m          (equal finish times)
    L_1 * tau_1 + ... + L_m * tau_m = (s + 1) * k    (total assignments)

whose exact solution is L_i = (s + 1) * k / (t_i * sum_j tau_j / t_j). All
arithmetic is over exact rationals; float unit times are converted exactly.
Rounding to integers is largest-remainder at per-worker granularity so the
total stays exactly (s + 1) * k.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class WorkerTypeSpec:
    """One group of identical machines: how many, and seconds per partial gradient."""

    count: int
    unit_time: Fraction

    def __post_init__(self) -> None:
        if self.count <= 0:
            raise ValueError(f"worker count must be positive, got {self.count}")
        if self.unit_time <= 0:
            raise ValueError(f"unit time must be positive, got {self.unit_time}")


def worker_type(count: int, unit_time) -> WorkerTypeSpec:
    """Spec constructor accepting int, float, Fraction, or decimal strings."""
    return WorkerTypeSpec(count=count, unit_time=Fraction(unit_time))


@dataclass(frozen=True)
class HeteroPlan:
    """Exact per-type loads, plus integer loads once rounded.

    ``int_loads`` holds one tuple per type with that type's per-worker
    counts (largest-remainder rounding can give two adjacent values within
    a type). ``equalization_error`` is the relative spread of the rounded
    per-worker finish times, (max - min) / min.
    """

    s: int
    k: int
    types: tuple[WorkerTypeSpec, ...]
    real_loads: tuple[Fraction, ...]
    int_loads: tuple[tuple[int, ...], ...] | None = None
    total_assigned: int | None = None
    equalization_error: Fraction | float | None = None

    @property
    def n(self) -> int:
        return sum(t.count for t in self.types)


def _validate(s: int, k: int, specs: Sequence[WorkerTypeSpec]) -> None:
    if s < 0:
        raise ValueError(f"straggler count must be nonnegative, got {s}")
    if k <= 0:
        raise ValueError(f"partition count must be positive, got {k}")
    if not specs:
        raise ValueError("at least one worker type is required")
    n = sum(t.count for t in specs)
    if s >= n:
        raise ValueError(f"straggler count must satisfy s < n, got s={s}, n={n}")
    if n % (s + 1) != 0:
        warnings.warn(
            f"(s+1)={s + 1} does not divide n={n}; loads equalize the expected "
            "finish times but the blocked matrix construction only approximates them",
            stacklevel=3,
        )


def plan_m_types(s: int, k: int, specs: Sequence[WorkerTypeSpec]) -> HeteroPlan:
    """Solve the equal-finish-time conditions exactly for any number of types."""
    _validate(s, k, specs)
    specs = tuple(specs)
    weight = sum(Fraction(t.count) / t.unit_time for t in specs)
    loads = tuple(Fraction(s + 1) * k / (t.unit_time * weight) for t in specs)
    # Exactness of both planner conditions, by construction.
    finish = {t.unit_time * load for t, load in zip(specs, loads)}
    assert len(finish) == 1
    assert sum(load * t.count for load, t in zip(loads, specs)) == (s + 1) * k
    return HeteroPlan(s=s, k=k, types=specs, real_loads=loads)


def plan_two_types(s: int, k: int, spec1: WorkerTypeSpec,
                   spec2: WorkerTypeSpec) -> HeteroPlan:
    """Closed form for exactly two groups.

    With tau_1 : tau_2 = alpha : beta in lowest terms,

        L_1 = (s+1) * k * alpha * t_2 / ((alpha*t_2 + beta*t_1) * tau_1)
        L_2 = (s+1) * k * beta  * t_1 / ((alpha*t_2 + beta*t_1) * tau_2)

    which agrees exactly with :func:`plan_m_types` at m = 2.
    """
    _validate(s, k, (spec1, spec2))
    ratio = Fraction(spec1.count, spec2.count)
    alpha, beta = ratio.numerator, ratio.denominator
    denom = alpha * spec2.unit_time + beta * spec1.unit_time
    load1 = Fraction(s + 1) * k * alpha * spec2.unit_time / (denom * spec1.count)
    load2 = Fraction(s + 1) * k * beta * spec1.unit_time / (denom * spec2.count)
    return HeteroPlan(s=s, k=k, types=(spec1, spec2), real_loads=(load1, load2))


def round_plan(plan: HeteroPlan) -> HeteroPlan:
    """Round real loads to per-worker integers preserving the exact total.

    Every worker starts at the floor of its type's load; the remaining
    deficit is handed out one task per worker, largest fractional remainder
    first, ties broken toward the fastest type, then by worker order. The
    rounded total is exactly (s + 1) * k.
    """
    target = (plan.s + 1) * plan.k
    floors = [int(load) for load in plan.real_loads]  # Fractions truncate toward 0; loads >= 0
    remainders = [load - floor for load, floor in zip(plan.real_loads, floors)]
    deficit = target - sum(f * t.count for f, t in zip(floors, plan.types))
    assert 0 <= deficit < plan.n

    order = sorted(
        ((ti, wi) for ti, t in enumerate(plan.types) for wi in range(t.count)),
        key=lambda pair: (-remainders[pair[0]], plan.types[pair[0]].unit_time, pair[0], pair[1]),
    )
    bumped = {pair: 1 for pair in order[:deficit]}
    int_loads = tuple(
        tuple(floors[ti] + bumped.get((ti, wi), 0) for wi in range(t.count))
        for ti, t in enumerate(plan.types)
    )
    total = sum(sum(per_type) for per_type in int_loads)
    assert total == target

    finish_times = [
        t.unit_time * load
        for t, per_type in zip(plan.types, int_loads)
        for load in per_type
    ]
    slowest, fastest = max(finish_times), min(finish_times)
    error: Fraction | float
    if fastest > 0:
        error = (slowest - fastest) / fastest
    else:
        error = 0.0 if slowest == 0 else float("inf")
    return replace(plan, int_loads=int_loads, total_assigned=total,
                   equalization_error=error)
