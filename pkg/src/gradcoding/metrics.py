"""Load-balance metrics and whole-scheme verification.

The distance-from-uniform metric is computed with exact rationals so it can
serve as a test oracle; verification sweeps straggler sets exhaustively (or
by seeded sampling) and re-derives the recovery identity in integer
arithmetic for every one of them.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .decoder import InfeasibleScenarioError, StragglerScenario, select_decoder
from .encoder import EncodingMatrix
from .params import CodeParams, derive_params


@dataclass(frozen=True)
class LoadReport:
    """Per-worker loads plus the uniformity distance and class-set spreads."""

    loads: tuple[int, ...]
    ds_value: Fraction
    total: int
    spread_c1: int   # max - min load over workers in classes 0..r-1 (0 if empty)
    spread_c2: int   # max - min load over workers in classes r..s


@dataclass
class VerificationReport:
    n: int
    s: int
    mode: str                      # "exhaustive" or "sampled"
    checked: int
    failures: int
    first_failure: str | None
    structure_failures: list[str] = field(default_factory=list)
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and not self.structure_failures

    def as_dict(self) -> dict:
        return {
            "n": self.n, "s": self.s, "mode": self.mode, "checked": self.checked,
            "failures": self.failures, "first_failure": self.first_failure,
            "structure_failures": list(self.structure_failures),
            "seed": self.seed, "passed": self.passed,
        }


def load_vector(matrix: EncodingMatrix) -> tuple[int, ...]:
    """Per-worker assignment counts (row supports)."""
    return matrix.loads()


def uniform_target(params: CodeParams) -> Fraction:
    """The per-worker load every assignment is measured against: (k/n)(s+1)."""
    return Fraction(params.k, params.n) * (params.s + 1)


def distance_ds(matrix: EncodingMatrix) -> Fraction:
    """L1 distance of the load vector from uniform, as an exact rational."""
    target = uniform_target(matrix.params)
    return sum((abs(Fraction(load) - target) for load in matrix.loads()), Fraction(0))


def _spread(values: Sequence[int]) -> int:
    return max(values) - min(values) if values else 0


def class_set_spreads(matrix: EncodingMatrix) -> tuple[int, int]:
    p = matrix.params
    loads = matrix.loads()
    c1 = [loads[w] for w in range(p.n) if p.class_of(w) < p.r]
    c2 = [loads[w] for w in range(p.n) if p.class_of(w) >= p.r]
    return _spread(c1), _spread(c2)


def load_report(matrix: EncodingMatrix) -> LoadReport:
    spread_c1, spread_c2 = class_set_spreads(matrix)
    return LoadReport(
        loads=matrix.loads(),
        ds_value=distance_ds(matrix),
        total=matrix.support_size(),
        spread_c1=spread_c1,
        spread_c2=spread_c2,
    )


def balance_property(matrix: EncodingMatrix) -> bool:
    """True iff loads differ by at most one within each of the two class sets."""
    spread_c1, spread_c2 = class_set_spreads(matrix)
    return spread_c1 <= 1 and spread_c2 <= 1


def structural_failures(matrix: EncodingMatrix) -> list[str]:
    """Column sums, total support, and per-class coverage; empty list = sound."""
    p = matrix.params
    failures: list[str] = []
    for j, colsum in enumerate(matrix.column_sums()):
        if colsum != p.s + 1:
            failures.append(f"column {j} sums to {colsum}, expected {p.s + 1}")
            break
    if matrix.support_size() != p.k * (p.s + 1):
        failures.append(
            f"total support {matrix.support_size()}, expected {p.k * (p.s + 1)}"
        )
    for c in range(p.s + 1):
        counts = [0] * p.k
        for w in p.class_members(c):
            for j in matrix.rows[w]:
                counts[j] += 1
        if any(x != 1 for x in counts):
            failures.append(f"class {c} does not cover every partition exactly once")
    return failures


def _recovery_exact(matrix: EncodingMatrix, support: Iterable[int]) -> bool:
    # The selector identity in integer arithmetic: summing the chosen rows
    # of the 0/1 matrix must give the all-ones row.
    counts = [0] * matrix.params.k
    for w in support:
        for j in matrix.rows[w]:
            counts[j] += 1
    return all(c == 1 for c in counts)


def _check_straggler_set(matrix: EncodingMatrix, stragglers: tuple[int, ...]) -> str | None:
    scenario = StragglerScenario.from_stragglers(matrix.params.n, stragglers)
    try:
        vector = select_decoder(matrix.params, scenario)
    except InfeasibleScenarioError:
        return f"no decodable class for stragglers {list(stragglers)}"
    if not _recovery_exact(matrix, vector.support):
        return (
            f"recovery identity violated for stragglers {list(stragglers)}"
            f" via class {vector.class_index}"
        )
    return None


def _sweep(matrix: EncodingMatrix,
           scenarios: Sequence[tuple[int, ...]]) -> tuple[int, str | None]:
    failures = 0
    first: str | None = None
    for stragglers in scenarios:
        problem = _check_straggler_set(matrix, stragglers)
        if problem is not None:
            failures += 1
            if first is None:
                first = problem
    return failures, first


def verify_scheme(matrix: EncodingMatrix, samples: int | None = None,
                  seed: int | None = None, threads: int = 1) -> VerificationReport:
    """Check structure plus decode-and-recover over straggler sets.

    ``samples=None`` enumerates all C(n, s) straggler sets; otherwise
    ``samples`` sets are drawn uniformly with the given seed. Failures are
    reported, never raised.
    """
    p = matrix.params
    structure = structural_failures(matrix)
    if samples is None:
        mode = "exhaustive"
        scenarios = list(itertools.combinations(range(p.n), p.s))
    else:
        mode = "sampled"
        rng = random.Random(seed)
        scenarios = [tuple(sorted(rng.sample(range(p.n), p.s))) for _ in range(samples)]

    if threads > 1 and len(scenarios) > 1:
        chunk = math.ceil(len(scenarios) / threads)
        parts = [scenarios[i:i + chunk] for i in range(0, len(scenarios), chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda part: _sweep(matrix, part), parts))
        failures = sum(f for f, _ in results)
        first_failure = next((msg for _, msg in results if msg is not None), None)
    else:
        failures, first_failure = _sweep(matrix, scenarios)

    return VerificationReport(
        n=p.n, s=p.s, mode=mode, checked=len(scenarios), failures=failures,
        first_failure=first_failure, structure_failures=structure,
        seed=seed if samples is not None else None,
    )


def check_lemma(s_values: Iterable[int],
                a_values: Iterable[int] | None = None) -> list[tuple[int, int, int]]:
    """Scan n = s^2 + a and flag every (s, a) where t deviates from the rule.

    The rule: t == 1 exactly when a is s - 2, s - 1, or 2s, and t == 0 for
    every other a >= 0 (checked up to 4s by default). Returns violations as
    (s, a, t) triples; an empty list means the rule held everywhere.
    Intended for s >= 3, where the three special values are distinct.
    """
    violations: list[tuple[int, int, int]] = []
    for s in s_values:
        for a in (range(0, 4 * s + 1) if a_values is None else a_values):
            n = s * s + a
            if n <= s:
                continue
            t = derive_params(n, s).t
            expected = 1 if a in (s - 2, s - 1, 2 * s) else 0
            if t != expected:
                violations.append((s, a, t))
    return violations


def _min_abs_deviation(total: int, parts: int, target: Fraction,
                       cache: dict[tuple[int, int], Fraction]) -> Fraction:
    # Minimum of sum |b_i - target| over integer b_i >= 0 with sum b_i = total,
    # by enumerating compositions (stars and bars). Small inputs only.
    key = (total, parts)
    if key in cache:
        return cache[key]
    best: Fraction | None = None
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        bounds = (-1, *cuts, total + parts - 1)
        sizes = [bounds[i + 1] - bounds[i] - 1 for i in range(parts)]
        value = sum((abs(Fraction(b) - target) for b in sizes), Fraction(0))
        if best is None or value < best:
            best = value
    assert best is not None
    cache[key] = best
    return best


def min_class_structured_ds(params: CodeParams) -> Fraction:
    """Brute-force minimum of the uniformity distance over class-structured loads.

    Feasible load vectors are those where each congruence class's loads sum
    to k (each class covers every partition exactly once). The distance
    decomposes per class, so each class is minimized independently over all
    compositions of k. Exponential in k; meant for k <= 8.
    """
    target = uniform_target(params)
    cache: dict[tuple[int, int], Fraction] = {}
    total = Fraction(0)
    for c in range(params.s + 1):
        total += _min_abs_deviation(params.k, params.class_size(c), target, cache)
    return total
