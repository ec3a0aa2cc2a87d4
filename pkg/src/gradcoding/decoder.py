"""Online selection of a decoding class and gradient recovery.

Each congruence class doubles as a decoding vector: its 0/1 indicator over
workers. Because one class covers every partition exactly once, summing the
encoded results of a fully received class reproduces the total gradient
with plain additions, no scaling. A counting argument makes the selection
total: staying one worker short of every class caps the received count at
r*ell + (s+1-r)*(ell-1) = n - s - 1, so once n - s results are in, some
class is fully present and scanning the classes always finds it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .params import CodeParams, ParameterError


class InfeasibleScenarioError(RuntimeError):
    """No congruence class is fully contained in the received workers."""


class MissingWorkerError(KeyError):
    """A worker on the decoding vector's support has no result."""


@dataclass
class ScanStats:
    """Mutable counter for instrumenting selector cost."""

    membership_checks: int = 0


@dataclass(frozen=True)
class DecodingVector:
    """0/1 selector over workers: the indicator of one congruence class."""

    class_index: int
    support: tuple[int, ...]

    def to_indicator(self, n: int) -> tuple[int, ...]:
        chosen = set(self.support)
        return tuple(1 if w in chosen else 0 for w in range(n))


@dataclass(frozen=True)
class StragglerScenario:
    """Received-indicator vector over the n workers (1 = result arrived)."""

    received: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(v not in (0, 1) for v in self.received):
            raise ParameterError("received indicator entries must be 0 or 1")

    @classmethod
    def from_stragglers(cls, n: int, stragglers: Iterable[int]) -> "StragglerScenario":
        missing = set(stragglers)
        if any(not 0 <= w < n for w in missing):
            raise ParameterError(f"straggler indices must be in 0..{n - 1}")
        return cls(tuple(0 if w in missing else 1 for w in range(n)))

    @classmethod
    def from_received(cls, n: int, workers: Iterable[int]) -> "StragglerScenario":
        arrived = set(workers)
        if any(not 0 <= w < n for w in arrived):
            raise ParameterError(f"worker indices must be in 0..{n - 1}")
        return cls(tuple(1 if w in arrived else 0 for w in range(n)))

    @property
    def n(self) -> int:
        return len(self.received)

    @property
    def index_set(self) -> frozenset[int]:
        return frozenset(w for w, v in enumerate(self.received) if v)

    @property
    def stragglers(self) -> tuple[int, ...]:
        return tuple(w for w, v in enumerate(self.received) if not v)


def class_vector(params: CodeParams, index: int) -> DecodingVector:
    """Decoding vector of class ``index``: support {w : w = index mod (s+1)}."""
    if not 0 <= index <= params.s:
        raise ParameterError(f"class index must be in 0..{params.s}, got {index}")
    return DecodingVector(class_index=index, support=params.class_members(index))


def scan_order(params: CodeParams) -> list[int]:
    """Class scan order: the smaller classes r..s first, then 0..r-1.

    For r == 0 this is plain 0..s. Checking the ell-sized classes first
    keeps the expected scan short.
    """
    return list(range(params.r, params.s + 1)) + list(range(params.r))


def _class_complete(params: CodeParams, index: int, received: tuple[int, ...],
                    stats: ScanStats | None) -> bool:
    for w in range(index, params.n, params.s + 1):
        if stats is not None:
            stats.membership_checks += 1
        if not received[w]:
            return False
    return True


def _validate(params: CodeParams, scenario: StragglerScenario) -> None:
    if scenario.n != params.n:
        raise ParameterError(
            f"scenario covers {scenario.n} workers, parameters say {params.n}"
        )


def select_decoder(params: CodeParams, scenario: StragglerScenario,
                   stats: ScanStats | None = None) -> DecodingVector:
    """Pick the first fully received class in scan order.

    Guaranteed to succeed whenever at least n - s workers responded; with
    fewer, it still returns a complete class if one exists and raises
    :class:`InfeasibleScenarioError` otherwise.
    """
    _validate(params, scenario)
    for c in scan_order(params):
        if _class_complete(params, c, scenario.received, stats):
            return class_vector(params, c)
    raise InfeasibleScenarioError(
        f"no complete class among received workers {sorted(scenario.index_set)}"
    )


def select_decoder_fast(params: CodeParams, scenario: StragglerScenario,
                        stats: ScanStats | None = None) -> DecodingVector:
    """Like :func:`select_decoder` but skips the final class check.

    If no earlier class is complete and at least n - s workers responded,
    the last class in scan order must be complete by counting, so it is
    returned unchecked. Below that threshold the last class is checked
    after all, keeping the error behavior of :func:`select_decoder`.
    """
    _validate(params, scenario)
    order = scan_order(params)
    for c in order[:-1]:
        if _class_complete(params, c, scenario.received, stats):
            return class_vector(params, c)
    last = order[-1]
    if len(scenario.index_set) >= params.f:
        return class_vector(params, last)
    if _class_complete(params, last, scenario.received, stats):
        return class_vector(params, last)
    raise InfeasibleScenarioError(
        f"no complete class among received workers {sorted(scenario.index_set)}"
    )


def recover_gradient(vector: DecodingVector, encoded: Mapping[int, Any]) -> Any:
    """Sum the encoded results over the vector's support, ascending worker index.

    With encoded rows equal to the per-worker partial-gradient sums, the
    result is the total gradient: pure addition, so it is exact on integer
    inputs and reassociation-only on floats.
    """
    missing = [w for w in vector.support if w not in encoded]
    if missing:
        raise MissingWorkerError(f"no encoded result for workers {missing}")
    total = None
    for w in vector.support:
        total = encoded[w] if total is None else total + encoded[w]
    return total
