"""Construction of the binary worker-to-partition assignment matrix.

Workers sit in ``ell`` full blocks of s + 1 consecutive indices plus a
remainder block of ``r``. Each congruence class mod (s + 1) owns one worker
per block it spans, and those workers tile the partitions {0..k-1} with
contiguous intervals, left to right in block order:

* classes 0..r-1 span all ell + 1 blocks; per-block widths are
  (s + 1, ..., s + 1, s, ..., s) when ell + r > s and
  (lambda_ + 1, ..., lambda_) otherwise;
* classes r..s span the ell full blocks only; widths are s + t + 1
  everywhere when q == 0, else s + t + 2 in the first q blocks.

Either way the widths of one class sum to k, so every class covers every
partition exactly once and each column of the merged matrix sums to s + 1.
Widths within a class differ by at most one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .params import CodeParams, ParameterError


@dataclass(frozen=True)
class EncodingMatrix:
    """Binary n x k assignment matrix, one sorted partition tuple per worker.

    ``intervals`` holds the (start, width) block metadata when every row is
    contiguous (always true for the unpermuted construction), else None.
    """

    params: CodeParams
    rows: tuple[tuple[int, ...], ...]
    intervals: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        p = self.params
        if len(self.rows) != p.n:
            raise ParameterError(f"expected {p.n} rows, got {len(self.rows)}")
        for i, row in enumerate(self.rows):
            if any(not 0 <= j < p.k for j in row):
                raise ParameterError(f"row {i} has partition indices outside 0..{p.k - 1}")
            if list(row) != sorted(set(row)):
                raise ParameterError(f"row {i} must be sorted and duplicate-free")

    @classmethod
    def from_rows(cls, params: CodeParams, rows: Sequence[Iterable[int]]) -> "EncodingMatrix":
        """Build from arbitrary per-worker partition sets (e.g. a triplets file)."""
        norm = tuple(tuple(sorted(set(row))) for row in rows)
        intervals = None
        if all(not row or row[-1] - row[0] + 1 == len(row) for row in norm):
            intervals = tuple((row[0] if row else 0, len(row)) for row in norm)
        return cls(params=params, rows=norm, intervals=intervals)

    def load(self, worker: int) -> int:
        return len(self.rows[worker])

    def loads(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.rows)

    def class_of(self, worker: int) -> int:
        return self.params.class_of(worker)

    def column_sums(self) -> list[int]:
        sums = [0] * self.params.k
        for row in self.rows:
            for j in row:
                sums[j] += 1
        return sums

    def support_size(self) -> int:
        return sum(len(row) for row in self.rows)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.params.n, self.params.k), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            dense[i, list(row)] = 1
        return dense

    def to_triplets(self) -> list[tuple[int, int]]:
        """(worker, partition) pairs for every 1-entry, row-major."""
        return [(i, j) for i, row in enumerate(self.rows) for j in row]


@dataclass(frozen=True)
class BipartiteView:
    """The assignment matrix read as a worker/partition bipartite graph."""

    workers: int
    partitions: int
    edges: tuple[tuple[int, int], ...]


def _c1_widths(p: CodeParams) -> list[int]:
    # Per-block interval widths for a class in 0..r-1, blocks left to right
    # (the remainder block is last). Both branches sum to n = k.
    if p.ell + p.r > p.s:
        return [p.s + 1] * (p.ell + p.r - p.s) + [p.s] * (p.s + 1 - p.r)
    return [p.lambda_ + 1] * p.rtilde + [p.lambda_] * (p.ell + 1 - p.rtilde)


def _c2_widths(p: CodeParams) -> list[int]:
    # Per-block widths for a class in r..s, which spans the ell full blocks
    # only; n = ell * (s + t + 1) + q makes these sum to k.
    if p.q == 0:
        return [p.s + p.t + 1] * p.ell
    return [p.s + p.t + 2] * p.q + [p.s + p.t + 1] * (p.ell - p.q)


def _assign_class(params: CodeParams, class_index: int, widths: list[int],
                  out: dict[int, tuple[int, int]]) -> None:
    start = 0
    for block, width in enumerate(widths):
        out[block * (params.s + 1) + class_index] = (start, width)
        start += width
    assert start == params.k, "class widths must tile the partition axis"


def build_c1(params: CodeParams) -> dict[int, tuple[int, int]]:
    """Interval assignment for classes 0..r-1 (the ones with a remainder-block row).

    Returns worker -> (start, width); empty when r == 0.
    """
    rows: dict[int, tuple[int, int]] = {}
    if params.r == 0:
        return rows
    widths = _c1_widths(params)
    for i in range(params.r):
        _assign_class(params, i, widths, rows)
    return rows


def build_c2(params: CodeParams) -> dict[int, tuple[int, int]]:
    """Interval assignment for classes r..s, which live in the full blocks only."""
    rows: dict[int, tuple[int, int]] = {}
    widths = _c2_widths(params)
    for i in range(params.r, params.s + 1):
        _assign_class(params, i, widths, rows)
    return rows


def build_encoding(params: CodeParams,
                   column_order: Sequence[int] | None = None) -> EncodingMatrix:
    """Merge the two class-set assignments into the full n x k binary matrix.

    ``column_order`` optionally relabels partitions through one global
    permutation (entry j is the new index of partition j); the scheme's
    coverage and robustness properties are permutation-invariant. Off by
    default so the matrix is the deterministic block construction.
    """
    if params.k != params.n:
        raise ParameterError(f"encoder requires k == n, got k={params.k}, n={params.n}")
    assignment = build_c1(params)
    assignment.update(build_c2(params))
    assert len(assignment) == params.n, "every worker must receive exactly one interval"
    intervals = tuple(assignment[w] for w in range(params.n))
    rows = tuple(tuple(range(start, start + width)) for start, width in intervals)
    if column_order is not None:
        perm = tuple(column_order)
        if sorted(perm) != list(range(params.k)):
            raise ParameterError("column_order must be a permutation of range(k)")
        rows = tuple(tuple(sorted(perm[j] for j in row)) for row in rows)
        return EncodingMatrix(params=params, rows=rows, intervals=None)
    return EncodingMatrix(params=params, rows=rows, intervals=intervals)


def to_bipartite(matrix: EncodingMatrix) -> BipartiteView:
    """Edge list (worker, partition) of the assignment graph; k*(s+1) edges."""
    return BipartiteView(
        workers=matrix.params.n,
        partitions=matrix.params.k,
        edges=tuple(matrix.to_triplets()),
    )
