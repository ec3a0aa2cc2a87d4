"""Integer parameters of the binary straggler-tolerant assignment scheme.

Everything downstream is derived from the worker count ``n`` and the
straggler tolerance ``s`` by repeated Euclidean division:

    n = ell * (s + 1) + r              0 <= r < s + 1
    r = t * ell + q                    0 <= q < ell
    n = lambda_ * (ell + 1) + rtilde   0 <= rtilde < ell + 1

Workers are grouped into congruence classes mod (s + 1). ``ell`` counts the
full blocks of s + 1 consecutive worker indices; ``r`` is the size of the
trailing remainder block. The secondary parameters (t, q, lambda_, rtilde)
set the per-block interval widths used by the encoder, and ``f = n - s`` is
the number of completed tasks the aggregator waits for.

All indices are 0-based: workers 0..n-1, partitions 0..k-1.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParameterError(ValueError):
    """Raised when (n, s) or a derived parameter set is out of domain."""


@dataclass(frozen=True)
class CodeParams:
    """All division parameters for one (n, s) configuration.

    Construct through :func:`derive_params`; direct construction re-checks
    every identity and rejects inconsistent values.
    """

    n: int        # worker count
    k: int        # partition count (== n in this version)
    s: int        # tolerated stragglers, 0 <= s < n
    ell: int      # n // (s + 1), number of full blocks
    r: int        # n mod (s + 1), remainder-block size
    t: int        # r // ell
    q: int        # r mod ell
    lambda_: int  # n // (ell + 1)
    rtilde: int   # n mod (ell + 1)
    f: int        # n - s, completed tasks needed for recovery

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ParameterError(f"worker count must be positive, got n={self.n}")
        if not 0 <= self.s < self.n:
            raise ParameterError(
                f"straggler count must satisfy 0 <= s < n, got s={self.s}, n={self.n}"
            )
        if self.k != self.n:
            raise ParameterError(f"only k == n is supported, got k={self.k}, n={self.n}")
        ok = (
            self.n == self.ell * (self.s + 1) + self.r
            and 0 <= self.r < self.s + 1
            and self.r == self.t * self.ell + self.q
            and 0 <= self.q < self.ell
            and self.n == self.lambda_ * (self.ell + 1) + self.rtilde
            and 0 <= self.rtilde < self.ell + 1
            and self.n == self.ell * (self.s + self.t + 1) + self.q
            and self.f == self.n - self.s
        )
        if not ok:
            raise ParameterError(f"inconsistent parameter set: {self}")

    # Congruence-class helpers shared by the encoder and decoder.

    def class_of(self, worker: int) -> int:
        """Congruence class of a worker index."""
        return worker % (self.s + 1)

    def class_members(self, index: int) -> tuple[int, ...]:
        """All workers in class ``index``, ascending."""
        if not 0 <= index <= self.s:
            raise ParameterError(f"class index must be in 0..{self.s}, got {index}")
        return tuple(range(index, self.n, self.s + 1))

    def class_size(self, index: int) -> int:
        """ell + 1 for the first r classes (they own a remainder-block row), ell after."""
        if not 0 <= index <= self.s:
            raise ParameterError(f"class index must be in 0..{self.s}, got {index}")
        return self.ell + 1 if index < self.r else self.ell

    def as_dict(self) -> dict[str, int]:
        return {
            "n": self.n, "k": self.k, "s": self.s, "ell": self.ell, "r": self.r,
            "t": self.t, "q": self.q, "lambda": self.lambda_, "rtilde": self.rtilde,
            "f": self.f,
        }


def derive_params(n: int, s: int) -> CodeParams:
    """Derive every scheme parameter from (n, s) by Euclidean division.

    Pure and deterministic. Raises :class:`ParameterError` unless
    0 <= s < n.
    """
    if n <= 0:
        raise ParameterError(f"worker count must be positive, got n={n}")
    if not 0 <= s < n:
        raise ParameterError(f"straggler count must satisfy 0 <= s < n, got s={s}, n={n}")
    ell, r = divmod(n, s + 1)
    t, q = divmod(r, ell)  # ell >= 1 because s < n
    lambda_, rtilde = divmod(n, ell + 1)
    return CodeParams(
        n=n, k=n, s=s, ell=ell, r=r, t=t, q=q,
        lambda_=lambda_, rtilde=rtilde, f=n - s,
    )
