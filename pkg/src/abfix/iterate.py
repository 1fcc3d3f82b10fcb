"""Picard iteration with residual-based stopping and the Cauchy tail bound."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Optional

from .contraction import ContractionSpec, _image, derived_rate
from .errors import ClosureError
from .metric import AlphaBetaParams, MetricSpace

log = logging.getLogger(__name__)

StopMode = Literal["a-posteriori", "a-priori-if-available"]

STAGNATION_STEPS = 8


@dataclass(frozen=True)
class StoppingRule:
    """When to stop iterating.

    ``tol`` is in distance units.  In ``a-posteriori`` mode a step is
    accepted once ``G(x_n, x_{n+1}) <= tol``.  In ``a-priori-if-available``
    mode, when a contraction rate K with ``beta*K < 1`` is known, the step
    must also satisfy ``alpha/(1 - beta*K) * G(x_n, x_{n+1}) <= tol``, which
    bounds the distance from ``x_n`` to every later iterate by ``tol``.
    """

    tol: float = 1e-10
    max_iter: int = 10_000
    mode: StopMode = "a-priori-if-available"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol!r}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if self.mode not in ("a-posteriori", "a-priori-if-available"):
            raise ValueError(f"unknown stopping mode {self.mode!r}")


@dataclass
class FixedPointResult:
    """Outcome of a Picard run.

    ``trace`` holds every iterate computed, so ``residuals[n]`` is the
    distance between ``trace[n]`` and ``trace[n + 1]``.  On convergence
    ``fixed_point`` is ``trace[n_iter]``, the iterate whose measured
    residual passed the stopping test.
    """

    fixed_point: Any
    trace: list
    residuals: list
    n_iter: int
    termination: str
    a_priori_bounds: Optional[list] = None
    rate: Optional[float] = None
    params: Optional[AlphaBetaParams] = None
    planned_iterations: Optional[int] = None
    warnings: list = field(default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.residuals[min(self.n_iter, len(self.residuals) - 1)]

    @property
    def bound_available(self) -> bool:
        return self.a_priori_bounds is not None


def a_priori_bound(params: AlphaBetaParams, K: float, d01: float,
                   n: int) -> Optional[float]:
    """``alpha * K**n / (1 - beta*K) * d01``, or None when ``beta*K >= 1``."""
    if not 0 <= K < 1:
        raise ValueError(f"K must lie in [0, 1), got {K!r}")
    if d01 < 0 or n < 0:
        raise ValueError("d01 and n must be nonnegative")
    if params.beta * K >= 1:
        return None
    return params.alpha * K ** n / (1 - params.beta * K) * d01


def iterations_needed(params: AlphaBetaParams, K: float, d01: float,
                      tol: float) -> Optional[int]:
    """Smallest n whose a priori bound is at most ``tol`` (None if unavailable)."""
    if not 0 < K < 1:
        raise ValueError(f"K must lie in (0, 1), got {K!r}")
    if not (d01 > 0 and tol > 0):
        raise ValueError("d01 and tol must be positive")
    if params.beta * K >= 1:
        return None
    # summed logs stay finite for subnormal d01
    log_ratio = (math.log(tol) + math.log1p(-params.beta * K)
                 - math.log(params.alpha) - math.log(d01))
    n = max(0, math.ceil(log_ratio / math.log(K)))
    # guard the ceil against rounding at the boundary
    while n > 0 and a_priori_bound(params, K, d01, n - 1) <= tol:
        n -= 1
    while a_priori_bound(params, K, d01, n) > tol:
        n += 1
    return n


def picard(fmap: Callable, space: MetricSpace, x0, spec: Optional[ContractionSpec] = None,
           stop: Optional[StoppingRule] = None,
           params: Optional[AlphaBetaParams] = None) -> FixedPointResult:
    """Iterate ``x_{n+1} = fmap(x_n)`` from ``x0``.

    Stops on acceptance of a residual (``converged``), after
    ``stop.max_iter`` map applications (``max-iter``), or when the residual
    has failed to decrease for 8 consecutive steps (``stagnated``).  When
    ``spec`` is given and ``beta*K < 1`` the a priori bounds
    ``alpha*K**n/(1 - beta*K)*G(x0, x1)`` are attached for every n in the
    trace.
    """
    stop = stop or StoppingRule()
    params = params or space.params or AlphaBetaParams()
    if not space.domain.contains(x0):
        raise ClosureError(f"start point {x0!r} is outside the domain", witness=(x0,))
    K = derived_rate(spec) if spec is not None else None
    tail_ok = K is not None and params.beta * K < 1
    use_tail = tail_ok and stop.mode == "a-priori-if-available"

    trace, residuals = [x0], []
    x = x0
    termination, n_iter = "max-iter", None
    non_decreasing = 0
    for n in range(stop.max_iter):
        x_next = _image(fmap, space, x)
        r = space.G(x, x_next)
        trace.append(x_next)
        residuals.append(r)
        if r <= stop.tol and (not use_tail or a_priori_bound(params, K, r, 0) <= stop.tol):
            termination, n_iter = "converged", n
            break
        if n and r >= residuals[-2]:
            non_decreasing += 1
            if non_decreasing >= STAGNATION_STEPS:
                termination = "stagnated"
                break
        else:
            non_decreasing = 0
        x = x_next
    if n_iter is None:
        n_iter = len(residuals)

    result = FixedPointResult(trace[n_iter], trace, residuals, n_iter, termination,
                              rate=K, params=params)
    if tail_ok:
        result.a_priori_bounds = [a_priori_bound(params, K, residuals[0], k)
                                  for k in range(len(trace))]
        if 0 < K and residuals[0] > 0:
            result.planned_iterations = iterations_needed(params, K, residuals[0], stop.tol)
            if termination == "converged" and n_iter > result.planned_iterations:
                result.warnings.append(
                    f"converged after {n_iter} steps although the a priori bound "
                    f"promised {result.planned_iterations}; the contraction "
                    f"constants may not hold for this map")
    elif K is not None:
        result.warnings.append(
            f"a priori bound unavailable: beta*K = {params.beta * K:.6g} >= 1")
    if termination != "converged":
        log.info("picard stopped without convergence: %s after %d steps",
                 termination, len(residuals))
    return result


def trace_rows(result: FixedPointResult) -> list[tuple]:
    """``(iteration, residual, a_priori_bound or None)`` per residual."""
    bounds = result.a_priori_bounds
    return [(n, r, bounds[n] if bounds is not None else None)
            for n, r in enumerate(result.residuals)]


def write_trace_csv(result: FixedPointResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "residual", "a_priori_bound"])
        for n, r, b in trace_rows(result):
            w.writerow([n, repr(r), "" if b is None else repr(b)])


def divergence_factor(result: FixedPointResult) -> Optional[float]:
    """Geometric-mean growth factor if the last 8 residual ratios all exceed 1."""
    r = result.residuals
    if result.termination != "stagnated" or len(r) <= STAGNATION_STEPS:
        return None
    tail = r[-STAGNATION_STEPS - 1:]
    if any(b <= a for a, b in zip(tail, tail[1:])) or tail[0] == 0:
        return None
    return (tail[-1] / tail[0]) ** (1 / STAGNATION_STEPS)
