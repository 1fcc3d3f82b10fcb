"""Fredholm integral equations ``u(s) = int_m^n F(s, t, u(t)) dt``.

The integral operator is discretized on a uniform grid with composite
trapezoid or Simpson weights, and the resulting finite-dimensional map is
iterated in the sup-norm metric over the grid nodes.  Kernels must accept
numpy arrays and broadcast over ``(s, t, u)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .contraction import ContractionSpec
from .errors import DivergenceError, DomainError, EvaluationError, PreconditionError
from .grid import GridFunction, QuadratureRule, sup_distance, uniform_grid
from .iterate import FixedPointResult, StoppingRule, divergence_factor, picard
from .metric import AlphaBetaParams, GridSpace, MetricSpace

log = logging.getLogger(__name__)

Kernel = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FredholmProblem:
    kernel: Kernel
    lower: float
    upper: float
    lipschitz: Optional[float] = None

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"need lower < upper, got [{self.lower}, {self.upper}]")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise DomainError(f"claimed Lipschitz constant must be > 0, got {self.lipschitz!r}")

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def grid(self, intervals: int) -> np.ndarray:
        return uniform_grid(self.lower, self.upper, intervals)


def _kernel_matrix(problem: FredholmProblem, s, t, u) -> np.ndarray:
    vals = np.asarray(problem.kernel(s, t, u), dtype=float)
    vals = np.broadcast_to(vals, np.broadcast_shapes(np.shape(s), np.shape(t), np.shape(u)))
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = np.unravel_index(int(np.flatnonzero(bad)[0]), vals.shape)
        sb = np.broadcast_to(s, vals.shape)[idx]
        tb = np.broadcast_to(t, vals.shape)[idx]
        raise EvaluationError(f"kernel is not finite at s={sb!r}, t={tb!r}",
                              witness=(float(sb), float(tb)))
    return vals


def apply_operator(problem: FredholmProblem, u: GridFunction,
                   quad: QuadratureRule) -> GridFunction:
    """``(Tu)(s_i) = sum_j w_j F(s_i, t_j, u(t_j))``."""
    nodes = u.nodes
    if not (np.isclose(nodes[0], problem.lower) and np.isclose(nodes[-1], problem.upper)):
        raise DomainError("grid function does not span the problem interval")
    if quad.weights.shape != nodes.shape:
        raise DomainError("quadrature weights do not match the grid")
    vals = _kernel_matrix(problem, nodes[:, None], nodes[None, :], u.values[None, :])
    return GridFunction(nodes, vals @ quad.weights)


def estimate_kernel_lipschitz(problem: FredholmProblem, *, n_samples: int = 10_000,
                              seed=0, value_range=None, probe_nodes: int = 101) -> float:
    """Sampled sup of ``|F(s,t,u) - F(s,t,v)| / |u - v|``.

    ``u`` and ``v`` are drawn from ``value_range``, by default ``[-R, R]``
    with ``R`` ten times the largest ``|F(s, t, 0)|`` on a probe grid
    (``R = 1`` when that is zero).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if value_range is None:
        probe = problem.grid(probe_nodes - 1)
        f0 = _kernel_matrix(problem, probe[:, None], probe[None, :], np.zeros((1, 1)))
        radius = 10.0 * float(np.max(np.abs(f0))) or 1.0
        value_range = (-radius, radius)
    rng = np.random.default_rng(seed)
    s, t = rng.uniform(problem.lower, problem.upper, (2, n_samples))
    u, v = rng.uniform(value_range[0], value_range[1], (2, n_samples))
    keep = u != v
    s, t, u, v = s[keep], t[keep], u[keep], v[keep]
    diff = np.abs(_kernel_matrix(problem, s, t, u) - _kernel_matrix(problem, s, t, v))
    return float(np.max(diff / np.abs(u - v))) if diff.size else 0.0


def contraction_factor(problem: FredholmProblem, lipschitz: float) -> float:
    """``Lambda * (n - m)``; the discrete operator contracts when this is < 1."""
    if not lipschitz > 0:
        raise ValueError(f"Lipschitz constant must be > 0, got {lipschitz!r}")
    return lipschitz * problem.length


def sup_grid_space(nodes) -> MetricSpace:
    return MetricSpace(GridSpace(nodes), sup_distance, AlphaBetaParams(1.0, 1.0), "sup-grid")


def solve(problem: FredholmProblem, M: int = 1000, quad: str = "trapezoid",
          stop: Optional[StoppingRule] = None, *, strict: bool = False, x0=None,
          seed=0, n_samples: int = 10_000) -> FixedPointResult:
    """Solve the discretized equation by Picard iteration from the zero function.

    The contraction factor ``Lambda*(n - m)`` uses the claimed Lipschitz
    constant, or a sampled estimate.  When the factor is not below 1 the
    run proceeds with a warning, or raises ``PreconditionError`` if
    ``strict``.  Residual growth over 8 consecutive steps raises
    ``DivergenceError``.
    """
    nodes = problem.grid(M)
    rule = QuadratureRule.build(quad, nodes)
    lam = problem.lipschitz
    if lam is None:
        lam = estimate_kernel_lipschitz(problem, n_samples=n_samples, seed=seed)
    factor = lam * problem.length

    warnings = []
    if factor >= 1:
        msg = (f"contraction factor Lambda*(n-m) = {factor:.6g} is not below 1; "
               f"uniqueness and convergence are not guaranteed")
        if strict:
            raise PreconditionError(msg, factor)
        warnings.append(msg)
    spec = ContractionSpec.banach(factor) if factor < 1 else None

    if x0 is None:
        x0 = GridFunction.constant(nodes, 0.0)
    elif not isinstance(x0, GridFunction):
        x0 = GridFunction.constant(nodes, x0)
    space = sup_grid_space(nodes)
    result = picard(lambda u: apply_operator(problem, u, rule), space, x0, spec, stop)
    result.warnings[:0] = warnings
    result.rate = factor

    growth = divergence_factor(result)
    if growth is not None:
        raise DivergenceError(
            f"residuals grew for 8 consecutive steps (factor {growth:.6g}, "
            f"Lambda*(n-m) = {factor:.6g})", growth)
    if np.any(result.fixed_point.values < 0):
        result.warnings.append("solution takes negative values")
    return result
