"""Initial value problems ``u' = f(s, u), u(s0) = r0`` via Picard iteration.

The equivalent integral equation ``u(s) = r0 + int_{s0}^{s} f(t, u(t)) dt``
is discretized on a symmetric grid over ``[s0 - h, s0 + h]`` with ``s0`` as
the middle node, and the running integral is a cumulative trapezoid sum
taken outward from ``s0`` in both directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .contraction import ContractionSpec
from .errors import DivergenceError, DomainError, EvaluationError, PreconditionError
from .fredholm import sup_grid_space
from .grid import GridFunction
from .iterate import FixedPointResult, StoppingRule, divergence_factor, picard

H_MARGIN = 0.05

Rhs = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OdeProblem:
    rhs: Rhs
    s0: float
    r0: float
    h: float
    lipschitz: Optional[float] = None

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError(f"half-width h must be > 0, got {self.h!r}")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise DomainError(f"claimed Lipschitz constant must be > 0, got {self.lipschitz!r}")

    def grid(self, nodes_per_side: int) -> np.ndarray:
        """``2*nodes_per_side + 1`` nodes with ``s0`` exactly in the middle."""
        if nodes_per_side < 1:
            raise DomainError(f"nodes_per_side must be >= 1, got {nodes_per_side}")
        nodes = self.s0 + self.h * np.linspace(-1.0, 1.0, 2 * nodes_per_side + 1)
        nodes[nodes_per_side] = self.s0
        return nodes


def _rhs_values(problem: OdeProblem, s, u) -> np.ndarray:
    vals = np.broadcast_to(np.asarray(problem.rhs(s, u), dtype=float),
                           np.broadcast_shapes(np.shape(s), np.shape(u)))
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        sb = float(np.broadcast_to(s, vals.shape).flat[i])
        raise EvaluationError(f"rhs is not finite at s={sb!r}", witness=(sb,))
    return vals


def picard_step(problem: OdeProblem, u: GridFunction) -> GridFunction:
    """One application of ``u -> r0 + int_{s0}^{s} f(t, u(t)) dt``."""
    nodes = u.nodes
    mid = (nodes.size - 1) // 2
    if nodes.size % 2 == 0 or nodes[mid] != problem.s0:
        raise DomainError("grid must be symmetric with s0 as its middle node")
    g = _rhs_values(problem, nodes, u.values)
    right = cumulative_trapezoid(g[mid:], nodes[mid:], initial=0.0)
    # decreasing abscissae give the signed integral from s0 down to s_i
    left = cumulative_trapezoid(g[mid::-1], nodes[mid::-1], initial=0.0)
    integral = np.concatenate([left[:0:-1], right])
    return GridFunction(nodes, problem.r0 + integral)


def contraction_factor(problem: OdeProblem, lipschitz: float) -> float:
    """``Lambda * h``; the Picard operator contracts when this is < 1."""
    if not lipschitz > 0:
        raise ValueError(f"Lipschitz constant must be > 0, got {lipschitz!r}")
    return lipschitz * problem.h


def estimate_lipschitz(problem: OdeProblem, *, n_samples: int = 10_000, seed=0,
                       value_range=None, delta: float = 1e-6,
                       probe_nodes: int = 201) -> float:
    """Sampled sup of ``|df/du|`` by central differences.

    ``u`` is drawn from ``value_range``, by default the tube
    ``[r0 - R, r0 + R]`` with ``R`` ten times the largest ``|f(s, r0)|`` on
    a probe grid (``R = 1`` when that is zero).
    """
    if value_range is None:
        probe = problem.s0 + problem.h * np.linspace(-1.0, 1.0, probe_nodes)
        radius = 10.0 * float(np.max(np.abs(_rhs_values(problem, probe, problem.r0)))) or 1.0
        value_range = (problem.r0 - radius, problem.r0 + radius)
    rng = np.random.default_rng(seed)
    s = rng.uniform(problem.s0 - problem.h, problem.s0 + problem.h, n_samples)
    u = rng.uniform(value_range[0], value_range[1], n_samples)
    fp = _rhs_values(problem, s, u + delta)
    fm = _rhs_values(problem, s, u - delta)
    return float(np.max(np.abs(fp - fm) / (2 * delta)))


def solve_ivp(problem: OdeProblem, nodes_per_side: int = 500,
              stop: Optional[StoppingRule] = None, *, strict: bool = False,
              seed=0, n_samples: int = 10_000) -> FixedPointResult:
    """Picard iteration from the constant function ``r0``.

    When ``Lambda*h >= 1`` the warning (or, if ``strict``, the
    ``PreconditionError``) names the largest admissible half-width
    ``(1 - 0.05)/Lambda``; the interval itself is never changed.
    """
    nodes = problem.grid(nodes_per_side)
    lam = problem.lipschitz
    if lam is None:
        lam = estimate_lipschitz(problem, n_samples=n_samples, seed=seed)
    factor = lam * problem.h

    warnings = []
    if factor >= 1:
        msg = (f"contraction factor Lambda*h = {factor:.6g} is not below 1; "
               f"largest admissible h is {(1 - H_MARGIN) / lam:.6g}")
        if strict:
            raise PreconditionError(msg, factor)
        warnings.append(msg)
    spec = ContractionSpec.banach(factor) if factor < 1 else None

    x0 = GridFunction.constant(nodes, problem.r0)
    result = picard(lambda u: picard_step(problem, u), sup_grid_space(nodes), x0, spec, stop)
    result.warnings[:0] = warnings
    result.rate = factor

    growth = divergence_factor(result)
    if growth is not None:
        raise DivergenceError(
            f"residuals grew for 8 consecutive steps (factor {growth:.6g}, "
            f"Lambda*h = {factor:.6g})", growth)
    if np.any(result.fixed_point.values < 0):
        result.warnings.append("solution takes negative values")
    return result
