"""Grid functions on uniform nodes and the quadrature rules used over them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, EvaluationError

QuadratureKind = Literal["trapezoid", "simpson"]


def uniform_grid(lower: float, upper: float, intervals: int) -> np.ndarray:
    """Return ``intervals + 1`` equally spaced nodes from lower to upper."""
    if not lower < upper:
        raise DomainError(f"grid needs lower < upper, got [{lower}, {upper}]")
    if intervals < 1:
        raise DomainError(f"grid needs at least one interval, got {intervals}")
    return np.linspace(lower, upper, intervals + 1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real function on a uniform grid.

    Distances between grid functions are taken in the sup norm over the
    nodes, see :func:`sup_distance`.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("a grid function needs at least two nodes")
        if values.shape != nodes.shape:
            raise DomainError(
                f"values shape {values.shape} does not match nodes {nodes.shape}")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise EvaluationError(
                f"non-finite value at node {nodes[bad]!r}", witness=(nodes[bad],))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, nodes, c: float) -> GridFunction:
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.full_like(nodes, float(c)))

    @classmethod
    def from_callable(cls, nodes, fn) -> GridFunction:
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.broadcast_to(np.asarray(fn(nodes), dtype=float),
                                          nodes.shape).copy())

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    def __len__(self):
        return self.nodes.size


def sup_distance(u: GridFunction, v: GridFunction) -> float:
    """Max over nodes of ``|u - v|``."""
    if u.nodes.shape != v.nodes.shape:
        raise DomainError("grid functions live on different grids")
    return float(np.max(np.abs(u.values - v.values)))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Composite quadrature weights over a uniform grid."""

    kind: QuadratureKind
    weights: np.ndarray

    @classmethod
    def build(cls, kind: QuadratureKind, nodes) -> QuadratureRule:
        nodes = np.asarray(nodes, dtype=float)
        intervals = nodes.size - 1
        if intervals < 1:
            raise DomainError("quadrature needs at least two nodes")
        step = (nodes[-1] - nodes[0]) / intervals
        if kind == "trapezoid":
            w = np.full(nodes.size, step)
            w[0] = w[-1] = step / 2
        elif kind == "simpson":
            if intervals % 2:
                raise DomainError(
                    f"simpson needs an even number of intervals, got {intervals}")
            w = np.full(nodes.size, 2.0)
            w[1::2] = 4.0
            w[0] = w[-1] = 1.0
            w *= step / 3
        else:
            raise DomainError(f"unknown quadrature kind {kind!r}")
        return cls(kind, w)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))
