"""(alpha, beta)-metric spaces: domains, axiom checks and constant estimation.

A distance ``G`` is an (alpha, beta)-metric when it is nonnegative,
symmetric, vanishes exactly on the diagonal and satisfies the relaxed
triangle inequality ``G(x, y) <= alpha*G(x, z) + beta*G(z, y)``.  Every
check here works on a finite sample of points, so a pass is evidence and
never a proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, EvaluationError
from .grid import GridFunction, sup_distance, uniform_grid

EPS_AXIOM = 1e-12

DEFAULT_ALPHA_GRID = (1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0)

Point = Any
Distance = Callable[[Point, Point], float]


@dataclass(frozen=True)
class AlphaBetaParams:
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 1.0:
                raise DomainError(f"{name} must be a finite real >= 1, got {value!r}")


# --- domains ---------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lower, upper]`` sampled uniformly."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DomainError("interval bounds must be finite; use RealLine")
        if self.lower > self.upper:
            raise DomainError(f"empty interval [{self.lower}, {self.upper}]")

    def sample(self, rng: np.random.Generator, n: int) -> list:
        return [float(v) for v in rng.uniform(self.lower, self.upper, n)]

    def contains(self, x) -> bool:
        try:
            x = float(x)
        except (TypeError, ValueError):
            return False
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class RealLine:
    """The whole real line; samples are drawn from ``[-scale, scale]``."""

    scale: float = 10.0

    def sample(self, rng: np.random.Generator, n: int) -> list:
        return [float(v) for v in rng.uniform(-self.scale, self.scale, n)]

    def contains(self, x) -> bool:
        try:
            return math.isfinite(float(x))
        except (TypeError, ValueError):
            return False


@dataclass(frozen=True)
class FiniteSet:
    """An explicit list of points.

    When the requested number of k-tuples is at least ``len(points)**k`` the
    tuples are enumerated exhaustively instead of sampled.
    """

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise DomainError("finite domain has no points")

    def sample(self, rng: np.random.Generator, n: int) -> list:
        idx = rng.integers(0, len(self.points), n)
        return [self.points[i] for i in idx]

    def contains(self, x) -> bool:
        return any(_same_point(x, p) for p in self.points)


@dataclass(frozen=True, eq=False)
class GridSpace:
    """Grid functions on fixed nodes, sampled with values in ``value_range``."""

    nodes: np.ndarray
    value_range: tuple = (-1.0, 1.0)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("grid space needs at least two nodes")
        object.__setattr__(self, "nodes", nodes)

    def sample(self, rng: np.random.Generator, n: int) -> list:
        lo, hi = self.value_range
        vals = rng.uniform(lo, hi, (n, self.nodes.size))
        return [GridFunction(self.nodes, v) for v in vals]

    def contains(self, x) -> bool:
        return (isinstance(x, GridFunction) and x.nodes.shape == self.nodes.shape
                and bool(np.all(np.isfinite(x.values))))


def _same_point(a, b) -> bool:
    if isinstance(a, GridFunction) or isinstance(b, GridFunction):
        return (isinstance(a, GridFunction) and isinstance(b, GridFunction)
                and np.array_equal(a.values, b.values))
    return a == b


# --- spaces ----------------------------------------------------------------

@dataclass(frozen=True)
class MetricSpace:
    """A domain with a distance function and an optional (alpha, beta) claim."""

    domain: Any
    distance: Distance
    params: Optional[AlphaBetaParams] = None
    name: str = ""

    def G(self, x, y) -> float:
        """Evaluate the distance, rejecting negative or non-finite values."""
        d = float(self.distance(x, y))
        if not math.isfinite(d):
            raise EvaluationError(f"distance is not finite at ({x!r}, {y!r})",
                                  witness=(x, y))
        if d < 0:
            raise EvaluationError(f"distance is negative ({d}) at ({x!r}, {y!r})",
                                  witness=(x, y))
        return d


def abs_distance(x, y) -> float:
    return abs(x - y)


def abs_squared_distance(x, y) -> float:
    return (x - y) ** 2


def builtin_space(name: str, domain=None) -> MetricSpace:
    """Return one of the named spaces ``abs``, ``abs-squared``, ``sup-grid``."""
    if name == "abs":
        return MetricSpace(domain or Interval(0.0, 1.0), abs_distance,
                           AlphaBetaParams(1.0, 1.0), name)
    if name == "abs-squared":
        return MetricSpace(domain or RealLine(), abs_squared_distance,
                           AlphaBetaParams(2.0, 2.0), name)
    if name == "sup-grid":
        return MetricSpace(domain or GridSpace(uniform_grid(0.0, 1.0, 100)),
                           sup_distance, AlphaBetaParams(1.0, 1.0), name)
    raise KeyError(f"unknown built-in space {name!r}")


# --- sampling --------------------------------------------------------------

def sample_tuples(domain, k: int, n: int, seed=0,
                  witnesses: Iterable[Sequence] = ()) -> list[tuple]:
    """Draw ``n`` k-tuples from ``domain`` and append the witness tuples.

    Finite domains small enough to enumerate are enumerated in full.
    """
    witnesses = [tuple(w) for w in witnesses]
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    if n == 0 and not witnesses:
        raise ValueError("need at least one sampled or witness tuple")
    if isinstance(domain, FiniteSet) and n >= len(domain.points) ** k:
        return list(itertools.product(domain.points, repeat=k)) + witnesses
    rng = np.random.default_rng(seed)
    pts = domain.sample(rng, n * k)
    return [tuple(pts[i * k:(i + 1) * k]) for i in range(n)] + witnesses


def sample_triples(space: MetricSpace, n_triples: int = 10_000, seed=0,
                   witnesses=()) -> list[tuple]:
    return sample_tuples(space.domain, 3, n_triples, seed, witnesses)


@dataclass(frozen=True)
class _TripleTerms:
    triples: list
    xy: np.ndarray
    yx: np.ndarray
    xz: np.ndarray
    zy: np.ndarray
    xx: np.ndarray
    distinct: np.ndarray


def _triple_terms(space: MetricSpace, triples) -> _TripleTerms:
    n = len(triples)
    xy, yx, xz, zy, xx = (np.empty(n) for _ in range(5))
    distinct = np.empty(n, dtype=bool)
    for i, (x, y, z) in enumerate(triples):
        xy[i] = space.G(x, y)
        yx[i] = space.G(y, x)
        xz[i] = space.G(x, z)
        zy[i] = space.G(z, y)
        xx[i] = space.G(x, x)
        distinct[i] = not _same_point(x, y)
    return _TripleTerms(list(triples), xy, yx, xz, zy, xx, distinct)


def _resolve_triples(space, n_triples, seed, witnesses, triples):
    if triples is not None:
        if not triples:
            raise ValueError("empty triple set")
        return list(triples)
    if n_triples < 1 and not witnesses:
        raise ValueError("n_triples must be >= 1")
    return sample_triples(space, n_triples, seed, witnesses)


# --- axiom verification ----------------------------------------------------

@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    lhs: float
    rhs: float


@dataclass
class AxiomReport:
    passed: bool
    violations: list = field(default_factory=list)
    triples_checked: int = 0
    params: Optional[AlphaBetaParams] = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "triples_checked": self.triples_checked,
            "alpha": self.params.alpha if self.params else None,
            "beta": self.params.beta if self.params else None,
            "violations": [
                {"axiom": v.axiom, "witness": [_jsonable(p) for p in v.witness],
                 "lhs": v.lhs, "rhs": v.rhs}
                for v in self.violations
            ],
        }


def _jsonable(p):
    if isinstance(p, GridFunction):
        return p.values.tolist()
    if isinstance(p, np.generic):
        return p.item()
    return p


def _leq(lhs, rhs):
    return lhs - rhs <= EPS_AXIOM * np.maximum(np.abs(lhs), np.abs(rhs))


def verify_axioms(space: MetricSpace, params: Optional[AlphaBetaParams] = None, *,
                  n_triples: int = 10_000, seed=0, witnesses=(),
                  triples=None) -> AxiomReport:
    """Check the (alpha, beta)-metric axioms on sampled triples ``(x, y, z)``.

    The identity axiom is checked as ``G(x, x) == 0`` (within EPS_AXIOM);
    its converse by flagging distinct sampled points at distance zero.  Violations are reported in sample
    order, each with its witness points and the two sides compared.
    """
    params = params or space.params or AlphaBetaParams()
    triples = _resolve_triples(space, n_triples, seed, witnesses, triples)
    t = _triple_terms(space, triples)
    rhs = params.alpha * t.xz + params.beta * t.zy
    tri_ok = _leq(t.xy, rhs)
    sym_ok = np.abs(t.xy - t.yx) <= EPS_AXIOM * np.maximum(t.xy, t.yx)
    ident_ok = t.xx <= EPS_AXIOM
    sep_ok = ~t.distinct | (t.xy > 0)

    violations = []
    for i in np.flatnonzero(~(tri_ok & sym_ok & ident_ok & sep_ok)):
        x, y, z = t.triples[i]
        if not ident_ok[i]:
            violations.append(Violation("identity", (x,), float(t.xx[i]), 0.0))
        if not sep_ok[i]:
            violations.append(Violation("separation", (x, y), float(t.xy[i]), 0.0))
        if not sym_ok[i]:
            violations.append(Violation("symmetry", (x, y), float(t.xy[i]), float(t.yx[i])))
        if not tri_ok[i]:
            violations.append(Violation("triangle", (x, y, z), float(t.xy[i]), float(rhs[i])))
    return AxiomReport(not violations, violations, len(triples), params)


def estimate_min_symmetric_constant(space: MetricSpace, *, n_triples: int = 10_000,
                                    seed=0, witnesses=(), triples=None) -> float:
    """Smallest S >= 1 with ``G(x,y) <= S*(G(x,z) + G(z,y))`` on the sample."""
    triples = _resolve_triples(space, n_triples, seed, witnesses, triples)
    t = _triple_terms(space, triples)
    denom = t.xz + t.zy
    ok = denom > 0
    if not ok.any():
        return 1.0
    return max(1.0, float(np.max(t.xy[ok] / denom[ok])))


def estimate_min_beta_given_alpha(space: MetricSpace, alpha: float, *,
                                  n_triples: int = 10_000, seed=0, witnesses=(),
                                  triples=None) -> float:
    """Smallest beta >= 1 such that (alpha, beta) certifies every sampled triple."""
    if not alpha >= 1.0:
        raise DomainError(f"alpha must be >= 1, got {alpha!r}")
    triples = _resolve_triples(space, n_triples, seed, witnesses, triples)
    t = _triple_terms(space, triples)
    ok = t.zy > 0
    if not ok.any():
        return 1.0
    return max(1.0, float(np.max((t.xy[ok] - alpha * t.xz[ok]) / t.zy[ok])))


def beta_frontier(space: MetricSpace, alphas=DEFAULT_ALPHA_GRID, *,
                  n_triples: int = 10_000, seed=0, witnesses=(),
                  triples=None) -> list[tuple[float, float]]:
    """Empirical (alpha, beta) frontier: minimal beta for each alpha."""
    triples = _resolve_triples(space, n_triples, seed, witnesses, triples)
    return [(float(a), estimate_min_beta_given_alpha(space, a, triples=triples))
            for a in alphas]


@dataclass(frozen=True)
class Classification:
    """Strongest label supported by the sampled evidence.

    ``label`` is one of ``metric``, ``strong-b``, ``b-metric``,
    ``alpha-beta`` or ``unknown``; ``params`` is the pair that certified it.
    """

    label: str
    params: Optional[AlphaBetaParams]
    symmetric_constant: float
    frontier: tuple = ()

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "alpha": self.params.alpha if self.params else None,
            "beta": self.params.beta if self.params else None,
            "symmetric_constant": self.symmetric_constant,
            "frontier": [list(p) for p in self.frontier],
        }


def classify_space(space: MetricSpace, *, n_triples: int = 10_000, seed=0,
                   witnesses=(), triples=None,
                   alphas=DEFAULT_ALPHA_GRID) -> Classification:
    triples = _resolve_triples(space, n_triples, seed, witnesses, triples)
    s = estimate_min_symmetric_constant(space, triples=triples)

    def passes(alpha, beta):
        return verify_axioms(space, AlphaBetaParams(alpha, beta), triples=triples).passed

    if passes(1.0, 1.0):
        return Classification("metric", AlphaBetaParams(1.0, 1.0), s)
    if passes(1.0, s):
        return Classification("strong-b", AlphaBetaParams(1.0, s), s)
    if passes(s, s):
        return Classification("b-metric", AlphaBetaParams(s, s), s)
    frontier = tuple(beta_frontier(space, alphas, triples=triples))
    for a, b in frontier:
        if passes(a, b):
            return Classification("alpha-beta", AlphaBetaParams(a, b), s, frontier)
    return Classification("unknown", None, s, frontier)
