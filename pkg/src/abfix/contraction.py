"""Contraction classes, their sampled verification and their per-step rates.

Five kinds are supported.  For a self-map ``T`` with distance ``G``:

* ``banach``           G(Tx,Ty) <= K G(x,y)
* ``alpha-beta``       G(Tx,Ty) <= xi1 G(x,y) + xi2 [G(x,Tx) + G(y,Ty)]
* ``weak-alpha-beta``  G(Tx,Ty) <= xi1 G(x,y) + xi2 max[G(x,Tx), G(y,Ty)]
* ``kannan``           G(Tx,Ty) <= lam [G(x,Tx) + G(y,Ty)]
* ``reich``            G(Tx,Ty) <= xi1 G(x,y) + xi2 G(x,Tx) + xi3 G(y,Ty)

Each kind yields a rate ``K < 1`` with ``G(x_{n+1}, x_{n+2}) <= K G(x_n, x_{n+1})``
along Picard iterates; see :func:`derived_rate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ClosureError, ContractError, EvaluationError, InfeasibleError
from .metric import EPS_AXIOM, MetricSpace, sample_tuples

KINDS = ("banach", "alpha-beta", "weak-alpha-beta", "kannan", "reich")

CONSTANT_NAMES = {
    "banach": ("K",),
    "alpha-beta": ("xi1", "xi2"),
    "weak-alpha-beta": ("xi1", "xi2"),
    "kannan": ("lambda",),
    "reich": ("xi1", "xi2", "xi3"),
}

# grid for the constants swept during estimation: 0, 0.05, ..., 0.95
SWEEP = tuple(k / 20 for k in range(20))


def _check_constants(kind: str, c: tuple) -> None:
    if kind not in CONSTANT_NAMES:
        raise ContractError(f"unknown contraction kind {kind!r}")
    names = CONSTANT_NAMES[kind]
    if len(c) != len(names):
        raise ContractError(f"{kind} takes constants {names}, got {len(c)} values")
    for name, v in zip(names, c):
        if not math.isfinite(v) or v < 0:
            raise ContractError(f"{name} must be a finite real >= 0, got {v!r}")
    if kind == "banach" and not c[0] < 1:
        raise ContractError(f"K must lie in [0, 1), got {c[0]!r}")
    if kind == "kannan" and not c[0] < 0.5:
        raise ContractError(f"λ must lie in [0, 0.5), got {c[0]!r}")
    if kind == "alpha-beta" and not c[0] + 2 * c[1] < 1:
        # xi1 + xi2 < 1 alone admits xi1=0, xi2=0.6 whose rate 0.6/0.4 exceeds 1
        raise ContractError(f"xi1 + 2*xi2 must be < 1, got {c[0] + 2 * c[1]!r}")
    if kind == "weak-alpha-beta" and not c[0] + c[1] < 1:
        raise ContractError(f"xi1 + xi2 must be < 1, got {c[0] + c[1]!r}")
    if kind == "reich" and not sum(c) < 1:
        raise ContractError(f"xi1 + xi2 + xi3 must be < 1, got {sum(c)!r}")


@dataclass(frozen=True)
class ContractionSpec:
    """A contraction kind with admissible constants.

    Construction validates the constants, so every instance is admissible.
    """

    kind: str
    constants: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.constants)
        object.__setattr__(self, "constants", c)
        _check_constants(self.kind, c)

    @classmethod
    def banach(cls, K):
        return cls("banach", (K,))

    @classmethod
    def alpha_beta(cls, xi1, xi2):
        return cls("alpha-beta", (xi1, xi2))

    @classmethod
    def weak(cls, xi1, xi2):
        return cls("weak-alpha-beta", (xi1, xi2))

    @classmethod
    def kannan(cls, lam):
        return cls("kannan", (lam,))

    @classmethod
    def reich(cls, xi1, xi2, xi3):
        return cls("reich", (xi1, xi2, xi3))

    @classmethod
    def from_dict(cls, kind: str, constants: dict) -> ContractionSpec:
        names = CONSTANT_NAMES.get(kind)
        if names is None:
            raise ContractError(f"unknown contraction kind {kind!r}")
        extra = set(constants) - set(names)
        missing = set(names) - set(constants)
        if extra or missing:
            raise ContractError(
                f"{kind} takes constants {list(names)}; "
                f"missing {sorted(missing)}, unexpected {sorted(extra)}")
        return cls(kind, tuple(constants[n] for n in names))

    def as_dict(self) -> dict:
        return dict(zip(CONSTANT_NAMES[self.kind], self.constants))


def derived_rate(spec: ContractionSpec) -> float:
    """Per-step residual contraction factor implied by ``spec``.

    The weak kind takes the larger of its two case rates because the case
    that applies can change from step to step.
    """
    _check_constants(spec.kind, spec.constants)
    c = spec.constants
    if spec.kind == "banach":
        return c[0]
    if spec.kind == "alpha-beta":
        return (c[0] + c[1]) / (1 - c[1])
    if spec.kind == "weak-alpha-beta":
        return max(c[0] / (1 - c[1]), c[0] + c[1])
    if spec.kind == "kannan":
        return c[0] / (1 - c[0])
    return (c[0] + c[1]) / (1 - c[2])


# --- sampled evaluation ----------------------------------------------------

@dataclass(frozen=True)
class _PairTerms:
    pairs: list
    d: np.ndarray       # G(x, y)
    img: np.ndarray     # G(Tx, Ty)
    dx: np.ndarray      # G(x, Tx)
    dy: np.ndarray      # G(y, Ty)


def _image(fmap, space, x):
    try:
        fx = fmap(x)
    except (ArithmeticError, ValueError) as exc:
        raise EvaluationError(f"map failed at {x!r}: {exc}", witness=(x,)) from exc
    if not space.domain.contains(fx):
        raise ClosureError(f"map sends {x!r} to {fx!r} outside the domain",
                           witness=(x, fx))
    return fx


def _pair_terms(fmap, space: MetricSpace, pairs) -> _PairTerms:
    n = len(pairs)
    d, img, dx, dy = (np.empty(n) for _ in range(4))
    for i, (x, y) in enumerate(pairs):
        fx, fy = _image(fmap, space, x), _image(fmap, space, y)
        d[i] = space.G(x, y)
        img[i] = space.G(fx, fy)
        dx[i] = space.G(x, fx)
        dy[i] = space.G(y, fy)
    return _PairTerms(list(pairs), d, img, dx, dy)


def _rhs(spec: ContractionSpec, t: _PairTerms) -> np.ndarray:
    c = spec.constants
    if spec.kind == "banach":
        return c[0] * t.d
    if spec.kind == "alpha-beta":
        return c[0] * t.d + c[1] * (t.dx + t.dy)
    if spec.kind == "weak-alpha-beta":
        return c[0] * t.d + c[1] * np.maximum(t.dx, t.dy)
    if spec.kind == "kannan":
        return c[0] * (t.dx + t.dy)
    return c[0] * t.d + c[1] * t.dx + c[2] * t.dy


def sample_pairs(space: MetricSpace, n_pairs: int = 10_000, seed=0, witnesses=()):
    return sample_tuples(space.domain, 2, n_pairs, seed, witnesses)


def _resolve_pairs(space, n_pairs, seed, witnesses, pairs):
    if pairs is not None:
        if not pairs:
            raise ValueError("empty pair set")
        return list(pairs)
    if n_pairs < 1 and not witnesses:
        raise ValueError("n_pairs must be >= 1")
    return sample_pairs(space, n_pairs, seed, witnesses)


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    worst_pair: tuple
    worst_slack: float
    pairs_checked: int

    def to_dict(self) -> dict:
        return {"holds": self.holds, "worst_pair": list(self.worst_pair),
                "worst_slack": self.worst_slack, "pairs_checked": self.pairs_checked}


def check_condition(spec: ContractionSpec, fmap: Callable, space: MetricSpace, *,
                    n_pairs: int = 10_000, seed=0, witnesses=(),
                    pairs=None) -> ConditionReport:
    """Evaluate the contraction inequality of ``spec`` on sampled pairs."""
    pairs = _resolve_pairs(space, n_pairs, seed, witnesses, pairs)
    t = _pair_terms(fmap, space, pairs)
    slack = _rhs(spec, t) - t.img
    i = int(np.argmin(slack))
    worst = float(slack[i])
    return ConditionReport(worst >= -EPS_AXIOM, tuple(pairs[i]), worst, len(pairs))


def _sup_ratio(num, den):
    """Max of num/den over den > 0; inf if some den == 0 has num > 0."""
    pos = den > 0
    if np.any(~pos & (num > EPS_AXIOM)):
        return math.inf
    if not pos.any():
        return 0.0
    return max(0.0, float(np.max(num[pos] / den[pos])))


def _fit_xi1(t: _PairTerms, remainder):
    """Least xi1 with ``xi1*d >= img - remainder`` on every pair."""
    return _sup_ratio(t.img - remainder, t.d)


def estimate_constants(kind: str, fmap: Callable, space: MetricSpace, *,
                       n_pairs: int = 10_000, seed=0, witnesses=(),
                       pairs=None) -> ContractionSpec:
    """Fit the smallest admissible constants of ``kind`` to sampled pairs.

    Single-constant kinds use the sampled supremum of the defining ratio.
    Multi-constant kinds sweep the secondary constants over ``SWEEP``, fit
    the least ``xi1`` for each sweep point and keep the admissible fit with
    the smallest derived rate.

    Raises
    ------
    InfeasibleError
        If no admissible constants satisfy every sampled pair.
    """
    if kind not in KINDS:
        raise ContractError(f"unknown contraction kind {kind!r}")
    pairs = _resolve_pairs(space, n_pairs, seed, witnesses, pairs)
    t = _pair_terms(fmap, space, pairs)

    if kind == "banach":
        k = _sup_ratio(t.img, t.d)
        if not k < 1:
            raise InfeasibleError(f"sampled Lipschitz ratio {k} is not below 1", k)
        return ContractionSpec.banach(k)
    if kind == "kannan":
        lam = _sup_ratio(t.img, t.dx + t.dy)
        if not lam < 0.5:
            raise InfeasibleError(f"sampled Kannan ratio {lam} is not below 0.5", lam)
        return ContractionSpec.kannan(lam)

    candidates = []
    if kind == "reich":
        for xi2 in SWEEP:
            for xi3 in SWEEP:
                if xi2 + xi3 >= 1:
                    continue
                xi1 = _fit_xi1(t, xi2 * t.dx + xi3 * t.dy)
                if xi1 + xi2 + xi3 < 1:
                    candidates.append((xi1, xi2, xi3))
    else:
        extra = t.dx + t.dy if kind == "alpha-beta" else np.maximum(t.dx, t.dy)
        for xi2 in SWEEP:
            xi1 = _fit_xi1(t, xi2 * extra)
            try:
                _check_constants(kind, (xi1, xi2))
            except ContractError:
                continue
            candidates.append((xi1, xi2))
    if not candidates:
        raise InfeasibleError(f"no admissible {kind} constants fit the sampled pairs")
    specs = [ContractionSpec(kind, c) for c in candidates]
    return min(specs, key=lambda s: (derived_rate(s), s.constants[0]))
