"""Named maps, kernels and right-hand sides usable from problem files."""

import numpy as np

MAPS = {
    "x/4": lambda x: x / 4,
    "cos": lambda x: float(np.cos(x)),
    "identity": lambda x: x,
}

KERNELS = {
    # u(s) = s + 1/2 s int_0^1 t u(t) dt, solved by u(s) = 1.2 s on [0, 1]
    "fredholm-linear": lambda s, t, u: s + 0.5 * s * t * u,
    "fredholm-quarter": lambda s, t, u: 0.25 * u,
    "fredholm-zero": lambda s, t, u: np.zeros(np.broadcast_shapes(
        np.shape(s), np.shape(t), np.shape(u))),
}

RHS = {
    "ode-decay": lambda s, u: -u,
    "ode-poly": lambda s, u: 2 * s + 0 * u,
    "ode-zero": lambda s, u: 0 * u,
}


def lookup(table: dict, name: str, what: str):
    try:
        return table[name]
    except KeyError:
        raise KeyError(f"unknown {what} {name!r}; known: {sorted(table)}") from None
