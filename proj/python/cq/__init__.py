from ._cq import (
    CqError,
    contour_radius,
    convergence,
    convolve,
    k0,
    k1,
    scatter,
    set_workers,
    solve,
    weights,
    workers,
)

__all__ = [
    "CqError",
    "contour_radius",
    "convergence",
    "convolve",
    "k0",
    "k1",
    "scatter",
    "set_workers",
    "solve",
    "weights",
    "workers",
]
