"""Torus quadrature for the orthogonality inner product.

The measure pulls back to (4 pi)^{-d} w(z) d(theta) on [0, 2pi)^d with
x_j = cos(theta_j); the integrand is smooth and periodic, so the
uniform trapezoid rule (a plain grid mean) converges spectrally.  The
prefactor is validated against the closed-form norms rather than
re-derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import gridkernels
from .awcore import QParams, mv_norm, require_chain_constraints
from .laurent import XPoly
from .qdiff import shift_form_operator
from .report import CheckReport

__all__ = [
    "QuadratureGrid",
    "default_grid_size",
    "weight_values",
    "xpoly_evaluator",
    "inner_product",
    "orthogonality_check",
    "self_adjointness_check",
]

GridFn = Callable[[np.ndarray], np.ndarray]

_DEFAULT_M = {1: 256, 2: 128, 3: 64}


def default_grid_size(d: int) -> int:
    return _DEFAULT_M.get(d, 32)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform theta-grid on [0, 2pi)^d; nodes carry x_j = cos(theta_j)."""

    d: int
    m: int
    thetas: np.ndarray = field(init=False, repr=False, compare=False)
    xs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 8:
            raise ValueError("need at least 8 points per dimension")
        axis = 2.0 * np.pi * np.arange(self.m) / self.m
        mesh = np.meshgrid(*([axis] * self.d), indexing="ij")
        thetas = np.stack([g.ravel() for g in mesh], axis=1)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "xs", np.cos(thetas))

    @property
    def npoints(self) -> int:
        return self.m**self.d


def weight_values(params: QParams, grid: QuadratureGrid, eps: float = 1e-16) -> np.ndarray:
    require_chain_constraints(params)
    alphas = np.array([float(a) for a in params.alpha])
    return gridkernels.weight_grid(grid.thetas, alphas, float(params.q), eps)


def xpoly_evaluator(p: XPoly) -> GridFn:
    """Grid-evaluation closure for an exact polynomial in x."""
    items = p.sorted_terms()
    if not items:
        return lambda xs: np.zeros(xs.shape[0])
    exps = np.array([e for e, _ in items], dtype=np.int64)
    coefs = np.array([float(c) for _, c in items])

    def fn(xs: np.ndarray) -> np.ndarray:
        return gridkernels.xpoly_grid(exps, coefs, xs)

    return fn


def inner_product(
    params: QParams,
    f: GridFn,
    g: GridFn,
    grid: QuadratureGrid,
    eps: float = 1e-16,
    weights: np.ndarray | None = None,
) -> float:
    """Trapezoid approximation of the weighted inner product <f, g>.

    The theta-form prefactor (4 pi)^{-d} against the (2 pi/m)^d cell
    volume reduces to mean/2^d.
    """
    if weights is None:
        weights = weight_values(params, grid, eps)
    vals = f(grid.xs) * g(grid.xs) * weights
    return float(vals.mean() / 2.0**params.d)


def orthogonality_check(
    params: QParams,
    n: Sequence[int],
    m: Sequence[int],
    grid: QuadratureGrid,
    eps: float = 1e-16,
    weights: np.ndarray | None = None,
    polys: dict | None = None,
) -> CheckReport:
    """<P_n, P_m> against delta_{n,m} H_n with absolute tolerance
    1e-6 * max(H_n, H_0)."""
    from .awcore import mv_poly_symbolic

    n = tuple(n)
    m = tuple(m)
    cache = polys if polys is not None else {}
    for idx in (n, m):
        if idx not in cache:
            cache[idx] = xpoly_evaluator(mv_poly_symbolic(params, idx))
    observed = inner_product(params, cache[n], cache[m], grid, eps, weights)
    Hn = mv_norm(params, n, eps)
    H0 = mv_norm(params, (0,) * params.d, eps)
    expected = Hn if n == m else 0.0
    tol = 1e-6 * max(Hn, H0)
    return CheckReport.numeric(
        "orthogonality",
        {"d": params.d, "n": list(n), "m": list(m), "grid": grid.m},
        observed,
        expected,
        tol,
    )


def self_adjointness_check(
    params: QParams,
    f: XPoly,
    g: XPoly,
    grid: QuadratureGrid,
    eps: float = 1e-16,
    weights: np.ndarray | None = None,
    operator=None,
) -> CheckReport:
    """|<Lf, g> - <f, Lg>| <= 1e-6 (1 + |<f, g>|) for the difference
    operator attached to the weight."""
    op = operator if operator is not None else shift_form_operator(params)
    if weights is None:
        weights = weight_values(params, grid, eps)
    Lf = xpoly_evaluator(op.apply(f))
    Lg = xpoly_evaluator(op.apply(g))
    fe = xpoly_evaluator(f)
    ge = xpoly_evaluator(g)
    left = inner_product(params, Lf, ge, grid, eps, weights)
    right = inner_product(params, fe, Lg, grid, eps, weights)
    base = inner_product(params, fe, ge, grid, eps, weights)
    tol = 1e-6 * (1.0 + abs(base))
    return CheckReport.numeric(
        "self-adjointness",
        {
            "d": params.d,
            "f": sorted((list(e), str(c)) for e, c in f.terms.items()),
            "g": sorted((list(e), str(c)) for e, c in g.terms.items()),
            "grid": grid.m,
        },
        left - right,
        0.0,
        tol,
    )
