"""Hot numeric kernels for torus quadrature: weight values and
polynomial values on a theta-grid.

Two interchangeable implementations: numba-jitted loops and a pure
numpy path.  Selection order: the AWBISPEC_KERNELS environment variable
("numba" or "numpy"), else numba when it imports, else numpy.  Both
paths are exercised by the tests;  benchmarks/bench_kernels.py compares
their throughput.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "backend_name",
    "weight_grid",
    "xpoly_grid",
    "weight_grid_numpy",
    "xpoly_grid_numpy",
]

_ENV_VAR = "AWBISPEC_KERNELS"


def _resolve_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice in ("numba", "numpy"):
        if choice == "numba" and not _numba_available():
            raise RuntimeError("AWBISPEC_KERNELS=numba but numba is not importable")
        return choice
    if choice:
        raise RuntimeError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    return "numba" if _numba_available() else "numpy"


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except Exception:
        return False
    return True


_BACKEND = _resolve_backend()


def backend_name() -> str:
    return _BACKEND


# ------------------------------------------------------------- numpy kernels


def _poch_inf_cols(a: np.ndarray, q: float, eps: float) -> np.ndarray:
    """Truncated infinite product prod_k (1 - a q^k) columnwise over a
    grid array; |a| is constant across the grid so the truncation depth
    is uniform."""
    out = np.ones_like(a)
    t = a.copy()
    bound = float(np.max(np.abs(t))) if t.size else 0.0
    while bound >= eps:
        out *= 1.0 - t
        t *= q
        bound *= q
    return out


def weight_grid_numpy(thetas: np.ndarray, alphas: np.ndarray, q: float, eps: float) -> np.ndarray:
    """Orthogonality weight at each grid point; thetas is (P, d)."""
    P, d = thetas.shape
    z = np.exp(1j * thetas)  # (P, d)
    num = np.ones(P, dtype=np.complex128)
    for j in range(d):
        zj2 = z[:, j] ** 2
        num *= _poch_inf_cols(zj2, q, eps) * _poch_inf_cols(1.0 / zj2, q, eps)
    den = np.ones(P, dtype=np.complex128)
    zleft = np.full(P, complex(alphas[0]))
    zright = np.full(P, complex(alphas[d + 2]))
    cols = [zleft] + [z[:, j] for j in range(d)] + [zright]
    for k in range(d + 1):
        ratio = alphas[k + 1] / alphas[k]
        for e1 in (1, -1):
            for e2 in (1, -1):
                den *= _poch_inf_cols(ratio * cols[k + 1] ** e1 * cols[k] ** e2, q, eps)
    return (num / den).real


def xpoly_grid_numpy(exps: np.ndarray, coefs: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Evaluate sum_t coefs[t] * prod_j xs[:,j]**exps[t,j] on the grid."""
    P = xs.shape[0]
    out = np.zeros(P)
    for t in range(exps.shape[0]):
        term = np.full(P, coefs[t])
        for j in range(exps.shape[1]):
            k = exps[t, j]
            if k:
                term *= xs[:, j] ** k
        out += term
    return out


# ------------------------------------------------------------- numba kernels

if _BACKEND == "numba":
    from numba import njit

    @njit(cache=True, fastmath=True)
    def _poch_fixed(a: complex, q: float, n: int) -> complex:
        out = 1.0 + 0.0j
        t = a
        for _ in range(n):
            out *= 1.0 - t
            t *= q
        return out

    @njit(cache=True)
    def _depth(amag: float, q: float, eps: float) -> int:
        n = 0
        while amag >= eps:
            amag *= q
            n += 1
        return n

    @njit(cache=True, fastmath=True)
    def _weight_grid_numba(thetas, alphas, q, eps):
        P, d = thetas.shape
        out = np.empty(P)
        # truncation depths are point-independent: every weight factor has
        # constant modulus on the torus
        n_num = _depth(1.0, q, eps)
        n_den = np.empty((d + 1, 2, 2), np.int64)
        for k in range(d + 1):
            ratio = abs(alphas[k + 1] / alphas[k])
            for i1 in range(2):
                e1 = 2 * i1 - 1
                for i2 in range(2):
                    e2 = 2 * i2 - 1
                    amag = ratio
                    if k == 0:
                        amag *= abs(alphas[0]) ** e2
                    if k == d:
                        amag *= abs(alphas[d + 2]) ** e1
                    n_den[k, i1, i2] = _depth(amag, q, eps)
        cols = np.empty(d + 2, dtype=np.complex128)
        icols = np.empty(d + 2, dtype=np.complex128)
        for p in range(P):
            cols[0] = alphas[0]
            icols[0] = 1.0 / alphas[0]
            for j in range(d):
                zj = np.cos(thetas[p, j]) + 1j * np.sin(thetas[p, j])
                cols[j + 1] = zj
                icols[j + 1] = zj.conjugate()  # |z| = 1 on the torus
            cols[d + 1] = alphas[d + 2]
            icols[d + 1] = 1.0 / alphas[d + 2]
            num = 1.0 + 0.0j
            for j in range(1, d + 1):
                zj2 = cols[j] * cols[j]
                num *= _poch_fixed(zj2, q, n_num)
                num *= _poch_fixed(zj2.conjugate(), q, n_num)
            den = 1.0 + 0.0j
            for k in range(d + 1):
                ratio = alphas[k + 1] / alphas[k]
                for i1 in range(2):
                    hi = cols[k + 1] if i1 == 1 else icols[k + 1]
                    for i2 in range(2):
                        lo = cols[k] if i2 == 1 else icols[k]
                        den *= _poch_fixed(ratio * hi * lo, q, n_den[k, i1, i2])
            out[p] = (num / den).real
        return out

    @njit(cache=True)
    def _xpoly_grid_numba(exps, coefs, xs):
        P = xs.shape[0]
        T = exps.shape[0]
        d = exps.shape[1]
        out = np.zeros(P)
        for p in range(P):
            acc = 0.0
            for t in range(T):
                term = coefs[t]
                for j in range(d):
                    k = exps[t, j]
                    if k > 0:
                        term *= xs[p, j] ** k
                acc += term
            out[p] = acc
        return out

    def weight_grid(thetas, alphas, q, eps):
        return _weight_grid_numba(
            np.ascontiguousarray(thetas, dtype=np.float64),
            np.ascontiguousarray(alphas, dtype=np.float64),
            float(q),
            float(eps),
        )

    def xpoly_grid(exps, coefs, xs):
        return _xpoly_grid_numba(
            np.ascontiguousarray(exps, dtype=np.int64),
            np.ascontiguousarray(coefs, dtype=np.float64),
            np.ascontiguousarray(xs, dtype=np.float64),
        )

else:

    def weight_grid(thetas, alphas, q, eps):
        return weight_grid_numpy(
            np.asarray(thetas, dtype=np.float64),
            np.asarray(alphas, dtype=np.float64),
            float(q),
            float(eps),
        )

    def xpoly_grid(exps, coefs, xs):
        return xpoly_grid_numpy(
            np.asarray(exps, dtype=np.int64),
            np.asarray(coefs, dtype=np.float64),
            np.asarray(xs, dtype=np.float64),
        )
