"""Duality between the continuous variables z and the discrete index n.

Three layers:

* the involution exchanging (n, z, alpha) with dual data, under which
  the unit-normalized polynomials are symmetric;
* the algebra transport sending z-side q-shift operators to shift
  operators on the lattice N_0^d.  The transport substitutes for the
  parameters as well as the coordinates, so it runs over an extended
  ring with the alphas as extra variables; parameter values are
  substituted afterwards;
* lattice operators with boundary bookkeeping: support entries whose
  shift can leave N_0^d carry coefficients vanishing on the offending
  boundary, and application asserts that vanishing before dropping a
  term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from gmpy2 import mpq

from .awcore import (
    QParams,
    mv_poly_regular,
    normalize_phat,
    partial_sums,
)
from .laurent import InexactDivisionError, LaurentPoly
from .qdiff import (
    CoeffFn,
    PoleError,
    QDiffOperator,
    Shift,
    build_shift_form,
    symbolic_env,
)
from .qseries import QBase
from .report import digest_inputs

__all__ = [
    "DualityPoint",
    "LatticeOperator",
    "BoundaryViolationError",
    "dual_parameters",
    "dual_map",
    "duality_identity_check",
    "symbolic_z_family_member",
    "b_transport",
    "b_map",
    "n_operator_family",
    "n_eigenvalue",
    "apply_n_operator",
    "bispectral_check",
]


class BoundaryViolationError(ArithmeticError):
    """A shift left the lattice while its coefficient was nonzero."""


def _params_digest(params: QParams) -> str:
    return digest_inputs(
        {"d": params.d, "s": str(params.base.s), "alpha": [str(a) for a in params.alpha]}
    )


@dataclass(frozen=True)
class DualityPoint:
    """(n, z, alpha) with the index stored exactly through u_j = q^{n_j}."""

    u: tuple[mpq, ...]
    z: tuple[mpq, ...]
    params: QParams

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(mpq(t) for t in self.u))
        object.__setattr__(self, "z", tuple(mpq(t) for t in self.z))
        d = self.params.d
        if len(self.u) != d or len(self.z) != d:
            raise ValueError("u and z must have length d")
        if any(t == 0 for t in self.u) or any(t == 0 for t in self.z):
            raise ValueError("u and z must be nonzero")

    @classmethod
    def from_index(cls, params: QParams, n: Sequence[int], z: Sequence) -> "DualityPoint":
        q = params.q
        return cls(tuple(q ** int(k) for k in n), tuple(z), params)


def dual_parameters(params: QParams) -> QParams:
    """alpha-tilde: tilde a_0 = a_0, tilde a_j = a_0 a_{d+1} a_{d+2}
    q^{1/2} / a_{d+2-j} for 1 <= j <= d+1, tilde a_{d+2} = (a_1/a_0) q^{-1/2}."""
    d = params.d
    a = params.a
    s = params.base.s
    tail = a(d + 1) * a(d + 2)
    alphas = [a(0)]
    for j in range(1, d + 2):
        alphas.append(a(0) * tail * s / a(d + 2 - j))
    alphas.append(a(1) / a(0) / s)
    return QParams(d, params.base, tuple(alphas))


def dual_map(point: DualityPoint) -> DualityPoint:
    """The involution on (n, z, alpha):

        q^{tilde n_j} = a_{d+1-j} z_{d+1-j} / (a_{d+2-j} z_{d+2-j})
        tilde z_j     = (a_{d+2-j}/a_0) q^{N_{d+1-j} - 1/2}

    with z_{d+1} = a_{d+2} and N_k = n_1 + ... + n_k read off the
    stored u values.
    """
    params = point.params
    d = params.d
    a = params.a
    s = params.base.s
    zs = list(point.z) + [params.z_right]
    u_new = []
    for j in range(1, d + 1):
        i = d + 1 - j
        u_new.append(a(i) * zs[i - 1] / (a(i + 1) * zs[i]))
    qN = mpq(1)
    qNs = [qN]  # q^{N_0}, q^{N_1}, ...
    for t in point.u:
        qN = qN * t
        qNs.append(qN)
    z_new = []
    for j in range(1, d + 1):
        z_new.append(a(d + 2 - j) / a(0) * qNs[d + 1 - j] / s)
    return DualityPoint(tuple(u_new), tuple(z_new), dual_parameters(params))


def lattice_z_point(params: QParams, ntilde: Sequence[int]) -> tuple[mpq, ...]:
    """Invert the index relation: z_k = (a_{d+1} a_{d+2} / a_k)
    q^{tilde N_{d+1-k}}, which puts the dual index on the lattice."""
    d = params.d
    q = params.q
    Nt = partial_sums(ntilde)
    tail = params.a(d + 1) * params.a(d + 2)
    return tuple(tail / params.a(k) * q ** Nt[d + 1 - k] for k in range(1, d + 1))


def duality_identity_check(params: QParams, n: Sequence[int], ntilde: Sequence[int]) -> dict:
    """Exact check that the unit-normalized polynomial is symmetric
    under the duality, with z reconstructed from the chosen dual index
    so that both indices lie in N_0^d."""
    d = params.d
    z = lattice_z_point(params, ntilde)
    point = DualityPoint.from_index(params, n, z)
    dual = dual_map(point)
    q = params.q
    expect_u = tuple(q ** int(k) for k in ntilde)
    if dual.u != expect_u:
        raise AssertionError("dual index does not reproduce the chosen lattice index")
    lhs = normalize_phat(params, n, mv_poly_regular(params, n, z))
    rhs = normalize_phat(
        dual.params, ntilde, mv_poly_regular(dual.params, ntilde, dual.z)
    )
    return {
        "check": "duality",
        "params": _params_digest(params),
        "inputs": {"n": list(n), "ntilde": list(ntilde)},
        "lhs": str(lhs),
        "rhs": str(rhs),
        "pass": lhs == rhs,
    }


# ---------------------------------------------------------------------------
# operator transport z-side -> n-side
# ---------------------------------------------------------------------------


def symbolic_z_family_member(params: QParams, j: int) -> QDiffOperator:
    """Family member j over the extended ring (z's and alphas as
    variables); input to the transport."""
    return build_shift_form(symbolic_env(params.d, params.q, j))


def _transport_images(d: int, s: mpq) -> list[tuple[mpq, Shift]]:
    """Monomial images of the 2d+3 extended-ring variables.

    Coordinates z_j map to (a_{d+2-j}/a_0) q^{n_1+...+n_{d+1-j}-1/2}
    written over u_k = q^{n_k}; parameters map among themselves as in
    the dual-parameter list.  Every image is a unit monomial, so the
    transport is a monomial substitution.
    """
    dim = 2 * d + 3

    def evec(*pairs) -> Shift:
        v = [0] * dim
        for idx, k in pairs:
            v[idx] += k
        return tuple(v)

    A = lambda m: d + m  # 0-based position of alpha_m
    images: list[tuple[mpq, Shift]] = []
    for j in range(1, d + 1):
        pairs = [(A(d + 2 - j), 1), (A(0), -1)]
        pairs += [(k - 1, 1) for k in range(1, d + 2 - j)]
        images.append((1 / s, evec(*pairs)))
    images.append((mpq(1), evec((A(0), 1))))  # alpha_0
    for m in range(1, d + 2):
        images.append(
            (s, evec((A(0), 1), (A(d + 1), 1), (A(d + 2), 1), (A(d + 2 - m), -1)))
        )
    images.append((1 / s, evec((A(1), 1), (A(0), -1))))  # alpha_{d+2}
    return images


def _shift_transport(d: int, nu: Shift) -> Shift:
    """E_{z_j} -> E_{n_{d+1-j}} E_{n_{d+2-j}}^{-1} (identity beyond the
    last index): the lattice shift picks up nu_{d+1-k} - nu_{d+2-k} in
    coordinate k."""
    w = []
    for k in range(1, d + 1):
        v = nu[d - k]  # nu_{d+1-k}
        if k >= 2:
            v -= nu[d + 1 - k]  # nu_{d+2-k}
        w.append(v)
    return tuple(w)


def b_transport(op: QDiffOperator, d: int, s) -> QDiffOperator:
    """Symbolic transport over the extended rings: coefficients get the
    monomial substitution, shifts get the index rewiring.  Output lives
    in the (u, alpha) ring of the same dimension."""
    s = mpq(s)
    dim = 2 * d + 3
    if op.dim != dim:
        raise ValueError("transport expects an extended-ring operator")
    images = _transport_images(d, s)

    def map_poly(p: LaurentPoly) -> LaurentPoly:
        return p.monomial_map(dim, images)

    support: dict[Shift, CoeffFn] = {}
    for nu, cf in op.support.items():
        if any(nu[d:]):
            raise ValueError("operator shifts a parameter variable")
        w = _shift_transport(d, nu[:d]) + (0,) * (d + 3)
        ncf = CoeffFn(map_poly(cf.num), tuple(map_poly(f) for f in cf.den_factors))
        cur = support.get(w)
        support[w] = ncf if cur is None else cur + ncf
    return QDiffOperator(dim, op.q, support)


class LatticeOperator:
    """Finite-support difference operator on functions of n in N_0^d.

    Coefficients are exact rational functions of u_k = q^{n_k}.  The
    boundary table records, for every support shift with a negative
    component, the vanishing factors found in the numerator; terms that
    would leave the lattice are dropped only after their coefficient
    evaluates to zero at the point.
    """

    __slots__ = ("dim", "base", "support", "boundary")

    def __init__(self, dim: int, base: QBase, support: dict[Shift, CoeffFn]):
        self.dim = dim
        self.base = base
        self.support = {tuple(w): cf for w, cf in support.items() if not cf.is_zero()}
        self.boundary = self._boundary_table()

    def _boundary_table(self) -> list[tuple[Shift, tuple[LaurentPoly, ...]]]:
        q = self.base.q
        out = []
        for w in sorted(self.support):
            if all(t >= 0 for t in w):
                continue
            found: list[LaurentPoly] = []
            num = self.support[w].num
            for k, t in enumerate(w):
                back = -t
                if back <= 0:
                    continue
                for factor in self._vanishing_factors(k, back, q):
                    try:
                        num.exact_divide(factor)
                    except InexactDivisionError:
                        continue
                    found.append(factor)
            out.append((w, tuple(found)))
        return out

    def _vanishing_factors(self, k: int, back: int, q) -> list[LaurentPoly]:
        e = [0] * self.dim
        e[k] = -1
        base_exp = tuple(e)
        one = LaurentPoly.one(self.dim)
        factors = [one - LaurentPoly.monomial(self.dim, base_exp)]
        if back >= 2:
            factors.append(one - LaurentPoly.monomial(self.dim, base_exp, q))
        return factors

    def sorted_support(self) -> list[tuple[Shift, CoeffFn]]:
        return sorted(self.support.items(), key=lambda kv: kv[0])

    def coeff_value(self, w: Shift, n: Sequence[int]) -> mpq:
        cf = self.support.get(tuple(w))
        if cf is None:
            return mpq(0)
        q = self.base.q
        u = tuple(q ** int(t) for t in n)
        return cf.evaluate(u)

    def apply_at(self, f: Callable[[tuple[int, ...]], mpq], n: Sequence[int]) -> mpq:
        """sum over support of coeff(n) * f(n + shift); terms leaving
        N_0^d must carry a zero coefficient at this n, else a hard
        boundary violation is raised."""
        n = tuple(int(t) for t in n)
        if any(t < 0 for t in n):
            raise ValueError("lattice point must be in N_0^d")
        q = self.base.q
        u = tuple(q**t for t in n)
        total = mpq(0)
        for w, cf in self.sorted_support():
            try:
                c = cf.evaluate(u)
            except ZeroDivisionError:
                raise PoleError(f"lattice coefficient pole at shift {w}", shift=w)
            target = tuple(a + b for a, b in zip(n, w))
            if any(t < 0 for t in target):
                if c != 0:
                    raise BoundaryViolationError(
                        f"boundary violation at n={n}, shift={w}: coefficient {c} != 0"
                    )
                continue
            if c != 0:
                total += c * f(target)
        return total

    def to_json(self) -> list[dict]:
        from .laurent import poly_to_json

        return [
            {
                "shift": list(w),
                "num": poly_to_json(cf.num),
                "den": poly_to_json(cf.den),
            }
            for w, cf in self.sorted_support()
        ]


def lattice_operator(sym_op: QDiffOperator, params: QParams) -> LatticeOperator:
    """Substitute parameter values into a transported symbolic operator,
    leaving exact rational-in-u coefficients on the lattice side."""
    d = params.d
    dim = 2 * d + 3
    if sym_op.dim != dim:
        raise ValueError("expected extended-ring operator")
    images = [(mpq(1), tuple(1 if t == k else 0 for t in range(d))) for k in range(d)]
    images += [(params.a(m), (0,) * d) for m in range(d + 3)]

    def map_poly(p: LaurentPoly) -> LaurentPoly:
        return p.monomial_map(d, images)

    support: dict[Shift, CoeffFn] = {}
    for w, cf in sym_op.support.items():
        if any(w[d:]):
            raise ValueError("operator shifts a parameter variable")
        num = map_poly(cf.num)
        dens = tuple(map_poly(f) for f in cf.den_factors)
        support[w[:d]] = CoeffFn(num, dens)
    return LatticeOperator(d, params.base, support)


def b_map(op: QDiffOperator, params: QParams) -> LatticeOperator:
    """Full transport of an extended-ring z-side operator to a numeric
    lattice operator at the given parameter values."""
    return lattice_operator(b_transport(op, params.d, params.base.s), params)


def n_operator_family(params: QParams) -> list[LatticeOperator]:
    """The d commuting lattice operators: transported images of the
    z-side family."""
    return [
        b_map(symbolic_z_family_member(params, j), params)
        for j in range(1, params.d + 1)
    ]


def n_eigenvalue(params: QParams, z: Sequence, j: int) -> mpq:
    """-(1 - a_{d+1}a_{d+2}/(a_{d+1-j} z_{d+1-j}))
       (1 - a_{d+1}a_{d+2} z_{d+1-j} / a_{d+1-j});
    an affine function of x_{d+1-j}."""
    d = params.d
    if not 1 <= j <= d:
        raise ValueError("family index out of range")
    zval = mpq(z[d - j])
    if zval == 0:
        raise ZeroDivisionError("z coordinate must be nonzero")
    tail = params.a(d + 1) * params.a(d + 2)
    r = tail / params.a(d + 1 - j)
    return -(1 - r / zval) * (1 - r * zval)


def apply_n_operator(op: LatticeOperator, f: Callable[[tuple[int, ...]], mpq], n: Sequence[int]) -> mpq:
    return op.apply_at(f, n)


def bispectral_check(
    params: QParams,
    n: Sequence[int],
    z: Sequence,
    j: int,
    ops: list[LatticeOperator] | None = None,
) -> dict:
    """Exact check of the lattice-side spectral equation at (n, z):
    the transported operator acting on the index reproduces the dual
    eigenvalue times the unit-normalized polynomial value."""
    if ops is None:
        ops = n_operator_family(params)
    zt = tuple(mpq(t) for t in z)

    def phat(m: tuple[int, ...]) -> mpq:
        return normalize_phat(params, m, mv_poly_regular(params, m, zt))

    lhs = ops[j - 1].apply_at(phat, n)
    rhs = n_eigenvalue(params, zt, j) * phat(tuple(int(t) for t in n))
    return {
        "check": "bispectral-n",
        "params": _params_digest(params),
        "inputs": {"n": list(n), "z": [str(t) for t in zt], "j": j},
        "lhs": str(lhs),
        "rhs": str(rhs),
        "pass": lhs == rhs,
    }
