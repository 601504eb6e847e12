"""The q-difference operator algebra on z_1..z_d.

Operators are finite sums sum_nu c_nu(z) E^nu where E^nu shifts
z -> z*q^nu and each coefficient is an exact rational function
(numerator polynomial over a factored denominator).  The module builds
the second-order operator attached to the multivariable Askey-Wilson
weight in both of its guises (forward/backward-difference form and
plain shift form), the nested family of d commuting operators obtained
by truncating the coordinate list, their eigenvalues, and the
triangularity scan.

Coefficients carry q and the alpha parameters pre-substituted as exact
rationals.  The builders are written against a slot environment so the
same formulas also run with a coordinate symbol in a parameter slot
(the nested family) or over an extended ring with the alphas as extra
variables (needed by the lattice-side transport in `duality`).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from .awcore import QParams, partial_sums
from .laurent import InexactDivisionError, LaurentPoly, XPoly, poly_to_json

__all__ = [
    "CoeffFn",
    "QDiffOperator",
    "PoleError",
    "Unit",
    "SlotEnv",
    "coeff_A",
    "coeff_C",
    "shift_form_scalar",
    "delta_form_operator",
    "shift_form_operator",
    "z_operator_family",
    "z_eigenvalue",
    "triangularity_constant",
    "triangularity_report",
    "composition_coeff_value",
    "commutator_coeff_value",
    "commutator_values_at",
    "commutator_support",
    "numeric_env",
    "symbolic_env",
    "nested_env",
]

Shift = tuple[int, ...]


class PoleError(ArithmeticError):
    """An evaluation point (or one of its shifts) hit a coefficient pole."""

    def __init__(self, message: str, shift: Shift | None = None):
        super().__init__(message)
        self.shift = shift


def _poly_key(p: LaurentPoly) -> tuple:
    return tuple(sorted(((e, str(c)) for e, c in p.terms.items())))


class CoeffFn:
    """Rational-function coefficient: numerator over a factored denominator.

    The factored denominator makes least-common-denominator sums cheap;
    `den` exposes the expanded product for serialization and equality.
    """

    __slots__ = ("num", "den_factors")

    def __init__(self, num: LaurentPoly, den_factors: Iterable[LaurentPoly] = ()):
        self.num = num
        factors = [f for f in den_factors if not (f.is_constant() and f.constant_value() == 1)]
        for f in factors:
            if f.is_zero():
                raise ZeroDivisionError("zero denominator factor")
        self.den_factors = tuple(sorted(factors, key=_poly_key))

    @classmethod
    def constant(cls, dim: int, c) -> "CoeffFn":
        return cls(LaurentPoly.constant(dim, c))

    @property
    def dim(self) -> int:
        return self.num.dim

    @property
    def den(self) -> LaurentPoly:
        out = LaurentPoly.one(self.num.dim)
        for f in self.den_factors:
            out = out * f
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __neg__(self) -> "CoeffFn":
        return CoeffFn(-self.num, self.den_factors)

    def __mul__(self, other) -> "CoeffFn":
        if isinstance(other, CoeffFn):
            return CoeffFn(self.num * other.num, self.den_factors + other.den_factors)
        return CoeffFn(self.num * other, self.den_factors)

    __rmul__ = __mul__

    def __add__(self, other: "CoeffFn") -> "CoeffFn":
        c1 = Counter(self.den_factors)
        c2 = Counter(other.den_factors)
        lcm = c1 | c2
        n1 = self.num
        for g, m in (lcm - c1).items():
            n1 = n1 * g**m
        n2 = other.num
        for g, m in (lcm - c2).items():
            n2 = n2 * g**m
        num = n1 + n2
        if num.is_zero():
            return CoeffFn(LaurentPoly.zero(self.num.dim))
        return CoeffFn(num, tuple(lcm.elements()))

    def __sub__(self, other: "CoeffFn") -> "CoeffFn":
        return self + (-other)

    def q_shift(self, q, nu: Shift) -> "CoeffFn":
        return CoeffFn(
            self.num.q_shift(q, nu), tuple(f.q_shift(q, nu) for f in self.den_factors)
        )

    def involution(self, j: int) -> "CoeffFn":
        return CoeffFn(
            self.num.involution(j), tuple(f.involution(j) for f in self.den_factors)
        )

    def evaluate(self, zs: Sequence) -> mpq:
        den = mpq(1)
        for f in self.den_factors:
            v = f.evaluate(zs)
            if v == 0:
                raise ZeroDivisionError("coefficient pole")
            den *= v
        return self.num.evaluate(zs) / den

    def equals_rational(self, other: "CoeffFn") -> bool:
        """Equality as rational functions: num1*den2 == num2*den1."""
        return self.num * other.den == other.num * self.den

    def __repr__(self) -> str:
        return f"CoeffFn({self.num!r} / {len(self.den_factors)} factors)"


class QDiffOperator:
    """Finite-support operator sum_nu c_nu(z) E^nu acting on dim variables."""

    __slots__ = ("dim", "q", "support")

    def __init__(self, dim: int, q, support: dict[Shift, CoeffFn] | None = None):
        self.dim = dim
        self.q = mpq(q)
        self.support: dict[Shift, CoeffFn] = {}
        if support:
            for nu, cf in support.items():
                if len(nu) != dim:
                    raise ValueError("shift vector has wrong dimension")
                if not cf.is_zero():
                    self.support[tuple(nu)] = cf

    @classmethod
    def identity(cls, dim: int, q) -> "QDiffOperator":
        return cls(dim, q, {(0,) * dim: CoeffFn.constant(dim, 1)})

    def sorted_support(self) -> list[tuple[Shift, CoeffFn]]:
        return sorted(self.support.items(), key=lambda kv: kv[0])

    # ------------------------------------------------------------ application

    def apply(self, p: XPoly) -> XPoly:
        """Exact image of an x-polynomial, staying in the x-ring.

        Sums num_nu * E^nu(p) over the least common denominator of the
        factored coefficient denominators, then divides out each factor;
        an InexactDivisionError means the operator does not satisfy the
        polynomial-preservation hypothesis (or is corrupted).
        """
        if p.dim != self.dim:
            raise ValueError("dimension mismatch")
        P = p.embed()
        acc = LaurentPoly.zero(self.dim)
        acc_den: Counter = Counter()
        for nu, cf in self.sorted_support():
            t = cf.num * P.q_shift(self.q, nu)
            fden = Counter(cf.den_factors)
            lcm = acc_den | fden
            for g, m in (lcm - acc_den).items():
                acc = acc * g**m
            for g, m in (lcm - fden).items():
                t = t * g**m
            acc = acc + t
            acc_den = lcm
        for g, m in acc_den.items():
            for _ in range(m):
                acc = acc.exact_divide(g)
        return acc.to_x_poly()

    def apply_at_point(self, f: Callable[[tuple], mpq], z: Sequence) -> mpq:
        """sum_nu c_nu(z) f(z*q^nu), exact; pole hits name the offending shift."""
        zs = tuple(mpq(t) for t in z)
        total = mpq(0)
        for nu, cf in self.sorted_support():
            try:
                c = cf.evaluate(zs)
            except ZeroDivisionError:
                raise PoleError(f"coefficient pole at shift {nu}", shift=nu)
            shifted = tuple(zi * self.q**ni for zi, ni in zip(zs, nu))
            total += c * f(shifted)
        return total

    def coeff_value(self, nu: Shift, z: Sequence) -> mpq:
        cf = self.support.get(tuple(nu))
        if cf is None:
            return mpq(0)
        return cf.evaluate(z)

    # ------------------------------------------------------------------ algebra

    def compose(self, other: "QDiffOperator") -> "QDiffOperator":
        """(self∘other); coefficient at mu is
        sum_{nu1+nu2=mu} c^self_nu1(z) * c^other_nu2(z*q^nu1)."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out: dict[Shift, CoeffFn] = {}
        for nu1, c1 in self.support.items():
            for nu2, c2 in other.support.items():
                mu = tuple(a + b for a, b in zip(nu1, nu2))
                term = c1 * c2.q_shift(self.q, nu1)
                cur = out.get(mu)
                out[mu] = term if cur is None else cur + term
        return QDiffOperator(self.dim, self.q, out)

    def commutator(self, other: "QDiffOperator") -> "QDiffOperator":
        ab = self.compose(other)
        ba = other.compose(self)
        out: dict[Shift, CoeffFn] = dict(ab.support)
        for mu, cf in ba.support.items():
            cur = out.get(mu)
            out[mu] = -cf if cur is None else cur - cf
        return QDiffOperator(self.dim, self.q, out)

    def involution(self, k: int) -> "QDiffOperator":
        """Conjugate by z_k -> 1/z_k: coefficients transformed, shift in
        coordinate k reflected."""
        out: dict[Shift, CoeffFn] = {}
        for nu, cf in self.support.items():
            mu = list(nu)
            mu[k - 1] = -mu[k - 1]
            out[tuple(mu)] = cf.involution(k)
        return QDiffOperator(self.dim, self.q, out)

    def equals_rational(self, other: "QDiffOperator") -> bool:
        if self.dim != other.dim or set(self.support) != set(other.support):
            return False
        return all(
            cf.equals_rational(other.support[nu]) for nu, cf in self.support.items()
        )

    def to_json(self) -> list[dict]:
        return [
            {
                "shift": list(nu),
                "num": poly_to_json(cf.num),
                "den": poly_to_json(cf.den),
            }
            for nu, cf in self.sorted_support()
        ]


# ---------------------------------------------------------------------------
# slot environments: where the builders read z- and alpha-values from
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Unit:
    """An invertible monomial c * w^e of the ambient ring."""

    coef: mpq
    exps: Shift

    def __mul__(self, other: "Unit") -> "Unit":
        return Unit(self.coef * other.coef, tuple(a + b for a, b in zip(self.exps, other.exps)))

    def inv(self) -> "Unit":
        return Unit(1 / self.coef, tuple(-e for e in self.exps))

    def __pow__(self, k: int) -> "Unit":
        return Unit(self.coef**k, tuple(e * k for e in self.exps))

    def scale(self, c) -> "Unit":
        return Unit(self.coef * mpq(c), self.exps)

    def to_poly(self, dim: int) -> LaurentPoly:
        return LaurentPoly.monomial(dim, self.exps, self.coef)


def const_unit(dim: int, c) -> Unit:
    return Unit(mpq(c), (0,) * dim)


def var_unit(dim: int, j: int, power: int = 1) -> Unit:
    e = [0] * dim
    e[j - 1] = power
    return Unit(mpq(1), tuple(e))


@dataclass(frozen=True)
class SlotEnv:
    """Slot assignment for one operator instance.

    op_dim coordinates are shifted; zslots give their ring values,
    aslots the op_dim+3 parameter values.  The z_0 and z_{top}
    conventions read the first and last parameter slots.
    """

    ambient_dim: int
    op_dim: int
    q: mpq
    zslots: tuple[Unit, ...]
    aslots: tuple[Unit, ...]
    shift_image: Callable[[Shift], Shift]

    def z_value(self, j: int) -> Unit:
        """z_j for 0 <= j <= op_dim+1, honoring the edge conventions."""
        if j == 0:
            return self.aslots[0]
        if j == self.op_dim + 1:
            return self.aslots[self.op_dim + 2]
        return self.zslots[j - 1]

    def a_value(self, j: int) -> Unit:
        return self.aslots[j]


def numeric_env(params: QParams) -> SlotEnv:
    """Plain z-side environment: ambient ring is z_1..z_d, alphas rational."""
    d = params.d
    return SlotEnv(
        ambient_dim=d,
        op_dim=d,
        q=params.q,
        zslots=tuple(var_unit(d, j) for j in range(1, d + 1)),
        aslots=tuple(const_unit(d, a) for a in params.alpha),
        shift_image=lambda nu: tuple(nu),
    )


def nested_env(params: QParams, j: int) -> SlotEnv:
    """Environment of the j-th member of the commuting family: the
    operator acts on z_1..z_j and its last parameter slot holds the
    coordinate symbol z_{j+1} (for j = d the usual alpha_{d+2})."""
    d = params.d
    if not 1 <= j <= d:
        raise ValueError("family index out of range")
    top = const_unit(d, params.a(d + 2)) if j == d else var_unit(d, j + 1)
    aslots = tuple(const_unit(d, params.a(m)) for m in range(j + 2)) + (top,)

    def image(nu: Shift) -> Shift:
        return tuple(nu) + (0,) * (d - j)

    return SlotEnv(
        ambient_dim=d,
        op_dim=j,
        q=params.q,
        zslots=tuple(var_unit(d, t) for t in range(1, j + 1)),
        aslots=aslots,
        shift_image=image,
    )


def symbolic_env(d: int, q, j: int | None = None) -> SlotEnv:
    """Extended-ring environment: variables z_1..z_d, alpha_0..alpha_{d+2}
    (dim 2d+3), so the coefficients keep their parameter dependence.
    With j set, builds the j-th family member instead of the full
    operator."""
    dim = 2 * d + 3
    opd = d if j is None else j
    alpha_units = tuple(var_unit(dim, d + 1 + m) for m in range(d + 3))
    if j is None or j == d:
        top = alpha_units[d + 2]
    else:
        top = var_unit(dim, j + 1)
    aslots = tuple(alpha_units[m] for m in range(opd + 2)) + (top,)

    def image(nu: Shift) -> Shift:
        return tuple(nu) + (0,) * (dim - opd)

    return SlotEnv(
        ambient_dim=dim,
        op_dim=opd,
        q=mpq(q),
        zslots=tuple(var_unit(dim, t) for t in range(1, opd + 1)),
        aslots=aslots,
        shift_image=image,
    )


# ---------------------------------------------------------------------------
# coefficient builders
# ---------------------------------------------------------------------------


def _one_minus(env: SlotEnv, u: Unit) -> LaurentPoly:
    return LaurentPoly.one(env.ambient_dim) - u.to_poly(env.ambient_dim)


def _x_of(env: SlotEnv, u: Unit) -> LaurentPoly:
    dim = env.ambient_dim
    half = mpq(1, 2)
    return (u.to_poly(dim) + u.inv().to_poly(dim)) * half


def _B_factor(env: SlotEnv, j: int, kk: int, ll: int) -> LaurentPoly:
    """The quadratic building block coupling z_j and z_{j+1} for local
    shift signs (kk, ll) in {-1,0,1}^2; negative signs act as the
    corresponding inversions of the base (0/1) cases."""
    dim = env.ambient_dim
    q = env.q
    vj = env.z_value(j)
    vj1 = env.z_value(j + 1)
    r = env.a_value(j + 1) * env.a_value(j).inv()
    if kk == 0 and ll == 0:
        quad = (r * r).scale(1 / q).to_poly(dim)
        cross = _x_of(env, vj) * _x_of(env, vj1) * r.scale(mpq(4) / (q + 1)).to_poly(dim)
        return LaurentPoly.one(dim) + quad - cross
    if kk == 0:
        w = vj1**ll
        return _one_minus(env, r * vj * w) * _one_minus(env, r * w * vj.inv())
    if ll == 0:
        u = vj**kk
        return _one_minus(env, r * u * vj1) * _one_minus(env, r * u * vj1.inv())
    u = vj**kk
    w = vj1**ll
    return _one_minus(env, r * u * w) * _one_minus(env, (r * u * w).scale(q))


def _b_factors(env: SlotEnv, j: int, kk: int) -> tuple[LaurentPoly, LaurentPoly]:
    """Denominator pair for coordinate j at local shift sign kk."""
    q = env.q
    v = env.zslots[j - 1]
    if kk == 0:
        return (
            _one_minus(env, (v * v).scale(q)),
            _one_minus(env, (v.inv() * v.inv()).scale(q)),
        )
    w = v**kk
    return (_one_minus(env, w * w), _one_minus(env, (w * w).scale(q)))


def build_C(env: SlotEnv, nu: Shift) -> CoeffFn:
    """Shift-form coefficient at nu in {-1,0,1}^op_dim."""
    k = env.op_dim
    if len(nu) != k or any(t not in (-1, 0, 1) for t in nu):
        raise ValueError("shift out of alphabet")
    q = env.q
    dim = env.ambient_dim
    ext = (0,) + tuple(nu) + (0,)
    weight = sum(1 for t in nu if t != 0)
    num = LaurentPoly.constant(dim, (q * (q + 1)) ** (k - weight))
    for j in range(0, k + 1):
        num = num * _B_factor(env, j, ext[j], ext[j + 1])
    dens: list[LaurentPoly] = []
    for j in range(1, k + 1):
        dens.extend(_b_factors(env, j, nu[j - 1]))
    return CoeffFn(num, dens)


def build_A(env: SlotEnv, nu: Shift) -> CoeffFn:
    """Difference-form coefficient at a nonzero nu in {-1,0,1}^op_dim.

    For mixed signs this is the inversion image of the all-positive
    coefficient, realized by substituting z_i -> z_i^{sign}."""
    k = env.op_dim
    if len(nu) != k or any(t not in (-1, 0, 1) for t in nu):
        raise ValueError("shift out of alphabet")
    supp = [i for i, t in enumerate(nu, start=1) if t != 0]
    if not supp:
        raise ValueError("nu must be nonzero")
    dim = env.ambient_dim
    q = env.q
    w = {i: env.zslots[i - 1] ** nu[i - 1] for i in supp}
    a = env.a_value
    first = supp[0]
    last = supp[-1]
    a0sq_inv = (a(0) * a(0)).inv()
    num = _one_minus(env, a(first) * w[first])
    num = num * _one_minus(env, a(first) * w[first] * a0sq_inv)
    for prev, cur in zip(supp, supp[1:]):
        t = a(cur) * w[cur] * w[prev] * a(prev).inv()
        num = num * _one_minus(env, t) * _one_minus(env, t.scale(q))
    num = num * _one_minus(env, a(k + 1) * a(k + 2) * w[last] * a(last).inv())
    num = num * _one_minus(env, a(k + 1) * w[last] * (a(last) * a(k + 2)).inv())
    dens: list[LaurentPoly] = []
    for i in supp:
        sq = w[i] * w[i]
        dens.append(_one_minus(env, sq))
        dens.append(_one_minus(env, sq.scale(q)))
    return CoeffFn(num, dens)


def build_scalar(env: SlotEnv) -> LaurentPoly:
    """The plain-shift form subtracts this z-independent-in-shape block:
    1 + a_{top}^2/(q a_0^2) - 4 a_{top} x_0 x_{top} / ((q+1) a_0)."""
    dim = env.ambient_dim
    q = env.q
    a0 = env.a_value(0)
    atop = env.a_value(env.op_dim + 1)
    quad = (atop * atop * (a0 * a0).inv()).scale(1 / q).to_poly(dim)
    cross = (
        _x_of(env, env.z_value(0))
        * _x_of(env, env.z_value(env.op_dim + 1))
        * (atop * a0.inv()).scale(mpq(4) / (q + 1)).to_poly(dim)
    )
    return LaurentPoly.one(dim) + quad - cross


def build_shift_form(env: SlotEnv) -> QDiffOperator:
    """sum_nu C_nu E^nu minus the scalar block at nu = 0."""
    support: dict[Shift, CoeffFn] = {}
    for nu in itertools.product((-1, 0, 1), repeat=env.op_dim):
        cf = build_C(env, nu)
        if all(t == 0 for t in nu):
            cf = cf + CoeffFn(-build_scalar(env))
        key = env.shift_image(nu)
        if not cf.is_zero():
            support[key] = cf
    return QDiffOperator(env.ambient_dim, env.q, support)


def build_delta_form(env: SlotEnv) -> QDiffOperator:
    """sum_{nu != 0} (-1)^{|nu^-|} A_nu Delta^{nu+} Nabla^{nu-}, expanded
    into plain shifts: Delta_i = E_i - 1, Nabla_i = 1 - E_i^{-1}."""
    support: dict[Shift, CoeffFn] = {}
    for nu in itertools.product((-1, 0, 1), repeat=env.op_dim):
        if all(t == 0 for t in nu):
            continue
        cf = build_A(env, nu)
        neg = sum(1 for t in nu if t < 0)
        supp = [i for i, t in enumerate(nu) if t != 0]
        # expand the difference product into E-shifts with signs
        for picks in itertools.product((0, 1), repeat=len(supp)):
            mu = [0] * env.op_dim
            sign = (-1) ** neg
            for i, take in zip(supp, picks):
                if nu[i] > 0:
                    # E_i - 1: take -> E_i, else -1
                    if take:
                        mu[i] = 1
                    else:
                        sign = -sign
                else:
                    # 1 - E_i^{-1}: take -> -E_i^{-1}, else 1
                    if take:
                        mu[i] = -1
                        sign = -sign
            key = env.shift_image(tuple(mu))
            term = cf if sign > 0 else -cf
            cur = support.get(key)
            support[key] = term if cur is None else cur + term
    return QDiffOperator(env.ambient_dim, env.q, support)


# ---------------------------------------------------------------------------
# public, parameter-level API
# ---------------------------------------------------------------------------


def coeff_A(params: QParams, nu: Shift) -> CoeffFn:
    return build_A(numeric_env(params), tuple(nu))


def coeff_C(params: QParams, nu: Shift) -> CoeffFn:
    return build_C(numeric_env(params), tuple(nu))


def shift_form_scalar(params: QParams) -> mpq:
    return build_scalar(numeric_env(params)).constant_value()


def delta_form_operator(params: QParams) -> QDiffOperator:
    return build_delta_form(numeric_env(params))


def shift_form_operator(params: QParams) -> QDiffOperator:
    return build_shift_form(numeric_env(params))


def z_operator_family(params: QParams) -> list[QDiffOperator]:
    """The d commuting operators; member j acts on z_1..z_j and carries
    z_{j+1} inside its coefficients as an ordinary coordinate."""
    return [build_shift_form(nested_env(params, j)) for j in range(1, params.d + 1)]


def z_eigenvalue(params: QParams, n: Sequence[int], j: int) -> mpq:
    """-(1 - q^{-N_j}) (1 - (alpha_{j+1}^2/alpha_0^2) q^{N_j - 1})."""
    if not 1 <= j <= params.d:
        raise ValueError("family index out of range")
    q = params.q
    Nj = partial_sums(n)[j]
    return -(1 - q**-Nj) * (1 - params.a(j + 1) ** 2 / params.a(0) ** 2 * q ** (Nj - 1))


def triangularity_constant(params: QParams, k: int) -> mpq:
    """Diagonal action on the degree-k slice of the x-filtration."""
    q = params.q
    return -(1 - q**-k) * (1 - params.a(params.d + 1) ** 2 / params.a(0) ** 2 * q ** (k - 1))


def triangularity_report(params: QParams, max_total_degree: int) -> list[dict]:
    """Apply the operator to every monomial x^n with |n| <= max degree and
    record whether the image minus the diagonal term drops in degree."""
    d = params.d
    op = shift_form_operator(params)
    report = []
    for total in range(max_total_degree + 1):
        for n in _monomials_of_degree(d, total):
            mono = XPoly.monomial(d, n)
            image = op.apply(mono)
            residual = image - mono * triangularity_constant(params, total)
            ok = residual.is_zero() or residual.total_degree() <= total - 1
            report.append({"monomial": list(n), "degree": total, "pass": bool(ok)})
    return report


def _monomials_of_degree(d: int, total: int) -> Iterable[tuple[int, ...]]:
    if d == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _monomials_of_degree(d - 1, total - head):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# pointwise identity testing helpers (no symbolic normalization)
# ---------------------------------------------------------------------------


def composition_coeff_value(a: QDiffOperator, b: QDiffOperator, mu: Shift, z: Sequence) -> mpq:
    """Coefficient of E^mu in a∘b, evaluated at z without composing
    symbolically."""
    zs = tuple(mpq(t) for t in z)
    total = mpq(0)
    for nu1, c1 in a.support.items():
        nu2 = tuple(m - n for m, n in zip(mu, nu1))
        c2 = b.support.get(nu2)
        if c2 is None:
            continue
        shifted = tuple(zi * a.q**ni for zi, ni in zip(zs, nu1))
        total += c1.evaluate(zs) * c2.evaluate(shifted)
    return total


def commutator_coeff_value(a: QDiffOperator, b: QDiffOperator, mu: Shift, z: Sequence) -> mpq:
    return composition_coeff_value(a, b, mu, z) - composition_coeff_value(b, a, mu, z)


def commutator_values_at(a: QDiffOperator, b: QDiffOperator, z: Sequence) -> dict[Shift, mpq]:
    """All commutator coefficients evaluated at one point, sharing the
    per-shifted-point coefficient evaluations."""
    zs = tuple(mpq(t) for t in z)
    out: dict[Shift, mpq] = {}

    def accumulate(first: QDiffOperator, second: QDiffOperator, sign: int) -> None:
        at_z = {nu: cf.evaluate(zs) for nu, cf in first.support.items()}
        for nu1, c1 in at_z.items():
            shifted = tuple(zi * first.q**ni for zi, ni in zip(zs, nu1))
            for nu2, cf2 in second.support.items():
                mu = tuple(x + y for x, y in zip(nu1, nu2))
                out[mu] = out.get(mu, mpq(0)) + sign * c1 * cf2.evaluate(shifted)

    accumulate(a, b, 1)
    accumulate(b, a, -1)
    return out


def commutator_support(a: QDiffOperator, b: QDiffOperator) -> list[Shift]:
    out = set()
    for nu1 in a.support:
        for nu2 in b.support:
            out.add(tuple(x + y for x, y in zip(nu1, nu2)))
    return sorted(out)
