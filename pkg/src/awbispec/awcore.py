"""Askey-Wilson polynomial families: the 1-D four-parameter polynomials,
Gasper-Rahman's multivariable product construction, weights, closed-form
norms, the unit normalization used by the duality, and the q-Racah
specialization on the finite monotone lattice.

Exact operations return mpq rationals; weight/norm evaluations with
infinite products return floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import gmpy2
from gmpy2 import mpq

from .laurent import LaurentPoly, XPoly
from .qseries import (
    QBase,
    SeriesPoleError,
    q_pochhammer,
    q_pochhammer_inf,
    q_pochhammer_multi,
)

__all__ = [
    "QParams",
    "RacahPoint",
    "ConstraintError",
    "NeedsSquareBaseError",
    "DegenerateNormalizationError",
    "partial_sums",
    "chain_constraints_hold",
    "aw_poly_1d",
    "aw_poly_1d_regular",
    "aw_norm_1d",
    "mv_poly",
    "mv_poly_symbolic",
    "mv_norm",
    "mv_weight",
    "normalization_factor",
    "normalize_phat",
    "qracah_poly_1d",
    "qracah_poly_mv",
    "qracah_weight",
    "racah_lattice",
]


class ConstraintError(ValueError):
    """Parameter chain constraints required for orthogonality fail."""


class NeedsSquareBaseError(ArithmeticError):
    """A half-integer power has no rational value for these inputs."""


class DegenerateNormalizationError(ArithmeticError):
    """A Pochhammer factor in the unit normalization vanished."""


@dataclass(frozen=True)
class QParams:
    """Ambient data: dimension d, base with q = s**2, and the d+3 nonzero
    rational parameters alpha_0..alpha_{d+2}."""

    d: int
    base: QBase
    alpha: tuple[mpq, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(mpq(a) for a in self.alpha))
        if self.d < 1:
            raise ValueError("d must be positive")
        if len(self.alpha) != self.d + 3:
            raise ValueError(f"need d+3 = {self.d + 3} parameters, got {len(self.alpha)}")
        if any(a == 0 for a in self.alpha):
            raise ValueError("all alpha_j must be nonzero")

    @property
    def q(self) -> mpq:
        return self.base.q

    def a(self, j: int) -> mpq:
        """alpha_j for 0 <= j <= d+2."""
        return self.alpha[j]

    # the two conventions stated with the weight: z_0 = alpha_0 and
    # z_{d+1} = alpha_{d+2}; kept here so every consumer reads one source
    @property
    def z_left(self) -> mpq:
        return self.alpha[0]

    @property
    def z_right(self) -> mpq:
        return self.alpha[self.d + 2]


def partial_sums(n: Sequence[int]) -> list[int]:
    """N_0 = 0, N_k = n_1 + ... + n_k."""
    out = [0]
    for v in n:
        out.append(out[-1] + v)
    return out


def chain_constraints_hold(params: QParams) -> bool:
    """The inequality chain on |alpha_j| that makes every weight factor
    have modulus below one on the torus:

        0 < |a_{d+1}| < |a_d| < ... < |a_1| < min(1, |a_0|^2)
        |a_{d+1}|/|a_d| < |a_{d+2}| < |a_d|/|a_{d+1}|
    """
    d = params.d
    mags = [abs(a) for a in params.alpha]
    chain = [mags[d + 1]] + [mags[j] for j in range(d, 0, -1)]
    for lo, hi in zip(chain, chain[1:]):
        if not lo < hi:
            return False
    if not mags[1] < min(mpq(1), mags[0] ** 2):
        return False
    return mags[d + 1] / mags[d] < mags[d + 2] < mags[d] / mags[d + 1]


def require_chain_constraints(params: QParams) -> None:
    if not chain_constraints_hold(params):
        raise ConstraintError("parameter chain constraints violated")


# --------------------------------------------------------------- 1-D family


def aw_poly_1d(n: int, a, b, c, d, z, base: QBase) -> mpq:
    """Four-parameter Askey-Wilson polynomial p_n at x = (z + 1/z)/2,
    via the prefactor (ab,ac,ad;q)_n / a^n times the terminating series.

    Errors with SeriesPoleError when a lower parameter ab, ac, ad hits
    q^{-m} for m < n.
    """
    a, b, c, d, z = (mpq(t) for t in (a, b, c, d, z))
    if a == 0:
        raise ValueError("parameter a must be nonzero")
    if z == 0:
        raise ZeroDivisionError("z must be nonzero")
    q = base.q
    lowers = (a * b, a * c, a * d)
    for t in lowers:
        s = t
        for _ in range(n):
            if s == 1:
                raise SeriesPoleError("series pole")
            s *= q
    pre = q_pochhammer_multi(lowers, n, base) / a**n
    uppers = [q**-n, a * b * c * d * q ** (n - 1), a * z, a / z]
    total = mpq(0)
    term = mpq(1)
    u = list(uppers)
    l = [*lowers, q]
    for j in range(n + 1):
        total += term
        if j == n:
            break
        num = mpq(1)
        den = mpq(1)
        for i in range(4):
            num *= 1 - u[i]
            u[i] *= q
            den *= 1 - l[i]
            l[i] *= q
        term = term * num / den * q
    return pre * total


def aw_poly_1d_regular(n: int, a, b, c, d, z, base: QBase) -> mpq:
    """Same polynomial through the cancelled terminating form

        sum_l (q^{-n};q)_l (abcd q^{n-1};q)_l (az;q)_l (a/z;q)_l q^l/(q;q)_l
              * (ab q^l, ac q^l, ad q^l;q)_{n-l} / a^n,

    whose only denominators are (q;q)_l.  Defined at every parameter
    point, in particular on q-Racah lattices where the raw series has
    0/0 terms.
    """
    a, b, c, d, z = (mpq(t) for t in (a, b, c, d, z))
    if a == 0:
        raise ValueError("parameter a must be nonzero")
    q = base.q
    abcd = a * b * c * d
    total = mpq(0)
    head = mpq(1)  # (q^{-n};q)_l (abcd q^{n-1};q)_l (az;q)_l (a/z;q)_l q^l / (q;q)_l
    u = [q**-n, abcd * q ** (n - 1), a * z, a / z]
    for l in range(n + 1):
        tail = (
            q_pochhammer(a * b * q**l, n - l, base)
            * q_pochhammer(a * c * q**l, n - l, base)
            * q_pochhammer(a * d * q**l, n - l, base)
        )
        total += head * tail
        if l == n:
            break
        num = mpq(1)
        for i in range(4):
            num *= 1 - u[i]
            u[i] *= q
        head = head * num / (1 - q ** (l + 1)) * q
    return total / a**n


def aw_norm_1d(n: int, a, b, c, d, base: QBase, eps: float = 1e-16) -> float:
    """Closed-form squared norm h_n of p_n, with infinite products
    truncated at eps."""
    a, b, c, d = (mpq(t) for t in (a, b, c, d))
    if max(abs(a), abs(b), abs(c), abs(d)) >= 1:
        raise ConstraintError("parameters must have modulus below one")
    q = base.q
    abcd = a * b * c * d
    num = float(q_pochhammer(abcd * q ** (n - 1), n, base)) * q_pochhammer_inf(
        abcd * q ** (2 * n), base, eps
    )
    den = q_pochhammer_inf(q ** (n + 1), base, eps)
    for pair in (a * b, a * c, a * d, b * c, b * d, c * d):
        den *= q_pochhammer_inf(pair * q**n, base, eps)
    return num / den


# ------------------------------------------------------- multivariable family


def _factor_parameters(params: QParams, n: Sequence[int], j: int) -> tuple[mpq, mpq, mpq]:
    """(a, b, gamma) for factor j (1-based): a = alpha_j q^{N_{j-1}},
    b = (alpha_j/alpha_0^2) q^{N_{j-1}}, and the c,d arguments are
    gamma*z_{j+1}^{+1,-1} with gamma = alpha_{j+1}/alpha_j."""
    N = partial_sums(n)
    q = params.q
    a = params.a(j) * q ** N[j - 1]
    b = params.a(j) / params.a(0) ** 2 * q ** N[j - 1]
    gamma = params.a(j + 1) / params.a(j)
    return a, b, gamma


def mv_poly(params: QParams, n: Sequence[int], z: Sequence) -> mpq:
    """Product of d coupled 1-D polynomials; factor j sees x_j and the
    next coordinate z_{j+1} through its last two parameters (with
    z_{d+1} = alpha_{d+2})."""
    d = params.d
    if len(n) != d or len(z) != d:
        raise ValueError("n and z must have length d")
    zs = [mpq(t) for t in z] + [params.z_right]
    out = mpq(1)
    for j in range(1, d + 1):
        a, b, gamma = _factor_parameters(params, n, j)
        c = gamma * zs[j]
        dd = gamma / zs[j]
        out *= aw_poly_1d(n[j - 1], a, b, c, dd, zs[j - 1], params.base)
    return out


def mv_poly_regular(params: QParams, n: Sequence[int], z: Sequence) -> mpq:
    """mv_poly through the cancelled 1-D form; defined at lattice points
    where the raw series is 0/0."""
    d = params.d
    zs = [mpq(t) for t in z] + [params.z_right]
    out = mpq(1)
    for j in range(1, d + 1):
        a, b, gamma = _factor_parameters(params, n, j)
        out *= aw_poly_1d_regular(
            n[j - 1], a, b, gamma * zs[j], gamma / zs[j], zs[j - 1], params.base
        )
    return out


def mv_poly_symbolic(params: QParams, n: Sequence[int]) -> XPoly:
    """Expand the product into an exact polynomial in x_1..x_d.

    Uses the cancelled terminating form per factor; the paired factors
    (1 - a*gamma*q^m z_{j+1})(1 - a*gamma*q^m / z_{j+1}) combine into
    polynomials in x_{j+1}, so the result is inversion invariant by
    construction (a failed conversion signals a bug).
    """
    d = params.d
    if len(n) != d:
        raise ValueError("n must have length d")
    q = params.q
    total = LaurentPoly.one(d)
    for j in range(1, d + 1):
        a, b, gamma = _factor_parameters(params, n, j)
        nj = n[j - 1]
        zj = LaurentPoly.variable(d, j)
        zj_inv = LaurentPoly.variable(d, j, -1)
        factor = LaurentPoly.zero(d)
        head = mpq(1)
        u0, u1 = q**-nj, a * b * gamma**2 * q ** (nj - 1)
        az_pochs: list[LaurentPoly] = [LaurentPoly.one(d)]
        for l in range(nj):
            t = a * q**l
            az_pochs.append(
                az_pochs[-1] * (1 - t * zj) * (1 - t * zj_inv)
            )
        for l in range(nj + 1):
            # trailing (ac q^l, ad q^l; q)_{n-l} with c,d = gamma*z_{j+1}^{±1}
            tail = LaurentPoly.constant(d, q_pochhammer(a * b * q**l, nj - l, base=params.base))
            if j < d:
                zj1 = LaurentPoly.variable(d, j + 1)
                zj1_inv = LaurentPoly.variable(d, j + 1, -1)
                for m in range(l, nj):
                    t = a * gamma * q**m
                    tail = tail * ((1 - t * zj1) * (1 - t * zj1_inv))
            else:
                w = params.z_right
                for m in range(l, nj):
                    t = a * gamma * q**m
                    tail = tail * ((1 - t * w) * (1 - t / w))
            factor = factor + az_pochs[l] * tail * head
            if l == nj:
                break
            head = head * (1 - u0) * (1 - u1) / (1 - q ** (l + 1)) * q
            u0 *= q
            u1 *= q
        total = total * factor * (a ** -nj)
    return total.to_x_poly()


def mv_norm(params: QParams, n: Sequence[int], eps: float = 1e-16) -> float:
    """Closed-form squared norm H_n with truncated infinite products."""
    require_chain_constraints(params)
    d = params.d
    q = params.q
    N = partial_sums(n)
    a = params.a
    base = params.base
    out = 1.0
    for k in range(1, d + 1):
        nk = n[k - 1]
        r2 = a(k + 1) ** 2 / a(0) ** 2
        num = float(q_pochhammer(r2 * q ** (N[k - 1] + N[k] - 1), nk, base))
        num *= q_pochhammer_inf(r2 * q ** (2 * N[k]), base, eps)
        den = q_pochhammer_inf(q ** (nk + 1), base, eps)
        den *= q_pochhammer_inf(a(k) ** 2 / a(0) ** 2 * q ** (N[k - 1] + N[k]), base, eps)
        den *= q_pochhammer_inf(a(k + 1) ** 2 / a(k) ** 2 * q**nk, base, eps)
        out *= num / den
    for eSign in (1, -1):
        t = a(d + 1) * a(d + 2) ** eSign * q ** N[d]
        out /= q_pochhammer_inf(t, base, eps)
        out /= q_pochhammer_inf(t / a(0) ** 2, base, eps)
    return out


def mv_weight(params: QParams, z: Sequence[complex], eps: float = 1e-16) -> float:
    """Weight w(z) at a point of the unit torus, with truncated products.

    Uses the conventions z_0 = alpha_0 and z_{d+1} = alpha_{d+2}; the
    result is real (factors pair into conjugates), the tiny imaginary
    residue of the complex product is dropped.
    """
    require_chain_constraints(params)
    d = params.d
    for zj in z:
        if abs(abs(complex(zj)) - 1.0) > 1e-12:
            raise ValueError("weight is defined for |z_j| = 1")
    q = float(params.q)

    def pinf(aval: complex) -> complex:
        out = 1.0 + 0.0j
        t = complex(aval)
        while abs(t) >= eps:
            out *= 1.0 - t
            t *= q
        return out

    zs = [complex(params.z_left)] + [complex(t) for t in z] + [complex(params.z_right)]
    num = 1.0 + 0.0j
    for j in range(1, d + 1):
        num *= pinf(zs[j] ** 2) * pinf(zs[j] ** -2)
    den = 1.0 + 0.0j
    for k in range(0, d + 1):
        ratio = float(params.a(k + 1) / params.a(k))
        for e1 in (1, -1):
            for e2 in (1, -1):
                den *= pinf(ratio * zs[k + 1] ** e1 * zs[k] ** e2)
    return (num / den).real


# ---------------------------------------------------------- unit normalization


def normalization_factor(params: QParams, n: Sequence[int]) -> mpq:
    """The z-independent factor turning P into the self-dual P-hat:

        (a_{d+1} a_{d+2})^{|n|} /
        [ (a_{d+1}a_{d+2}, a_{d+1}a_{d+2}/a_0^2;q)_{|n|}
          * prod_j a_j^{n_j} (a_{j+1}^2/a_j^2;q)_{n_j} ].
    """
    d = params.d
    a = params.a
    base = params.base
    size = sum(n)
    den = q_pochhammer(a(d + 1) * a(d + 2), size, base)
    den *= q_pochhammer(a(d + 1) * a(d + 2) / a(0) ** 2, size, base)
    for j in range(1, d + 1):
        den *= a(j) ** n[j - 1] * q_pochhammer(
            a(j + 1) ** 2 / a(j) ** 2, n[j - 1], base
        )
    if den == 0:
        raise DegenerateNormalizationError("degenerate normalization")
    return (a(d + 1) * a(d + 2)) ** size / den


def normalize_phat(params: QParams, n: Sequence[int], value_of_P) -> mpq:
    """Rescale one polynomial value by the unit normalization factor."""
    return normalization_factor(params, n) * mpq(value_of_P)


# ------------------------------------------------------------------ q-Racah


def _rational_sqrt(r: mpq) -> mpq | None:
    """Positive rational square root of r, or None if none exists."""
    if r < 0:
        return None
    num, den = r.numerator, r.denominator
    if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
        return None
    return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))


def _half_power(base_val: mpq, k: int) -> mpq:
    """base_val**(k/2), exact; errors when the square root is irrational."""
    if k % 2 == 0:
        return base_val ** (k // 2)
    root = _rational_sqrt(base_val)
    if root is None:
        raise NeedsSquareBaseError("needs square base")
    return root**k


def qracah_poly_1d(k: int, a, b, c, N: int, y: int, base: QBase) -> mpq:
    """1-D q-Racah polynomial

        r_k(y;a,b,c,N) = (aq,bcq,q^{-N};q)_k (q^N/c)^{k/2}
                         * 4phi3(q^{-k}, abq^{k+1}, q^{-y}, cq^{y-N};
                                 aq, bcq, q^{-N} | q, q)

    evaluated through the cancelled terminating form, so it is defined
    whenever the (q^N/c)^{k/2} factor is rational (positive-root
    convention for odd k).
    """
    a, b, c = (mpq(t) for t in (a, b, c))
    q = base.q
    scale = _half_power(q**N / c, k)
    total = mpq(0)
    head = mpq(1)
    u = [q**-k, a * b * q ** (k + 1), q**-y, c * q ** (y - N)]
    for l in range(k + 1):
        tail = (
            q_pochhammer(a * q ** (l + 1), k - l, base)
            * q_pochhammer(b * c * q ** (l + 1), k - l, base)
            * q_pochhammer(q ** (l - N), k - l, base)
        )
        total += head * tail
        if l == k:
            break
        num = mpq(1)
        for i in range(4):
            num *= 1 - u[i]
            u[i] *= q
        head = head * num / (1 - q ** (l + 1)) * q
    return scale * total


@dataclass(frozen=True)
class RacahPoint:
    """Monotone lattice point 0 <= y_1 <= ... <= y_d <= N."""

    y: tuple[int, ...]
    N: int

    def __post_init__(self):
        object.__setattr__(self, "y", tuple(int(t) for t in self.y))
        chain = (0,) + self.y + (self.N,)
        for lo, hi in zip(chain, chain[1:]):
            if lo > hi:
                raise ValueError("y must satisfy 0 <= y_1 <= ... <= y_d <= N")


def racah_level(params: QParams) -> int:
    """The integer N with alpha_{d+2}/alpha_{d+1} = q^N; errors otherwise."""
    ratio = params.a(params.d + 2) / params.a(params.d + 1)
    q = params.q
    t = mpq(1)
    for N in range(0, 512):
        if t == ratio:
            return N
        t *= q
    raise ValueError("alpha_{d+2}/alpha_{d+1} is not a small power of q")


def qracah_poly_mv(params: QParams, n: Sequence[int], point: RacahPoint) -> mpq:
    """Multivariable q-Racah value R_n(y): factor k is the 1-D polynomial
    at shifted argument y_k - N_{k-1} with parameters

        a = (alpha_k^2/alpha_0^2) q^{2N_{k-1}-1},  b = alpha_{k+1}^2/(q alpha_k^2),
        c = alpha_k^2 q^{y_{k+1}+N_{k-1}},         lattice size y_{k+1} - N_{k-1},

    and conventions y_0 = 0, y_{d+1} = N."""
    d = params.d
    if len(n) != d:
        raise ValueError("n must have length d")
    if point.N != racah_level(params):
        raise ValueError("lattice size does not match alpha_{d+2}/alpha_{d+1}")
    q = params.q
    ys = list(point.y) + [point.N]
    N = partial_sums(n)
    out = mpq(1)
    for k in range(1, d + 1):
        a = params.a(k) ** 2 / params.a(0) ** 2 * q ** (2 * N[k - 1] - 1)
        b = params.a(k + 1) ** 2 / (q * params.a(k) ** 2)
        c = params.a(k) ** 2 * q ** (ys[k] + N[k - 1])
        out *= qracah_poly_1d(
            n[k - 1], a, b, c, ys[k] - N[k - 1], ys[k - 1] - N[k - 1], params.base
        )
    return out


def qracah_weight(params: QParams, point: RacahPoint) -> mpq:
    """Exact lattice weight rho(y), with y_0 = 0 and y_{d+1} = N."""
    d = params.d
    q = params.q
    base = params.base
    a = params.a
    ys = [0] + list(point.y) + [point.N]
    out = mpq(1)
    for k in range(0, d + 1):
        dy = ys[k + 1] - ys[k]
        sy = ys[k + 1] + ys[k]
        r = a(k + 1) ** 2 / a(k) ** 2
        num = q_pochhammer(r, dy, base) * q_pochhammer(a(k + 1) ** 2, sy, base)
        den = q_pochhammer(q, dy, base) * q_pochhammer(q * a(k) ** 2, sy, base)
        out *= num / den
    for k in range(1, d + 1):
        out *= (1 - a(k) ** 2 * q ** (2 * ys[k])) * (a(k - 1) / a(k)) ** (2 * ys[k])
    return out


def racah_lattice(d: int, N: int) -> Iterator[RacahPoint]:
    """All monotone chains 0 <= y_1 <= ... <= y_d <= N."""
    for y in itertools.combinations_with_replacement(range(N + 1), d):
        yield RacahPoint(y, N)
