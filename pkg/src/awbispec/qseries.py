"""Exact q-shifted factorials, truncated infinite products, and the
terminating balanced 4phi3 machinery including Sears' transformation.

The base carries q as the square of a stored rational s so that every
half-integer power of q occurring downstream stays in exact rational
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

__all__ = [
    "QBase",
    "Phi43Spec",
    "SeriesPoleError",
    "UnbalancedParametersError",
    "q_pochhammer",
    "q_pochhammer_multi",
    "q_pochhammer_inf",
    "phi43",
    "sears_pair",
]


class SeriesPoleError(ArithmeticError):
    """A lower Pochhammer parameter vanished inside a terminating sum."""


class UnbalancedParametersError(ValueError):
    """Sears parameters violate the balance condition abc = def*q^(k-1)."""


@dataclass(frozen=True)
class QBase:
    """Base data: q = s**2 for a stored nonzero rational s.

    With real_mode set, 0 < q < 1 is enforced (needed by infinite
    products and the orthogonality weights).
    """

    s: mpq
    real_mode: bool = False

    def __post_init__(self):
        object.__setattr__(self, "s", mpq(self.s))
        if self.s == 0:
            raise ValueError("s must be nonzero")
        q = self.s * self.s
        if q == 1:
            raise ValueError("q = s**2 must not equal 1")
        if self.real_mode and not (0 < q < 1):
            raise ValueError("real_mode requires 0 < q < 1")

    @property
    def q(self) -> mpq:
        return self.s * self.s

    def q_power(self, k: int) -> mpq:
        return self.q**k

    def q_half_power(self, k: int) -> mpq:
        """q**(k/2) = s**k, exact for any integer k."""
        return self.s**k


def q_pochhammer(a, n: int, base: QBase) -> mpq:
    """(a;q)_n = prod_{k=0}^{n-1} (1 - a q^k), exactly."""
    if n < 0:
        raise ValueError("negative Pochhammer order not supported")
    a = mpq(a)
    q = base.q
    out = mpq(1)
    t = a
    for _ in range(n):
        out *= 1 - t
        t *= q
    return out


def q_pochhammer_multi(args: Sequence, n: int, base: QBase) -> mpq:
    """(a_1,...,a_k;q)_n = prod_j (a_j;q)_n."""
    out = mpq(1)
    for a in args:
        out *= q_pochhammer(a, n, base)
    return out


def q_pochhammer_inf(a, base: QBase, eps: float = 1e-16) -> float:
    """Truncated (a;q)_inf: stop at the least N with |a| q^N < eps.

    Deterministic for fixed inputs; requires real_mode (so 0 < q < 1).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not base.real_mode:
        raise ValueError("infinite products require real_mode (0 < q < 1)")
    a = float(a)
    q = float(base.q)
    out = 1.0
    t = a
    while abs(t) >= eps:
        out *= 1.0 - t
        t *= q
    return out


@dataclass(frozen=True)
class Phi43Spec:
    """Argument lists of a terminating balanced-series evaluation.

    upper[0] must equal q^{-k} and no lower parameter may hit q^{-m}
    for 0 <= m < k (that would put a pole inside the sum).
    """

    k: int
    upper: tuple[mpq, mpq, mpq, mpq]
    lower: tuple[mpq, mpq, mpq]
    base: QBase

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(mpq(u) for u in self.upper))
        object.__setattr__(self, "lower", tuple(mpq(l) for l in self.lower))
        if self.k < 0:
            raise ValueError("termination order must be nonnegative")
        if len(self.upper) != 4 or len(self.lower) != 3:
            raise ValueError("need 4 upper and 3 lower parameters")
        q = self.base.q
        if self.upper[0] * q**self.k != 1:
            raise ValueError("upper[0] must equal q^{-k}")
        for b in self.lower:
            t = b
            for _ in range(self.k):
                if t == 1:
                    raise SeriesPoleError("series pole")
                t *= q


def phi43(spec: Phi43Spec, z_arg, base: QBase) -> mpq:
    """Terminating sum sum_{j<=k} prod(upper;q)_j / prod(lower;q)_j * z^j/(q;q)_j."""
    z_arg = mpq(z_arg)
    q = base.q
    total = mpq(0)
    term = mpq(1)
    up = list(spec.upper)
    lo = list(spec.lower) + [q]  # the (q;q)_j factor rides along
    u = [mpq(x) for x in up]
    l = [mpq(x) for x in lo]
    for j in range(spec.k + 1):
        total += term
        if j == spec.k:
            break
        num = mpq(1)
        den = mpq(1)
        for i in range(4):
            num *= 1 - u[i]
            u[i] *= q
        for i in range(4):
            den *= 1 - l[i]
            l[i] *= q
        if den == 0:
            raise SeriesPoleError("series pole")
        term = term * num / den * z_arg
    return total


def sears_pair(k: int, a, b, c, d, e, f, base: QBase) -> tuple[mpq, mpq]:
    """Both sides of the iterated Sears transformation, evaluated exactly.

    Requires the balance abc = def*q^(k-1).  The left side is
    (d,e,f;q)_k * 4phi3(q^{-k},a,b,c; d,e,f | q,q); the right side is
    c^k (b, a q^{1-k}/e, e/c;q)_k * 4phi3(q^{-k}, q^{1-k}/e, d/b, f/b;
    q^{1-k}/b, a q^{1-k}/e, c q^{1-k}/e | q,q).
    """
    a, b, c, d, e, f = (mpq(x) for x in (a, b, c, d, e, f))
    q = base.q
    if a * b * c != d * e * f * q ** (k - 1):
        raise UnbalancedParametersError("unbalanced parameters")
    qk = q**-k
    q1k = q ** (1 - k)
    lhs_spec = Phi43Spec(k, (qk, a, b, c), (d, e, f), base)
    lhs = q_pochhammer_multi((d, e, f), k, base) * phi43(lhs_spec, q, base)
    rhs_spec = Phi43Spec(
        k,
        (qk, q1k / e, d / b, f / b),
        (q1k / b, a * q1k / e, c * q1k / e),
        base,
    )
    rhs = (
        c**k
        * q_pochhammer_multi((b, a * q1k / e, e / c), k, base)
        * phi43(rhs_spec, q, base)
    )
    return lhs, rhs
