"""Exact multivariate Laurent polynomials over the rationals.

Coefficients are gmpy2.mpq rationals throughout; nothing in this module
touches floating point.  Terms are stored sparsely as a dict mapping
exponent tuples (in Z^dim) to nonzero coefficients.  The canonical term
order is graded lexicographic: sort by total degree of the exponent
vector, then lexicographically.

Polynomials invariant under every inversion z_j -> 1/z_j form the
subring of ordinary polynomials in the "cosine" variables
x_j = (z_j + 1/z_j)/2; `XPoly` carries that basis and
`LaurentPoly.to_x_poly` converts by leading-term elimination.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

__all__ = [
    "LaurentPoly",
    "XPoly",
    "DimensionMismatchError",
    "InexactDivisionError",
    "NotXPolynomialError",
    "grlex_key",
]

Exponent = tuple[int, ...]


class DimensionMismatchError(ValueError):
    """Operands live in Laurent rings of different dimension."""


class InexactDivisionError(ArithmeticError):
    """The divisor does not divide the dividend in the Laurent ring."""


class NotXPolynomialError(ValueError):
    """Input is not inversion-invariant, hence not in the x-polynomial ring."""


def grlex_key(exps: Exponent) -> tuple:
    """Graded-lex sort key: total degree first, then lexicographic."""
    return (sum(exps), exps)


def _as_mpq(c) -> mpq:
    return c if isinstance(c, type(mpq(0))) else mpq(c)


class LaurentPoly:
    """Sparse Laurent polynomial in `dim` variables with mpq coefficients."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, mpq] | None = None):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.terms: dict[Exponent, mpq] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != dim:
                    raise DimensionMismatchError(
                        f"exponent {e} does not have dim {dim}"
                    )
                c = _as_mpq(c)
                if c != 0:
                    self.terms[tuple(e)] = c

    # ---------------------------------------------------------------- basics

    @classmethod
    def constant(cls, dim: int, c) -> "LaurentPoly":
        c = _as_mpq(c)
        if c == 0:
            return cls(dim)
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def zero(cls, dim: int) -> "LaurentPoly":
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> "LaurentPoly":
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim: int, j: int, power: int = 1) -> "LaurentPoly":
        """The monomial z_j**power; j is 1-based."""
        if not 1 <= j <= dim:
            raise IndexError(f"variable index {j} out of range 1..{dim}")
        e = [0] * dim
        e[j - 1] = power
        return cls(dim, {tuple(e): mpq(1)})

    @classmethod
    def monomial(cls, dim: int, exps: Sequence[int], c=1) -> "LaurentPoly":
        return cls(dim, {tuple(exps): _as_mpq(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.dim in self.terms)

    def constant_value(self) -> mpq:
        if not self.terms:
            return mpq(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[(0,) * self.dim]

    def copy(self) -> "LaurentPoly":
        p = LaurentPoly(self.dim)
        p.terms = dict(self.terms)
        return p

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.dim == other.dim and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[tuple[Exponent, mpq]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "LaurentPoly(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"z{i + 1}^{k}" for i, k in enumerate(e) if k != 0
            )
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "LaurentPoly(" + " + ".join(bits) + ")"

    # ------------------------------------------------------------ arithmetic

    def _check_dim(self, other: "LaurentPoly") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )

    def __add__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        p = LaurentPoly(self.dim)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        p = LaurentPoly(self.dim)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            c = _as_mpq(other)
            p = LaurentPoly(self.dim)
            if c != 0:
                p.terms = {e: v * c for e, v in self.terms.items()}
            return p
        self._check_dim(other)
        # iterate over the smaller operand on the outside
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Exponent, mpq] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(map(sum, zip(e1, e2)))
                v = out.get(e)
                if v is None:
                    out[e] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v == 0:
                        del out[e]
                    else:
                        out[e] = v
        p = LaurentPoly(self.dim)
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers only for monomials; use inverted exponents")
        result = LaurentPoly.one(self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # ------------------------------------------------------------- structure

    def involution(self, j: int) -> "LaurentPoly":
        """Apply z_j -> 1/z_j (j is 1-based)."""
        if not 1 <= j <= self.dim:
            raise IndexError(f"involution index {j} out of range 1..{self.dim}")
        i = j - 1
        out: dict[Exponent, mpq] = {}
        for e, c in self.terms.items():
            f = list(e)
            f[i] = -f[i]
            out[tuple(f)] = c
        p = LaurentPoly(self.dim)
        p.terms = out
        return p

    def is_inversion_invariant(self) -> bool:
        """True iff the polynomial is fixed by every z_j -> 1/z_j."""
        for e, c in self.terms.items():
            for i in range(self.dim):
                if e[i] != 0:
                    f = list(e)
                    f[i] = -f[i]
                    if self.terms.get(tuple(f)) != c:
                        return False
        return True

    def evaluate(self, zs: Sequence) -> mpq:
        """Exact value at a point with nonzero rational coordinates."""
        if len(zs) != self.dim:
            raise DimensionMismatchError("point has wrong dimension")
        vals = [_as_mpq(z) for z in zs]
        for v in vals:
            if v == 0:
                raise ZeroDivisionError("evaluation point has a zero coordinate")
        # per-variable power cache: exponent -> power
        caches: list[dict[int, mpq]] = [dict() for _ in range(self.dim)]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    cache = caches[i]
                    pw = cache.get(k)
                    if pw is None:
                        pw = vals[i] ** k
                        cache[k] = pw
                    t = t * pw
            total += t
        return total

    def q_shift(self, q, nu: Sequence[int]) -> "LaurentPoly":
        """Substitute z_j -> z_j * q**nu_j for every j."""
        q = _as_mpq(q)
        out: dict[Exponent, mpq] = {}
        for e, c in self.terms.items():
            k = sum(ei * ni for ei, ni in zip(e, nu))
            out[e] = c * q**k if k else c
        p = LaurentPoly(self.dim)
        p.terms = out
        return p

    def monomial_map(
        self, dim_out: int, images: Sequence[tuple[mpq, Exponent]]
    ) -> "LaurentPoly":
        """Substitute each variable z_i by a unit c_i * w^{v_i}.

        `images[i] = (c_i, v_i)` with c_i a nonzero rational and v_i an
        exponent vector in the target ring.  Monomials map to monomials,
        so the term count never grows.
        """
        if len(images) != self.dim:
            raise DimensionMismatchError("need one image per variable")
        out: dict[Exponent, mpq] = {}
        for e, c in self.terms.items():
            acc = c
            vec = [0] * dim_out
            for i, k in enumerate(e):
                if k:
                    ci, vi = images[i]
                    acc = acc * ci**k
                    for t in range(dim_out):
                        vec[t] += k * vi[t]
            key = tuple(vec)
            v = out.get(key)
            if v is None:
                out[key] = acc
            else:
                v = v + acc
                if v == 0:
                    del out[key]
                else:
                    out[key] = v
        p = LaurentPoly(dim_out)
        p.terms = out
        return p

    # degree data -----------------------------------------------------------

    def total_degree_max(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(e) for e in self.terms)

    def total_degree_min(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return min(sum(e) for e in self.terms)

    def coordinate_range(self, i: int) -> tuple[int, int]:
        lo = min(e[i] for e in self.terms)
        hi = max(e[i] for e in self.terms)
        return lo, hi

    def leading_term(self) -> tuple[Exponent, mpq]:
        """Graded-lex maximal term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    # ------------------------------------------------------------- division

    def exact_divide(self, den: "LaurentPoly") -> "LaurentPoly":
        """Quotient self/den when the division is exact in the Laurent ring.

        Raises InexactDivisionError otherwise.  Uses graded-lex leading
        term elimination; for an exact division the quotient exponents
        stay inside a box computed from the per-coordinate extreme
        exponents of numerator and divisor, which also bounds the number
        of elimination steps.
        """
        self._check_dim(den)
        if den.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly(self.dim)
        box = []
        for i in range(self.dim):
            nlo, nhi = self.coordinate_range(i)
            dlo, dhi = den.coordinate_range(i)
            box.append((nlo - dlo, nhi - dhi))
        de, dc = den.leading_term()
        rem = self.copy()
        quo: dict[Exponent, mpq] = {}
        while rem.terms:
            re, rc = rem.leading_term()
            t = tuple(a - b for a, b in zip(re, de))
            for k, (lo, hi) in zip(t, box):
                if k < lo or k > hi:
                    raise InexactDivisionError("inexact division")
            coef = rc / dc
            quo[t] = coef
            piece = LaurentPoly(self.dim)
            piece.terms = {
                tuple(a + b for a, b in zip(t, e2)): coef * c2
                for e2, c2 in den.terms.items()
            }
            rem = rem - piece
        p = LaurentPoly(self.dim)
        p.terms = quo
        return p

    # -------------------------------------------------------- x-basis bridge

    def to_x_poly(self) -> "XPoly":
        """Convert an inversion-invariant polynomial to the x-monomial basis."""
        if not self.is_inversion_invariant():
            raise NotXPolynomialError("not in P_x")
        rem = self.copy()
        terms: dict[Exponent, mpq] = {}
        dim = self.dim
        while rem.terms:
            e, c = rem.leading_term()
            if any(k < 0 for k in e):
                # cannot happen for invariant input; indicates a bug upstream
                raise NotXPolynomialError("not in P_x")
            coef = c * mpq(2) ** sum(e)
            terms[e] = coef
            rem = rem - _x_monomial_embedding(dim, e) * coef
        return XPoly(dim, terms)


@lru_cache(maxsize=4096)
def _x_monomial_embedding(dim: int, exps: Exponent) -> LaurentPoly:
    """Embedding of prod_j x_j^{e_j} with x_j = (z_j + 1/z_j)/2."""
    out = LaurentPoly.one(dim)
    half = mpq(1, 2)
    for j, k in enumerate(exps, start=1):
        if k:
            xj = (LaurentPoly.variable(dim, j) + LaurentPoly.variable(dim, j, -1)) * half
            out = out * xj**k
    return out


class XPoly:
    """Polynomial in x_1..x_dim (nonnegative exponents, mpq coefficients)."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, mpq] | None = None):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.terms: dict[Exponent, mpq] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != dim:
                    raise DimensionMismatchError("exponent dimension mismatch")
                if any(k < 0 for k in e):
                    raise ValueError("XPoly exponents must be nonnegative")
                c = _as_mpq(c)
                if c != 0:
                    self.terms[tuple(e)] = c

    @classmethod
    def constant(cls, dim: int, c) -> "XPoly":
        c = _as_mpq(c)
        return cls(dim, {(0,) * dim: c} if c != 0 else None)

    @classmethod
    def monomial(cls, dim: int, exps: Sequence[int], c=1) -> "XPoly":
        return cls(dim, {tuple(exps): _as_mpq(c)})

    @classmethod
    def variable(cls, dim: int, j: int) -> "XPoly":
        e = [0] * dim
        e[j - 1] = 1
        return cls(dim, {tuple(e): mpq(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(e) for e in self.terms)

    def embed(self) -> LaurentPoly:
        """The Laurent polynomial obtained via x_j = (z_j + 1/z_j)/2."""
        out = LaurentPoly.zero(self.dim)
        for e, c in self.terms.items():
            out = out + _x_monomial_embedding(self.dim, e) * c
        return out

    def evaluate(self, xs: Sequence) -> mpq:
        vals = [_as_mpq(x) for x in xs]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    t = t * vals[i] ** k
            total += t
        return total

    def evaluate_float(self, xs: Sequence[float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            t = float(c)
            for i, k in enumerate(e):
                if k:
                    t *= xs[i] ** k
            total += t
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, XPoly):
            return self.dim == other.dim and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __add__(self, other) -> "XPoly":
        if not isinstance(other, XPoly):
            other = XPoly.constant(self.dim, other)
        if self.dim != other.dim:
            raise DimensionMismatchError("dimension mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        p = XPoly(self.dim)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "XPoly":
        p = XPoly(self.dim)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "XPoly":
        if not isinstance(other, XPoly):
            other = XPoly.constant(self.dim, other)
        return self + (-other)

    def __mul__(self, other) -> "XPoly":
        if not isinstance(other, XPoly):
            c = _as_mpq(other)
            p = XPoly(self.dim)
            if c != 0:
                p.terms = {e: v * c for e, v in self.terms.items()}
            return p
        if self.dim != other.dim:
            raise DimensionMismatchError("dimension mismatch")
        out: dict[Exponent, mpq] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(sum, zip(e1, e2)))
                v = out.get(e)
                if v is None:
                    out[e] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v == 0:
                        del out[e]
                    else:
                        out[e] = v
        p = XPoly(self.dim)
        p.terms = out
        return p

    __rmul__ = __mul__

    def sorted_terms(self) -> list[tuple[Exponent, mpq]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "XPoly(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}^{k}" for i, k in enumerate(e) if k != 0)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "XPoly(" + " + ".join(bits) + ")"


# ------------------------------------------------------------- serialization


def poly_to_json(p: LaurentPoly | XPoly) -> list[dict]:
    """Canonical JSON form: graded-lex sorted list of terms."""
    return [
        {
            "exponents": list(e),
            "num": str(c.numerator),
            "den": str(c.denominator),
        }
        for e, c in p.sorted_terms()
    ]


def poly_from_json(dim: int, data: Iterable[dict], kind: str = "laurent"):
    terms = {
        tuple(item["exponents"]): mpq(int(item["num"]), int(item["den"]))
        for item in data
    }
    if kind == "laurent":
        return LaurentPoly(dim, terms)
    if kind == "x":
        return XPoly(dim, terms)
    raise ValueError(f"unknown polynomial kind {kind!r}")
