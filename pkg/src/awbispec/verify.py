"""Suite orchestration: every identity in the construction checked
exactly (rational arithmetic at rational points) or numerically (torus
quadrature), with seeded randomness and machine-readable reports.

Exact identity checks follow the polynomial-identity-testing pattern:
evaluate both sides at seeded random rational points off the pole set
and demand equality, rejecting (and logging) sampled points that hit a
pole.  Numeric checks compare quadrature values against closed forms at
fixed absolute tolerances.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from .awcore import (
    QParams,
    chain_constraints_hold,
    mv_poly_regular,
    qracah_poly_mv,
    qracah_weight,
    racah_lattice,
)
from .duality import (
    bispectral_check,
    duality_identity_check,
    n_operator_family,
)
from .laurent import XPoly
from .qdiff import (
    QDiffOperator,
    commutator_values_at,
    delta_form_operator,
    shift_form_operator,
    triangularity_report,
    z_eigenvalue,
    z_operator_family,
)
from .qseries import QBase, SeriesPoleError, sears_pair
from .quadrature import (
    QuadratureGrid,
    default_grid_size,
    orthogonality_check,
    self_adjointness_check,
    weight_values,
)
from .report import CheckReport

__all__ = [
    "SuiteConfig",
    "UnknownCheckError",
    "CHECK_NAMES",
    "DEFAULT_SEED",
    "default_params",
    "racah_params",
    "random_rational",
    "sample_operator_points",
    "eigen_check_z",
    "qracah_orthogonality_exact",
    "run_suite",
]

log = logging.getLogger(__name__)

DEFAULT_SEED = 987654321

_DEFAULT_S = mpq(1, 2)  # q = 1/4
_DEFAULT_ALPHA_POOL = (mpq(2), mpq(1, 2), mpq(1, 4), mpq(1, 8), mpq(1, 16))


class UnknownCheckError(ValueError):
    pass


def default_params(d: int, real_mode: bool = True) -> QParams:
    """The shipped orthogonality-valid parameter set at dimension d;
    validity is asserted, not assumed."""
    if not 1 <= d <= 3:
        raise ValueError("shipped defaults cover d in {1,2,3}")
    alphas = _DEFAULT_ALPHA_POOL[: d + 2] + (mpq(1),)
    params = QParams(d, QBase(_DEFAULT_S, real_mode=real_mode), alphas)
    if not chain_constraints_hold(params):
        raise AssertionError("shipped default parameters fail the chain constraints")
    return params


def racah_params(d: int, N: int) -> QParams:
    """Lattice parameter set with alpha_{d+2}/alpha_{d+1} = q^N and all
    Pochhammer bases inside (0,1), which keeps the lattice weight
    positive."""
    base = QBase(_DEFAULT_S)
    pool = (mpq(3, 2), mpq(1, 2), mpq(1, 4), mpq(1, 8), mpq(1, 16))
    alphas = pool[: d + 2]
    return QParams(d, base, alphas + (alphas[-1] * base.q**N,))


# ------------------------------------------------------------------ sampling


def random_rational(rng: random.Random, bound: int = 1000, positive: bool = False) -> mpq:
    num = rng.randint(1, bound)
    den = rng.randint(1, bound)
    if not positive and rng.random() < 0.5:
        num = -num
    return mpq(num, den)


def _near_pole(z: Sequence[mpq], q: mpq) -> bool:
    """Reject points with z_j^2 on the small q-power ladder, where every
    coefficient denominator lives."""
    ladder = {q**m for m in range(-6, 7)}
    return any(zj * zj in ladder for zj in z)


def sample_operator_points(
    ops: Sequence[QDiffOperator],
    d: int,
    rng: random.Random,
    count: int,
    q: mpq,
    shifted_by: Iterable[Sequence[int]] = (),
) -> list[tuple[mpq, ...]]:
    """Seeded random rational points with every operator coefficient
    (optionally also at shifted images of the point) off its pole set.
    Rejections are logged."""
    pts: list[tuple[mpq, ...]] = []
    rejected = 0
    shifts = [tuple(s) for s in shifted_by] or [(0,) * d]
    while len(pts) < count:
        z = tuple(random_rational(rng) for _ in range(d))
        if _near_pole(z, q):
            rejected += 1
            continue
        try:
            for shift in shifts:
                zz = tuple(zi * q**si for zi, si in zip(z, shift))
                for op in ops:
                    for nu in op.support:
                        op.coeff_value(nu, zz)
        except ZeroDivisionError:
            rejected += 1
            continue
        pts.append(z)
    if rejected:
        log.debug("rejected %d candidate points near poles", rejected)
    return pts


def _check_rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


# ----------------------------------------------------------- check operations


def eigen_check_z(
    params: QParams,
    n: Sequence[int],
    z_points: Sequence[Sequence],
    j: int,
    family: Sequence[QDiffOperator] | None = None,
    eigenvalue=None,
) -> CheckReport:
    """Exact spectral check at every supplied point: the j-th commuting
    operator applied to the polynomial equals the eigenvalue times the
    polynomial.  `eigenvalue` overrides the closed form (testing hook
    for mutation checks)."""
    ops = family if family is not None else z_operator_family(params)
    op = ops[j - 1]
    mu = z_eigenvalue(params, n, j) if eigenvalue is None else mpq(eigenvalue)
    failures = 0
    for z in z_points:
        lhs = op.apply_at_point(lambda zz: mv_poly_regular(params, n, zz), z)
        if lhs != mu * mv_poly_regular(params, n, z):
            failures += 1
    return CheckReport.exact(
        "eigen-z",
        {"d": params.d, "n": list(n), "j": j, "points": len(z_points)},
        failures,
        0,
    )


def qracah_orthogonality_exact(
    params: QParams, n: Sequence[int], m: Sequence[int], N: int
) -> CheckReport:
    """Exact lattice sum of weight times two polynomial values: zero iff
    the indices differ."""
    from .awcore import racah_level

    if racah_level(params) != N:
        raise ValueError("alpha_{d+2}/alpha_{d+1} != q^N")
    n = tuple(n)
    m = tuple(m)
    total = mpq(0)
    for y in racah_lattice(params.d, N):
        total += (
            qracah_weight(params, y)
            * qracah_poly_mv(params, n, y)
            * qracah_poly_mv(params, m, y)
        )
    if n == m:
        observed = "nonzero" if total != 0 else "zero"
        expected = "nonzero"
    else:
        observed = str(total)
        expected = "0"
    return CheckReport.exact(
        "qracah-exact", {"d": params.d, "N": N, "n": list(n), "m": list(m)}, observed, expected
    )


# --------------------------------------------------------------- exact checks


def _check_sears(cfg: "SuiteConfig") -> list[CheckReport]:
    base = QBase(_DEFAULT_S)
    rng = _check_rng(cfg.seed, "sears")
    q = base.q
    failures = 0
    done = 0
    while done < cfg.sears_trials:
        k = rng.randint(0, 6)
        a, b, d0, e, f = (random_rational(rng, 50) for _ in range(5))
        try:
            c = d0 * e * f * q ** (k - 1) / (a * b)
            lhs, rhs = sears_pair(k, a, b, c, d0, e, f, base)
        except (SeriesPoleError, ZeroDivisionError, ValueError):
            continue
        if lhs != rhs:
            failures += 1
        done += 1
    return [
        CheckReport.exact(
            "sears", {"trials": cfg.sears_trials, "kmax": 6, "seed": cfg.seed}, failures, 0
        )
    ]


def _check_triangularity(cfg: "SuiteConfig") -> list[CheckReport]:
    out = []
    for d in range(1, cfg.d + 1):
        max_deg = 4 if d <= 2 else 3
        rep = triangularity_report(default_params(d), max_deg)
        failures = sum(1 for r in rep if not r["pass"])
        out.append(
            CheckReport.exact(
                "triangularity",
                {"d": d, "max_degree": max_deg, "monomials": len(rep)},
                failures,
                0,
            )
        )
    return out


def _check_form_equivalence(cfg: "SuiteConfig") -> list[CheckReport]:
    rng = _check_rng(cfg.seed, "form-equivalence")
    out = []
    for d in range(1, cfg.d + 1):
        params = default_params(d)
        delta = delta_form_operator(params)
        shift = shift_form_operator(params)
        pts = sample_operator_points([delta, shift], d, rng, cfg.pit_points, params.q)
        mismatches = 0
        support = set(delta.support) | set(shift.support)
        for z in pts:
            for nu in support:
                if delta.coeff_value(nu, z) != shift.coeff_value(nu, z):
                    mismatches += 1
        out.append(
            CheckReport.exact(
                "form-equivalence",
                {"d": d, "points": len(pts), "seed": cfg.seed},
                mismatches,
                0,
            )
        )
    return out


def _check_commutativity(cfg: "SuiteConfig") -> list[CheckReport]:
    rng = _check_rng(cfg.seed, "commutativity")
    out = []
    for d in range(2, cfg.d + 1):
        params = default_params(d)
        family = z_operator_family(params)
        nonzero = 0
        for i in range(d):
            for j in range(i + 1, d):
                a, b = family[i], family[j]
                pts = sample_operator_points([a, b], d, rng, cfg.pit_points, params.q)
                for z in pts:
                    vals = commutator_values_at(a, b, z)
                    nonzero += sum(1 for v in vals.values() if v != 0)
        out.append(
            CheckReport.exact(
                "commutativity",
                {"d": d, "points": cfg.pit_points, "mode": "coefficients"},
                nonzero,
                0,
            )
        )
    if cfg.d >= 2:
        params = default_params(2)
        a, b = z_operator_family(params)
        bad = 0
        count = 0
        for total in range(6):
            for n1 in range(total + 1):
                mono = XPoly.monomial(2, (n1, total - n1))
                r = a.apply(b.apply(mono)) - b.apply(a.apply(mono))
                count += 1
                if not r.is_zero():
                    bad += 1
        out.append(
            CheckReport.exact(
                "commutativity",
                {"d": 2, "monomials": count, "mode": "annihilation"},
                bad,
                0,
            )
        )
    return out


def _multi_indices(d: int, max_total: int) -> list[tuple[int, ...]]:
    """All n in N_0^d with |n| <= max_total, graded order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], slots: int) -> None:
        if slots == 0:
            out.append(tuple(prefix))
            return
        for v in range(max_total - sum(prefix) + 1):
            rec(prefix + [v], slots - 1)

    rec([], d)
    return sorted(out, key=lambda t: (sum(t), t))


def _check_eigen_z(cfg: "SuiteConfig") -> list[CheckReport]:
    rng = _check_rng(cfg.seed, "eigen-z")
    out = []
    for d in range(1, cfg.d + 1):
        params = default_params(d)
        family = z_operator_family(params)
        pts = sample_operator_points(family, d, rng, cfg.eigen_points, params.q)
        failures = 0
        cases = 0
        for n in _multi_indices(d, 3):
            for j in range(1, d + 1):
                r = eigen_check_z(params, n, pts, j, family=family)
                cases += len(pts)
                failures += int(r.observed)
        out.append(
            CheckReport.exact(
                "eigen-z", {"d": d, "points": len(pts), "cases": cases}, failures, 0
            )
        )
    return out


def _check_duality(cfg: "SuiteConfig") -> list[CheckReport]:
    out = []
    for d in range(1, min(cfg.d, 2) + 1):
        params = default_params(d)
        idx = _multi_indices(d, 2)
        failures = 0
        cases = 0
        for n in idx:
            for nt in idx:
                r = duality_identity_check(params, n, nt)
                cases += 1
                if not r["pass"]:
                    failures += 1
        out.append(
            CheckReport.exact("duality", {"d": d, "cases": cases}, failures, 0)
        )
    return out


def _check_bispectral(cfg: "SuiteConfig") -> list[CheckReport]:
    rng = _check_rng(cfg.seed, "bispectral-n")
    d = min(cfg.d, 2)
    params = default_params(d)
    ops = n_operator_family(params)
    failures = 0
    cases = 0
    pts = [tuple(random_rational(rng) for _ in range(d)) for _ in range(cfg.bispectral_points)]
    for n in _multi_indices(d, 3):
        for j in range(1, d + 1):
            for z in pts:
                r = bispectral_check(params, n, z, j, ops=ops)
                cases += 1
                if not r["pass"]:
                    failures += 1
    return [
        CheckReport.exact(
            "bispectral-n",
            {"d": d, "points": len(pts), "cases": cases},
            failures,
            0,
        )
    ]


def _check_boundary(cfg: "SuiteConfig") -> list[CheckReport]:
    d = min(cfg.d, 2)
    params = default_params(d)
    ops = n_operator_family(params)
    missing = 0
    entries = 0
    for op in ops:
        for w, factors in op.boundary:
            for k, t in enumerate(w):
                if t >= 0:
                    continue
                entries += 1
                needed = -t  # one vanishing factor per unit of backward shift
                present = sum(1 for f in factors if (0,) * k + (-1,) + (0,) * (d - k - 1) in f.terms)
                if present < needed:
                    missing += 1
    # exercise the vanish-then-drop path at every small boundary index
    violations = 0
    probes = 0

    def one(m) -> mpq:
        return mpq(1)

    for n in _multi_indices(d, 2):
        if all(t > 1 for t in n):
            continue
        for op in ops:
            probes += 1
            try:
                op.apply_at(one, n)
            except ArithmeticError:
                violations += 1
    return [
        CheckReport.exact(
            "boundary",
            {"d": d, "entries": entries, "probes": probes},
            missing + violations,
            0,
        )
    ]


# -------------------------------------------------------------- numeric checks


def _grid_for(cfg: "SuiteConfig", d: int) -> QuadratureGrid:
    m = (cfg.grid_m or {}).get(d, default_grid_size(d))
    return QuadratureGrid(d, m)


def _check_orthogonality(cfg: "SuiteConfig") -> list[CheckReport]:
    out = []
    for d in range(1, min(cfg.d, 2) + 1):
        params = default_params(d)
        grid = _grid_for(cfg, d)
        weights = weight_values(params, grid, cfg.eps)
        idx = _multi_indices(d, 2)
        polys: dict = {}
        for i, n in enumerate(idx):
            for m in idx[i:]:
                out.append(
                    orthogonality_check(
                        params, n, m, grid, cfg.eps, weights=weights, polys=polys
                    )
                )
    return out


def _check_self_adjointness(cfg: "SuiteConfig") -> list[CheckReport]:
    rng = _check_rng(cfg.seed, "self-adjointness")
    d = min(cfg.d, 2)
    params = default_params(d)
    grid = _grid_for(cfg, d)
    weights = weight_values(params, grid, cfg.eps)
    op = shift_form_operator(params)
    monos = _multi_indices(d, 2)

    def random_xpoly() -> XPoly:
        while True:
            p = XPoly(d, {m: random_rational(rng, 9) for m in monos if rng.random() < 0.7})
            if not p.is_zero():
                return p

    out = []
    for _ in range(cfg.adjoint_pairs):
        f = random_xpoly()
        g = random_xpoly()
        out.append(
            self_adjointness_check(
                params, f, g, grid, cfg.eps, weights=weights, operator=op
            )
        )
    return out


def _check_qracah(cfg: "SuiteConfig") -> list[CheckReport]:
    out = []
    for d in range(1, min(cfg.d, 2) + 1):
        for N in range(1, 5):
            params = racah_params(d, N)
            idx = [n for n in _multi_indices(d, 2) if sum(n) <= N]
            lattice = list(racah_lattice(d, N))
            weights = [qracah_weight(params, y) for y in lattice]
            values = {
                n: [qracah_poly_mv(params, n, y) for y in lattice] for n in idx
            }
            failures = 0
            cases = 0
            for i, n in enumerate(idx):
                for m in idx[i:]:
                    s = sum(
                        w * vn * vm
                        for w, vn, vm in zip(weights, values[n], values[m])
                    )
                    cases += 1
                    if n == m:
                        if s == 0:
                            failures += 1
                    elif s != 0:
                        failures += 1
            out.append(
                CheckReport.exact(
                    "qracah-exact", {"d": d, "N": N, "cases": cases}, failures, 0
                )
            )
    return out


# ----------------------------------------------------------------- the suite


CHECK_NAMES: tuple[str, ...] = (
    "sears",
    "triangularity",
    "form-equivalence",
    "commutativity",
    "eigen-z",
    "duality",
    "bispectral-n",
    "boundary",
    "orthogonality",
    "self-adjointness",
    "qracah-exact",
)

_CHECK_FNS: dict[str, Callable[["SuiteConfig"], list[CheckReport]]] = {
    "sears": _check_sears,
    "triangularity": _check_triangularity,
    "form-equivalence": _check_form_equivalence,
    "commutativity": _check_commutativity,
    "eigen-z": _check_eigen_z,
    "duality": _check_duality,
    "bispectral-n": _check_bispectral,
    "boundary": _check_boundary,
    "orthogonality": _check_orthogonality,
    "self-adjointness": _check_self_adjointness,
    "qracah-exact": _check_qracah,
}


@dataclass(frozen=True)
class SuiteConfig:
    """What to run and at which scale.  `d` caps the dimensions the
    multi-dimension checks sweep (their per-check ranges follow the
    acceptance scopes)."""

    checks: tuple[str, ...] = CHECK_NAMES
    seed: int = DEFAULT_SEED
    d: int = 2
    grid_m: dict[int, int] | None = None
    eps: float = 1e-16
    sears_trials: int = 100
    pit_points: int = 50
    eigen_points: int = 20
    bispectral_points: int = 10
    adjoint_pairs: int = 10

    def __post_init__(self):
        for name in self.checks:
            if name not in _CHECK_FNS:
                raise UnknownCheckError(f"unknown check name {name!r}")
        if not 1 <= self.d <= 3:
            raise ValueError("d must be 1, 2 or 3")


def run_suite(config: SuiteConfig) -> list[CheckReport]:
    """Run the named checks with seeded randomness; deterministic for a
    fixed seed.  Reports are merged by name, then inputs digest."""
    reports: list[CheckReport] = []
    for name in config.checks:
        reports.extend(_CHECK_FNS[name](config))
    reports.sort(key=lambda r: (r.name, r.inputs))
    return reports
