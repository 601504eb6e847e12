"""Multivariable Askey-Wilson polynomials, the two commuting algebras of
bispectral difference operators attached to them, and a verification
harness checking every identity exactly or by torus quadrature."""

from .awcore import (
    QParams,
    RacahPoint,
    aw_norm_1d,
    aw_poly_1d,
    mv_norm,
    mv_poly,
    mv_poly_symbolic,
    mv_weight,
    normalize_phat,
    qracah_poly_1d,
    qracah_poly_mv,
    qracah_weight,
)
from .duality import (
    DualityPoint,
    LatticeOperator,
    apply_n_operator,
    b_map,
    bispectral_check,
    dual_map,
    dual_parameters,
    duality_identity_check,
    n_eigenvalue,
    n_operator_family,
)
from .laurent import LaurentPoly, XPoly
from .qdiff import (
    CoeffFn,
    QDiffOperator,
    coeff_A,
    coeff_C,
    delta_form_operator,
    shift_form_operator,
    triangularity_report,
    z_eigenvalue,
    z_operator_family,
)
from .qseries import Phi43Spec, QBase, phi43, q_pochhammer, q_pochhammer_inf, sears_pair
from .report import CheckReport
from .verify import SuiteConfig, default_params, racah_params, run_suite

__version__ = "0.1.0"
