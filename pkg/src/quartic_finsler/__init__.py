"""Finsler structures generated by Riemann quartics."""
from .classify import (
    ClassificationMap,
    MetricState,
    ParameterMap,
    SetLabel,
    classify_direction,
    classify_sphere,
    indicatrix,
    parameter_map,
    scan_circle,
    signature_change_threshold,
)
from .kernels import BACKEND
from .lagrangian import (
    DEFAULT_TOL,
    Branch,
    LagrangianSpec,
    SignClass,
    axiom_audit,
    finsler_function,
    lagrangian_value,
    sign_class,
)
from .metric import (
    CartanSample,
    MetricSample,
    UndefinedMetricError,
    cartan_at,
    determinant_closed_form,
    fd_oracle,
    metric_at,
    norm_wrt,
)
from .premetric import (
    BlockView,
    ConstitutiveTensor,
    FresnelTensor,
    assemble_chi,
    fresnel_tensor,
    isotropic_chi,
    split_chi,
    uniaxial_chi,
    vacuum_chi,
)
from .quartic import (
    SymQuadric,
    SymQuartic,
    aux,
    eval_quartic,
    from_diagonal_powers,
    from_quadric_product,
    from_quadric_square,
    load_quartic,
    save_quartic,
    symmetrize4,
)

__version__ = "0.1.0"
