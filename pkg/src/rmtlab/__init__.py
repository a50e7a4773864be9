"""Monte Carlo lab for eigenvector statistics of power-law banded and ultrametric random matrices."""

__version__ = "0.1.0"

from .distributions import (  # noqa: F401
    Chi2Params,
    GhdParams,
    chi2_pdf,
    constrain_unit_variance,
    ghd_moment,
    ghd_pdf,
    ghd_psi_squared_pdf,
    gig_pdf,
    goe_local_variance_pdf,
    mixture_pdf,
    ptd_pdf,
    ptd_pdf_squared,
)
from .eigensolve import EigenDecomposition, EigensolveError, eigh  # noqa: F401
from .ensembles import (  # noqa: F401
    EnsembleSpec,
    MatrixKind,
    PlbmProfile,
    Regime,
    RegimeReport,
    SymmetricMatrix,
    localization_diagnostics,
    sample_matrix,
    trace_moment,
    ultrametric_distance,
    variance_profile_plbm,
    variance_profile_plbm_alt,
    variance_profile_umm,
)
from .experiments import (  # noqa: F401
    MIDDLE_HALF,
    ComponentSampleSet,
    SpectralWindow,
    VarianceSampleSet,
    WindowMode,
    collect_components,
    collect_local_variance,
    collect_local_variance_multi,
    fractal_prefactor,
    n_independence_scan,
)
from .fitting import (  # noqa: F401
    FitResult,
    Histogram,
    build_histogram,
    fit_chi2_to_ghd,
    fit_ghd,
    histogram_sup_distance,
    minimize,
    sup_distance_to_pdf,
)
from .special_functions import LogScaledValue, bessel_k, bessel_k_log, log_bessel_k, log_gamma  # noqa: F401
