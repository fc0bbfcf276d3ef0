"""Differentially private, outlier-robust PCA via generalized Kendall's tau.

The core pipeline estimates the generalized Kendall's tau scatter matrix
with a bounded spatial-sign transform, privatizes it with a calibrated
Gaussian mechanism, and reads principal directions off the noisy matrix.
Boundedness of the transform gives both robustness to heavy tails and
contamination and a small, data-independent sensitivity, so the privacy
noise does not grow with the scale of the data.
"""

from .competitors import (
    NsggdConfig,
    SgpcaConfig,
    analyze_gauss,
    nsggd,
    nsggd_defaults,
    sgpca,
    sgpca_sensitivity,
)
from .kendall import kendall_paired, kendall_u, sensitivity_bound
from .linalg import (
    EigenPairs,
    eigh,
    proj_frob,
    sin_theta,
    stiefel_project,
    top_m,
    vecd,
    vecd_inv,
)
from .mechanism import PrivacyBudget, g_dppca, gauss_mech, sigma_for
from .rng import RngStream, stable_stream_id
from .samplers import (
    DataModel,
    SpikedModel,
    benchmark_model,
    contaminated_model,
    gaussian_model,
    sample,
    sqrt_psd,
    student_t1_model,
)
from .theory import (
    CorruptionReport,
    McEstimate,
    SandwichCheck,
    SensitivityReport,
    SpectrumAgreement,
    ag_sensitivity_search,
    breakdown_bound,
    corruption_deviation_check,
    kendall_sensitivity_search,
    phi_sph,
    phi_wins,
    sph_spectrum_agreement,
    winsorized_sandwich,
)
from .transforms import Transform, spherical, winsorized

__version__ = "0.1.0"


def active_backend():
    """Name of the descent-kernel backend in use: 'compiled' or 'numpy'."""
    from ._backend import kernels

    return kernels.BACKEND

__all__ = [
    "CorruptionReport",
    "DataModel",
    "EigenPairs",
    "McEstimate",
    "NsggdConfig",
    "PrivacyBudget",
    "RngStream",
    "SandwichCheck",
    "SensitivityReport",
    "SgpcaConfig",
    "SpectrumAgreement",
    "SpikedModel",
    "Transform",
    "active_backend",
    "ag_sensitivity_search",
    "analyze_gauss",
    "benchmark_model",
    "breakdown_bound",
    "contaminated_model",
    "corruption_deviation_check",
    "eigh",
    "g_dppca",
    "gauss_mech",
    "gaussian_model",
    "kendall_paired",
    "kendall_sensitivity_search",
    "kendall_u",
    "nsggd",
    "nsggd_defaults",
    "phi_sph",
    "phi_wins",
    "proj_frob",
    "sample",
    "sensitivity_bound",
    "sgpca",
    "sgpca_sensitivity",
    "sigma_for",
    "sin_theta",
    "sph_spectrum_agreement",
    "spherical",
    "sqrt_psd",
    "stable_stream_id",
    "stiefel_project",
    "student_t1_model",
    "top_m",
    "vecd",
    "vecd_inv",
    "winsorized",
    "winsorized_sandwich",
]
