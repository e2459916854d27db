"""Phase/gain robust-stability certification for structured perturbations
of MIMO LTI feedback interconnections."""

__version__ = "0.1.0"

from .blocks import BlockDims, hermitian_basis, is_member_B, is_member_D
from .certify import (CertificationReport, FrequencyRecord, IqcCertificate,
                      Margins, analyze_frequency, build_iqc_certificate,
                      certify, default_grid, scattering)
from .errors import PhasecertError
from .indices import (MuResult, PsiLowerResult, PsiStage, PsiUpperResult,
                      eig_derivative, mu_upper, psi_lower, psi_upper,
                      relative_passivity, spectral_phase_bound)
from .linalg import (GeneralEigen, HermitianEigen, eig_general, eig_hermitian,
                     gevp_hermitian_definite, hermitian_parts, spectral_norm)
from .lmi import (BisectionResult, FeasibilityResult, LinearMatrixPencil,
                  feasibility, gevp_bisection)
from .lti import (StateSpace, closed_loop_poles, delta_family, freq_response,
                  is_hurwitz, rotating_body_T, series, static_gain)
from .phases import (PhaseSpectrum, Sectoriality, classify_sectoriality,
                     eig_phase_bound_holds, matrix_phases, phase_bound_lmi_check,
                     phase_index, support_min)

__all__ = [
    "BlockDims", "hermitian_basis", "is_member_B", "is_member_D",
    "CertificationReport", "FrequencyRecord", "IqcCertificate", "Margins",
    "analyze_frequency", "build_iqc_certificate", "certify", "default_grid",
    "scattering", "PhasecertError",
    "MuResult", "PsiLowerResult", "PsiStage", "PsiUpperResult",
    "eig_derivative", "mu_upper", "psi_lower", "psi_upper",
    "relative_passivity", "spectral_phase_bound",
    "GeneralEigen", "HermitianEigen", "eig_general", "eig_hermitian",
    "gevp_hermitian_definite", "hermitian_parts", "spectral_norm",
    "BisectionResult", "FeasibilityResult", "LinearMatrixPencil",
    "feasibility", "gevp_bisection",
    "StateSpace", "closed_loop_poles", "delta_family", "freq_response",
    "is_hurwitz", "rotating_body_T", "series", "static_gain",
    "PhaseSpectrum", "Sectoriality", "classify_sectoriality",
    "eig_phase_bound_holds", "matrix_phases", "phase_bound_lmi_check",
    "phase_index", "support_min",
]
