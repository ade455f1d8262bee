#pragma once

#include <span>

#include "robest/types.hpp"

namespace robest {

struct LogNormResult {
    double mu             = 0.0;  ///< λ_max((A+Aᵀ)/2), units 1/time
    bool   is_contractive = false;
};

struct LyapunovSolution {
    Matrix P;
    double residual = 0.0;  ///< ‖ĀᵀP + PĀ + Q‖_F
};

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending, columns of
/// `vectors` are the matching orthonormal eigenvectors.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};

/// Cyclic Jacobi eigensolver. The input is symmetrized as (S+Sᵀ)/2.
SymmetricEigen sym_eig(const Matrix& S);
double         sym_eig_max(const Matrix& S);
double         sym_eig_min(const Matrix& S);

/// Induced 2-norm, √λ_max(MᵀM).
double norm2(const Matrix& M);

LogNormResult log_norm(const Matrix& A);

/// Largest real part over the spectrum of A.
double spectral_abscissa(const Matrix& A);

/// e^A by scaling and squaring with the degree-13 Padé approximant.
Matrix expm(const Matrix& A);

/// ∂e^{At}/∂θ = ∫₀ᵗ e^{(t−τ)A} E e^{τA} dτ, where E = ∂A/∂θ.
///
/// Computed as the upper-right block of exp(t·[[A, E], [0, A]]).
Matrix expm_param_derivative(const Matrix& A, const Matrix& E, double t);

/// Solves ĀᵀP + PĀ = −Q for Hurwitz Ā by Kronecker vectorization.
LyapunovSolution lyap_observability(const Matrix& Abar, const Matrix& Q);

/// Q̄ₒ(N) = ∫₀ᴺ e^{Āᵀs} C̄ᵀC̄ e^{Ās} ds by composite Simpson with step halving.
Matrix gramian_finite(const Matrix& Abar, const Matrix& Cbar, double horizon);

/// Symmetric square root S^{1/2} of a symmetric PSD matrix.
Matrix sqrtm_psd(const Matrix& S);

/// Composite Simpson rule over equally spaced samples (3/8 rule closes an odd
/// interval count). Needs at least two samples; two samples fall back to the
/// trapezoid rule.
double simpson(std::span<const double> samples, double step);

}  // namespace robest
