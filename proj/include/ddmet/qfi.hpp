#pragma once

// Quantum Fisher information for single-parameter families.

#include "ddmet/opalg.hpp"

#include <functional>
#include <optional>

namespace ddmet::qfi {

enum class DerivativeMode {
    /// rho depends on omega only through exp(-i omega t G) rho0 exp(i omega t G).
    AnalyticPhase,
    /// Central difference of rho_at.
    FiniteDifference,
    /// rho = U sigma U^dagger with U = exp(-i omega t G): the phase part is
    /// differentiated exactly, sigma(omega) by central differences.
    PhaseAndFiniteDifference,
};

/// A density-matrix family rho(omega) evaluated around `omega`.
struct ParamState {
    std::function<ComplexMatrix(double)> rho_at;
    double omega = 0.0;
    DerivativeMode mode = DerivativeMode::FiniteDifference;
    /// Defaults to 1e-5 * max(1, |omega|).
    std::optional<double> fd_step;
    /// Required for AnalyticPhase and PhaseAndFiniteDifference: G in
    /// d(rho)/d(omega) = -i t [G, rho] (+ U d(sigma)/d(omega) U^dagger).
    std::optional<ComplexMatrix> phase_generator;

    double step() const;
};

struct QfiResult {
    double value = 0.0;
    /// Sum of |<k|d rho|l>|^2 over eigenpairs skipped by the lambda_k + lambda_l cutoff.
    double dropped_weight = 0.0;
};

inline constexpr double kEigenPairCutoff = 1e-10;

/// 4(<dpsi|dpsi> - |<psi|dpsi>|^2), clamped at zero.
double qfi_pure(std::span<const Complex> psi, std::span<const Complex> dpsi);

/// 4 t^2 Var[G] in psi0.
double qfi_variance(const ComplexMatrix& g, std::span<const Complex> psi0, double t);

/// Spectral QFI of a (rho, d rho) pair:
///   F = sum_{k,l: lambda_k + lambda_l > eps} 2 |<k|d rho|l>|^2 / (lambda_k + lambda_l).
/// Summing over all pairs including k = l covers both the population and the
/// coherence contributions without differentiating eigenvalues.
QfiResult qfi_from_derivative(const ComplexMatrix& rho, const ComplexMatrix& drho);

/// d rho / d omega for the family, per its derivative mode.
ComplexMatrix derivative(const ParamState& state, double t);

QfiResult qfi_mixed(const ParamState& state, double t);

struct SldResult {
    ComplexMatrix l;
    /// Set when rho has eigenvalues below the cutoff; the kernel-kernel block of L is zero.
    bool rank_deficient = false;
};

/// Solves 2 d rho = L rho + rho L in the eigenbasis of rho.
SldResult sld(const ComplexMatrix& rho, const ComplexMatrix& drho);

/// Throws InvalidDensityMatrix unless rho is Hermitian, unit trace and PSD within 1e-10.
void require_density_matrix(const ComplexMatrix& rho);

} // namespace ddmet::qfi
