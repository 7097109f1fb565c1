#pragma once

// Checks whether a system Hamiltonian H_S and an interaction H_SE admit
// decoupled sensing: a control set whose average keeps H_S nontrivial while
// reducing H_SE to c 1_S x J_E.
//
// Each clause quantified over every environment state is decided by an exact
// finite test (a matrix identity on the environment factor); sampled states
// corroborate it and supply witnesses.

#include "ddmet/opalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddmet::ddcond {

struct MixedUnitaryChannel {
    std::vector<double> weights;
    std::vector<ComplexMatrix> unitaries;

    /// Throws NotAChannel on negative weights, |sum - 1| > 1e-12, non-unitary
    /// members or inconsistent dimensions.
    void validate() const;
    std::size_t dim() const;

    ComplexMatrix apply(const ComplexMatrix& a) const;
    /// (Phi x id_E)(A) for A on the system-environment space.
    ComplexMatrix apply_to_system(const ComplexMatrix& a, std::size_t dim_e) const;

    static MixedUnitaryChannel identity(std::size_t dim);
};

struct Dims {
    std::size_t system = 2;
    std::size_t environment = 2;
};

struct CheckOptions {
    std::size_t n_env_samples = 64;  // Haar-random states, >= 20
    std::uint64_t seed = 0;
    double tolerance = 1e-8;
};

enum class Verdict { Satisfied, Violated, Inconclusive };
enum class Clause { Nontriviality, Orthogonality, ConstantDiagonal };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(Clause c) noexcept;

/// Concrete evidence for a violated clause. psi_e is empty for Nontriviality.
struct Witness {
    Clause clause = Clause::Nontriviality;
    ComplexVector psi_e;
    double residual = 0.0;
};

struct ConditionReport {
    bool nontrivial_hs = false;
    /// ||Phi(H_S) - Tr(H_S)/d 1||_F
    double nontrivial_residual = 0.0;
    /// max over sampled psi of |Tr{[Phi(H_S) - Tr(H_S)/d] Phi[<psi|H_SE|psi>]}|
    double orthogonality_residual = 0.0;
    /// spectral radius of Tr_S{[Phi(H_S) - Tr(H_S)/d] x 1 . (Phi x 1)(H_SE)}
    double orthogonality_exact_residual = 0.0;
    /// max over sampled psi of the spread of <i|Phi[<psi|H_SE|psi>]|i>
    double constant_diag_residual = 0.0;
    /// max_{i,j} spectral radius of B_ii - B_jj, B_ii = <i| (Phi x 1)(H_SE) |i>
    double constant_diag_exact_residual = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::size_t samples_used = 0;
    double tolerance = 1e-8;
    /// Eigenvalue clusters of Phi(H_S) (indices into its ascending spectrum) with more than one member.
    std::vector<std::vector<std::size_t>> degenerate_clusters;
    std::optional<Witness> witness;
    std::string note;
};

/// The dimS x dimS operator <psi|H_SE|psi>_E.
ComplexMatrix env_contraction(const ComplexMatrix& h_se, std::span<const Complex> psi_e,
                              std::size_t dim_s, std::size_t dim_e);

ConditionReport check_corollary(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                                const CheckOptions& opts = {});

ConditionReport check_theorem(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                              const MixedUnitaryChannel& channel, const CheckOptions& opts = {});

/// Re-evaluates the clause residual of a witness from scratch.
double evaluate_witness(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                        const MixedUnitaryChannel& channel, const Witness& witness);

/// Pi(A) = sum_i |b_i><b_i| A |b_i><b_i| realized by the d Fourier-phase
/// unitaries U_m = sum_j exp(2 pi i j m / d) |b_j><b_j| with weights 1/d.
MixedUnitaryChannel pinching_channel(std::span<const ComplexVector> basis);

/// Length-n control list where U_j appears m_j times, m_j the largest-remainder
/// rounding of weight_j * n. Throws InfeasibleRounding if some m_j is 0.
std::vector<ComplexMatrix> discretize_channel(const MixedUnitaryChannel& channel, std::size_t n);

/// Multiplicities chosen by discretize_channel.
std::vector<std::size_t> rounded_counts(const MixedUnitaryChannel& channel, std::size_t n);

/// key = value text, schema condition_report_v1.
std::string to_text(const ConditionReport& report);

} // namespace ddmet::ddcond
