#pragma once

// Dense complex linear algebra for the small operators used throughout the
// library: qubit observables, system-environment couplings, density matrices.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ddmet {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr Complex kI{0.0, 1.0};

/// Square complex matrix stored row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::size_t dim, std::vector<Complex> entries);
    /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix zeros(std::size_t dim) { return ComplexMatrix(dim); }
    static ComplexMatrix diagonal(std::span<const Complex> diag);
    /// |a><b|
    static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

    std::size_t dim() const noexcept { return dim_; }
    std::span<const Complex> entries() const noexcept { return data_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double max_abs() const;
    double frobenius_norm() const;
    /// max|A_ij - conj(A_ji)|
    double hermiticity_residual() const;
    bool is_hermitian(double rel_tol = 1e-12) const;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex s);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> v);

/// max_ij |A_ij - B_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
/// U A U^dagger
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& a);

/// <a|b>, antilinear in the first argument.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double norm(std::span<const Complex> v);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// sigma_+ = |e><g| with |e> = index 0.
ComplexMatrix plus();
ComplexMatrix minus();
} // namespace pauli

struct EigenSystem {
    std::vector<double> values;            // ascending
    std::vector<ComplexVector> vectors;    // vectors[k] pairs with values[k]

    /// Columns of V as a matrix.
    ComplexMatrix vector_matrix() const;
};

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Cyclic complex Jacobi. Throws NonHermitian if the input residual exceeds
/// 1e-10 * max|A|, ConvergenceFailure after the sweep budget is exhausted.
EigenSystem eig_hermitian(const ComplexMatrix& a);

/// Throws DimensionOverflow when dim(A)*dim(B) exceeds `cap`.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t cap = kDefaultDimensionCap);

/// Tr_E over the second tensor factor of a (dimS*dimE)-dimensional operator.
ComplexMatrix partial_trace_env(const ComplexMatrix& a, std::size_t dim_s, std::size_t dim_e);

/// exp(s*A) by scaling and squaring of a truncated Taylor series.
ComplexMatrix matexp(const ComplexMatrix& a, Complex s);

/// max|U^dagger U - 1|
double unitarity_residual(const ComplexMatrix& u);

} // namespace ddmet
