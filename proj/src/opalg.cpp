#include "ddmet/opalg.hpp"

#include "ddmet/error.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ddmet {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionOverflow: return "DimensionOverflow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorKind::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorKind::AmplitudeVanished: return "AmplitudeVanished";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::DegenerateK: return "DegenerateK";
    case ErrorKind::UnsupportedSchedule: return "UnsupportedSchedule";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotAChannel: return "NotAChannel";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::InfeasibleRounding: return "InfeasibleRounding";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::GridMisalignment: return "GridMisalignment";
    case ErrorKind::NormDrift: return "NormDrift";
    }
    return "Unknown";
}

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_) {
        throw Error(ErrorKind::DimensionMismatch, "entry count does not match dim^2");
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw Error(ErrorKind::DimensionMismatch, "matrix initializer is not square");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "outer product of unequal lengths");
    }
    ComplexMatrix m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    }
    return m;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_residual() const {
    double r = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        }
    }
    return r;
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
    return hermiticity_residual() <= rel_tol * max_abs();
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "matrix sum");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "matrix difference");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "matrix product");
    const std::size_t n = a.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> v) {
    if (a.dim() != v.size()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
    ComplexVector out(v.size());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "max_abs_diff");
    double m = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) m = std::max(m, std::abs(ea[k] - eb[k]));
    return m;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b - b * a;
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& a) {
    return u * a * u.adjoint();
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "inner product");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

namespace pauli {
ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return {{0.0, -kI}, {kI, 0.0}}; }
ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
ComplexMatrix plus() { return {{0.0, 1.0}, {0.0, 0.0}}; }
ComplexMatrix minus() { return {{0.0, 0.0}, {1.0, 0.0}}; }
} // namespace pauli

ComplexMatrix EigenSystem::vector_matrix() const {
    const std::size_t n = vectors.size();
    ComplexMatrix v(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) v(i, k) = vectors[k][i];
    }
    return v;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) s += std::norm(a(i, j));
        }
    }
    return std::sqrt(s);
}

// Zeroes a(p,q) with the unitary V = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
// acting on the (p,q) plane, where a(p,q) = r e^{i phi}.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double r = std::abs(apq);
    const Complex phase = apq / r;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double theta = (aqq - app) / (2.0 * r);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    // V restricted to the plane: [[vpp, vpq], [vqp, vqq]].
    const Complex vpp = c;
    const Complex vpq = s;
    const Complex vqp = -s * std::conj(phase);
    const Complex vqq = c * std::conj(phase);

    const std::size_t n = a.dim();
    for (std::size_t k = 0; k < n; ++k) {  // A <- A V
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * vpp + akq * vqp;
        a(k, q) = akp * vpq + akq * vqq;
    }
    for (std::size_t k = 0; k < n; ++k) {  // A <- V^dagger A
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
        a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    for (std::size_t k = 0; k < n; ++k) {  // eigenvectors <- eigenvectors V
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * vpp + vkq * vqp;
        v(k, q) = vkp * vpq + vkq * vqq;
    }
}

} // namespace

EigenSystem eig_hermitian(const ComplexMatrix& input) {
    const std::size_t n = input.dim();
    const double scale = input.max_abs();
    const double herm = input.hermiticity_residual();
    if (herm > 1e-10 * scale) {
        std::ostringstream os;
        os << "max |A_ij - conj(A_ji)| = " << herm;
        throw Error(ErrorKind::NonHermitian, os.str());
    }

    // Symmetrize so rounding in the input cannot bias the rotations.
    ComplexMatrix a = input;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    constexpr int kMaxSweeps = 100;
    const double target = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
    bool converged = n < 2 || off_diagonal_norm(a) <= target;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) > 1e-300) jacobi_rotate(a, v, p, q);
            }
        }
        converged = off_diagonal_norm(a) <= target;
    }
    if (!converged) {
        throw Error(ErrorKind::ConvergenceFailure, "Jacobi sweeps exhausted");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return a(l, l).real() < a(r, r).real(); });

    EigenSystem es;
    es.values.reserve(n);
    es.vectors.reserve(n);
    for (std::size_t k : order) {
        es.values.push_back(a(k, k).real());
        ComplexVector col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
        es.vectors.push_back(std::move(col));
    }
    return es;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t cap) {
    const std::size_t da = a.dim();
    const std::size_t db = b.dim();
    if (db != 0 && da > cap / db) {
        std::ostringstream os;
        os << da << " x " << db << " exceeds cap " << cap;
        throw Error(ErrorKind::DimensionOverflow, os.str());
    }
    ComplexMatrix out(da * db);
    for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t j = 0; j < da; ++j) {
            const Complex aij = a(i, j);
            for (std::size_t k = 0; k < db; ++k) {
                for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = aij * b(k, l);
            }
        }
    }
    return out;
}

ComplexMatrix partial_trace_env(const ComplexMatrix& a, std::size_t dim_s, std::size_t dim_e) {
    if (a.dim() != dim_s * dim_e) {
        std::ostringstream os;
        os << "dim " << a.dim() << " != " << dim_s << " * " << dim_e;
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    ComplexMatrix out(dim_s);
    for (std::size_t i = 0; i < dim_s; ++i) {
        for (std::size_t j = 0; j < dim_s; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < dim_e; ++k) s += a(i * dim_e + k, j * dim_e + k);
            out(i, j) = s;
        }
    }
    return out;
}

ComplexMatrix matexp(const ComplexMatrix& a, Complex s) {
    const std::size_t n = a.dim();
    ComplexMatrix x = s * a;

    double norm1 = 0.0;  // induced 1-norm
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::abs(x(i, j));
        // NaN columns must not be swallowed by max().
        norm1 = std::isfinite(col) ? std::max(norm1, col) : col;
        if (!std::isfinite(norm1)) break;
    }
    if (!std::isfinite(norm1)) {
        throw Error(ErrorKind::ConvergenceFailure, "matrix exponent is not finite");
    }
    if (norm1 == 0.0) return ComplexMatrix::identity(n);

    constexpr int kMaxSquarings = 64;
    int squarings = 0;
    while (norm1 > 0.5) {
        norm1 *= 0.5;
        if (++squarings > kMaxSquarings) {
            throw Error(ErrorKind::ConvergenceFailure, "scaling-and-squaring depth exhausted");
        }
    }
    x *= std::ldexp(1.0, -squarings);

    // ||x|| <= 1/2 so the Taylor tail after 30 terms is far below round-off.
    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = term * x;
        term *= 1.0 / k;
        result += term;
        if (term.max_abs() <= 1e-18 * result.max_abs()) break;
    }
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

double unitarity_residual(const ComplexMatrix& u) {
    return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.dim()));
}

} // namespace ddmet
