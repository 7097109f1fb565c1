#include "ddmet/qfi.hpp"

#include "ddmet/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddmet::qfi {

namespace {

constexpr double kStateTol = 1e-10;

void require_normalized(std::span<const Complex> psi) {
    const double n = norm(psi);
    if (std::abs(n - 1.0) > kStateTol) {
        std::ostringstream os;
        os << "||psi|| = " << n;
        throw Error(ErrorKind::NotNormalized, os.str());
    }
}

} // namespace

double ParamState::step() const {
    return fd_step.value_or(1e-5 * std::max(1.0, std::abs(omega)));
}

void require_density_matrix(const ComplexMatrix& rho) {
    if (rho.dim() == 0) throw Error(ErrorKind::InvalidDensityMatrix, "empty matrix");
    if (rho.hermiticity_residual() > kStateTol) {
        throw Error(ErrorKind::InvalidDensityMatrix, "not Hermitian");
    }
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > kStateTol) {
        std::ostringstream os;
        os << "trace = " << tr;
        throw Error(ErrorKind::InvalidDensityMatrix, os.str());
    }
    const auto es = eig_hermitian(rho);
    if (es.values.front() < -kStateTol) {
        std::ostringstream os;
        os << "negative eigenvalue " << es.values.front();
        throw Error(ErrorKind::InvalidDensityMatrix, os.str());
    }
}

double qfi_pure(std::span<const Complex> psi, std::span<const Complex> dpsi) {
    require_normalized(psi);
    const double dd = inner(dpsi, dpsi).real();
    const double overlap = std::norm(inner(psi, dpsi));
    return std::max(0.0, 4.0 * (dd - overlap));
}

double qfi_variance(const ComplexMatrix& g, std::span<const Complex> psi0, double t) {
    if (!g.is_hermitian(1e-10)) {
        throw Error(ErrorKind::NonHermitian, "generator");
    }
    require_normalized(psi0);
    const ComplexVector gpsi = g * psi0;
    const double mean = inner(psi0, gpsi).real();
    const double second = inner(gpsi, gpsi).real();
    return std::max(0.0, 4.0 * t * t * (second - mean * mean));
}

QfiResult qfi_from_derivative(const ComplexMatrix& rho, const ComplexMatrix& drho) {
    if (rho.dim() != drho.dim()) throw Error(ErrorKind::DimensionMismatch, "rho vs d rho");
    const auto es = eig_hermitian(rho);
    const ComplexMatrix v = es.vector_matrix();
    const ComplexMatrix m = v.adjoint() * drho * v;

    QfiResult r;
    const std::size_t n = rho.dim();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            const double denom = es.values[k] + es.values[l];
            const double w = std::norm(m(k, l));
            if (denom > kEigenPairCutoff) {
                r.value += 2.0 * w / denom;
            } else {
                r.dropped_weight += w;
            }
        }
    }
    return r;
}

ComplexMatrix derivative(const ParamState& state, double t) {
    if (!state.rho_at) throw Error(ErrorKind::InvalidArgument, "ParamState without rho_at");
    const bool has_phase = state.mode != DerivativeMode::FiniteDifference;
    if (has_phase && !state.phase_generator) {
        throw Error(ErrorKind::DerivativeUnavailable, "phase modes need a phase generator");
    }
    ComplexMatrix phase_part;
    if (has_phase) {
        const ComplexMatrix rho = state.rho_at(state.omega);
        phase_part = Complex(0.0, -t) * commutator(*state.phase_generator, rho);
        if (state.mode == DerivativeMode::AnalyticPhase) return phase_part;
    }

    const double h = state.step();
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be > 0");
    ComplexMatrix up = state.rho_at(state.omega + h);
    ComplexMatrix down = state.rho_at(state.omega - h);
    require_density_matrix(up);
    require_density_matrix(down);
    if (!has_phase) return (up - down) * Complex(1.0 / (2.0 * h));

    // Strip the phase rotation before differencing so only the slowly varying
    // remainder sigma(omega) is differenced, then rotate back.
    const ComplexMatrix& g = *state.phase_generator;
    auto rotation = [&](double w) { return matexp(g, Complex(0.0, -w * t)); };
    const ComplexMatrix u = rotation(state.omega);
    const ComplexMatrix sigma_up = conjugate(rotation(state.omega + h).adjoint(), up);
    const ComplexMatrix sigma_down = conjugate(rotation(state.omega - h).adjoint(), down);
    const ComplexMatrix dsigma = (sigma_up - sigma_down) * Complex(1.0 / (2.0 * h));
    return phase_part + conjugate(u, dsigma);
}

QfiResult qfi_mixed(const ParamState& state, double t) {
    if (!state.rho_at) throw Error(ErrorKind::InvalidArgument, "ParamState without rho_at");
    const ComplexMatrix rho = state.rho_at(state.omega);
    require_density_matrix(rho);
    return qfi_from_derivative(rho, derivative(state, t));
}

SldResult sld(const ComplexMatrix& rho, const ComplexMatrix& drho) {
    require_density_matrix(rho);
    if (drho.dim() != rho.dim()) throw Error(ErrorKind::DimensionMismatch, "rho vs d rho");
    if (drho.hermiticity_residual() > kStateTol) {
        throw Error(ErrorKind::NonHermitian, "d rho");
    }
    if (std::abs(drho.trace()) > kStateTol) {
        throw Error(ErrorKind::InvalidArgument, "d rho must be traceless");
    }

    const auto es = eig_hermitian(rho);
    const ComplexMatrix v = es.vector_matrix();
    const ComplexMatrix m = v.adjoint() * drho * v;
    const std::size_t n = rho.dim();

    SldResult out{ComplexMatrix(n), false};
    for (double lam : es.values) {
        if (lam < kEigenPairCutoff) out.rank_deficient = true;
    }
    ComplexMatrix leig(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            const double denom = es.values[k] + es.values[l];
            if (denom > kEigenPairCutoff) leig(k, l) = 2.0 * m(k, l) / denom;
        }
    }
    out.l = v * leig * v.adjoint();
    return out;
}

} // namespace ddmet::qfi
