#include "ddmet/jcmodel.hpp"

#include "ddmet/error.hpp"

#include <cmath>
#include <sstream>

namespace ddmet::jc {

void ReservoirParams::validate() const {
    if (!std::isfinite(lambda) || !std::isfinite(gamma0) || !std::isfinite(delta) ||
        !std::isfinite(omega0)) {
        throw Error(ErrorKind::InvalidArgument, "reservoir parameters must be finite");
    }
    if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be > 0");
    if (gamma0 < 0.0) throw Error(ErrorKind::InvalidArgument, "gamma0 must be >= 0");
}

ReservoirParams ReservoirParams::from_frequencies(double lambda, double gamma0, double omega0,
                                                  double omega_c) {
    ReservoirParams p{lambda, gamma0, omega0 - omega_c, omega0};
    p.validate();
    return p;
}

ReservoirParams ReservoirParams::with_omega0_tracking_detuning(double omega0_new) const {
    ReservoirParams p = *this;
    p.delta = omega0_new - omega_c();
    p.omega0 = omega0_new;
    return p;
}

ReservoirParams ReservoirParams::with_omega0_fixed_detuning(double omega0_new) const {
    ReservoirParams p = *this;
    p.omega0 = omega0_new;
    return p;
}

Complex sinhc(Complex x) {
    if (std::abs(x) < 1e-3) {
        const Complex x2 = x * x;
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
    }
    return std::sinh(x) / x;
}

Complex complex_rate_d(const ReservoirParams& p) {
    const Complex a = p.damping();
    Complex d = std::sqrt(a * a - 2.0 * p.gamma0 * p.lambda);
    // std::sqrt is principal but a signed-zero imaginary part can put a
    // negative-real radicand on the lower side of the cut.
    if (d.real() == 0.0 && d.imag() < 0.0) d = -d;
    return d;
}

Complex ce_closed_form(const ReservoirParams& p, double t, Complex ce0) {
    const Complex a = p.damping();
    const Complex d = complex_rate_d(p);
    const Complex x = 0.5 * d * t;
    return ce0 * std::exp(-0.5 * a * t) * (std::cosh(x) + a * (0.5 * t) * sinhc(x));
}

Complex ce_dot_closed_form(const ReservoirParams& p, double t, Complex ce0) {
    const Complex a = p.damping();
    const Complex d = complex_rate_d(p);
    const Complex x = 0.5 * d * t;
    // (d^2 - a^2) / (2d) * sinh(x) = -gamma0 lambda (t/2) sinhc(x)
    return -ce0 * std::exp(-0.5 * a * t) * (p.gamma0 * p.lambda * 0.5 * t) * sinhc(x);
}

namespace {

Complex log_derivative(const ReservoirParams& p, double t) {
    const Complex c = ce_closed_form(p, t);
    const Complex cdot = ce_dot_closed_form(p, t);
    if (std::abs(c) <= 1e-12) {
        const double speed = std::abs(cdot);
        const double r = speed > 0.0 ? 2.0 * std::abs(c) / speed : 0.0;
        std::ostringstream os;
        os << "|c_e(" << t << ")| = " << std::abs(c) << ", zero in [" << t - r << ", " << t + r
           << "]";
        throw AmplitudeVanishedError(t - r, t + r, os.str());
    }
    return cdot / c;
}

} // namespace

double decay_rate(const ReservoirParams& p, double t) {
    return -2.0 * log_derivative(p, t).real();
}

double lamb_shift(const ReservoirParams& p, double t) {
    return -log_derivative(p, t).imag();
}

AmplitudeTrajectory closed_form_trajectory(const ReservoirParams& p, std::span<const double> times,
                                           Complex ce0) {
    AmplitudeTrajectory tr;
    tr.source = AmplitudeSource::ClosedForm;
    tr.times.assign(times.begin(), times.end());
    tr.ce.reserve(times.size());
    for (double t : times) tr.ce.push_back(ce_closed_form(p, t, ce0));
    return tr;
}

AmplitudeFn closed_form_amplitude() {
    return [](const ReservoirParams& p, double t) { return ce_closed_form(p, t); };
}

ComplexMatrix reduced_state(const ReservoirParams& p, double t, Complex ce) {
    const double pe = std::norm(ce);
    const Complex coherence = std::polar(1.0, -p.omega0 * t) * ce * kProbeAmplitude;
    ComplexMatrix rho{{pe, coherence}, {std::conj(coherence), 1.0 - pe}};

    // Closed-form eigenvalues of a unit-trace Hermitian 2x2.
    const double bloch = std::sqrt((2.0 * pe - 1.0) * (2.0 * pe - 1.0) + 4.0 * std::norm(coherence));
    const double min_eig = 0.5 * (1.0 - bloch);
    if (min_eig < -1e-9) {
        std::ostringstream os;
        os << "min eigenvalue " << min_eig << " at t = " << t << " (|c_e| = " << std::abs(ce) << ")";
        throw Error(ErrorKind::PositivityViolation, os.str());
    }
    return rho;
}

ComplexMatrix reduced_state(const ReservoirParams& p, double t, const AmplitudeFn& ce_fn) {
    return reduced_state(p, t, ce_fn(p, t));
}

qfi::ParamState param_state(const ReservoirParams& p, double t, AmplitudeFn ce_fn, QfiMode mode,
                            std::optional<double> fd_step) {
    p.validate();
    qfi::ParamState state;
    state.omega = p.omega0;
    state.fd_step = fd_step;
    if (mode == QfiMode::PhaseOnly) {
        state.mode = qfi::DerivativeMode::AnalyticPhase;
        state.phase_generator = 0.5 * pauli::z();
        state.rho_at = [p, t, ce_fn = std::move(ce_fn)](double w) {
            const ReservoirParams q = p.with_omega0_fixed_detuning(w);
            return reduced_state(q, t, ce_fn(q, t));
        };
    } else {
        state.mode = qfi::DerivativeMode::PhaseAndFiniteDifference;
        state.phase_generator = 0.5 * pauli::z();
        state.rho_at = [p, t, ce_fn = std::move(ce_fn)](double w) {
            const ReservoirParams q = p.with_omega0_tracking_detuning(w);
            return reduced_state(q, t, ce_fn(q, t));
        };
    }
    return state;
}

double qfi(const ReservoirParams& p, double t, const AmplitudeFn& ce_fn, QfiMode mode,
           std::optional<double> fd_step) {
    return qfi::qfi_mixed(param_state(p, t, ce_fn, mode, fd_step), t).value;
}

} // namespace ddmet::jc
