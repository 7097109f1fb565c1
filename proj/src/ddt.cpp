#include "ddmet/ddt.hpp"

#include "ddmet/error.hpp"

#include <cmath>
#include <sstream>

namespace ddmet::ddt {

void PulseSchedule::validate() const {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw Error(ErrorKind::InvalidArgument, "pulse period must be > 0");
    }
    if (!std::isfinite(kick_angle)) throw Error(ErrorKind::InvalidArgument, "kick angle");
    if (axis.dim() == 0 || !axis.is_hermitian(1e-10)) {
        throw Error(ErrorKind::InvalidArgument, "kick axis must be Hermitian");
    }
}

ComplexMatrix PulseSchedule::kick_unitary() const {
    return matexp(axis, Complex(0.0, -kick_angle));
}

long PulseSchedule::pulses_before(double t) const {
    const double ratio = t / period;
    const long n = static_cast<long>(std::ceil(ratio - 1e-9)) - 1;
    return n < 0 ? 0 : n;
}

bool PulseSchedule::flips_coupling_sign() const {
    if (axis.dim() != 2) return false;
    const ComplexMatrix u = kick_unitary();
    return max_abs_diff(conjugate(u, pauli::plus()), -1.0 * pauli::plus()) <= 1e-12;
}

namespace {

void require_sign_flip(const PulseSchedule& sched) {
    sched.validate();
    if (!sched.flips_coupling_sign()) {
        throw Error(ErrorKind::UnsupportedSchedule,
                    "amplitude solutions need a qubit kick mapping sigma_+ to -sigma_+");
    }
}

Complex ipow(Complex base, long n) {
    Complex result = 1.0;
    while (n > 0) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

} // namespace

Mat2 interval_matrix(const ReservoirParams& p, double tau) {
    const Complex a = p.damping();
    const Complex d = jc::complex_rate_d(p);
    const Complex x = 0.5 * d * tau;
    const Complex ch = std::cosh(x);
    const Complex sh_over_d = 0.5 * tau * jc::sinhc(x);  // sinh(x) / d
    const double coupling = p.gamma0 * p.lambda;
    return Mat2{
        ch + a * sh_over_d,     // alpha
        -2.0 * sh_over_d,       // delta
        -coupling * sh_over_d,  // epsilon = (d/2 - a^2/(2d)) sinh(x)
        a * sh_over_d - ch,     // beta
    };
}

RecurrenceState ce_ddt_recurrence_state(const ReservoirParams& p, const PulseSchedule& sched,
                                        double t, Complex ce0) {
    p.validate();
    require_sign_flip(sched);
    if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "t must be >= 0");

    const Complex a = p.damping();
    const long n = sched.pulses_before(t);
    const Mat2 m = interval_matrix(p, sched.period);
    const Complex decay = std::exp(-0.5 * a * sched.period);

    // Left limits at successive pulse instants; the kick's derivative flip is
    // folded into the interval matrix.
    Complex c = ce0;
    Complex cdot = 0.0;
    for (long k = 0; k < n; ++k) {
        const Complex c_next = decay * (m.a11 * c + m.a12 * cdot);
        const Complex cdot_next = decay * (m.a21 * c + m.a22 * cdot);
        c = c_next;
        cdot = cdot_next;
    }
    const double tau = t - static_cast<double>(n) * sched.period;
    const Mat2 last = interval_matrix(p, tau);
    const Complex tail = std::exp(-0.5 * a * tau);
    return RecurrenceState{tail * (last.a11 * c + last.a12 * cdot),
                           tail * (last.a21 * c + last.a22 * cdot), n};
}

Complex ce_ddt_recurrence(const ReservoirParams& p, const PulseSchedule& sched, double t,
                          Complex ce0) {
    return ce_ddt_recurrence_state(p, sched, t, ce0).ce;
}

PulseCoefficients pulse_coefficients(const ReservoirParams& p, const PulseSchedule& sched, long n) {
    p.validate();
    require_sign_flip(sched);
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "pulse count must be >= 0");

    const Complex a = p.damping();
    const Complex d = jc::complex_rate_d(p);
    if (std::abs(d) < 1e-10) {
        throw Error(ErrorKind::DegenerateK, "d vanishes; period matrix has a repeated eigenvalue");
    }
    const Complex x = 0.5 * d * sched.period;
    const Complex ch = std::cosh(x);
    const Complex sh = std::sinh(x);
    const Complex k = std::sqrt(d * d + a * a * sh * sh);
    if (std::abs(k) < 1e-10) {
        std::ostringstream os;
        os << "|K| = " << std::abs(k);
        throw Error(ErrorKind::DegenerateK, os.str());
    }

    PulseCoefficients pc;
    pc.k = k;
    pc.eta_plus = (a * sh + k) / d;
    pc.eta_minus = (a * sh - k) / d;
    const Complex ep = ipow(pc.eta_plus, n);
    const Complex em = ipow(pc.eta_minus, n);
    const double coupling = p.gamma0 * p.lambda;

    pc.a_n = ((k + d * ch) * ep + (k - d * ch) * em) / (2.0 * k);
    pc.b_n = (a * k * (ep + em) + (d * a * ch + 2.0 * coupling * sh) * (ep - em)) / (2.0 * d * k);
    return pc;
}

Complex ce_ddt_closed_form(const ReservoirParams& p, const PulseSchedule& sched, double t,
                           Complex ce0) {
    if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "t must be >= 0");
    const long n = sched.pulses_before(t);
    const PulseCoefficients pc = pulse_coefficients(p, sched, n);
    const Complex a = p.damping();
    const Complex d = jc::complex_rate_d(p);
    const Complex x = 0.5 * d * (t - static_cast<double>(n) * sched.period);
    return ce0 * std::exp(-0.5 * a * t) * (pc.a_n * std::cosh(x) + pc.b_n * std::sinh(x));
}

Complex ce_ddt(const ReservoirParams& p, const PulseSchedule& sched, double t, Complex ce0) {
    try {
        return ce_ddt_closed_form(p, sched, t, ce0);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateK) throw;
        return ce_ddt_recurrence(p, sched, t, ce0);
    }
}

jc::AmplitudeFn ddt_amplitude(PulseSchedule sched) {
    return [sched = std::move(sched)](const ReservoirParams& p, double t) {
        const Complex c = ce_ddt(p, sched, t);
        return sched.pulses_before(t) % 2 == 0 ? c : -c;
    };
}

EffectiveHamiltonians effective_hamiltonians(const ComplexMatrix& h_s, const ComplexMatrix& h_se,
                                             std::span<const ComplexMatrix> controls) {
    if (controls.empty()) throw Error(ErrorKind::InvalidArgument, "empty control set");
    const std::size_t dim_s = h_s.dim();
    if (dim_s == 0 || h_se.dim() % dim_s != 0) {
        throw Error(ErrorKind::DimensionMismatch, "H_SE dimension is not a multiple of dim(H_S)");
    }
    const std::size_t dim_e = h_se.dim() / dim_s;
    const ComplexMatrix id_e = ComplexMatrix::identity(dim_e);

    EffectiveHamiltonians out{ComplexMatrix(dim_s), ComplexMatrix(h_se.dim())};
    for (const auto& u : controls) {
        if (u.dim() != dim_s) throw Error(ErrorKind::DimensionMismatch, "control dimension");
        const double res = unitarity_residual(u);
        if (res > 1e-10) {
            std::ostringstream os;
            os << "||U^dagger U - 1||_max = " << res;
            throw Error(ErrorKind::NotUnitary, os.str());
        }
        out.h_s += conjugate(u, h_s);
        out.h_se += conjugate(kron(u, id_e), h_se);
    }
    const Complex inv_n = 1.0 / static_cast<double>(controls.size());
    out.h_s *= inv_n;
    out.h_se *= inv_n;
    return out;
}

std::vector<ComplexMatrix> control_sequence(const PulseSchedule& sched, std::size_t n) {
    sched.validate();
    const ComplexMatrix kick = sched.kick_unitary();
    std::vector<ComplexMatrix> out;
    out.reserve(n);
    ComplexMatrix u = ComplexMatrix::identity(kick.dim());
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(u);
        u = kick * u;
    }
    return out;
}

std::vector<QfiPoint> ddt_qfi_trajectory(const ReservoirParams& p,
                                         const std::optional<PulseSchedule>& sched,
                                         std::span<const double> grid, jc::QfiMode mode,
                                         std::optional<double> fd_step) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || (i > 0 && grid[i] < grid[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "time grid must be ascending and nonnegative");
        }
    }
    if (sched) require_sign_flip(*sched);
    const jc::AmplitudeFn amp = sched ? ddt_amplitude(*sched) : jc::closed_form_amplitude();

    std::vector<QfiPoint> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back({t, jc::qfi(p, t, amp, mode, fd_step)});
    return out;
}

} // namespace ddmet::ddt
