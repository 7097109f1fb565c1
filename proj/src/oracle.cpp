#include "ddmet/oracle.hpp"

#include "ddmet/error.hpp"
#include "ddmet/qfi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ddmet::oracle {

namespace {

/// Number of dt steps in `span`; throws GridMisalignment unless span is a multiple of dt.
long aligned_steps(double span, double dt, const char* what) {
    const double ratio = span / dt;
    const long n = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(n)) > 1e-6) {
        std::ostringstream os;
        os << what << " = " << span << " is not a multiple of dt = " << dt;
        throw Error(ErrorKind::GridMisalignment, os.str());
    }
    return n;
}

void require_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
}

/// Steps per kick period, or 0 without control.
long steps_per_period(const std::optional<PulseSchedule>& sched, double dt) {
    if (!sched) return 0;
    sched->validate();
    const long m = aligned_steps(sched->period, dt, "pulse period");
    if (m < 1) throw Error(ErrorKind::GridMisalignment, "pulse period shorter than dt");
    return m;
}

/// +1 on even intervals between kicks, -1 on odd ones, for step [n dt, (n+1) dt].
double interval_sign(long step, long per_period) {
    if (per_period == 0) return 1.0;
    return (step / per_period) % 2 == 0 ? 1.0 : -1.0;
}

} // namespace

AmplitudeTrajectory volterra_ce(const ReservoirParams& p, double t_max, double dt,
                                const std::optional<PulseSchedule>& sched, Complex ce0) {
    p.validate();
    require_dt(dt);
    if (t_max < 0.0) throw Error(ErrorKind::InvalidArgument, "t_max must be >= 0");
    if (sched && !sched->flips_coupling_sign()) {
        throw Error(ErrorKind::UnsupportedSchedule, "kick must map sigma_+ to -sigma_+");
    }

    double limit = 1.0 / p.lambda;
    if (p.gamma0 > 0.0) limit = std::min(limit, 1.0 / p.gamma0);
    if (sched) limit = std::min(limit, sched->period);
    if (dt > limit / 20.0 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "dt = " << dt << " exceeds min(1/lambda, 1/gamma0, T)/20 = " << limit / 20.0;
        throw Error(ErrorKind::StepTooLarge, os.str());
    }
    const long n_steps = aligned_steps(t_max, dt, "t_max");
    const long per = steps_per_period(sched, dt);

    const double h = dt;
    const Complex a = p.damping();
    const double f0 = 0.5 * p.gamma0 * p.lambda;
    const double hf = 0.5 * h * f0;

    // kernel[k] = e^{-(lambda - i delta) k h}
    std::vector<Complex> kernel(static_cast<std::size_t>(n_steps) + 2);
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        kernel[k] = std::exp(-a * (static_cast<double>(k) * h));
    }

    AmplitudeTrajectory tr;
    tr.source = jc::AmplitudeSource::Volterra;
    tr.times.resize(static_cast<std::size_t>(n_steps) + 1);
    tr.ce.resize(tr.times.size());
    for (long n = 0; n <= n_steps; ++n) tr.times[n] = static_cast<double>(n) * h;
    tr.ce[0] = ce0;

    // Signed history samples for subinterval j: s_j c_j and s_j c_{j+1}.
    std::vector<Complex> left(static_cast<std::size_t>(n_steps));
    std::vector<Complex> right(static_cast<std::size_t>(n_steps));

    const double bound = (1.0 + 1e-6) * std::abs(ce0);
    Complex history = 0.0;  // int_0^{t_n} f(t_n - tau) s(tau) c(tau) dtau
    for (long n = 0; n < n_steps; ++n) {
        const double sigma = interval_sign(n, per);
        // History integral at t_{n+1}, without the implicit c_{n+1} end point.
        Complex acc = 0.0;
        for (long j = 0; j < n; ++j) {
            acc += kernel[n + 1 - j] * left[j] + kernel[n - j] * right[j];
        }
        const Complex s_part = hf * (acc + kernel[1] * sigma * tr.ce[n]);
        const Complex c_next = (tr.ce[n] - 0.5 * h * sigma * (history + s_part)) / (1.0 + hf * 0.5 * h);
        tr.ce[n + 1] = c_next;
        left[n] = sigma * tr.ce[n];
        right[n] = sigma * c_next;
        history = s_part + hf * sigma * c_next;

        if (std::abs(c_next) > bound) {
            std::ostringstream os;
            os << "|c_e| = " << std::abs(c_next) << " at t = " << tr.times[n + 1]
               << " exceeds |c_e(0)|; reduce dt";
            throw Error(ErrorKind::StepTooLarge, os.str());
        }
    }
    return tr;
}

AmplitudeTrajectory aux_ode_ce(const ReservoirParams& p, double t_max, double dt,
                               const std::optional<PulseSchedule>& sched, Complex ce0) {
    p.validate();
    require_dt(dt);
    if (t_max < 0.0) throw Error(ErrorKind::InvalidArgument, "t_max must be >= 0");
    if (sched && !sched->flips_coupling_sign()) {
        throw Error(ErrorKind::UnsupportedSchedule, "kick must map sigma_+ to -sigma_+");
    }
    const long n_steps = aligned_steps(t_max, dt, "t_max");
    const long per = steps_per_period(sched, dt);

    const Complex a = p.damping();
    const double f0 = 0.5 * p.gamma0 * p.lambda;
    auto rhs = [&](Complex c, Complex z, Complex& dc, Complex& dz) {
        dc = -f0 * z;
        dz = -a * z + c;
    };

    AmplitudeTrajectory tr;
    tr.source = jc::AmplitudeSource::AuxOde;
    tr.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    tr.ce.reserve(static_cast<std::size_t>(n_steps) + 1);
    tr.times.push_back(0.0);
    tr.ce.push_back(ce0);

    Complex c = ce0;
    Complex z = 0.0;
    for (long n = 0; n < n_steps; ++n) {
        Complex k1c, k1z, k2c, k2z, k3c, k3z, k4c, k4z;
        rhs(c, z, k1c, k1z);
        rhs(c + 0.5 * dt * k1c, z + 0.5 * dt * k1z, k2c, k2z);
        rhs(c + 0.5 * dt * k2c, z + 0.5 * dt * k2z, k3c, k3z);
        rhs(c + dt * k3c, z + dt * k3z, k4c, k4z);
        c += dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
        z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        if (per > 0 && (n + 1) % per == 0) z = -z;
        tr.times.push_back(static_cast<double>(n + 1) * dt);
        tr.ce.push_back(c);
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Discrete bath

double DiscreteModeBath::total_weight() const {
    double s = 0.0;
    for (const auto& g : couplings) s += std::norm(g);
    return s;
}

double spectral_density(const ReservoirParams& p, double w) {
    const double x = w - p.omega_c();
    return p.gamma0 * p.lambda * p.lambda / (2.0 * std::numbers::pi * (x * x + p.lambda * p.lambda));
}

double spectral_weight_in_window(const ReservoirParams& p, double window) {
    return p.gamma0 * p.lambda / std::numbers::pi * std::atan(window / p.lambda);
}

DiscreteModeBath sample_bath(const ReservoirParams& p, std::size_t k, double window) {
    p.validate();
    if (k < 50) throw Error(ErrorKind::InvalidArgument, "at least 50 bath modes are required");
    if (!(window >= 10.0 * p.lambda) || !std::isfinite(window)) {
        throw Error(ErrorKind::InvalidArgument, "window must be >= 10 lambda");
    }
    DiscreteModeBath bath;
    bath.center = p.omega_c();
    bath.window = window;
    const double dw = 2.0 * window / static_cast<double>(k);
    bath.mode_freqs.reserve(k);
    bath.couplings.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double w = bath.center - window + (static_cast<double>(j) + 0.5) * dw;
        bath.mode_freqs.push_back(w);
        bath.couplings.emplace_back(std::sqrt(spectral_density(p, w) * dw), 0.0);
    }
    return bath;
}

DiscreteModeBath sample_bath(const ReservoirParams& p, std::size_t k) {
    return sample_bath(p, k, kDefaultWindowWidths * p.lambda);
}

double GlobalAmplitudes::norm_squared() const {
    double s = std::norm(ce) + std::norm(cg);
    for (const auto& c : ck) s += std::norm(c);
    return s;
}

Complex GlobalAmplitudes::rotating_ce(double omega0) const {
    return ce * std::polar(1.0, 0.5 * omega0 * t);
}

namespace {

struct KickPhases {
    Complex excited = 1.0;
    Complex ground = 1.0;
};

KickPhases kick_phases(const std::optional<PulseSchedule>& sched) {
    if (!sched) return {};
    sched->validate();
    if (sched->axis.dim() != 2 || std::abs(sched->axis(0, 1)) > 1e-12 ||
        std::abs(sched->axis(1, 0)) > 1e-12) {
        throw Error(ErrorKind::UnsupportedSchedule,
                    "the single-excitation solver needs a kick diagonal in the e/g basis");
    }
    const ComplexMatrix u = sched->kick_unitary();
    return {u(0, 0), u(1, 1)};
}

Complex ipow(Complex base, long n) {
    Complex r = 1.0;
    for (; n > 0; n >>= 1, base *= base) {
        if (n & 1) r *= base;
    }
    return r;
}

} // namespace

std::vector<GlobalAmplitudes> discrete_global_trajectory(const DiscreteModeBath& bath,
                                                         const ReservoirParams& p,
                                                         std::span<const double> times,
                                                         const std::optional<PulseSchedule>& sched,
                                                         const GlobalOptions& opts) {
    p.validate();
    require_dt(opts.dt);
    if (bath.couplings.size() != bath.mode_freqs.size()) {
        throw Error(ErrorKind::DimensionMismatch, "bath couplings vs frequencies");
    }
    const double dt = opts.dt;
    const long per = steps_per_period(sched, dt);
    const KickPhases kick = kick_phases(sched);

    std::vector<long> targets;
    targets.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "times must be ascending and nonnegative");
        }
        targets.push_back(aligned_steps(times[i], dt, "sample time"));
    }

    const std::size_t k = bath.count();
    std::vector<double> offset(k);
    for (std::size_t j = 0; j < k; ++j) offset[j] = bath.mode_freqs[j] - p.omega0;

    // y[0] = a_e, y[1 + j] = a_k; C = a e^{-i w0 t / 2}.
    ComplexVector y(k + 1), k1(k + 1), k2(k + 1), k3(k + 1), k4(k + 1), tmp(k + 1);
    y[0] = jc::kProbeAmplitude;
    auto rhs = [&](const ComplexVector& in, ComplexVector& out) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            acc += bath.couplings[j] * in[1 + j];
            out[1 + j] = -kI * (offset[j] * in[1 + j] + std::conj(bath.couplings[j]) * in[0]);
        }
        out[0] = -kI * acc;
    };
    const double ground_weight = 0.5;  // |C_g|^2, untouched by the dynamics

    std::vector<GlobalAmplitudes> out;
    out.reserve(times.size());
    long step = 0;
    long kicks = 0;
    auto record = [&](double t) {
        GlobalAmplitudes g;
        g.t = t;
        g.kicks = kicks;
        const Complex rot = std::polar(1.0, -0.5 * p.omega0 * t);
        g.ce = y[0] * rot;
        g.cg = ipow(kick.ground, kicks) * std::conj(rot) * jc::kProbeAmplitude;
        g.ck.resize(k);
        for (std::size_t j = 0; j < k; ++j) g.ck[j] = y[1 + j] * rot;
        out.push_back(std::move(g));
    };

    for (std::size_t i = 0; i < targets.size(); ++i) {
        while (step < targets[i]) {
            // A kick sitting on the current node fires before the next step.
            if (per > 0 && step > 0 && step % per == 0 && step / per > kicks) {
                y[0] *= kick.excited;
                for (std::size_t j = 0; j < k; ++j) y[1 + j] *= kick.ground;
                ++kicks;
            }
            rhs(y, k1);
            for (std::size_t j = 0; j <= k; ++j) tmp[j] = y[j] + 0.5 * dt * k1[j];
            rhs(tmp, k2);
            for (std::size_t j = 0; j <= k; ++j) tmp[j] = y[j] + 0.5 * dt * k2[j];
            rhs(tmp, k3);
            for (std::size_t j = 0; j <= k; ++j) tmp[j] = y[j] + dt * k3[j];
            rhs(tmp, k4);
            double n2 = ground_weight;
            for (std::size_t j = 0; j <= k; ++j) {
                y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                n2 += std::norm(y[j]);
            }
            ++step;
            if (std::abs(1.0 - n2) > opts.norm_tolerance) {
                std::ostringstream os;
                os << "|1 - sum|C|^2| = " << std::abs(1.0 - n2) << " at step " << step
                   << " (t = " << static_cast<double>(step) * dt << ")";
                throw Error(ErrorKind::NormDrift, os.str());
            }
        }
        record(static_cast<double>(targets[i]) * dt);
    }
    return out;
}

GlobalAmplitudes discrete_global_evolve(const DiscreteModeBath& bath, const ReservoirParams& p,
                                        double t, const std::optional<PulseSchedule>& sched,
                                        const GlobalOptions& opts) {
    const double times[] = {t};
    return discrete_global_trajectory(bath, p, times, sched, opts).front();
}

ComplexMatrix reduced_state(const GlobalAmplitudes& g) {
    double bath = 0.0;
    for (const auto& c : g.ck) bath += std::norm(c);
    const Complex coherence = g.ce * std::conj(g.cg);
    return ComplexMatrix{{std::norm(g.ce), coherence},
                         {std::conj(coherence), std::norm(g.cg) + bath}};
}

ComplexVector global_state_vector(const GlobalAmplitudes& g) {
    ComplexVector v;
    v.reserve(g.ck.size() + 2);
    v.push_back(g.ce);
    v.push_back(g.cg);
    v.insert(v.end(), g.ck.begin(), g.ck.end());
    return v;
}

double marginal_purity(const GlobalAmplitudes& g) {
    double bath = 0.0;
    for (const auto& c : g.ck) bath += std::norm(c);
    const double n2 = g.norm_squared();
    return n2 * n2 - 2.0 * std::norm(g.ce) * bath;
}

std::vector<QfiBoundPoint> qfi_bound(const DiscreteModeBath& bath, const ReservoirParams& p,
                                     std::span<const double> times, double h,
                                     const std::optional<PulseSchedule>& sched,
                                     const GlobalOptions& opts) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be > 0");
    // The bath is held fixed, so moving w0 also moves the detuning.
    const auto mid = discrete_global_trajectory(bath, p, times, sched, opts);
    const auto up =
        discrete_global_trajectory(bath, p.with_omega0_tracking_detuning(p.omega0 + h), times, sched, opts);
    const auto down =
        discrete_global_trajectory(bath, p.with_omega0_tracking_detuning(p.omega0 - h), times, sched, opts);

    std::vector<QfiBoundPoint> out;
    out.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const ComplexVector psi = global_state_vector(mid[i]);
        const ComplexVector psi_up = global_state_vector(up[i]);
        const ComplexVector psi_down = global_state_vector(down[i]);
        ComplexVector dpsi(psi.size());
        for (std::size_t j = 0; j < psi.size(); ++j) dpsi[j] = (psi_up[j] - psi_down[j]) / (2.0 * h);

        ComplexMatrix drho = reduced_state(up[i]) - reduced_state(down[i]);
        drho *= 1.0 / (2.0 * h);
        // Normalize the global vector's tiny RK4 norm error away before the pure-state formula.
        ComplexVector unit = psi;
        const double nrm = norm(psi);
        for (auto& z : unit) z /= nrm;
        for (auto& z : dpsi) z /= nrm;

        QfiBoundPoint pt;
        pt.t = mid[i].t;
        pt.reduced = qfi::qfi_from_derivative(reduced_state(mid[i]), drho).value;
        pt.global = qfi::qfi_pure(unit, dpsi);
        out.push_back(pt);
    }
    return out;
}

} // namespace ddmet::oracle
