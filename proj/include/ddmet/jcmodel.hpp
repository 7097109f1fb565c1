#pragma once

// Damped Jaynes-Cummings qubit in a Lorentzian reservoir with detuning.
//
// Conventions: basis index 0 is |e>, index 1 is |g>. Amplitudes c_e are kept
// in the frame rotating at omega0/2; reduced_state restores the
// Schroedinger-picture phases. The memory kernel is
//   f(s) = (gamma0 lambda / 2) exp(-(lambda - i delta) s).

#include "ddmet/opalg.hpp"
#include "ddmet/qfi.hpp"

#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace ddmet::jc {

/// Amplitude of |e> in the equal-superposition probe (|e> + |g>)/sqrt(2).
inline constexpr double kProbeAmplitude = 1.0 / std::numbers::sqrt2;

struct ReservoirParams {
    double lambda = 0.5;   // spectral width, 1/time
    double gamma0 = 5.0;   // resonant coupling rate, 1/time
    double delta = 1.5;    // detuning omega0 - omega_c
    double omega0 = 10.0;  // qubit frequency

    double omega_c() const noexcept { return omega0 - delta; }
    /// lambda - i delta
    Complex damping() const noexcept { return {lambda, -delta}; }

    /// Throws InvalidArgument unless lambda > 0, gamma0 >= 0 and all fields finite.
    void validate() const;

    static ReservoirParams from_frequencies(double lambda, double gamma0, double omega0,
                                            double omega_c);

    /// Probe frequency moved with the cavity held fixed: delta follows omega0.
    ReservoirParams with_omega0_tracking_detuning(double omega0_new) const;
    /// Probe frequency moved with the detuning held fixed.
    ReservoirParams with_omega0_fixed_detuning(double omega0_new) const;
};

enum class AmplitudeSource { ClosedForm, Volterra, AuxOde, DiscreteModes, PulsedClosedForm };

struct AmplitudeTrajectory {
    std::vector<double> times;
    std::vector<Complex> ce;
    AmplitudeSource source = AmplitudeSource::ClosedForm;
};

/// sinh(x)/x, series-evaluated near zero.
Complex sinhc(Complex x);

/// Principal sqrt((lambda - i delta)^2 - 2 gamma0 lambda); Re d >= 0, ties to Im d >= 0.
Complex complex_rate_d(const ReservoirParams& p);

/// c_e(t) without control. Uses cosh and sinh(x)/x so the d -> 0 limit is exact.
Complex ce_closed_form(const ReservoirParams& p, double t, Complex ce0 = kProbeAmplitude);
/// Analytic time derivative of ce_closed_form.
Complex ce_dot_closed_form(const ReservoirParams& p, double t, Complex ce0 = kProbeAmplitude);

/// gamma(t) = -2 Re[c_e'/c_e]. Throws AmplitudeVanishedError where |c_e| <= 1e-12.
double decay_rate(const ReservoirParams& p, double t);
/// S(t) = -Im[c_e'/c_e]. Same failure mode as decay_rate.
double lamb_shift(const ReservoirParams& p, double t);

AmplitudeTrajectory closed_form_trajectory(const ReservoirParams& p, std::span<const double> times,
                                           Complex ce0 = kProbeAmplitude);

/// Supplies the rotating-frame amplitude for given parameters and time.
using AmplitudeFn = std::function<Complex(const ReservoirParams&, double)>;

AmplitudeFn closed_form_amplitude();

/// [[|c|^2, e^{-i w0 t} c / sqrt2], [c.c., 1 - |c|^2]]. Throws PositivityViolation
/// if the smallest eigenvalue is below -1e-9.
ComplexMatrix reduced_state(const ReservoirParams& p, double t, Complex ce);
ComplexMatrix reduced_state(const ReservoirParams& p, double t, const AmplitudeFn& ce_fn);

/// How the probe frequency enters the family rho(omega0).
enum class QfiMode {
    /// Only the explicit exp(-i omega0 t) coherence phase; analytic derivative.
    PhaseOnly,
    /// Detuning tracks omega0 (cavity fixed). The explicit phase is
    /// differentiated exactly, the amplitude's dependence by finite differences.
    Full,
};

qfi::ParamState param_state(const ReservoirParams& p, double t, AmplitudeFn ce_fn, QfiMode mode,
                            std::optional<double> fd_step = std::nullopt);

double qfi(const ReservoirParams& p, double t, const AmplitudeFn& ce_fn, QfiMode mode,
           std::optional<double> fd_step = std::nullopt);

} // namespace ddmet::jc
