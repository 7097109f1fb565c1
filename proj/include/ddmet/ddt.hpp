#pragma once

// Dynamical decoupling with instantaneous kicks exp(-i angle axis) at t = kT,
// k = 1, 2, ...  A pulse at time t has not yet fired when the state at t is
// evaluated (left limit).

#include "ddmet/jcmodel.hpp"
#include "ddmet/opalg.hpp"

#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace ddmet::ddt {

using jc::ReservoirParams;

struct PulseSchedule {
    double period = 0.2;
    ComplexMatrix axis = pauli::z();
    double kick_angle = std::numbers::pi / 2.0;

    /// Throws InvalidArgument unless period > 0 and axis is Hermitian.
    void validate() const;

    /// exp(-i kick_angle axis)
    ComplexMatrix kick_unitary() const;

    /// Kicks fired strictly before t; a kick landing on t (within 1e-9 T) is excluded.
    long pulses_before(double t) const;

    /// True for a sigma_z kick of angle pi/2 (mod pi), which flips the sign of
    /// sigma_+- in the toggling frame.
    bool flips_coupling_sign() const;
};

/// (c_e, dc_e/dt) in the rotating frame after `n` kicks.
struct RecurrenceState {
    Complex ce;
    Complex ce_dot;
    long n = 0;
};

struct Mat2 {
    Complex a11, a12, a21, a22;
};

/// Interval propagator including the derivative flip of the kick that opened
/// the interval (entries alpha, delta, epsilon, beta), without the overall
/// exp(-(lambda - i delta) tau / 2) factor.
Mat2 interval_matrix(const ReservoirParams& p, double tau);

/// Propagates (c_e, c_e') interval by interval with repeated 2x2 products.
/// Valid for every parameter set; requires a coupling-sign-flipping schedule.
RecurrenceState ce_ddt_recurrence_state(const ReservoirParams& p, const PulseSchedule& sched,
                                        double t, Complex ce0 = jc::kProbeAmplitude);
Complex ce_ddt_recurrence(const ReservoirParams& p, const PulseSchedule& sched, double t,
                          Complex ce0 = jc::kProbeAmplitude);

/// Coefficients of c_e(t) = ce0 e^{-(lambda - i delta) t/2} (A_n cosh(d tau/2) + B_n sinh(d tau/2)).
struct PulseCoefficients {
    Complex a_n;
    Complex b_n;
    Complex k;          // sqrt(d^2 + (lambda - i delta)^2 sinh^2(dT/2))
    Complex eta_plus;
    Complex eta_minus;
};

/// Closed form from the eigen-decomposition of the period matrix. Throws
/// DegenerateK when |K| < 1e-10 or |d| < 1e-10.
PulseCoefficients pulse_coefficients(const ReservoirParams& p, const PulseSchedule& sched, long n);

Complex ce_ddt_closed_form(const ReservoirParams& p, const PulseSchedule& sched, double t,
                           Complex ce0 = jc::kProbeAmplitude);

/// Closed form, falling back to the recurrence on DegenerateK.
Complex ce_ddt(const ReservoirParams& p, const PulseSchedule& sched, double t,
               Complex ce0 = jc::kProbeAmplitude);

/// Amplitude provider for reduced_state in the laboratory frame: the
/// toggling-frame c_e times (-1)^n, the relative e/g phase left by n kicks.
jc::AmplitudeFn ddt_amplitude(PulseSchedule sched);

struct EffectiveHamiltonians {
    ComplexMatrix h_s;
    ComplexMatrix h_se;
};

/// Averages U_k H_S U_k^dagger and (U_k x 1) H_SE (U_k^dagger x 1) over the
/// control set. Throws NotUnitary or DimensionMismatch.
EffectiveHamiltonians effective_hamiltonians(const ComplexMatrix& h_s, const ComplexMatrix& h_se,
                                             std::span<const ComplexMatrix> controls);

/// Toggling-frame control unitaries U_C(kT), k = 0..n-1, for the schedule.
std::vector<ComplexMatrix> control_sequence(const PulseSchedule& sched, std::size_t n);

struct QfiPoint {
    double t;
    double qfi;
};

/// QFI along a grid for the probe under the schedule; no schedule means free decay.
std::vector<QfiPoint> ddt_qfi_trajectory(const ReservoirParams& p,
                                         const std::optional<PulseSchedule>& sched,
                                         std::span<const double> grid, jc::QfiMode mode,
                                         std::optional<double> fd_step = std::nullopt);

} // namespace ddmet::ddt
