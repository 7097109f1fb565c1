#pragma once

// Independent numerical references for the excited-state amplitude:
//   * a Volterra march of the memory-kernel equation,
//   * the auxiliary-variable ODE that makes the exponential kernel local,
//   * a discrete-mode global Schroedinger solver (qubit + K bath modes).
// None of them uses the closed forms they are meant to check.

#include "ddmet/ddt.hpp"
#include "ddmet/jcmodel.hpp"
#include "ddmet/opalg.hpp"

#include <optional>
#include <vector>

namespace ddmet::oracle {

using ddt::PulseSchedule;
using jc::AmplitudeTrajectory;
using jc::ReservoirParams;

/// Default half-width of the sampled spectral window, in units of lambda.
inline constexpr double kDefaultWindowWidths = 80.0;
inline constexpr std::size_t kDefaultModeCount = 400;

/// Trapezoidal history + trapezoidal time stepping of
///   c_e'(t) = -int_0^t f(t - tau) s(t) s(tau) c_e(tau) dtau,
/// f(s) = (gamma0 lambda / 2) e^{-(lambda - i delta) s}, s(t) = (-1)^(kicks before t).
/// The implicit corrector is linear in the new amplitude and solved exactly.
/// Returns rotating-frame, toggling-frame amplitudes on t_k = k dt.
/// Throws StepTooLarge if dt > min(1/lambda, 1/gamma0, T)/20 or |c_e| grows
/// beyond (1 + 1e-6)|c_e(0)|; GridMisalignment if t_max or T is not a multiple of dt.
AmplitudeTrajectory volterra_ce(const ReservoirParams& p, double t_max, double dt,
                                const std::optional<PulseSchedule>& sched = std::nullopt,
                                Complex ce0 = jc::kProbeAmplitude);

/// Classical RK4 for z' = -(lambda - i delta) z + c_e, c_e' = -(gamma0 lambda / 2) z,
/// z(0) = 0, with z -> -z at every kick. Throws GridMisalignment if a kick or
/// t_max falls strictly inside a step.
AmplitudeTrajectory aux_ode_ce(const ReservoirParams& p, double t_max, double dt,
                               const std::optional<PulseSchedule>& sched = std::nullopt,
                               Complex ce0 = jc::kProbeAmplitude);

/// Star bath with J(w) = (1/2pi) gamma0 lambda^2 / ((w - w_c)^2 + lambda^2),
/// J(w) = sum_k |g_k|^2 delta(w - w_k).
struct DiscreteModeBath {
    std::vector<double> mode_freqs;
    std::vector<Complex> couplings;
    double center = 0.0;
    double window = 0.0;

    std::size_t count() const noexcept { return mode_freqs.size(); }
    /// sum_k |g_k|^2
    double total_weight() const;
};

/// Lorentzian spectral density at w.
double spectral_density(const ReservoirParams& p, double w);

/// Exact integral of J over [w_c - window, w_c + window].
double spectral_weight_in_window(const ReservoirParams& p, double window);

/// Midpoint rule on K equal cells over [w_c - window, w_c + window];
/// g_k = sqrt(J(w_k) dw). Throws InvalidArgument unless K >= 50 and window >= 10 lambda.
DiscreteModeBath sample_bath(const ReservoirParams& p, std::size_t k, double window);
DiscreteModeBath sample_bath(const ReservoirParams& p, std::size_t k = kDefaultModeCount);

/// Schroedinger-picture amplitudes of
///   C_e |e,0> + C_g |g,0> + sum_k C_k |g,1_k>.
struct GlobalAmplitudes {
    double t = 0.0;
    Complex ce;
    Complex cg;
    std::vector<Complex> ck;
    /// Kicks applied strictly before t.
    long kicks = 0;

    double norm_squared() const;
    /// C_e e^{i w0 t / 2}: the rotating-frame excited amplitude, including kick phases.
    Complex rotating_ce(double omega0) const;
};

struct GlobalOptions {
    double dt = 1e-3;
    /// Abort when |1 - sum |C|^2| exceeds this.
    double norm_tolerance = 1e-6;
};

/// RK4 in the frame rotating at w0/2 starting from C_e = C_g = 1/sqrt2,
/// C_k = 0. Kicks (diagonal in the e/g basis) fire at kT, k >= 1; a kick
/// landing exactly on t has not fired yet. Throws NormDrift, GridMisalignment
/// or UnsupportedSchedule (non-diagonal kick).
GlobalAmplitudes discrete_global_evolve(const DiscreteModeBath& bath, const ReservoirParams& p,
                                        double t,
                                        const std::optional<PulseSchedule>& sched = std::nullopt,
                                        const GlobalOptions& opts = {});

/// Same evolution sampled on an ascending grid of dt multiples.
std::vector<GlobalAmplitudes> discrete_global_trajectory(
    const DiscreteModeBath& bath, const ReservoirParams& p, std::span<const double> times,
    const std::optional<PulseSchedule>& sched = std::nullopt, const GlobalOptions& opts = {});

/// Qubit marginal: [[|C_e|^2, C_e C_g^*], [c.c., |C_g|^2 + sum |C_k|^2]].
ComplexMatrix reduced_state(const GlobalAmplitudes& g);

/// (C_e, C_g, C_1, ..., C_K)
ComplexVector global_state_vector(const GlobalAmplitudes& g);

/// Purity of the marginal written directly in the amplitudes,
/// N^4 - 2 |C_e|^2 sum|C_k|^2 with N^2 = sum |C|^2 (exact for N = 1).
double marginal_purity(const GlobalAmplitudes& g);

struct QfiBoundPoint {
    double t = 0.0;
    double reduced = 0.0;  // QFI of the qubit marginal
    double global = 0.0;   // pure-state QFI of the qubit + bath state
};

/// Both QFIs with respect to w0 (bath frequencies held fixed), each from a
/// central difference of step h of the same global evolution.
std::vector<QfiBoundPoint> qfi_bound(const DiscreteModeBath& bath, const ReservoirParams& p,
                                     std::span<const double> times, double h,
                                     const std::optional<PulseSchedule>& sched = std::nullopt,
                                     const GlobalOptions& opts = {});

} // namespace ddmet::oracle
