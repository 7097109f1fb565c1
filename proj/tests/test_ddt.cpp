#include "ddmet/ddt.hpp"
#include "ddmet/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ddmet;
using namespace ddmet::ddt;

namespace {

const ReservoirParams kStrong{0.5, 5.0, 1.5, 10.0};

PulseSchedule schedule(double period) {
    PulseSchedule s;
    s.period = period;
    return s;
}

} // namespace

TEST_CASE("PulseSchedule: kicks counted with the left-limit convention") {
    const PulseSchedule s = schedule(0.2);
    CHECK(s.pulses_before(0.0) == 0);
    CHECK(s.pulses_before(0.1) == 0);
    CHECK(s.pulses_before(0.2) == 0);
    CHECK(s.pulses_before(0.2 + 1e-6) == 1);
    CHECK(s.pulses_before(0.4) == 1);
    CHECK(s.pulses_before(3.0) == 14);
    CHECK(s.pulses_before(3.05) == 15);
}

TEST_CASE("PulseSchedule: kick unitary and coupling sign flip") {
    const PulseSchedule s = schedule(0.2);
    CHECK(max_abs_diff(s.kick_unitary(), -kI * pauli::z()) <= 1e-14);
    CHECK(s.flips_coupling_sign());

    PulseSchedule odd = s;
    odd.kick_angle = 1.5 * std::numbers::pi;
    CHECK(odd.flips_coupling_sign());

    PulseSchedule x_axis = s;
    x_axis.axis = pauli::x();
    CHECK_FALSE(x_axis.flips_coupling_sign());
    try {
        ce_ddt_recurrence(kStrong, x_axis, 1.0);
        FAIL("expected UnsupportedSchedule");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedSchedule);
    }

    PulseSchedule bad = s;
    bad.period = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("pulse_coefficients: zero kicks reduce to the uncontrolled coefficients") {
    const PulseCoefficients pc = pulse_coefficients(kStrong, schedule(0.2), 0);
    CHECK(std::abs(pc.a_n - 1.0) <= 1e-15);
    const Complex b0 = kStrong.damping() / jc::complex_rate_d(kStrong);
    CHECK(std::abs(pc.b_n - b0) <= 1e-15);
    CHECK(std::abs(pc.eta_plus * pc.eta_minus + 1.0) <= 1e-12);
}

TEST_CASE("ce_ddt_closed_form: equals the uncontrolled amplitude before the first kick") {
    const PulseSchedule s = schedule(20.0);
    for (double t : {0.0, 0.5, 2.0, 7.0, 19.9}) {
        CHECK(std::abs(ce_ddt_closed_form(kStrong, s, t) - jc::ce_closed_form(kStrong, t)) <= 1e-14);
        CHECK(std::abs(ce_ddt_recurrence(kStrong, s, t) - jc::ce_closed_form(kStrong, t)) <= 1e-14);
    }
}

TEST_CASE("ce_ddt_closed_form: matches the recurrence at T = 0.2, t = 3") {
    const PulseSchedule s = schedule(0.2);
    CHECK(std::abs(ce_ddt_closed_form(kStrong, s, 3.0) - ce_ddt_recurrence(kStrong, s, 3.0)) <= 1e-10);
}

TEST_CASE("ce_ddt_closed_form: matches the recurrence on random parameters") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lam(0.1, 2.0), gam(0.0, 10.0), det(-3.0, 3.0),
        per(0.05, 1.0), tt(0.0, 10.0);
    int tested = 0;
    while (tested < 200) {
        const ReservoirParams p{lam(rng), gam(rng), det(rng), 10.0};
        const PulseSchedule s = schedule(per(rng));
        const double t = tt(rng);
        if (std::abs(pulse_coefficients(p, s, 0).k) <= 1e-6) continue;
        CHECK(std::abs(ce_ddt_closed_form(p, s, t) - ce_ddt_recurrence(p, s, t)) <= 1e-9);
        ++tested;
    }
}

TEST_CASE("ce_ddt: amplitude is continuous across a kick") {
    const PulseSchedule s = schedule(0.2);
    const Complex x = 0.5 * jc::complex_rate_d(kStrong) * s.period;
    for (long n = 1; n <= 20; ++n) {
        const PulseCoefficients before = pulse_coefficients(kStrong, s, n - 1);
        const PulseCoefficients after = pulse_coefficients(kStrong, s, n);
        const Complex left = before.a_n * std::cosh(x) + before.b_n * std::sinh(x);
        CHECK(std::abs(left - after.a_n) <= 1e-12 * std::max(1.0, std::abs(after.a_n)));
    }
}

TEST_CASE("ce_ddt: derivative flips sign across a kick") {
    const PulseSchedule s = schedule(0.5);
    const RecurrenceState at = ce_ddt_recurrence_state(kStrong, s, 1.0);
    const RecurrenceState after = ce_ddt_recurrence_state(kStrong, s, 1.0 + 1e-7);
    CHECK(at.n == 1);
    CHECK(after.n == 2);
    CHECK(std::abs(after.ce_dot + at.ce_dot) <= 1e-5);
    CHECK(std::abs(after.ce - at.ce) <= 1e-6);
    CHECK(ce_ddt_recurrence_state(kStrong, s, 0.0).ce_dot == Complex(0.0, 0.0));
}

TEST_CASE("ce_ddt: degenerate rate falls back to the recurrence") {
    const ReservoirParams crit{0.5, 0.25, 0.0, 10.0};  // d = 0
    const PulseSchedule s = schedule(0.2);
    try {
        pulse_coefficients(crit, s, 3);
        FAIL("expected DegenerateK");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateK);
    }
    const Complex c = ce_ddt(crit, s, 1.3);
    CHECK(std::isfinite(c.real()));
    CHECK(c == ce_ddt_recurrence(crit, s, 1.3));
}

TEST_CASE("ddt_amplitude: applies the laboratory-frame kick sign") {
    const PulseSchedule s = schedule(0.2);
    const jc::AmplitudeFn f = ddt_amplitude(s);
    CHECK(f(kStrong, 0.1) == ce_ddt(kStrong, s, 0.1));
    CHECK(f(kStrong, 0.3) == -ce_ddt(kStrong, s, 0.3));
    CHECK(f(kStrong, 0.5) == ce_ddt(kStrong, s, 0.5));
}

TEST_CASE("effective_hamiltonians: identity controls return the inputs") {
    std::mt19937_64 rng(1);
    const ComplexMatrix hs = testing::random_hermitian(2, rng);
    const ComplexMatrix hse = testing::random_hermitian(6, rng);
    const std::vector<ComplexMatrix> controls{ComplexMatrix::identity(2)};
    const auto eff = effective_hamiltonians(hs, hse, controls);
    CHECK(max_abs_diff(eff.h_s, hs) == 0.0);
    CHECK(max_abs_diff(eff.h_se, hse) == 0.0);
}

TEST_CASE("effective_hamiltonians: {1, sigma_z} removes sigma_x coupling and keeps sigma_z") {
    const std::vector<ComplexMatrix> controls{ComplexMatrix::identity(2), pauli::z()};
    const auto eff = effective_hamiltonians(pauli::z(), kron(pauli::x(), pauli::x()), controls);
    CHECK(eff.h_se.max_abs() == 0.0);
    CHECK(eff.h_s == pauli::z());
}

TEST_CASE("effective_hamiltonians: kick sequence decouples sigma_+ B + h.c.") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix b(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b(i, j) = Complex(g(rng), g(rng));
    const ComplexMatrix hse = kron(pauli::plus(), b) + kron(pauli::minus(), b.adjoint());
    const auto controls = control_sequence(schedule(0.2), 2);
    const auto eff = effective_hamiltonians(0.5 * pauli::z(), hse, controls);
    CHECK(eff.h_se.max_abs() <= 1e-10);
    CHECK(max_abs_diff(eff.h_s, 0.5 * pauli::z()) <= 1e-15);
    CHECK(eff.h_se.is_hermitian(1e-10));
}

TEST_CASE("effective_hamiltonians: errors") {
    const ComplexMatrix not_unitary{{1.0, 1.0}, {0.0, 1.0}};
    const std::vector<ComplexMatrix> bad{not_unitary};
    try {
        effective_hamiltonians(pauli::z(), kron(pauli::x(), pauli::x()), bad);
        FAIL("expected NotUnitary");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotUnitary);
    }
    const std::vector<ComplexMatrix> ok{ComplexMatrix::identity(2)};
    try {
        effective_hamiltonians(pauli::z(), ComplexMatrix::identity(5), ok);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
    const std::vector<ComplexMatrix> wrong_dim{ComplexMatrix::identity(3)};
    CHECK_THROWS_AS(effective_hamiltonians(pauli::z(), ComplexMatrix::identity(4), wrong_dim), Error);
}

TEST_CASE("ddt_qfi_trajectory: noiseless limit gives t^2") {
    const ReservoirParams free{0.5, 0.0, 1.5, 10.0};
    std::vector<double> grid;
    for (int k = 0; k <= 50; ++k) grid.push_back(0.2 * k);
    for (auto mode : {jc::QfiMode::PhaseOnly, jc::QfiMode::Full}) {
        const auto pts = ddt_qfi_trajectory(free, schedule(0.2), grid, mode);
        for (const auto& pt : pts) CHECK(std::abs(pt.qfi - pt.t * pt.t) <= 1e-8 * std::max(1.0, pt.t * pt.t));
    }
}

TEST_CASE("ddt_qfi_trajectory: control recovers information at T = 0.2") {
    std::vector<double> grid;
    for (int k = 10; k <= 100; ++k) grid.push_back(0.1 * k);
    const auto with = ddt_qfi_trajectory(kStrong, schedule(0.2), grid, jc::QfiMode::PhaseOnly);
    const auto without = ddt_qfi_trajectory(kStrong, std::nullopt, grid, jc::QfiMode::PhaseOnly);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 2.0) CHECK(with[i].qfi >= without[i].qfi);
    }
}

TEST_CASE("ddt_qfi_trajectory: grid must be ascending") {
    const std::vector<double> grid{1.0, 0.5};
    CHECK_THROWS_AS(ddt_qfi_trajectory(kStrong, std::nullopt, grid, jc::QfiMode::PhaseOnly), Error);
}
