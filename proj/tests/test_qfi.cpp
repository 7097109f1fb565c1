#include "ddmet/error.hpp"
#include "ddmet/qfi.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ddmet;
using namespace ddmet::qfi;

namespace {

const double kR = 1.0 / std::numbers::sqrt2;

/// e^{-i w t G} |psi0>
ComplexVector evolve(const ComplexMatrix& g, std::span<const Complex> psi0, double w, double t) {
    return matexp(g, Complex(0.0, -w * t)) * psi0;
}

ParamState phase_family(const ComplexMatrix& rho0, const ComplexMatrix& g, double t, double w,
                        DerivativeMode mode) {
    ParamState s;
    s.omega = w;
    s.mode = mode;
    s.phase_generator = g;
    s.rho_at = [rho0, g, t](double om) { return conjugate(matexp(g, Complex(0.0, -om * t)), rho0); };
    return s;
}

} // namespace

TEST_CASE("qfi_pure: constant state gives zero") {
    const ComplexVector psi{1.0, 0.0};
    const ComplexVector dpsi{0.0, 0.0};
    CHECK(qfi_pure(psi, dpsi) == 0.0);
}

TEST_CASE("qfi_pure: phase-encoded equal superposition gives t^2") {
    const double w = 1.3;
    for (double t : {0.5, 2.0, 7.0}) {
        const ComplexVector psi{kR * std::polar(1.0, -w * t / 2), kR * std::polar(1.0, w * t / 2)};
        const ComplexVector dpsi{-kI * (t / 2) * psi[0], kI * (t / 2) * psi[1]};
        CHECK(qfi_pure(psi, dpsi) == doctest::Approx(t * t).epsilon(1e-14));
    }
}

TEST_CASE("qfi_pure: finite-difference phase family matches the variance formula") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix g = testing::random_hermitian(3, rng);
        const ComplexVector psi0 = testing::random_state(3, rng);
        const double t = 1.7;
        const double w = 0.4;
        const double h = 1e-5;
        const ComplexVector psi = evolve(g, psi0, w, t);
        const ComplexVector up = evolve(g, psi0, w + h, t);
        const ComplexVector down = evolve(g, psi0, w - h, t);
        ComplexVector dpsi(3);
        for (int k = 0; k < 3; ++k) dpsi[k] = (up[k] - down[k]) / (2 * h);
        CHECK(qfi_pure(psi, dpsi) == doctest::Approx(qfi_variance(g, psi0, t)).epsilon(1e-6));
    }
}

TEST_CASE("qfi_pure: unnormalized state is rejected") {
    const ComplexVector psi{1.0, 1.0};
    try {
        qfi_pure(psi, psi);
        FAIL("expected NotNormalized");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotNormalized);
    }
}

TEST_CASE("qfi_variance: probe examples") {
    const ComplexMatrix g = 0.5 * pauli::z();
    const ComplexVector plus{kR, kR};
    CHECK(qfi_variance(g, plus, 2.0) == doctest::Approx(4.0));
    const ComplexVector e{1.0, 0.0};
    CHECK(qfi_variance(g, e, 3.3) == 0.0);
    // Optimal probe: (mu_max - mu_min)^2 t^2 = 1 at t = 1.
    CHECK(qfi_variance(g, plus, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("qfi_variance: errors") {
    const ComplexMatrix not_hermitian{{0.0, 1.0}, {0.0, 0.0}};
    const ComplexVector plus{kR, kR};
    CHECK_THROWS_AS(qfi_variance(not_hermitian, plus, 1.0), Error);
    try {
        qfi_variance(not_hermitian, plus, 1.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonHermitian);
    }
    const ComplexVector bad{1.0, 1.0};
    try {
        qfi_variance(pauli::z(), bad, 1.0);
        FAIL("expected NotNormalized");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotNormalized);
    }
}

TEST_CASE("qfi_mixed: pure z-rotation orbit of |+> gives t^2 in both derivative modes") {
    const ComplexVector plus{kR, kR};
    const ComplexMatrix rho0 = ComplexMatrix::outer(plus, plus);
    const double t = 3.0;
    for (auto mode : {DerivativeMode::AnalyticPhase, DerivativeMode::FiniteDifference}) {
        const ParamState s = phase_family(rho0, 0.5 * pauli::z(), t, 2.0, mode);
        const QfiResult r = qfi_mixed(s, t);
        CHECK(r.value == doctest::Approx(9.0).epsilon(1e-8));
        CHECK(r.dropped_weight <= 1e-12);
    }
}

TEST_CASE("qfi_mixed: maximally mixed constant family gives zero") {
    ParamState s;
    s.omega = 1.0;
    s.rho_at = [](double) { return 0.5 * ComplexMatrix::identity(2); };
    CHECK(qfi_mixed(s, 1.0).value == 0.0);
}

TEST_CASE("qfi_mixed: rank-1 families agree with qfi_pure") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix g = testing::random_hermitian(3, rng);
        const ComplexVector psi0 = testing::random_state(3, rng);
        const double t = 1.1;
        const double w = 0.7;
        const ParamState s =
            phase_family(ComplexMatrix::outer(psi0, psi0), g, t, w, DerivativeMode::AnalyticPhase);
        CHECK(qfi_mixed(s, t).value == doctest::Approx(qfi_variance(g, psi0, t)).epsilon(1e-8));
    }
}

TEST_CASE("qfi_mixed: unitary families are shift invariant in omega") {
    std::mt19937_64 rng(23);
    const ComplexMatrix g = testing::random_hermitian(3, rng);
    const ComplexMatrix rho0 = testing::random_density(3, rng);
    const double t = 0.9;
    const double ref = qfi_mixed(phase_family(rho0, g, t, 0.0, DerivativeMode::AnalyticPhase), t).value;
    for (double w : {-2.0, -0.5, 0.5, 1.0, 3.0}) {
        const double f = qfi_mixed(phase_family(rho0, g, t, w, DerivativeMode::AnalyticPhase), t).value;
        CHECK(std::abs(f - ref) <= 1e-8 * std::max(1.0, ref));
    }
}

TEST_CASE("qfi_mixed: finite-difference error shrinks as h^2") {
    std::mt19937_64 rng(29);
    const ComplexMatrix g = testing::random_hermitian(2, rng);
    const ComplexMatrix rho0 = testing::random_density(2, rng);
    const double t = 1.5;
    ParamState s = phase_family(rho0, g, t, 0.3, DerivativeMode::FiniteDifference);
    const double exact = qfi_mixed(phase_family(rho0, g, t, 0.3, DerivativeMode::AnalyticPhase), t).value;
    s.fd_step = 1e-2;
    const double e1 = std::abs(qfi_mixed(s, t).value - exact);
    s.fd_step = 5e-3;
    const double e2 = std::abs(qfi_mixed(s, t).value - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("qfi_mixed: phase plus finite-difference mode is exact on pure rotations") {
    std::mt19937_64 rng(41);
    const ComplexMatrix g = testing::random_hermitian(3, rng);
    const ComplexMatrix rho0 = testing::random_density(3, rng);
    const double t = 4.0;
    const double exact = qfi_mixed(phase_family(rho0, g, t, 10.0, DerivativeMode::AnalyticPhase), t).value;
    const double mixed =
        qfi_mixed(phase_family(rho0, g, t, 10.0, DerivativeMode::PhaseAndFiniteDifference), t).value;
    CHECK(std::abs(mixed - exact) <= 1e-8 * std::max(1.0, exact));
}

TEST_CASE("qfi_mixed: analytic mode without a generator is unavailable") {
    ParamState s;
    s.mode = DerivativeMode::AnalyticPhase;
    s.rho_at = [](double) { return 0.5 * ComplexMatrix::identity(2); };
    try {
        qfi_mixed(s, 1.0);
        FAIL("expected DerivativeUnavailable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DerivativeUnavailable);
    }
}

TEST_CASE("qfi_mixed: invalid density matrices are rejected") {
    ParamState s;
    s.rho_at = [](double) { return ComplexMatrix{{1.2, 0.0}, {0.0, -0.2}}; };
    try {
        qfi_mixed(s, 1.0);
        FAIL("expected InvalidDensityMatrix");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidDensityMatrix);
    }
}

TEST_CASE("sld: pure z-rotation at t = 1 has Tr(rho L^2) = 1") {
    const ComplexVector plus{kR, kR};
    const ComplexMatrix rho = ComplexMatrix::outer(plus, plus);
    const ComplexMatrix drho = -kI * commutator(0.5 * pauli::z(), rho);
    const SldResult r = sld(rho, drho);
    CHECK(r.rank_deficient);
    CHECK((rho * r.l * r.l).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.l.is_hermitian());
}

TEST_CASE("sld: zero derivative gives zero operator") {
    std::mt19937_64 rng(31);
    const ComplexMatrix rho = testing::random_density(2, rng);
    const SldResult r = sld(rho, ComplexMatrix(2));
    CHECK(r.l.max_abs() == 0.0);
}

TEST_CASE("sld: full-rank random states solve the Lyapunov equation and reproduce the QFI") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix rho = testing::random_density(2, rng);
        ComplexMatrix drho = testing::random_hermitian(2, rng);
        drho -= (drho.trace() / 2.0) * ComplexMatrix::identity(2);
        const SldResult r = sld(rho, drho);
        CHECK_FALSE(r.rank_deficient);
        CHECK(max_abs_diff(r.l * rho + rho * r.l, 2.0 * drho) <= 1e-8);
        const double f = qfi_from_derivative(rho, drho).value;
        CHECK((rho * r.l * r.l).trace().real() == doctest::Approx(f).epsilon(1e-8));
    }
}
