#include "ddmet/error.hpp"
#include "ddmet/opalg.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ddmet;
using ddmet::testing::random_hermitian;

namespace {

double reconstruction_residual(const ComplexMatrix& a, const EigenSystem& es) {
    const ComplexMatrix v = es.vector_matrix();
    std::vector<Complex> diag(es.values.begin(), es.values.end());
    const ComplexMatrix rebuilt = v * ComplexMatrix::diagonal(diag) * v.adjoint();
    return max_abs_diff(a, rebuilt);
}

double orthonormality_residual(const EigenSystem& es) {
    const ComplexMatrix v = es.vector_matrix();
    return max_abs_diff(v.adjoint() * v, ComplexMatrix::identity(v.dim()));
}

} // namespace

TEST_CASE("eig_hermitian: sigma_z has spectrum (-1, 1) with |g>, |e>") {
    const EigenSystem es = eig_hermitian(pauli::z());
    REQUIRE(es.values.size() == 2);
    CHECK(es.values[0] == doctest::Approx(-1.0));
    CHECK(es.values[1] == doctest::Approx(1.0));
    CHECK(std::abs(es.vectors[0][1]) == doctest::Approx(1.0));
    CHECK(std::abs(es.vectors[1][0]) == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian: identity is degenerate with an orthonormal pair") {
    const EigenSystem es = eig_hermitian(ComplexMatrix::identity(2));
    CHECK(es.values[0] == doctest::Approx(1.0));
    CHECK(es.values[1] == doctest::Approx(1.0));
    CHECK(orthonormality_residual(es) <= 1e-12);
}

TEST_CASE("eig_hermitian: sigma_x (x) sigma_x has spectrum (-1, -1, 1, 1)") {
    const EigenSystem es = eig_hermitian(kron(pauli::x(), pauli::x()));
    const double expected[] = {-1.0, -1.0, 1.0, 1.0};
    for (int k = 0; k < 4; ++k) CHECK(es.values[k] == doctest::Approx(expected[k]).epsilon(1e-12));
    CHECK(reconstruction_residual(kron(pauli::x(), pauli::x()), es) <= 1e-12);
}

TEST_CASE("eig_hermitian: agrees with an independent solver on random matrices") {
    std::mt19937_64 rng(7);
    for (std::size_t dim : {1u, 2u, 3u, 5u, 8u, 16u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix a = random_hermitian(dim, rng, 3.0);
            const EigenSystem es = eig_hermitian(a);

            Eigen::MatrixXcd ea(dim, dim);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) ea(i, j) = a(i, j);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ea);
            for (std::size_t k = 0; k < dim; ++k) {
                CHECK(std::abs(es.values[k] - solver.eigenvalues()(k)) <= 1e-10 * std::max(1.0, a.max_abs()));
            }
            CHECK(reconstruction_residual(a, es) <= 1e-10 * std::max(1.0, a.max_abs()));
            CHECK(orthonormality_residual(es) <= 1e-10);
            double sum = 0.0;
            for (double v : es.values) sum += v;
            CHECK(std::abs(sum - a.trace().real()) <= 1e-10);
        }
    }
}

TEST_CASE("eig_hermitian: rejects non-Hermitian input") {
    ComplexMatrix a{{1.0, 2.0}, {0.0, 1.0}};
    try {
        eig_hermitian(a);
        FAIL("expected NonHermitian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonHermitian);
    }
}

TEST_CASE("kron: block structure and index formula") {
    CHECK(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) == ComplexMatrix::identity(4));
    const ComplexMatrix zi = kron(pauli::z(), ComplexMatrix::identity(2));
    const Complex diag[] = {1.0, 1.0, -1.0, -1.0};
    CHECK(zi == ComplexMatrix::diagonal(diag));
    const ComplexMatrix xx = kron(pauli::x(), pauli::x());
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(xx(i, j) == Complex(i + j == 3 ? 1.0 : 0.0));
}

TEST_CASE("kron: associative on integer matrices") {
    const ComplexMatrix a{{1.0, 2.0}, {3.0, 4.0}};
    const ComplexMatrix b{{0.0, -1.0}, {5.0, 2.0}};
    const ComplexMatrix c{{2.0, 0.0, 1.0}, {1.0, 1.0, 0.0}, {-3.0, 4.0, 1.0}};
    CHECK(kron(kron(a, b), c) == kron(a, kron(b, c)));
}

TEST_CASE("kron: dimension cap") {
    try {
        kron(ComplexMatrix::identity(64), ComplexMatrix::identity(65));
        FAIL("expected DimensionOverflow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionOverflow);
    }
    CHECK(kron(ComplexMatrix::identity(64), ComplexMatrix::identity(64)).dim() == 4096);
}

TEST_CASE("partial_trace_env: product states, Bell state, index-sum oracle") {
    std::mt19937_64 rng(11);
    const ComplexMatrix rs = testing::random_density(2, rng);
    const ComplexMatrix re = testing::random_density(3, rng);
    CHECK(max_abs_diff(partial_trace_env(kron(rs, re), 2, 3), rs) <= 1e-12);

    const double r = 1.0 / std::numbers::sqrt2;
    const ComplexVector bell{r, 0.0, 0.0, r};
    const ComplexMatrix half = 0.5 * ComplexMatrix::identity(2);
    CHECK(max_abs_diff(partial_trace_env(ComplexMatrix::outer(bell, bell), 2, 2), half) <= 1e-15);

    const ComplexMatrix a = random_hermitian(4, rng);
    const ComplexMatrix pt = partial_trace_env(a, 2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < 2; ++k) acc += a(i * 2 + k, j * 2 + k);
            CHECK(std::abs(pt(i, j) - acc) <= 1e-14);
        }
    }
    CHECK(std::abs(pt.trace() - a.trace()) <= 1e-12);

    const ComplexMatrix ha = random_hermitian(3, rng);
    const ComplexMatrix hb = random_hermitian(4, rng);
    CHECK(max_abs_diff(partial_trace_env(kron(ha, hb), 3, 4), hb.trace() * ha) <= 1e-12);
}

TEST_CASE("partial_trace_env: dimension mismatch") {
    try {
        partial_trace_env(ComplexMatrix::identity(4), 3, 2);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("matexp: Pauli identities") {
    CHECK(max_abs_diff(matexp(pauli::z(), Complex(0.0, -std::numbers::pi / 2)), -kI * pauli::z()) <= 1e-14);
    CHECK(matexp(pauli::x(), 0.0) == ComplexMatrix::identity(2));
    const double th = 0.3;
    const ComplexMatrix expected =
        std::cos(th) * ComplexMatrix::identity(2) - kI * std::sin(th) * pauli::x();
    CHECK(max_abs_diff(matexp(pauli::x(), Complex(0.0, -th)), expected) <= 1e-14);
}

TEST_CASE("matexp: unitarity and inverse for Hermitian generators") {
    std::mt19937_64 rng(3);
    for (double t : {0.1, 1.0, 5.0, 10.0, -7.5}) {
        const ComplexMatrix a = random_hermitian(4, rng);
        const ComplexMatrix u = matexp(a, Complex(0.0, -t));
        CHECK(unitarity_residual(u) <= 1e-10);
        CHECK(max_abs_diff(u * matexp(a, Complex(0.0, t)), ComplexMatrix::identity(4)) <= 1e-10);
    }
}

TEST_CASE("matexp: non-finite input") {
    ComplexMatrix a{{std::nan(""), 0.0}, {0.0, 1.0}};
    try {
        matexp(a, 1.0);
        FAIL("expected ConvergenceFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConvergenceFailure);
    }
}
