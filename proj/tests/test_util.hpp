#pragma once

#include "ddmet/opalg.hpp"

#include <cmath>
#include <random>

namespace ddmet::testing {

inline ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix a(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        a(i, i) = g(rng);
        for (std::size_t j = i + 1; j < dim; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

inline ComplexVector random_state(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVector v(dim);
    for (auto& z : v) z = Complex(g(rng), g(rng));
    const double n = norm(v);
    for (auto& z : v) z /= n;
    return v;
}

/// Random full-rank density matrix: A A^dagger / Tr.
inline ComplexMatrix random_density(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix a(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    ComplexMatrix rho = a * a.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

inline ComplexVector ket(std::size_t dim, std::size_t k) {
    ComplexVector v(dim);
    v[k] = 1.0;
    return v;
}

} // namespace ddmet::testing
