#include "ddmet/ddcond.hpp"

#include "ddmet/error.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace ddmet::ddcond {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::string_view to_string(Clause c) noexcept {
    switch (c) {
    case Clause::Nontriviality: return "nontriviality";
    case Clause::Orthogonality: return "orthogonality";
    case Clause::ConstantDiagonal: return "constant_diagonal";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Channels

void MixedUnitaryChannel::validate() const {
    if (weights.empty() || weights.size() != unitaries.size()) {
        throw Error(ErrorKind::NotAChannel, "weights and unitaries must be non-empty and paired");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorKind::NotAChannel, "weights must be finite and >= 0");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "weights sum to " << sum;
        throw Error(ErrorKind::NotAChannel, os.str());
    }
    const std::size_t d = unitaries.front().dim();
    for (const auto& u : unitaries) {
        if (u.dim() != d || d == 0) throw Error(ErrorKind::NotAChannel, "unitary dimensions differ");
        const double res = unitarity_residual(u);
        if (res > 1e-10) {
            std::ostringstream os;
            os << "||U^dagger U - 1||_max = " << res;
            throw Error(ErrorKind::NotAChannel, os.str());
        }
    }
}

std::size_t MixedUnitaryChannel::dim() const {
    return unitaries.empty() ? 0 : unitaries.front().dim();
}

ComplexMatrix MixedUnitaryChannel::apply(const ComplexMatrix& a) const {
    if (a.dim() != dim()) throw Error(ErrorKind::DimensionMismatch, "operator vs channel dimension");
    ComplexMatrix out(a.dim());
    for (std::size_t k = 0; k < unitaries.size(); ++k) {
        out += weights[k] * conjugate(unitaries[k], a);
    }
    return out;
}

ComplexMatrix MixedUnitaryChannel::apply_to_system(const ComplexMatrix& a, std::size_t dim_e) const {
    if (a.dim() != dim() * dim_e) {
        throw Error(ErrorKind::DimensionMismatch, "operator vs channel x environment dimension");
    }
    const ComplexMatrix id_e = ComplexMatrix::identity(dim_e);
    ComplexMatrix out(a.dim());
    for (std::size_t k = 0; k < unitaries.size(); ++k) {
        out += weights[k] * conjugate(kron(unitaries[k], id_e), a);
    }
    return out;
}

MixedUnitaryChannel MixedUnitaryChannel::identity(std::size_t dim) {
    return MixedUnitaryChannel{{1.0}, {ComplexMatrix::identity(dim)}};
}

// ---------------------------------------------------------------------------
// Contractions and blocks

namespace {

void check_dims(const ComplexMatrix& h_se, std::size_t dim_s, std::size_t dim_e) {
    if (dim_s == 0 || dim_e == 0 || h_se.dim() != dim_s * dim_e) {
        throw Error(ErrorKind::DimensionMismatch, "H_SE dimension must equal dimS * dimE");
    }
}

/// <u| x 1 . H . |v> x 1 as a dimE x dimE operator.
ComplexMatrix system_block(const ComplexMatrix& h, std::span<const Complex> u,
                           std::span<const Complex> v, std::size_t dim_s, std::size_t dim_e) {
    ComplexMatrix out(dim_e);
    for (std::size_t s = 0; s < dim_s; ++s) {
        const Complex us = std::conj(u[s]);
        if (us == 0.0) continue;
        for (std::size_t s2 = 0; s2 < dim_s; ++s2) {
            const Complex coef = us * v[s2];
            if (coef == 0.0) continue;
            for (std::size_t a = 0; a < dim_e; ++a) {
                for (std::size_t b = 0; b < dim_e; ++b) {
                    out(a, b) += coef * h(s * dim_e + a, s2 * dim_e + b);
                }
            }
        }
    }
    return out;
}

/// Tr_S{(A x 1) H} as a dimE x dimE operator.
ComplexMatrix trace_system_weighted(const ComplexMatrix& a, const ComplexMatrix& h,
                                    std::size_t dim_s, std::size_t dim_e) {
    ComplexMatrix out(dim_e);
    for (std::size_t i = 0; i < dim_s; ++i) {
        for (std::size_t j = 0; j < dim_s; ++j) {
            const Complex aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t x = 0; x < dim_e; ++x) {
                for (std::size_t y = 0; y < dim_e; ++y) {
                    out(x, y) += aij * h(j * dim_e + x, i * dim_e + y);
                }
            }
        }
    }
    return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    ComplexMatrix out = m + m.adjoint();
    out *= 0.5;
    return out;
}

/// Largest |eigenvalue| of a Hermitian operator and its eigenvector.
std::pair<double, ComplexVector> spectral_radius(const ComplexMatrix& m) {
    const EigenSystem es = eig_hermitian(hermitian_part(m));
    const double lo = std::abs(es.values.front());
    const double hi = std::abs(es.values.back());
    return lo > hi ? std::pair{lo, es.vectors.front()} : std::pair{hi, es.vectors.back()};
}

ComplexMatrix centered(const ComplexMatrix& hs, Complex trace_hs) {
    const double d = static_cast<double>(hs.dim());
    return hs - (trace_hs / d) * ComplexMatrix::identity(hs.dim());
}

double orthogonality_value(const ComplexMatrix& hs_centered, const ComplexMatrix& contraction) {
    Complex acc = 0.0;
    const std::size_t d = hs_centered.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) acc += hs_centered(i, j) * contraction(j, i);
    }
    return std::abs(acc);
}

double diagonal_spread(const ComplexMatrix& contraction, std::span<const ComplexVector> basis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& v : basis) {
        const ComplexVector mv = contraction * std::span<const Complex>(v);
        const double val = inner(v, mv).real();
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    }
    return basis.empty() ? 0.0 : hi - lo;
}

/// Exact constant-diagonal residual in `basis`: max_{i<j} spectral radius of B_ii - B_jj.
struct DiagExact {
    double residual = 0.0;
    ComplexVector witness;
};

DiagExact diagonal_exact(const ComplexMatrix& hse, std::span<const ComplexVector> basis,
                         std::size_t dim_s, std::size_t dim_e) {
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(basis.size());
    for (const auto& v : basis) blocks.push_back(system_block(hse, v, v, dim_s, dim_e));
    DiagExact out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            auto [r, vec] = spectral_radius(blocks[i] - blocks[j]);
            if (r > out.residual || out.witness.empty()) {
                out.residual = std::max(out.residual, r);
                out.witness = std::move(vec);
            }
        }
    }
    return out;
}

ComplexVector haar_vector(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(dim);
    for (auto& z : v) z = Complex(gauss(rng), gauss(rng));
    const double n = norm(v);
    for (auto& z : v) z /= n;
    return v;
}

/// Haar-random vectors, the computational basis and, for every pair of
/// computational states, the four Pauli-like superpositions (|j> +- |k>)/sqrt2,
/// (|j> +- i|k>)/sqrt2 (all Pauli eigenbases when dimE = 2).
std::vector<ComplexVector> environment_samples(std::size_t dim_e, std::size_t n_haar,
                                               std::mt19937_64& rng) {
    std::vector<ComplexVector> out;
    for (std::size_t k = 0; k < n_haar; ++k) out.push_back(haar_vector(dim_e, rng));
    for (std::size_t j = 0; j < dim_e; ++j) {
        ComplexVector e(dim_e);
        e[j] = 1.0;
        out.push_back(std::move(e));
    }
    const double r = 1.0 / std::numbers::sqrt2;
    for (std::size_t j = 0; j < dim_e; ++j) {
        for (std::size_t k = j + 1; k < dim_e; ++k) {
            for (Complex phase : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
                ComplexVector v(dim_e);
                v[j] = r;
                v[k] = r * phase;
                out.push_back(std::move(v));
            }
        }
    }
    return out;
}

/// Random unitary of size m (Gram-Schmidt on complex Gaussian columns).
std::vector<ComplexVector> random_orthonormal(std::size_t m, std::mt19937_64& rng) {
    std::vector<ComplexVector> cols;
    while (cols.size() < m) {
        ComplexVector v = haar_vector(m, rng);
        for (const auto& c : cols) {
            const Complex proj = inner(c, v);
            for (std::size_t i = 0; i < m; ++i) v[i] -= proj * c[i];
        }
        const double n = norm(v);
        if (n < 1e-8) continue;
        for (auto& z : v) z /= n;
        cols.push_back(std::move(v));
    }
    return cols;
}

std::vector<std::vector<std::size_t>> clusters_of(const std::vector<double>& values, double tol) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current{0};
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] - values[k - 1] <= tol) {
            current.push_back(k);
        } else {
            if (current.size() > 1) out.push_back(current);
            current = {k};
        }
    }
    if (current.size() > 1) out.push_back(current);
    return out;
}

struct Prepared {
    ComplexMatrix hs;        // Phi(H_S)
    ComplexMatrix hse;       // (Phi x 1)(H_SE)
    ComplexMatrix centered;  // Phi(H_S) - Tr(H_S)/d 1
    EigenSystem eig;         // eigen-decomposition of Phi(H_S)
};

Prepared prepare(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                 const MixedUnitaryChannel& channel) {
    if (h_s.dim() != dims.system) throw Error(ErrorKind::DimensionMismatch, "H_S vs dims.system");
    check_dims(h_se, dims.system, dims.environment);
    if (!h_s.is_hermitian(1e-10)) throw Error(ErrorKind::NonHermitian, "H_S");
    if (!h_se.is_hermitian(1e-10)) throw Error(ErrorKind::NonHermitian, "H_SE");
    channel.validate();
    if (channel.dim() != dims.system) {
        throw Error(ErrorKind::DimensionMismatch, "channel acts on a different system dimension");
    }
    Prepared p;
    p.hs = hermitian_part(channel.apply(h_s));
    p.hse = hermitian_part(channel.apply_to_system(h_se, dims.environment));
    p.centered = centered(p.hs, h_s.trace());
    p.eig = eig_hermitian(p.hs);
    return p;
}

ConditionReport check(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                      const MixedUnitaryChannel& channel, const CheckOptions& opts) {
    if (opts.n_env_samples < 20) {
        throw Error(ErrorKind::InvalidArgument, "n_env_samples must be >= 20");
    }
    if (!(opts.tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be > 0");

    const Prepared p = prepare(h_s, h_se, dims, channel);
    const std::size_t ds = dims.system;
    const std::size_t de = dims.environment;
    const double tol = opts.tolerance;

    ConditionReport rep;
    rep.tolerance = tol;

    // (i) nontriviality
    rep.nontrivial_residual = p.centered.frobenius_norm();
    rep.nontrivial_hs = rep.nontrivial_residual > tol;

    // (ii) orthogonality: exact operator test and sampled corroboration
    const ComplexMatrix x_op = trace_system_weighted(p.centered, p.hse, ds, de);
    auto [orth_exact, orth_vec] = spectral_radius(x_op);
    rep.orthogonality_exact_residual = orth_exact;

    // (iii) constant diagonal in the eigenbasis of Phi(H_S)
    const DiagExact diag = diagonal_exact(p.hse, p.eig.vectors, ds, de);
    rep.constant_diag_exact_residual = diag.residual;

    std::mt19937_64 rng(opts.seed);
    const auto samples = environment_samples(de, opts.n_env_samples, rng);
    rep.samples_used = samples.size();
    std::size_t worst_orth = 0;
    std::size_t worst_diag = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const ComplexMatrix c = env_contraction(p.hse, samples[k], ds, de);
        const double o = orthogonality_value(p.centered, c);
        const double s = diagonal_spread(c, p.eig.vectors);
        if (o > rep.orthogonality_residual) {
            rep.orthogonality_residual = o;
            worst_orth = k;
        }
        if (s > rep.constant_diag_residual) {
            rep.constant_diag_residual = s;
            worst_diag = k;
        }
    }

    // Degenerate eigenvalue clusters make the eigenbasis, and with it the
    // diagonal clause, ambiguous.
    const double scale = std::max(1.0, p.hs.max_abs());
    rep.degenerate_clusters = clusters_of(p.eig.values, std::max(tol, 1e-10 * scale));
    const bool diag_pass = std::max(diag.residual, rep.constant_diag_residual) <= tol;
    bool diag_ambiguous = false;
    if (!rep.degenerate_clusters.empty()) {
        if (diag_pass) {
            // Passing is basis independent iff off-diagonal blocks inside each
            // cluster vanish (then every rotation keeps the diagonal constant).
            double offdiag = 0.0;
            for (const auto& cl : rep.degenerate_clusters) {
                for (std::size_t a = 0; a < cl.size(); ++a) {
                    for (std::size_t b = a + 1; b < cl.size(); ++b) {
                        const ComplexMatrix bij = system_block(p.hse, p.eig.vectors[cl[a]],
                                                               p.eig.vectors[cl[b]], ds, de);
                        offdiag = std::max(offdiag, bij.max_abs());
                    }
                }
            }
            diag_ambiguous = offdiag > tol;
        } else {
            // Failing: look for a rotation within the clusters that passes.
            std::mt19937_64 rot_rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
            for (int trial = 0; trial < 16 && !diag_ambiguous; ++trial) {
                std::vector<ComplexVector> basis = p.eig.vectors;
                for (const auto& cl : rep.degenerate_clusters) {
                    const auto rot = random_orthonormal(cl.size(), rot_rng);
                    for (std::size_t a = 0; a < cl.size(); ++a) {
                        ComplexVector v(ds);
                        for (std::size_t b = 0; b < cl.size(); ++b) {
                            for (std::size_t s = 0; s < ds; ++s) {
                                v[s] += rot[a][b] * p.eig.vectors[cl[b]][s];
                            }
                        }
                        basis[cl[a]] = std::move(v);
                    }
                }
                diag_ambiguous = diagonal_exact(p.hse, basis, ds, de).residual <= tol;
            }
        }
    }

    const bool orth_pass = std::max(orth_exact, rep.orthogonality_residual) <= tol;
    if (!rep.nontrivial_hs) {
        rep.verdict = Verdict::Violated;
        rep.witness = Witness{Clause::Nontriviality, {}, rep.nontrivial_residual};
    } else if (!orth_pass) {
        rep.verdict = Verdict::Violated;
        const ComplexVector& psi = orth_exact > tol ? orth_vec : samples[worst_orth];
        rep.witness = Witness{Clause::Orthogonality, psi,
                              orthogonality_value(p.centered, env_contraction(p.hse, psi, ds, de))};
    } else if (diag_ambiguous) {
        rep.verdict = Verdict::Inconclusive;
    } else if (!diag_pass) {
        rep.verdict = Verdict::Violated;
        const ComplexVector& psi = diag.residual > tol ? diag.witness : samples[worst_diag];
        rep.witness = Witness{Clause::ConstantDiagonal, psi,
                              diagonal_spread(env_contraction(p.hse, psi, ds, de), p.eig.vectors)};
    } else {
        rep.verdict = Verdict::Satisfied;
    }

    std::ostringstream note;
    note << "exact operator tests are authoritative; " << rep.samples_used
         << " sampled environment states corroborate";
    if (diag_ambiguous) {
        note << "; a rotation inside a degenerate eigenvalue cluster of Phi(H_S) changes the "
                "constant-diagonal verdict";
    }
    rep.note = note.str();
    return rep;
}

} // namespace

ComplexMatrix env_contraction(const ComplexMatrix& h_se, std::span<const Complex> psi_e,
                              std::size_t dim_s, std::size_t dim_e) {
    check_dims(h_se, dim_s, dim_e);
    if (psi_e.size() != dim_e) throw Error(ErrorKind::DimensionMismatch, "psi_E length vs dimE");
    const double n = norm(psi_e);
    if (std::abs(n - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "||psi_E|| = " << n;
        throw Error(ErrorKind::NotNormalized, os.str());
    }
    ComplexMatrix out(dim_s);
    for (std::size_t i = 0; i < dim_s; ++i) {
        for (std::size_t j = 0; j < dim_s; ++j) {
            Complex acc = 0.0;
            for (std::size_t a = 0; a < dim_e; ++a) {
                const Complex pa = std::conj(psi_e[a]);
                if (pa == 0.0) continue;
                for (std::size_t b = 0; b < dim_e; ++b) {
                    acc += pa * h_se(i * dim_e + a, j * dim_e + b) * psi_e[b];
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

ConditionReport check_corollary(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                                const CheckOptions& opts) {
    return check(h_s, h_se, dims, MixedUnitaryChannel::identity(dims.system), opts);
}

ConditionReport check_theorem(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                              const MixedUnitaryChannel& channel, const CheckOptions& opts) {
    return check(h_s, h_se, dims, channel, opts);
}

double evaluate_witness(const ComplexMatrix& h_s, const ComplexMatrix& h_se, Dims dims,
                        const MixedUnitaryChannel& channel, const Witness& witness) {
    const Prepared p = prepare(h_s, h_se, dims, channel);
    switch (witness.clause) {
    case Clause::Nontriviality:
        return p.centered.frobenius_norm();
    case Clause::Orthogonality:
        return orthogonality_value(
            p.centered, env_contraction(p.hse, witness.psi_e, dims.system, dims.environment));
    case Clause::ConstantDiagonal:
        return diagonal_spread(
            env_contraction(p.hse, witness.psi_e, dims.system, dims.environment), p.eig.vectors);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown clause");
}

// ---------------------------------------------------------------------------
// Construction

namespace {

/// exp(2 pi i k / d), exact at quarter turns.
Complex root_of_unity(std::size_t k, std::size_t d) {
    k %= d;
    if ((4 * k) % d == 0) {
        switch ((4 * k) / d) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        case 3: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d));
}

} // namespace

MixedUnitaryChannel pinching_channel(std::span<const ComplexVector> basis) {
    const std::size_t d = basis.size();
    if (d == 0) throw Error(ErrorKind::NotOrthonormal, "empty basis");
    for (const auto& v : basis) {
        if (v.size() != d) throw Error(ErrorKind::NotOrthonormal, "basis must be complete");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const Complex g = inner(basis[i], basis[j]);
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    if (worst > 1e-10) {
        std::ostringstream os;
        os << "max |<b_i|b_j> - delta_ij| = " << worst;
        throw Error(ErrorKind::NotOrthonormal, os.str());
    }

    std::vector<ComplexMatrix> projectors;
    projectors.reserve(d);
    for (const auto& v : basis) projectors.push_back(ComplexMatrix::outer(v, v));

    MixedUnitaryChannel ch;
    ch.weights.assign(d, 1.0 / static_cast<double>(d));
    for (std::size_t m = 0; m < d; ++m) {
        ComplexMatrix u(d);
        for (std::size_t j = 0; j < d; ++j) u += root_of_unity(j * m, d) * projectors[j];
        ch.unitaries.push_back(std::move(u));
    }
    return ch;
}

std::vector<std::size_t> rounded_counts(const MixedUnitaryChannel& channel, std::size_t n) {
    channel.validate();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be positive");
    const std::size_t m = channel.weights.size();
    if (n < m) throw Error(ErrorKind::InfeasibleRounding, "n is smaller than the number of unitaries");

    std::vector<std::size_t> counts(m);
    std::vector<double> remainder(m);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double target = channel.weights[j] * static_cast<double>(n);
        counts[j] = static_cast<std::size_t>(std::floor(target));
        remainder[j] = target - static_cast<double>(counts[j]);
        assigned += counts[j];
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % m]];

    for (std::size_t j = 0; j < m; ++j) {
        if (counts[j] == 0) {
            std::ostringstream os;
            os << "weight " << channel.weights[j] << " x n = " << n << " rounds to 0";
            throw Error(ErrorKind::InfeasibleRounding, os.str());
        }
    }
    return counts;
}

std::vector<ComplexMatrix> discretize_channel(const MixedUnitaryChannel& channel, std::size_t n) {
    const auto counts = rounded_counts(channel, n);
    std::vector<ComplexMatrix> out;
    out.reserve(n);
    for (std::size_t j = 0; j < counts.size(); ++j) {
        for (std::size_t c = 0; c < counts[j]; ++c) out.push_back(channel.unitaries[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace

std::string to_text(const ConditionReport& r) {
    std::ostringstream os;
    os << "schema = condition_report_v1\n";
    os << "verdict = " << to_string(r.verdict) << '\n';
    os << "tolerance = " << fmt(r.tolerance) << '\n';
    os << "nontrivial_hs = " << (r.nontrivial_hs ? "true" : "false") << '\n';
    os << "nontrivial_residual = " << fmt(r.nontrivial_residual) << '\n';
    os << "orthogonality_residual = " << fmt(r.orthogonality_residual) << '\n';
    os << "orthogonality_exact_residual = " << fmt(r.orthogonality_exact_residual) << '\n';
    os << "constant_diag_residual = " << fmt(r.constant_diag_residual) << '\n';
    os << "constant_diag_exact_residual = " << fmt(r.constant_diag_exact_residual) << '\n';
    os << "samples_used = " << r.samples_used << '\n';
    os << "degenerate_clusters = ";
    for (std::size_t c = 0; c < r.degenerate_clusters.size(); ++c) {
        if (c) os << ';';
        for (std::size_t k = 0; k < r.degenerate_clusters[c].size(); ++k) {
            if (k) os << ',';
            os << r.degenerate_clusters[c][k];
        }
    }
    os << '\n';
    if (r.witness) {
        os << "witness.clause = " << to_string(r.witness->clause) << '\n';
        os << "witness.residual = " << fmt(r.witness->residual) << '\n';
        os << "witness.psi_e = ";
        for (std::size_t k = 0; k < r.witness->psi_e.size(); ++k) {
            if (k) os << ';';
            os << fmt(r.witness->psi_e[k].real()) << ',' << fmt(r.witness->psi_e[k].imag());
        }
        os << '\n';
    }
    os << "note = " << r.note << '\n';
    return os.str();
}

} // namespace ddmet::ddcond
