#pragma once

// Shared fixtures for the unit and acceptance tests: a seeded corpus of weight-balanced
// graphs and independent oracles (Eigen for spectra, brute-force scans for set membership).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcons/graph.hpp"
#include "qcons/quantizer.hpp"

namespace qcons::test {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline double dyadic_weight(Rng& rng) {
    static constexpr double kWeights[] = {0.5, 1.0, 1.5, 2.0};
    return kWeights[rng.index(4)];
}

/// Directed Hamiltonian cycle plus random extra cycles; dyadic weights keep the
/// in/out degree sums exact, so the result is weight-balanced bit for bit.
inline WeightedDigraph random_balanced_digraph(Rng& rng, std::size_t n) {
    Matrix a(n, n);
    auto add_cycle = [&](std::vector<std::size_t> nodes) {
        const double w = dyadic_weight(rng);
        for (std::size_t k = 0; k < nodes.size(); ++k)
            a(nodes[(k + 1) % nodes.size()], nodes[k]) += w;
    };
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    add_cycle(perm);
    const std::size_t extra = rng.index(n + 1);
    for (std::size_t c = 0; c < extra; ++c) {
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        const std::size_t len = 2 + rng.index(n - 1);
        add_cycle(std::vector<std::size_t>(perm.begin(), perm.begin() + len));
    }
    return WeightedDigraph(std::move(a));
}

/// Random spanning tree plus random extra undirected edges.
inline WeightedDigraph random_symmetric_graph(Rng& rng, std::size_t n) {
    Matrix a(n, n);
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t parent = rng.index(i);
        a(i, parent) = a(parent, i) = dyadic_weight(rng);
    }
    const std::size_t extra = rng.index(n + 1);
    for (std::size_t e = 0; e < extra; ++e) {
        const std::size_t i = rng.index(n), j = rng.index(n);
        if (i == j) continue;
        a(i, j) = a(j, i) = dyadic_weight(rng);
    }
    return WeightedDigraph(std::move(a));
}

struct CorpusEntry {
    std::string label;
    WeightedDigraph graph;
};

/// Deterministic fuzz corpus of weight-balanced, weakly connected graphs with n <= max_n.
inline std::vector<CorpusEntry> balanced_corpus(std::size_t count, std::uint64_t seed,
                                                std::size_t max_n = 20) {
    Rng rng(seed);
    std::vector<CorpusEntry> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t n = 2 + rng.index(max_n - 1);
        const bool symmetric = k % 2 == 1;
        out.push_back({(symmetric ? "sym" : "dig") + std::to_string(k) + "_n" + std::to_string(n),
                       symmetric ? random_symmetric_graph(rng, n) : random_balanced_digraph(rng, n)});
    }
    return out;
}

inline std::vector<CorpusEntry> symmetric_corpus(std::size_t count, std::uint64_t seed,
                                                 std::size_t max_n = 15) {
    Rng rng(seed);
    std::vector<CorpusEntry> out;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t n = 2 + rng.index(max_n - 1);
        out.push_back({"sym" + std::to_string(k) + "_n" + std::to_string(n),
                       random_symmetric_graph(rng, n)});
    }
    return out;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

struct OracleSpectra {
    double lambda2 = 0.0;
    double norm_L = 0.0;
    double norm_inf = 0.0;
};

inline OracleSpectra oracle_spectra(const WeightedDigraph& g) {
    const Eigen::MatrixXd L = to_eigen(g.laplacian().L);
    const Eigen::MatrixXd sym = 0.5 * (L + L.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
    OracleSpectra s;
    s.lambda2 = eig.eigenvalues()(1);
    s.norm_L = svd.singularValues()(0);
    s.norm_inf = L.cwiseAbs().rowwise().sum().maxCoeff();
    return s;
}

/// Laplacian quadratic form oracle x^T Sym(L) x.
inline double quadratic_form(const WeightedDigraph& g, const std::vector<double>& x) {
    const Eigen::MatrixXd L = to_eigen(g.laplacian().L);
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return v.dot(L * v);
}

/// Membership in the union of cubes [(k-1/2)D, (k+1/2)D]^n by scanning a wide k range.
inline bool brute_in_closure(const std::vector<double>& x, double delta) {
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    for (auto k = static_cast<std::int64_t>(std::floor(lo / delta)) - 3;
         k <= static_cast<std::int64_t>(std::ceil(hi / delta)) + 3; ++k) {
        const double c = static_cast<double>(k) * delta;
        bool inside = true;
        for (double v : x) inside = inside && v >= c - delta / 2 && v <= c + delta / 2;
        if (inside) return true;
    }
    return false;
}

inline double brute_dist_to_closure(const std::vector<double>& x, double delta) {
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    double best = INFINITY;
    for (auto k = static_cast<std::int64_t>(std::floor(lo / delta)) - 3;
         k <= static_cast<std::int64_t>(std::ceil(hi / delta)) + 3; ++k) {
        const double c = static_cast<double>(k) * delta;
        double s = 0.0;
        for (double v : x) {
            const double d = std::max({0.0, (c - delta / 2) - v, v - (c + delta / 2)});
            s += d * d;
        }
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

/// Direct restatement of the hybrid equilibrium sets: one common level k (in half-quanta)
/// and every x_i strictly between the band edges (k-1) delta/2 and (k+1) delta/2.
inline bool brute_hybrid_equilibrium(const std::vector<double>& x, const std::vector<std::int64_t>& k,
                                     double delta) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (k[i] != k[0]) return false;
        const double lo = static_cast<double>(k[i] - 1) * (delta / 2);
        const double hi = static_cast<double>(k[i] + 1) * (delta / 2);
        if (!(x[i] > lo && x[i] < hi)) return false;
    }
    return true;
}

inline double mean(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace qcons::test
