#include "qcons/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "qcons/errors.hpp"

namespace qcons {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

std::vector<double> Matrix::operator*(std::span<const double> v) const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

WeightedDigraph::WeightedDigraph(Matrix adjacency, std::vector<Point2> coords)
    : adjacency_(std::move(adjacency)), coords_(std::move(coords)) {
    const std::size_t n = adjacency_.rows();
    if (n == 0 || adjacency_.cols() != n)
        throw Error(Errc::NonSquare, "adjacency must be a nonempty square matrix");
    if (!coords_.empty() && coords_.size() != n)
        throw Error(Errc::InvalidArgument, "coords length does not match node count");

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = adjacency_(i, j);
            if (!std::isfinite(a))
                throw Error(Errc::NonFinite, "non-finite weight at (" + std::to_string(i) + ", " +
                                                 std::to_string(j) + ")");
            if (a < 0.0)
                throw Error(Errc::NegativeWeight, "negative weight at (" + std::to_string(i) +
                                                      ", " + std::to_string(j) + ")");
        }
        if (adjacency_(i, i) != 0.0)
            throw Error(Errc::SelfLoop, "self-loop at node " + std::to_string(i));
    }

    laplacian_.in_degree.assign(n, 0.0);
    laplacian_.out_degree.assign(n, 0.0);
    in_neighbors_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double a = adjacency_(i, j);
            if (a == 0.0) continue;
            laplacian_.in_degree[i] += a;
            laplacian_.out_degree[j] += a;
            in_neighbors_[i].push_back(j);
        }

    laplacian_.L = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) laplacian_.L(i, j) = -adjacency_(i, j);
        laplacian_.L(i, i) = laplacian_.in_degree[i];
        norm_inf_ = std::max(norm_inf_, 2.0 * laplacian_.in_degree[i]);
    }
}

WeightedDigraph build_graph(const std::vector<std::vector<double>>& adjacency) {
    const std::size_t n = adjacency.size();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i].size() != n)
            throw Error(Errc::NonSquare, "row " + std::to_string(i) + " has " +
                                             std::to_string(adjacency[i].size()) +
                                             " entries, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) a(i, j) = adjacency[i][j];
    }
    return WeightedDigraph(std::move(a));
}

bool is_weight_balanced(const WeightedDigraph& g) {
    const auto& lap = g.laplacian();
    return lap.in_degree == lap.out_degree;
}

bool is_symmetric(const WeightedDigraph& g) {
    const auto& a = g.adjacency();
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            if (a(i, j) != a(j, i)) return false;
    return true;
}

namespace {

// Nodes reachable from `start`, following edges forward, backward, or both.
std::vector<bool> reachable(const WeightedDigraph& g, std::size_t start, bool forward,
                            bool backward) {
    const std::size_t n = g.size();
    const auto& a = g.adjacency();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v) {
            if (seen[v]) continue;
            // edge (u, v) exists iff A(v, u) > 0
            const bool fwd = forward && a(v, u) > 0.0;
            const bool bwd = backward && a(u, v) > 0.0;
            if (fwd || bwd) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

bool all_true(const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

bool is_weakly_connected(const WeightedDigraph& g) {
    return all_true(reachable(g, 0, true, true));
}

bool is_strongly_connected(const WeightedDigraph& g) {
    return all_true(reachable(g, 0, true, false)) && all_true(reachable(g, 0, false, true));
}

std::vector<double> symmetric_eigenvalues(const Matrix& symmetric) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) throw Error(Errc::NonSquare, "eigenvalues need a square matrix");
    Matrix a = symmetric;

    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
    frob = std::sqrt(frob);

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * frob || off == 0.0) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

SpectralData spectral_data(const WeightedDigraph& g) {
    if (!is_weight_balanced(g)) throw Error(Errc::NotBalanced, "graph is not weight-balanced");
    if (!is_weakly_connected(g)) throw Error(Errc::NotConnected, "graph is not weakly connected");

    const Matrix& L = g.laplacian().L;
    const std::size_t n = g.size();
    SpectralData out;
    out.norm_L_inf = g.laplacian_inf_norm();
    if (n == 1) return out;

    Matrix sym(n, n);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (L(i, j) + L(j, i));
        trace += sym(i, i);
    }
    const auto eig = symmetric_eigenvalues(sym);
    const double cutoff = 1e-9 * trace;
    const auto it = std::find_if(eig.begin(), eig.end(), [&](double v) { return v > cutoff; });
    out.lambda2_sym = it == eig.end() ? 0.0 : *it;

    const auto gram = symmetric_eigenvalues(L.transpose() * L);
    out.norm_L_spectral = std::sqrt(std::max(0.0, gram.back()));
    return out;
}

WeightedDigraph gen_directed_ring(std::size_t n) {
    if (n < 2) throw Error(Errc::InvalidArgument, "directed ring needs n >= 2");
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, (i + 1) % n) = 1.0;
    return WeightedDigraph(std::move(a));
}

WeightedDigraph gen_random_geometric(std::size_t n, double radius, std::uint64_t seed,
                                     int max_attempts) {
    if (n < 1) throw Error(Errc::InvalidArgument, "random geometric graph needs n >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw Error(Errc::InvalidArgument, "radius must be positive and finite");

    std::mt19937_64 rng(seed);
    // 53 high bits -> [0, 1); independent of the standard library's distributions.
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Point2> pts(n);
        for (auto& p : pts) {
            p.x = unit();
            p.y = unit();
        }
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) <= radius) {
                    a(i, j) = 1.0;
                    a(j, i) = 1.0;
                }
            }
        WeightedDigraph g(std::move(a), std::move(pts));
        if (is_weakly_connected(g)) return g;
    }
    throw Error(Errc::DisconnectedAfterMaxAttempts,
                "no connected draw in " + std::to_string(max_attempts) + " attempts");
}

nlohmann::json graph_to_json(const WeightedDigraph& g) {
    nlohmann::json j;
    j["n"] = g.size();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto r = g.adjacency().row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["adjacency"] = std::move(rows);
    if (!g.coords().empty()) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : g.coords()) pts.push_back({p.x, p.y});
        j["coords"] = std::move(pts);
    }
    return j;
}

WeightedDigraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("adjacency"))
        throw Error(Errc::InvalidArgument, "graph JSON needs an \"adjacency\" field");
    const auto rows = j.at("adjacency").get<std::vector<std::vector<double>>>();
    if (j.contains("n") && j.at("n").get<std::size_t>() != rows.size())
        throw Error(Errc::NonSquare, "\"n\" does not match adjacency size");
    std::vector<Point2> coords;
    if (j.contains("coords")) {
        for (const auto& p : j.at("coords")) {
            if (!p.is_array() || p.size() != 2)
                throw Error(Errc::InvalidArgument, "coords entries must be [x, y]");
            coords.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    WeightedDigraph plain = build_graph(rows);
    if (coords.empty()) return plain;
    return WeightedDigraph(plain.adjacency(), std::move(coords));
}

}  // namespace qcons
