#pragma once

// Weighted directed communication graphs and their Laplacians.
//
// Convention: A(i, j) > 0 iff agent i receives information from agent j,
// i.e. the edge (j, i) exists. Row sums of A are in-degrees, column sums are
// out-degrees, and L = diag(in_degree) - A, so (L x)_i = sum_j A(i,j)(x_i - x_j).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace qcons {

/// Dense row-major matrix. Graphs in this library stay at a few hundred nodes.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Matrix operator*(const Matrix& rhs) const;
    [[nodiscard]] std::vector<double> operator*(std::span<const double> v) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

struct LaplacianData {
    Matrix L;
    std::vector<double> in_degree;
    std::vector<double> out_degree;
};

struct SpectralData {
    double lambda2_sym = 0.0;      ///< smallest nonzero eigenvalue of (L + L^T)/2
    double norm_L_spectral = 0.0;  ///< largest singular value of L
    double norm_L_inf = 0.0;       ///< max absolute row sum of L
};

/// Validated, immutable weighted digraph with cached Laplacian data.
class WeightedDigraph {
public:
    /// Throws Error{NonSquare | NegativeWeight | SelfLoop | NonFinite}.
    explicit WeightedDigraph(Matrix adjacency, std::vector<Point2> coords = {});

    [[nodiscard]] std::size_t size() const noexcept { return adjacency_.rows(); }
    [[nodiscard]] const Matrix& adjacency() const noexcept { return adjacency_; }
    [[nodiscard]] double weight(std::size_t i, std::size_t j) const { return adjacency_(i, j); }
    [[nodiscard]] const LaplacianData& laplacian() const noexcept { return laplacian_; }

    /// In-neighbors N(i) in increasing index order.
    [[nodiscard]] std::span<const std::size_t> in_neighbors(std::size_t i) const {
        return in_neighbors_[i];
    }

    /// Node positions, present for geometric graphs only.
    [[nodiscard]] const std::vector<Point2>& coords() const noexcept { return coords_; }

    /// Max absolute row sum of L, i.e. twice the largest in-degree.
    [[nodiscard]] double laplacian_inf_norm() const noexcept { return norm_inf_; }

private:
    Matrix adjacency_;
    std::vector<Point2> coords_;
    LaplacianData laplacian_;
    std::vector<std::vector<std::size_t>> in_neighbors_;
    double norm_inf_ = 0.0;
};

/// Validates a nested-row adjacency matrix. Errors: NonSquare, NegativeWeight, SelfLoop.
WeightedDigraph build_graph(const std::vector<std::vector<double>>& adjacency);

bool is_weight_balanced(const WeightedDigraph& g);
bool is_weakly_connected(const WeightedDigraph& g);
bool is_strongly_connected(const WeightedDigraph& g);
bool is_symmetric(const WeightedDigraph& g);

/// Requires a weight-balanced, weakly connected graph (NotBalanced / NotConnected otherwise).
SpectralData spectral_data(const WeightedDigraph& g);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& symmetric);

/// N(i) = {i+1 mod n} with unit weights. Requires n >= 2.
WeightedDigraph gen_directed_ring(std::size_t n);

inline constexpr int kRggMaxAttempts = 1000;

/// Random geometric graph on [0,1]^2: unit symmetric edge iff distance <= radius.
/// Redraws from the same seeded stream until connected; throws
/// DisconnectedAfterMaxAttempts once max_attempts draws have failed.
WeightedDigraph gen_random_geometric(std::size_t n, double radius, std::uint64_t seed,
                                     int max_attempts = kRggMaxAttempts);

/// {"n": int, "adjacency": [[...]], "coords": [[x, y], ...] (optional)}
nlohmann::json graph_to_json(const WeightedDigraph& g);
WeightedDigraph graph_from_json(const nlohmann::json& j);

}  // namespace qcons
