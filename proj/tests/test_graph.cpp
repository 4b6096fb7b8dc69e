#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qcons/errors.hpp"
#include "qcons/graph.hpp"
#include "support.hpp"

using namespace qcons;
using qcons::test::Rng;

namespace {

WeightedDigraph path3() { return build_graph({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}); }

void expect_error(Errc code, const auto& fn) {
    try {
        fn();
        FAIL() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

}  // namespace

TEST(BuildGraph, PathLaplacian) {
    const auto g = path3();
    Matrix expected(3, 3);
    const double rows[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) expected(i, j) = rows[i][j];
    EXPECT_EQ(g.laplacian().L, expected);
    EXPECT_EQ(g.laplacian().in_degree, (std::vector<double>{1, 2, 1}));
    EXPECT_EQ(g.laplacian().out_degree, (std::vector<double>{1, 2, 1}));
    EXPECT_EQ(g.laplacian_inf_norm(), 4.0);
}

TEST(BuildGraph, EmptyEdgeSet) {
    const auto g = build_graph({{0, 0}, {0, 0}});
    EXPECT_EQ(g.laplacian().L, Matrix(2, 2));
    EXPECT_EQ(g.laplacian_inf_norm(), 0.0);
}

TEST(BuildGraph, Rejections) {
    expect_error(Errc::SelfLoop, [] { build_graph({{1, 0}, {0, 0}}); });
    expect_error(Errc::NegativeWeight, [] { build_graph({{0, -1}, {1, 0}}); });
    expect_error(Errc::NonSquare, [] { build_graph({{0, 1, 0}, {1, 0}}); });
    expect_error(Errc::NonFinite, [] { build_graph({{0, NAN}, {1, 0}}); });
}

TEST(BuildGraph, InNeighbors) {
    const auto g = build_graph({{0, 1, 1}, {0, 0, 0}, {1, 0, 0}});
    EXPECT_EQ(std::vector<std::size_t>(g.in_neighbors(0).begin(), g.in_neighbors(0).end()),
              (std::vector<std::size_t>{1, 2}));
    EXPECT_TRUE(g.in_neighbors(1).empty());
}

TEST(Predicates, Balance) {
    EXPECT_TRUE(is_weight_balanced(gen_directed_ring(5)));
    EXPECT_TRUE(is_weight_balanced(path3()));
    EXPECT_FALSE(is_weight_balanced(build_graph({{0, 1}, {0, 0}})));
}

TEST(Predicates, Connectivity) {
    EXPECT_TRUE(is_weakly_connected(path3()));
    EXPECT_TRUE(is_strongly_connected(path3()));
    const auto one_way = build_graph({{0, 1}, {0, 0}});
    EXPECT_TRUE(is_weakly_connected(one_way));
    EXPECT_FALSE(is_strongly_connected(one_way));
    const auto isolated = build_graph({{0, 0}, {0, 0}});
    EXPECT_FALSE(is_weakly_connected(isolated));
    EXPECT_FALSE(is_strongly_connected(isolated));
}

TEST(Spectral, Path3) {
    const auto s = spectral_data(path3());
    EXPECT_NEAR(s.lambda2_sym, 1.0, 1e-12);
    EXPECT_NEAR(s.norm_L_spectral, 3.0, 1e-12);
    EXPECT_EQ(s.norm_L_inf, 4.0);
}

TEST(Spectral, Ring4) {
    EXPECT_NEAR(spectral_data(gen_directed_ring(4)).lambda2_sym, 1.0, 1e-12);
}

TEST(Spectral, Pair) {
    const auto s = spectral_data(build_graph({{0, 1}, {1, 0}}));
    EXPECT_NEAR(s.lambda2_sym, 2.0, 1e-12);
    EXPECT_NEAR(s.norm_L_spectral, 2.0, 1e-12);
    EXPECT_EQ(s.norm_L_inf, 2.0);
}

TEST(Spectral, RingClosedForm) {
    for (std::size_t n : {3u, 5u, 10u, 17u}) {
        const double expected = 1.0 - std::cos(2.0 * std::numbers::pi / static_cast<double>(n));
        EXPECT_NEAR(spectral_data(gen_directed_ring(n)).lambda2_sym, expected, 1e-10) << n;
    }
}

TEST(Spectral, Rejections) {
    expect_error(Errc::NotBalanced, [] { spectral_data(build_graph({{0, 1}, {0, 0}})); });
    expect_error(Errc::NotConnected, [] { spectral_data(build_graph({{0, 0}, {0, 0}})); });
}

TEST(Spectral, EigenvaluesAscending) {
    Matrix m(3, 3);
    m(0, 0) = 2; m(1, 1) = -1; m(2, 2) = 5; m(0, 1) = m(1, 0) = 0.5;
    const auto ev = symmetric_eigenvalues(m);
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
    EXPECT_NEAR(ev[0] + ev[1] + ev[2], 6.0, 1e-12);
    EXPECT_NEAR(ev[2], 5.0, 1e-12);
}

TEST(Spectral, AgreesWithOracleOnCorpus) {
    for (const auto& [label, g] : test::balanced_corpus(60, 11, 12)) {
        const auto s = spectral_data(g);
        const auto o = test::oracle_spectra(g);
        EXPECT_NEAR(s.lambda2_sym, o.lambda2, 1e-8) << label;
        EXPECT_NEAR(s.norm_L_spectral, o.norm_L, 1e-8) << label;
        EXPECT_EQ(s.norm_L_inf, o.norm_inf) << label;
    }
}

TEST(Properties, RowSumsVanishAndBalancedColumnsVanish) {
    for (const auto& [label, g] : test::balanced_corpus(40, 12)) {
        const auto& L = g.laplacian().L;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double row = 0.0, col = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                row += L(i, j);
                col += L(j, i);
            }
            EXPECT_EQ(row, 0.0) << label;
            EXPECT_LE(std::abs(col), 1e-12 * g.laplacian_inf_norm()) << label;
        }
    }
}

TEST(Properties, SymmetricLaplacianLowerBound) {
    Rng rng(13);
    for (const auto& [label, g] : test::balanced_corpus(20, 14)) {
        const double lambda2 = spectral_data(g).lambda2_sym;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> x(g.size());
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            const double m = test::mean(x);
            double proj = 0.0;
            for (double v : x) proj += (v - m) * (v - m);
            const double lhs = test::quadratic_form(g, x);
            EXPECT_GE(lhs, lambda2 * proj - 1e-9 * std::max(1.0, std::abs(lhs))) << label;
        }
    }
}

TEST(Generators, Ring) {
    const auto g = gen_directed_ring(3);
    EXPECT_EQ(g.weight(0, 1), 1.0);
    EXPECT_EQ(g.weight(1, 2), 1.0);
    EXPECT_EQ(g.weight(2, 0), 1.0);
    EXPECT_EQ(g.weight(1, 0), 0.0);
    const auto pair = gen_directed_ring(2);
    EXPECT_EQ(pair.weight(0, 1), 1.0);
    EXPECT_EQ(pair.weight(1, 0), 1.0);
    for (std::size_t n = 2; n <= 30; ++n) {
        const auto r = gen_directed_ring(n);
        EXPECT_TRUE(is_weight_balanced(r));
        EXPECT_TRUE(is_strongly_connected(r));
    }
    expect_error(Errc::InvalidArgument, [] { gen_directed_ring(1); });
}

TEST(Generators, RandomGeometric) {
    const auto a = gen_random_geometric(10, 0.2, 3);
    const auto b = gen_random_geometric(10, 0.2, 3);
    EXPECT_EQ(a.adjacency(), b.adjacency());
    EXPECT_EQ(a.coords(), b.coords());
    EXPECT_TRUE(is_symmetric(a));
    EXPECT_TRUE(is_weakly_connected(a));
    ASSERT_EQ(a.coords().size(), 10u);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) {
            if (i == j) continue;
            const double d = std::hypot(a.coords()[i].x - a.coords()[j].x,
                                        a.coords()[i].y - a.coords()[j].y);
            EXPECT_EQ(a.weight(i, j) > 0.0, d <= 0.2);
        }

    EXPECT_EQ(gen_random_geometric(1, 0.2, 0).size(), 1u);
    const auto full = gen_random_geometric(8, 2.0, 5);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(full.weight(i, j), i == j ? 0.0 : 1.0);

    expect_error(Errc::DisconnectedAfterMaxAttempts, [] { gen_random_geometric(30, 0.01, 1, 5); });
    expect_error(Errc::InvalidArgument, [] { gen_random_geometric(5, 0.0, 1); });
}

TEST(Json, RoundTrip) {
    const auto g = gen_random_geometric(10, 0.2, 3);
    const auto back = graph_from_json(nlohmann::json::parse(graph_to_json(g).dump()));
    EXPECT_EQ(back.adjacency(), g.adjacency());
    ASSERT_EQ(back.coords().size(), g.coords().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(back.coords()[i].x, g.coords()[i].x, 1e-15);
        EXPECT_NEAR(back.coords()[i].y, g.coords()[i].y, 1e-15);
    }
    const auto j = graph_to_json(path3());
    EXPECT_EQ(j.at("n"), 3);
    EXPECT_FALSE(j.contains("coords"));
}
