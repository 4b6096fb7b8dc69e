#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "qcons/errors.hpp"
#include "qcons/quantizer.hpp"
#include "qcons/scenario.hpp"
#include "support.hpp"

using namespace qcons;
using qcons::test::Rng;

namespace {

WeightedDigraph path3() { return build_graph({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}); }

Levels levels(std::initializer_list<std::int64_t> ks) {
    Levels q;
    for (auto k : ks) q.push_back(HalfQuantum{k});
    return q;
}

}  // namespace

TEST(UniformQuantize, FloorConvention) {
    const QuantizerSpec unit(1.0);
    EXPECT_EQ(uniform_quantize(0.0, unit), HalfQuantum{0});
    EXPECT_EQ(uniform_quantize(0.5, unit), HalfQuantum{2});
    EXPECT_EQ(uniform_quantize(-0.5, unit), HalfQuantum{0});
    EXPECT_EQ(uniform_quantize(-0.51, unit), HalfQuantum{-2});
    EXPECT_EQ(uniform_quantize(1.49, unit), HalfQuantum{2});
    EXPECT_THROW(uniform_quantize(INFINITY, unit), Error);
    EXPECT_THROW(QuantizerSpec(0.0), Error);
    EXPECT_THROW(QuantizerSpec(-1.0), Error);
}

TEST(UniformQuantize, ErrorBoundedAndOnGrid) {
    Rng rng(21);
    for (int k = 0; k < 20000; ++k) {
        const QuantizerSpec spec(rng.uniform(1e-3, 3.0));
        const double x = rng.uniform(-100.0, 100.0);
        const auto q = uniform_quantize(x, spec);
        EXPECT_TRUE(q.on_uniform_grid());
        EXPECT_LE(std::abs(q.value(spec) - x), spec.half() * (1 + 1e-12));
    }
}

TEST(KrasowskiiBox, InteriorAndBoundary) {
    const QuantizerSpec unit(1.0);
    const std::vector<double> interior{0.2, 0.7};
    const auto b = krasowskii_box(interior, unit);
    EXPECT_EQ(b.components[0], (LevelInterval{HalfQuantum{0}, HalfQuantum{0}}));
    EXPECT_EQ(b.components[1], (LevelInterval{HalfQuantum{2}, HalfQuantum{2}}));
    EXPECT_EQ(b.boundary_count(), 0u);

    const std::vector<double> edge{1.5};
    EXPECT_EQ(krasowskii_box(edge, unit).components[0],
              (LevelInterval{HalfQuantum{2}, HalfQuantum{4}}));

    const std::vector<double> hat{1.0, 1.5, 2.0};
    const auto h = krasowskii_box(hat, unit);
    EXPECT_EQ(h.components[0], (LevelInterval{HalfQuantum{2}, HalfQuantum{2}}));
    EXPECT_EQ(h.components[1], (LevelInterval{HalfQuantum{2}, HalfQuantum{4}}));
    EXPECT_EQ(h.components[2], (LevelInterval{HalfQuantum{4}, HalfQuantum{4}}));
    EXPECT_EQ(h.boundary_count(), 1u);
}

TEST(KrasowskiiBox, BoundaryTolerance) {
    const QuantizerSpec spec(0.05);
    const std::vector<double> near{0.025 + 1e-15};
    EXPECT_EQ(krasowskii_box(near, spec).boundary_count(), 1u);
    const std::vector<double> off{0.025 + 1e-9};
    EXPECT_EQ(krasowskii_box(off, spec).boundary_count(), 0u);
}

TEST(KrasowskiiBox, SingletonAtContinuityPoints) {
    Rng rng(22);
    const QuantizerSpec spec(0.1);
    for (int k = 0; k < 2000; ++k) {
        std::vector<double> x(4);
        for (auto& v : x) v = rng.uniform(-3.0, 3.0);
        const auto b = krasowskii_box(x, spec);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!b.components[i].degenerate()) continue;
            EXPECT_EQ(b.components[i].lo, uniform_quantize(x[i], spec));
        }
    }
}

TEST(VelocityPolytope, ExampleContinued) {
    for (double delta : {1.0, 0.05, 0.25}) {
        const QuantizerSpec spec(delta);
        const std::vector<double> hat{delta, 1.5 * delta, 2 * delta};
        auto poly = krasowskii_velocity_polytope(hat, path3(), spec);
        std::sort(poly.begin(), poly.end());
        const std::vector<std::vector<double>> expected{{0, delta, -delta}, {delta, -delta, 0}};
        EXPECT_EQ(poly, expected) << delta;
    }
}

TEST(VelocityPolytope, ContinuityPointAndEquilibrium) {
    const QuantizerSpec unit(1.0);
    const auto g = path3();
    const std::vector<double> x{0.1, 1.2, 3.3};
    const auto poly = krasowskii_velocity_polytope(x, g, unit);
    ASSERT_EQ(poly.size(), 1u);
    EXPECT_EQ(poly[0], consensus_velocity(g, uniform_quantize(x, unit), unit));

    const std::vector<double> eq{0.9, 1.1, 1.4};
    EXPECT_EQ(krasowskii_velocity_polytope(eq, g, unit),
              (std::vector<std::vector<double>>{{0, 0, 0}}));
}

TEST(VelocityPolytope, VerticesSumToZeroOnBalancedGraphs) {
    Rng rng(23);
    const QuantizerSpec spec(0.5);
    for (const auto& [label, g] : test::balanced_corpus(30, 24, 12)) {
        std::vector<double> x(g.size());
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        for (std::size_t i = 0; i < x.size(); i += 3)
            x[i] = (static_cast<double>(rng.integer(-4, 4)) + 0.5) * spec.delta();
        for (const auto& v : krasowskii_velocity_polytope(x, g, spec)) {
            double s = 0.0;
            for (double c : v) s += c;
            EXPECT_LE(std::abs(s), 1e-12) << label;
        }
    }
}

TEST(VelocityPolytope, TooManyVertices) {
    const std::size_t n = 22;
    const auto g = gen_directed_ring(n);
    const std::vector<double> x(n, 0.5);
    try {
        krasowskii_velocity_polytope(x, g, QuantizerSpec(1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TooManyVertices);
    }
}

TEST(Blocking, ExampleOne) {
    for (double delta : {1.0, 0.05, 0.3}) {
        const QuantizerSpec spec(delta);
        const std::vector<double> hat{delta, 1.5 * delta, 2 * delta};
        const auto r = caratheodory_blocking_test(hat, 1, path3(), spec);
        EXPECT_EQ(r.verdict, BlockingVerdict::Blocking);
        EXPECT_EQ(r.f_plus, -delta);
        EXPECT_EQ(r.f_minus, delta);
    }
}

TEST(Blocking, DegreeTwoNode) {
    // Node 0 hears nodes 1 and 2 at levels delta and 2 delta while sitting at 1.5 delta,
    // so its upper level is 2 delta.
    const auto g = build_graph({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    const QuantizerSpec spec(1.0);
    const std::vector<double> x{1.5, 1.0, 2.0};
    const auto r = caratheodory_blocking_test(x, 0, g, spec);
    EXPECT_EQ(r.f_plus, -1.0);
    EXPECT_EQ(r.f_minus, 1.0);
    EXPECT_EQ(r.verdict, BlockingVerdict::Blocking);
}

TEST(Blocking, SameSignAndTangent) {
    const QuantizerSpec spec(1.0);
    const std::vector<double> up{3.0, 1.5, 3.0};
    const auto same = caratheodory_blocking_test(up, 1, path3(), spec);
    EXPECT_EQ(same.verdict, BlockingVerdict::SameSign);
    EXPECT_GT(same.f_plus, 0.0);
    EXPECT_GT(same.f_minus, 0.0);

    const std::vector<double> level{2.0, 1.5, 2.0};
    const auto tangent = caratheodory_blocking_test(level, 1, path3(), spec);
    EXPECT_EQ(tangent.verdict, BlockingVerdict::Tangent);
    EXPECT_EQ(tangent.f_plus, 0.0);
}

TEST(Blocking, Preconditions) {
    const QuantizerSpec spec(1.0);
    const std::vector<double> off{1.0, 1.2, 2.0};
    const std::vector<double> two{1.5, 1.5, 2.0};
    for (const auto& x : {off, two}) {
        try {
            caratheodory_blocking_test(x, 1, path3(), spec);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::PreconditionViolated);
        }
    }
}

TEST(Hysteresis, Init) {
    const QuantizerSpec unit(1.0);
    const std::vector<double> x{0.2, 0.9};
    EXPECT_EQ(hysteresis_init(x, unit), levels({0, 2}));
    const std::vector<double> edge{0.5};
    EXPECT_EQ(hysteresis_init(edge, unit), levels({2}));

    const QuantizerSpec spec(0.05);
    const std::vector<double> reference(kReferenceInitialState.begin(), kReferenceInitialState.end());
    const auto q = hysteresis_init(reference, spec);
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double expected = std::floor(reference[i] / 0.05 + 0.5) * 0.05;
        EXPECT_NEAR(q[i].value(spec), expected, 1e-15);
        EXPECT_TRUE(q[i].on_uniform_grid());
    }
    EXPECT_NEAR(q[0].value(spec), 0.90, 1e-15);
    EXPECT_NEAR(q[5].value(spec), 0.10, 1e-15);
}

TEST(Hysteresis, JumpExamples) {
    const QuantizerSpec unit(1.0);
    const std::vector<double> x1{0.0, 0.5};
    EXPECT_EQ(hysteresis_jump(x1, levels({0, 2}), unit), levels({0, 1}));

    const std::vector<double> x2{0.5, 0.0};
    EXPECT_EQ(hysteresis_jump(x2, levels({0, 1}), unit), levels({1, 0}));

    const std::vector<double> inside{0.1, 0.9};
    EXPECT_FALSE(in_jump_set(inside, levels({0, 2}), unit));
    try {
        hysteresis_jump(inside, levels({0, 2}), unit);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotInJumpSet);
    }
}

TEST(Hysteresis, JumpStepsAndPostCondition) {
    Rng rng(25);
    const QuantizerSpec spec(0.25);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::size_t n = 1 + rng.index(8);
        Levels q(n);
        std::vector<double> x(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = HalfQuantum{rng.integer(-20, 20)};
            const double c = q[i].value(spec);
            switch (rng.index(4)) {
                case 0: x[i] = c + spec.half(); any = true; break;
                case 1: x[i] = c - spec.half(); any = true; break;
                default: x[i] = c + rng.uniform(-0.99, 0.99) * spec.half();
            }
        }
        if (!any) continue;
        const auto next = hysteresis_jump(x, q, spec);
        for (std::size_t i = 0; i < n; ++i) {
            const auto step = next[i].k - q[i].k;
            EXPECT_TRUE(step == 0 || step == 1 || step == -1);
            const double c = next[i].value(spec);
            EXPECT_FALSE(x[i] > c + spec.half() || x[i] < c - spec.half());
        }
    }
}
