#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "spc/smoothness.hpp"
#include "test_support.hpp"

using namespace spc;
using namespace testutil;

TEST_CASE("chain apply") {
    const SmoothnessOperator op = SmoothnessOperator::chain(3);
    CHECK(op.rows() == 2);

    const std::vector<double> diff = op.apply(std::vector<double>{0.0, 1.0, 2.0});
    CHECK(diff[0] == -1.0);
    CHECK(diff[1] == -1.0);

    const std::vector<double> flat = op.apply(std::vector<double>{4.5, 4.5, 4.5});
    CHECK(flat[0] == 0.0);
    CHECK(flat[1] == 0.0);

    CHECK_THROWS_AS(op.apply(std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SmoothnessOperator::chain(1), std::invalid_argument);
}

TEST_CASE("stacked grid apply enumerates vertical then horizontal differences") {
    // 2x2 grid stored row-index fastest: [a, b, c, d] is [[a, c], [b, d]]
    const SmoothnessOperator op = SmoothnessOperator::stacked_grid(2, 2);
    CHECK(op.rows() == 4);

    const double a = 1.0, b = 2.0, c = 4.0, d = 8.0;
    const std::vector<double> diff = op.apply(std::vector<double>{a, b, c, d});
    CHECK(diff[0] == a - b);
    CHECK(diff[1] == c - d);
    CHECK(diff[2] == a - c);
    CHECK(diff[3] == b - d);

    // matches the dense enumeration of the stacked operator
    const auto rows = dense_operator(op);
    const std::vector<double> want = dense_apply(rows, std::vector<double>{a, b, c, d});
    for (std::size_t i = 0; i < 4; ++i) CHECK(diff[i] == want[i]);
}

TEST_CASE("apply_transpose is the adjoint") {
    SUBCASE("chain row transpose") {
        const SmoothnessOperator op = SmoothnessOperator::chain(3);
        const std::vector<double> out = op.apply_transpose(std::vector<double>{1.0, 0.0});
        CHECK(out[0] == 1.0);
        CHECK(out[1] == -1.0);
        CHECK(out[2] == 0.0);
    }

    SUBCASE("adjoint identity on random vectors") {
        std::mt19937_64 rng(31);
        for (const SmoothnessOperator& op :
             {SmoothnessOperator::chain(7), SmoothnessOperator::stacked_grid(3, 4),
              SmoothnessOperator::stacked_grid(1, 5)}) {
            for (int trial = 0; trial < 20; ++trial) {
                const std::vector<double> u = random_vector(op.input_size(), rng);
                const std::vector<double> w = random_vector(op.rows(), rng);
                const double lhs = dot(op.apply(u), w);
                const double rhs = dot(u, op.apply_transpose(w));
                CHECK(rel_err(lhs, rhs) < 1e-12);
            }
        }
    }

    SUBCASE("disabled operator maps to zero") {
        const SmoothnessOperator op = SmoothnessOperator::disabled(4);
        CHECK(op.rows() == 0);
        const std::vector<double> out = op.apply_transpose(std::vector<double>{});
        REQUIRE(out.size() == 4);
        for (double x : out) CHECK(x == 0.0);
    }
}

TEST_CASE("sgn") {
    const std::vector<double> s = sgn_vec(std::vector<double>{2.5, 0.0, -0.1});
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == -1.0);

    std::mt19937_64 rng(32);
    const std::vector<double> x = random_vector(15, rng);
    std::vector<double> neg(x);
    for (double& v : neg) v = -v;
    const std::vector<double> sx = sgn_vec(x);
    const std::vector<double> sn = sgn_vec(neg);
    double l1 = 0.0, via_sgn = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(sn[i] == -sx[i]);
        l1 += std::abs(x[i]);
        via_sgn += sx[i] * x[i];
    }
    CHECK(rel_err(via_sgn, l1) < 1e-12);
}

TEST_CASE("penalty") {
    const SmoothnessOperator op = SmoothnessOperator::chain(2);
    const std::vector<double> u{0.6, 0.8};
    CHECK(op.penalty(u, 1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(op.penalty(u, 2) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK_THROWS_AS(op.penalty(u, 3), std::invalid_argument);

    SUBCASE("constants are in the nullspace") {
        const SmoothnessOperator chain = SmoothnessOperator::chain(6);
        const std::vector<double> c(6, -2.25);
        CHECK(chain.penalty(c, 1) == 0.0);
        CHECK(chain.penalty(c, 2) == 0.0);
    }

    SUBCASE("matches the dense-matrix oracle on random vectors") {
        std::mt19937_64 rng(33);
        for (const SmoothnessOperator& o :
             {SmoothnessOperator::chain(9), SmoothnessOperator::stacked_grid(3, 4)}) {
            const auto rows = dense_operator(o);
            for (int trial = 0; trial < 20; ++trial) {
                const std::vector<double> v = random_vector(o.input_size(), rng);
                CHECK(rel_err(o.penalty(v, 1), dense_penalty(rows, v, 1)) < 1e-12);
                CHECK(rel_err(o.penalty(v, 2), dense_penalty(rows, v, 2)) < 1e-12);
            }
        }
    }

    SUBCASE("nonnegative, zero only on grid constants") {
        std::mt19937_64 rng(34);
        const SmoothnessOperator grid = SmoothnessOperator::stacked_grid(3, 3);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> v = random_vector(9, rng);
            CHECK(grid.penalty(v, 2) > 0.0);
        }
        CHECK(grid.penalty(std::vector<double>(9, 3.5), 2) == 0.0);
    }
}

TEST_CASE("penalty_subgradient") {
    SUBCASE("p=2 chain example") {
        const SmoothnessOperator op = SmoothnessOperator::chain(3);
        const std::vector<double> g = op.penalty_subgradient(std::vector<double>{1.0, 0.0, 0.0}, 2);
        // 2 L^T L [1,0,0]^T with dense L = [[1,-1,0],[0,1,-1]]
        CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(g[1] == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(g[2] == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("p=2 gradient matches central differences of the penalty") {
        std::mt19937_64 rng(35);
        for (const SmoothnessOperator& op :
             {SmoothnessOperator::chain(8), SmoothnessOperator::stacked_grid(3, 4)}) {
            for (int trial = 0; trial < 20; ++trial) {
                const std::vector<double> u = random_vector(op.input_size(), rng);
                const std::vector<double> grad = op.penalty_subgradient(u, 2);
                const std::vector<double> fd = central_differences(
                    [&](std::span<const double> v) { return op.penalty(v, 2); }, u);
                for (std::size_t i = 0; i < u.size(); ++i) CHECK(rel_err(grad[i], fd[i]) < 1e-6);
            }
        }
    }

    SUBCASE("p=1 subgradient matches central differences away from kinks") {
        std::mt19937_64 rng(36);
        const SmoothnessOperator op = SmoothnessOperator::chain(8);
        int checked = 0;
        while (checked < 20) {
            const std::vector<double> u = random_vector(8, rng);
            bool kink = false;
            for (double d : op.apply(u))
                if (std::abs(d) < 1e-3) kink = true;
            if (kink) continue;
            const std::vector<double> grad = op.penalty_subgradient(u, 1);
            const std::vector<double> fd = central_differences(
                [&](std::span<const double> v) { return op.penalty(v, 1); }, u);
            for (std::size_t i = 0; i < u.size(); ++i) CHECK(rel_err(grad[i], fd[i]) < 1e-6);
            ++checked;
        }
    }

    SUBCASE("p=1 on a constant vector is zero") {
        const SmoothnessOperator op = SmoothnessOperator::chain(5);
        for (double x : op.penalty_subgradient(std::vector<double>(5, 1.25), 1)) CHECK(x == 0.0);
    }
}
