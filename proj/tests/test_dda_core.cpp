#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include <dda/consensus.hpp>
#include <dda/dda_core.hpp>
#include <dda/graph.hpp>
#include <dda/quadmax.hpp>
#include <dda/rng.hpp>

using namespace dda;

namespace {

std::vector<Eigen::VectorXd> vectors(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<Eigen::VectorXd> out;
    for (const auto& row : rows) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(row.size()));
        Eigen::Index i = 0;
        for (double x : row) v(i++) = x;
        out.push_back(std::move(v));
    }
    return out;
}

// Reference z-recursion driven directly by the production update rules.
std::vector<std::vector<Eigen::VectorXd>> iterate_z(
    const std::vector<std::vector<Eigen::VectorXd>>& grads, const ConsensusMatrix& p, long h,
    long T) {
    const int n = p.size();
    std::vector<std::vector<Eigen::VectorXd>> z_at(T + 1);
    std::vector<Eigen::VectorXd> z(n, Eigen::VectorXd::Zero(grads[0][0].size()));
    z_at[0] = z;
    for (long t = 1; t <= T; ++t) {
        if (t % h == 0)
            z = consensus_update(z, p, grads[t - 1]);
        else
            for (int i = 0; i < n; ++i) z[i] = local_update(z[i], grads[t - 1][i]);
        z_at[t] = z;
    }
    return z_at;
}

}  // namespace

TEST_CASE("consensus update hand examples") {
    SECTION("identity matrix with zero gradients keeps z") {
        ConsensusMatrix eye{Eigen::MatrixXd::Identity(2, 2)};
        auto z = vectors({{2.0, 1.0}, {0.0, -1.0}});
        auto g = vectors({{0.0, 0.0}, {0.0, 0.0}});
        const auto out = consensus_update(z, eye, g);
        CHECK(out[0] == z[0]);
        CHECK(out[1] == z[1]);
    }

    SECTION("uniform averaging") {
        ConsensusMatrix half{Eigen::MatrixXd::Constant(2, 2, 0.5)};
        auto z = vectors({{2.0}, {0.0}});
        auto g = vectors({{0.0}, {0.0}});
        const auto out = consensus_update(z, half, g);
        CHECK(out[0](0) == Approx(1.0));
        CHECK(out[1](0) == Approx(1.0));
    }

    SECTION("mean preservation under doubly stochastic mixing") {
        const ConsensusMatrix p = metropolis_matrix(random_regular_graph(12, 3, 3));
        Rng rng(4);
        std::vector<Eigen::VectorXd> z(12), g(12);
        for (int i = 0; i < 12; ++i) {
            z[i] = Eigen::VectorXd(5);
            g[i] = Eigen::VectorXd(5);
            for (int c = 0; c < 5; ++c) {
                z[i](c) = rng.normal();
                g[i](c) = rng.normal();
            }
        }
        Eigen::VectorXd mean_before = Eigen::VectorXd::Zero(5), mean_g = Eigen::VectorXd::Zero(5);
        for (int i = 0; i < 12; ++i) {
            mean_before += z[i];
            mean_g += g[i];
        }
        const auto out = consensus_update(z, p, g);
        Eigen::VectorXd mean_after = Eigen::VectorXd::Zero(5);
        for (int i = 0; i < 12; ++i) mean_after += out[i];
        CHECK(((mean_before + mean_g) / 12.0 - mean_after / 12.0).lpNorm<Eigen::Infinity>() <
              1e-12);
    }

    SECTION("dimension mismatch") {
        ConsensusMatrix eye{Eigen::MatrixXd::Identity(2, 2)};
        auto z = vectors({{1.0, 2.0}, {1.0}});
        auto g = vectors({{0.0, 0.0}, {0.0}});
        CHECK_THROWS_AS(consensus_update(z, eye, g), std::invalid_argument);
    }
}

TEST_CASE("local update accumulates") {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd g(2);
    g << 1.0, 1.0;
    z = local_update(z, g);
    CHECK(z(0) == 1.0);
    for (int k = 0; k < 4; ++k) z = local_update(z, g);
    CHECK(z(0) == 5.0);
    CHECK(z(1) == 5.0);
}

TEST_CASE("proximal step is a scaled projection") {
    const QuadMaxProblem unconstrained = QuadMaxProblem::generate(2, 4, 1, 1);
    Eigen::VectorXd z(2);
    z << 2.0, 0.0;
    const Eigen::VectorXd x = proximal_step(z, 0.5, unconstrained);
    CHECK(x(0) == Approx(-1.0));
    CHECK(x(1) == 0.0);
    CHECK(proximal_step(Eigen::VectorXd::Zero(2), 1.0, unconstrained).norm() == 0.0);
    CHECK_THROWS_AS(proximal_step(z, 0.0, unconstrained), std::invalid_argument);
}

TEST_CASE("running average") {
    Eigen::VectorXd x1(1), x2(1), x3(1);
    x1 << 0.0;
    x2 << 3.0;
    x3 << 6.0;
    Eigen::VectorXd hat = running_average(Eigen::VectorXd::Zero(1), x1, 1);
    CHECK(hat(0) == 0.0);
    hat = running_average(hat, x2, 2);
    hat = running_average(hat, x3, 3);
    CHECK(hat(0) == Approx(3.0));  // arithmetic mean of 0, 3, 6

    Eigen::VectorXd c(1);
    c << 7.0;
    Eigen::VectorXd h2 = running_average(Eigen::VectorXd::Zero(1), c, 1);
    for (long t = 2; t <= 20; ++t) h2 = running_average(h2, c, t);
    CHECK(h2(0) == Approx(7.0).margin(1e-12));
}

TEST_CASE("network error") {
    SECTION("all equal gives zeros") {
        auto z = vectors({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}});
        const NetworkError e = network_error(z);
        CHECK(e.max == 0.0);
        for (double v : e.per_node) CHECK(v == 0.0);
    }

    SECTION("two antipodal nodes") {
        auto z = vectors({{1.0, 0.0}, {-1.0, 0.0}});
        const NetworkError e = network_error(z);
        CHECK(e.per_node[0] == Approx(1.0));
        CHECK(e.per_node[1] == Approx(1.0));
        CHECK(e.max == Approx(1.0));
    }

    SECTION("pure mixing decays within the spectral bound") {
        const ConsensusMatrix p = metropolis_matrix(ring_graph(6));
        const double lambda2 = spectral_info(p).lambda2;
        Rng rng(12);
        std::vector<Eigen::VectorXd> z(6);
        double max_norm = 0.0;
        for (int i = 0; i < 6; ++i) {
            z[i] = Eigen::VectorXd(3);
            for (int c = 0; c < 3; ++c) z[i](c) = rng.normal();
            max_norm = std::max(max_norm, z[i].norm());
        }
        const auto zero = vectors({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0},
                                   {0, 0, 0}});
        for (int t = 1; t <= 40; ++t) {
            z = consensus_update(z, p, zero);
            const double bound = std::sqrt(6.0) * std::pow(lambda2, t / 2.0) * max_norm;
            REQUIRE(network_error(z).max <= bound + 1e-9);
        }
    }
}

TEST_CASE("closed-form z expansion matches the recursion") {
    SECTION("single step is the first gradient") {
        const ConsensusMatrix p = metropolis_matrix(complete_graph(3));
        Rng rng(3);
        std::vector<std::vector<Eigen::VectorXd>> grads(1);
        grads[0].resize(3);
        for (int i = 0; i < 3; ++i) {
            grads[0][i] = Eigen::VectorXd(2);
            for (int c = 0; c < 2; ++c) grads[0][i](c) = rng.normal();
        }
        for (int i = 0; i < 3; ++i) {
            const Eigen::VectorXd z = closed_form_z(grads, p, 1, 1, i);
            CHECK((z - grads[0][i]).lpNorm<Eigen::Infinity>() < 1e-12);
        }
    }

    SECTION("zero gradients give zero") {
        const ConsensusMatrix p = metropolis_matrix(ring_graph(4));
        std::vector<std::vector<Eigen::VectorXd>> grads(
            8, std::vector<Eigen::VectorXd>(4, Eigen::VectorXd::Zero(3)));
        CHECK(closed_form_z(grads, p, 2, 7, 1).norm() == 0.0);
    }

    SECTION("full grid n in 2..5, h in 1..3, T <= 20, every node and time") {
        for (int n = 2; n <= 5; ++n) {
            const ConsensusMatrix p = metropolis_matrix(complete_graph(n));
            const ConsensusMatrix ring = metropolis_matrix(ring_graph(n));
            for (const ConsensusMatrix& matrix : {p, ring}) {
                Rng rng(1000 * n);
                const long T = 20;
                std::vector<std::vector<Eigen::VectorXd>> grads(T);
                for (long t = 0; t < T; ++t) {
                    grads[t].resize(n);
                    for (int i = 0; i < n; ++i) {
                        grads[t][i] = Eigen::VectorXd(2);
                        for (int c = 0; c < 2; ++c)
                            grads[t][i](c) = static_cast<double>(rng.uniform_int(-5, 5));
                    }
                }
                for (long h = 1; h <= 3; ++h) {
                    const auto z_at = iterate_z(grads, matrix, h, T);
                    for (long t = 1; t <= T; ++t)
                        for (int i = 0; i < n; ++i) {
                            const Eigen::VectorXd closed = closed_form_z(grads, matrix, h, t, i);
                            REQUIRE((closed - z_at[t][i]).lpNorm<Eigen::Infinity>() < 1e-9);
                        }
                }
            }
        }
    }

    SECTION("incomplete history is rejected") {
        const ConsensusMatrix p = metropolis_matrix(complete_graph(2));
        std::vector<std::vector<Eigen::VectorXd>> grads(
            3, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Zero(1)));
        CHECK_THROWS_AS(closed_form_z(grads, p, 2, 5, 0), std::invalid_argument);
    }
}

TEST_CASE("optimal step scale") {
    CHECK(optimal_step_scale(Schedule::fixed(1), 1.0, 1.0, 0.0) ==
          Approx(1.0 / std::sqrt(31.0)).margin(1e-15));
    CHECK(optimal_step_scale(Schedule::fixed(2), 1.0, 1.0, 0.0) ==
          Approx(1.0 / std::sqrt(61.0)).margin(1e-15));
    CHECK(optimal_step_scale(Schedule::every(), 1.0, 1.0, 0.0) ==
          Approx(1.0 / std::sqrt(31.0)).margin(1e-15));

    // A scales as R/L
    const double base = optimal_step_scale(Schedule::fixed(3), 1.0, 1.0, 0.2);
    CHECK(optimal_step_scale(Schedule::fixed(3), 2.0, 6.0, 0.2) == Approx(3.0 * base));

    CHECK_THROWS_AS(optimal_step_scale(Schedule::every(), 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_step_scale(Schedule::every(), 1.0, 1.0, 1.0), std::invalid_argument);
}
