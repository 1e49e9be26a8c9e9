#include <catch2/catch.hpp>

#include <cmath>

#include <dda/metric.hpp>
#include <dda/problems.hpp>
#include <dda/quadmax.hpp>
#include <dda/rng.hpp>

using namespace dda;

namespace {

MetricTriple triple(std::initializer_list<double> u, std::initializer_list<double> v, int s) {
    MetricTriple t;
    t.u = Eigen::VectorXd(static_cast<Eigen::Index>(u.size()));
    t.v = Eigen::VectorXd(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : u) t.u(i++) = x;
    i = 0;
    for (double x : v) t.v(i++) = x;
    t.label = s;
    return t;
}

Eigen::VectorXd random_feasible_metric_point(int d, Rng& rng) {
    Eigen::VectorXd x(d * d + 1);
    for (Eigen::Index c = 0; c < x.size(); ++c) x(c) = 3.0 * rng.normal();
    return psd_project(x, d);
}

}  // namespace

TEST_CASE("partition map") {
    const Partition p(200, 4);
    CHECK(p.per_node() == 50);
    CHECK(p.global_index(0, 0) == 0);
    CHECK(p.global_index(3, 49) == 199);

    CHECK_THROWS_AS(Partition(10, 3), std::invalid_argument);
    CHECK_THROWS_AS(p.global_index(4, 0), std::out_of_range);
    CHECK_THROWS_AS(p.global_index(0, 50), std::out_of_range);

    // bijection, exhaustive
    const Partition big(10000, 16);
    std::vector<char> hit(10000, 0);
    for (int node = 0; node < 16; ++node)
        for (int local = 0; local < big.per_node(); ++local) {
            const int g = big.global_index(node, local);
            REQUIRE(g >= 0);
            REQUIRE(g < 10000);
            REQUIRE(!hit[g]);
            hit[g] = 1;
        }
}

TEST_CASE("metric loss hand examples") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    CHECK(metric_loss(eye, 1.0, triple({1, 0}, {0, 0}, +1)) == Approx(1.0));
    CHECK(metric_loss(Eigen::MatrixXd::Zero(2, 2), 1.0, triple({3, 1}, {0, 0}, +1)) == 0.0);
    CHECK(metric_loss(eye, 1.0, triple({2, 0}, {0, 0}, -1)) == 0.0);

    CHECK_THROWS_AS(metric_loss(eye, 1.0, triple({1, 0, 0}, {0, 0, 0}, 1)),
                    std::invalid_argument);
}

TEST_CASE("metric subgradient hand examples") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);

    SECTION("active at the margin boundary") {
        auto [da, db] = metric_subgradient(eye, 1.0, triple({1, 0}, {0, 0}, +1));
        CHECK(da(0, 0) == 1.0);
        CHECK(da(0, 1) == 0.0);
        CHECK(da(1, 0) == 0.0);
        CHECK(da(1, 1) == 0.0);
        CHECK(db == -1.0);
    }

    SECTION("inactive when s(D^2 - b) <= -1") {
        auto [da, db] = metric_subgradient(eye, 3.0, triple({1, 0}, {0, 0}, +1));
        CHECK(da.isZero(0.0));
        CHECK(db == 0.0);
    }

    SECTION("dissimilar active pair has db = +1") {
        auto [da, db] = metric_subgradient(eye, 1.0, triple({1, 0}, {0, 0}, -1));
        CHECK(db == 1.0);
        CHECK(da(0, 0) == -1.0);
    }
}

TEST_CASE("psd projection") {
    SECTION("clamps negative eigenvalues and b") {
        Eigen::MatrixXd a(2, 2);
        a << 1, 0, 0, -2;
        const Eigen::VectorXd out = psd_project(encode_metric_point(a, 0.3), 2);
        auto [ap, bp] = decode_metric_point(out, 2);
        CHECK(ap(0, 0) == Approx(1.0).margin(1e-12));
        CHECK(ap(1, 1) == Approx(0.0).margin(1e-12));
        CHECK(ap(0, 1) == Approx(0.0).margin(1e-12));
        CHECK(bp == 1.0);
    }

    SECTION("leaves feasible points unchanged") {
        Eigen::MatrixXd a(2, 2);
        a << 2, 1, 1, 2;  // eigenvalues 1 and 3
        const Eigen::VectorXd x = encode_metric_point(a, 2.0);
        CHECK((psd_project(x, 2) - x).lpNorm<Eigen::Infinity>() < 1e-12);
    }

    SECTION("off-diagonal example reconstructs half outer product") {
        Eigen::MatrixXd a(2, 2);
        a << 0, 1, 1, 0;  // eigenvalues +1, -1
        auto [ap, bp] = decode_metric_point(psd_project(encode_metric_point(a, 1.0), 2), 2);
        CHECK(ap(0, 0) == Approx(0.5).margin(1e-12));
        CHECK(ap(0, 1) == Approx(0.5).margin(1e-12));
        CHECK(ap(1, 0) == Approx(0.5).margin(1e-12));
        CHECK(ap(1, 1) == Approx(0.5).margin(1e-12));
        CHECK(bp == 1.0);
    }

    SECTION("idempotent with nonnegative spectrum, random points") {
        Rng rng(99);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd x(10);
            for (int c = 0; c < 10; ++c) x(c) = 4.0 * rng.normal();
            const Eigen::VectorXd once = psd_project(x, 3);
            const Eigen::VectorXd twice = psd_project(once, 3);
            CHECK((once - twice).lpNorm<Eigen::Infinity>() < 1e-12);
            auto [a, b] = decode_metric_point(once, 3);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10);
            CHECK(b >= 1.0);
        }
    }
}

TEST_CASE("quadmax hand examples") {
    Eigen::MatrixXd c1(1, 2), c2(1, 2);

    SECTION("coincident centers give zero value and gradient") {
        c1 << 1.0, 2.0;
        c2 << 1.0, 2.0;
        QuadMaxProblem p(2, 1, c1, c2, 1.0, 1.0);
        Eigen::VectorXd x(2);
        x << 1.0, 2.0;
        CHECK(p.eval_local(0, x) == 0.0);
        CHECK(p.subgradient(0, x).norm() == 0.0);
    }

    SECTION("tie picks branch one") {
        c1 << 1.0, 0.0;
        c2 << -1.0, 0.0;
        QuadMaxProblem p(2, 1, c1, c2, 1.0, 1.0);
        const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
        CHECK(p.eval_local(0, x) == Approx(1.0));
        const Eigen::VectorXd g = p.subgradient(0, x);
        CHECK(g(0) == Approx(-2.0));
        CHECK(g(1) == 0.0);
    }

    SECTION("far branch dominates") {
        c1 << 1.0, 0.0;
        c2 << -1.0, 0.0;
        QuadMaxProblem p(2, 1, c1, c2, 1.0, 1.0);
        Eigen::VectorXd x(2);
        x << 3.0, 0.0;
        CHECK(p.eval_local(0, x) == Approx(16.0));
        const Eigen::VectorXd g = p.subgradient(0, x);
        CHECK(g(0) == Approx(8.0));
        CHECK(g(1) == 0.0);
    }
}

TEST_CASE("quadmax eval equals per-term brute force") {
    const QuadMaxProblem p = QuadMaxProblem::generate(6, 24, 4, 5);
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(6);
        for (int c = 0; c < 6; ++c) x(c) = 6.0 * rng.normal();
        for (int node = 0; node < 4; ++node) {
            double expected = 0.0;
            for (int j = 0; j < p.terms_per_node(); ++j) {
                const int jj = node * p.terms_per_node() + j;
                const double l1 = (x - p.centers1().row(jj).transpose()).squaredNorm();
                const double l2 = (x - p.centers2().row(jj).transpose()).squaredNorm();
                expected += l1 >= l2 ? l1 : l2;
            }
            CHECK(p.eval_local(node, x) == Approx(expected).margin(1e-9));
        }
    }
}

TEST_CASE("generation determinism") {
    SECTION("quadmax") {
        const QuadMaxProblem a = QuadMaxProblem::generate(10, 40, 4, 1);
        const QuadMaxProblem b = QuadMaxProblem::generate(10, 40, 4, 1);
        CHECK(a.centers1() == b.centers1());
        CHECK(a.centers2() == b.centers2());
        CHECK(a.lipschitz() == b.lipschitz());
        CHECK(*a.reference_optimum() == *b.reference_optimum());
        const QuadMaxProblem c = QuadMaxProblem::generate(10, 40, 4, 2);
        CHECK(a.centers1() != c.centers1());
    }

    SECTION("metric partition arithmetic and determinism") {
        const MetricProblem a = MetricProblem::generate(5, 200, 4, 2);
        CHECK(a.triple_count() == 200);
        CHECK(a.node_count() == 4);
        CHECK(a.triple_count() / a.node_count() == 50);
        const MetricProblem b = MetricProblem::generate(5, 200, 4, 2);
        for (int j = 0; j < 200; ++j) {
            REQUIRE(a.triples()[j].u == b.triples()[j].u);
            REQUIRE(a.triples()[j].v == b.triples()[j].v);
            REQUIRE(a.triples()[j].label == b.triples()[j].label);
        }
        CHECK_THROWS_AS(MetricProblem::generate(5, 200, 3, 2), std::invalid_argument);
    }
}

TEST_CASE("global objective is the node average") {
    const QuadMaxProblem q = QuadMaxProblem::generate(8, 32, 4, 9);
    const MetricProblem m = MetricProblem::generate(4, 40, 4, 9);
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::VectorXd xq(8);
        for (int c = 0; c < 8; ++c) xq(c) = 5.0 * rng.normal();
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) sum += q.eval_local(i, xq);
        CHECK(q.eval_global(xq) == Approx(sum / 4.0).margin(1e-9));

        const Eigen::VectorXd xm = random_feasible_metric_point(4, rng);
        sum = 0.0;
        for (int i = 0; i < 4; ++i) sum += m.eval_local(i, xm);
        CHECK(m.eval_global(xm) == Approx(sum / 4.0).margin(1e-9));
    }
}

TEST_CASE("subgradient first-order condition on random pairs") {
    Rng rng(7);

    SECTION("quadmax") {
        const QuadMaxProblem p = QuadMaxProblem::generate(8, 32, 4, 3);
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXd x(8), y(8);
            for (int c = 0; c < 8; ++c) x(c) = 8.0 * rng.normal();
            for (int c = 0; c < 8; ++c) y(c) = 8.0 * rng.normal();
            const int node = trial % 4;
            const Eigen::VectorXd g = p.subgradient(node, x);
            REQUIRE(p.eval_local(node, y) >=
                    p.eval_local(node, x) + g.dot(y - x) - 1e-9);
        }
    }

    SECTION("metric") {
        const MetricProblem p = MetricProblem::generate(4, 40, 4, 3);
        for (int trial = 0; trial < 1000; ++trial) {
            const Eigen::VectorXd x = random_feasible_metric_point(4, rng);
            const Eigen::VectorXd y = random_feasible_metric_point(4, rng);
            const int node = trial % 4;
            const Eigen::VectorXd g = p.subgradient(node, x);
            REQUIRE(p.eval_local(node, y) >=
                    p.eval_local(node, x) + g.dot(y - x) - 1e-9);
        }
    }
}

TEST_CASE("quadmax f_i is nonnegative") {
    const QuadMaxProblem p = QuadMaxProblem::generate(6, 18, 3, 11);
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(6);
        for (int c = 0; c < 6; ++c) x(c) = 10.0 * rng.normal();
        for (int i = 0; i < 3; ++i) CHECK(p.eval_local(i, x) >= 0.0);
    }
}

TEST_CASE("certified optimum agrees with an independent subgradient descent") {
    const QuadMaxProblem p = QuadMaxProblem::generate(10, 40, 4, 1);
    REQUIRE(p.reference_optimum().has_value());
    const double f_star = *p.reference_optimum();

    const auto opt = p.certify_optimum();
    REQUIRE(opt.certified);
    CHECK(opt.f_star == f_star);  // stored value is the certified one
    CHECK(opt.gap <= 1e-8 * (1.0 + std::abs(f_star)));

    // normalized subgradient descent with a 1/sqrt(t) step, best-iterate
    Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
    double best = p.eval_global(x);
    for (long t = 1; t <= 200000; ++t) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(10);
        for (int i = 0; i < 4; ++i) g += p.subgradient(i, x);
        g /= 4.0;
        if (g.norm() < 1e-14) break;
        x -= (3.0 / std::sqrt(static_cast<double>(t))) * g / g.norm();
        best = std::min(best, p.eval_global(x));
    }
    // the true optimum lies in [f_star - gap, f_star]; nothing beats that
    CHECK(best >= f_star - opt.gap - 1e-9);
    CHECK(best - f_star < 1e-3);  // and the oracle gets close to it

    // the reported minimizer evaluates to the reported value
    CHECK(p.eval_global(*p.minimizer()) == Approx(f_star).margin(1e-9));
}

TEST_CASE("per-node minimizers differ from the global optimum") {
    const QuadMaxProblem p = QuadMaxProblem::generate(10, 80, 10, 21);
    const double f_star = *p.reference_optimum();
    const int per = p.terms_per_node();
    for (int i = 0; i < p.node_count(); ++i) {
        const QuadMaxProblem local(10, 1, p.centers1().middleRows(i * per, per),
                                   p.centers2().middleRows(i * per, per), 1.0, 1.0);
        const auto opt = local.certify_optimum();
        REQUIRE(opt.certified);
        // the node's favorite point is clearly suboptimal for the network
        CHECK(p.eval_global(opt.x_star) > f_star + 1.0);
    }
}
