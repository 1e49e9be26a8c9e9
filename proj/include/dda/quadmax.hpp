#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dda/problems.hpp"
#include "dda/rng.hpp"

namespace dda {

// Max-of-two-quadratics objective: each node i owns a block of terms and
//
//   f_i(x) = sum_j max( ||x - c1_j||^2, ||x - c2_j||^2 )
//
// over its block. Convex, nonsmooth, unconstrained. Generated instances
// split the terms into two opposed camps so that per-node minimizers
// disagree strongly and communication is essential.
class QuadMaxProblem final : public ObjectiveOracle {
public:
    QuadMaxProblem(int dim, int nodes, Eigen::MatrixXd centers1, Eigen::MatrixXd centers2,
                   double lipschitz, double radius,
                   std::optional<double> f_star = std::nullopt,
                   std::optional<Eigen::VectorXd> x_star = std::nullopt,
                   std::uint64_t seed = 0)
        : dim_(dim),
          partition_(static_cast<int>(centers1.rows()), nodes),
          centers1_(std::move(centers1)),
          centers2_(std::move(centers2)),
          lipschitz_(lipschitz),
          radius_(radius),
          f_star_(f_star),
          x_star_(std::move(x_star)),
          seed_(seed) {
        if (centers1_.rows() != centers2_.rows() || centers1_.cols() != dim_ ||
            centers2_.cols() != dim_)
            throw std::invalid_argument("quadmax: center matrix shape mismatch");
    }

    int dim() const override { return dim_; }
    int node_count() const override { return partition_.nodes; }
    int term_count() const { return partition_.total; }
    int terms_per_node() const { return partition_.per_node(); }
    std::uint64_t seed() const { return seed_; }

    const Eigen::MatrixXd& centers1() const { return centers1_; }
    const Eigen::MatrixXd& centers2() const { return centers2_; }

    // Value of global term j; ties resolve to branch 1 for the subgradient.
    double term_value(int j, const Eigen::VectorXd& x) const {
        return std::max((x - centers1_.row(j).transpose()).squaredNorm(),
                        (x - centers2_.row(j).transpose()).squaredNorm());
    }

    int active_branch(int j, const Eigen::VectorXd& x) const {
        const double l1 = (x - centers1_.row(j).transpose()).squaredNorm();
        const double l2 = (x - centers2_.row(j).transpose()).squaredNorm();
        return l1 >= l2 ? 1 : 2;
    }

    double eval_local(int node, const Eigen::VectorXd& x) const override {
        check_dim(x);
        double sum = 0.0;
        for (int j = 0; j < partition_.per_node(); ++j)
            sum += term_value(partition_.global_index(node, j), x);
        return sum;
    }

    Eigen::VectorXd subgradient(int node, const Eigen::VectorXd& x) const override {
        check_dim(x);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
        for (int j = 0; j < partition_.per_node(); ++j) {
            const int jj = partition_.global_index(node, j);
            const auto& c = active_branch(jj, x) == 1 ? centers1_ : centers2_;
            g += 2.0 * (x - c.row(jj).transpose());
        }
        return g;
    }

    Eigen::VectorXd project(Eigen::VectorXd x) const override { return x; }  // unconstrained

    double lipschitz() const override { return lipschitz_; }
    double radius() const override { return radius_; }
    std::optional<double> reference_optimum() const override { return f_star_; }
    const std::optional<Eigen::VectorXd>& minimizer() const { return x_star_; }

    struct GenParams {
        double cluster_separation = 4.0;  // camp displacement along the shared axis
        double term_spread = 1.0;         // noise scale of term centers around the camp mean
        double offset_norm = 4.0;         // displacement of the whole instance from the origin
    };

    static QuadMaxProblem generate(int dim, int m, int nodes, std::uint64_t seed,
                                   const GenParams& params);

    static QuadMaxProblem generate(int dim, int m, int nodes, std::uint64_t seed) {
        return generate(dim, m, nodes, seed, GenParams{});
    }

    // Exact global minimization of sum_j max(||x-c1_j||^2, ||x-c2_j||^2).
    // Writing each term as max over a tie weight in [0,1] turns the problem
    // into a saddle point whose dual is a box-constrained concave quadratic
    // over the weights; projected gradient ascent closes the duality gap
    // F(x(theta)) - g(theta), which bounds the distance to the true optimum
    // and so certifies f_star to the reported gap.
    struct Optimum {
        Eigen::VectorXd x_star;
        double f_star = 0.0;
        double gap = std::numeric_limits<double>::infinity();
        bool certified = false;
    };

    Optimum certify_optimum(long max_iters = 400000, double rel_tol = 1e-11) const {
        const int m = term_count();
        Eigen::MatrixXd diff = centers1_ - centers2_;  // d_j rows
        double gram_bound = 0.0;
        for (int j = 0; j < m; ++j) gram_bound += diff.row(j).squaredNorm();
        const double step = m / std::max(2.0 * gram_bound, 1e-30);

        Eigen::VectorXd theta = Eigen::VectorXd::Constant(m, 0.5);
        Eigen::VectorXd theta_prev = theta;
        Optimum best;
        double momentum = 1.0;
        for (long it = 0; it < max_iters; ++it) {
            // Nesterov extrapolation with restart on monotonicity loss.
            const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            Eigen::VectorXd probe =
                theta + ((momentum - 1.0) / momentum_next) * (theta - theta_prev);
            probe = probe.cwiseMax(0.0).cwiseMin(1.0);
            momentum = momentum_next;

            Eigen::VectorXd x = centers2_.colwise().mean().transpose() +
                                (diff.transpose() * probe) / static_cast<double>(m);
            double dual = 0.0, primal = 0.0;
            Eigen::VectorXd grad(m);
            for (int j = 0; j < m; ++j) {
                const double l1 = (x - centers1_.row(j).transpose()).squaredNorm();
                const double l2 = (x - centers2_.row(j).transpose()).squaredNorm();
                grad(j) = l1 - l2;
                dual += probe(j) * l1 + (1.0 - probe(j)) * l2;
                primal += std::max(l1, l2);
            }
            // Report on the scale of F = (1/n) sum_i f_i.
            dual /= node_count();
            primal /= node_count();
            if (primal - dual < best.gap) {
                best.gap = primal - dual;
                best.x_star = x;
                best.f_star = primal;
            }
            if (best.gap <= rel_tol * (1.0 + std::abs(best.f_star))) {
                best.certified = true;
                return best;
            }
            theta_prev = theta;
            theta = (probe + step * grad).cwiseMax(0.0).cwiseMin(1.0);
            if ((theta - probe).dot(grad) < 0.0) momentum = 1.0;  // restart
        }
        return best;
    }

    // Smallest |l1 - l2| over all terms at x.
    double branch_margin(const Eigen::VectorXd& x) const {
        double margin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < term_count(); ++j) {
            const double l1 = (x - centers1_.row(j).transpose()).squaredNorm();
            const double l2 = (x - centers2_.row(j).transpose()).squaredNorm();
            margin = std::min(margin, std::abs(l1 - l2));
        }
        return margin;
    }

private:
    void check_dim(const Eigen::VectorXd& x) const {
        if (x.size() != dim_) throw std::invalid_argument("quadmax: dimension mismatch");
    }

    int dim_;
    Partition partition_;
    Eigen::MatrixXd centers1_, centers2_;  // m x d, node blocks contiguous
    double lipschitz_, radius_;
    std::optional<double> f_star_;
    std::optional<Eigen::VectorXd> x_star_;
    std::uint64_t seed_;
};

inline QuadMaxProblem QuadMaxProblem::generate(int dim, int m, int nodes, std::uint64_t seed,
                                               const GenParams& params) {
    if (dim < 1) throw std::invalid_argument("quadmax generate: dim must be positive");
    Partition part(m, nodes);  // validates n | m

    auto unit_vector = [dim](Rng& rng) {
        Eigen::VectorXd v(dim);
        do {
            for (int c = 0; c < dim; ++c) v(c) = rng.normal();
        } while (v.norm() < 1e-12);
        return Eigen::VectorXd(v / v.norm());
    };

    Rng offset_rng(mix_seed(seed, 1));
    const Eigen::VectorXd offset = params.offset_norm * unit_vector(offset_rng);
    Rng axis_rng(mix_seed(seed, 2));
    const Eigen::VectorXd axis = unit_vector(axis_rng);

    // Terms form two antipodal camps around a common offset, the first half
    // of the global index range on one side and the second half on the
    // other. Contiguous node blocks therefore pull toward opposite camps
    // (communication is essential), the global optimum stays near the
    // offset, and the mixture is the same for every node count, which keeps
    // processor-count sweeps comparable across points.
    for (std::uint64_t attempt = 0; attempt < 20; ++attempt) {
        Eigen::MatrixXd c1(m, dim), c2(m, dim);
        for (int j = 0; j < m; ++j) {
            const double sign = (2 * j < m) ? 1.0 : -1.0;
            const Eigen::VectorXd mean = offset + sign * params.cluster_separation * axis;
            Rng term_rng(mix_seed(seed, 10000 + 1000 * attempt + static_cast<std::uint64_t>(j)));
            for (int c = 0; c < dim; ++c)
                c1(j, c) = mean(c) + params.term_spread * term_rng.normal();
            for (int c = 0; c < dim; ++c)
                c2(j, c) = mean(c) + params.term_spread * term_rng.normal();
        }

        QuadMaxProblem probe(dim, nodes, c1, c2, 1.0, 1.0);
        auto opt = probe.certify_optimum();
        if (!opt.certified) continue;

        // Empirical subgradient-norm bound over the region runs visit:
        // a sample cloud around the centers plus the origin (the start).
        Rng sample_rng(mix_seed(seed, 3));
        double center_radius = 0.0;
        for (int j = 0; j < m; ++j)
            center_radius = std::max({center_radius, c1.row(j).norm(), c2.row(j).norm()});
        double lipschitz = 0.0;
        for (int s = 0; s < 256; ++s) {
            Eigen::VectorXd x(dim);
            for (int c = 0; c < dim; ++c) x(c) = sample_rng.normal();
            if (x.norm() > 1e-12) x *= sample_rng.uniform() * (center_radius + 2.0) / x.norm();
            for (int i = 0; i < nodes; ++i)
                lipschitz = std::max(lipschitz, probe.subgradient(i, x).norm());
        }
        for (int i = 0; i < nodes; ++i)
            lipschitz = std::max(lipschitz, probe.subgradient(i, Eigen::VectorXd::Zero(dim)).norm());

        const double radius = std::max(opt.x_star.norm() / std::sqrt(2.0), 1e-6);
        return QuadMaxProblem(dim, nodes, std::move(c1), std::move(c2), lipschitz, radius,
                              opt.f_star, std::move(opt.x_star), seed);
    }
    throw std::runtime_error("quadmax generate: failed to certify an optimum for this seed");
}

}  // namespace dda
