#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dda/problems.hpp"
#include "dda/rng.hpp"

namespace dda {

// One labeled pair for metric learning: label +1 marks u and v as similar,
// -1 as dissimilar.
struct MetricTriple {
    Eigen::VectorXd u, v;
    int label = 1;
};

// Hinge loss of a single triple under the pseudo-metric induced by A:
//   max{0, s * ((u-v)^T A (u-v) - b) + 1}.
inline double metric_loss(const Eigen::MatrixXd& a, double b, const MetricTriple& triple) {
    if (a.rows() != a.cols() || triple.u.size() != a.rows() || triple.v.size() != a.rows())
        throw std::invalid_argument("metric_loss: dimension mismatch");
    const Eigen::VectorXd w = triple.u - triple.v;
    const double dist_sq = w.dot(a * w);
    return std::max(0.0, triple.label * (dist_sq - b) + 1.0);
}

// Subgradient of the hinge term. Zero when the margin condition
// s*(D_A^2 - b) <= -1 makes the term inactive; otherwise
// (s (u-v)(u-v)^T, -s). The matrix part is the d x d outer product, the
// only shape compatible with A.
inline std::pair<Eigen::MatrixXd, double> metric_subgradient(const Eigen::MatrixXd& a, double b,
                                                             const MetricTriple& triple) {
    if (a.rows() != a.cols() || triple.u.size() != a.rows() || triple.v.size() != a.rows())
        throw std::invalid_argument("metric_subgradient: dimension mismatch");
    const Eigen::VectorXd w = triple.u - triple.v;
    const double dist_sq = w.dot(a * w);
    if (triple.label * (dist_sq - b) <= -1.0)
        return {Eigen::MatrixXd::Zero(a.rows(), a.cols()), 0.0};
    return {triple.label * (w * w.transpose()), -static_cast<double>(triple.label)};
}

// Flattened (A, b) layout used on the wire: row-major A followed by b,
// d^2 + 1 entries total.
inline Eigen::VectorXd encode_metric_point(const Eigen::MatrixXd& a, double b) {
    const int d = static_cast<int>(a.rows());
    Eigen::VectorXd x(d * d + 1);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) x(r * d + c) = a(r, c);
    x(d * d) = b;
    return x;
}

inline std::pair<Eigen::MatrixXd, double> decode_metric_point(const Eigen::VectorXd& x, int d) {
    if (x.size() != d * d + 1) throw std::invalid_argument("decode_metric_point: bad layout");
    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = x(r * d + c);
    return {std::move(a), x(d * d)};
}

// Projection onto {A PSD, b >= 1}: symmetrize A, clamp negative
// eigenvalues to zero, reconstruct, and clamp b from below.
inline Eigen::VectorXd psd_project(const Eigen::VectorXd& x, int d) {
    auto [a, b] = decode_metric_point(x, d);
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("psd_project: eigendecomposition failed");
    const Eigen::VectorXd clamped = solver.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd projected =
        solver.eigenvectors() * clamped.asDiagonal() * solver.eigenvectors().transpose();
    return encode_metric_point(projected, std::max(1.0, b));
}

// Batch metric-learning objective over flattened (A, b) points:
//   f_i(x) = (n/m) * sum of hinge losses over node i's triples,
// so that F(x) = (1/m) * sum over all triples.
class MetricProblem final : public ObjectiveOracle {
public:
    MetricProblem(int feature_dim, int nodes, std::vector<MetricTriple> triples, double lipschitz,
                  double radius, std::uint64_t seed = 0)
        : feature_dim_(feature_dim),
          partition_(static_cast<int>(triples.size()), nodes),
          triples_(std::move(triples)),
          lipschitz_(lipschitz),
          radius_(radius),
          seed_(seed) {
        for (const auto& t : triples_) {
            if (t.u.size() != feature_dim_ || t.v.size() != feature_dim_)
                throw std::invalid_argument("metric: triple dimension mismatch");
            if (t.label != 1 && t.label != -1)
                throw std::invalid_argument("metric: label must be +1 or -1");
        }
    }

    int dim() const override { return feature_dim_ * feature_dim_ + 1; }
    int feature_dim() const { return feature_dim_; }
    int node_count() const override { return partition_.nodes; }
    int triple_count() const { return partition_.total; }
    const std::vector<MetricTriple>& triples() const { return triples_; }
    std::uint64_t seed() const { return seed_; }

    double eval_local(int node, const Eigen::VectorXd& x) const override {
        auto [a, b] = decode_metric_point(x, feature_dim_);
        double sum = 0.0;
        for (int j = 0; j < partition_.per_node(); ++j)
            sum += metric_loss(a, b, triples_[partition_.global_index(node, j)]);
        return sum * node_count() / triple_count();
    }

    Eigen::VectorXd subgradient(int node, const Eigen::VectorXd& x) const override {
        auto [a, b] = decode_metric_point(x, feature_dim_);
        Eigen::MatrixXd da = Eigen::MatrixXd::Zero(feature_dim_, feature_dim_);
        double db = 0.0;
        for (int j = 0; j < partition_.per_node(); ++j) {
            auto [ga, gb] = metric_subgradient(a, b, triples_[partition_.global_index(node, j)]);
            da += ga;
            db += gb;
        }
        const double scale = static_cast<double>(node_count()) / triple_count();
        return encode_metric_point(scale * da, scale * db);
    }

    Eigen::VectorXd project(Eigen::VectorXd x) const override {
        return psd_project(x, feature_dim_);
    }

    double lipschitz() const override { return lipschitz_; }
    double radius() const override { return radius_; }

    // Two Gaussian classes; similar pairs are drawn within one class,
    // dissimilar pairs across classes, alternating by index.
    static MetricProblem generate(int feature_dim, int m, int nodes, std::uint64_t seed);

private:
    int feature_dim_;
    Partition partition_;
    std::vector<MetricTriple> triples_;
    double lipschitz_, radius_;
    std::uint64_t seed_;
};

inline MetricProblem MetricProblem::generate(int feature_dim, int m, int nodes,
                                             std::uint64_t seed) {
    if (feature_dim < 1) throw std::invalid_argument("metric generate: dim must be positive");
    Partition part(m, nodes);

    Rng class_rng(mix_seed(seed, 1));
    Eigen::VectorXd center_a(feature_dim), center_b(feature_dim);
    for (int c = 0; c < feature_dim; ++c) center_a(c) = 2.0 * class_rng.normal();
    for (int c = 0; c < feature_dim; ++c) center_b(c) = 2.0 * class_rng.normal();

    std::vector<MetricTriple> triples;
    triples.reserve(m);
    for (int j = 0; j < m; ++j) {
        Rng rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(j)));
        MetricTriple t;
        t.u.resize(feature_dim);
        t.v.resize(feature_dim);
        const bool similar = (j % 2 == 0);
        const Eigen::VectorXd& first = (j % 4 < 2) ? center_a : center_b;
        const Eigen::VectorXd& second = similar ? first : ((j % 4 < 2) ? center_b : center_a);
        for (int c = 0; c < feature_dim; ++c) t.u(c) = first(c) + 0.5 * rng.normal();
        for (int c = 0; c < feature_dim; ++c) t.v(c) = second(c) + 0.5 * rng.normal();
        t.label = similar ? 1 : -1;
        triples.push_back(std::move(t));
    }

    // Subgradient norms are dominated by the outer products (u-v)(u-v)^T;
    // bound them empirically over the generated data.
    double max_outer = 0.0;
    for (const auto& t : triples) max_outer = std::max(max_outer, (t.u - t.v).squaredNorm());
    const double lipschitz = std::sqrt(max_outer * max_outer + 1.0);
    const double radius = std::sqrt(0.5 * (feature_dim + 4.0 * max_outer * max_outer));

    return MetricProblem(feature_dim, nodes, std::move(triples), lipschitz, radius, seed);
}

}  // namespace dda
