#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dda/consensus.hpp"
#include "dda/problems.hpp"
#include "dda/schedule.hpp"

namespace dda {

// Per-node optimizer state: dual accumulator z, primal point x, running
// average x_hat, and the iteration counter.
struct NodeState {
    Eigen::VectorXd z, x, x_hat;
    long t = 0;
};

inline NodeState initial_state(const ObjectiveOracle& oracle) {
    NodeState s;
    s.z = Eigen::VectorXd::Zero(oracle.dim());
    s.x = oracle.project(Eigen::VectorXd::Zero(oracle.dim()));
    s.x_hat = s.x;
    s.t = 0;
    return s;
}

// Consensus update z_i <- sum_j P_ij z_j + g_i, evaluated against a frozen
// snapshot of the previous round (synchronous semantics).
inline std::vector<Eigen::VectorXd> consensus_update(const std::vector<Eigen::VectorXd>& z_prev,
                                                     const ConsensusMatrix& p,
                                                     const std::vector<Eigen::VectorXd>& grads) {
    const int n = p.size();
    if (static_cast<int>(z_prev.size()) != n || static_cast<int>(grads.size()) != n)
        throw std::invalid_argument("consensus_update: node count mismatch");
    std::vector<Eigen::VectorXd> out(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(z_prev[0].size());
        for (int j = 0; j < n; ++j) {
            if (z_prev[j].size() != z_prev[0].size())
                throw std::invalid_argument("consensus_update: dimension mismatch");
            acc += p.weights(i, j) * z_prev[j];
        }
        out[i] = acc + grads[i];
    }
    return out;
}

// Cheap round: plain subgradient accumulation, no exchange.
inline Eigen::VectorXd local_update(const Eigen::VectorXd& z, const Eigen::VectorXd& g) {
    if (z.size() != g.size()) throw std::invalid_argument("local_update: dimension mismatch");
    return z + g;
}

// With psi(x) = ||x||^2 / 2 the proximal minimization has the closed form
// x = -a z, followed by projection onto the feasible set.
inline Eigen::VectorXd proximal_step(const Eigen::VectorXd& z, double a,
                                     const ObjectiveOracle& oracle) {
    if (a <= 0.0) throw std::invalid_argument("proximal_step: step must be positive");
    return oracle.project(-a * z);
}

// Incremental mean of x(1..t).
inline Eigen::VectorXd running_average(const Eigen::VectorXd& x_hat_prev,
                                       const Eigen::VectorXd& x_new, long t) {
    if (t < 1) throw std::invalid_argument("running_average: t >= 1 required");
    return ((t - 1) * x_hat_prev + x_new) / static_cast<double>(t);
}

struct NetworkError {
    std::vector<double> per_node;
    double max = 0.0;
};

// Disagreement ||z_bar - z_i|| per node, Euclidean norm. The mean is
// reduced in ascending node order so results do not depend on scheduling.
inline NetworkError network_error(const std::vector<Eigen::VectorXd>& z) {
    if (z.empty()) throw std::invalid_argument("network_error: no nodes");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(z[0].size());
    for (const auto& zi : z) mean += zi;
    mean /= static_cast<double>(z.size());
    NetworkError err;
    err.per_node.reserve(z.size());
    for (const auto& zi : z) {
        err.per_node.push_back((mean - zi).norm());
        err.max = std::max(err.max, err.per_node.back());
    }
    return err;
}

// Closed-form expansion of z_i(t) under a fixed period h, used as an
// independent oracle for the iterative recursion. Communication rounds sit
// at t = h, 2h, 3h, ..., so with H_t = floor(t / h) exchanges so far:
//
//   z_i(t) = sum_{w=0}^{H_t-1} [P^{H_t-w}]_{i,:} sum_{tau in B_w} g(tau)
//          + sum_{tau=max(0, H_t*h - 1)}^{t-1} g_i(tau)
//
// where block B_w covers tau in [w*h - 1, w*h + h - 2] clipped to tau >= 0.
// The first block is one gradient short of the rest because the exchange at
// t = h has only gradients g(0..h-2) accumulated on top of z(0) = 0; the
// trailing sum collects gradients applied after the latest exchange.
inline Eigen::VectorXd closed_form_z(const std::vector<std::vector<Eigen::VectorXd>>& grad_history,
                                     const ConsensusMatrix& p, long h, long t, int node) {
    const int n = p.size();
    if (h < 1) throw std::invalid_argument("closed_form_z: period must be >= 1");
    if (node < 0 || node >= n) throw std::out_of_range("closed_form_z: node out of range");
    if (static_cast<long>(grad_history.size()) < t)
        throw std::invalid_argument("closed_form_z: gradient history incomplete");
    for (long tau = 0; tau < t; ++tau)
        if (static_cast<int>(grad_history[tau].size()) != n)
            throw std::invalid_argument("closed_form_z: gradient history incomplete");

    const long dim = t > 0 ? grad_history[0][0].size() : 0;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
    if (t == 0) return z;

    const long comms = t / h;

    // Per-node gradient sums over each inter-communication block.
    std::vector<Eigen::MatrixXd> block_sums;  // n x dim per block
    for (long w = 0; w < comms; ++w) {
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, dim);
        const long lo = std::max(0L, w * h - 1);
        const long hi = w * h + h - 2;
        for (long tau = lo; tau <= hi; ++tau)
            for (int j = 0; j < n; ++j) sums.row(j) += grad_history[tau][j].transpose();
        block_sums.push_back(std::move(sums));
    }

    // Row `node` of P^m for m = 1..comms, built by repeated products.
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    row(node) = 1.0;
    for (long m = 1; m <= comms; ++m) {
        row = row * p.weights;            // row of P^m
        const long w = comms - m;         // block mixed m times
        z += (row * block_sums[w]).transpose();
    }

    for (long tau = std::max(0L, comms * h - 1); tau < t; ++tau) z += grad_history[tau][node];
    return z;
}

// Step-size scale A minimizing the leading error constant of each regime;
// the every-round and fixed-period groupings are kept as stated even though
// they coincide numerically at h = 1.
inline double optimal_step_scale(const Schedule& s, double lipschitz, double radius,
                                 double lambda2) {
    if (lipschitz <= 0.0 || radius <= 0.0)
        throw std::invalid_argument("optimal_step_scale: L and R must be positive");
    if (lambda2 < 0.0 || lambda2 >= 1.0)
        throw std::invalid_argument("optimal_step_scale: need 0 <= lambda2 < 1");
    const double mix = 1.0 - std::sqrt(lambda2);
    double inner = 0.0;
    switch (s.kind) {
        case Schedule::Kind::every_round:
            inner = 19.0 + 12.0 / mix;
            break;
        case Schedule::Kind::fixed_period: {
            const double h = static_cast<double>(s.period);
            inner = 1.0 + 18.0 * h + 12.0 * h / mix;
            break;
        }
        case Schedule::Kind::power_law: {
            const double p = s.exponent;
            inner = 7.0 + (12.0 * p + 12.0) / ((3.0 * p + 1.0) * mix) + 12.0 / (2.0 * p + 1.0);
            break;
        }
    }
    return (radius / lipschitz) / std::sqrt(inner);
}

}  // namespace dda
