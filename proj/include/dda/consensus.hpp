#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "dda/graph.hpp"

namespace dda {

// Doubly stochastic mixing matrix over a communication graph. Entry (i,j)
// is nonzero only on the diagonal and on edges of the source graph.
struct ConsensusMatrix {
    Eigen::MatrixXd weights;

    int size() const { return static_cast<int>(weights.rows()); }
};

// Metropolis-Hastings weights: w_ij = 1 / (1 + max(deg i, deg j)) on edges,
// diagonal absorbs the remainder. Symmetric and doubly stochastic on any
// connected graph; reduces to uniform 1/(k+1) weights on k-regular graphs.
inline ConsensusMatrix metropolis_matrix(const Graph& g) {
    if (!is_connected(g)) throw std::invalid_argument("metropolis_matrix: graph not connected");
    const int n = g.n;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j : g.adjacency[i]) {
            const double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
            w(i, j) = wij;
            off += wij;
        }
        w(i, i) = 1.0 - off;
    }
    return ConsensusMatrix{std::move(w)};
}

struct SpectralInfo {
    double lambda2 = 0.0;  // second-largest (signed) eigenvalue of P
    double gap = 1.0;      // 1 - sqrt(max(lambda2, 0))
};

// Second-largest eigenvalue of a symmetric doubly stochastic matrix via a
// full eigendecomposition (the toolkit operates at n <= 512, where a dense
// solve is the simplest reliable route). The convergence bounds assume the
// second-largest eigenvalue dominates in modulus; matrices where the most
// negative eigenvalue dominates are rejected rather than silently patched.
inline SpectralInfo spectral_info(const ConsensusMatrix& p) {
    const int n = p.size();
    if (n < 1) throw std::invalid_argument("spectral_info: empty matrix");
    if (n == 1) return SpectralInfo{0.0, 1.0};

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p.weights, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_info: eigensolver failed");
    const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
    const double lambda2 = evals(n - 2);
    const double lambda_min = evals(0);
    if (std::abs(lambda_min) > lambda2 + 1e-12)
        throw std::domain_error(
            "spectral_info: the most negative eigenvalue dominates the second-largest one; "
            "the sqrt(lambda2) mixing bounds do not apply to this matrix");
    return SpectralInfo{lambda2, 1.0 - std::sqrt(std::max(lambda2, 0.0))};
}

// l1 distance between row `row` of P^t and the uniform distribution,
// computed with repeated matrix-vector products.
inline double mixing_l1_distance(const ConsensusMatrix& p, int t, int row) {
    const int n = p.size();
    if (row < 0 || row >= n) throw std::out_of_range("mixing_l1_distance: row out of range");
    if (t < 0) throw std::invalid_argument("mixing_l1_distance: negative power");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(row) = 1.0;
    for (int s = 0; s < t; ++s) v = p.weights * v;  // P symmetric: row of P^t
    return (Eigen::VectorXd::Constant(n, 1.0 / n) - v).lpNorm<1>();
}

}  // namespace dda
