#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace dda {

// Even partition of m data points over n nodes: node i owns the contiguous
// block [i*m/n, (i+1)*m/n). Requires n | m.
struct Partition {
    int total = 0;
    int nodes = 0;

    Partition(int m, int n) : total(m), nodes(n) {
        if (m < 1 || n < 1) throw std::invalid_argument("partition: m and n must be positive");
        if (m % n != 0)
            throw std::invalid_argument("partition: node count must divide data point count");
    }

    int per_node() const { return total / nodes; }

    int global_index(int node, int local) const {
        if (node < 0 || node >= nodes) throw std::out_of_range("partition: node out of range");
        if (local < 0 || local >= per_node()) throw std::out_of_range("partition: local index out of range");
        return node * per_node() + local;
    }
};

// Pluggable convex objective: F(x) = (1/n) sum_i f_i(x) with per-node
// evaluation, subgradient, and projection onto the feasible set. Oracles
// are immutable after construction; all methods are safe to call
// concurrently from per-node workers.
class ObjectiveOracle {
public:
    virtual ~ObjectiveOracle() = default;

    virtual int dim() const = 0;
    virtual int node_count() const = 0;

    virtual double eval_local(int node, const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd subgradient(int node, const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd project(Eigen::VectorXd x) const = 0;

    double eval_global(const Eigen::VectorXd& x) const {
        double sum = 0.0;
        for (int i = 0; i < node_count(); ++i) sum += eval_local(i, x);
        return sum / node_count();
    }

    // Subgradient-norm bound L over the region runs actually visit
    // (empirical estimate for generated instances) and a radius R with
    // psi(x*) <= R^2 for the proximal function psi(x) = ||x||^2 / 2.
    virtual double lipschitz() const = 0;
    virtual double radius() const = 0;

    // Certified optimum F*, when the instance carries one.
    virtual std::optional<double> reference_optimum() const { return std::nullopt; }
};

}  // namespace dda
