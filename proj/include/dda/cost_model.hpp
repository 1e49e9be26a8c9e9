#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dda/schedule.hpp"

namespace dda {

// Inputs of the virtual-time model: r is the time to transmit and receive
// one message, in units of one full-dataset subgradient computation.
struct TradeoffParams {
    double r = 0.0;
    int n = 1;
    int k = 0;
    double lambda2 = 0.0;
    double lipschitz = 1.0;  // L
    double radius = 1.0;     // R

    void validate() const {
        if (r < 0.0) throw std::invalid_argument("tradeoff params: r must be >= 0");
        if (n < 1) throw std::invalid_argument("tradeoff params: n must be >= 1");
        if (k < 0 || k > n - 1) throw std::invalid_argument("tradeoff params: need 0 <= k <= n-1");
        if (lambda2 < 0.0 || lambda2 >= 1.0)
            throw std::invalid_argument("tradeoff params: need 0 <= lambda2 < 1");
        if (lipschitz <= 0.0 || radius <= 0.0)
            throw std::invalid_argument("tradeoff params: L and R must be positive");
    }
};

struct CostBreakdown {
    double compute_time = 0.0;  // T / n
    double comm_time = 0.0;     // H_T * k * r
    double total = 0.0;
};

// Cost of one iteration that communicates: 1/n + k*r time units.
inline double iteration_cost(const TradeoffParams& params) {
    params.validate();
    return 1.0 / params.n + params.k * params.r;
}

// Virtual time of T iterations under a schedule: cheap rounds cost 1/n,
// communicating rounds add k*r, so tau = T/n + H_T * k * r.
inline CostBreakdown tau_of_T(long T, const TradeoffParams& params, const Schedule& schedule) {
    params.validate();
    if (T < 0) throw std::invalid_argument("tau_of_T: negative horizon");
    CostBreakdown cost;
    cost.compute_time = static_cast<double>(T) / params.n;
    cost.comm_time = static_cast<double>(comm_count(schedule, T)) * params.k * params.r;
    cost.total = cost.compute_time + cost.comm_time;
    return cost;
}

// Optimal processor count for a complete graph, n_opt =1/sqrt(r).
// Free communication makes it unbounded; +infinity signals that case.
inline double n_opt(double r) {
    if (r < 0.0) throw std::invalid_argument("n_opt: r must be >= 0");
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(r);
}

// Optimal fixed communication period, h_opt = sqrt(nkr / (18 + 12/(1-sqrt(lambda2)))).
// Returned as a real; callers round and clamp to >= 1.
inline double h_opt(const TradeoffParams& params) {
    params.validate();
    const double denom = 18.0 + 12.0 / (1.0 - std::sqrt(params.lambda2));
    return std::sqrt(static_cast<double>(params.n) * params.k * params.r / denom);
}

inline double constant_C1(double lipschitz, double radius, double lambda2) {
    if (lambda2 < 0.0 || lambda2 >= 1.0) throw std::invalid_argument("C1: need 0 <= lambda2 < 1");
    return 2.0 * lipschitz * radius * std::sqrt(19.0 + 12.0 / (1.0 - std::sqrt(lambda2)));
}

inline double constant_Ch(double lipschitz, double radius, double lambda2, long h) {
    if (lambda2 < 0.0 || lambda2 >= 1.0) throw std::invalid_argument("Ch: need 0 <= lambda2 < 1");
    if (h < 1) throw std::invalid_argument("Ch: h must be >= 1");
    const double hh = static_cast<double>(h);
    return 2.0 * radius * lipschitz *
           std::sqrt(1.0 + 18.0 * hh + 12.0 * hh / (1.0 - std::sqrt(lambda2)));
}

inline double constant_Cp(double lipschitz, double radius, double lambda2, double p) {
    if (lambda2 < 0.0 || lambda2 >= 1.0) throw std::invalid_argument("Cp: need 0 <= lambda2 < 1");
    if (p < 0.0) throw std::invalid_argument("Cp: p must be >= 0");
    return 2.0 * lipschitz * radius *
           std::sqrt(7.0 + (12.0 * p + 12.0) / ((3.0 * p + 1.0) * (1.0 - std::sqrt(lambda2))) +
                     12.0 / (2.0 * p + 1.0));
}

// Predicted time to reach an epsilon-accurate solution, log factors
// dropped. Every-round and fixed-period regimes use their closed forms;
// the power-law regime combines the iteration count T = (C_p/eps)^(2/(1-2p))
// with the explicit clock expression T/n + H_T * k * r. Predictions only:
// measured runs always report their true iteration counts.
inline double tau_epsilon(double epsilon, const TradeoffParams& params, const Schedule& schedule) {
    params.validate();
    if (epsilon <= 0.0) throw std::invalid_argument("tau_epsilon: epsilon must be positive");
    switch (schedule.kind) {
        case Schedule::Kind::every_round: {
            const double c1 = constant_C1(params.lipschitz, params.radius, params.lambda2);
            return (c1 * c1 / (epsilon * epsilon)) * (1.0 / params.n + params.k * params.r);
        }
        case Schedule::Kind::fixed_period: {
            const double ch =
                constant_Ch(params.lipschitz, params.radius, params.lambda2, schedule.period);
            return (ch * ch / (epsilon * epsilon)) *
                   (1.0 / params.n + params.k * params.r / schedule.period);
        }
        case Schedule::Kind::power_law: {
            const double p = schedule.exponent;
            if (p >= 0.5)
                throw std::invalid_argument("tau_epsilon: power-law regime needs p < 1/2");
            const double cp = constant_Cp(params.lipschitz, params.radius, params.lambda2, p);
            const double iterations = std::pow(cp / epsilon, 2.0 / (1.0 - 2.0 * p));
            double comms;
            if (iterations <= 1e8) {
                comms = static_cast<double>(
                    comm_count(schedule, static_cast<long>(std::ceil(iterations))));
            } else {
                // Integral approximation of the gap cumsum inverse for
                // horizons too long to enumerate.
                comms = std::pow((p + 1.0) * iterations + 1.0, 1.0 / (p + 1.0));
            }
            return iterations / params.n + comms * params.k * params.r;
        }
    }
    throw std::logic_error("tau_epsilon: unreachable");
}

// Tradeoff ratio from measured timings: r = comm_seconds / comp_seconds.
inline double estimate_r(double comp_seconds, double comm_seconds) {
    if (comp_seconds <= 0.0) throw std::invalid_argument("estimate_r: compute time must be positive");
    if (comm_seconds < 0.0) throw std::invalid_argument("estimate_r: negative communication time");
    return comm_seconds / comp_seconds;
}

}  // namespace dda
