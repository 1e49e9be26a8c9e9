#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dda/metric.hpp"
#include "dda/problems.hpp"
#include "dda/quadmax.hpp"

namespace dda {

// Problem selection and generation parameters. When instance_file is set it
// takes precedence over generation; the file pins the data arrays so runs
// replay byte-for-byte.
struct ProblemSpec {
    std::string kind = "quadmax";  // "quadmax" | "metric"
    int dim = 10;                  // primal dim for quadmax, feature dim for metric
    int data_points = 40;
    int nodes = 4;
    std::uint64_t seed = 1;
    std::string instance_file;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("instance: ragged matrix");
        for (int c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
    }
    return m;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const QuadMaxProblem& p) {
    nlohmann::json j;
    j["kind"] = "quadmax";
    j["dim"] = p.dim();
    j["data_points"] = p.term_count();
    j["nodes"] = p.node_count();
    j["seed"] = p.seed();
    j["centers1"] = detail::matrix_to_json(p.centers1());
    j["centers2"] = detail::matrix_to_json(p.centers2());
    j["lipschitz"] = p.lipschitz();
    j["radius"] = p.radius();
    if (p.reference_optimum()) {
        j["f_star"] = *p.reference_optimum();
        nlohmann::json xs = nlohmann::json::array();
        for (double v : *p.minimizer()) xs.push_back(v);
        j["x_star"] = std::move(xs);
    }
    return j;
}

inline nlohmann::json instance_to_json(const MetricProblem& p) {
    nlohmann::json j;
    j["kind"] = "metric";
    j["dim"] = p.feature_dim();
    j["data_points"] = p.triple_count();
    j["nodes"] = p.node_count();
    j["seed"] = p.seed();
    nlohmann::json u = nlohmann::json::array(), v = nlohmann::json::array(),
                   s = nlohmann::json::array();
    for (const auto& t : p.triples()) {
        nlohmann::json ju = nlohmann::json::array(), jv = nlohmann::json::array();
        for (double x : t.u) ju.push_back(x);
        for (double x : t.v) jv.push_back(x);
        u.push_back(std::move(ju));
        v.push_back(std::move(jv));
        s.push_back(t.label);
    }
    j["u"] = std::move(u);
    j["v"] = std::move(v);
    j["s"] = std::move(s);
    j["lipschitz"] = p.lipschitz();
    j["radius"] = p.radius();
    return j;
}

inline std::unique_ptr<ObjectiveOracle> instance_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int dim = j.at("dim").get<int>();
    const int nodes = j.at("nodes").get<int>();
    const auto seed = j.value("seed", std::uint64_t{0});
    if (kind == "quadmax") {
        Eigen::MatrixXd c1 = detail::matrix_from_json(j.at("centers1"), dim);
        Eigen::MatrixXd c2 = detail::matrix_from_json(j.at("centers2"), dim);
        std::optional<double> f_star;
        std::optional<Eigen::VectorXd> x_star;
        if (j.contains("f_star")) {
            f_star = j.at("f_star").get<double>();
            const auto& xs = j.at("x_star");
            Eigen::VectorXd x(static_cast<Eigen::Index>(xs.size()));
            for (Eigen::Index c = 0; c < x.size(); ++c)
                x(c) = xs.at(static_cast<std::size_t>(c)).get<double>();
            x_star = std::move(x);
        }
        return std::make_unique<QuadMaxProblem>(dim, nodes, std::move(c1), std::move(c2),
                                                j.at("lipschitz").get<double>(),
                                                j.at("radius").get<double>(), f_star,
                                                std::move(x_star), seed);
    }
    if (kind == "metric") {
        const auto& u = j.at("u");
        const auto& v = j.at("v");
        const auto& s = j.at("s");
        if (u.size() != v.size() || u.size() != s.size())
            throw std::invalid_argument("instance: triple arrays disagree in length");
        std::vector<MetricTriple> triples(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            triples[i].u.resize(dim);
            triples[i].v.resize(dim);
            for (int c = 0; c < dim; ++c) {
                triples[i].u(c) = u.at(i).at(c).get<double>();
                triples[i].v(c) = v.at(i).at(c).get<double>();
            }
            triples[i].label = s.at(i).get<int>();
        }
        return std::make_unique<MetricProblem>(dim, nodes, std::move(triples),
                                               j.at("lipschitz").get<double>(),
                                               j.at("radius").get<double>(), seed);
    }
    throw std::invalid_argument("instance: unknown kind '" + kind + "'");
}

inline nlohmann::json generate_instance_json(const ProblemSpec& spec) {
    if (spec.kind == "quadmax")
        return instance_to_json(
            QuadMaxProblem::generate(spec.dim, spec.data_points, spec.nodes, spec.seed));
    if (spec.kind == "metric")
        return instance_to_json(
            MetricProblem::generate(spec.dim, spec.data_points, spec.nodes, spec.seed));
    throw std::invalid_argument("problem kind must be 'quadmax' or 'metric', got '" + spec.kind +
                                "'");
}

// Builds the oracle a config asks for: loads the pinned instance file when
// one is given, otherwise generates deterministically from the seed.
inline std::unique_ptr<ObjectiveOracle> make_oracle(const ProblemSpec& spec) {
    if (!spec.instance_file.empty()) {
        std::ifstream in(spec.instance_file);
        if (!in) throw std::invalid_argument("cannot open instance file: " + spec.instance_file);
        nlohmann::json j;
        in >> j;
        auto oracle = instance_from_json(j);
        if (oracle->node_count() != spec.nodes && spec.nodes != 0)
            throw std::invalid_argument("instance file has " +
                                        std::to_string(oracle->node_count()) +
                                        " nodes but config asks for " + std::to_string(spec.nodes));
        return oracle;
    }
    if (spec.kind == "quadmax")
        return std::make_unique<QuadMaxProblem>(
            QuadMaxProblem::generate(spec.dim, spec.data_points, spec.nodes, spec.seed));
    if (spec.kind == "metric")
        return std::make_unique<MetricProblem>(
            MetricProblem::generate(spec.dim, spec.data_points, spec.nodes, spec.seed));
    throw std::invalid_argument("problem kind must be 'quadmax' or 'metric', got '" + spec.kind +
                                "'");
}

}  // namespace dda
