#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dda/simulator.hpp"

namespace dda {

// Shortest exact decimal for CSV cells: 17 significant digits round-trip
// any double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trace_to_csv(const Trace& trace) {
    std::string out = "t,virtual_time,avg_F,max_F,max_net_err,comm_rounds,max_subgrad_norm\n";
    for (const TraceRow& row : trace.rows) {
        out += std::to_string(row.t);
        out += ',';
        out += format_double(row.virtual_time);
        out += ',';
        out += format_double(row.avg_F);
        out += ',';
        out += format_double(row.max_F);
        out += ',';
        out += format_double(row.max_net_err);
        out += ',';
        out += std::to_string(row.comm_rounds);
        out += ',';
        out += format_double(row.max_subgrad_norm);
        out += '\n';
    }
    return out;
}

// One line per sweep point. Points that never reached the target keep
// iters_to_target = -1 and a nan time with converged = 0; they are never
// zero-filled.
inline std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = "point,iters_to_target,time_to_target,final_avg_F,converged\n";
    for (const SweepPoint& p : sweep.points) {
        out += p.point;
        out += ',';
        out += std::to_string(p.iters_to_target);
        out += ',';
        out += format_double(p.time_to_target);
        out += ',';
        out += format_double(p.final_avg_F);
        out += ',';
        out += p.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace dda
