#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dda {

// When nodes exchange dual variables. Fixed-period schedules communicate at
// every multiple of h (h = 1 and EveryRound coincide). Power-law schedules
// space communications by growing gaps h_j = max(1, round(j^p)): the j-th
// exchange happens at iteration h_1 + ... + h_j.
struct Schedule {
    enum class Kind { every_round, fixed_period, power_law };

    Kind kind = Kind::every_round;
    long period = 1;       // fixed_period
    double exponent = 0.0; // power_law

    static Schedule every() { return Schedule{Kind::every_round, 1, 0.0}; }

    static Schedule fixed(long h) {
        if (h < 1) throw std::invalid_argument("schedule: period must be >= 1");
        return Schedule{Kind::fixed_period, h, 0.0};
    }

    static Schedule power(double p) {
        if (p < 0.0) throw std::invalid_argument("schedule: power-law exponent must be >= 0");
        return Schedule{Kind::power_law, 1, p};
    }

    std::string label() const {
        std::ostringstream out;
        switch (kind) {
            case Kind::every_round: out << "every"; break;
            case Kind::fixed_period: out << "h" << period; break;
            case Kind::power_law: out << "p" << exponent; break;
        }
        return out.str();
    }

    // Accepts "every", "h<int>" (e.g. "h2"), or "p<float>" (e.g. "p0.3").
    static std::optional<Schedule> parse(std::string_view text) {
        if (text == "every") return every();
        if (text.size() < 2) return std::nullopt;
        const std::string body(text.substr(1));
        try {
            std::size_t used = 0;
            if (text[0] == 'h') {
                const long h = std::stol(body, &used);
                if (used != body.size() || h < 1) return std::nullopt;
                return fixed(h);
            }
            if (text[0] == 'p') {
                const double p = std::stod(body, &used);
                if (used != body.size() || p < 0.0) return std::nullopt;
                return power(p);
            }
        } catch (const std::exception&) {
            return std::nullopt;
        }
        return std::nullopt;
    }
};

// Gap between the (j-1)-st and j-th communication under a power-law
// schedule, rounded to a positive integer.
inline long power_law_gap(double p, long j) {
    const long rounded = static_cast<long>(std::llround(std::pow(static_cast<double>(j), p)));
    return std::max(1L, rounded);
}

// True iff a consensus exchange happens at iteration t (t >= 1).
inline bool is_comm_round(const Schedule& s, long t) {
    if (t < 1) throw std::invalid_argument("is_comm_round: iterations start at 1");
    switch (s.kind) {
        case Schedule::Kind::every_round:
            return true;
        case Schedule::Kind::fixed_period:
            return t % s.period == 0;
        case Schedule::Kind::power_law: {
            long at = 0;
            for (long j = 1; at < t; ++j) {
                at += power_law_gap(s.exponent, j);
                if (at == t) return true;
            }
            return false;
        }
    }
    return false;
}

// Number of communication rounds among iterations 1..T (H_T).
inline long comm_count(const Schedule& s, long T) {
    if (T < 0) throw std::invalid_argument("comm_count: negative horizon");
    switch (s.kind) {
        case Schedule::Kind::every_round:
            return T;
        case Schedule::Kind::fixed_period:
            return T / s.period;
        case Schedule::Kind::power_law: {
            long count = 0;
            long at = 0;
            for (long j = 1;; ++j) {
                at += power_law_gap(s.exponent, j);
                if (at > T) break;
                ++count;
            }
            return count;
        }
    }
    return 0;
}

// Streams the comm/no-comm decision one iteration at a time; equivalent to
// calling is_comm_round(s, t) for t = 1, 2, ... without the rescan.
class ScheduleCursor {
public:
    explicit ScheduleCursor(Schedule s) : schedule_(s) {
        if (schedule_.kind == Schedule::Kind::power_law)
            next_comm_at_ = power_law_gap(schedule_.exponent, 1);
    }

    // Advances to the next iteration and reports whether it communicates.
    bool advance() {
        ++t_;
        switch (schedule_.kind) {
            case Schedule::Kind::every_round:
                return true;
            case Schedule::Kind::fixed_period:
                return t_ % schedule_.period == 0;
            case Schedule::Kind::power_law:
                if (t_ == next_comm_at_) {
                    ++comm_index_;
                    next_comm_at_ += power_law_gap(schedule_.exponent, comm_index_ + 1);
                    return true;
                }
                return false;
        }
        return false;
    }

    long iteration() const { return t_; }

private:
    Schedule schedule_;
    long t_ = 0;
    long comm_index_ = 0;
    long next_comm_at_ = 0;
};

// Step-size rule a(t) = A / t^q for t >= 1.
struct StepSize {
    double scale = 1.0;    // A
    double exponent = 0.5; // q

    double at(long t) const {
        if (t < 1) throw std::invalid_argument("step size: t >= 1 required");
        if (scale <= 0.0) throw std::invalid_argument("step size: A must be positive");
        return scale / std::pow(static_cast<double>(t), exponent);
    }
};

}  // namespace dda
