#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "evokit/errors.hpp"

namespace evokit {

enum class Direction { minimize, maximize };

/// Piecewise-linear map from raw criterion values to the uniform [0,1] quality
/// scale. Outside the breakpoint span the end qualities apply (clamp).
struct Breakpoint {
    double raw;
    double quality;
};

struct Criterion {
    std::string id;
    std::string name;
    Direction direction = Direction::maximize;
    std::vector<Breakpoint> breakpoints;  // strictly monotone in raw
    double weight = 0.0;
    bool auxiliary = false;

    void check() const {
        if (breakpoints.size() < 2)
            throw ConfigError("criterion " + id + ": needs at least two breakpoints");
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            if (breakpoints[i].quality < 0.0 || breakpoints[i].quality > 1.0)
                throw ConfigError("criterion " + id + ": quality outside [0,1]");
            if (i > 0 && breakpoints[i].raw <= breakpoints[i - 1].raw)
                throw ConfigError("criterion " + id + ": breakpoints not strictly increasing");
        }
        if (weight < 0.0)
            throw ConfigError("criterion " + id + ": negative weight");
    }
};

inline double normalize(const Criterion& c, double raw_value) {
    const auto& bp = c.breakpoints;
    if (raw_value <= bp.front().raw) return bp.front().quality;
    if (raw_value >= bp.back().raw) return bp.back().quality;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (raw_value <= bp[i].raw) {
            double t = (raw_value - bp[i - 1].raw) / (bp[i].raw - bp[i - 1].raw);
            return bp[i - 1].quality + t * (bp[i].quality - bp[i - 1].quality);
        }
    }
    return bp.back().quality;
}

/// Multiplicative penalty: a nonnegative violation measure mapped to a factor
/// in [0,1], non-increasing, with factor(0) = 1.
struct PenaltySpec {
    std::string id;
    std::string violation_measure;
    std::vector<Breakpoint> mapping;  // violation -> factor

    void check() const {
        if (mapping.size() < 2)
            throw ConfigError("penalty " + id + ": needs at least two breakpoints");
        if (mapping.front().raw != 0.0 || mapping.front().quality != 1.0)
            throw ConfigError("penalty " + id + ": zero violation must map to 1");
        for (std::size_t i = 0; i < mapping.size(); ++i) {
            if (mapping[i].quality < 0.0 || mapping[i].quality > 1.0)
                throw ConfigError("penalty " + id + ": factor outside [0,1]");
            if (i > 0 && (mapping[i].raw <= mapping[i - 1].raw ||
                          mapping[i].quality > mapping[i - 1].quality))
                throw ConfigError("penalty " + id + ": mapping not non-increasing");
        }
    }

    double factor(double violation) const {
        Criterion helper;
        helper.id = id;
        helper.breakpoints = mapping;
        return normalize(helper, violation);
    }
};

struct FitnessReport {
    std::vector<double> raw_values;
    std::vector<double> qualities;
    double raw_fitness = 0.0;
    std::vector<double> penalty_factors;
    double final_fitness = 0.0;
};

inline double weighted_sum(const std::vector<double>& qualities,
                           const std::vector<double>& weights) {
    if (qualities.size() != weights.size())
        throw ShapeError("weighted_sum: length mismatch");
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-9)
        throw WeightError("weights sum to " + std::to_string(wsum));
    double f = 0.0;
    for (std::size_t i = 0; i < qualities.size(); ++i) f += weights[i] * qualities[i];
    return f;
}

inline double apply_penalties(double raw_fitness, const std::vector<double>& penalty_factors) {
    double f = raw_fitness;
    for (double p : penalty_factors) {
        if (p < 0.0 || p > 1.0)
            throw PenaltyRangeError("factor " + std::to_string(p));
        f *= p;
    }
    return f;
}

/// Complete criteria + penalty specification of a problem.
struct FitnessSpec {
    std::vector<Criterion> criteria;
    std::vector<PenaltySpec> penalties;

    void check() const {
        double wsum = 0.0;
        for (const auto& c : criteria) {
            c.check();
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-9)
            throw WeightError("criterion weights sum to " + std::to_string(wsum));
        for (const auto& p : penalties) p.check();
    }

    /// Rescales criterion weights so they sum to exactly 1.
    void normalize_weights() {
        double wsum = 0.0;
        for (const auto& c : criteria) wsum += c.weight;
        if (wsum <= 0.0) throw WeightError("cannot normalize zero weights");
        for (auto& c : criteria) c.weight /= wsum;
    }

    FitnessReport assess(const std::vector<double>& raw_values,
                         const std::vector<double>& violations) const {
        if (raw_values.size() != criteria.size())
            throw ShapeError("raw value count != criterion count");
        if (violations.size() != penalties.size())
            throw ShapeError("violation count != penalty count");
        FitnessReport r;
        r.raw_values = raw_values;
        std::vector<double> weights;
        for (std::size_t i = 0; i < criteria.size(); ++i) {
            r.qualities.push_back(normalize(criteria[i], raw_values[i]));
            weights.push_back(criteria[i].weight);
        }
        r.raw_fitness = weighted_sum(r.qualities, weights);
        for (std::size_t i = 0; i < penalties.size(); ++i)
            r.penalty_factors.push_back(penalties[i].factor(violations[i]));
        r.final_fitness = apply_penalties(r.raw_fitness, r.penalty_factors);
        return r;
    }
};

/// Fitness shaping over a forbidden region: infeasible points are mapped into
/// [c0, c1], rising linearly as the feasibility distance shrinks, so the
/// landscape guides individuals toward the feasible boundary and rewards
/// leaving the zone with a fitness jump.
template <typename Phenotype>
struct ForbiddenZoneShaper {
    std::function<double(const Phenotype&)> feasibility_distance;  // 0 iff feasible
    double d_max = 1.0;
    double c0 = 0.0;
    double c1 = 1.0;
    double boundary_margin = 0.5;            // beta in (0,1)
    double feasible_boundary_min_fitness = 0.0;

    void check() const {
        if (!(c0 < c1)) throw ConfigError("shaper: c0 must be < c1");
        if (!(d_max > 0)) throw ConfigError("shaper: d_max must be positive");
        if (boundary_margin <= 0 || boundary_margin >= 1)
            throw ConfigError("shaper: boundary_margin outside (0,1)");
        if (c1 > boundary_margin * feasible_boundary_min_fitness)
            throw ConfigError("shaper: c1 exceeds margin * boundary fitness estimate");
    }

    double shape(const Phenotype& x, double base_fitness) const {
        double d = feasibility_distance(x);
        if (d <= 0.0) return base_fitness;
        return c0 + (c1 - c0) * (1.0 - std::min(d, d_max) / d_max);
    }
};

/// Direction-aware Pareto dominance: a dominates b iff a is no worse in every
/// criterion and strictly better in at least one.
inline bool dominates(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<Direction>& directions) {
    if (a.size() != b.size() || a.size() != directions.size())
        throw ShapeError("dominates: length mismatch");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = directions[i] == Direction::maximize ? a[i] : -a[i];
        double db = directions[i] == Direction::maximize ? b[i] : -b[i];
        if (da < db) return false;
        if (da > db) strictly_better = true;
    }
    return strictly_better;
}

inline std::vector<std::vector<double>> nondominated_front(
    const std::vector<std::vector<double>>& points, const std::vector<Direction>& directions) {
    std::vector<std::vector<double>> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            if (j != i && dominates(points[j], points[i], directions)) dominated = true;
        if (!dominated) front.push_back(points[i]);
    }
    return front;
}

}  // namespace evokit
