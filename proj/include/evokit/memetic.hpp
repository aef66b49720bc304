#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "evokit/problems/problem.hpp"
#include "evokit/problems/tsp.hpp"

namespace evokit {

/// Evaluation callback handed to local searchers. The caller owns evaluation
/// accounting (archive, counters); searchers just call it.
using EvalFn = std::function<FitnessReport(const Chromosome&)>;

struct LsOutcome {
    Chromosome chromosome;
    FitnessReport report;
    std::size_t evaluations = 0;
};

/// Contract: the outcome's final_fitness is never below the input's, and
/// evaluations never exceed the budget.
using LocalSearcher = std::function<LsOutcome(const Chromosome&, const FitnessReport&,
                                              const EvalFn&, std::size_t budget, Rng&)>;

enum class LsSelectionMode { random, best_fitness };

struct MemeticConfig {
    std::string ls_id = "hill_climb_real";
    bool lamarckian = true;              // write the improved chromosome back
    double offspring_fraction = 1.0;     // p_ls
    LsSelectionMode selection_mode = LsSelectionMode::best_fitness;
    std::size_t ls_budget = 100;         // max evaluations per LS call
    double init_improve_fraction = 0.0;
    double heuristic_seed_cap = 0.2;     // warn above this seeded fraction

    void check() const {
        if (offspring_fraction < 0 || offspring_fraction > 1)
            throw ConfigError("offspring_fraction outside [0,1]");
        if (init_improve_fraction < 0 || init_improve_fraction > 1)
            throw ConfigError("init_improve_fraction outside [0,1]");
        if (ls_budget < 1) throw ConfigError("ls_budget must be >= 1");
    }
};

/// Coordinate-wise adaptive-step climber for numeric gene parameters. Steps
/// double on success and halve on failure, clamped to the bounds; stops on
/// budget or step underflow. Never returns a worse individual.
inline LocalSearcher make_hill_climb_real(const GenomeRegistry& registry) {
    return [&registry](const Chromosome& start, const FitnessReport& start_report,
                       const EvalFn& eval, std::size_t budget, Rng& rng) -> LsOutcome {
        struct Coord {
            std::size_t gene, param;
            double lower, upper;
            bool integer;
        };
        std::vector<Coord> coords;
        for (std::size_t gi = 0; gi < start.genes.size(); ++gi) {
            const GeneType& gt = registry.type_of(start.genes[gi].type_id);
            for (std::size_t pi = 0; pi < gt.params.size(); ++pi) {
                const ParamSpec& p = gt.params[pi];
                if (p.upper > p.lower)
                    coords.push_back({gi, pi, p.lower, p.upper,
                                      p.kind == ParamKind::integer});
            }
        }
        if (coords.empty())
            throw LsApplicabilityError("hill_climb_real: chromosome has no numeric parameters");

        LsOutcome out{start, start_report, 0};
        std::vector<double> step(coords.size());
        for (std::size_t k = 0; k < coords.size(); ++k)
            step[k] = 0.1 * (coords[k].upper - coords[k].lower);

        (void)rng;
        bool any_live = true;
        while (any_live && out.evaluations < budget) {
            any_live = false;
            for (std::size_t k = 0; k < coords.size() && out.evaluations < budget; ++k) {
                const Coord& co = coords[k];
                double min_step = co.integer ? 1.0 : 1e-9 * (co.upper - co.lower);
                if (step[k] < min_step) continue;
                any_live = true;

                double current = out.chromosome.genes[co.gene].values[co.param];
                bool improved = false;
                for (double dir : {+1.0, -1.0}) {
                    if (out.evaluations >= budget) break;
                    double s = co.integer ? std::max(1.0, std::round(step[k])) : step[k];
                    double v = std::clamp(current + dir * s, co.lower, co.upper);
                    if (co.integer) v = std::round(v);
                    if (v == current) continue;
                    Chromosome trial = out.chromosome;
                    trial.genes[co.gene].values[co.param] = v;
                    FitnessReport r = eval(trial);
                    ++out.evaluations;
                    if (r.final_fitness > out.report.final_fitness) {
                        out.chromosome = std::move(trial);
                        out.report = r;
                        step[k] = std::min(step[k] * 2.0, co.upper - co.lower);
                        improved = true;
                        break;
                    }
                }
                if (!improved) step[k] /= 2.0;
            }
        }
        return out;
    };
}

/// Best-improvement 2-opt on a permutation-coded tour. Edge exchanges use
/// delta costs; one evaluation is charged per applied exchange plus the final
/// report, so the budget bounds the number of improving moves.
inline LocalSearcher make_two_opt(const TspInstance& instance) {
    return [instance](const Chromosome& start, const FitnessReport& start_report,
                      const EvalFn& eval, std::size_t budget, Rng&) -> LsOutcome {
        std::size_t n = instance.n;
        Tour tour = tsp_decode_permutation(start, instance);

        std::size_t moves = 0;
        bool improved = true;
        while (improved && moves + 1 < budget) {
            improved = false;
            double best_delta = -1e-12;
            std::size_t best_i = 0, best_j = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    std::size_t a = tour[i] - 1, b = tour[(i + 1) % n] - 1;
                    std::size_t c = tour[j] - 1, d = tour[(j + 1) % n] - 1;
                    if (a == c || b == d) continue;
                    double delta = instance.dist[a][c] + instance.dist[b][d] -
                                   instance.dist[a][b] - instance.dist[c][d];
                    if (delta < best_delta) {
                        best_delta = delta;
                        best_i = i;
                        best_j = j;
                    }
                }
            }
            if (best_delta < -1e-12) {
                std::reverse(tour.begin() + static_cast<std::ptrdiff_t>(best_i + 1),
                             tour.begin() + static_cast<std::ptrdiff_t>(best_j + 1));
                ++moves;
                improved = true;
            }
        }

        // rebuild the chromosome in tour order
        Chromosome out_c = start;
        std::vector<Gene> genes;
        genes.reserve(n);
        for (std::size_t city : tour) {
            auto it = std::find_if(start.genes.begin(), start.genes.end(), [&](const Gene& g) {
                return g.type_id == "city" + std::to_string(city);
            });
            genes.push_back(*it);
        }
        out_c.genes = std::move(genes);

        if (moves == 0) return {start, start_report, 0};
        FitnessReport r = eval(out_c);
        if (r.final_fitness < start_report.final_fitness)
            return {start, start_report, 1};  // cannot happen for 2-opt, but honor the contract
        return {std::move(out_c), std::move(r), moves + 1};
    };
}

inline LocalSearcher make_local_searcher(const std::string& ls_id,
                                         const ProblemDefinition& problem,
                                         const TspInstance* tsp_instance = nullptr) {
    if (ls_id == "hill_climb_real") return make_hill_climb_real(problem.registry);
    if (ls_id == "two_opt") {
        if (!tsp_instance)
            throw LsApplicabilityError("two_opt requires a TSP instance");
        return make_two_opt(*tsp_instance);
    }
    throw LsApplicabilityError("unknown local searcher: " + ls_id);
}

/// Locally improves a subset of offspring. Lamarckian mode writes the
/// improved chromosome back; Baldwinian mode keeps the chromosome and only
/// takes the improved fitness.
template <typename IndividualT>
inline std::size_t improve_offspring(std::vector<IndividualT>& offspring,
                                     const MemeticConfig& config, const LocalSearcher& ls,
                                     const EvalFn& eval, Rng& rng) {
    if (offspring.empty() || config.offspring_fraction <= 0.0) return 0;
    std::size_t k = static_cast<std::size_t>(
        std::ceil(config.offspring_fraction * static_cast<double>(offspring.size())));
    k = std::min(k, offspring.size());

    std::vector<std::size_t> idx(offspring.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (config.selection_mode == LsSelectionMode::best_fitness) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return offspring[a].report.final_fitness > offspring[b].report.final_fitness;
        });
    } else {
        std::shuffle(idx.begin(), idx.end(), rng);
    }

    std::size_t evals = 0;
    for (std::size_t s = 0; s < k; ++s) {
        IndividualT& ind = offspring[idx[s]];
        LsOutcome res = ls(ind.chromosome, ind.report, eval, config.ls_budget, rng);
        evals += res.evaluations;
        if (config.lamarckian) ind.chromosome = std::move(res.chromosome);
        ind.report = std::move(res.report);
    }
    return evals;
}

}  // namespace evokit
