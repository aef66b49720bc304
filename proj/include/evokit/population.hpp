#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "evokit/archive.hpp"
#include "evokit/memetic.hpp"
#include "evokit/problems/problem.hpp"
#include "evokit/variation.hpp"

namespace evokit {

enum class AcceptanceRule { better_parent, better_worst_in_deme };
enum class PopulationStructure { ring, panmictic };

struct TerminationConfig {
    std::uint64_t max_evaluations = 0;  // 0 = unset
    double target_fitness = std::numeric_limits<double>::quiet_NaN();  // NaN = unset
    std::size_t g_acc = 0;   // generations without acceptance per deme, 0 = unset
    std::size_t g_best = 0;  // generations without deme-best improvement, 0 = unset

    bool any_set() const {
        return max_evaluations > 0 || !std::isnan(target_fitness) || g_acc > 0 || g_best > 0;
    }
};

struct EngineConfig {
    std::size_t mu = 60;
    std::size_t deme_size = 9;  // odd, >= 3; typical 7..11
    AcceptanceRule acceptance = AcceptanceRule::better_parent;
    std::size_t offspring_per_pairing = 2;
    OperatorConfig operators;
    TerminationConfig termination;
    PopulationStructure structure = PopulationStructure::ring;

    void check() const {
        if (mu < 2) throw ConfigError("mu must be >= 2");
        if (structure == PopulationStructure::ring) {
            if (deme_size < 3 || deme_size % 2 == 0)
                throw ConfigError("deme size must be odd and >= 3");
            if (mu < 2 * deme_size)
                throw ConfigError("population must be at least twice the deme size");
        }
        if (offspring_per_pairing < 1)
            throw ConfigError("offspring_per_pairing must be >= 1");
        if (!termination.any_set())
            throw ConfigError("at least one termination criterion must be set");
        operators.check();
    }

    std::size_t effective_deme() const {
        return structure == PopulationStructure::panmictic ? mu : deme_size;
    }
};

struct Individual {
    Chromosome chromosome;
    FitnessReport report;
    std::uint64_t id = 0;
    std::size_t birth_generation = 0;
};

enum class RunStatus { running, target_reached, budget_exhausted, converged };

inline std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::running: return "running";
        case RunStatus::target_reached: return "target_reached";
        case RunStatus::budget_exhausted: return "budget_exhausted";
        case RunStatus::converged: return "converged";
    }
    return "?";
}

struct StepReport {
    std::vector<bool> accepted;             // per ring slot
    std::vector<bool> deme_best_improved;   // per deme (centered per slot)
    std::uint64_t evaluations_in_step = 0;
    std::size_t acceptance_count = 0;
};

struct ProgressRow {
    std::size_t generation;
    double best_fitness;
    double mean_fitness;
    std::uint64_t evaluations;
    std::size_t acceptances;
};

/// Ring/panmictic diffusion EA with overlapping demes, local elitist
/// acceptance, optional memetic improvement and an optional solution archive.
class EvolutionEngine {
public:
    EvolutionEngine(EngineConfig config, const ProblemDefinition& problem, std::uint64_t seed,
                    std::optional<MemeticConfig> memetic = std::nullopt,
                    LocalSearcher local_searcher = nullptr,
                    std::optional<SimilarityScheme> archive_scheme = std::nullopt,
                    std::size_t archive_capacity = 1000000)
        : config_(config), problem_(problem), rng_(seed) {
        config_.check();
        if (memetic) {
            memetic->check();
            if (!local_searcher)
                throw ConfigError("memetic configuration without a local searcher");
            memetic_ = *memetic;
            local_searcher_ = std::move(local_searcher);
        }
        if (archive_scheme)
            archive_.emplace(*archive_scheme, archive_capacity);
    }

    void init(const std::vector<Chromosome>& seeds = {}) {
        if (seeds.size() > config_.mu)
            throw SeedValidationError("more seeds than population slots");
        double cap = memetic_ ? memetic_->heuristic_seed_cap : 0.2;
        if (static_cast<double>(seeds.size()) > cap * static_cast<double>(config_.mu))
            warnings_.push_back("seeded fraction exceeds the recommended cap of " +
                                std::to_string(cap));
        for (const auto& s : seeds)
            if (!validate(problem_.registry, s).empty())
                throw SeedValidationError("seed chromosome fails validation");

        population_.clear();
        population_.resize(config_.mu);
        std::vector<bool> taken(config_.mu, false);
        for (std::size_t k = 0; k < seeds.size(); ++k) {
            std::size_t pos = k * config_.mu / seeds.size();  // evenly spaced on the ring
            population_[pos] = make_individual(seeds[k]);
            taken[pos] = true;
        }
        for (std::size_t i = 0; i < config_.mu; ++i)
            if (!taken[i]) population_[i] = make_individual(problem_.random(rng_));

        generation_ = 0;
        stagn_acc_.assign(config_.mu, 0);
        stagn_best_.assign(config_.mu, 0);
        deme_best_.assign(config_.mu, 0.0);
        for (std::size_t i = 0; i < config_.mu; ++i) deme_best_[i] = deme_best_fitness(i);

        if (memetic_ && memetic_->init_improve_fraction > 0.0)
            improve_initial();

        record_progress(0);
    }

    std::vector<std::size_t> deme_of(std::size_t position) const {
        std::size_t d = config_.effective_deme();
        std::size_t half = (d - 1) / 2;
        std::vector<std::size_t> out;
        out.reserve(d);
        if (config_.structure == PopulationStructure::panmictic) {
            for (std::size_t i = 0; i < config_.mu; ++i) out.push_back(i);
            return out;
        }
        for (std::size_t k = 0; k < d; ++k)
            out.push_back((position + config_.mu - half + k) % config_.mu);
        return out;
    }

    /// Deme-local partner selection by linear ranking on final fitness; ties
    /// are broken randomly so equal-fitness members are equally likely.
    std::size_t select_partner(std::size_t center) {
        std::vector<std::size_t> deme = deme_of(center);
        std::vector<std::size_t> others;
        for (std::size_t p : deme)
            if (p != center) others.push_back(p);

        std::vector<double> key(others.size());
        for (std::size_t k = 0; k < others.size(); ++k)
            key[k] = uniform_real(rng_, 0.0, 1.0);
        std::vector<std::size_t> idx(others.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            double fa = population_[others[a]].report.final_fitness;
            double fb = population_[others[b]].report.final_fitness;
            if (fa != fb) return fa > fb;
            return key[a] < key[b];
        });

        double s = config_.operators.selection_pressure;
        std::size_t m = others.size();
        double u = uniform_real(rng_, 0.0, 1.0);
        double acc = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            double p = m == 1 ? 1.0
                              : (s - 2.0 * (s - 1.0) * static_cast<double>(r) /
                                         static_cast<double>(m - 1)) /
                                    static_cast<double>(m);
            acc += p;
            if (u <= acc) return others[idx[r]];
        }
        return others[idx[m - 1]];
    }

    /// One generation: offspring for every ring slot from the pre-step
    /// population, then acceptance in deterministic slot order.
    StepReport step() {
        StepReport report;
        report.accepted.assign(config_.mu, false);
        report.deme_best_improved.assign(config_.mu, false);
        std::uint64_t evals_before = evaluations_;

        ++generation_;
        std::vector<std::optional<Individual>> candidates(config_.mu);
        for (std::size_t slot = 0; slot < config_.mu; ++slot) {
            std::size_t partner = select_partner(slot);
            std::vector<Individual> offspring =
                make_offspring(population_[slot], population_[partner]);
            if (memetic_ && memetic_->offspring_fraction > 0.0)
                evaluations_stay_ += improve_offspring(offspring, *memetic_, local_searcher_,
                                                       counting_eval(), rng_);
            auto best = std::max_element(offspring.begin(), offspring.end(),
                                         [](const Individual& a, const Individual& b) {
                                             return a.report.final_fitness <
                                                    b.report.final_fitness;
                                         });
            if (best != offspring.end()) candidates[slot] = std::move(*best);
        }

        // acceptance pass, strict local elitism
        std::vector<double> worst_in_deme(config_.mu, 0.0);
        if (config_.acceptance == AcceptanceRule::better_worst_in_deme)
            for (std::size_t slot = 0; slot < config_.mu; ++slot) {
                double w = std::numeric_limits<double>::infinity();
                for (std::size_t p : deme_of(slot))
                    w = std::min(w, population_[p].report.final_fitness);
                worst_in_deme[slot] = w;
            }

        for (std::size_t slot = 0; slot < config_.mu; ++slot) {
            if (!candidates[slot]) continue;
            double cand = candidates[slot]->report.final_fitness;
            double threshold = config_.acceptance == AcceptanceRule::better_parent
                                   ? population_[slot].report.final_fitness
                                   : worst_in_deme[slot];
            if (cand > threshold) {
                population_[slot] = std::move(*candidates[slot]);
                report.accepted[slot] = true;
                ++report.acceptance_count;
            }
        }

        // stagnation bookkeeping per deme
        for (std::size_t slot = 0; slot < config_.mu; ++slot) {
            bool deme_accepted = false;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t p : deme_of(slot)) {
                if (report.accepted[p]) deme_accepted = true;
                best = std::max(best, population_[p].report.final_fitness);
            }
            stagn_acc_[slot] = deme_accepted ? 0 : stagn_acc_[slot] + 1;
            if (best > deme_best_[slot]) {
                stagn_best_[slot] = 0;
                report.deme_best_improved[slot] = true;
                deme_best_[slot] = best;
            } else {
                ++stagn_best_[slot];
            }
        }

        report.evaluations_in_step = evaluations_ - evals_before;
        record_progress(report.acceptance_count);
        return report;
    }

    RunStatus check_termination() const {
        const TerminationConfig& t = config_.termination;
        if (!std::isnan(t.target_fitness) && best().report.final_fitness >= t.target_fitness)
            return RunStatus::target_reached;
        if (t.max_evaluations > 0 && evaluations_ >= t.max_evaluations)
            return RunStatus::budget_exhausted;
        if (t.g_acc > 0 &&
            std::all_of(stagn_acc_.begin(), stagn_acc_.end(),
                        [&](std::size_t g) { return g >= t.g_acc; }))
            return RunStatus::converged;
        if (t.g_best > 0 &&
            std::all_of(stagn_best_.begin(), stagn_best_.end(),
                        [&](std::size_t g) { return g >= t.g_best; }))
            return RunStatus::converged;
        return RunStatus::running;
    }

    RunStatus run() {
        if (population_.empty()) init();
        RunStatus status = check_termination();
        while (status == RunStatus::running) {
            step();
            status = check_termination();
        }
        return status;
    }

    const Individual& best() const {
        return *std::max_element(population_.begin(), population_.end(),
                                 [](const Individual& a, const Individual& b) {
                                     return a.report.final_fitness < b.report.final_fitness;
                                 });
    }

    const std::vector<Individual>& population() const { return population_; }
    std::uint64_t evaluations() const { return evaluations_; }
    std::size_t generation() const { return generation_; }
    const std::vector<ProgressRow>& progress() const { return progress_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    const std::vector<std::size_t>& stagnation_acc() const { return stagn_acc_; }
    const SolutionArchive* archive() const { return archive_ ? &*archive_ : nullptr; }
    const EngineConfig& config() const { return config_; }

private:
    EvalFn counting_eval() {
        return [this](const Chromosome& c) {
            auto evaluate = [this](const Chromosome& x) {
                ++evaluations_;
                return problem_.assess(x);
            };
            if (archive_)
                return archive_->lookup_or_evaluate(problem_.registry, c, evaluate);
            return evaluate(c);
        };
    }

    Individual make_individual(Chromosome c) {
        Individual ind;
        ind.report = counting_eval()(c);
        ind.chromosome = std::move(c);
        ind.id = next_id_++;
        ind.birth_generation = generation_;
        return ind;
    }

    double deme_best_fitness(std::size_t slot) const {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t p : deme_of(slot))
            best = std::max(best, population_[p].report.final_fitness);
        return best;
    }

    void improve_initial() {
        std::size_t k = static_cast<std::size_t>(std::ceil(
            memetic_->init_improve_fraction * static_cast<double>(config_.mu)));
        k = std::min(k, config_.mu);
        std::vector<std::size_t> idx(config_.mu);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng_);
        EvalFn eval = counting_eval();
        for (std::size_t s = 0; s < k; ++s) {
            Individual& ind = population_[idx[s]];
            // initialization is always Lamarckian
            LsOutcome res = local_searcher_(ind.chromosome, ind.report, eval,
                                            memetic_->ls_budget, rng_);
            ind.chromosome = std::move(res.chromosome);
            ind.report = std::move(res.report);
        }
        for (std::size_t i = 0; i < config_.mu; ++i) deme_best_[i] = deme_best_fitness(i);
    }

    bool sequence_ops_allowed() const {
        return problem_.registry.structure != StructureKind::fixed_layout;
    }

    Chromosome mutate(Chromosome c) {
        const OperatorConfig& oc = config_.operators;
        struct Op {
            double weight;
            int kind;  // 0 param, 1 shift gene, 2 shift segment, 3 invert, 4 insert, 5 delete
        };
        std::vector<Op> ops;
        bool has_params = false;
        for (const auto& g : c.genes)
            if (!g.values.empty()) has_params = true;
        if (has_params && oc.w_parameter > 0) ops.push_back({oc.w_parameter, 0});
        if (sequence_ops_allowed() && c.genes.size() >= 2) {
            if (oc.w_shift_gene > 0) ops.push_back({oc.w_shift_gene, 1});
            if (oc.w_shift_segment > 0 && c.genes.size() >= 3)
                ops.push_back({oc.w_shift_segment, 2});
            if (oc.w_invert_segment > 0) ops.push_back({oc.w_invert_segment, 3});
        }
        if (c.length_policy.kind == LengthPolicy::Kind::variable) {
            if (c.genes.size() < c.length_policy.max && oc.w_length_insert > 0)
                ops.push_back({oc.w_length_insert, 4});
            if (c.genes.size() > c.length_policy.min && oc.w_length_delete > 0)
                ops.push_back({oc.w_length_delete, 5});
        }
        if (ops.empty()) return c;

        double total = 0.0;
        for (const auto& op : ops) total += op.weight;
        double u = uniform_real(rng_, 0.0, total);
        int kind = ops.back().kind;
        for (const auto& op : ops) {
            if (u <= op.weight) {
                kind = op.kind;
                break;
            }
            u -= op.weight;
        }

        std::size_t n = c.genes.size();
        switch (kind) {
            case 0: {
                std::vector<std::pair<std::size_t, std::size_t>> slots;
                for (std::size_t gi = 0; gi < n; ++gi)
                    for (std::size_t pi = 0; pi < c.genes[gi].values.size(); ++pi)
                        slots.emplace_back(gi, pi);
                auto [gi, pi] = slots[uniform_index(rng_, slots.size())];
                return mutate_parameter(problem_.registry, std::move(c), gi, pi, oc, rng_);
            }
            case 1: {
                std::size_t from = uniform_index(rng_, n);
                std::size_t to = uniform_index(rng_, n);
                return shift_gene(std::move(c), from, to);
            }
            case 2: {
                std::size_t len = 1 + uniform_index(rng_, n - 1);
                std::size_t start = uniform_index(rng_, n - len + 1);
                std::size_t to = uniform_index(rng_, n - len + 1);
                if (to == start) return c;
                return shift_segment(std::move(c), start, len, to);
            }
            case 3: {
                std::size_t len = 1 + uniform_index(rng_, n);
                std::size_t start = uniform_index(rng_, n - len + 1);
                return invert_segment(std::move(c), start, len);
            }
            case 4: return length_mutation(problem_.registry, std::move(c),
                                           LengthMode::insert, rng_);
            case 5: return length_mutation(problem_.registry, std::move(c),
                                           LengthMode::erase, rng_);
        }
        return c;
    }

    std::vector<Individual> make_offspring(const Individual& center, const Individual& partner) {
        std::vector<Chromosome> children;
        std::size_t lambda = config_.offspring_per_pairing;
        StructureKind structure = problem_.registry.structure;
        std::size_t n = center.chromosome.genes.size();

        while (children.size() < lambda) {
            bool crossed = false;
            if (n >= 2 && bernoulli(rng_, config_.operators.crossover_probability)) {
                if (structure == StructureKind::permutation) {
                    std::size_t cut1 = uniform_index(rng_, n);
                    std::size_t cut2 = 1 + uniform_index(rng_, n);
                    if (cut1 > cut2) std::swap(cut1, cut2);
                    if (cut1 != cut2) {
                        auto [a, b] = order_crossover(center.chromosome, partner.chromosome,
                                                      cut1, cut2);
                        children.push_back(std::move(a));
                        if (children.size() < lambda) children.push_back(std::move(b));
                        crossed = true;
                    }
                } else if (structure == StructureKind::fixed_layout) {
                    std::size_t point = 1 + uniform_index(rng_, n - 1);
                    auto [a, b] = npoint_crossover(center.chromosome, partner.chromosome,
                                                   {point});
                    children.push_back(std::move(a));
                    if (children.size() < lambda) children.push_back(std::move(b));
                    crossed = true;
                }
            }
            if (!crossed) children.push_back(center.chromosome);
        }

        std::vector<Individual> offspring;
        for (auto& child : children) {
            Chromosome c = mutate(std::move(child));
            if (problem_.genotypic_repair) c = problem_.genotypic_repair(std::move(c), rng_);
            offspring.push_back(make_individual(std::move(c)));
        }
        return offspring;
    }

    void record_progress(std::size_t acceptances) {
        double best = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& ind : population_) {
            best = std::max(best, ind.report.final_fitness);
            sum += ind.report.final_fitness;
        }
        progress_.push_back({generation_, best, sum / static_cast<double>(config_.mu),
                             evaluations_, acceptances});
    }

    EngineConfig config_;
    const ProblemDefinition& problem_;
    Rng rng_;
    std::optional<MemeticConfig> memetic_;
    LocalSearcher local_searcher_;
    std::optional<SolutionArchive> archive_;

    std::vector<Individual> population_;
    std::size_t generation_ = 0;
    std::uint64_t evaluations_ = 0;
    std::uint64_t evaluations_stay_ = 0;  // LS accounting already in evaluations_
    std::uint64_t next_id_ = 0;
    std::vector<std::size_t> stagn_acc_;
    std::vector<std::size_t> stagn_best_;
    std::vector<double> deme_best_;
    std::vector<ProgressRow> progress_;
    std::vector<std::string> warnings_;
};

}  // namespace evokit
