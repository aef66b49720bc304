#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evokit/problems/problem.hpp"

namespace evokit {

struct SchedStep {
    std::string id;
    std::size_t order_id = 0;
    double duration = 0.0;                // time units
    std::vector<std::size_t> eligible;    // resource indices, capacity 1 each
    double energy = 0.0;                  // constant power over the step
    std::vector<std::size_t> predecessors;  // step indices
    bool delay_capable = false;
};

struct SchedInstance {
    std::vector<SchedStep> steps;
    std::size_t resource_count = 0;
    std::map<std::size_t, double> deadlines;  // per order
    double energy_limit = 0.0;                // E_max
    double max_delay = 0.0;                   // upper bound of the delay genes

    std::vector<std::size_t> delay_capable_steps() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (steps[i].delay_capable) out.push_back(i);
        return out;
    }

    void check() const {
        // cycle check by repeated removal of ready steps
        std::vector<bool> done(steps.size(), false);
        std::size_t placed = 0;
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t i = 0; i < steps.size(); ++i) {
                if (done[i]) continue;
                bool ready = true;
                for (std::size_t p : steps[i].predecessors)
                    if (!done[p]) ready = false;
                if (ready) {
                    done[i] = true;
                    ++placed;
                    progress = true;
                }
            }
        }
        if (placed != steps.size())
            throw InstanceError("precedence graph has a cycle");
        for (const auto& s : steps) {
            if (s.duration <= 0) throw InstanceError("step duration must be positive");
            if (s.eligible.empty()) throw InstanceError("step " + s.id + " has no resource");
            for (std::size_t r : s.eligible)
                if (r >= resource_count) throw InstanceError("resource index out of range");
        }
    }

    static SchedInstance from_json(const nlohmann::json& j);
    static SchedInstance from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InstanceError("cannot open scheduling instance: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

inline SchedInstance SchedInstance::from_json(const nlohmann::json& j) {
    SchedInstance inst;
    inst.resource_count = j.at("resources").get<std::size_t>();
    inst.energy_limit = j.at("energy_limit").get<double>();
    inst.max_delay = j.value("max_delay", 0.0);
    std::map<std::string, std::size_t> index;
    for (const auto& js : j.at("steps"))
        index[js.at("id").get<std::string>()] = index.size();
    for (const auto& js : j.at("steps")) {
        SchedStep s;
        s.id = js.at("id").get<std::string>();
        s.order_id = js.at("order").get<std::size_t>();
        s.duration = js.at("duration").get<double>();
        s.energy = js.at("energy").get<double>();
        s.delay_capable = js.value("delay_capable", false);
        s.eligible = js.at("eligible").get<std::vector<std::size_t>>();
        for (const auto& p : js.value("predecessors", std::vector<std::string>{}))
            s.predecessors.push_back(index.at(p));
        inst.steps.push_back(std::move(s));
    }
    for (auto it = j.at("deadlines").begin(); it != j.at("deadlines").end(); ++it)
        inst.deadlines[static_cast<std::size_t>(std::stoul(it.key()))] = it.value().get<double>();
    inst.check();
    return inst;
}

// --- two-part genome: n order genes (d in [0,n]) + one delay gene per
//     delay-capable step ---

inline GenomeRegistry sched_registry(const SchedInstance& instance) {
    std::size_t n = instance.steps.size();
    GenomeRegistry r;
    r.structure = StructureKind::fixed_layout;
    GeneType order;
    order.type_id = "order";
    order.name = "swap distance";
    order.params.push_back({ParamKind::integer, 0.0, static_cast<double>(n)});
    r.register_gene_type(std::move(order));
    GeneType delay;
    delay.type_id = "delay";
    delay.name = "start delay";
    delay.params.push_back({ParamKind::integer, 0.0, instance.max_delay});
    r.register_gene_type(std::move(delay));
    r.layout.assign(n, "order");
    r.layout.insert(r.layout.end(), instance.delay_capable_steps().size(), "delay");
    return r;
}

enum class DelayVariant { fixed_step_delays, reordered_delays };

struct SchedDecodeResult {
    std::vector<std::size_t> order;  // step indices in decoded processing order
    std::vector<double> delays;      // per step (0 for non-delay-capable)
};

/// Swap decode: the i-th order gene (1-based) exchanges the list entries at
/// positions i and (i+d) mod (n+1). A computed target of 0 or i is a no-swap.
inline SchedDecodeResult sched_decode(const Chromosome& c, const SchedInstance& instance,
                                      DelayVariant variant) {
    std::size_t n = instance.steps.size();
    std::vector<std::size_t> list(n);
    std::iota(list.begin(), list.end(), 0);
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t d = static_cast<std::size_t>(c.genes[i - 1].values[0]);
        std::size_t t = (i + d) % (n + 1);
        if (t == 0 || t == i) continue;
        std::swap(list[i - 1], list[t - 1]);
    }

    SchedDecodeResult res;
    res.order = list;
    res.delays.assign(n, 0.0);
    std::vector<std::size_t> dc = instance.delay_capable_steps();
    if (variant == DelayVariant::fixed_step_delays) {
        for (std::size_t k = 0; k < dc.size(); ++k)
            res.delays[dc[k]] = c.genes[n + k].values[0];
    } else {
        std::size_t k = 0;
        for (std::size_t step : list)
            if (instance.steps[step].delay_capable)
                res.delays[step] = c.genes[n + k++].values[0];
    }
    return res;
}

/// Re-encodes a processing order into order-gene values that decode back to
/// it (selection-style swap construction; values stay in [0, n]).
inline std::vector<double> sched_encode_order(const std::vector<std::size_t>& order) {
    std::size_t n = order.size();
    std::vector<std::size_t> list(n);
    std::iota(list.begin(), list.end(), 0);
    std::vector<double> genes(n, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        auto it = std::find(list.begin() + static_cast<std::ptrdiff_t>(i - 1), list.end(),
                            order[i - 1]);
        std::size_t t = static_cast<std::size_t>(it - list.begin()) + 1;  // 1-based, >= i
        genes[i - 1] = static_cast<double>(t - i);
        if (t != i) std::swap(list[i - 1], list[t - 1]);
    }
    return genes;
}

/// Stable postponement: every step is moved behind its predecessors, keeping
/// the relative order of ready steps. Used by both repair modes.
inline std::vector<std::size_t> repair_precedence_order(const std::vector<std::size_t>& order,
                                                        const SchedInstance& instance) {
    std::vector<std::size_t> result;
    std::vector<bool> scheduled(instance.steps.size(), false);
    std::vector<std::size_t> pending = order;
    while (!pending.empty()) {
        bool progress = false;
        for (std::size_t k = 0; k < pending.size();) {
            std::size_t s = pending[k];
            bool ready = true;
            for (std::size_t p : instance.steps[s].predecessors)
                if (!scheduled[p]) ready = false;
            if (ready) {
                result.push_back(s);
                scheduled[s] = true;
                pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(k));
                progress = true;
            } else {
                ++k;
            }
        }
        if (!progress) throw InstanceError("unsatisfiable precedence constraints");
    }
    return result;
}

enum class SchedRepairMode { phenotypic, genotypic };

struct ScheduledStep {
    std::size_t step = 0;
    double start = 0.0;
    double end = 0.0;
    std::size_t resource = 0;
};

struct Schedule {
    std::vector<ScheduledStep> rows;        // in actual scheduling order
    std::vector<double> start_of;           // indexed by step
    std::vector<double> end_of;
    std::map<std::size_t, double> completion_of_order;
    std::vector<std::size_t> emitted_order;  // the repaired processing order
};

/// Builds the schedule in the (repaired) decoded order. Start time is
/// max(resource free time, predecessors finish) + delay; among eligible
/// resources the earliest-start one wins, ties to the lower index.
inline Schedule sched_build(const std::vector<std::size_t>& order,
                            const std::vector<double>& delays, const SchedInstance& instance,
                            SchedRepairMode /*mode*/ = SchedRepairMode::phenotypic) {
    std::vector<std::size_t> feasible = repair_precedence_order(order, instance);

    Schedule sch;
    sch.start_of.assign(instance.steps.size(), 0.0);
    sch.end_of.assign(instance.steps.size(), 0.0);
    sch.emitted_order = feasible;
    std::vector<double> resource_free(instance.resource_count, 0.0);

    for (std::size_t s : feasible) {
        const SchedStep& step = instance.steps[s];
        double pred_finish = 0.0;
        for (std::size_t p : step.predecessors)
            pred_finish = std::max(pred_finish, sch.end_of[p]);
        std::size_t best_r = step.eligible.front();
        double best_start = std::max(resource_free[best_r], pred_finish);
        for (std::size_t r : step.eligible) {
            double st = std::max(resource_free[r], pred_finish);
            if (st < best_start) {
                best_start = st;
                best_r = r;
            }
        }
        double start = best_start + delays[s];
        double end = start + step.duration;
        resource_free[best_r] = end;
        sch.start_of[s] = start;
        sch.end_of[s] = end;
        sch.rows.push_back({s, start, end, best_r});
        auto [it, inserted] = sch.completion_of_order.try_emplace(step.order_id, end);
        if (!inserted) it->second = std::max(it->second, end);
    }
    return sch;
}

/// Genotypic repair at the chromosome level: order genes are re-encoded so
/// the decoded order satisfies all precedences; delay genes are untouched.
inline RepairHook make_sched_genotypic_repair(const SchedInstance& instance,
                                              DelayVariant variant) {
    return [instance, variant](Chromosome c, Rng&) {
        SchedDecodeResult dec = sched_decode(c, instance, variant);
        std::vector<std::size_t> feasible = repair_precedence_order(dec.order, instance);
        std::vector<double> genes = sched_encode_order(feasible);
        for (std::size_t i = 0; i < genes.size(); ++i) c.genes[i].values[0] = genes[i];
        return c;
    };
}

/// Precedence repair for permutation-structured chromosomes whose gene types
/// are the step ids: a violating gene is moved behind the genes of its
/// predecessor steps. Only the gene order changes.
inline RepairHook make_precedence_order_repair(const SchedInstance& instance) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < instance.steps.size(); ++i) index[instance.steps[i].id] = i;
    return [instance, index](Chromosome c, Rng&) {
        std::vector<std::size_t> order;
        for (const auto& g : c.genes) order.push_back(index.at(g.type_id));
        std::vector<std::size_t> feasible = repair_precedence_order(order, instance);
        std::vector<Gene> genes;
        for (std::size_t s : feasible) {
            auto it = std::find_if(c.genes.begin(), c.genes.end(), [&](const Gene& g) {
                return index.at(g.type_id) == s;
            });
            genes.push_back(*it);
        }
        c.genes = std::move(genes);
        return c;
    };
}

// --- criteria (Fig. 2 / Fig. 3 semantics) ---

struct SchedCriteria {
    double deadline_tardiness = 0.0;  // sum over orders of max(0, completion - deadline)
    double peak_count = 0.0;          // maximal intervals with load > E_max
    double peak_max = 0.0;            // max(load - E_max, 0)
    double peak_area = 0.0;           // integral of max(load - E_max, 0), auxiliary
    double waiting_time = 0.0;        // auxiliary, weighted toward late orders
};

struct LoadSample {
    double time;
    double load;
};

/// Piecewise-constant total power profile from the step start/end events.
inline std::vector<LoadSample> sched_load_profile(const Schedule& sch,
                                                  const SchedInstance& instance) {
    std::map<double, double> delta;
    for (const auto& row : sch.rows) {
        delta[row.start] += instance.steps[row.step].energy;
        delta[row.end] -= instance.steps[row.step].energy;
    }
    std::vector<LoadSample> profile;
    double load = 0.0;
    for (const auto& [t, d] : delta) {
        load += d;
        profile.push_back({t, load < 1e-12 ? 0.0 : load});
    }
    return profile;
}

/// The waiting weight for steps of on-time orders; late orders always count
/// with weight 1.
inline SchedCriteria sched_criteria(const Schedule& sch, const SchedInstance& instance,
                                    double ontime_waiting_weight = 0.0) {
    SchedCriteria out;

    for (const auto& [order, dl] : instance.deadlines) {
        auto it = sch.completion_of_order.find(order);
        if (it != sch.completion_of_order.end())
            out.deadline_tardiness += std::max(0.0, it->second - dl);
    }

    std::vector<LoadSample> profile = sched_load_profile(sch, instance);
    bool in_peak = false;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        double over = profile[i].load - instance.energy_limit;
        if (over > 1e-9) {
            if (!in_peak) {
                out.peak_count += 1.0;
                in_peak = true;
            }
            out.peak_max = std::max(out.peak_max, over);
            if (i + 1 < profile.size())
                out.peak_area += over * (profile[i + 1].time - profile[i].time);
        } else {
            in_peak = false;
        }
    }

    auto order_is_late = [&](std::size_t order) {
        auto dl = instance.deadlines.find(order);
        auto done = sch.completion_of_order.find(order);
        return dl != instance.deadlines.end() && done != sch.completion_of_order.end() &&
               done->second > dl->second + 1e-12;
    };
    for (const auto& row : sch.rows) {
        const SchedStep& step = instance.steps[row.step];
        double earliest = 0.0;
        for (std::size_t p : step.predecessors)
            earliest = std::max(earliest, sch.end_of[p]);
        double waiting = std::max(0.0, row.start - earliest);
        out.waiting_time += waiting * (order_is_late(step.order_id) ? 1.0
                                                                    : ontime_waiting_weight);
    }
    return out;
}

// --- independent verifier for the acceptance suite ---

inline bool sched_verify(const Schedule& sch, const SchedInstance& instance,
                         std::string* why = nullptr) {
    // pairwise resource overlap
    for (std::size_t a = 0; a < sch.rows.size(); ++a)
        for (std::size_t b = a + 1; b < sch.rows.size(); ++b) {
            if (sch.rows[a].resource != sch.rows[b].resource) continue;
            if (sch.rows[a].start < sch.rows[b].end - 1e-9 &&
                sch.rows[b].start < sch.rows[a].end - 1e-9) {
                if (why) *why = "resource overlap";
                return false;
            }
        }
    for (std::size_t s = 0; s < instance.steps.size(); ++s)
        for (std::size_t p : instance.steps[s].predecessors)
            if (sch.start_of[s] < sch.end_of[p] - 1e-9) {
                if (why) *why = "precedence violation at step " + instance.steps[s].id;
                return false;
            }
    return true;
}

// --- exports ---

inline void sched_export_csv(const Schedule& sch, const SchedInstance& instance,
                             std::ostream& os) {
    os << "step,start,end,resource\n";
    for (const auto& row : sch.rows)
        os << instance.steps[row.step].id << "," << row.start << "," << row.end << ","
           << row.resource << "\n";
}

inline void sched_export_load_csv(const Schedule& sch, const SchedInstance& instance,
                                  std::ostream& os) {
    os << "time,load\n";
    for (const auto& s : sched_load_profile(sch, instance)) os << s.time << "," << s.load << "\n";
}

// --- problem binding ---

inline FitnessSpec sched_fitness_spec(const SchedInstance& instance) {
    double horizon = 0.0, energy_total = 0.0;
    for (const auto& s : instance.steps) {
        horizon += s.duration + instance.max_delay;
        energy_total += s.energy;
    }
    FitnessSpec spec;
    auto min_criterion = [](std::string id, double worst, double weight, bool aux) {
        Criterion c;
        c.id = id;
        c.name = id;
        c.direction = Direction::minimize;
        c.breakpoints = {{0.0, 1.0}, {std::max(worst, 1.0), 0.0}};
        c.weight = weight;
        c.auxiliary = aux;
        return c;
    };
    spec.criteria.push_back(min_criterion("tardiness", horizon, 0.40, false));
    spec.criteria.push_back(min_criterion("peak_count", static_cast<double>(instance.steps.size()),
                                          0.15, false));
    spec.criteria.push_back(min_criterion("peak_max", std::max(energy_total - instance.energy_limit,
                                                               1.0), 0.15, false));
    spec.criteria.push_back(min_criterion("peak_area",
                                          std::max(energy_total, 1.0) * horizon, 0.20, true));
    spec.criteria.push_back(min_criterion("waiting", horizon * static_cast<double>(
                                                          instance.steps.size()), 0.10, true));
    return spec;
}

inline ProblemDefinition make_sched_problem(const SchedInstance& instance, DelayVariant variant,
                                            SchedRepairMode repair_mode) {
    ProblemDefinition p;
    p.name = "sched";
    p.registry = sched_registry(instance);
    p.length_policy = LengthPolicy::fixed(p.registry.layout.size());
    p.fitness = sched_fitness_spec(instance);
    p.evaluate = [instance, variant, repair_mode](const Chromosome& c) {
        SchedDecodeResult dec = sched_decode(c, instance, variant);
        Schedule sch = sched_build(dec.order, dec.delays, instance, repair_mode);
        SchedCriteria cr = sched_criteria(sch, instance);
        return Evaluation{
            {cr.deadline_tardiness, cr.peak_count, cr.peak_max, cr.peak_area, cr.waiting_time},
            {}};
    };
    if (repair_mode == SchedRepairMode::genotypic)
        p.genotypic_repair = make_sched_genotypic_repair(instance, variant);
    return p;
}

}  // namespace evokit
