#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evokit/harness/stats.hpp"
#include "evokit/memetic.hpp"
#include "evokit/population.hpp"
#include "evokit/problems/layout.hpp"
#include "evokit/problems/sched.hpp"
#include "evokit/problems/sphere.hpp"
#include "evokit/problems/tsp.hpp"

namespace evokit {

/// A problem built from a config file, keeping the raw instance around for
/// decoding and export of the winning phenotype.
struct LoadedProblem {
    std::string kind;
    ProblemDefinition problem;
    std::optional<TspInstance> tsp;
    std::optional<SchedInstance> sched;
    DelayVariant sched_variant = DelayVariant::fixed_step_delays;
    SchedRepairMode sched_repair = SchedRepairMode::phenotypic;
    std::optional<LayoutInstance> layout;
};

inline LoadedProblem load_problem(const nlohmann::json& j) {
    LoadedProblem lp;
    if (!j.contains("kind")) throw ConfigError("problem.kind missing");
    lp.kind = j.at("kind").get<std::string>();
    if (lp.kind == "tsp") {
        lp.tsp = TspInstance::from_csv(j.at("instance").get<std::string>());
        std::string enc = j.value("encoding", std::string("permutation"));
        TspEncoding e;
        if (enc == "permutation")
            e = TspEncoding::permutation;
        else if (enc == "index_list")
            e = TspEncoding::index_list;
        else if (enc == "shift")
            e = TspEncoding::shift;
        else
            throw ConfigError("unknown tsp encoding: " + enc);
        lp.problem = make_tsp_problem(*lp.tsp, e,
                                      j.value("repair_seed", std::uint64_t{12345}));
    } else if (lp.kind == "sched") {
        lp.sched = SchedInstance::from_file(j.at("instance").get<std::string>());
        std::string dv = j.value("delay_variant", std::string("fixed_step_delays"));
        if (dv == "fixed_step_delays")
            lp.sched_variant = DelayVariant::fixed_step_delays;
        else if (dv == "reordered_delays")
            lp.sched_variant = DelayVariant::reordered_delays;
        else
            throw ConfigError("unknown delay_variant: " + dv);
        std::string rm = j.value("repair", std::string("phenotypic"));
        if (rm == "phenotypic")
            lp.sched_repair = SchedRepairMode::phenotypic;
        else if (rm == "genotypic")
            lp.sched_repair = SchedRepairMode::genotypic;
        else
            throw ConfigError("unknown sched repair mode: " + rm);
        lp.problem = make_sched_problem(*lp.sched, lp.sched_variant, lp.sched_repair);
    } else if (lp.kind == "layout") {
        lp.layout = LayoutInstance::from_file(j.at("instance").get<std::string>());
        lp.problem = make_layout_problem(*lp.layout);
    } else if (lp.kind == "sphere") {
        lp.problem = make_sphere_problem(j.value("dimensions", std::size_t{5}),
                                         j.value("lower", -5.0), j.value("upper", 5.0));
    } else {
        throw ConfigError("unknown problem kind: " + lp.kind);
    }
    return lp;
}

inline EngineConfig engine_from_json(const nlohmann::json& j) {
    EngineConfig c;
    c.mu = j.value("mu", c.mu);
    c.deme_size = j.value("deme_size", c.deme_size);
    std::string acc = j.value("acceptance", std::string("better_parent"));
    if (acc == "better_parent")
        c.acceptance = AcceptanceRule::better_parent;
    else if (acc == "better_worst_in_deme")
        c.acceptance = AcceptanceRule::better_worst_in_deme;
    else
        throw ConfigError("unknown acceptance rule: " + acc);
    c.offspring_per_pairing = j.value("offspring_per_pairing", c.offspring_per_pairing);
    std::string st = j.value("structure", std::string("ring"));
    if (st == "ring")
        c.structure = PopulationStructure::ring;
    else if (st == "panmictic")
        c.structure = PopulationStructure::panmictic;
    else
        throw ConfigError("unknown population structure: " + st);
    if (j.contains("operators")) {
        const auto& o = j.at("operators");
        OperatorConfig& oc = c.operators;
        oc.small_step_fraction = o.value("small_step_fraction", oc.small_step_fraction);
        oc.small_step_sigma_fraction =
            o.value("small_step_sigma_fraction", oc.small_step_sigma_fraction);
        oc.w_parameter = o.value("w_parameter", oc.w_parameter);
        oc.w_shift_gene = o.value("w_shift_gene", oc.w_shift_gene);
        oc.w_shift_segment = o.value("w_shift_segment", oc.w_shift_segment);
        oc.w_invert_segment = o.value("w_invert_segment", oc.w_invert_segment);
        oc.w_length_insert = o.value("w_length_insert", oc.w_length_insert);
        oc.w_length_delete = o.value("w_length_delete", oc.w_length_delete);
        oc.crossover_probability = o.value("crossover_probability", oc.crossover_probability);
        oc.selection_pressure = o.value("selection_pressure", oc.selection_pressure);
    }
    if (j.contains("termination")) {
        const auto& t = j.at("termination");
        c.termination.max_evaluations = t.value("max_evaluations", std::uint64_t{0});
        if (t.contains("target_fitness"))
            c.termination.target_fitness = t.at("target_fitness").get<double>();
        c.termination.g_acc = t.value("g_acc", std::size_t{0});
        c.termination.g_best = t.value("g_best", std::size_t{0});
    }
    return c;
}

inline MemeticConfig memetic_from_json(const nlohmann::json& j) {
    MemeticConfig m;
    m.ls_id = j.value("ls_id", m.ls_id);
    m.lamarckian = j.value("lamarckian", m.lamarckian);
    m.offspring_fraction = j.value("offspring_fraction", m.offspring_fraction);
    std::string sel = j.value("selection_mode", std::string("best_fitness"));
    if (sel == "random")
        m.selection_mode = LsSelectionMode::random;
    else if (sel == "best_fitness")
        m.selection_mode = LsSelectionMode::best_fitness;
    else
        throw ConfigError("unknown selection_mode: " + sel);
    m.ls_budget = j.value("ls_budget", m.ls_budget);
    m.init_improve_fraction = j.value("init_improve_fraction", m.init_improve_fraction);
    m.heuristic_seed_cap = j.value("heuristic_seed_cap", m.heuristic_seed_cap);
    return m;
}

struct ArchiveConfig {
    SimilarityScheme scheme;
    std::size_t capacity = 1000000;
};

inline ArchiveConfig archive_from_json(const nlohmann::json& j) {
    ArchiveConfig a;
    a.scheme.default_real_epsilon = j.value("real_epsilon", a.scheme.default_real_epsilon);
    a.scheme.default_int_epsilon = j.value("int_epsilon", a.scheme.default_int_epsilon);
    a.scheme.sequence_sensitive = j.value("sequence_sensitive", a.scheme.sequence_sensitive);
    a.capacity = j.value("capacity", a.capacity);
    return a;
}

struct RunConfig {
    nlohmann::json problem_json;
    EngineConfig engine;
    std::optional<MemeticConfig> memetic;
    std::optional<ArchiveConfig> archive;
    std::uint64_t master_seed = 1;
    std::size_t runs = 30;
    bool tuned = false;  // tuning acknowledgment for compare

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        if (!j.contains("problem")) throw ConfigError("config: problem section missing");
        c.problem_json = j.at("problem");
        c.engine = engine_from_json(j.value("engine", nlohmann::json::object()));
        if (j.contains("memetic") && !j.at("memetic").is_null())
            c.memetic = memetic_from_json(j.at("memetic"));
        if (j.contains("archive") && !j.at("archive").is_null())
            c.archive = archive_from_json(j.at("archive"));
        c.master_seed = j.value("seed", c.master_seed);
        c.runs = j.value("runs", c.runs);
        if (c.runs < 1) throw ConfigError("runs must be >= 1");
        c.tuned = j.value("tuned", false);
        return c;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        return from_json(j);
    }
};

struct RunResult {
    std::uint64_t seed;
    double best_fitness;
    std::uint64_t evaluations;
    bool success;
    double wall_seconds;
    RunStatus status;
};

struct MultiRunOutcome {
    std::vector<RunResult> results;
    std::vector<std::vector<ProgressRow>> progress;  // one trace per run
    StatsSummary fitness_summary;
    StatsSummary evaluations_summary;
    std::vector<std::string> warnings;
    Chromosome best_chromosome;
    double best_fitness = -1.0;
    std::size_t best_run = 0;
};

inline EvolutionEngine make_engine(const RunConfig& config, const LoadedProblem& lp,
                                   std::uint64_t seed) {
    LocalSearcher ls;
    if (config.memetic)
        ls = make_local_searcher(config.memetic->ls_id, lp.problem,
                                 lp.tsp ? &*lp.tsp : nullptr);
    std::optional<SimilarityScheme> scheme;
    std::size_t capacity = 0;
    if (config.archive) {
        scheme = config.archive->scheme;
        capacity = config.archive->capacity;
    }
    return EvolutionEngine(config.engine, lp.problem, seed, config.memetic, std::move(ls),
                           scheme, capacity);
}

/// Executes runs runs with seeds master+0 .. master+runs-1 and aggregates
/// fitness and effort statistics.
inline MultiRunOutcome multi_run(const RunConfig& config, const LoadedProblem& lp) {
    MultiRunOutcome out;
    if (config.runs < 10)
        out.warnings.push_back("fewer than 10 runs: statistics will be unreliable");
    else if (config.runs < 30)
        out.warnings.push_back("fewer than 30 runs: at least 30 are recommended");

    for (std::size_t i = 0; i < config.runs; ++i) {
        std::uint64_t seed = config.master_seed + i;
        EvolutionEngine engine = make_engine(config, lp, seed);
        auto t0 = std::chrono::steady_clock::now();
        engine.init();
        RunStatus status = engine.run();
        auto t1 = std::chrono::steady_clock::now();

        RunResult r;
        r.seed = seed;
        r.best_fitness = engine.best().report.final_fitness;
        r.evaluations = engine.evaluations();
        r.success = status == RunStatus::target_reached;
        r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        r.status = status;
        if (r.best_fitness > out.best_fitness) {
            out.best_fitness = r.best_fitness;
            out.best_chromosome = engine.best().chromosome;
            out.best_run = i;
        }
        out.results.push_back(r);
        out.progress.push_back(engine.progress());
        for (const auto& w : engine.warnings()) out.warnings.push_back(w);
    }

    std::vector<double> fit, evals;
    double successes = 0.0;
    for (const auto& r : out.results) {
        fit.push_back(r.best_fitness);
        evals.push_back(static_cast<double>(r.evaluations));
        if (r.success) successes += 1.0;
    }
    double rate = successes / static_cast<double>(out.results.size());
    out.fitness_summary = summarize(fit, rate);
    out.evaluations_summary = summarize(evals, rate);
    return out;
}

inline MultiRunOutcome multi_run(const RunConfig& config) {
    LoadedProblem lp = load_problem(config.problem_json);
    return multi_run(config, lp);
}

// --- population-size tuning ---

struct MuTrial {
    std::size_t mu;
    double success_rate;
    double effort_mean;
    double effort_cv;
    double fitness_mean;
};

struct MuTuneReport {
    std::vector<MuTrial> trace;
    std::size_t recommended_mu = 0;
    double target_fitness = 0.0;
    std::uint64_t effort_limit = 0;
    double surcharge = 0.0;
};

struct TuneOptions {
    std::size_t runs_per_batch = 10;
    std::size_t confirm_runs = 10;
    double surcharge = 0.5;              // effort limit surcharge in [0.2, 1.0]
    double descent_factor = 0.8;         // mu shrink per phase-2 step
    double scatter_cv_threshold = 0.5;   // effort coefficient of variation
    double fitness_cv_threshold = 0.05;  // phase-1 fitness consistency
    std::size_t mu_cap = 2000;           // phase-1 growth bound
    std::size_t stagnation_g_best = 25;  // armed when the config leaves it unset
    std::size_t phase2_patience = 4;     // phase-2 stagnation = patience * stagnation_g_best
    std::uint64_t eval_cap = 500000;     // phase-1 safety budget per run
};

namespace detail {

struct TuneBatch {
    std::vector<double> fitness;
    std::vector<double> effort;
    double success_rate;
};

inline TuneBatch tune_batch(RunConfig config, const LoadedProblem& lp, std::size_t mu,
                            std::size_t runs, std::uint64_t seed) {
    config.engine.mu = mu;
    config.runs = runs;
    config.master_seed = seed;
    MultiRunOutcome out = multi_run(config, lp);
    TuneBatch b;
    for (const auto& r : out.results) {
        b.fitness.push_back(r.best_fitness);
        b.effort.push_back(static_cast<double>(r.evaluations));
    }
    b.success_rate = out.fitness_summary.success_rate;
    return b;
}

}  // namespace detail

/// Two-phase working-area search: stabilize fitness/effort at a large mu to
/// fix the target and effort limit, then shrink mu while every run still hits
/// the target with acceptable effort scatter.
inline MuTuneReport tune_mu(const RunConfig& base, const LoadedProblem& lp,
                            std::size_t start_mu, TuneOptions opts = {}) {
    if (start_mu < 2 * base.engine.deme_size)
        throw ConfigError("start mu must be at least twice the deme size");
    if (opts.surcharge < 0.2 || opts.surcharge > 1.0)
        throw ConfigError("surcharge out of [0.2, 1.0]");

    // phase 1: stagnation-terminated runs, no target
    RunConfig phase1 = base;
    phase1.engine.termination.target_fitness = std::numeric_limits<double>::quiet_NaN();
    if (phase1.engine.termination.g_best == 0 && phase1.engine.termination.g_acc == 0)
        phase1.engine.termination.g_best = opts.stagnation_g_best;
    if (phase1.engine.termination.max_evaluations == 0 ||
        phase1.engine.termination.max_evaluations > opts.eval_cap)
        phase1.engine.termination.max_evaluations = opts.eval_cap;

    std::size_t mu = start_mu;
    std::vector<double> fitness, effort;
    bool stable = false;
    while (mu <= opts.mu_cap) {
        detail::TuneBatch b =
            detail::tune_batch(phase1, lp, mu, opts.runs_per_batch, base.master_seed);
        if (coefficient_of_variation(b.fitness) <= opts.fitness_cv_threshold &&
            coefficient_of_variation(b.effort) <= opts.scatter_cv_threshold) {
            detail::TuneBatch confirm = detail::tune_batch(
                phase1, lp, mu, opts.confirm_runs, base.master_seed + opts.runs_per_batch);
            fitness = b.fitness;
            fitness.insert(fitness.end(), confirm.fitness.begin(), confirm.fitness.end());
            effort = b.effort;
            effort.insert(effort.end(), confirm.effort.begin(), confirm.effort.end());
            stable = true;
            break;
        }
        mu = static_cast<std::size_t>(std::ceil(static_cast<double>(mu) * 1.25));
    }
    if (!stable) throw TuneFailure("phase 1 never stabilized below the mu cap");

    MuTuneReport report;
    report.surcharge = opts.surcharge;
    // summing n near-equal values can round the mean a few ulps above the
    // best achievable fitness; shave a negligible margin so the target stays
    // reachable when every stabilization run hits the same optimum
    double m = mean(fitness);
    report.target_fitness = m - std::abs(m) * 1e-12;
    report.effort_limit = static_cast<std::uint64_t>(
        std::ceil(*std::max_element(effort.begin(), effort.end()) * (1.0 + opts.surcharge)));

    // phase 2: target-terminated runs under the effort limit
    // phase-2 runs are production-like: they may stop on stagnation, but with
    // more patience than the phase-1 plateau detector so the reference mu is
    // not cut off on a temporary plateau below its own mean
    RunConfig phase2 = base;
    phase2.engine.termination.target_fitness = report.target_fitness;
    phase2.engine.termination.max_evaluations = report.effort_limit;
    if (phase2.engine.termination.g_best == 0 && phase2.engine.termination.g_acc == 0)
        phase2.engine.termination.g_best = opts.phase2_patience * opts.stagnation_g_best;

    std::size_t cur = mu;
    std::size_t mu_floor = 2 * base.engine.deme_size;
    while (true) {
        detail::TuneBatch b = detail::tune_batch(phase2, lp, cur, opts.runs_per_batch,
                                                 base.master_seed + 1000);
        MuTrial trial{cur, b.success_rate, mean(b.effort),
                      coefficient_of_variation(b.effort), mean(b.fitness)};
        report.trace.push_back(trial);
        if (b.success_rate < 1.0 || trial.effort_cv > opts.scatter_cv_threshold) break;
        report.recommended_mu = cur;
        std::size_t next = static_cast<std::size_t>(
            std::floor(static_cast<double>(cur) * opts.descent_factor));
        if (next < mu_floor) next = mu_floor;
        if (next >= cur) break;
        cur = next;
    }
    if (report.recommended_mu == 0)
        throw TuneFailure("no mu with a fully successful batch; raise start mu or surcharge");
    return report;
}

inline MuTuneReport tune_mu(const RunConfig& base, std::size_t start_mu,
                            TuneOptions opts = {}) {
    LoadedProblem lp = load_problem(base.problem_json);
    return tune_mu(base, lp, start_mu, opts);
}

// --- comparison ---

struct ComparisonReport {
    MultiRunOutcome a;
    MultiRunOutcome b;
    TTestResult fitness_test;
    TTestResult effort_test;
    std::string verdict;
};

inline ComparisonReport compare(const RunConfig& config_a, const RunConfig& config_b,
                                bool waive_tuning = false) {
    if (config_a.problem_json != config_b.problem_json)
        throw ConfigError("compared configs target different problems");
    if (!waive_tuning && (!config_a.tuned || !config_b.tuned))
        throw ConfigError(
            "configs must acknowledge tuning (\"tuned\": true) or be compared with the "
            "waiver flag");

    ComparisonReport r;
    LoadedProblem lp = load_problem(config_a.problem_json);
    r.a = multi_run(config_a, lp);
    r.b = multi_run(config_b, lp);

    std::vector<double> fa, fb, ea, eb;
    for (const auto& x : r.a.results) {
        fa.push_back(x.best_fitness);
        ea.push_back(static_cast<double>(x.evaluations));
    }
    for (const auto& x : r.b.results) {
        fb.push_back(x.best_fitness);
        eb.push_back(static_cast<double>(x.evaluations));
    }
    r.fitness_test = two_sample_t_test(fa, fb);
    r.effort_test = two_sample_t_test(ea, eb);
    if (!r.fitness_test.significant)
        r.verdict = "no significant fitness difference at alpha=0.05";
    else if (r.a.fitness_summary.mean > r.b.fitness_summary.mean)
        r.verdict = "config A significantly better fitness at alpha=0.05";
    else
        r.verdict = "config B significantly better fitness at alpha=0.05";
    return r;
}

// --- deterministic emission ---

/// Locale-independent shortest-roundtrip double format for CSV output.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// One row per run. No wall-time column: results.csv must be byte-identical
/// across repeated invocations with the same seed.
inline void write_results_csv(std::ostream& os, const std::vector<RunResult>& results) {
    os << "run,seed,status,best_fitness,evaluations,success\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunResult& r = results[i];
        os << i << ',' << r.seed << ',' << to_string(r.status) << ','
           << fmt_double(r.best_fitness) << ',' << r.evaluations << ','
           << (r.success ? 1 : 0) << '\n';
    }
}

inline void write_progress_csv(std::ostream& os,
                               const std::vector<std::vector<ProgressRow>>& progress) {
    os << "run,generation,best_fitness,mean_fitness,evaluations,acceptances\n";
    for (std::size_t i = 0; i < progress.size(); ++i)
        for (const ProgressRow& row : progress[i])
            os << i << ',' << row.generation << ',' << fmt_double(row.best_fitness) << ','
               << fmt_double(row.mean_fitness) << ',' << row.evaluations << ','
               << row.acceptances << '\n';
}

inline void write_summary(std::ostream& os, const std::string& label, const StatsSummary& s) {
    os << label << ": mean=" << fmt_double(s.mean) << " median=" << fmt_double(s.median)
       << " sd=" << fmt_double(s.sd) << " min=" << fmt_double(s.min)
       << " max=" << fmt_double(s.max) << " ci" << static_cast<int>(s.ci.level * 100) << "=["
       << fmt_double(s.ci.low) << ", " << fmt_double(s.ci.high) << "]\n";
}

inline void write_report_txt(std::ostream& os, const RunConfig& config,
                             const MultiRunOutcome& out) {
    os << "runs: " << out.results.size() << "\n";
    os << "master seed: " << config.master_seed << "\n";
    os << "success rate: " << fmt_double(out.fitness_summary.success_rate) << "\n";
    write_summary(os, "best fitness", out.fitness_summary);
    write_summary(os, "evaluations", out.evaluations_summary);
    double wall = 0.0;
    for (const auto& r : out.results) wall += r.wall_seconds;
    os << "total wall time [s]: " << wall << "\n";
    os << "best run: " << out.best_run
       << " (fitness " << fmt_double(out.best_fitness) << ")\n";
    for (const auto& w : out.warnings) os << "warning: " << w << "\n";
}

inline void write_tune_report(std::ostream& os, const MuTuneReport& r) {
    os << "recommended mu: " << r.recommended_mu << "\n";
    os << "target fitness: " << fmt_double(r.target_fitness) << "\n";
    os << "effort limit: " << r.effort_limit << " (surcharge " << fmt_double(r.surcharge)
       << ")\n";
    os << "mu,success_rate,effort_mean,effort_cv,fitness_mean\n";
    for (const MuTrial& t : r.trace)
        os << t.mu << ',' << fmt_double(t.success_rate) << ',' << fmt_double(t.effort_mean)
           << ',' << fmt_double(t.effort_cv) << ',' << fmt_double(t.fitness_mean) << '\n';
}

inline void write_comparison_report(std::ostream& os, const ComparisonReport& r) {
    os << "== config A ==\n";
    write_summary(os, "best fitness", r.a.fitness_summary);
    write_summary(os, "evaluations", r.a.evaluations_summary);
    os << "== config B ==\n";
    write_summary(os, "best fitness", r.b.fitness_summary);
    write_summary(os, "evaluations", r.b.evaluations_summary);
    os << "fitness t-test: t=" << fmt_double(r.fitness_test.t)
       << " df=" << fmt_double(r.fitness_test.df)
       << " significant=" << (r.fitness_test.significant ? "yes" : "no") << "\n";
    os << "effort t-test: t=" << fmt_double(r.effort_test.t)
       << " df=" << fmt_double(r.effort_test.df)
       << " significant=" << (r.effort_test.significant ? "yes" : "no") << "\n";
    os << "verdict: " << r.verdict << "\n";
}

}  // namespace evokit
