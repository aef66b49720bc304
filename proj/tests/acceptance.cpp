// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier campaigns run with fixed seeds so results are stable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "evokit/evokit.hpp"

using namespace evokit;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << "criterion " << num << " (" << name << "): " << (ok ? "PASS" : "FAIL");
    if (!ok && !detail.empty()) std::cout << " — " << detail;
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

Chromosome value_chromosome(const std::string& type_id, const std::vector<double>& values,
                            LengthPolicy policy) {
    Chromosome c;
    c.length_policy = policy;
    for (double v : values) c.genes.push_back({type_id, {v}});
    return c;
}

SchedInstance five_step_instance() {
    nlohmann::json j = {{"resources", 1},
                        {"energy_limit", 100.0},
                        {"max_delay", 15.0},
                        {"deadlines", nlohmann::json::object()},
                        {"steps", nlohmann::json::array()}};
    for (std::string id : {"a", "b", "c", "d", "e"}) {
        bool dc = id == "b" || id == "d" || id == "e";
        j["steps"].push_back({{"id", id},
                              {"order", 1},
                              {"duration", 1.0},
                              {"energy", 1.0},
                              {"delay_capable", dc},
                              {"eligible", {0}}});
    }
    return SchedInstance::from_json(j);
}

// ---- criterion 1 ----

void criterion_table1() {
    SchedInstance inst = five_step_instance();
    std::vector<double> order_genes{2, 1, 4, 0, 2};

    // replay the swap rule step by step and compare every intermediate list
    std::vector<std::string> expected{"cbade", "cabde", "bacde", "bacde", "eacdb"};
    std::vector<std::size_t> list{0, 1, 2, 3, 4};
    bool ok = true;
    std::string detail;
    for (std::size_t i = 1; i <= 5; ++i) {
        std::size_t d = static_cast<std::size_t>(order_genes[i - 1]);
        std::size_t t = (i + d) % 6;
        if (t != 0 && t != i) std::swap(list[i - 1], list[t - 1]);
        std::string got;
        for (std::size_t s : list) got += inst.steps[s].id;
        if (got != expected[i - 1]) {
            ok = false;
            detail = "after gene " + std::to_string(i) + " got " + got;
        }
    }

    Chromosome c = value_chromosome("order", order_genes, LengthPolicy::fixed(8));
    for (double d : {7.0, 5.0, 12.0}) c.genes.push_back({"delay", {d}});
    SchedDecodeResult fixed = sched_decode(c, inst, DelayVariant::fixed_step_delays);
    std::string final_order;
    for (std::size_t s : fixed.order) final_order += inst.steps[s].id;
    if (final_order != "eacdb") {
        ok = false;
        detail = "result list " + final_order;
    }
    // fixed variant: b+7, d+5, e+12
    if (fixed.delays[1] != 7.0 || fixed.delays[3] != 5.0 || fixed.delays[4] != 12.0) {
        ok = false;
        detail = "fixed delay assignment wrong";
    }
    SchedDecodeResult re = sched_decode(c, inst, DelayVariant::reordered_delays);
    // reordered variant: e+7, d+5, b+12
    if (re.delays[4] != 7.0 || re.delays[3] != 5.0 || re.delays[1] != 12.0) {
        ok = false;
        detail = "reordered delay assignment wrong";
    }
    report(1, "work-step swap decode replay", ok, detail);
}

// ---- criterion 2 ----

void criterion_tsp_validity() {
    Rng rng(20240501);
    bool ok = true;
    std::string detail;
    for (std::size_t n = 2; n <= 12 && ok; ++n) {
        TspInstance inst = TspInstance::random_euclidean(n, rng);
        GenomeRegistry perm = tsp_permutation_registry(inst);
        GenomeRegistry idx = tsp_index_registry(inst);
        GenomeRegistry shift = tsp_shift_registry(inst);
        LengthPolicy shift_policy = tsp_shift_length_policy(inst);
        for (int i = 0; i < 10000; ++i) {
            Chromosome pc = random_chromosome(perm, LengthPolicy::fixed(n), rng);
            Chromosome ic = random_chromosome(idx, LengthPolicy::fixed(n), rng);
            Chromosome sc = random_chromosome(shift, shift_policy, rng);
            IndexRepairMode mode = i % 2 == 0 ? IndexRepairMode::genotypic_redice
                                              : IndexRepairMode::phenotypic_modulo;
            if (!is_permutation_tour(tsp_decode_permutation(pc, inst), n) ||
                !is_permutation_tour(tsp_decode_index_list(ic, inst, mode, rng), n) ||
                !is_permutation_tour(tsp_decode_shift(sc, inst), n)) {
                ok = false;
                detail = "invalid tour at n=" + std::to_string(n);
                break;
            }
        }
    }
    report(2, "all TSP decoders yield permutations", ok, detail);
}

// ---- criterion 3 ----

void criterion_tsp_optimality() {
    Rng inst_rng(4711);
    TspInstance inst = TspInstance::random_euclidean(8, inst_rng);
    auto [opt_tour, opt_len] = tsp_brute_force(inst);

    LoadedProblem lp;
    lp.kind = "tsp";
    lp.tsp = inst;
    lp.problem = make_tsp_problem(inst, TspEncoding::permutation);
    Chromosome opt_c;
    opt_c.length_policy = LengthPolicy::fixed(8);
    for (std::size_t city : opt_tour)
        opt_c.genes.push_back({"city" + std::to_string(city), {}});
    double target = lp.problem.assess(opt_c).final_fitness - 1e-9;

    RunConfig base;
    base.problem_json = {{"kind", "tsp"}};
    base.engine.mu = 48;
    base.engine.deme_size = 7;
    base.engine.termination.max_evaluations = 50000;
    base.master_seed = 1000;

    TuneOptions opts;
    opts.stagnation_g_best = 20;
    std::size_t mu;
    try {
        MuTuneReport tune = tune_mu(base, lp, 48, opts);
        mu = tune.recommended_mu;
    } catch (const std::exception& e) {
        report(3, "TSP optimality at desk scale", false, std::string("tune-mu: ") + e.what());
        return;
    }

    RunConfig plain = base;
    plain.engine.mu = mu;
    plain.engine.termination.target_fitness = target;
    plain.engine.termination.max_evaluations = 50000;
    plain.runs = 30;
    plain.master_seed = 5000;
    MultiRunOutcome pe = multi_run(plain, lp);
    int successes = 0;
    for (const auto& r : pe.results)
        if (r.success) ++successes;

    RunConfig memetic = plain;
    MemeticConfig mc;
    mc.ls_id = "two_opt";
    mc.lamarckian = true;
    mc.offspring_fraction = 0.5;
    mc.ls_budget = 60;
    memetic.memetic = mc;
    MultiRunOutcome me = multi_run(memetic, lp);
    int ma_successes = 0;
    for (const auto& r : me.results)
        if (r.success) ++ma_successes;

    bool ok = successes >= 27 && ma_successes == 30 &&
              me.evaluations_summary.median <= 0.5 * pe.evaluations_summary.median;
    std::ostringstream detail;
    detail << "mu=" << mu << " plain " << successes << "/30, memetic " << ma_successes
           << "/30, medians " << me.evaluations_summary.median << " vs "
           << pe.evaluations_summary.median;
    report(3, "TSP optimality at desk scale", ok, detail.str());
}

// ---- criterion 4 ----

void criterion_forbidden_zone() {
    // base f(x) = 10 - 6 (x-2)^2 on [0,4]; forbidden zone (1,3); f(1)=f(3)=4
    auto base = [](double x) { return 10.0 - 6.0 * (x - 2.0) * (x - 2.0); };
    auto infeasible = [](double x) { return x > 1.0 && x < 3.0; };

    ForbiddenZoneShaper<double> shaper;
    shaper.feasibility_distance = [&](const double& x) {
        return infeasible(x) ? std::min(x - 1.0, 3.0 - x) : 0.0;
    };
    shaper.d_max = 1.0;
    shaper.c0 = 0.0;
    shaper.c1 = 2.0;
    shaper.feasible_boundary_min_fitness = 4.0;
    shaper.check();

    double shaped_best_x = 0.0, shaped_best = -1e300;
    double naive_best_x = 0.0, naive_best = -1e300;
    for (double x = 0.0; x <= 4.0 + 1e-12; x += 1e-3) {
        double s = shaper.shape(x, base(x));
        if (s > shaped_best) {
            shaped_best = s;
            shaped_best_x = x;
        }
        // naive lowering: uniform subtraction inside the zone, peak stays at 5 > 4
        double nv = infeasible(x) ? base(x) - 5.0 : base(x);
        if (nv > naive_best) {
            naive_best = nv;
            naive_best_x = x;
        }
    }
    bool ok = !infeasible(shaped_best_x) && infeasible(naive_best_x);
    std::ostringstream detail;
    detail << "shaped argmax " << shaped_best_x << ", naive argmax " << naive_best_x;
    report(4, "forbidden-zone shaping keeps the argmax feasible", ok, detail.str());
}

// ---- criterion 5 ----

SchedInstance twenty_step_instance() {
    nlohmann::json j = {{"resources", 3},
                        {"energy_limit", 12.0},
                        {"max_delay", 5.0},
                        {"deadlines", {{"1", 40.0}, {"2", 55.0}}},
                        {"steps", nlohmann::json::array()}};
    for (int order = 1; order <= 2; ++order)
        for (int k = 0; k < 10; ++k) {
            std::string id = (order == 1 ? "a" : "b") + std::to_string(k);
            nlohmann::json step = {{"id", id},
                                   {"order", order},
                                   {"duration", 1.0 + (k % 4)},
                                   {"energy", 3.0 + (k % 5)},
                                   {"delay_capable", k % 2 == 0},
                                   {"eligible", {k % 3, (k + 1) % 3}}};
            if (k >= 2) {
                // chain to the two previous steps of the same order
                std::string p1 = (order == 1 ? "a" : "b") + std::to_string(k - 1);
                std::string p2 = (order == 1 ? "a" : "b") + std::to_string(k - 2);
                step["predecessors"] = {p1, p2};
            } else if (k == 1) {
                step["predecessors"] = {(order == 1 ? "a" : "b") + std::to_string(0)};
            }
            j["steps"].push_back(step);
        }
    return SchedInstance::from_json(j);
}

void criterion_sched_validity() {
    SchedInstance inst = twenty_step_instance();
    GenomeRegistry reg = sched_registry(inst);
    std::size_t chrom_len = reg.layout.size();
    Rng rng(8899);
    RepairHook genotypic = make_sched_genotypic_repair(inst, DelayVariant::fixed_step_delays);

    bool ok = true;
    std::string detail;
    for (int i = 0; i < 1000 && ok; ++i) {
        Chromosome c = random_chromosome(reg, LengthPolicy::fixed(chrom_len), rng);

        SchedDecodeResult dec = sched_decode(c, inst, DelayVariant::fixed_step_delays);
        Schedule phen = sched_build(dec.order, dec.delays, inst, SchedRepairMode::phenotypic);
        std::string why;
        if (!sched_verify(phen, inst, &why)) {
            ok = false;
            detail = "phenotypic: " + why;
            break;
        }

        Chromosome repaired = genotypic(c, rng);
        SchedDecodeResult dec2 = sched_decode(repaired, inst, DelayVariant::fixed_step_delays);
        if (repair_precedence_order(dec2.order, inst) != dec2.order) {
            ok = false;
            detail = "genotypic repair left precedence violations in the decoded order";
            break;
        }
        Schedule geno = sched_build(dec2.order, dec2.delays, inst, SchedRepairMode::genotypic);
        if (!sched_verify(geno, inst, &why)) {
            ok = false;
            detail = "genotypic: " + why;
            break;
        }
    }

    // rectangle fixture: load 12 over limit 10 for 5 time units
    nlohmann::json rj = {{"resources", 2},
                         {"energy_limit", 10.0},
                         {"max_delay", 0.0},
                         {"deadlines", nlohmann::json::object()},
                         {"steps",
                          {{{"id", "a"},
                            {"order", 1},
                            {"duration", 5.0},
                            {"energy", 6.0},
                            {"eligible", {0}}},
                           {{"id", "b"},
                            {"order", 1},
                            {"duration", 5.0},
                            {"energy", 6.0},
                            {"eligible", {1}}}}}};
    SchedInstance rect = SchedInstance::from_json(rj);
    SchedCriteria rc = sched_criteria(sched_build({0, 1}, {0.0, 0.0}, rect), rect);
    if (std::abs(rc.peak_area - 10.0) > 1e-9 || rc.peak_count != 1.0 || rc.peak_max != 2.0) {
        ok = false;
        detail = "rectangle fixture criteria wrong";
    }

    // two equal peaks; shortening one shrinks only peak_area
    auto two_peaks = [](double dur2) {
        nlohmann::json tj = {{"resources", 4},
                             {"energy_limit", 10.0},
                             {"max_delay", 20.0},
                             {"deadlines", nlohmann::json::object()},
                             {"steps", nlohmann::json::array()}};
        int r = 0;
        for (double d : {4.0, 4.0, 4.0, dur2}) {
            tj["steps"].push_back({{"id", "s" + std::to_string(r)},
                                   {"order", 1},
                                   {"duration", d},
                                   {"energy", 6.0},
                                   {"delay_capable", true},
                                   {"eligible", {r}}});
            ++r;
        }
        return SchedInstance::from_json(tj);
    };
    std::vector<double> delays{0.0, 0.0, 10.0, 10.0};
    SchedInstance full = two_peaks(4.0);
    SchedInstance cut = two_peaks(2.0);
    SchedCriteria cf = sched_criteria(sched_build({0, 1, 2, 3}, delays, full), full);
    SchedCriteria cs = sched_criteria(sched_build({0, 1, 2, 3}, delays, cut), cut);
    if (!(cf.peak_count == cs.peak_count && cf.peak_max == cs.peak_max &&
          cs.peak_area < cf.peak_area)) {
        ok = false;
        detail = "peak shortening semantics wrong";
    }
    report(5, "scheduling validity and energy criteria", ok, detail);
}

// ---- criterion 6 ----

void criterion_layout_validity() {
    LayoutInstance inst;
    inst.width = 20.0;
    inst.length = 30.0;
    inst.max_genes = 48;
    GenomeRegistry reg = layout_registry(inst);
    LengthPolicy policy = layout_length_policy(inst);
    Rng rng(31337);

    bool ok = true;
    std::string detail;
    for (int i = 0; i < 1000 && ok; ++i) {
        Chromosome c = random_chromosome(reg, policy, rng);
        LayoutDecodeResult dec = layout_decode(c, inst);
        std::string why;
        if (!layout_verify(dec.placements, inst, &why)) {
            ok = false;
            detail = why;
            break;
        }
        for (std::size_t k = 0; k < dec.placements.size(); ++k)
            if (!layout_left_shift_minimal(dec.placements, k, inst)) {
                ok = false;
                detail = "placement " + std::to_string(k) + " not flush";
                break;
            }
    }
    if (layout_balance_violation({10, 10, 10, 10, 11}) != 0.0 ||
        std::abs(layout_balance_violation({10, 10, 10, 10, 12}) - 0.10) > 1e-12) {
        ok = false;
        detail = "balance boundary cases wrong";
    }
    report(6, "layout validity and left-shift minimality", ok, detail);
}

// ---- criterion 7 ----

ProblemDefinition flat_problem() {
    ProblemDefinition p;
    p.name = "flat";
    p.registry.structure = StructureKind::fixed_layout;
    GeneType gt;
    gt.type_id = "x";
    gt.params = {{ParamKind::real, 0.0, 1.0}};
    p.registry.register_gene_type(gt);
    p.registry.layout = {"x"};
    p.length_policy = LengthPolicy::fixed(1);
    Criterion c;
    c.id = "const";
    c.breakpoints = {{0.0, 0.0}, {1.0, 1.0}};
    c.weight = 1.0;
    p.fitness.criteria.push_back(c);
    p.evaluate = [](const Chromosome&) { return Evaluation{{0.5}, {}}; };
    return p;
}

void criterion_elitism() {
    bool ok = true;
    std::string detail;

    ProblemDefinition sphere = make_sphere_problem(4);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        EngineConfig config;
        config.mu = 18;
        config.deme_size = 9;
        config.termination.max_evaluations = 4000;
        EvolutionEngine engine(config, sphere, seed);
        engine.init();
        engine.run();
        const auto& prog = engine.progress();
        for (std::size_t i = 1; i < prog.size(); ++i)
            if (prog[i].best_fitness < prog[i - 1].best_fitness) {
                ok = false;
                detail = "best fitness decreased";
            }
    }

    ProblemDefinition flat = flat_problem();
    EngineConfig config;
    config.mu = 14;
    config.deme_size = 7;
    config.termination.g_acc = 10;
    EvolutionEngine engine(config, flat, 5);
    engine.init();
    RunStatus status = engine.run();
    if (status != RunStatus::converged || engine.generation() != 10) {
        ok = false;
        detail = "flat landscape terminated " + to_string(status) + " at generation " +
                 std::to_string(engine.generation());
    }
    report(7, "elitism and stagnation convergence", ok, detail);
}

// ---- criterion 8 ----

void criterion_tune_mu() {
    nlohmann::json pj = {{"kind", "sphere"}, {"dimensions", 5}};
    RunConfig base;
    base.problem_json = pj;
    base.engine.mu = 120;
    base.engine.deme_size = 9;
    base.master_seed = 8800;

    bool ok = true;
    std::ostringstream detail;
    try {
        MuTuneReport ea = tune_mu(base, 120);

        RunConfig ma = base;
        MemeticConfig mc;
        mc.ls_id = "hill_climb_real";
        mc.lamarckian = true;
        mc.offspring_fraction = 0.25;
        mc.ls_budget = 40;
        ma.memetic = mc;
        MuTuneReport ma_report = tune_mu(ma, 120);

        const MuTrial* rec = nullptr;
        const MuTrial* next_smaller = nullptr;
        for (std::size_t i = 0; i < ea.trace.size(); ++i) {
            if (ea.trace[i].mu == ea.recommended_mu) rec = &ea.trace[i];
            if (ea.trace[i].mu < ea.recommended_mu &&
                (next_smaller == nullptr || ea.trace[i].mu > next_smaller->mu))
                next_smaller = &ea.trace[i];
        }
        if (rec == nullptr || rec->success_rate != 1.0) {
            ok = false;
            detail << "recommended mu batch not fully successful; ";
        }
        if (next_smaller == nullptr) {
            ok = false;
            detail << "no smaller mu was tried; ";
        } else if (next_smaller->success_rate >= 1.0 &&
                   next_smaller->effort_cv <= 2.0 * std::max(rec ? rec->effort_cv : 0.0,
                                                             1e-12)) {
            ok = false;
            detail << "next smaller mu neither failed nor scattered; ";
        }
        if (ma_report.recommended_mu >= ea.recommended_mu) {
            ok = false;
            detail << "MA mu " << ma_report.recommended_mu << " not below EA mu "
                   << ea.recommended_mu << "; ";
        }
        detail << "EA mu " << ea.recommended_mu << ", MA mu " << ma_report.recommended_mu;
    } catch (const std::exception& e) {
        ok = false;
        detail << e.what();
    }
    report(8, "tune-mu working-area shape", ok, detail.str());
}

// ---- criterion 9 ----

void criterion_statistics() {
    bool ok = true;
    std::string detail;

    ConfidenceInterval ci = confidence_interval({1, 2, 3, 4, 5}, 0.95);
    if (std::abs(ci.low - 1.037) > 0.01 || std::abs(ci.high - 4.963) > 0.01) {
        ok = false;
        detail = "CI oracle mismatch";
    }

    Rng rng(20200202);
    int covered = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> sample;
        for (int i = 0; i < 10; ++i) sample.push_back(gaussian(rng, 5.0, 3.0));
        ConfidenceInterval c = confidence_interval(sample, 0.95);
        if (c.low <= 5.0 && 5.0 <= c.high) ++covered;
    }
    if (covered < 930 || covered > 970) {
        ok = false;
        detail = "coverage " + std::to_string(covered) + "/1000";
    }

    std::vector<double> a{1.0, 2.5, 3.0, 4.5, 5.0};
    TTestResult self = two_sample_t_test(a, a);
    if (self.significant || self.t != 0.0) {
        ok = false;
        detail = "self t-test flagged significant";
    }
    report(9, "statistics oracles", ok, detail);
}

// ---- criterion 10 ----

void criterion_archive() {
    nlohmann::json pj = {{"kind", "sphere"}, {"dimensions", 3}};
    LoadedProblem lp = load_problem(pj);

    EngineConfig config;
    config.mu = 14;
    config.deme_size = 7;
    config.termination.max_evaluations = 1000000;  // stepped manually

    SimilarityScheme scheme;
    scheme.default_real_epsilon = 1e-3;

    EvolutionEngine with(config, lp.problem, 424242, std::nullopt, nullptr, scheme, 1000000);
    EvolutionEngine without(config, lp.problem, 424242);
    with.init();
    without.init();
    for (int g = 0; g < 30; ++g) {
        with.step();
        without.step();
    }

    bool ok = true;
    std::string detail;
    const SolutionArchive* archive = with.archive();
    if (archive == nullptr) {
        ok = false;
        detail = "archive missing";
    } else {
        if (with.evaluations() != archive->size() ||
            with.evaluations() != archive->miss_count()) {
            ok = false;
            detail = "evaluator calls != distinct canonical keys";
        }
        const auto& pa = with.progress();
        const auto& pb = without.progress();
        for (std::size_t i = 0; i < pa.size() && i < pb.size(); ++i)
            if (pa[i].best_fitness != pb[i].best_fitness) {
                ok = false;
                detail = "best-fitness sequence diverged at generation " + std::to_string(i);
                break;
            }
    }
    report(10, "archive deduplicates without changing the search", ok, detail);
}

// ---- criterion 11 ----

void criterion_cli_determinism() {
    const char* cli = std::getenv("EVOKIT_CLI");
    if (cli == nullptr) {
        report(11, "CLI determinism", false, "EVOKIT_CLI not set");
        return;
    }
    fs::path dir = fs::temp_directory_path() / "evokit_accept";
    fs::create_directories(dir);
    fs::path config = dir / "config.json";
    {
        std::ofstream os(config);
        os << R"({
  "problem": {"kind": "sphere", "dimensions": 4},
  "engine": {"mu": 18, "deme_size": 9,
             "termination": {"max_evaluations": 4000}},
  "seed": 12, "runs": 10
})";
    }
    auto run_once = [&](const std::string& out) {
        std::string cmd = std::string(cli) + " run --config " + config.string() + " --out " +
                          (dir / out).string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    bool ok = run_once("out1") == 0 && run_once("out2") == 0;
    std::string detail = ok ? "" : "CLI invocation failed";
    if (ok) {
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        std::string a = slurp(dir / "out1" / "results.csv");
        std::string b = slurp(dir / "out2" / "results.csv");
        ok = !a.empty() && a == b;
        if (!ok) detail = "results.csv differs between identical campaigns";
    }
    report(11, "CLI determinism", ok, detail);
}

}  // namespace

int main() {
    criterion_table1();
    criterion_tsp_validity();
    criterion_tsp_optimality();
    criterion_forbidden_zone();
    criterion_sched_validity();
    criterion_layout_validity();
    criterion_elitism();
    criterion_tune_mu();
    criterion_statistics();
    criterion_archive();
    criterion_cli_determinism();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ")
              << (g_failures == 0 ? "" : std::to_string(g_failures)) << std::endl;
    return g_failures == 0 ? 0 : 1;
}
