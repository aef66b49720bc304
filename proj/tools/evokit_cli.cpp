// Command-line front end: run campaigns, tune population size, compare
// configurations, and query the TSP brute-force oracle.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evokit/evokit.hpp"

namespace fs = std::filesystem;
using namespace evokit;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);  // binary: identical bytes everywhere
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

void export_phenotype(const LoadedProblem& lp, const MultiRunOutcome& out,
                      const fs::path& dir) {
    if (lp.kind == "sched") {
        SchedDecodeResult dec = sched_decode(out.best_chromosome, *lp.sched, lp.sched_variant);
        Schedule sch = sched_build(dec.order, dec.delays, *lp.sched, lp.sched_repair);
        auto os = open_out(dir / "schedule.csv");
        sched_export_csv(sch, *lp.sched, os);
    } else if (lp.kind == "layout") {
        LayoutDecodeResult dec = layout_decode(out.best_chromosome, *lp.layout);
        auto svg = open_out(dir / "placements.svg");
        layout_export_svg(dec.placements, *lp.layout, svg);
        auto csv = open_out(dir / "placements.csv");
        layout_export_csv(dec.placements, csv);
    }
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> runs, const std::string& out_dir) {
    RunConfig config = RunConfig::from_file(config_path);
    if (seed) config.master_seed = *seed;
    if (runs) config.runs = *runs;

    LoadedProblem lp = load_problem(config.problem_json);
    MultiRunOutcome out = multi_run(config, lp);

    fs::path dir(out_dir);
    fs::create_directories(dir);
    {
        auto os = open_out(dir / "results.csv");
        write_results_csv(os, out.results);
    }
    {
        auto os = open_out(dir / "progress.csv");
        write_progress_csv(os, out.progress);
    }
    {
        auto os = open_out(dir / "report.txt");
        write_report_txt(os, config, out);
    }
    export_phenotype(lp, out, dir);

    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "runs: " << out.results.size()
              << "  best fitness: " << fmt_double(out.best_fitness)
              << "  success rate: " << fmt_double(out.fitness_summary.success_rate)
              << "\n";
    std::cout << "wrote " << (dir / "results.csv").string() << ", progress.csv, report.txt\n";
    return 0;
}

int cmd_tune_mu(const std::string& config_path, std::size_t start_mu) {
    RunConfig config = RunConfig::from_file(config_path);
    MuTuneReport report = tune_mu(config, start_mu);
    write_tune_report(std::cout, report);
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, bool waive) {
    RunConfig a = RunConfig::from_file(path_a);
    RunConfig b = RunConfig::from_file(path_b);
    ComparisonReport report = compare(a, b, waive);
    write_comparison_report(std::cout, report);
    return 0;
}

int cmd_oracle_tsp(const std::string& instance_path) {
    TspInstance instance = TspInstance::from_csv(instance_path);
    auto [tour, length] = tsp_brute_force(instance);
    std::cout << "optimal length: " << fmt_double(length) << "\ntour:";
    for (std::size_t city : tour) std::cout << ' ' << city;
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evokit: evolutionary optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    auto* run = app.add_subcommand("run", "execute a multi-run campaign");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed, "override the master seed");
    run->add_option("--runs", runs, "override the run count");
    run->add_option("--out", out_dir, "output directory (default .)");

    std::string tune_config;
    std::size_t start_mu = 0;
    auto* tune = app.add_subcommand("tune-mu", "population-size working-area search");
    tune->add_option("--config", tune_config, "JSON config file")->required();
    tune->add_option("--start-mu", start_mu, "initial (large) population size")->required();

    std::string path_a, path_b;
    bool waive = false;
    auto* cmp = app.add_subcommand("compare", "statistical comparison of two configs");
    cmp->add_option("--a", path_a, "first config")->required();
    cmp->add_option("--b", path_b, "second config")->required();
    cmp->add_flag("--waive-tuning", waive, "compare untuned configs anyway");

    std::string oracle_instance;
    auto* oracle = app.add_subcommand("oracle", "exact reference solvers");
    auto* oracle_tsp = oracle->add_subcommand("tsp", "brute-force TSP optimum (n <= 10)");
    oracle_tsp->add_option("--instance", oracle_instance, "TSP CSV instance")->required();
    oracle->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) return cmd_run(config_path, seed, runs, out_dir);
        if (app.got_subcommand(tune)) return cmd_tune_mu(tune_config, start_mu);
        if (app.got_subcommand(cmp)) return cmd_compare(path_a, path_b, waive);
        if (app.got_subcommand(oracle)) return cmd_oracle_tsp(oracle_instance);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
