#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evokit/fitness.hpp"
#include "evokit/genome.hpp"
#include "evokit/variation.hpp"

namespace evokit {

/// Raw evaluation of one phenotype: per-criterion values plus the violation
/// measures feeding the penalty functions.
struct Evaluation {
    std::vector<double> raw_values;
    std::vector<double> violations;
};

/// Binds a genome to a phenotype domain: registry + decoder/evaluator +
/// criteria + optional repair hook. The evaluator must be total over valid
/// chromosomes (it repairs or devalues instead of failing).
struct ProblemDefinition {
    std::string name;
    GenomeRegistry registry;
    LengthPolicy length_policy;
    FitnessSpec fitness;
    std::function<Evaluation(const Chromosome&)> evaluate;
    RepairHook genotypic_repair;  // optional

    FitnessReport assess(const Chromosome& c) const {
        Evaluation e = evaluate(c);
        return fitness.assess(e.raw_values, e.violations);
    }

    Chromosome random(Rng& rng) const {
        return random_chromosome(registry, length_policy, rng);
    }
};

}  // namespace evokit
