#pragma once

#include <cmath>

#include "evokit/problems/problem.hpp"

namespace evokit {

/// Minimize sum x_i^2 over [-5,5]^k, expressed on the quality scale with 1 at
/// the origin and 0 at the worst corner. Benchmark for tuning and memetic
/// tests; the optimum is known.
inline ProblemDefinition make_sphere_problem(std::size_t dimensions, double lower = -5.0,
                                             double upper = 5.0) {
    if (dimensions < 1) throw ConfigError("sphere needs at least one dimension");
    ProblemDefinition p;
    p.name = "sphere";
    p.registry.structure = StructureKind::fixed_layout;
    GeneType gt;
    gt.type_id = "x";
    gt.name = "coordinate";
    gt.params.push_back({ParamKind::real, lower, upper});
    p.registry.register_gene_type(std::move(gt));
    p.registry.layout.assign(dimensions, "x");
    p.length_policy = LengthPolicy::fixed(dimensions);

    double corner = std::max(lower * lower, upper * upper) * static_cast<double>(dimensions);
    Criterion c;
    c.id = "sum_sq";
    c.name = "sum of squares";
    c.direction = Direction::minimize;
    c.breakpoints = {{0.0, 1.0}, {corner, 0.0}};
    c.weight = 1.0;
    p.fitness.criteria.push_back(c);

    p.evaluate = [](const Chromosome& chr) {
        double s = 0.0;
        for (const auto& g : chr.genes) s += g.values[0] * g.values[0];
        return Evaluation{{s}, {}};
    };
    return p;
}

}  // namespace evokit
