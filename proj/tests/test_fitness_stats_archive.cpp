#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "evokit/archive.hpp"
#include "evokit/fitness.hpp"
#include "evokit/harness/stats.hpp"

using namespace evokit;

TEST_CASE("piecewise-linear normalization with clamping") {
    Criterion up;
    up.id = "up";
    up.breakpoints = {{0.0, 0.0}, {100.0, 1.0}};
    CHECK(normalize(up, 50.0) == doctest::Approx(0.5));
    CHECK(normalize(up, -10.0) == doctest::Approx(0.0));
    CHECK(normalize(up, 200.0) == doctest::Approx(1.0));

    Criterion down;
    down.id = "down";
    down.direction = Direction::minimize;
    down.breakpoints = {{0.0, 1.0}, {10.0, 0.0}};
    CHECK(normalize(down, 0.0) == doctest::Approx(1.0));

    Criterion bad;
    bad.id = "bad";
    bad.breakpoints = {{0.0, 0.0}};
    CHECK_THROWS_AS(bad.check(), ConfigError);
    bad.breakpoints = {{0.0, 0.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("weighted sum") {
    CHECK(weighted_sum({1.0, 1.0}, {0.3, 0.7}) == doctest::Approx(1.0));
    CHECK(weighted_sum({0.5, 1.0}, {0.5, 0.5}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(weighted_sum({1.0, 1.0}, {0.5, 0.4}), WeightError);
}

TEST_CASE("multiplicative penalties") {
    CHECK(apply_penalties(0.8, {1.0}) == doctest::Approx(0.8));
    CHECK(apply_penalties(0.8, {0.5, 0.5}) == doctest::Approx(0.2));
    CHECK(apply_penalties(0.8, {0.0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(apply_penalties(0.8, {1.5}), PenaltyRangeError);

    PenaltySpec p;
    p.id = "p";
    p.mapping = {{0.0, 0.9}, {1.0, 0.5}};
    CHECK_THROWS_AS(p.check(), ConfigError);  // factor(0) must be 1
    p.mapping = {{0.0, 1.0}, {1.0, 0.5}};
    p.check();
    CHECK(p.factor(0.0) == doctest::Approx(1.0));
    CHECK(p.factor(0.5) == doctest::Approx(0.75));
}

TEST_CASE("penalty factors below one strictly reduce positive fitness") {
    FitnessSpec spec;
    Criterion c;
    c.id = "q";
    c.breakpoints = {{0.0, 0.0}, {1.0, 1.0}};
    c.weight = 1.0;
    spec.criteria.push_back(c);
    PenaltySpec p;
    p.id = "v";
    p.mapping = {{0.0, 1.0}, {2.0, 0.0}};
    spec.penalties.push_back(p);
    spec.check();

    FitnessReport clean = spec.assess({0.8}, {0.0});
    FitnessReport hit = spec.assess({0.8}, {1.0});
    CHECK(clean.final_fitness == doctest::Approx(0.8));
    CHECK(hit.final_fitness < clean.final_fitness);
}

TEST_CASE("forbidden-zone shaper endpoints and feasibility") {
    ForbiddenZoneShaper<double> shaper;
    shaper.feasibility_distance = [](const double& x) {
        if (x <= 1.0 || x >= 3.0) return 0.0;
        return std::min(x - 1.0, 3.0 - x);
    };
    shaper.d_max = 1.0;
    shaper.c0 = 0.0;
    shaper.c1 = 2.0;
    shaper.feasible_boundary_min_fitness = 4.0;
    shaper.check();

    auto base = [](double x) { return 10.0 - 6.0 * (x - 2.0) * (x - 2.0); };
    CHECK(shaper.shape(0.5, base(0.5)) == doctest::Approx(base(0.5)));
    CHECK(shaper.shape(2.0, base(2.0)) == doctest::Approx(0.0));          // d = d_max -> c0
    CHECK(shaper.shape(1.0 + 1e-9, base(1.0)) == doctest::Approx(2.0));   // d -> 0 -> c1

    // grid scan: shaped values inside the zone stay below the boundary minimum
    double max_shaped = -1e300;
    for (double x = 1.0005; x < 3.0; x += 1e-3)
        max_shaped = std::max(max_shaped, shaper.shape(x, base(x)));
    CHECK(max_shaped < 4.0);

    ForbiddenZoneShaper<double> bad = shaper;
    bad.c1 = 3.0;  // above margin * boundary estimate
    CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("pareto dominance") {
    std::vector<Direction> maxmax{Direction::maximize, Direction::maximize};
    CHECK(dominates({2, 3}, {1, 3}, maxmax));
    CHECK_FALSE(dominates({2, 3}, {3, 2}, maxmax));
    CHECK_FALSE(dominates({3, 2}, {2, 3}, maxmax));
    CHECK_FALSE(dominates({2, 3}, {2, 3}, maxmax));
    std::vector<Direction> minmax{Direction::minimize, Direction::maximize};
    CHECK(dominates({1, 3}, {2, 3}, minmax));
}

TEST_CASE("nondominated front matches the pairwise oracle") {
    std::vector<Direction> dirs{Direction::maximize, Direction::maximize};
    std::vector<std::vector<double>> pts{{1, 2}, {2, 1}, {0, 0}};
    auto front = nondominated_front(pts, dirs);
    CHECK(front.size() == 2);

    CHECK(nondominated_front({{5, 5}}, dirs).size() == 1);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<double>> set;
        for (int i = 0; i < 200; ++i) set.push_back({u(rng), u(rng)});
        auto fr = nondominated_front(set, dirs);
        std::size_t oracle = 0;
        for (const auto& a : set) {
            bool dominated = false;
            for (const auto& b : set)
                if (dominates(b, a, dirs)) dominated = true;
            if (!dominated) ++oracle;
        }
        CHECK(fr.size() == oracle);
    }
}

TEST_CASE("confidence interval oracle values") {
    ConfidenceInterval ci = confidence_interval({1, 2, 3, 4, 5}, 0.95);
    CHECK(ci.low == doctest::Approx(1.037).epsilon(0.01));
    CHECK(ci.high == doctest::Approx(4.963).epsilon(0.01));

    ConfidenceInterval flat = confidence_interval({2, 2, 2, 2}, 0.95);
    CHECK(flat.low == doctest::Approx(2.0));
    CHECK(flat.high == doctest::Approx(2.0));

    ConfidenceInterval wide = confidence_interval({1, 2, 3, 4, 5}, 0.999);
    CHECK(wide.high - wide.low > ci.high - ci.low);

    CHECK_THROWS_AS(confidence_interval({1.0}, 0.95), InsufficientData);
}

TEST_CASE("student t quantile") {
    CHECK(student_t_quantile(0.975, 4.0) == doctest::Approx(2.776).epsilon(1e-3));
    CHECK(student_t_quantile(0.5, 10.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("welch t-test") {
    std::vector<double> a;
    for (int r = 0; r < 6; ++r)
        for (double v : {0.0, 0.0, 0.0, 0.0001, -0.0001}) a.push_back(v);
    TTestResult self = two_sample_t_test(a, a);
    CHECK(self.t == doctest::Approx(0.0));
    CHECK_FALSE(self.significant);

    std::vector<double> b;
    for (double v : a) b.push_back(v + 100.0);
    TTestResult sep = two_sample_t_test(a, b);
    CHECK(sep.significant);

    std::vector<double> x{1, 2, 3, 4}, y{2, 4, 5, 9};
    CHECK(two_sample_t_test(x, y).t == doctest::Approx(-two_sample_t_test(y, x).t));
    CHECK_THROWS_AS(two_sample_t_test({1.0}, x), InsufficientData);
}

TEST_CASE("confidence interval coverage on synthetic normals") {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> normal(3.0, 2.0);
    int covered = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> sample;
        for (int i = 0; i < 12; ++i) sample.push_back(normal(rng));
        ConfidenceInterval ci = confidence_interval(sample, 0.95);
        if (ci.low <= 3.0 && 3.0 <= ci.high) ++covered;
    }
    CHECK(covered >= 930);
    CHECK(covered <= 970);
}

namespace {

GenomeRegistry one_real_registry() {
    GenomeRegistry r;
    r.structure = StructureKind::fixed_layout;
    GeneType gt;
    gt.type_id = "x";
    gt.params = {{ParamKind::real, 0.0, 1.0}};
    r.register_gene_type(gt);
    r.layout = {"x"};
    return r;
}

Chromosome one_real(double v) {
    Chromosome c;
    c.length_policy = LengthPolicy::fixed(1);
    c.genes.push_back({"x", {v}});
    return c;
}

}  // namespace

TEST_CASE("canonical key quantization") {
    GenomeRegistry r = one_real_registry();
    SimilarityScheme scheme;
    scheme.default_real_epsilon = 0.1;
    CHECK(canonical_key(r, one_real(0.44), scheme) == canonical_key(r, one_real(0.41), scheme));
    CHECK(canonical_key(r, one_real(0.44), scheme) != canonical_key(r, one_real(0.46), scheme));
    CHECK(canonical_key(r, one_real(0.44), scheme) == canonical_key(r, one_real(0.44), scheme));
}

TEST_CASE("archive caches within epsilon and counts hits") {
    GenomeRegistry r = one_real_registry();
    SimilarityScheme scheme;
    scheme.default_real_epsilon = 0.1;
    SolutionArchive archive(scheme, 100);
    int calls = 0;
    auto evaluator = [&](const Chromosome&) {
        ++calls;
        FitnessReport rep;
        rep.final_fitness = 0.5;
        return rep;
    };

    archive.lookup_or_evaluate(r, one_real(0.44), evaluator);
    archive.lookup_or_evaluate(r, one_real(0.44), evaluator);
    CHECK(calls == 1);
    FitnessReport a = archive.lookup_or_evaluate(r, one_real(0.41), evaluator);
    CHECK(calls == 1);  // same grid cell
    CHECK(a.final_fitness == doctest::Approx(0.5));
    archive.lookup_or_evaluate(r, one_real(0.46), evaluator);
    CHECK(calls == 2);
    CHECK(archive.hit_count() == 2);
    CHECK(archive.miss_count() == 2);
}

TEST_CASE("archive capacity zero bypasses the cache") {
    GenomeRegistry r = one_real_registry();
    SolutionArchive archive(SimilarityScheme{}, 0);
    int calls = 0;
    auto evaluator = [&](const Chromosome&) {
        ++calls;
        return FitnessReport{};
    };
    for (int i = 0; i < 5; ++i) archive.lookup_or_evaluate(r, one_real(0.5), evaluator);
    CHECK(calls == 5);
}

TEST_CASE("archive LRU eviction keeps the capacity bound") {
    GenomeRegistry r = one_real_registry();
    SimilarityScheme scheme;
    scheme.default_real_epsilon = 1e-6;
    SolutionArchive archive(scheme, 10);
    int calls = 0;
    auto evaluator = [&](const Chromosome&) {
        ++calls;
        return FitnessReport{};
    };
    for (int i = 0; i < 50; ++i)
        archive.lookup_or_evaluate(r, one_real(i * 0.01), evaluator);
    CHECK(archive.size() <= 10);
    CHECK(calls == 50);
    // oldest entries were evicted: re-querying the first key re-evaluates
    archive.lookup_or_evaluate(r, one_real(0.0), evaluator);
    CHECK(calls == 51);
}
