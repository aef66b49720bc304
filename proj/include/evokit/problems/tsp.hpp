#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "evokit/problems/problem.hpp"

namespace evokit {

struct TspInstance {
    std::size_t n = 0;
    std::vector<double> xs, ys;
    std::vector<std::vector<double>> dist;

    static TspInstance from_coordinates(std::vector<double> x, std::vector<double> y) {
        TspInstance t;
        t.n = x.size();
        t.xs = std::move(x);
        t.ys = std::move(y);
        t.dist.assign(t.n, std::vector<double>(t.n, 0.0));
        for (std::size_t i = 0; i < t.n; ++i)
            for (std::size_t j = 0; j < t.n; ++j)
                t.dist[i][j] = std::hypot(t.xs[i] - t.xs[j], t.ys[i] - t.ys[j]);
        return t;
    }

    /// CSV rows "id,x,y"; ids must be 1..n in any order.
    static TspInstance from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InstanceError("cannot open TSP instance: " + path);
        std::vector<std::pair<double, double>> pts;
        std::string line;
        std::vector<std::size_t> ids;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("id,", 0) == 0) continue;
            std::stringstream ss(line);
            std::string f;
            std::getline(ss, f, ',');
            std::size_t id = static_cast<std::size_t>(std::stoul(f));
            std::getline(ss, f, ',');
            double x = std::stod(f);
            std::getline(ss, f, ',');
            double y = std::stod(f);
            ids.push_back(id);
            pts.emplace_back(x, y);
        }
        std::vector<double> xs(pts.size()), ys(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            std::size_t id = ids[k];
            if (id < 1 || id > pts.size()) throw InstanceError("city id out of range");
            xs[id - 1] = pts[k].first;
            ys[id - 1] = pts[k].second;
        }
        return from_coordinates(std::move(xs), std::move(ys));
    }

    static TspInstance random_euclidean(std::size_t n, Rng& rng, double side = 100.0) {
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = uniform_real(rng, 0.0, side);
            ys[i] = uniform_real(rng, 0.0, side);
        }
        return from_coordinates(std::move(xs), std::move(ys));
    }
};

/// A tour is a permutation of the 1-based city numbers.
using Tour = std::vector<std::size_t>;

inline double tsp_tour_length(const Tour& tour, const TspInstance& instance) {
    double len = 0.0;
    for (std::size_t i = 0; i < tour.size(); ++i) {
        std::size_t a = tour[i] - 1;
        std::size_t b = tour[(i + 1) % tour.size()] - 1;
        len += instance.dist[a][b];
    }
    return len;
}

inline bool is_permutation_tour(const Tour& tour, std::size_t n) {
    if (tour.size() != n) return false;
    std::vector<bool> seen(n + 1, false);
    for (std::size_t c : tour) {
        if (c < 1 || c > n || seen[c]) return false;
        seen[c] = true;
    }
    return true;
}

/// Exhaustive (n-1)!/2 search; the oracle for desk-scale acceptance checks.
inline std::pair<Tour, double> tsp_brute_force(const TspInstance& instance) {
    if (instance.n > 10) throw TooLarge("brute force limited to n <= 10");
    if (instance.n == 0) throw InstanceError("empty instance");
    Tour perm(instance.n);
    std::iota(perm.begin(), perm.end(), 1);
    Tour best = perm;
    double best_len = tsp_tour_length(perm, instance);
    // first city fixed; reversal symmetry halved by ordering the neighbors
    Tour rest(perm.begin() + 1, perm.end());
    do {
        if (rest.size() >= 2 && rest.front() > rest.back()) continue;
        Tour t;
        t.push_back(1);
        t.insert(t.end(), rest.begin(), rest.end());
        double len = tsp_tour_length(t, instance);
        if (len < best_len) {
            best_len = len;
            best = t;
        }
    } while (std::next_permutation(rest.begin(), rest.end()));
    return {best, best_len};
}

// --- encoding 1: city-per-gene permutation, gene order read as the tour ---

inline GenomeRegistry tsp_permutation_registry(const TspInstance& instance) {
    GenomeRegistry r;
    r.structure = StructureKind::permutation;
    for (std::size_t c = 1; c <= instance.n; ++c) {
        GeneType gt;
        gt.type_id = "city" + std::to_string(c);
        gt.name = gt.type_id;
        r.register_gene_type(std::move(gt));
        r.layout.push_back("city" + std::to_string(c));
    }
    return r;
}

inline Tour tsp_decode_permutation(const Chromosome& c, const TspInstance& instance) {
    Tour tour;
    std::vector<bool> seen(instance.n + 1, false);
    for (const auto& g : c.genes) {
        std::size_t city = static_cast<std::size_t>(std::stoul(g.type_id.substr(4)));
        if (city < 1 || city > instance.n || seen[city])
            throw NotPermutation("duplicate or out-of-range city gene");
        seen[city] = true;
        tour.push_back(city);
    }
    if (tour.size() != instance.n) throw NotPermutation("wrong gene count");
    return tour;
}

// --- encoding 2: index into the shrinking list of unvisited cities ---

enum class IndexRepairMode {
    genotypic_redice,  // out-of-range index redrawn in range and written back
    phenotypic_modulo  // modulo reduction; biased toward the list beginning
};

inline GenomeRegistry tsp_index_registry(const TspInstance& instance) {
    GenomeRegistry r;
    r.structure = StructureKind::fixed_layout;
    GeneType gt;
    gt.type_id = "idx";
    gt.name = "next-city index";
    // a simple uniform range for all genes; per-position ranges enforced by repair
    gt.params.push_back({ParamKind::integer, 1.0, static_cast<double>(instance.n)});
    r.register_gene_type(std::move(gt));
    r.layout.assign(instance.n, "idx");
    return r;
}

/// Decodes the shrinking-list encoding. In genotypic mode an out-of-range
/// index is re-diced uniformly in the applicable range and written back into
/// the gene, so the chromosome is mutated in place.
inline Tour tsp_decode_index_list(Chromosome& c, const TspInstance& instance,
                                  IndexRepairMode mode, Rng& rng) {
    std::vector<std::size_t> remaining(instance.n);
    std::iota(remaining.begin(), remaining.end(), 1);
    Tour tour;
    for (std::size_t i = 0; i < instance.n; ++i) {
        long long range = static_cast<long long>(remaining.size());
        long long v = static_cast<long long>(c.genes[i].values[0]);
        if (v < 1 || v > range) {
            if (mode == IndexRepairMode::genotypic_redice) {
                v = uniform_int(rng, 1, range);
                c.genes[i].values[0] = static_cast<double>(v);
            } else {
                v = (v - 1) % range + 1;
                if (v < 1) v += range;
            }
        }
        std::size_t pos = static_cast<std::size_t>(v - 1);
        tour.push_back(remaining[pos]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return tour;
}

// --- encoding 3: list-shift genes over the fixed city order 1..n ---

inline GenomeRegistry tsp_shift_registry(const TspInstance& instance) {
    GenomeRegistry r;
    r.structure = StructureKind::free_sequence;
    GeneType gt;
    gt.type_id = "shift";
    gt.name = "city shift distance";
    gt.params.push_back({ParamKind::integer, 1.0, static_cast<double>(instance.n - 1)});
    r.register_gene_type(std::move(gt));
    r.layout.push_back("shift");
    return r;
}

inline LengthPolicy tsp_shift_length_policy(const TspInstance& instance) {
    return LengthPolicy::variable((instance.n + 1) / 2, instance.n);
}

/// Gene i moves the city at list position i (1-based) v positions to the
/// right, wrapping over the list length. Always yields a permutation.
inline Tour tsp_decode_shift(const Chromosome& c, const TspInstance& instance) {
    std::size_t n = instance.n;
    if (c.genes.size() < (n + 1) / 2)
        throw LengthPolicyError("shift chromosome shorter than n/2");
    Tour list(n);
    std::iota(list.begin(), list.end(), 1);
    for (std::size_t i = 0; i < std::min(c.genes.size(), n); ++i) {
        std::size_t v = static_cast<std::size_t>(c.genes[i].values[0]) % n;
        if (v == 0) continue;
        std::size_t from = i;  // 0-based position of the 1-based "i-th" entry
        std::size_t to = (from + v) % n;
        std::size_t city = list[from];
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(from));
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(to), city);
    }
    return list;
}

// --- problem bindings ---

enum class TspEncoding { permutation, index_list, shift };

/// Quality 1 at tour length 0, quality 0 at a pessimistic upper bound.
inline FitnessSpec tsp_fitness_spec(const TspInstance& instance) {
    double worst = 0.0;
    for (std::size_t i = 0; i < instance.n; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < instance.n; ++j) m = std::max(m, instance.dist[i][j]);
        worst += m;
    }
    if (worst <= 0.0) worst = 1.0;
    FitnessSpec spec;
    Criterion c;
    c.id = "tour_length";
    c.name = "tour length";
    c.direction = Direction::minimize;
    c.breakpoints = {{0.0, 1.0}, {worst, 0.0}};
    c.weight = 1.0;
    spec.criteria.push_back(c);
    return spec;
}

inline ProblemDefinition make_tsp_problem(const TspInstance& instance, TspEncoding encoding,
                                          std::uint64_t repair_seed = 12345) {
    ProblemDefinition p;
    p.name = "tsp";
    p.fitness = tsp_fitness_spec(instance);
    switch (encoding) {
        case TspEncoding::permutation:
            p.registry = tsp_permutation_registry(instance);
            p.length_policy = LengthPolicy::fixed(instance.n);
            p.evaluate = [instance](const Chromosome& c) {
                return Evaluation{{tsp_tour_length(tsp_decode_permutation(c, instance), instance)},
                                  {}};
            };
            break;
        case TspEncoding::index_list:
            p.registry = tsp_index_registry(instance);
            p.length_policy = LengthPolicy::fixed(instance.n);
            p.evaluate = [instance, repair_seed](const Chromosome& c) {
                // evaluation itself stays pure: the repair rng is derived from
                // the gene content so equal chromosomes decode identically
                Chromosome copy = c;
                std::uint64_t h = repair_seed;
                for (const auto& g : c.genes)
                    h = h * 1099511628211ULL + static_cast<std::uint64_t>(g.values[0]);
                Rng rng(h);
                Tour t = tsp_decode_index_list(copy, instance,
                                               IndexRepairMode::genotypic_redice, rng);
                return Evaluation{{tsp_tour_length(t, instance)}, {}};
            };
            p.genotypic_repair = [instance](Chromosome c, Rng& rng) {
                tsp_decode_index_list(c, instance, IndexRepairMode::genotypic_redice, rng);
                return c;
            };
            break;
        case TspEncoding::shift:
            p.registry = tsp_shift_registry(instance);
            p.length_policy = tsp_shift_length_policy(instance);
            p.evaluate = [instance](const Chromosome& c) {
                return Evaluation{{tsp_tour_length(tsp_decode_shift(c, instance), instance)}, {}};
            };
            break;
    }
    return p;
}

inline Tour tsp_decode_any(const Chromosome& c, const TspInstance& instance,
                           TspEncoding encoding) {
    switch (encoding) {
        case TspEncoding::permutation: return tsp_decode_permutation(c, instance);
        case TspEncoding::index_list: {
            Chromosome copy = c;
            Rng rng(1);
            return tsp_decode_index_list(copy, instance, IndexRepairMode::phenotypic_modulo, rng);
        }
        case TspEncoding::shift: return tsp_decode_shift(c, instance);
    }
    throw ConfigError("unknown encoding");
}

}  // namespace evokit
