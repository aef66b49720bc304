#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "evokit/genome.hpp"

namespace evokit {

/// Tunables for the mutation operators. The per-operator weights steer which
/// operator a pipeline draws; inapplicable operators are skipped.
struct OperatorConfig {
    double small_step_fraction = 0.7;        // P(small step) vs full-range redraw
    double small_step_sigma_fraction = 0.1;  // step scale as fraction of the bound range
    double w_parameter = 1.0;
    double w_shift_gene = 1.0;
    double w_shift_segment = 0.5;
    double w_invert_segment = 0.5;
    double w_length_insert = 0.25;
    double w_length_delete = 0.25;
    double crossover_probability = 0.6;
    double selection_pressure = 2.0;  // linear ranking, in [1,2]

    void check() const {
        if (small_step_fraction < 0 || small_step_fraction > 1)
            throw ConfigError("small_step_fraction out of [0,1]");
        double total = w_parameter + w_shift_gene + w_shift_segment + w_invert_segment +
                       w_length_insert + w_length_delete;
        if (total <= 0) throw ConfigError("operator weights all zero");
    }
};

/// Mutates exactly one parameter, respecting its bounds. With probability
/// small_step_fraction a symmetric step scaled to the bound range is added and
/// clamped; otherwise the value is redrawn uniformly in bounds.
inline Chromosome mutate_parameter(const GenomeRegistry& registry, Chromosome c,
                                   std::size_t gene_index, std::size_t param_index,
                                   const OperatorConfig& config, Rng& rng) {
    if (gene_index >= c.genes.size())
        throw IndexError("gene_index");
    Gene& g = c.genes[gene_index];
    const GeneType& gt = registry.type_of(g.type_id);
    if (param_index >= g.values.size())
        throw IndexError("param_index");
    const ParamSpec& p = gt.params[param_index];

    double range = p.upper - p.lower;
    double v;
    if (range == 0.0) {
        v = p.lower;
    } else if (bernoulli(rng, config.small_step_fraction)) {
        double step = gaussian(rng, 0.0, config.small_step_sigma_fraction * range);
        if (p.kind == ParamKind::integer && std::abs(step) < 1.0)
            step = step < 0 ? -1.0 : 1.0;  // never a silent no-op on integers
        v = std::clamp(g.values[param_index] + step, p.lower, p.upper);
    } else {
        v = random_param_value(p, rng);
    }
    if (p.kind == ParamKind::integer) v = std::clamp(std::round(v), p.lower, p.upper);
    g.values[param_index] = v;
    return c;
}

/// Moves the gene at from_index to to_index, keeping the relative order of the
/// other genes.
inline Chromosome shift_gene(Chromosome c, std::size_t from_index, std::size_t to_index) {
    if (from_index >= c.genes.size() || to_index >= c.genes.size())
        throw IndexError("shift_gene");
    if (from_index == to_index) return c;
    Gene g = std::move(c.genes[from_index]);
    c.genes.erase(c.genes.begin() + static_cast<std::ptrdiff_t>(from_index));
    c.genes.insert(c.genes.begin() + static_cast<std::ptrdiff_t>(to_index), std::move(g));
    return c;
}

/// Moves the segment [seg_start, seg_start+seg_len) so that it starts at
/// to_index in the resulting chromosome. The destination must lie outside the
/// segment.
inline Chromosome shift_segment(Chromosome c, std::size_t seg_start, std::size_t seg_len,
                                std::size_t to_index) {
    std::size_t n = c.genes.size();
    if (seg_len == 0 || seg_start + seg_len > n)
        throw IndexError("shift_segment range");
    if (seg_len == n)
        throw InvalidMove("segment covers the whole chromosome");
    if (to_index > n - seg_len)
        throw InvalidMove("destination out of range");

    std::vector<Gene> seg(c.genes.begin() + static_cast<std::ptrdiff_t>(seg_start),
                          c.genes.begin() + static_cast<std::ptrdiff_t>(seg_start + seg_len));
    c.genes.erase(c.genes.begin() + static_cast<std::ptrdiff_t>(seg_start),
                  c.genes.begin() + static_cast<std::ptrdiff_t>(seg_start + seg_len));
    c.genes.insert(c.genes.begin() + static_cast<std::ptrdiff_t>(to_index),
                   std::make_move_iterator(seg.begin()), std::make_move_iterator(seg.end()));
    return c;
}

inline Chromosome invert_segment(Chromosome c, std::size_t seg_start, std::size_t seg_len) {
    if (seg_start + seg_len > c.genes.size())
        throw IndexError("invert_segment range");
    std::reverse(c.genes.begin() + static_cast<std::ptrdiff_t>(seg_start),
                 c.genes.begin() + static_cast<std::ptrdiff_t>(seg_start + seg_len));
    return c;
}

namespace detail {

inline std::string gene_key(const Gene& g) {
    std::string k = g.type_id;
    for (double v : g.values) k += "|" + std::to_string(v);
    return k;
}

inline bool same_gene_multiset(const Chromosome& a, const Chromosome& b) {
    std::vector<std::string> ka, kb;
    for (const auto& g : a.genes) ka.push_back(gene_key(g));
    for (const auto& g : b.genes) kb.push_back(gene_key(g));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

}  // namespace detail

/// Order crossover. Each child keeps its first parent's segment [cut1,cut2)
/// in place; the remaining ring positions, visited from cut2+1 onward with
/// wrap-around, are filled with the missing genes in the order they occur in
/// the other parent read from the same starting point.
inline std::pair<Chromosome, Chromosome> order_crossover(const Chromosome& parent_a,
                                                         const Chromosome& parent_b,
                                                         std::size_t cut1, std::size_t cut2) {
    std::size_t n = parent_a.genes.size();
    if (parent_b.genes.size() != n || !detail::same_gene_multiset(parent_a, parent_b))
        throw NotPermutation("parents are not permutations of the same gene set");
    if (!(cut1 < cut2 && cut2 <= n))
        throw IndexError("order_crossover cuts");

    auto make_child = [&](const Chromosome& keep, const Chromosome& fill) {
        Chromosome child = keep;
        std::vector<std::string> in_segment;
        for (std::size_t i = cut1; i < cut2; ++i)
            in_segment.push_back(detail::gene_key(keep.genes[i]));
        std::sort(in_segment.begin(), in_segment.end());

        auto consume = [&](const std::string& key) {
            auto it = std::lower_bound(in_segment.begin(), in_segment.end(), key);
            if (it != in_segment.end() && *it == key) {
                in_segment.erase(it);
                return true;
            }
            return false;
        };

        std::size_t write = cut2 % n;
        write = (write + 1) % n;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t read = (cut2 + 1 + k) % n;
            const Gene& g = fill.genes[read];
            if (consume(detail::gene_key(g)))
                continue;  // already present via the kept segment
            while (write >= cut1 && write < cut2) write = (write + 1) % n;
            child.genes[write] = g;
            write = (write + 1) % n;
        }
        return child;
    };

    return {make_child(parent_a, parent_b), make_child(parent_b, parent_a)};
}

/// n-point crossover for fixed-layout chromosomes: children alternate parental
/// slices. Gene values are copied, never blended.
inline std::pair<Chromosome, Chromosome> npoint_crossover(const Chromosome& parent_a,
                                                          const Chromosome& parent_b,
                                                          const std::vector<std::size_t>& points) {
    std::size_t n = parent_a.genes.size();
    if (parent_b.genes.size() != n)
        throw LayoutMismatch("parent lengths differ");
    for (std::size_t i = 0; i < n; ++i)
        if (parent_a.genes[i].type_id != parent_b.genes[i].type_id)
            throw LayoutMismatch("gene type at position " + std::to_string(i));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] == 0 || points[i] >= n)
            throw IndexError("crossover point not interior");
        if (i > 0 && points[i] <= points[i - 1])
            throw IndexError("crossover points not strictly increasing");
    }

    Chromosome ca = parent_a, cb = parent_b;
    bool swapped = false;
    std::size_t pi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pi < points.size() && i == points[pi]) {
            swapped = !swapped;
            ++pi;
        }
        if (swapped) {
            ca.genes[i] = parent_b.genes[i];
            cb.genes[i] = parent_a.genes[i];
        }
    }
    return {ca, cb};
}

enum class LengthMode { insert, erase };

/// Grows or shrinks a variable-length chromosome by one gene.
inline Chromosome length_mutation(const GenomeRegistry& registry, Chromosome c,
                                  LengthMode mode, Rng& rng) {
    if (c.length_policy.kind != LengthPolicy::Kind::variable)
        throw LengthPolicyError("length mutation requires a variable length policy");
    if (mode == LengthMode::insert) {
        if (c.genes.size() >= c.length_policy.max)
            throw LengthPolicyError("insert at max length");
        const auto& tid = registry.layout[uniform_index(rng, registry.layout.size())];
        std::size_t pos = static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<long long>(c.genes.size())));
        c.genes.insert(c.genes.begin() + static_cast<std::ptrdiff_t>(pos),
                       random_gene(registry, tid, rng));
    } else {
        if (c.genes.size() <= c.length_policy.min)
            throw LengthPolicyError("delete at min length");
        c.genes.erase(c.genes.begin() +
                      static_cast<std::ptrdiff_t>(uniform_index(rng, c.genes.size())));
    }
    return c;
}

using RepairHook = std::function<Chromosome(Chromosome, Rng&)>;

inline Chromosome apply_genotypic_repair(const GenomeRegistry& registry, Chromosome c,
                                         const RepairHook& hook, Rng& rng) {
    if (!hook)
        throw RepairFailed("no repair hook supplied");
    Chromosome repaired = hook(std::move(c), rng);
    if (!validate(registry, repaired).empty())
        throw RepairFailed("repair hook returned an invalid chromosome");
    return repaired;
}

}  // namespace evokit
