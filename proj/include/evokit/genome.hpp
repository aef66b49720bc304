#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "evokit/errors.hpp"
#include "evokit/rng.hpp"

namespace evokit {

enum class ParamKind { integer, real };

/// Bounded decision-variable slot inside a gene type. Bounds are closed.
struct ParamSpec {
    ParamKind kind = ParamKind::real;
    double lower = 0.0;
    double upper = 0.0;

    void check() const {
        if (!(lower <= upper))
            throw ConfigError("ParamSpec lower > upper");
        if (kind == ParamKind::integer &&
            (std::floor(lower) != lower || std::floor(upper) != upper))
            throw ConfigError("integer ParamSpec bounds must be whole numbers");
    }
};

/// Typed gene template: a configurable list of bounded int/real parameters.
struct GeneType {
    std::string type_id;
    std::string name;
    std::vector<ParamSpec> params;  // may be empty (pure sequence gene)
};

struct Gene {
    std::string type_id;
    std::vector<double> values;
};

struct LengthPolicy {
    enum class Kind { fixed, variable };
    Kind kind = Kind::fixed;
    std::size_t n = 0;          // fixed
    std::size_t min = 0;        // variable
    std::size_t max = 0;

    static LengthPolicy fixed(std::size_t n) { return {Kind::fixed, n, 0, 0}; }
    static LengthPolicy variable(std::size_t min, std::size_t max) {
        if (min > max) throw ConfigError("variable length policy min > max");
        return {Kind::variable, 0, min, max};
    }
    bool satisfied_by(std::size_t len) const {
        return kind == Kind::fixed ? len == n : (min <= len && len <= max);
    }
};

/// Ordered gene sequence. Order is meaning-relevant; positional access is O(1).
struct Chromosome {
    std::vector<Gene> genes;
    LengthPolicy length_policy;

    std::size_t size() const { return genes.size(); }
};

enum class StructureKind {
    fixed_layout,   // a type_id prescribed per position, fixed length
    free_sequence,  // any sequence over an allowed type set
    permutation     // exactly one gene per listed type, order evolvable
};

struct Violation {
    enum class Kind {
        UnknownType,
        BoundViolation,
        NotWholeNumber,
        NonFinite,
        ArityMismatch,
        LengthViolation,
        LayoutViolation,
        PermutationViolation
    };
    Kind kind;
    std::string detail;
};

class GenomeRegistry {
public:
    StructureKind structure = StructureKind::free_sequence;
    // fixed_layout: type per position; permutation: the exact gene set;
    // free_sequence: allowed type ids.
    std::vector<std::string> layout;

    void register_gene_type(GeneType gt) {
        if (index_.count(gt.type_id))
            throw DuplicateGeneType(gt.type_id);
        for (const auto& p : gt.params) p.check();
        index_[gt.type_id] = types_.size();
        types_.push_back(std::move(gt));
    }

    bool has(const std::string& type_id) const { return index_.count(type_id) > 0; }

    const GeneType& type_of(const std::string& type_id) const {
        auto it = index_.find(type_id);
        if (it == index_.end())
            throw UnknownTypeError(type_id);
        return types_[it->second];
    }

    const std::vector<GeneType>& gene_types() const { return types_; }
    bool empty() const { return types_.empty(); }

private:
    std::vector<GeneType> types_;
    std::map<std::string, std::size_t> index_;
};

inline double random_param_value(const ParamSpec& p, Rng& rng) {
    if (p.kind == ParamKind::integer)
        return static_cast<double>(
            uniform_int(rng, static_cast<long long>(p.lower), static_cast<long long>(p.upper)));
    return uniform_real(rng, p.lower, std::nextafter(p.upper, p.upper + 1.0));
}

inline Gene random_gene(const GenomeRegistry& registry, const std::string& type_id, Rng& rng) {
    const GeneType& gt = registry.type_of(type_id);
    Gene g{type_id, {}};
    g.values.reserve(gt.params.size());
    for (const auto& p : gt.params) g.values.push_back(random_param_value(p, rng));
    return g;
}

inline Chromosome random_chromosome(const GenomeRegistry& registry,
                                    const LengthPolicy& policy, Rng& rng) {
    if (registry.empty())
        throw EmptyRegistry("random_chromosome on empty registry");

    Chromosome c;
    c.length_policy = policy;

    switch (registry.structure) {
        case StructureKind::fixed_layout: {
            for (const auto& tid : registry.layout)
                c.genes.push_back(random_gene(registry, tid, rng));
            break;
        }
        case StructureKind::permutation: {
            std::vector<std::string> order = registry.layout;
            std::shuffle(order.begin(), order.end(), rng);
            for (const auto& tid : order)
                c.genes.push_back(random_gene(registry, tid, rng));
            break;
        }
        case StructureKind::free_sequence: {
            if (registry.layout.empty())
                throw EmptyRegistry("free_sequence allowed set is empty");
            std::size_t len = policy.kind == LengthPolicy::Kind::fixed
                                  ? policy.n
                                  : static_cast<std::size_t>(
                                        uniform_int(rng, static_cast<long long>(policy.min),
                                                    static_cast<long long>(policy.max)));
            for (std::size_t i = 0; i < len; ++i) {
                const auto& tid = registry.layout[uniform_index(rng, registry.layout.size())];
                c.genes.push_back(random_gene(registry, tid, rng));
            }
            break;
        }
    }
    return c;
}

inline std::vector<Violation> validate(const GenomeRegistry& registry, const Chromosome& c) {
    std::vector<Violation> out;

    for (std::size_t i = 0; i < c.genes.size(); ++i) {
        const Gene& g = c.genes[i];
        if (!registry.has(g.type_id)) {
            out.push_back({Violation::Kind::UnknownType,
                           "gene " + std::to_string(i) + ": " + g.type_id});
            continue;
        }
        const GeneType& gt = registry.type_of(g.type_id);
        if (g.values.size() != gt.params.size()) {
            out.push_back({Violation::Kind::ArityMismatch,
                           "gene " + std::to_string(i)});
            continue;
        }
        for (std::size_t j = 0; j < g.values.size(); ++j) {
            double v = g.values[j];
            const ParamSpec& p = gt.params[j];
            if (!std::isfinite(v)) {
                out.push_back({Violation::Kind::NonFinite,
                               "gene " + std::to_string(i) + " param " + std::to_string(j)});
                continue;
            }
            if (v < p.lower || v > p.upper)
                out.push_back({Violation::Kind::BoundViolation,
                               "gene " + std::to_string(i) + " param " + std::to_string(j)});
            if (p.kind == ParamKind::integer && std::floor(v) != v)
                out.push_back({Violation::Kind::NotWholeNumber,
                               "gene " + std::to_string(i) + " param " + std::to_string(j)});
        }
    }

    if (!c.length_policy.satisfied_by(c.genes.size()))
        out.push_back({Violation::Kind::LengthViolation,
                       "length " + std::to_string(c.genes.size())});

    switch (registry.structure) {
        case StructureKind::fixed_layout: {
            if (c.genes.size() == registry.layout.size()) {
                for (std::size_t i = 0; i < c.genes.size(); ++i)
                    if (c.genes[i].type_id != registry.layout[i])
                        out.push_back({Violation::Kind::LayoutViolation,
                                       "position " + std::to_string(i)});
            } else {
                out.push_back({Violation::Kind::LayoutViolation, "length mismatch"});
            }
            break;
        }
        case StructureKind::permutation: {
            std::vector<std::string> want = registry.layout;
            std::vector<std::string> got;
            got.reserve(c.genes.size());
            for (const auto& g : c.genes) got.push_back(g.type_id);
            std::sort(want.begin(), want.end());
            std::sort(got.begin(), got.end());
            if (want != got)
                out.push_back({Violation::Kind::PermutationViolation, "gene set mismatch"});
            break;
        }
        case StructureKind::free_sequence: {
            for (const auto& g : c.genes)
                if (registry.has(g.type_id) &&
                    std::find(registry.layout.begin(), registry.layout.end(), g.type_id) ==
                        registry.layout.end())
                    out.push_back({Violation::Kind::LayoutViolation,
                                   "type not allowed: " + g.type_id});
            break;
        }
    }
    return out;
}

// --- JSON schema: {"structure": ..., "layout": [...], "gene_types":
//     [{"type_id","name","params":[{"kind","lower","upper"}]}]} ---

inline nlohmann::json to_json(const GenomeRegistry& r) {
    nlohmann::json j;
    j["structure"] = r.structure == StructureKind::fixed_layout   ? "fixed_layout"
                     : r.structure == StructureKind::permutation  ? "permutation"
                                                                  : "free_sequence";
    j["layout"] = r.layout;
    j["gene_types"] = nlohmann::json::array();
    for (const auto& gt : r.gene_types()) {
        nlohmann::json jt;
        jt["type_id"] = gt.type_id;
        jt["name"] = gt.name;
        jt["params"] = nlohmann::json::array();
        for (const auto& p : gt.params)
            jt["params"].push_back({{"kind", p.kind == ParamKind::integer ? "integer" : "real"},
                                    {"lower", p.lower},
                                    {"upper", p.upper}});
        j["gene_types"].push_back(jt);
    }
    return j;
}

inline GenomeRegistry registry_from_json(const nlohmann::json& j) {
    GenomeRegistry r;
    std::string s = j.at("structure").get<std::string>();
    if (s == "fixed_layout") r.structure = StructureKind::fixed_layout;
    else if (s == "permutation") r.structure = StructureKind::permutation;
    else if (s == "free_sequence") r.structure = StructureKind::free_sequence;
    else throw ConfigError("unknown registry structure: " + s);
    r.layout = j.at("layout").get<std::vector<std::string>>();
    for (const auto& jt : j.at("gene_types")) {
        GeneType gt;
        gt.type_id = jt.at("type_id").get<std::string>();
        gt.name = jt.value("name", gt.type_id);
        for (const auto& jp : jt.at("params")) {
            ParamSpec p;
            p.kind = jp.at("kind").get<std::string>() == "integer" ? ParamKind::integer
                                                                   : ParamKind::real;
            p.lower = jp.at("lower").get<double>();
            p.upper = jp.at("upper").get<double>();
            gt.params.push_back(p);
        }
        r.register_gene_type(std::move(gt));
    }
    return r;
}

}  // namespace evokit
