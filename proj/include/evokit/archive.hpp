#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>

#include "evokit/fitness.hpp"
#include "evokit/genome.hpp"

namespace evokit {

/// Application-supplied similarity resolution: real parameters are quantized
/// to an epsilon grid; chromosomes with equal keys share one evaluation.
struct SimilarityScheme {
    double default_real_epsilon = 1e-3;
    double default_int_epsilon = 1.0;
    // overrides keyed by (type_id, param index)
    std::map<std::pair<std::string, std::size_t>, double> epsilon_overrides;
    bool sequence_sensitive = true;

    double epsilon_for(const GeneType& gt, std::size_t param_index) const {
        auto it = epsilon_overrides.find({gt.type_id, param_index});
        if (it != epsilon_overrides.end()) return it->second;
        return gt.params[param_index].kind == ParamKind::integer ? default_int_epsilon
                                                                 : default_real_epsilon;
    }
};

/// Round-half-up grid index, deterministic across platforms.
inline long long quantize(double value, double epsilon) {
    return static_cast<long long>(std::floor(value / epsilon + 0.5));
}

inline std::string canonical_key(const GenomeRegistry& registry, const Chromosome& c,
                                 const SimilarityScheme& scheme) {
    std::string key;
    key.reserve(c.genes.size() * 12);
    std::vector<std::string> parts;
    for (const auto& g : c.genes) {
        const GeneType& gt = registry.type_of(g.type_id);
        std::string p = g.type_id;
        for (std::size_t j = 0; j < g.values.size(); ++j)
            p += ":" + std::to_string(quantize(g.values[j], scheme.epsilon_for(gt, j)));
        parts.push_back(std::move(p));
    }
    if (!scheme.sequence_sensitive) std::sort(parts.begin(), parts.end());
    for (const auto& p : parts) key += p + ";";
    return key;
}

/// LRU-bounded cache of fitness reports keyed by canonical chromosome keys.
/// Capacity 0 disables caching entirely.
class SolutionArchive {
public:
    explicit SolutionArchive(SimilarityScheme scheme, std::size_t capacity = 1000000)
        : scheme_(std::move(scheme)), capacity_(capacity) {}

    using Evaluator = std::function<FitnessReport(const Chromosome&)>;

    FitnessReport lookup_or_evaluate(const GenomeRegistry& registry, const Chromosome& c,
                                     const Evaluator& evaluate) {
        if (capacity_ == 0) {
            ++miss_count_;
            return evaluate(c);
        }
        std::string key = canonical_key(registry, c, scheme_);
        std::unique_lock lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            ++hit_count_;
            lru_.splice(lru_.begin(), lru_, it->second.lru_pos);
            return it->second.report;
        }
        ++miss_count_;
        lock.unlock();
        FitnessReport report = evaluate(c);  // nothing stored on evaluator failure
        lock.lock();
        auto again = entries_.find(key);
        if (again != entries_.end()) return again->second.report;  // lost the race
        lru_.push_front(key);
        entries_[key] = {report, lru_.begin()};
        if (entries_.size() > capacity_) {
            entries_.erase(lru_.back());
            lru_.pop_back();
        }
        return report;
    }

    std::uint64_t hit_count() const { return hit_count_; }
    std::uint64_t miss_count() const { return miss_count_; }
    std::size_t size() const { return entries_.size(); }
    const SimilarityScheme& scheme() const { return scheme_; }

private:
    struct Entry {
        FitnessReport report;
        std::list<std::string>::iterator lru_pos;
    };

    SimilarityScheme scheme_;
    std::size_t capacity_;
    std::unordered_map<std::string, Entry> entries_;
    std::list<std::string> lru_;
    std::uint64_t hit_count_ = 0;
    std::uint64_t miss_count_ = 0;
    std::mutex mutex_;
};

}  // namespace evokit
