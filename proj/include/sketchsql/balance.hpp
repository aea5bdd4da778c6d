#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sketchsql/errors.hpp"
#include "sketchsql/rng.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

// phrase -> suggested operator, keyed by space-joined normalized tokens
using phrase_lexicon = std::map<std::string, cond_op>;

// The five core comparison phrases.
inline phrase_lexicon core_lexicon() {
    return {
        {"more than", cond_op::gt},  {"bigger than", cond_op::gt}, {"larger than", cond_op::gt},
        {"less than", cond_op::lt},  {"smaller than", cond_op::lt},
    };
}

// Extended with common equivalents; strict mode keeps only the core five.
inline phrase_lexicon default_lexicon(bool strict = false) {
    phrase_lexicon lex = core_lexicon();
    if (!strict) {
        lex.emplace("greater than", cond_op::gt);
        lex.emplace("fewer than", cond_op::lt);
        lex.emplace("higher than", cond_op::gt);
        lex.emplace("lower than", cond_op::lt);
        lex.emplace("at least", cond_op::gt);
        lex.emplace("at most", cond_op::lt);
        lex.emplace("over", cond_op::gt);
        lex.emplace("under", cond_op::lt);
    }
    return lex;
}

// Domain-specific: the gold SQL carries a > or < condition.
inline bool is_domain_specific(const example& ex) {
    for (const condition& c : ex.gold.conds)
        if (c.op == cond_op::gt || c.op == cond_op::lt) return true;
    return false;
}

// Gold-free variant for inference-time slicing: any lexicon phrase occurs as
// a contiguous token subsequence.
inline bool has_domain_phrase(const std::vector<std::string>& tokens, const phrase_lexicon& lexicon) {
    for (const auto& [phrase, op] : lexicon) {
        std::vector<std::string> ptoks = normalize_question(phrase);
        if (ptoks.empty() || ptoks.size() > tokens.size()) continue;
        for (size_t i = 0; i + ptoks.size() <= tokens.size(); ++i) {
            bool hit = true;
            for (size_t j = 0; j < ptoks.size(); ++j)
                if (tokens[i + j] != ptoks[j]) {
                    hit = false;
                    break;
                }
            if (hit) return true;
        }
    }
    return false;
}

struct sample_partition {
    std::vector<example> majority; // normal queries
    std::vector<example> minority; // domain-specific queries
    // positions in the input dataset, parallel to the two lists
    std::vector<size_t> majority_index;
    std::vector<size_t> minority_index;
};

inline sample_partition partition(const std::vector<example>& examples) {
    sample_partition p;
    for (size_t i = 0; i < examples.size(); ++i) {
        if (is_domain_specific(examples[i])) {
            p.minority.push_back(examples[i]);
            p.minority_index.push_back(i);
        } else {
            p.majority.push_back(examples[i]);
            p.majority_index.push_back(i);
        }
    }
    return p;
}

struct oversample_config {
    uint64_t factor = 1; // target minority size = factor * n_majority
    uint64_t seed = 0;
};

enum class provenance_kind : uint8_t { original = 0, duplicate = 1 };

struct provenance_mark {
    provenance_kind kind = provenance_kind::original;
    size_t source_index = 0; // input-dataset position of the duplicated original
};

struct balanced_dataset {
    std::vector<example> examples;
    std::vector<provenance_mark> provenance; // parallel to examples
    size_t added_duplicates = 0;

    size_t original_count() const {
        size_t n = 0;
        for (const auto& p : provenance)
            if (p.kind == provenance_kind::original) ++n;
        return n;
    }
};

// Oversampling with replacement: grow the minority to factor * n_majority by
// duplicating uniformly drawn minority records, then shuffle. Never drops an
// original. Same (partition, config) gives bit-identical output.
inline balanced_dataset oversample(const sample_partition& part, const oversample_config& config) {
    if (config.factor < 1) throw config_error("oversample factor must be >= 1");
    size_t n_majority = part.majority.size();
    size_t n_minority = part.minority.size();
    size_t target = size_t(config.factor) * n_majority;
    size_t m = target > n_minority ? target - n_minority : 0;
    if (m > 0 && n_minority == 0)
        throw empty_minority_error("no minority examples to duplicate, need " + std::to_string(m));

    balanced_dataset out;
    out.examples.reserve(n_majority + n_minority + m);
    out.provenance.reserve(n_majority + n_minority + m);
    for (size_t i = 0; i < n_majority; ++i) {
        out.examples.push_back(part.majority[i]);
        out.provenance.push_back({provenance_kind::original, part.majority_index[i]});
    }
    for (size_t i = 0; i < n_minority; ++i) {
        out.examples.push_back(part.minority[i]);
        out.provenance.push_back({provenance_kind::original, part.minority_index[i]});
    }

    rng gen(config.seed);
    for (size_t i = 0; i < m; ++i) {
        size_t pick = gen.index(n_minority);
        out.examples.push_back(part.minority[pick]);
        out.provenance.push_back({provenance_kind::duplicate, part.minority_index[pick]});
    }
    out.added_duplicates = m;

    // deterministic shuffle keyed by the same seed, examples and marks move together
    std::vector<size_t> order(out.examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    gen.shuffle(order);
    std::vector<example> shuffled;
    std::vector<provenance_mark> marks;
    shuffled.reserve(order.size());
    marks.reserve(order.size());
    for (size_t i : order) {
        shuffled.push_back(std::move(out.examples[i]));
        marks.push_back(out.provenance[i]);
    }
    out.examples = std::move(shuffled);
    out.provenance = std::move(marks);
    return out;
}

} // namespace sketchsql
