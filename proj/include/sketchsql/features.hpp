#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sketchsql/errors.hpp"
#include "sketchsql/rng.hpp"

namespace sketchsql {

// Fixed hashed feature space; the hash function name is recorded in model
// files so dumps stay interpretable.
constexpr uint32_t feature_hash_bits = 18;
constexpr uint32_t feature_hash_space = 1u << feature_hash_bits;
constexpr const char* feature_hash_name = "fnv1a64";

inline uint32_t feature_bucket(std::string_view id) {
    return uint32_t(fnv1a64(id) & (feature_hash_space - 1));
}

// Sparse vector over the hashed space. Feature identifiers are strings;
// only their buckets are stored.
struct feature_vector {
    std::vector<std::pair<uint32_t, float>> entries;

    void add(std::string_view id, float value = 1.0f) {
        if (!std::isfinite(value)) throw validation_error("non-finite feature value for " + std::string(id));
        entries.emplace_back(feature_bucket(id), value);
    }

    size_t size() const { return entries.size(); }
};

} // namespace sketchsql
