#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sketchsql/text.hpp"

namespace sketchsql {

enum class column_type : uint8_t { text = 0, real = 1 };

enum class cond_op : uint8_t { eq = 0, gt = 1, lt = 2 };
constexpr int num_cond_ops = 3;

enum class aggregator : uint8_t { none = 0, max = 1, min = 2, count = 3, sum = 4, avg = 5 };
constexpr int num_aggregators = 6;

inline const char* op_symbol(cond_op op) {
    switch (op) {
        case cond_op::eq: return "=";
        case cond_op::gt: return ">";
        case cond_op::lt: return "<";
    }
    return "?";
}

inline const char* agg_name(aggregator a) {
    switch (a) {
        case aggregator::none: return "NONE";
        case aggregator::max: return "MAX";
        case aggregator::min: return "MIN";
        case aggregator::count: return "COUNT";
        case aggregator::sum: return "SUM";
        case aggregator::avg: return "AVG";
    }
    return "?";
}

struct table_schema {
    std::string table_id;
    std::vector<std::string> headers;
    std::vector<column_type> col_types;

    size_t column_count() const { return headers.size(); }
};

struct table {
    table_schema schema;
    std::vector<std::vector<std::string>> rows; // cells as stored, stringly
};

struct condition {
    size_t col = 0;
    cond_op op = cond_op::eq;
    std::string value;

    bool operator==(const condition& o) const = default;
};

// The dataset's whole SQL subset: one select column, at most one aggregator,
// up to four AND-joined conditions.
struct query_sketch {
    size_t sel = 0;
    aggregator agg = aggregator::none;
    std::vector<condition> conds;

    bool operator==(const query_sketch& o) const = default;
};

constexpr size_t max_conditions = 4;

enum class split_tag : uint8_t { train = 0, dev = 1, test = 2 };

inline const char* split_name(split_tag s) {
    switch (s) {
        case split_tag::train: return "train";
        case split_tag::dev: return "dev";
        case split_tag::test: return "test";
    }
    return "?";
}

struct example {
    std::string question_raw;
    std::vector<std::string> question_tokens; // post-normalization
    std::string table_id;
    query_sketch gold;
    split_tag split = split_tag::train;

    bool operator==(const example& o) const = default;
};

using table_map = std::map<std::string, table>;

struct dataset {
    std::vector<example> examples;
    table_map tables;

    const table& table_for(const example& ex) const { return tables.at(ex.table_id); }
};

} // namespace sketchsql
