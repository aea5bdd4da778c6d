#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sketchsql/balance.hpp"
#include "sketchsql/errors.hpp"
#include "sketchsql/sqlexec.hpp"
#include "sketchsql/text.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

enum class component : uint8_t {
    sel_col = 0,
    agg = 1,
    where_cols = 2,
    where_ops = 3,
    where_values = 4,
    where_cond_count = 5,
};
constexpr int num_components = 6;

inline const char* component_name(component c) {
    switch (c) {
        case component::sel_col: return "SEL_COL";
        case component::agg: return "AGG";
        case component::where_cols: return "WHERE_COLS";
        case component::where_ops: return "WHERE_OPS";
        case component::where_values: return "WHERE_VALUES";
        case component::where_cond_count: return "WHERE_COND_COUNT";
    }
    return "?";
}

enum class error_category : uint8_t {
    missing_where = 0,
    component_interdependency = 1,
    integration = 2,
    wrong_column = 3,
    wrong_value = 4,
    wrong_op = 5,
    other = 6,
};
constexpr int num_error_categories = 7;

inline const char* error_category_name(error_category e) {
    switch (e) {
        case error_category::missing_where: return "MISSING_WHERE";
        case error_category::component_interdependency: return "COMPONENT_INTERDEPENDENCY";
        case error_category::integration: return "INTEGRATION";
        case error_category::wrong_column: return "WRONG_COLUMN";
        case error_category::wrong_value: return "WRONG_VALUE";
        case error_category::wrong_op: return "WRONG_OP";
        case error_category::other: return "OTHER";
    }
    return "?";
}

// Field-for-field equality after canonicalization; values compare through
// value_key so "5" and "5.0" agree. The order-sensitive mode keeps conditions
// in their written order for comparison with order-sensitive literature.
inline bool logical_form_equal(const query_sketch& a, const query_sketch& b,
                               bool order_sensitive = false) {
    query_sketch ca = order_sensitive ? a : canonicalize(a);
    query_sketch cb = order_sensitive ? b : canonicalize(b);
    if (ca.sel != cb.sel || ca.agg != cb.agg || ca.conds.size() != cb.conds.size()) return false;
    for (size_t i = 0; i < ca.conds.size(); ++i) {
        if (ca.conds[i].col != cb.conds[i].col || ca.conds[i].op != cb.conds[i].op) return false;
        if (value_key(ca.conds[i].value) != value_key(cb.conds[i].value)) return false;
    }
    return true;
}

// Both raising on an empty aggregate counts as agreement; an invalid
// predicted sketch counts as a miss rather than an evaluation failure.
inline bool execution_match(const query_sketch& pred, const query_sketch& gold, const table& t) {
    std::optional<query_result> gold_res;
    bool gold_empty = false;
    try {
        gold_res = execute(gold, t);
    } catch (const empty_aggregate_error&) {
        gold_empty = true;
    }
    std::optional<query_result> pred_res;
    bool pred_empty = false;
    try {
        pred_res = execute(pred, t);
    } catch (const empty_aggregate_error&) {
        pred_empty = true;
    } catch (const validation_error&) {
        return false;
    }
    if (gold_empty || pred_empty) return gold_empty && pred_empty;
    return results_equal(*pred_res, *gold_res);
}

namespace detail {

inline std::multiset<size_t> cond_cols(const query_sketch& s) {
    std::multiset<size_t> out;
    for (const auto& c : s.conds) out.insert(c.col);
    return out;
}

inline std::multiset<int> cond_ops(const query_sketch& s) {
    std::multiset<int> out;
    for (const auto& c : s.conds) out.insert(int(c.op));
    return out;
}

inline std::multiset<std::string> cond_values(const query_sketch& s) {
    std::multiset<std::string> out;
    for (const auto& c : s.conds) out.insert(value_key(c.value));
    return out;
}

inline std::multiset<std::string> cond_col_values(const query_sketch& s) {
    std::multiset<std::string> out;
    for (const auto& c : s.conds) out.insert(std::to_string(c.col) + "|" + value_key(c.value));
    return out;
}

inline std::multiset<std::string> cond_triples(const query_sketch& s) {
    std::multiset<std::string> out;
    for (const auto& c : s.conds)
        out.insert(std::to_string(c.col) + "|" + std::to_string(int(c.op)) + "|" + value_key(c.value));
    return out;
}

} // namespace detail

inline std::array<bool, num_components> component_match(const query_sketch& pred,
                                                        const query_sketch& gold) {
    std::array<bool, num_components> out{};
    out[int(component::sel_col)] = pred.sel == gold.sel;
    out[int(component::agg)] = pred.agg == gold.agg;
    out[int(component::where_cols)] = detail::cond_cols(pred) == detail::cond_cols(gold);
    out[int(component::where_ops)] = detail::cond_ops(pred) == detail::cond_ops(gold);
    out[int(component::where_values)] = detail::cond_values(pred) == detail::cond_values(gold);
    out[int(component::where_cond_count)] = pred.conds.size() == gold.conds.size();
    return out;
}

// First matching rule wins; callers only pass sketches that already failed
// logical form equality.
inline error_category categorize_error(const query_sketch& pred, const query_sketch& gold) {
    if (!gold.conds.empty() && pred.conds.empty()) return error_category::missing_where;
    if (pred.sel == gold.sel && pred.agg != gold.agg)
        return error_category::component_interdependency;
    if (pred.sel != gold.sel) {
        auto gold_cols = detail::cond_cols(gold);
        auto pred_cols = detail::cond_cols(pred);
        if (gold_cols.count(pred.sel) || pred_cols.count(gold.sel))
            return error_category::integration;
    }
    if (detail::cond_cols(pred) != detail::cond_cols(gold)) return error_category::wrong_column;
    if (detail::cond_col_values(pred) != detail::cond_col_values(gold))
        return error_category::wrong_value;
    if (detail::cond_triples(pred) != detail::cond_triples(gold)) return error_category::wrong_op;
    return error_category::other;
}

struct slice_metrics {
    size_t count = 0;
    size_t lf_correct = 0;
    size_t exec_correct = 0;
    std::array<size_t, num_components> component_correct{};
    std::array<size_t, num_error_categories> errors{};

    double lf_accuracy() const { return count ? double(lf_correct) / double(count) : 0.0; }
    double exec_accuracy() const { return count ? double(exec_correct) / double(count) : 0.0; }
    double component_accuracy(component c) const {
        return count ? double(component_correct[int(c)]) / double(count) : 0.0;
    }
};

struct eval_options {
    bool order_sensitive_lf = false;
};

// Slice keys: ALL, DOMAIN_SPECIFIC (gold uses a comparison operator), NORMAL.
struct metric_report {
    slice_metrics all;
    slice_metrics domain_specific;
    slice_metrics normal;
    eval_options options;
    // per example: -1 when logical form is correct, else the error category
    std::vector<int> example_errors;
};

inline metric_report evaluate(const std::vector<example>& gold,
                              const std::vector<query_sketch>& predictions,
                              const table_map& tables, const eval_options& options = {}) {
    if (gold.size() != predictions.size())
        throw validation_error("got " + std::to_string(predictions.size()) + " predictions for " +
                               std::to_string(gold.size()) + " examples");
    metric_report report;
    report.options = options;
    report.example_errors.reserve(gold.size());
    for (size_t i = 0; i < gold.size(); ++i) {
        const auto& ex = gold[i];
        auto it = tables.find(ex.table_id);
        if (it == tables.end())
            throw validation_error("example " + std::to_string(i) + " references unknown table '" +
                                   ex.table_id + "'");
        const auto& pred = predictions[i];
        bool lf = logical_form_equal(pred, ex.gold, options.order_sensitive_lf);
        bool ex_ok = execution_match(pred, ex.gold, it->second);
        auto comps = component_match(pred, ex.gold);
        int err = lf ? -1 : int(categorize_error(pred, ex.gold));
        report.example_errors.push_back(err);

        auto add = [&](slice_metrics& m) {
            ++m.count;
            m.lf_correct += lf ? 1 : 0;
            m.exec_correct += ex_ok ? 1 : 0;
            for (int c = 0; c < num_components; ++c) m.component_correct[c] += comps[c] ? 1 : 0;
            if (err >= 0) ++m.errors[err];
        };
        add(report.all);
        add(is_domain_specific(ex) ? report.domain_specific : report.normal);
    }
    return report;
}

} // namespace sketchsql
