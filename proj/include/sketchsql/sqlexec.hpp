#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sketchsql/errors.hpp"
#include "sketchsql/text.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

// A cell or result value: finite double, or lowercased/trimmed text.
struct value {
    std::variant<double, std::string> v;

    bool is_number() const { return v.index() == 0; }
    double num() const { return std::get<double>(v); }
    const std::string& str() const { return std::get<std::string>(v); }

    static value number(double d) { return value{d}; }
    static value text(std::string s) { return value{std::move(s)}; }
};

struct query_result {
    enum class kind : uint8_t { scalar, bag };
    kind k = kind::bag;
    value scalar{0.0};
    std::vector<value> bag;

    static query_result make_scalar(value v) {
        query_result r;
        r.k = kind::scalar;
        r.scalar = std::move(v);
        return r;
    }
    static query_result make_bag(std::vector<value> vs) {
        query_result r;
        r.k = kind::bag;
        r.bag = std::move(vs);
        return r;
    }
};

// REAL columns try a numeric parse and fall back to normalized text;
// TEXT columns always normalize. Total on any input.
inline value coerce(const std::string& cell, column_type ct) {
    if (ct == column_type::real) {
        if (auto d = parse_number(cell)) return value::number(*d);
    }
    return value::text(to_lower(trim(cell)));
}

// Deterministic condition order: (col, op code, normalized value). Makes
// sketch equality insensitive to the order conditions were written in.
inline query_sketch canonicalize(const query_sketch& sketch) {
    query_sketch out = sketch;
    std::stable_sort(out.conds.begin(), out.conds.end(), [](const condition& a, const condition& b) {
        if (a.col != b.col) return a.col < b.col;
        if (a.op != b.op) return uint8_t(a.op) < uint8_t(b.op);
        return value_key(a.value) < value_key(b.value);
    });
    return out;
}

inline std::string render_sql(const query_sketch& sketch, const table_schema& schema) {
    if (sketch.sel >= schema.column_count())
        throw validation_error("render_sql: select column index " + std::to_string(sketch.sel) +
                               " out of range for table " + schema.table_id);
    std::string out = "SELECT ";
    if (sketch.agg == aggregator::none) {
        out += "\"" + schema.headers[sketch.sel] + "\"";
    } else {
        out += std::string(agg_name(sketch.agg)) + "(\"" + schema.headers[sketch.sel] + "\")";
    }
    out += " FROM " + schema.table_id;
    for (size_t i = 0; i < sketch.conds.size(); ++i) {
        const condition& c = sketch.conds[i];
        if (c.col >= schema.column_count())
            throw validation_error("render_sql: condition column index " + std::to_string(c.col) +
                                   " out of range for table " + schema.table_id);
        out += i == 0 ? " WHERE " : " AND ";
        out += "\"" + schema.headers[c.col] + "\" " + op_symbol(c.op) + " ";
        if (auto d = parse_number(c.value)) {
            out += format_number(*d);
        } else {
            out += "'" + c.value + "'";
        }
    }
    return out;
}

namespace detail {

inline bool values_equal_exact(const value& a, const value& b) {
    if (a.is_number() != b.is_number()) return false;
    if (a.is_number()) return a.num() == b.num();
    return a.str() == b.str();
}

// GT/LT: numeric when both sides are numbers, lexicographic on the
// normalized strings otherwise.
inline int compare_values(const value& a, const value& b) {
    if (a.is_number() && b.is_number()) {
        if (a.num() < b.num()) return -1;
        if (a.num() > b.num()) return 1;
        return 0;
    }
    std::string l = a.is_number() ? format_number(a.num()) : a.str();
    std::string r = b.is_number() ? format_number(b.num()) : b.str();
    return l.compare(r);
}

inline bool condition_holds(const condition& c, const std::string& cell, column_type ct) {
    value lhs = coerce(cell, ct);
    value rhs = coerce(c.value, ct);
    switch (c.op) {
        case cond_op::eq: return values_equal_exact(lhs, rhs);
        case cond_op::gt: return compare_values(lhs, rhs) > 0;
        case cond_op::lt: return compare_values(lhs, rhs) < 0;
    }
    return false;
}

} // namespace detail

inline query_result execute(const query_sketch& sketch, const table& t) {
    const table_schema& schema = t.schema;
    if (sketch.sel >= schema.column_count())
        throw validation_error("execute: select column out of range for table " + schema.table_id);
    for (const condition& c : sketch.conds)
        if (c.col >= schema.column_count())
            throw validation_error("execute: condition column out of range for table " + schema.table_id);

    std::vector<const std::vector<std::string>*> matched;
    for (const auto& row : t.rows) {
        bool ok = true;
        for (const condition& c : sketch.conds) {
            if (!detail::condition_holds(c, row[c.col], schema.col_types[c.col])) {
                ok = false;
                break;
            }
        }
        if (ok) matched.push_back(&row);
    }

    column_type sel_type = schema.col_types[sketch.sel];
    if (sketch.agg == aggregator::count)
        return query_result::make_scalar(value::number(double(matched.size())));

    std::vector<value> cells;
    cells.reserve(matched.size());
    for (const auto* row : matched) cells.push_back(coerce((*row)[sketch.sel], sel_type));

    if (sketch.agg == aggregator::none) return query_result::make_bag(std::move(cells));

    if (sketch.agg == aggregator::sum || sketch.agg == aggregator::avg) {
        double total = 0;
        size_t used = 0;
        for (const value& v : cells)
            if (v.is_number()) {
                total += v.num();
                ++used;
            }
        if (used == 0)
            throw empty_aggregate_error(std::string(agg_name(sketch.agg)) +
                                        " over zero numeric cells on table " + schema.table_id);
        return query_result::make_scalar(
            value::number(sketch.agg == aggregator::sum ? total : total / double(used)));
    }

    // MIN/MAX: never order numbers against strings; if the match set mixes
    // variants, strings are ignored.
    bool any_number = false;
    for (const value& v : cells) any_number = any_number || v.is_number();
    std::optional<value> best;
    for (const value& v : cells) {
        if (any_number && !v.is_number()) continue;
        if (!best) {
            best = v;
            continue;
        }
        int cmp = detail::compare_values(v, *best);
        if (sketch.agg == aggregator::max ? cmp > 0 : cmp < 0) best = v;
    }
    if (!best)
        throw empty_aggregate_error(std::string(agg_name(sketch.agg)) +
                                    " over zero usable cells on table " + schema.table_id);
    return query_result::make_scalar(*best);
}

constexpr double result_rel_tolerance = 1e-6;

inline bool numbers_close(double a, double b) {
    return std::abs(a - b) <= result_rel_tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

inline bool result_values_equal(const value& a, const value& b) {
    if (a.is_number() != b.is_number()) return false;
    if (a.is_number()) return numbers_close(a.num(), b.num());
    return a.str() == b.str();
}

} // namespace detail

inline bool results_equal(const query_result& a, const query_result& b) {
    if (a.k != b.k) return false;
    if (a.k == query_result::kind::scalar) return detail::result_values_equal(a.scalar, b.scalar);
    if (a.bag.size() != b.bag.size()) return false;

    // multiset comparison: strings must match exactly, numbers pair up in
    // sorted order within tolerance
    std::vector<std::string> sa, sb;
    std::vector<double> na, nb;
    for (const value& v : a.bag) v.is_number() ? na.push_back(v.num()) : sa.push_back(v.str());
    for (const value& v : b.bag) v.is_number() ? nb.push_back(v.num()) : sb.push_back(v.str());
    if (sa.size() != sb.size() || na.size() != nb.size()) return false;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    for (size_t i = 0; i < na.size(); ++i)
        if (!numbers_close(na[i], nb[i])) return false;
    return true;
}

} // namespace sketchsql
