#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchsql/errors.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

// WikiSQL integer encodings, as shipped in the public distribution.
// agg: 0=NONE 1=MAX 2=MIN 3=COUNT 4=SUM 5=AVG; op: 0=EQ 1=GT 2=LT.

namespace detail {

// Numeric condition values keep exactly the digits the file had:
// 5 -> "5", 5.0 -> "5.0".
inline std::string json_value_to_string(const nlohmann::json& j) {
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

inline std::string loc(const std::string& path, size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

} // namespace detail

inline table parse_table_record(const nlohmann::json& j) {
    table t;
    t.schema.table_id = j.at("id").get<std::string>();
    if (t.schema.table_id.empty()) throw validation_error("table with empty id");
    for (const auto& h : j.at("header")) t.schema.headers.push_back(h.get<std::string>());
    for (const auto& ty : j.at("types")) {
        std::string s = ty.get<std::string>();
        if (s == "text") t.schema.col_types.push_back(column_type::text);
        else if (s == "real") t.schema.col_types.push_back(column_type::real);
        else throw validation_error("table " + t.schema.table_id + ": unknown column type '" + s + "'");
    }
    if (t.schema.headers.empty())
        throw validation_error("table " + t.schema.table_id + ": no columns");
    if (t.schema.headers.size() != t.schema.col_types.size())
        throw validation_error("table " + t.schema.table_id + ": header/types length mismatch");
    if (j.contains("rows")) {
        for (const auto& row : j.at("rows")) {
            std::vector<std::string> cells;
            for (const auto& cell : row) cells.push_back(detail::json_value_to_string(cell));
            if (cells.size() != t.schema.headers.size())
                throw validation_error("table " + t.schema.table_id + ": row with " +
                                       std::to_string(cells.size()) + " cells, expected " +
                                       std::to_string(t.schema.headers.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

inline query_sketch parse_sql_json(const nlohmann::json& sql) {
    query_sketch s;
    s.sel = sql.at("sel").get<size_t>();
    int agg = sql.at("agg").get<int>();
    if (agg < 0 || agg >= num_aggregators)
        throw validation_error("aggregator index " + std::to_string(agg) + " out of range");
    s.agg = aggregator(agg);
    if (sql.contains("conds")) {
        for (const auto& c : sql.at("conds")) {
            condition cond;
            cond.col = c.at(0).get<size_t>();
            int op = c.at(1).get<int>();
            if (op < 0 || op >= num_cond_ops)
                throw validation_error("operator index " + std::to_string(op) + " out of range");
            cond.op = cond_op(op);
            cond.value = detail::json_value_to_string(c.at(2));
            s.conds.push_back(std::move(cond));
        }
    }
    return s;
}

inline nlohmann::json sql_to_json(const query_sketch& s) {
    nlohmann::json conds = nlohmann::json::array();
    for (const condition& c : s.conds) conds.push_back({c.col, int(c.op), c.value});
    return nlohmann::json{{"sel", s.sel}, {"agg", int(s.agg)}, {"conds", conds}};
}

inline example parse_example_record(const nlohmann::json& j, split_tag split) {
    example ex;
    ex.question_raw = j.at("question").get<std::string>();
    ex.table_id = j.at("table_id").get<std::string>();
    ex.question_tokens = normalize_question(ex.question_raw);
    ex.split = split;
    ex.gold = parse_sql_json(j.at("sql"));
    return ex;
}

inline nlohmann::json example_to_record(const example& ex) {
    return nlohmann::json{
        {"question", ex.question_raw},
        {"table_id", ex.table_id},
        {"sql", sql_to_json(ex.gold)},
    };
}

inline nlohmann::json table_to_record(const table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) rows.push_back(row);
    return nlohmann::json{
        {"id", t.schema.table_id},
        {"header", t.schema.headers},
        {"types", [&] {
             std::vector<std::string> ts;
             for (column_type ct : t.schema.col_types)
                 ts.push_back(ct == column_type::text ? "text" : "real");
             return ts;
         }()},
        {"rows", rows},
    };
}

// Checks the structural invariants every loaded example must satisfy.
inline void validate_example(const example& ex, const table_map& tables, const std::string& where) {
    auto it = tables.find(ex.table_id);
    if (it == tables.end())
        throw validation_error(where + ": example references unknown table '" + ex.table_id +
                               "' (question: " + ex.question_raw + ")");
    size_t cols = it->second.schema.column_count();
    if (ex.gold.sel >= cols)
        throw validation_error(where + ": select column " + std::to_string(ex.gold.sel) +
                               " out of range (table " + ex.table_id + " has " +
                               std::to_string(cols) + " columns)");
    if (ex.gold.conds.size() > max_conditions)
        throw validation_error(where + ": " + std::to_string(ex.gold.conds.size()) +
                               " conditions, the dataset subset allows at most 4");
    for (const condition& c : ex.gold.conds)
        if (c.col >= cols)
            throw validation_error(where + ": condition column " + std::to_string(c.col) +
                                   " out of range (table " + ex.table_id + ")");
}

inline table_map load_tables(const std::string& tables_path) {
    std::ifstream in(tables_path);
    if (!in) throw load_error("cannot open tables file: " + tables_path);
    table_map tables;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw load_error(detail::loc(tables_path, line_no) + ": malformed record: " + e.what());
        }
        table t;
        try {
            t = parse_table_record(j);
        } catch (const std::exception& e) {
            throw load_error(detail::loc(tables_path, line_no) + ": " + e.what());
        }
        if (!tables.emplace(t.schema.table_id, std::move(t)).second)
            throw load_error(detail::loc(tables_path, line_no) + ": duplicate table id");
    }
    return tables;
}

inline std::vector<example> load_examples(const std::string& examples_path, const table_map& tables,
                                          split_tag split) {
    std::ifstream in(examples_path);
    if (!in) throw load_error("cannot open examples file: " + examples_path);
    std::vector<example> examples;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw load_error(detail::loc(examples_path, line_no) + ": malformed record: " + e.what());
        }
        example ex;
        try {
            ex = parse_example_record(j, split);
        } catch (const std::exception& e) {
            throw load_error(detail::loc(examples_path, line_no) + ": " + e.what());
        }
        validate_example(ex, tables, detail::loc(examples_path, line_no));
        examples.push_back(std::move(ex));
    }
    return examples;
}

inline dataset load_dataset(const std::string& examples_path, const std::string& tables_path,
                            split_tag split) {
    dataset ds;
    ds.tables = load_tables(tables_path);
    ds.examples = load_examples(examples_path, ds.tables, split);
    return ds;
}

inline void write_examples(const std::vector<example>& examples, std::ostream& out) {
    for (const example& ex : examples) out << example_to_record(ex).dump() << "\n";
}

inline void write_tables(const table_map& tables, std::ostream& out) {
    for (const auto& [id, t] : tables) out << table_to_record(t).dump() << "\n";
}

} // namespace sketchsql
