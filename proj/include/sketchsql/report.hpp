#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sketchsql/errors.hpp"
#include "sketchsql/eval.hpp"
#include "sketchsql/experiment.hpp"
#include "sketchsql/stats.hpp"

namespace sketchsql {

constexpr const char* toolkit_name = "sketchsql";
constexpr const char* toolkit_version = "0.1.0";

// Existing files are never silently replaced.
inline void write_text_file(const std::string& path, const std::string& content, bool overwrite) {
    if (!overwrite && std::filesystem::exists(path))
        throw report_error(path + " already exists, pass --force to replace it");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw report_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw report_error("failed writing " + path);
}

namespace detail {

inline nlohmann::json hist_pairs(const std::map<size_t, size_t>& hist) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, v] : hist) out.push_back({k, v});
    return out;
}

// shortest round-trip double text, same digits the JSON writer emits
inline std::string csv_num(double v) { return nlohmann::json(v).dump(); }

} // namespace detail

inline nlohmann::json stats_to_json(const dataset_stats& s) {
    nlohmann::json agg = nlohmann::json::object();
    for (int k = 0; k < num_aggregators; ++k) agg[agg_name(aggregator(k))] = s.agg_hist[k];
    nlohmann::json ops = nlohmann::json::object();
    const char* op_names[] = {"EQ", "GT", "LT"};
    for (int k = 0; k < num_cond_ops; ++k) ops[op_names[k]] = s.op_hist[k];
    nlohmann::json conds = nlohmann::json::object();
    for (size_t k = 0; k < s.cond_count_hist.size(); ++k)
        conds[std::to_string(k)] = s.cond_count_hist[k];
    return nlohmann::json{
        {"tool", toolkit_name},
        {"version", toolkit_version},
        {"example_count", s.example_count},
        {"split_counts", s.split_counts},
        {"question_token_length_hist", detail::hist_pairs(s.question_len_hist)},
        {"sql_token_length_hist", detail::hist_pairs(s.sql_len_hist)},
        {"aggregator_hist", agg},
        {"operator_hist", ops},
        {"condition_count_hist", conds},
        {"domain_specific_count", s.domain_specific_count},
        {"domain_specific_fraction", s.domain_specific_fraction},
    };
}

inline nlohmann::json slice_to_json(const slice_metrics& m) {
    nlohmann::json comps = nlohmann::json::object();
    for (int c = 0; c < num_components; ++c)
        comps[component_name(component(c))] = m.component_accuracy(component(c));
    size_t wrong = m.count - m.lf_correct;
    nlohmann::json errs = nlohmann::json::object();
    nlohmann::json shares = nlohmann::json::object();
    for (int e = 0; e < num_error_categories; ++e) {
        const char* name = error_category_name(error_category(e));
        errs[name] = m.errors[e];
        shares[name] = wrong ? double(m.errors[e]) / double(wrong) : 0.0;
    }
    return nlohmann::json{
        {"count", m.count},
        {"logical_form_correct", m.lf_correct},
        {"logical_form_accuracy", m.lf_accuracy()},
        {"execution_correct", m.exec_correct},
        {"execution_accuracy", m.exec_accuracy()},
        {"component_accuracy", comps},
        {"error_counts", errs},
        {"error_shares", shares},
    };
}

inline nlohmann::json metrics_to_json(const metric_report& r) {
    nlohmann::json order = nlohmann::json::array();
    for (int e = 0; e < num_error_categories; ++e)
        order.push_back(error_category_name(error_category(e)));
    return nlohmann::json{
        {"order_sensitive_logical_form", r.options.order_sensitive_lf},
        {"error_category_order", order},
        {"slices",
         {{"ALL", slice_to_json(r.all)},
          {"DOMAIN_SPECIFIC", slice_to_json(r.domain_specific)},
          {"NORMAL", slice_to_json(r.normal)}}},
    };
}

// Figure-style data series per slice, one row per (slice, metric axis) table.
inline std::string metrics_to_csv(const metric_report& r) {
    std::string out = "slice,count,logical_form_accuracy,execution_accuracy";
    for (int c = 0; c < num_components; ++c)
        out += std::string(",") + component_name(component(c));
    out += "\n";
    auto row = [&](const char* name, const slice_metrics& m) {
        out += name;
        out += "," + std::to_string(m.count);
        out += "," + detail::csv_num(m.lf_accuracy());
        out += "," + detail::csv_num(m.exec_accuracy());
        for (int c = 0; c < num_components; ++c)
            out += "," + detail::csv_num(m.component_accuracy(component(c)));
        out += "\n";
    };
    row("ALL", r.all);
    row("DOMAIN_SPECIFIC", r.domain_specific);
    row("NORMAL", r.normal);
    return out;
}

inline nlohmann::json train_config_to_json(const train_config& c) {
    return nlohmann::json{
        {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"epochs", c.epochs},
        {"seed", c.seed},                   {"beta1", c.beta1},           {"beta2", c.beta2},
        {"epsilon", c.epsilon},
    };
}

inline nlohmann::json lexicon_to_json(const phrase_lexicon& lex) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [phrase, op] : lex) out[phrase] = int(op);
    return out;
}

inline nlohmann::json experiment_to_json(const experiment_result& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& run : row.runs)
            runs.push_back({{"seed", run.seed}, {"metrics", metrics_to_json(run.report)}});
        rows.push_back({
            {"factor", row.factor},
            {"median_domain_execution_accuracy", row.median_domain_exec},
            {"median_normal_execution_accuracy", row.median_normal_exec},
            {"median_all_execution_accuracy", row.median_all_exec},
            {"median_all_logical_form_accuracy", row.median_all_lf},
            {"delta_domain_execution_accuracy", row.delta_domain_exec},
            {"runs", runs},
        });
    }
    return nlohmann::json{
        {"tool", toolkit_name},
        {"version", toolkit_version},
        {"config",
         {{"seeds", r.config.seeds},
          {"factors", r.config.factors},
          {"train", train_config_to_json(r.config.train)},
          {"finetune", train_config_to_json(r.config.finetune)},
          {"finetune_fraction", r.config.finetune_fraction},
          {"lexicon", lexicon_to_json(r.config.lexicon)}}},
        {"train_count", r.train_count},
        {"test_count", r.test_count},
        {"rows", rows},
    };
}

// Ratio-sweep table: one row per factor, delta against the previous row.
inline std::string experiment_to_csv(const experiment_result& r) {
    std::string out =
        "factor,median_domain_execution_accuracy,median_normal_execution_accuracy,"
        "median_all_execution_accuracy,median_all_logical_form_accuracy,"
        "delta_domain_execution_accuracy\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.factor);
        out += "," + detail::csv_num(row.median_domain_exec);
        out += "," + detail::csv_num(row.median_normal_exec);
        out += "," + detail::csv_num(row.median_all_exec);
        out += "," + detail::csv_num(row.median_all_lf);
        out += "," + detail::csv_num(row.delta_domain_exec);
        out += "\n";
    }
    return out;
}

// Per-seed detail with per-slice component axes.
inline std::string experiment_runs_to_csv(const experiment_result& r) {
    std::string out = "factor,seed,slice,count,logical_form_accuracy,execution_accuracy";
    for (int c = 0; c < num_components; ++c)
        out += std::string(",") + component_name(component(c));
    out += "\n";
    auto row = [&](uint64_t factor, uint64_t seed, const char* name, const slice_metrics& m) {
        out += std::to_string(factor);
        out += "," + std::to_string(seed);
        out += ",";
        out += name;
        out += "," + std::to_string(m.count);
        out += "," + detail::csv_num(m.lf_accuracy());
        out += "," + detail::csv_num(m.exec_accuracy());
        for (int c = 0; c < num_components; ++c)
            out += "," + detail::csv_num(m.component_accuracy(component(c)));
        out += "\n";
    };
    for (const auto& er : r.rows)
        for (const auto& run : er.runs) {
            row(er.factor, run.seed, "ALL", run.report.all);
            row(er.factor, run.seed, "DOMAIN_SPECIFIC", run.report.domain_specific);
            row(er.factor, run.seed, "NORMAL", run.report.normal);
        }
    return out;
}

// Histogram data series in long form, one table for all of them.
inline std::string stats_to_csv(const dataset_stats& s) {
    std::string out = "histogram,key,count\n";
    for (const auto& [k, v] : s.question_len_hist)
        out += "question_token_length," + std::to_string(k) + "," + std::to_string(v) + "\n";
    for (const auto& [k, v] : s.sql_len_hist)
        out += "sql_token_length," + std::to_string(k) + "," + std::to_string(v) + "\n";
    for (int k = 0; k < num_aggregators; ++k)
        out += std::string("aggregator,") + agg_name(aggregator(k)) + "," +
               std::to_string(s.agg_hist[k]) + "\n";
    const char* op_names[] = {"EQ", "GT", "LT"};
    for (int k = 0; k < num_cond_ops; ++k)
        out += std::string("operator,") + op_names[k] + "," + std::to_string(s.op_hist[k]) + "\n";
    for (size_t k = 0; k < s.cond_count_hist.size(); ++k)
        out += "condition_count," + std::to_string(k) + "," +
               std::to_string(s.cond_count_hist[k]) + "\n";
    return out;
}

inline nlohmann::json kfold_to_json(const kfold_result& r, const kfold_config& cfg) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds)
        folds.push_back({
            {"fold", f.fold},
            {"holdout_size", f.holdout_indices.size()},
            {"holdout_indices", f.holdout_indices},
            {"metrics", metrics_to_json(f.report)},
        });
    return nlohmann::json{
        {"tool", toolkit_name},
        {"version", toolkit_version},
        {"config",
         {{"folds", cfg.folds},
          {"seed", cfg.seed},
          {"factor", cfg.factor},
          {"train", train_config_to_json(cfg.train)},
          {"finetune", train_config_to_json(cfg.finetune)},
          {"finetune_fraction", cfg.finetune_fraction},
          {"lexicon", lexicon_to_json(cfg.lexicon)}}},
        {"example_count", r.example_count},
        {"folds", folds},
        {"mean_execution_accuracy", r.mean_exec},
        {"stdev_execution_accuracy", r.stdev_exec},
        {"mean_logical_form_accuracy", r.mean_lf},
        {"stdev_logical_form_accuracy", r.stdev_lf},
    };
}

} // namespace sketchsql
