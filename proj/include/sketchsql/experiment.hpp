#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sketchsql/balance.hpp"
#include "sketchsql/errors.hpp"
#include "sketchsql/eval.hpp"
#include "sketchsql/parser.hpp"
#include "sketchsql/rng.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return (v[mid - 1] + v[mid]) / 2.0;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

inline double stdev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size()));
}

// ---- balancing sweep ----

struct experiment_config {
    std::vector<uint64_t> seeds = {1, 2, 3};
    std::vector<uint64_t> factors = {1, 2, 3};
    train_config train;
    train_config finetune;
    double finetune_fraction = 1.0;
    phrase_lexicon lexicon = default_lexicon(true);
};

struct run_metrics {
    uint64_t seed = 0;
    metric_report report;
    std::string model_dump;
};

// factor 0 is the unbalanced baseline: plain training, no fine-tuning
struct experiment_row {
    uint64_t factor = 0;
    std::vector<run_metrics> runs;
    double median_domain_exec = 0.0;
    double median_normal_exec = 0.0;
    double median_all_exec = 0.0;
    double median_all_lf = 0.0;
    double delta_domain_exec = 0.0;
};

struct experiment_result {
    experiment_config config;
    size_t train_count = 0;
    size_t test_count = 0;
    std::vector<experiment_row> rows;
};

namespace detail {

inline std::vector<query_sketch> predict_all(const std::vector<example>& examples,
                                             const table_map& tables, const slot_models& models) {
    std::vector<query_sketch> preds;
    preds.reserve(examples.size());
    for (const auto& ex : examples)
        preds.push_back(predict(ex.question_tokens, tables.at(ex.table_id), models));
    return preds;
}

inline run_metrics run_one(const std::vector<example>& train_set,
                           const std::vector<example>& test_set, const table_map& tables,
                           const experiment_config& cfg, uint64_t factor, uint64_t seed) {
    std::vector<example> effective = train_set;
    if (factor >= 1) {
        oversample_config oc;
        oc.factor = factor;
        oc.seed = derive_seed(seed, "oversample");
        effective = oversample(partition(train_set), oc).examples;
    }
    train_config tc = cfg.train;
    tc.seed = derive_seed(seed, "train");
    slot_models models = train(effective, tables, tc, cfg.lexicon);
    if (factor >= 1 && cfg.finetune.epochs > 0) {
        train_config fc = cfg.finetune;
        fc.seed = derive_seed(seed, "finetune");
        models = finetune(models, effective, tables, cfg.finetune_fraction, fc);
    }
    run_metrics rm;
    rm.seed = seed;
    rm.report = evaluate(test_set, predict_all(test_set, tables, models), tables);
    rm.model_dump = serialize_models(models);
    return rm;
}

inline void fill_medians(experiment_row& row) {
    std::vector<double> domain, normal, all_exec, all_lf;
    for (const auto& r : row.runs) {
        domain.push_back(r.report.domain_specific.exec_accuracy());
        normal.push_back(r.report.normal.exec_accuracy());
        all_exec.push_back(r.report.all.exec_accuracy());
        all_lf.push_back(r.report.all.lf_accuracy());
    }
    row.median_domain_exec = median(domain);
    row.median_normal_exec = median(normal);
    row.median_all_exec = median(all_exec);
    row.median_all_lf = median(all_lf);
}

} // namespace detail

// Sweeps oversampling factors against the unbalanced baseline. Each row
// reports per-seed metrics, the across-seed medians, and the change in
// domain-slice execution accuracy relative to the row above.
inline experiment_result run_experiment(const dataset& ds, const experiment_config& cfg) {
    if (cfg.seeds.empty()) throw config_error("experiment needs at least one seed");
    for (uint64_t f : cfg.factors)
        if (f < 1) throw config_error("explicit factors must be at least 1");

    std::vector<example> train_set, test_set;
    for (const auto& ex : ds.examples) {
        if (ex.split == split_tag::train) train_set.push_back(ex);
        else if (ex.split == split_tag::test) test_set.push_back(ex);
    }
    if (train_set.empty()) throw empty_training_set_error("dataset has no train split");
    if (test_set.empty()) throw validation_error("dataset has no test split");
    auto slices = partition(train_set);
    if (slices.minority.empty())
        throw validation_error("train split has no domain-specific examples to balance");
    if (slices.majority.empty())
        throw validation_error("train split has no normal examples");

    experiment_result result;
    result.config = cfg;
    result.train_count = train_set.size();
    result.test_count = test_set.size();

    std::vector<uint64_t> factors = {0};
    std::vector<uint64_t> sweep = cfg.factors;
    std::sort(sweep.begin(), sweep.end());
    factors.insert(factors.end(), sweep.begin(), sweep.end());

    for (uint64_t factor : factors) {
        experiment_row row;
        row.factor = factor;
        for (uint64_t seed : cfg.seeds)
            row.runs.push_back(detail::run_one(train_set, test_set, ds.tables, cfg, factor, seed));
        detail::fill_medians(row);
        row.delta_domain_exec =
            result.rows.empty() ? 0.0
                                : row.median_domain_exec - result.rows.back().median_domain_exec;
        result.rows.push_back(std::move(row));
    }
    return result;
}

// ---- cross validation ----

struct kfold_config {
    size_t folds = 5;
    uint64_t seed = 0;
    uint64_t factor = 1;
    train_config train;
    train_config finetune;
    double finetune_fraction = 1.0;
    phrase_lexicon lexicon = default_lexicon(true);
};

struct fold_result {
    size_t fold = 0;
    std::vector<size_t> holdout_indices;
    metric_report report;
    std::string model_dump;
};

struct kfold_result {
    size_t example_count = 0;
    std::vector<fold_result> folds;
    double mean_exec = 0.0;
    double stdev_exec = 0.0;
    double mean_lf = 0.0;
    double stdev_lf = 0.0;
};

// Seeded assignment into k near-equal folds; each fold's training side is
// balanced independently so no holdout example is ever duplicated into it.
inline kfold_result kfold(const std::vector<example>& examples, const table_map& tables,
                          const kfold_config& cfg) {
    if (cfg.folds < 2) throw config_error("need at least 2 folds");
    if (examples.size() < cfg.folds)
        throw config_error("need at least " + std::to_string(cfg.folds) + " examples for " +
                           std::to_string(cfg.folds) + " folds");

    auto gen = rng::for_stage(cfg.seed, "kfold-assign");
    std::vector<size_t> order(examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    gen.shuffle(order);

    kfold_result result;
    result.example_count = examples.size();
    std::vector<double> execs, lfs;
    for (size_t f = 0; f < cfg.folds; ++f) {
        fold_result fr;
        fr.fold = f;
        std::vector<bool> held(examples.size(), false);
        for (size_t i = f; i < order.size(); i += cfg.folds) {
            fr.holdout_indices.push_back(order[i]);
            held[order[i]] = true;
        }
        std::sort(fr.holdout_indices.begin(), fr.holdout_indices.end());

        std::vector<example> train_set, holdout;
        for (size_t i = 0; i < examples.size(); ++i)
            (held[i] ? holdout : train_set).push_back(examples[i]);

        if (cfg.factor >= 1) {
            oversample_config oc;
            oc.factor = cfg.factor;
            oc.seed = derive_seed(cfg.seed, "kfold-oversample-" + std::to_string(f));
            train_set = oversample(partition(train_set), oc).examples;
        }
        train_config tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, "kfold-train-" + std::to_string(f));
        slot_models models = train(train_set, tables, tc, cfg.lexicon);
        if (cfg.finetune.epochs > 0) {
            train_config fc = cfg.finetune;
            fc.seed = derive_seed(cfg.seed, "kfold-finetune-" + std::to_string(f));
            models = finetune(models, train_set, tables, cfg.finetune_fraction, fc);
        }
        fr.report = evaluate(holdout, detail::predict_all(holdout, tables, models), tables);
        fr.model_dump = serialize_models(models);
        execs.push_back(fr.report.all.exec_accuracy());
        lfs.push_back(fr.report.all.lf_accuracy());
        result.folds.push_back(std::move(fr));
    }
    result.mean_exec = mean(execs);
    result.stdev_exec = stdev(execs);
    result.mean_lf = mean(lfs);
    result.stdev_lf = stdev(lfs);
    return result;
}

} // namespace sketchsql
