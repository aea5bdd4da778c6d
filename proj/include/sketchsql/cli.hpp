#pragma once

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchsql/balance.hpp"
#include "sketchsql/dataset.hpp"
#include "sketchsql/errors.hpp"
#include "sketchsql/eval.hpp"
#include "sketchsql/experiment.hpp"
#include "sketchsql/parser.hpp"
#include "sketchsql/report.hpp"
#include "sketchsql/sqlexec.hpp"
#include "sketchsql/stats.hpp"
#include "sketchsql/synth.hpp"

namespace sketchsql {

enum exit_code : int {
    exit_ok = 0,
    exit_config = 1,
    exit_data = 2,
    exit_empty_aggregate = 3,
    exit_failure = 4,
};

template <typename F>
int guard(F&& f) {
    try {
        return f();
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const empty_aggregate_error& e) {
        std::cerr << "error: EMPTY_AGGREGATE: " << e.what() << "\n";
        return exit_empty_aggregate;
    } catch (const load_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

inline split_tag parse_split(const std::string& s) {
    if (s == "train") return split_tag::train;
    if (s == "dev") return split_tag::dev;
    if (s == "test") return split_tag::test;
    throw config_error("unknown split '" + s + "', expected train, dev or test");
}

// ---- stats ----

struct stats_options {
    std::string examples;
    std::string tables;
    std::string split = "train";
    std::string out;
    std::string csv_out;
    bool force = false;
};

inline int cmd_stats(const stats_options& opt) {
    return guard([&] {
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        auto stats = compute_stats(ds);
        auto j = stats_to_json(stats);
        j["config"] = {{"examples", opt.examples}, {"tables", opt.tables}, {"split", opt.split}};
        auto text = j.dump(2) + "\n";
        if (!opt.out.empty()) write_text_file(opt.out, text, opt.force);
        if (!opt.csv_out.empty()) write_text_file(opt.csv_out, stats_to_csv(stats), opt.force);
        std::cout << text;
        return exit_ok;
    });
}

// ---- balance ----

struct balance_options {
    std::string examples;
    std::string tables;
    std::string split = "train";
    uint64_t factor = 1;
    uint64_t seed = 0;
    std::string out;
    std::string provenance_out;
    bool force = false;
};

inline int cmd_balance(const balance_options& opt) {
    return guard([&] {
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        oversample_config oc;
        oc.factor = opt.factor;
        oc.seed = opt.seed;
        auto part = partition(ds.examples);
        auto balanced = oversample(part, oc);

        std::ostringstream body;
        write_examples(balanced.examples, body);
        write_text_file(opt.out, body.str(), opt.force);

        if (!opt.provenance_out.empty()) {
            // one line per output example, source given as a 1-based input line number
            std::ostringstream prov;
            for (const auto& mark : balanced.provenance) {
                if (mark.kind == provenance_kind::original)
                    prov << "ORIGINAL\n";
                else
                    prov << "DUPLICATE:" << (mark.source_index + 1) << "\n";
            }
            write_text_file(opt.provenance_out, prov.str(), opt.force);
        }

        nlohmann::json summary{
            {"tool", toolkit_name},
            {"version", toolkit_version},
            {"config",
             {{"examples", opt.examples},
              {"tables", opt.tables},
              {"split", opt.split},
              {"factor", opt.factor},
              {"seed", opt.seed}}},
            {"majority", part.majority.size()},
            {"minority", part.minority.size()},
            {"added_duplicates", balanced.added_duplicates},
            {"total", balanced.examples.size()},
        };
        std::cout << summary.dump(2) << "\n";
        return exit_ok;
    });
}

// ---- train / finetune ----

struct train_options {
    std::string examples;
    std::string tables;
    std::string split = "train";
    train_config config;
    bool extended_lexicon = false;
    std::string model_out;
    bool force = false;
};

inline int cmd_train(const train_options& opt) {
    return guard([&] {
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        std::vector<double> losses;
        auto models =
            train(ds.examples, ds.tables, opt.config, default_lexicon(!opt.extended_lexicon), &losses);
        if (!opt.force && std::filesystem::exists(opt.model_out))
            throw report_error(opt.model_out + " already exists, pass --force to replace it");
        save_models(models, opt.model_out);
        nlohmann::json summary{
            {"examples", ds.examples.size()},
            {"epochs", opt.config.epochs},
            {"final_loss", losses.empty() ? 0.0 : losses.back()},
            {"model", opt.model_out},
        };
        std::cout << summary.dump(2) << "\n";
        return exit_ok;
    });
}

struct finetune_options {
    std::string model_in;
    std::string examples;
    std::string tables;
    std::string split = "train";
    double fraction = 1.0;
    train_config config;
    std::string model_out;
    bool force = false;
};

inline int cmd_finetune(const finetune_options& opt) {
    return guard([&] {
        auto base = load_models(opt.model_in);
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        std::vector<double> losses;
        auto models = finetune(base, ds.examples, ds.tables, opt.fraction, opt.config, &losses);
        if (!opt.force && std::filesystem::exists(opt.model_out))
            throw report_error(opt.model_out + " already exists, pass --force to replace it");
        save_models(models, opt.model_out);
        nlohmann::json summary{
            {"epochs", opt.config.epochs},
            {"fraction", opt.fraction},
            {"final_loss", losses.empty() ? 0.0 : losses.back()},
            {"model", opt.model_out},
        };
        std::cout << summary.dump(2) << "\n";
        return exit_ok;
    });
}

// ---- predict / evaluate ----

struct predict_options {
    std::string model_in;
    std::string examples;
    std::string tables;
    std::string split = "test";
    std::string out;
    bool force = false;
};

inline int cmd_predict(const predict_options& opt) {
    return guard([&] {
        auto models = load_models(opt.model_in);
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        std::ostringstream body;
        for (size_t i = 0; i < ds.examples.size(); ++i) {
            const auto& ex = ds.examples[i];
            auto sketch = predict(ex.question_tokens, ds.table_for(ex), models);
            body << nlohmann::json{{"example_index", i}, {"sql", sql_to_json(sketch)}}.dump()
                 << "\n";
        }
        write_text_file(opt.out, body.str(), opt.force);
        std::cout << nlohmann::json{{"predictions", ds.examples.size()}, {"out", opt.out}}.dump(2)
                  << "\n";
        return exit_ok;
    });
}

inline std::vector<query_sketch> load_predictions(const std::string& path, size_t expected) {
    std::ifstream in(path);
    if (!in) throw load_error("cannot open " + path);
    std::vector<query_sketch> preds(expected);
    std::vector<bool> seen(expected, false);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw load_error(path + ":" + std::to_string(line_no) + ": malformed record: " +
                             e.what());
        }
        size_t idx = 0;
        try {
            idx = j.at("example_index").get<size_t>();
            if (idx >= expected)
                throw validation_error("example_index " + std::to_string(idx) + " out of range");
            if (seen[idx])
                throw validation_error("duplicate example_index " + std::to_string(idx));
            preds[idx] = parse_sql_json(j.at("sql"));
            seen[idx] = true;
        } catch (const nlohmann::json::exception& e) {
            throw load_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (size_t i = 0; i < expected; ++i)
        if (!seen[i])
            throw validation_error(path + ": missing prediction for example " + std::to_string(i));
    return preds;
}

struct evaluate_options {
    std::string examples;
    std::string tables;
    std::string split = "test";
    std::string predictions;
    std::string out;
    std::string csv_out;
    bool order_sensitive = false;
    bool force = false;
};

inline int cmd_evaluate(const evaluate_options& opt) {
    return guard([&] {
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        auto preds = load_predictions(opt.predictions, ds.examples.size());
        eval_options eo;
        eo.order_sensitive_lf = opt.order_sensitive;
        auto report = evaluate(ds.examples, preds, ds.tables, eo);
        auto j = metrics_to_json(report);
        j["tool"] = toolkit_name;
        j["version"] = toolkit_version;
        j["config"] = {{"examples", opt.examples},
                       {"tables", opt.tables},
                       {"split", opt.split},
                       {"predictions", opt.predictions},
                       {"order_sensitive_logical_form", opt.order_sensitive}};
        nlohmann::json errs = nlohmann::json::array();
        for (int e : report.example_errors)
            errs.push_back(e < 0 ? nlohmann::json(nullptr)
                                 : nlohmann::json(error_category_name(error_category(e))));
        j["example_errors"] = errs;
        auto text = j.dump(2) + "\n";
        if (!opt.out.empty()) write_text_file(opt.out, text, opt.force);
        if (!opt.csv_out.empty()) write_text_file(opt.csv_out, metrics_to_csv(report), opt.force);
        std::cout << text;
        return exit_ok;
    });
}

// ---- exec ----

struct exec_options {
    std::string tables;
    std::string table_id;
    std::string sql_json;
};

inline int cmd_exec(const exec_options& opt) {
    return guard([&] {
        auto tables = load_tables(opt.tables);
        auto it = tables.find(opt.table_id);
        if (it == tables.end()) throw validation_error("unknown table '" + opt.table_id + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(opt.sql_json);
        } catch (const nlohmann::json::exception& e) {
            throw config_error(std::string("bad sql json: ") + e.what());
        }
        auto sketch = parse_sql_json(j);
        auto rendered = render_sql(sketch, it->second.schema);
        auto result = execute(sketch, it->second);

        auto value_json = [](const value& v) {
            return v.is_number() ? nlohmann::json(v.num()) : nlohmann::json(v.str());
        };
        nlohmann::json out{{"sql", rendered}};
        if (result.k == query_result::kind::scalar) {
            out["kind"] = "scalar";
            out["value"] = value_json(result.scalar);
        } else {
            out["kind"] = "bag";
            nlohmann::json vals = nlohmann::json::array();
            for (const auto& v : result.bag) vals.push_back(value_json(v));
            out["values"] = vals;
        }
        std::cout << out.dump(2) << "\n";
        return exit_ok;
    });
}

// ---- experiment / kfold ----

struct experiment_options {
    std::string train_examples;
    std::string test_examples;
    std::string tables;
    experiment_config config;
    std::string outdir;
    bool extended_lexicon = false;
    bool force = false;
};

inline int cmd_experiment(const experiment_options& opt) {
    return guard([&] {
        auto tables = load_tables(opt.tables);
        dataset ds;
        ds.tables = tables;
        ds.examples = load_examples(opt.train_examples, ds.tables, split_tag::train);
        auto test = load_examples(opt.test_examples, ds.tables, split_tag::test);
        ds.examples.insert(ds.examples.end(), test.begin(), test.end());

        experiment_config cfg = opt.config;
        cfg.lexicon = default_lexicon(!opt.extended_lexicon);
        auto result = run_experiment(ds, cfg);

        std::filesystem::create_directories(opt.outdir);
        std::filesystem::create_directories(opt.outdir + "/models");
        write_text_file(opt.outdir + "/report.json", experiment_to_json(result).dump(2) + "\n",
                        opt.force);
        write_text_file(opt.outdir + "/report.csv", experiment_to_csv(result), opt.force);
        write_text_file(opt.outdir + "/runs.csv", experiment_runs_to_csv(result), opt.force);
        for (const auto& row : result.rows)
            for (const auto& run : row.runs)
                write_text_file(opt.outdir + "/models/factor" + std::to_string(row.factor) +
                                    "_seed" + std::to_string(run.seed) + ".model",
                                run.model_dump, opt.force);

        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : result.rows)
            rows.push_back({{"factor", row.factor},
                            {"median_domain_execution_accuracy", row.median_domain_exec},
                            {"delta_domain_execution_accuracy", row.delta_domain_exec}});
        std::cout << nlohmann::json{{"outdir", opt.outdir}, {"rows", rows}}.dump(2) << "\n";
        return exit_ok;
    });
}

struct kfold_options {
    std::string examples;
    std::string tables;
    std::string split = "train";
    kfold_config config;
    std::string out;
    bool extended_lexicon = false;
    bool force = false;
};

inline int cmd_kfold(const kfold_options& opt) {
    return guard([&] {
        auto ds = load_dataset(opt.examples, opt.tables, parse_split(opt.split));
        kfold_config cfg = opt.config;
        cfg.lexicon = default_lexicon(!opt.extended_lexicon);
        auto result = kfold(ds.examples, ds.tables, cfg);
        auto text = kfold_to_json(result, cfg).dump(2) + "\n";
        if (!opt.out.empty()) write_text_file(opt.out, text, opt.force);
        std::cout << nlohmann::json{{"folds", cfg.folds},
                                    {"mean_execution_accuracy", result.mean_exec},
                                    {"stdev_execution_accuracy", result.stdev_exec}}
                         .dump(2)
                  << "\n";
        return exit_ok;
    });
}

// ---- synth ----

struct synth_options {
    synth_config config;
    std::string outdir;
    bool force = false;
};

inline int cmd_synth(const synth_options& opt) {
    return guard([&] {
        auto ds = synthesize(opt.config);
        std::filesystem::create_directories(opt.outdir);
        std::ostringstream tables;
        write_tables(ds.tables, tables);
        write_text_file(opt.outdir + "/tables.jsonl", tables.str(), opt.force);
        const split_tag tags[] = {split_tag::train, split_tag::dev, split_tag::test};
        for (split_tag tag : tags) {
            std::vector<example> split;
            for (const auto& ex : ds.examples)
                if (ex.split == tag) split.push_back(ex);
            std::ostringstream body;
            write_examples(split, body);
            write_text_file(opt.outdir + "/" + split_name(tag) + ".jsonl", body.str(), opt.force);
        }
        std::cout << nlohmann::json{{"outdir", opt.outdir},
                                    {"tables", ds.tables.size()},
                                    {"examples", ds.examples.size()}}
                         .dump(2)
                  << "\n";
        return exit_ok;
    });
}

} // namespace sketchsql
