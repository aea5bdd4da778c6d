#include <CLI11.hpp>

#include "sketchsql/sketchsql.hpp"

using namespace sketchsql;

namespace {

void add_train_config(CLI::App* cmd, train_config& cfg) {
    cmd->add_option("--lr", cfg.learning_rate, "learning rate")->capture_default_str();
    cmd->add_option("--batch", cfg.batch_size, "mini batch size")->capture_default_str();
    cmd->add_option("--epochs", cfg.epochs, "epoch count")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"experimentation toolkit for single table text to sql"};
    app.require_subcommand(1);
    int rc = exit_ok;

    stats_options stats_opt;
    auto* stats_cmd = app.add_subcommand("stats", "dataset statistics");
    stats_cmd->add_option("--examples", stats_opt.examples, "examples jsonl")->required();
    stats_cmd->add_option("--tables", stats_opt.tables, "tables jsonl")->required();
    stats_cmd->add_option("--split", stats_opt.split, "split label")->capture_default_str();
    stats_cmd->add_option("--out", stats_opt.out, "also write the report here");
    stats_cmd->add_option("--csv-out", stats_opt.csv_out, "histogram data series as csv");
    stats_cmd->add_flag("--force", stats_opt.force, "replace an existing output file");
    stats_cmd->callback([&] { rc = cmd_stats(stats_opt); });

    balance_options bal_opt;
    auto* bal_cmd = app.add_subcommand("balance", "oversample the domain-specific slice");
    bal_cmd->add_option("--examples", bal_opt.examples, "examples jsonl")->required();
    bal_cmd->add_option("--tables", bal_opt.tables, "tables jsonl")->required();
    bal_cmd->add_option("--split", bal_opt.split, "split label")->capture_default_str();
    bal_cmd->add_option("--factor", bal_opt.factor, "target multiple of the majority count")
        ->capture_default_str();
    bal_cmd->add_option("--seed", bal_opt.seed, "random seed")->capture_default_str();
    bal_cmd->add_option("--out", bal_opt.out, "balanced examples jsonl")->required();
    bal_cmd->add_option("--provenance-out", bal_opt.provenance_out, "provenance jsonl");
    bal_cmd->add_flag("--force", bal_opt.force, "replace existing output files");
    bal_cmd->callback([&] { rc = cmd_balance(bal_opt); });

    train_options train_opt;
    auto* train_cmd = app.add_subcommand("train", "train the sketch parser");
    train_cmd->add_option("--examples", train_opt.examples, "examples jsonl")->required();
    train_cmd->add_option("--tables", train_opt.tables, "tables jsonl")->required();
    train_cmd->add_option("--split", train_opt.split, "split label")->capture_default_str();
    add_train_config(train_cmd, train_opt.config);
    train_cmd->add_flag("--extended-lexicon", train_opt.extended_lexicon,
                        "include extra comparison phrases");
    train_cmd->add_option("--model-out", train_opt.model_out, "model file")->required();
    train_cmd->add_flag("--force", train_opt.force, "replace an existing model file");
    train_cmd->callback([&] { rc = cmd_train(train_opt); });

    finetune_options ft_opt;
    auto* ft_cmd = app.add_subcommand("finetune", "continue training on the domain slice");
    ft_cmd->add_option("--model-in", ft_opt.model_in, "model file to start from")->required();
    ft_cmd->add_option("--examples", ft_opt.examples, "examples jsonl")->required();
    ft_cmd->add_option("--tables", ft_opt.tables, "tables jsonl")->required();
    ft_cmd->add_option("--split", ft_opt.split, "split label")->capture_default_str();
    ft_cmd->add_option("--fraction", ft_opt.fraction, "fraction of the slice to sample")
        ->capture_default_str();
    add_train_config(ft_cmd, ft_opt.config);
    ft_cmd->add_option("--model-out", ft_opt.model_out, "model file")->required();
    ft_cmd->add_flag("--force", ft_opt.force, "replace an existing model file");
    ft_cmd->callback([&] { rc = cmd_finetune(ft_opt); });

    predict_options pred_opt;
    auto* pred_cmd = app.add_subcommand("predict", "predict sketches for a split");
    pred_cmd->add_option("--model", pred_opt.model_in, "model file")->required();
    pred_cmd->add_option("--examples", pred_opt.examples, "examples jsonl")->required();
    pred_cmd->add_option("--tables", pred_opt.tables, "tables jsonl")->required();
    pred_cmd->add_option("--split", pred_opt.split, "split label")->capture_default_str();
    pred_cmd->add_option("--out", pred_opt.out, "predictions jsonl")->required();
    pred_cmd->add_flag("--force", pred_opt.force, "replace an existing output file");
    pred_cmd->callback([&] { rc = cmd_predict(pred_opt); });

    evaluate_options eval_opt;
    auto* eval_cmd = app.add_subcommand("evaluate", "score predictions against gold");
    eval_cmd->add_option("--examples", eval_opt.examples, "examples jsonl")->required();
    eval_cmd->add_option("--tables", eval_opt.tables, "tables jsonl")->required();
    eval_cmd->add_option("--split", eval_opt.split, "split label")->capture_default_str();
    eval_cmd->add_option("--predictions", eval_opt.predictions, "predictions jsonl")->required();
    eval_cmd->add_option("--out", eval_opt.out, "also write the report here");
    eval_cmd->add_option("--csv-out", eval_opt.csv_out, "per-slice metric axes as csv");
    eval_cmd->add_flag("--order-sensitive", eval_opt.order_sensitive,
                       "compare conditions in written order for logical form");
    eval_cmd->add_flag("--force", eval_opt.force, "replace an existing output file");
    eval_cmd->callback([&] { rc = cmd_evaluate(eval_opt); });

    exec_options exec_opt;
    auto* exec_cmd = app.add_subcommand("exec", "execute one sketch against a table");
    exec_cmd->add_option("--tables", exec_opt.tables, "tables jsonl")->required();
    exec_cmd->add_option("--table-id", exec_opt.table_id, "table id")->required();
    exec_cmd->add_option("--sql", exec_opt.sql_json, "sketch as a json object")->required();
    exec_cmd->callback([&] { rc = cmd_exec(exec_opt); });

    experiment_options exp_opt;
    auto* exp_cmd = app.add_subcommand("experiment", "balancing sweep with medians per factor");
    exp_cmd->add_option("--train", exp_opt.train_examples, "train examples jsonl")->required();
    exp_cmd->add_option("--test", exp_opt.test_examples, "test examples jsonl")->required();
    exp_cmd->add_option("--tables", exp_opt.tables, "tables jsonl")->required();
    exp_cmd->add_option("--seeds", exp_opt.config.seeds, "seeds, one run per seed")
        ->delimiter(',')
        ->capture_default_str();
    exp_cmd->add_option("--factors", exp_opt.config.factors, "oversampling factors to sweep")
        ->delimiter(',')
        ->capture_default_str();
    exp_cmd->add_option("--lr", exp_opt.config.train.learning_rate, "training learning rate")
        ->capture_default_str();
    exp_cmd->add_option("--batch", exp_opt.config.train.batch_size, "mini batch size")
        ->capture_default_str();
    exp_cmd->add_option("--epochs", exp_opt.config.train.epochs, "training epochs")
        ->capture_default_str();
    exp_cmd->add_option("--finetune-lr", exp_opt.config.finetune.learning_rate,
                        "fine-tuning learning rate")
        ->capture_default_str();
    exp_cmd->add_option("--finetune-epochs", exp_opt.config.finetune.epochs,
                        "fine-tuning epochs, 0 disables")
        ->capture_default_str();
    exp_cmd->add_option("--finetune-fraction", exp_opt.config.finetune_fraction,
                        "fraction of the domain slice to sample")
        ->capture_default_str();
    exp_cmd->add_flag("--extended-lexicon", exp_opt.extended_lexicon,
                      "include extra comparison phrases");
    exp_cmd->add_option("--outdir", exp_opt.outdir, "report and model directory")->required();
    exp_cmd->add_flag("--force", exp_opt.force, "replace existing outputs");
    exp_cmd->callback([&] { rc = cmd_experiment(exp_opt); });

    kfold_options kf_opt;
    auto* kf_cmd = app.add_subcommand("kfold", "cross validate on one split");
    kf_cmd->add_option("--examples", kf_opt.examples, "examples jsonl")->required();
    kf_cmd->add_option("--tables", kf_opt.tables, "tables jsonl")->required();
    kf_cmd->add_option("--split", kf_opt.split, "split label")->capture_default_str();
    kf_cmd->add_option("--folds", kf_opt.config.folds, "fold count")->capture_default_str();
    kf_cmd->add_option("--seed", kf_opt.config.seed, "random seed")->capture_default_str();
    kf_cmd->add_option("--factor", kf_opt.config.factor, "oversampling factor per fold, 0 disables")
        ->capture_default_str();
    kf_cmd->add_option("--lr", kf_opt.config.train.learning_rate, "training learning rate")
        ->capture_default_str();
    kf_cmd->add_option("--batch", kf_opt.config.train.batch_size, "mini batch size")
        ->capture_default_str();
    kf_cmd->add_option("--epochs", kf_opt.config.train.epochs, "training epochs")
        ->capture_default_str();
    kf_cmd->add_option("--finetune-lr", kf_opt.config.finetune.learning_rate,
                       "fine-tuning learning rate")
        ->capture_default_str();
    kf_cmd->add_option("--finetune-epochs", kf_opt.config.finetune.epochs,
                       "fine-tuning epochs, 0 disables")
        ->capture_default_str();
    kf_cmd->add_option("--finetune-fraction", kf_opt.config.finetune_fraction,
                       "fraction of the domain slice to sample")
        ->capture_default_str();
    kf_cmd->add_flag("--extended-lexicon", kf_opt.extended_lexicon,
                     "include extra comparison phrases");
    kf_cmd->add_option("--out", kf_opt.out, "also write the report here");
    kf_cmd->add_flag("--force", kf_opt.force, "replace an existing output file");
    kf_cmd->callback([&] { rc = cmd_kfold(kf_opt); });

    synth_options synth_opt;
    auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic corpus");
    synth_cmd->add_option("--seed", synth_opt.config.seed, "random seed")->capture_default_str();
    synth_cmd->add_option("--table-count", synth_opt.config.table_count, "tables to generate")
        ->capture_default_str();
    synth_cmd->add_option("--train-count", synth_opt.config.train_examples, "train examples")
        ->capture_default_str();
    synth_cmd->add_option("--dev-count", synth_opt.config.dev_examples, "dev examples")
        ->capture_default_str();
    synth_cmd->add_option("--test-count", synth_opt.config.test_examples, "test examples")
        ->capture_default_str();
    synth_cmd->add_option("--domain-fraction", synth_opt.config.domain_fraction,
                          "share of comparison questions")
        ->capture_default_str();
    synth_cmd->add_option("--outdir", synth_opt.outdir, "output directory")->required();
    synth_cmd->add_flag("--force", synth_opt.force, "replace existing output files");
    synth_cmd->callback([&] { rc = cmd_synth(synth_opt); });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
