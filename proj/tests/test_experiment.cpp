#include <catch_amalgamated.hpp>

#include <set>

#include "sketchsql/experiment.hpp"
#include "sketchsql/synth.hpp"

using namespace sketchsql;

namespace {

dataset small_corpus() {
    synth_config sc;
    sc.seed = 5;
    sc.table_count = 4;
    sc.train_examples = 120;
    sc.dev_examples = 10;
    sc.test_examples = 40;
    sc.domain_fraction = 0.25;
    return synthesize(sc);
}

experiment_config quick_config() {
    experiment_config cfg;
    cfg.seeds = {2, 1};
    cfg.factors = {2, 1};
    cfg.train.epochs = 1;
    cfg.finetune.epochs = 1;
    return cfg;
}

} // namespace

TEST_CASE("summary statistics") {
    CHECK(median({3.0, 1.0, 2.0}) == Catch::Approx(2.0));
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == Catch::Approx(2.5));
    CHECK(median({7.0}) == Catch::Approx(7.0));
    CHECK(median({}) == Catch::Approx(0.0));

    CHECK(mean({1.0, 2.0, 6.0}) == Catch::Approx(3.0));
    CHECK(mean({}) == Catch::Approx(0.0));

    CHECK(stdev({2.0, 4.0}) == Catch::Approx(1.0));
    CHECK(stdev({5.0, 5.0, 5.0}) == Catch::Approx(0.0));
    CHECK(stdev({9.0}) == Catch::Approx(0.0));
}

TEST_CASE("experiment sweeps the baseline plus each factor") {
    auto ds = small_corpus();
    auto cfg = quick_config();
    auto result = run_experiment(ds, cfg);

    CHECK(result.train_count == 120);
    CHECK(result.test_count == 40);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].factor == 0);
    CHECK(result.rows[1].factor == 1); // factors come back sorted
    CHECK(result.rows[2].factor == 2);

    for (const auto& row : result.rows) {
        REQUIRE(row.runs.size() == 2);
        CHECK(row.runs[0].seed == 2); // seeds keep their given order
        CHECK(row.runs[1].seed == 1);
        for (const auto& run : row.runs) {
            CHECK(run.report.all.count == 40);
            CHECK_FALSE(run.model_dump.empty());
        }

        std::vector<double> domain, all_lf;
        for (const auto& run : row.runs) {
            domain.push_back(run.report.domain_specific.exec_accuracy());
            all_lf.push_back(run.report.all.lf_accuracy());
        }
        CHECK(row.median_domain_exec == Catch::Approx(median(domain)));
        CHECK(row.median_all_lf == Catch::Approx(median(all_lf)));
    }

    CHECK(result.rows[0].delta_domain_exec == Catch::Approx(0.0));
    for (size_t i = 1; i < result.rows.size(); ++i)
        CHECK(result.rows[i].delta_domain_exec ==
              Catch::Approx(result.rows[i].median_domain_exec -
                            result.rows[i - 1].median_domain_exec));
}

TEST_CASE("experiment runs are reproducible") {
    auto ds = small_corpus();
    auto cfg = quick_config();
    cfg.seeds = {3};
    auto a = run_experiment(ds, cfg);
    auto b = run_experiment(ds, cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t r = 0; r < a.rows.size(); ++r) {
        CHECK(a.rows[r].median_domain_exec == b.rows[r].median_domain_exec);
        CHECK(a.rows[r].median_all_lf == b.rows[r].median_all_lf);
        REQUIRE(a.rows[r].runs.size() == b.rows[r].runs.size());
        for (size_t i = 0; i < a.rows[r].runs.size(); ++i)
            CHECK(a.rows[r].runs[i].model_dump == b.rows[r].runs[i].model_dump);
    }

    // the baseline row never fine-tunes, so its models differ from factor rows
    CHECK(a.rows[0].runs[0].model_dump != a.rows[1].runs[0].model_dump);
}

TEST_CASE("experiment with no factors reports only the baseline") {
    auto ds = small_corpus();
    auto cfg = quick_config();
    cfg.seeds = {1};
    cfg.factors = {};
    auto result = run_experiment(ds, cfg);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].factor == 0);
    CHECK(result.rows[0].delta_domain_exec == 0.0);
}

TEST_CASE("experiment rejects bad configs and unusable datasets") {
    auto ds = small_corpus();
    auto cfg = quick_config();

    auto bad = cfg;
    bad.seeds = {};
    CHECK_THROWS_AS(run_experiment(ds, bad), config_error);
    bad = cfg;
    bad.factors = {1, 0};
    CHECK_THROWS_AS(run_experiment(ds, bad), config_error);

    dataset no_train = ds;
    no_train.examples.clear();
    for (const auto& ex : ds.examples)
        if (ex.split != split_tag::train) no_train.examples.push_back(ex);
    CHECK_THROWS_AS(run_experiment(no_train, cfg), empty_training_set_error);

    dataset no_test = ds;
    no_test.examples.clear();
    for (const auto& ex : ds.examples)
        if (ex.split != split_tag::test) no_test.examples.push_back(ex);
    CHECK_THROWS_AS(run_experiment(no_test, cfg), validation_error);

    dataset one_sided = ds;
    one_sided.examples.clear();
    for (const auto& ex : ds.examples)
        if (ex.split != split_tag::train || !is_domain_specific(ex))
            one_sided.examples.push_back(ex);
    CHECK_THROWS_AS(run_experiment(one_sided, cfg), validation_error);

    dataset domain_only = ds;
    domain_only.examples.clear();
    for (const auto& ex : ds.examples)
        if (ex.split != split_tag::train || is_domain_specific(ex))
            domain_only.examples.push_back(ex);
    CHECK_THROWS_AS(run_experiment(domain_only, cfg), validation_error);
}

TEST_CASE("kfold holdouts partition the dataset") {
    auto ds = small_corpus();
    std::vector<example> pool(ds.examples.begin(), ds.examples.begin() + 30);

    kfold_config cfg;
    cfg.folds = 5;
    cfg.seed = 9;
    cfg.factor = 1;
    cfg.train.epochs = 1;
    cfg.finetune.epochs = 1;

    auto result = kfold(pool, ds.tables, cfg);
    CHECK(result.example_count == 30);
    REQUIRE(result.folds.size() == 5);

    std::set<size_t> seen;
    for (const auto& fr : result.folds) {
        CHECK(fr.holdout_indices.size() == 6);
        CHECK(std::is_sorted(fr.holdout_indices.begin(), fr.holdout_indices.end()));
        for (size_t idx : fr.holdout_indices) {
            REQUIRE(idx < pool.size());
            REQUIRE(seen.insert(idx).second); // no index held out twice
        }
        CHECK(fr.report.all.count == 6);
        CHECK_FALSE(fr.model_dump.empty());
    }
    CHECK(seen.size() == pool.size());

    std::vector<double> execs, lfs;
    for (const auto& fr : result.folds) {
        execs.push_back(fr.report.all.exec_accuracy());
        lfs.push_back(fr.report.all.lf_accuracy());
    }
    CHECK(result.mean_exec == Catch::Approx(mean(execs)));
    CHECK(result.stdev_exec == Catch::Approx(stdev(execs)));
    CHECK(result.mean_lf == Catch::Approx(mean(lfs)));
    CHECK(result.stdev_lf == Catch::Approx(stdev(lfs)));
}

TEST_CASE("kfold is seed-deterministic") {
    auto ds = small_corpus();
    std::vector<example> pool(ds.examples.begin(), ds.examples.begin() + 20);

    kfold_config cfg;
    cfg.folds = 4;
    cfg.seed = 11;
    cfg.factor = 0;
    cfg.train.epochs = 1;
    cfg.finetune.epochs = 0;

    auto a = kfold(pool, ds.tables, cfg);
    auto b = kfold(pool, ds.tables, cfg);
    REQUIRE(a.folds.size() == b.folds.size());
    for (size_t f = 0; f < a.folds.size(); ++f) {
        CHECK(a.folds[f].holdout_indices == b.folds[f].holdout_indices);
        CHECK(a.folds[f].model_dump == b.folds[f].model_dump);
    }
    CHECK(a.mean_exec == b.mean_exec);
    CHECK(a.stdev_lf == b.stdev_lf);

    cfg.seed = 12;
    auto c = kfold(pool, ds.tables, cfg);
    bool any_differs = false;
    for (size_t f = 0; f < a.folds.size(); ++f)
        if (a.folds[f].holdout_indices != c.folds[f].holdout_indices) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("kfold boundary and error cases") {
    auto ds = small_corpus();
    std::vector<example> pool(ds.examples.begin(), ds.examples.begin() + 6);

    kfold_config cfg;
    cfg.seed = 2;
    cfg.factor = 0;
    cfg.train.epochs = 1;
    cfg.finetune.epochs = 0;

    cfg.folds = 1;
    CHECK_THROWS_AS(kfold(pool, ds.tables, cfg), config_error);
    cfg.folds = 7;
    CHECK_THROWS_AS(kfold(pool, ds.tables, cfg), config_error);

    // leave-one-out
    cfg.folds = 6;
    auto result = kfold(pool, ds.tables, cfg);
    REQUIRE(result.folds.size() == 6);
    for (const auto& fr : result.folds) {
        CHECK(fr.holdout_indices.size() == 1);
        CHECK(fr.report.all.count == 1);
    }
}
