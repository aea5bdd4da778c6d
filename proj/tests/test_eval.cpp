#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "sketchsql/eval.hpp"

using namespace sketchsql;

namespace {

table fixture_table() {
    table t;
    t.schema.table_id = "t1";
    t.schema.headers = {"name", "goals"};
    t.schema.col_types = {column_type::text, column_type::real};
    t.rows = {{"ada", "3"}, {"bo", "7"}, {"cy", "5"}};
    return t;
}

query_sketch sketch(size_t sel, aggregator agg, std::vector<condition> conds) {
    query_sketch s;
    s.sel = sel;
    s.agg = agg;
    s.conds = std::move(conds);
    return s;
}

example wrap(const query_sketch& gold) {
    example ex;
    ex.question_raw = "q";
    ex.question_tokens = {"q"};
    ex.table_id = "t1";
    ex.gold = gold;
    return ex;
}

} // namespace

TEST_CASE("logical form equality folds condition order and value spelling") {
    auto a = sketch(0, aggregator::none,
                    {{0, cond_op::eq, "ada"}, {1, cond_op::gt, "5"}});
    auto b = sketch(0, aggregator::none,
                    {{1, cond_op::gt, "5.0"}, {0, cond_op::eq, "Ada "}});
    CHECK(logical_form_equal(a, a));
    CHECK(logical_form_equal(a, b));
    CHECK_FALSE(logical_form_equal(a, b, true)); // order-sensitive mode
    CHECK(logical_form_equal(a, a, true));

    auto c = sketch(0, aggregator::none, {{0, cond_op::eq, "ada"}});
    CHECK_FALSE(logical_form_equal(a, c));
    auto d = sketch(1, aggregator::none, a.conds);
    CHECK_FALSE(logical_form_equal(a, d));
}

TEST_CASE("execution match accepts different sketches with equal results") {
    auto t = fixture_table();
    auto pred = sketch(1, aggregator::none, {{1, cond_op::gt, "6"}});
    auto gold = sketch(1, aggregator::none, {{0, cond_op::eq, "bo"}});
    CHECK(execution_match(pred, gold, t)); // both select the bag {7}

    auto miss = sketch(1, aggregator::none, {{1, cond_op::gt, "100"}});
    CHECK_FALSE(execution_match(miss, gold, t));
}

TEST_CASE("execution match treats shared empty aggregates as agreement") {
    auto t = fixture_table();
    auto pred = sketch(1, aggregator::max, {{0, cond_op::eq, "nobody"}});
    auto gold = sketch(1, aggregator::sum, {{0, cond_op::eq, "ghost"}});
    CHECK(execution_match(pred, gold, t));

    auto fine = sketch(1, aggregator::max, {});
    CHECK_FALSE(execution_match(pred, fine, t));
    CHECK_FALSE(execution_match(fine, gold, t));

    // structurally invalid prediction scores as a miss, not a crash
    auto broken = sketch(9, aggregator::none, {});
    CHECK_FALSE(execution_match(broken, fine, t));
}

TEST_CASE("component matching compares multisets per slot") {
    auto gold = sketch(0, aggregator::count,
                       {{0, cond_op::eq, "ada"}, {1, cond_op::gt, "5"}});

    auto all = component_match(gold, gold);
    for (bool ok : all) CHECK(ok);

    auto reordered = sketch(0, aggregator::count,
                            {{1, cond_op::gt, "5"}, {0, cond_op::eq, "ada"}});
    auto comps = component_match(reordered, gold);
    for (bool ok : comps) CHECK(ok);

    auto wrong_sel = sketch(1, aggregator::count, gold.conds);
    comps = component_match(wrong_sel, gold);
    CHECK_FALSE(comps[int(component::sel_col)]);
    CHECK(comps[int(component::agg)]);
    CHECK(comps[int(component::where_cols)]);

    auto fewer = sketch(0, aggregator::count, {{0, cond_op::eq, "ada"}});
    comps = component_match(fewer, gold);
    CHECK_FALSE(comps[int(component::where_cols)]);
    CHECK_FALSE(comps[int(component::where_cond_count)]);

    auto value_swap = sketch(0, aggregator::count,
                             {{0, cond_op::eq, "bo"}, {1, cond_op::gt, "5"}});
    comps = component_match(value_swap, gold);
    CHECK(comps[int(component::where_cols)]);
    CHECK_FALSE(comps[int(component::where_values)]);
    CHECK(comps[int(component::where_cond_count)]);
}

TEST_CASE("error categories assign by first match") {
    auto gold = sketch(0, aggregator::count,
                       {{1, cond_op::gt, "5"}, {0, cond_op::eq, "ada"}});

    // gold has conds, prediction has none
    CHECK(categorize_error(sketch(0, aggregator::count, {}), gold) ==
          error_category::missing_where);
    // sel correct, agg wrong
    CHECK(categorize_error(sketch(0, aggregator::sum, gold.conds), gold) ==
          error_category::component_interdependency);
    // sel swapped with a gold where column
    CHECK(categorize_error(sketch(1, aggregator::count, gold.conds), gold) ==
          error_category::integration);
    // swap detected through the prediction's where columns too
    auto pred_side = sketch(2, aggregator::count, {{0, cond_op::eq, "ada"}});
    auto gold_side = sketch(0, aggregator::count, {{1, cond_op::gt, "5"}});
    CHECK(categorize_error(pred_side, gold_side) == error_category::integration);

    CHECK(categorize_error(
              sketch(0, aggregator::count, {{1, cond_op::gt, "5"}, {1, cond_op::eq, "ada"}}),
              gold) == error_category::wrong_column);
    CHECK(categorize_error(
              sketch(0, aggregator::count, {{1, cond_op::gt, "7"}, {0, cond_op::eq, "ada"}}),
              gold) == error_category::wrong_value);
    CHECK(categorize_error(
              sketch(0, aggregator::count, {{1, cond_op::lt, "5"}, {0, cond_op::eq, "ada"}}),
              gold) == error_category::wrong_op);

    // sel differs, no slot swap, everything else matches
    auto other_gold = sketch(0, aggregator::none, {{1, cond_op::gt, "5"}});
    CHECK(categorize_error(sketch(2, aggregator::none, {{1, cond_op::gt, "5"}}), other_gold) ==
          error_category::other);

    // missing-where outranks everything that follows it
    CHECK(categorize_error(sketch(1, aggregator::sum, {}), gold) ==
          error_category::missing_where);
}

TEST_CASE("evaluate validates its inputs") {
    table_map tables;
    tables["t1"] = fixture_table();
    auto gold = wrap(sketch(0, aggregator::none, {}));
    CHECK_THROWS_AS(evaluate({gold}, {}, tables), validation_error);

    auto stray = gold;
    stray.table_id = "ghost";
    CHECK_THROWS_AS(evaluate({stray}, {stray.gold}, tables), validation_error);
}

TEST_CASE("evaluate computes the hand-counted accuracies") {
    table_map tables;
    tables["t1"] = fixture_table();

    std::vector<example> gold;
    std::vector<query_sketch> preds;
    for (int i = 0; i < 10; ++i) {
        auto g = sketch(0, aggregator::none, {{0, cond_op::eq, "ada"}});
        gold.push_back(wrap(g));
        auto p = g;
        if (i < 3) p.conds[0].value = "bo"; // three wrong values
        preds.push_back(p);
    }
    auto report = evaluate(gold, preds, tables);
    CHECK(report.all.count == 10);
    CHECK(report.all.lf_accuracy() == Catch::Approx(0.7));
    CHECK(report.all.component_accuracy(component::where_values) == Catch::Approx(0.7));
    CHECK(report.all.component_accuracy(component::sel_col) == Catch::Approx(1.0));
    CHECK(report.all.errors[int(error_category::wrong_value)] == 3);
    REQUIRE(report.example_errors.size() == 10);
    CHECK(report.example_errors[0] == int(error_category::wrong_value));
    CHECK(report.example_errors[9] == -1);

    // sel differs in 2 of 10
    preds = {};
    gold.clear();
    for (int i = 0; i < 10; ++i) {
        auto g = sketch(0, aggregator::count, {{1, cond_op::gt, "4"}});
        gold.push_back(wrap(g));
        auto p = g;
        if (i < 2) p.sel = 1;
        preds.push_back(p);
    }
    report = evaluate(gold, preds, tables);
    CHECK(report.all.component_accuracy(component::sel_col) == Catch::Approx(0.8));
    CHECK(report.all.component_accuracy(component::agg) == Catch::Approx(1.0));
    CHECK(report.all.component_accuracy(component::where_cols) == Catch::Approx(1.0));
    CHECK(report.all.lf_accuracy() == Catch::Approx(0.8));
    // COUNT ignores the select column, so execution still agrees
    CHECK(report.all.exec_accuracy() == Catch::Approx(1.0));
}

TEST_CASE("evaluate slices by the gold sketch's operators") {
    table_map tables;
    tables["t1"] = fixture_table();
    std::vector<example> gold;
    std::vector<query_sketch> preds;
    for (int i = 0; i < 6; ++i) {
        auto g = i % 3 == 0 ? sketch(1, aggregator::none, {{1, cond_op::gt, "4"}})
                            : sketch(0, aggregator::none, {{0, cond_op::eq, "ada"}});
        gold.push_back(wrap(g));
        preds.push_back(g);
    }
    auto report = evaluate(gold, preds, tables);
    CHECK(report.all.count == 6);
    CHECK(report.domain_specific.count == 2);
    CHECK(report.normal.count == 4);
    CHECK(report.domain_specific.lf_accuracy() == Catch::Approx(1.0));
}

TEST_CASE("metric invariants hold on randomized prediction sets") {
    std::mt19937_64 g(404);
    for (int round = 0; round < 60; ++round) {
        auto t = oracle::random_small_table(g);
        t.schema.table_id = "t1";
        table_map tables;
        tables["t1"] = t;

        std::uniform_int_distribution<size_t> n_pairs(1, 12);
        std::vector<example> gold;
        std::vector<query_sketch> preds;
        size_t n = n_pairs(g);
        for (size_t i = 0; i < n; ++i) {
            auto ge = wrap(oracle::random_sketch_for(g, t));
            ge.table_id = "t1";
            gold.push_back(ge);
            preds.push_back(g() % 3 == 0 ? ge.gold : oracle::random_sketch_for(g, t));
        }
        auto report = evaluate(gold, preds, tables);

        // full structural match implies every component matches
        for (int c = 0; c < num_components; ++c)
            REQUIRE(report.all.lf_accuracy() <=
                    report.all.component_accuracy(component(c)) + 1e-12);

        // logical correctness implies execution correctness
        REQUIRE(report.all.lf_correct <= report.all.exec_correct);

        // error counts cover exactly the logically incorrect examples
        size_t errs = 0;
        for (auto e : report.all.errors) errs += e;
        REQUIRE(errs == report.all.count - report.all.lf_correct);

        // slices add up
        REQUIRE(report.all.count == report.domain_specific.count + report.normal.count);
        REQUIRE(report.all.lf_correct ==
                report.domain_specific.lf_correct + report.normal.lf_correct);

        // permutation invariance
        std::vector<size_t> order(n);
        for (size_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), g);
        std::vector<example> gold2;
        std::vector<query_sketch> preds2;
        for (size_t i : order) {
            gold2.push_back(gold[i]);
            preds2.push_back(preds[i]);
        }
        auto report2 = evaluate(gold2, preds2, tables);
        REQUIRE(report.all.lf_correct == report2.all.lf_correct);
        REQUIRE(report.all.exec_correct == report2.all.exec_correct);
        REQUIRE(report.all.component_correct == report2.all.component_correct);
        REQUIRE(report.all.errors == report2.all.errors);
    }
}
