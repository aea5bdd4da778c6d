#include <catch_amalgamated.hpp>

#include <json.hpp>

#include "sketchsql/dataset.hpp"
#include "sketchsql/stats.hpp"
#include "sketchsql/synth.hpp"
#include "tmpdir.hpp"

using namespace sketchsql;

namespace {

const char* fixture_tables =
    R"({"id": "t1", "header": ["name", "goals"], "types": ["text", "real"], "rows": [["ada", "3"], ["bo", "7"], ["cy", "5"]]})"
    "\n";

const char* fixture_example =
    R"({"question": "how many players scored more than 5", "table_id": "t1", "sql": {"sel": 0, "agg": 3, "conds": [[1, 1, 5]]}})"
    "\n";

} // namespace

TEST_CASE("one-line fixture loads and round-trips") {
    testutil::tmpdir tmp("sketchsql_dataset_fixture");
    auto ex_path = tmp.write("train.jsonl", fixture_example);
    auto tb_path = tmp.write("tables.jsonl", fixture_tables);

    auto ds = load_dataset(ex_path, tb_path, split_tag::train);
    REQUIRE(ds.examples.size() == 1);
    const auto& ex = ds.examples[0];
    CHECK(ex.question_raw == "how many players scored more than 5");
    CHECK(ex.question_tokens ==
          std::vector<std::string>{"how", "many", "players", "scored", "more", "than", "5"});
    CHECK(ex.table_id == "t1");
    CHECK(ex.gold.sel == 0);
    CHECK(ex.gold.agg == aggregator::count);
    REQUIRE(ex.gold.conds.size() == 1);
    CHECK(ex.gold.conds[0] == condition{1, cond_op::gt, "5"});
    CHECK(ex.split == split_tag::train);

    const auto& t = ds.tables.at("t1");
    CHECK(t.schema.headers == std::vector<std::string>{"name", "goals"});
    CHECK(t.schema.col_types ==
          std::vector<column_type>{column_type::text, column_type::real});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[1] == std::vector<std::string>{"bo", "7"});

    auto rec = example_to_record(ex);
    CHECK(parse_example_record(rec, split_tag::train) == ex);
}

TEST_CASE("empty files load as an empty dataset") {
    testutil::tmpdir tmp("sketchsql_dataset_empty");
    auto ds = load_dataset(tmp.write("e.jsonl", ""), tmp.write("t.jsonl", ""), split_tag::dev);
    CHECK(ds.examples.empty());
    CHECK(ds.tables.empty());
}

TEST_CASE("numeric condition values keep their printed form") {
    testutil::tmpdir tmp("sketchsql_dataset_numfmt");
    std::string lines =
        R"({"question": "q one", "table_id": "t1", "sql": {"sel": 1, "agg": 0, "conds": [[1, 0, 5.0]]}})"
        "\n"
        R"({"question": "q two", "table_id": "t1", "sql": {"sel": 1, "agg": 0, "conds": [[1, 0, "5"]]}})"
        "\n";
    auto ds = load_dataset(tmp.write("e.jsonl", lines), tmp.write("t.jsonl", fixture_tables),
                           split_tag::train);
    REQUIRE(ds.examples.size() == 2);
    CHECK(ds.examples[0].gold.conds[0].value == "5.0");
    CHECK(ds.examples[1].gold.conds[0].value == "5");
}

TEST_CASE("malformed lines fail naming file and line") {
    testutil::tmpdir tmp("sketchsql_dataset_malformed");
    auto tb_path = tmp.write("t.jsonl", fixture_tables);
    auto ex_path = tmp.write("e.jsonl", std::string(fixture_example) + "{oops\n");
    try {
        load_dataset(ex_path, tb_path, split_tag::train);
        FAIL("expected load_error");
    } catch (const load_error& e) {
        std::string msg = e.what();
        CHECK(msg.find(ex_path) != std::string::npos);
        CHECK(msg.find(":2") != std::string::npos);
    }

    auto bad_tb = tmp.write("bad_tables.jsonl", "not json\n");
    try {
        load_tables(bad_tb);
        FAIL("expected load_error");
    } catch (const load_error& e) {
        std::string msg = e.what();
        CHECK(msg.find(bad_tb) != std::string::npos);
        CHECK(msg.find(":1") != std::string::npos);
    }
}

TEST_CASE("structural validation rejects bad records") {
    testutil::tmpdir tmp("sketchsql_dataset_invalid");
    auto tb_path = tmp.write("t.jsonl", fixture_tables);

    auto expect_reject = [&](const std::string& name, const std::string& line) {
        auto p = tmp.write(name, line + "\n");
        CHECK_THROWS_AS(load_dataset(p, tb_path, split_tag::train), std::runtime_error);
    };

    // unknown table, naming the example
    auto unknown = tmp.write(
        "unknown.jsonl",
        R"({"question": "q", "table_id": "ghost", "sql": {"sel": 0, "agg": 0, "conds": []}})"
        "\n");
    try {
        load_dataset(unknown, tb_path, split_tag::train);
        FAIL("expected error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }

    expect_reject("sel_range.jsonl",
                  R"({"question": "q", "table_id": "t1", "sql": {"sel": 9, "agg": 0, "conds": []}})");
    expect_reject("cond_range.jsonl",
                  R"({"question": "q", "table_id": "t1", "sql": {"sel": 0, "agg": 0, "conds": [[7, 0, "x"]]}})");
    expect_reject("agg_range.jsonl",
                  R"({"question": "q", "table_id": "t1", "sql": {"sel": 0, "agg": 9, "conds": []}})");
    expect_reject("op_range.jsonl",
                  R"({"question": "q", "table_id": "t1", "sql": {"sel": 0, "agg": 0, "conds": [[1, 7, "x"]]}})");
    expect_reject("five_conds.jsonl",
                  R"({"question": "q", "table_id": "t1", "sql": {"sel": 0, "agg": 0, "conds": [[1, 0, "1"], [1, 0, "2"], [1, 0, "3"], [1, 0, "4"], [1, 0, "5"]]}})");

    auto dup = tmp.write("dup_tables.jsonl", std::string(fixture_tables) + fixture_tables);
    CHECK_THROWS_AS(load_tables(dup), std::runtime_error);

    auto ragged = tmp.write(
        "ragged.jsonl",
        R"({"id": "t2", "header": ["a", "b"], "types": ["text", "real"], "rows": [["x"]]})"
        "\n");
    CHECK_THROWS_AS(load_tables(ragged), std::runtime_error);
}

TEST_CASE("load preserves order and counts lines") {
    testutil::tmpdir tmp("sketchsql_dataset_order");
    std::string lines;
    for (int i = 0; i < 5; ++i)
        lines += R"({"question": "q number )" + std::to_string(i) +
                 R"(", "table_id": "t1", "sql": {"sel": 0, "agg": 0, "conds": []}})" + "\n";
    auto ds = load_dataset(tmp.write("e.jsonl", lines), tmp.write("t.jsonl", fixture_tables),
                           split_tag::test);
    REQUIRE(ds.examples.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(ds.examples[i].question_raw == "q number " + std::to_string(i));
        CHECK(ds.examples[i].split == split_tag::test);
    }
}

TEST_CASE("examples round-trip through the record format") {
    auto ds = synthesize(synth_config{});
    for (size_t i = 0; i < ds.examples.size(); i += 37) {
        auto rec = example_to_record(ds.examples[i]);
        CHECK(parse_example_record(rec, ds.examples[i].split) == ds.examples[i]);
    }
    for (const auto& [id, t] : ds.tables) {
        auto rec = table_to_record(t);
        auto back = parse_table_record(rec);
        CHECK(back.schema.table_id == t.schema.table_id);
        CHECK(back.schema.headers == t.schema.headers);
        CHECK(back.rows == t.rows);
    }
}

TEST_CASE("compute_stats on an empty dataset is all zeros") {
    dataset ds;
    auto s = compute_stats(ds);
    CHECK(s.example_count == 0);
    CHECK(s.domain_specific_count == 0);
    CHECK(s.domain_specific_fraction == 0.0);
    for (auto v : s.agg_hist) CHECK(v == 0);
    for (auto v : s.cond_count_hist) CHECK(v == 0);
}

TEST_CASE("compute_stats counts the three-example fixture by hand") {
    testutil::tmpdir tmp("sketchsql_dataset_stats");
    std::string lines =
        R"({"question": "how many players scored more than 5", "table_id": "t1", "sql": {"sel": 0, "agg": 3, "conds": [[1, 1, 5]]}})"
        "\n"
        R"({"question": "who is ada", "table_id": "t1", "sql": {"sel": 0, "agg": 0, "conds": [[0, 0, "ada"]]}})"
        "\n"
        R"({"question": "goals for ada under 9", "table_id": "t1", "sql": {"sel": 1, "agg": 5, "conds": [[0, 0, "ada"], [1, 2, 9]]}})"
        "\n";
    auto ds = load_dataset(tmp.write("e.jsonl", lines), tmp.write("t.jsonl", fixture_tables),
                           split_tag::train);
    auto s = compute_stats(ds);
    CHECK(s.example_count == 3);
    CHECK(s.cond_count_hist[0] == 0);
    CHECK(s.cond_count_hist[1] == 2);
    CHECK(s.cond_count_hist[2] == 1);
    CHECK(s.agg_hist[int(aggregator::count)] == 1);
    CHECK(s.agg_hist[int(aggregator::none)] == 1);
    CHECK(s.agg_hist[int(aggregator::avg)] == 1);
    CHECK(s.op_hist[int(cond_op::eq)] == 2);
    CHECK(s.op_hist[int(cond_op::gt)] == 1);
    CHECK(s.op_hist[int(cond_op::lt)] == 1);
    CHECK(s.domain_specific_count == 2);
    CHECK(s.domain_specific_fraction == Catch::Approx(2.0 / 3.0));
    CHECK(s.split_counts.at("train") == 3);
}

TEST_CASE("compute_stats histograms sum to the example count and rerun identically") {
    auto ds = synthesize(synth_config{});
    auto s1 = compute_stats(ds);
    auto s2 = compute_stats(ds);

    size_t agg_total = 0, cond_total = 0;
    for (auto v : s1.agg_hist) agg_total += v;
    for (auto v : s1.cond_count_hist) cond_total += v;
    CHECK(agg_total == s1.example_count);
    CHECK(cond_total == s1.example_count);

    size_t qlen_total = 0;
    for (const auto& [k, v] : s1.question_len_hist) qlen_total += v;
    CHECK(qlen_total == s1.example_count);

    CHECK(s1.example_count == ds.examples.size());
    CHECK(s1.agg_hist == s2.agg_hist);
    CHECK(s1.question_len_hist == s2.question_len_hist);
    CHECK(s1.sql_len_hist == s2.sql_len_hist);
    CHECK(s1.domain_specific_count == s2.domain_specific_count);
}

TEST_CASE("every gold sketch in a validated dataset is in range") {
    auto ds = synthesize(synth_config{});
    for (const auto& ex : ds.examples) {
        const auto& t = ds.table_for(ex);
        REQUIRE(ex.gold.sel < t.schema.column_count());
        REQUIRE(ex.gold.conds.size() <= max_conditions);
        for (const auto& c : ex.gold.conds) REQUIRE(c.col < t.schema.column_count());
        REQUIRE(int(ex.gold.agg) < num_aggregators);
    }
}
