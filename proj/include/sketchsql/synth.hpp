#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sketchsql/rng.hpp"
#include "sketchsql/text.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

// Seeded generator for a small corpus in the dataset's format: one flat table
// per id, questions phrased from templates, gold sketches built against the
// sampled rows so conditions always refer to real cells.
struct synth_config {
    uint64_t seed = 0;
    size_t table_count = 12;
    size_t train_examples = 2000;
    size_t dev_examples = 300;
    size_t test_examples = 600;
    double domain_fraction = 0.12;
};

namespace detail {

inline const std::vector<std::string>& entity_pool() {
    static const std::vector<std::string> pool = {
        "arsenal", "barton",  "calder",  "dalton",  "everett", "fisher",  "granger", "holden",
        "iverson", "jensen",  "keller",  "landon",  "mercer",  "norwood", "osman",   "porter",
        "quimby",  "rosales", "sutton",  "tanner",  "vance",   "walker",  "xavier",  "yates",
        "zimmer",  "abbott",  "bennett", "cortez",  "dawson",  "ellison", "fleming", "gibson",
        "harmon",  "ingram",  "jarvis",  "kendall", "lawson",  "mathis",  "newton",  "ortega"};
    return pool;
}

inline const std::vector<std::string>& entity_col_names() {
    static const std::vector<std::string> names = {"player", "team", "driver", "school", "club"};
    return names;
}

struct attr_domain {
    std::string name;
    std::vector<std::string> values;
};

inline const std::vector<attr_domain>& attr_domains() {
    static const std::vector<attr_domain> domains = {
        {"position", {"guard", "forward", "center", "keeper", "striker", "defender"}},
        {"country", {"spain", "france", "italy", "germany", "brazil", "japan"}},
        {"league", {"north", "south", "east", "west", "central"}},
        {"state", {"ohio", "texas", "utah", "maine", "oregon", "nevada"}},
    };
    return domains;
}

inline const std::vector<std::string>& real_col_names() {
    static const std::vector<std::string> names = {"points", "goals", "wins",  "laps",
                                                   "assists", "score", "age",  "rank"};
    return names;
}

inline const std::vector<std::string>& gt_phrases() {
    static const std::vector<std::string> p = {"more than", "bigger than", "larger than"};
    return p;
}

inline const std::vector<std::string>& lt_phrases() {
    static const std::vector<std::string> p = {"less than", "smaller than"};
    return p;
}

inline table make_synth_table(size_t idx, rng& gen) {
    table t;
    t.schema.table_id = "synth_" + std::to_string(idx);
    const auto& attrs = attr_domains();
    const auto& reals = real_col_names();
    size_t attr_i = gen.index(attrs.size());
    size_t r1 = gen.index(reals.size());
    size_t r2 = gen.index(reals.size() - 1);
    if (r2 >= r1) ++r2;
    t.schema.headers = {entity_col_names()[gen.index(entity_col_names().size())],
                        attrs[attr_i].name, reals[r1], reals[r2]};
    t.schema.col_types = {column_type::text, column_type::text, column_type::real,
                          column_type::real};

    size_t n_rows = size_t(gen.range(8, 14));
    auto ents = gen.sample_without_replacement(entity_pool().size(), n_rows);
    for (size_t r = 0; r < n_rows; ++r) {
        std::vector<std::string> row(4);
        row[0] = entity_pool()[ents[r]];
        row[1] = attrs[attr_i].values[gen.index(attrs[attr_i].values.size())];
        row[2] = std::to_string(gen.range(10, 60));
        row[3] = std::to_string(gen.range(10, 60));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline example make_synth_example(const table& t, bool domain, rng& gen, split_tag split) {
    const auto& h = t.schema.headers;
    size_t row = gen.index(t.rows.size());
    const auto& cells = t.rows[row];
    size_t rcol = 2 + gen.index(2);

    example ex;
    ex.table_id = t.schema.table_id;
    ex.split = split;

    auto q = [&](std::initializer_list<std::string> words) {
        std::string out;
        for (const auto& w : words) {
            if (!out.empty()) out += " ";
            out += w;
        }
        ex.question_raw = out;
        ex.question_tokens = normalize_question(out);
    };

    if (!domain) {
        switch (gen.index(10)) {
            case 0:
                q({"what is the", h[rcol], "of", cells[0]});
                ex.gold = {rcol, aggregator::none, {{0, cond_op::eq, cells[0]}}};
                break;
            case 1:
                q({"which", h[0], "has", h[1], cells[1]});
                ex.gold = {0, aggregator::none, {{1, cond_op::eq, cells[1]}}};
                break;
            case 2:
                q({"what is the total", h[rcol], "with", h[1], cells[1]});
                ex.gold = {rcol, aggregator::sum, {{1, cond_op::eq, cells[1]}}};
                break;
            case 3:
                q({"what is the highest", h[rcol], "with", h[1], cells[1]});
                ex.gold = {rcol, aggregator::max, {{1, cond_op::eq, cells[1]}}};
                break;
            case 4:
                q({"what is the lowest", h[rcol], "for", h[1], cells[1]});
                ex.gold = {rcol, aggregator::min, {{1, cond_op::eq, cells[1]}}};
                break;
            case 5:
                q({"what is the average", h[rcol], "with", h[1], cells[1]});
                ex.gold = {rcol, aggregator::avg, {{1, cond_op::eq, cells[1]}}};
                break;
            case 6:
                q({"how many", h[0], "rows have", h[1], cells[1]});
                ex.gold = {0, aggregator::count, {{1, cond_op::eq, cells[1]}}};
                break;
            case 7:
                q({"which", h[0], "scored", cells[rcol], h[rcol]});
                ex.gold = {0, aggregator::none, {{rcol, cond_op::eq, cells[rcol]}}};
                break;
            case 8:
                q({"what", h[1], "does", cells[0], "have"});
                ex.gold = {1, aggregator::none, {{0, cond_op::eq, cells[0]}}};
                break;
            default:
                q({"what is the", h[rcol], "of", cells[0], "with", h[1], cells[1]});
                ex.gold = {rcol,
                           aggregator::none,
                           {{0, cond_op::eq, cells[0]}, {1, cond_op::eq, cells[1]}}};
                break;
        }
        return ex;
    }

    bool greater = gen.chance(0.5);
    cond_op op = greater ? cond_op::gt : cond_op::lt;
    const auto& phrases = greater ? gt_phrases() : lt_phrases();
    std::string phrase = phrases[gen.index(phrases.size())];
    long long anchor = std::stoll(cells[rcol]);
    std::string num = std::to_string(greater ? anchor - 1 : anchor + 1);

    switch (gen.index(5)) {
        case 0:
            q({"which", h[0], "scored", phrase, num, h[rcol]});
            ex.gold = {0, aggregator::none, {{rcol, op, num}}};
            break;
        case 1:
            q({"count the", h[0], "rows with", phrase, num, h[rcol]});
            ex.gold = {0, aggregator::count, {{rcol, op, num}}};
            break;
        case 2:
            q({"how many", h[0], "rows have", phrase, num, h[rcol]});
            ex.gold = {0, aggregator::count, {{rcol, op, num}}};
            break;
        case 3:
            q({"which", h[0], "has", h[1], cells[1], "and", phrase, num, h[rcol]});
            ex.gold = {0, aggregator::none, {{1, cond_op::eq, cells[1]}, {rcol, op, num}}};
            break;
        default: {
            size_t other = rcol == 2 ? 3 : 2;
            q({"what is the average", h[other], "of rows with", phrase, num, h[rcol]});
            ex.gold = {other, aggregator::avg, {{rcol, op, num}}};
            break;
        }
    }
    return ex;
}

} // namespace detail

inline dataset synthesize(const synth_config& config) {
    dataset ds;
    auto table_gen = rng::for_stage(config.seed, "synth-tables");
    std::vector<const table*> ordered;
    for (size_t i = 0; i < config.table_count; ++i) {
        table t = detail::make_synth_table(i, table_gen);
        ordered.push_back(&(ds.tables[t.schema.table_id] = std::move(t)));
    }

    struct split_plan {
        split_tag tag;
        size_t count;
        const char* stage;
    };
    const split_plan plans[] = {{split_tag::train, config.train_examples, "synth-train"},
                                {split_tag::dev, config.dev_examples, "synth-dev"},
                                {split_tag::test, config.test_examples, "synth-test"}};
    for (const auto& plan : plans) {
        auto gen = rng::for_stage(config.seed, plan.stage);
        for (size_t i = 0; i < plan.count; ++i) {
            const table& t = *ordered[gen.index(ordered.size())];
            bool domain = gen.chance(config.domain_fraction);
            ds.examples.push_back(detail::make_synth_example(t, domain, gen, plan.tag));
        }
    }
    return ds;
}

// Arbitrary valid sketch against a table, for differential testing. Values
// mix real cells with numbers and words that may not appear in the table.
inline query_sketch random_sketch(rng& gen, const table& t) {
    query_sketch s;
    size_t cols = t.schema.column_count();
    s.sel = gen.index(cols);
    s.agg = aggregator(gen.index(num_aggregators));
    size_t n_conds = gen.index(max_conditions + 1);
    for (size_t i = 0; i < n_conds; ++i) {
        condition c;
        c.col = gen.index(cols);
        c.op = cond_op(gen.index(num_cond_ops));
        switch (gen.index(4)) {
            case 0: c.value = t.rows[gen.index(t.rows.size())][c.col]; break;
            case 1: c.value = std::to_string(gen.range(-5, 70)); break;
            case 2: c.value = format_number(double(gen.range(5, 600)) / 10.0); break;
            default: c.value = detail::entity_pool()[gen.index(detail::entity_pool().size())]; break;
        }
        s.conds.push_back(std::move(c));
    }
    return s;
}

} // namespace sketchsql
