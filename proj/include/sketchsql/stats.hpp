#pragma once

#include <array>
#include <map>
#include <sstream>

#include "sketchsql/balance.hpp"
#include "sketchsql/sqlexec.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

struct dataset_stats {
    std::map<std::string, size_t> split_counts;
    std::map<size_t, size_t> question_len_hist; // question token count
    std::map<size_t, size_t> sql_len_hist;      // rendered SQL token count
    std::array<size_t, num_aggregators> agg_hist{};
    std::array<size_t, max_conditions + 1> cond_count_hist{};
    std::array<size_t, num_cond_ops> op_hist{};
    size_t example_count = 0;
    size_t domain_specific_count = 0;
    double domain_specific_fraction = 0.0;
};

inline size_t whitespace_token_count(const std::string& s) {
    std::istringstream in(s);
    std::string tok;
    size_t n = 0;
    while (in >> tok) ++n;
    return n;
}

inline dataset_stats compute_stats(const dataset& ds) {
    dataset_stats st;
    st.example_count = ds.examples.size();
    for (const example& ex : ds.examples) {
        ++st.split_counts[split_name(ex.split)];
        ++st.question_len_hist[ex.question_tokens.size()];
        ++st.sql_len_hist[whitespace_token_count(render_sql(ex.gold, ds.table_for(ex).schema))];
        ++st.agg_hist[size_t(ex.gold.agg)];
        ++st.cond_count_hist[std::min(ex.gold.conds.size(), max_conditions)];
        for (const condition& c : ex.gold.conds) ++st.op_hist[size_t(c.op)];
        if (is_domain_specific(ex)) ++st.domain_specific_count;
    }
    st.domain_specific_fraction =
        st.example_count == 0 ? 0.0 : double(st.domain_specific_count) / double(st.example_count);
    return st;
}

} // namespace sketchsql
