#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sketchsql/balance.hpp"
#include "sketchsql/errors.hpp"
#include "sketchsql/features.hpp"
#include "sketchsql/linear.hpp"
#include "sketchsql/rng.hpp"
#include "sketchsql/sqlexec.hpp"
#include "sketchsql/text.hpp"
#include "sketchsql/types.hpp"

namespace sketchsql {

// ---- schema linking ----

enum class link_kind : uint8_t { exact = 0, partial = 1 };

struct link_span {
    size_t start = 0;
    size_t len = 0;
    size_t col = 0;
    link_kind kind = link_kind::exact;
};

constexpr size_t max_link_ngram = 6;

inline std::vector<std::vector<std::string>> normalized_headers(const table_schema& schema) {
    std::vector<std::vector<std::string>> out;
    out.reserve(schema.headers.size());
    for (const auto& h : schema.headers) out.push_back(normalize_question(h));
    return out;
}

// Longest n-grams claim tokens first; a claimed token is unavailable to
// shorter spans. Equal-length ties go to the lower column index, with exact
// matches preferred over partial ones.
inline std::vector<link_span> link_schema(const std::vector<std::string>& tokens,
                                          const table_schema& schema) {
    auto headers = normalized_headers(schema);
    std::vector<std::set<std::string>> header_sets(headers.size());
    for (size_t j = 0; j < headers.size(); ++j)
        header_sets[j] = std::set<std::string>(headers[j].begin(), headers[j].end());

    std::vector<bool> claimed(tokens.size(), false);
    std::vector<link_span> spans;
    for (size_t n = std::min(max_link_ngram, tokens.size()); n >= 1; --n) {
        for (size_t start = 0; start + n <= tokens.size(); ++start) {
            bool free = true;
            for (size_t i = start; i < start + n; ++i)
                if (claimed[i]) { free = false; break; }
            if (!free) continue;

            std::optional<size_t> exact_col, partial_col;
            for (size_t j = 0; j < headers.size(); ++j) {
                if (headers[j].size() == n &&
                    std::equal(headers[j].begin(), headers[j].end(), tokens.begin() + start)) {
                    if (!exact_col) exact_col = j;
                    continue;
                }
                if (n < headers[j].size()) {
                    bool subset = true;
                    for (size_t i = start; i < start + n; ++i)
                        if (!header_sets[j].count(tokens[i])) { subset = false; break; }
                    if (subset && !partial_col) partial_col = j;
                }
            }
            if (!exact_col && !partial_col) continue;
            link_span span;
            span.start = start;
            span.len = n;
            span.col = exact_col ? *exact_col : *partial_col;
            span.kind = exact_col ? link_kind::exact : link_kind::partial;
            spans.push_back(span);
            for (size_t i = start; i < start + n; ++i) claimed[i] = true;
        }
        if (n == 1) break;
    }
    std::sort(spans.begin(), spans.end(),
              [](const link_span& a, const link_span& b) { return a.start < b.start; });
    return spans;
}

// ---- condition candidates ----

constexpr size_t value_search_window = 3;

struct cond_candidate {
    condition cond;
    size_t value_pos = 0;
    size_t value_len = 1;
    bool from_cell = true;
    bool phrase_in_window = false;
    cond_op phrase_op = cond_op::eq;
    std::string phrase;
};

namespace detail {

struct phrase_hit {
    size_t start = 0;
    size_t len = 0;
    cond_op op = cond_op::eq;
    std::string phrase;
};

inline std::vector<phrase_hit> find_phrases(const std::vector<std::string>& tokens,
                                            const phrase_lexicon& lexicon) {
    std::vector<phrase_hit> hits;
    for (const auto& [phrase, op] : lexicon) {
        auto ptoks = normalize_question(phrase);
        if (ptoks.empty() || ptoks.size() > tokens.size()) continue;
        for (size_t start = 0; start + ptoks.size() <= tokens.size(); ++start) {
            if (std::equal(ptoks.begin(), ptoks.end(), tokens.begin() + start))
                hits.push_back({start, ptoks.size(), op, phrase});
        }
    }
    std::sort(hits.begin(), hits.end(), [](const phrase_hit& a, const phrase_hit& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.len != b.len) return a.len > b.len;
        return a.phrase < b.phrase;
    });
    return hits;
}

// phrase ending at `end` (exclusive) covers value positions end .. end+window-1
inline const phrase_hit* phrase_before(const std::vector<phrase_hit>& hits, size_t value_pos) {
    const phrase_hit* best = nullptr;
    for (const auto& h : hits) {
        size_t end = h.start + h.len;
        if (end <= value_pos && value_pos < end + value_search_window)
            if (!best || end > best->start + best->len) best = &h;
    }
    return best;
}

} // namespace detail

// Cell-value matches become EQ candidates; a lexicon phrase with a number in
// the following window becomes a comparison candidate on the closest REAL
// column. Candidates carry their source so op scoring can tell them apart.
inline std::vector<cond_candidate> extract_conditions(const std::vector<std::string>& tokens,
                                                      const table& t,
                                                      const std::vector<link_span>& links,
                                                      const phrase_lexicon& lexicon) {
    const auto& schema = t.schema;
    auto hits = detail::find_phrases(tokens, lexicon);
    std::vector<cond_candidate> cands;

    // per column: normalized cell text -> first original cell
    std::vector<std::map<std::string, std::string>> cell_keys(schema.column_count());
    std::vector<std::map<std::string, size_t>> cell_lens(schema.column_count());
    for (const auto& row : t.rows) {
        for (size_t j = 0; j < schema.column_count(); ++j) {
            auto ctoks = normalize_question(row[j]);
            if (ctoks.empty() || ctoks.size() > max_link_ngram) continue;
            auto key = join_tokens(ctoks, 0, ctoks.size());
            if (!cell_keys[j].count(key)) {
                cell_keys[j][key] = row[j];
                cell_lens[j][key] = ctoks.size();
            }
        }
    }

    for (size_t j = 0; j < schema.column_count(); ++j) {
        size_t pos = 0;
        while (pos < tokens.size()) {
            size_t best_len = 0;
            const std::string* best_cell = nullptr;
            size_t cap = std::min(max_link_ngram, tokens.size() - pos);
            for (size_t n = cap; n >= 1; --n) {
                auto key = join_tokens(tokens, pos, n);
                auto it = cell_keys[j].find(key);
                if (it != cell_keys[j].end()) {
                    best_len = n;
                    best_cell = &it->second;
                    break;
                }
                if (n == 1) break;
            }
            if (!best_cell) { ++pos; continue; }
            cond_candidate c;
            c.cond = condition{j, cond_op::eq, *best_cell};
            c.value_pos = pos;
            c.value_len = best_len;
            c.from_cell = true;
            if (const auto* h = detail::phrase_before(hits, pos)) {
                c.phrase_in_window = true;
                c.phrase_op = h->op;
                c.phrase = h->phrase;
            }
            cands.push_back(std::move(c));
            pos += best_len;
        }
    }

    // comparison candidates: phrase + number within the window
    std::vector<size_t> real_cols;
    for (size_t j = 0; j < schema.column_count(); ++j)
        if (schema.col_types[j] == column_type::real) real_cols.push_back(j);

    if (!real_cols.empty()) {
        for (const auto& h : hits) {
            size_t end = h.start + h.len;
            for (size_t p = end; p < std::min(tokens.size(), end + value_search_window); ++p) {
                if (!parse_number(tokens[p])) continue;
                // nearest linked REAL column, else the one sharing most name
                // tokens with the question, else the first REAL column
                std::optional<size_t> col;
                size_t best_dist = SIZE_MAX;
                for (const auto& span : links) {
                    if (schema.col_types[span.col] != column_type::real) continue;
                    size_t dist = span.start > p ? span.start - p : p - span.start;
                    if (dist < best_dist || (dist == best_dist && col && span.col < *col)) {
                        best_dist = dist;
                        col = span.col;
                    }
                }
                if (!col) {
                    std::set<std::string> qset(tokens.begin(), tokens.end());
                    auto headers = normalized_headers(schema);
                    size_t best_overlap = 0;
                    for (size_t j : real_cols) {
                        size_t overlap = 0;
                        for (const auto& w : headers[j]) overlap += qset.count(w);
                        if (overlap > best_overlap) {
                            best_overlap = overlap;
                            col = j;
                        }
                    }
                    if (!col) col = real_cols.front();
                }
                cond_candidate c;
                c.cond = condition{*col, h.op, tokens[p]};
                c.value_pos = p;
                c.value_len = 1;
                c.from_cell = false;
                c.phrase_in_window = true;
                c.phrase_op = h.op;
                c.phrase = h.phrase;
                cands.push_back(std::move(c));
                break;
            }
        }
    }

    // drop exact duplicates, keep the earliest occurrence
    std::set<std::string> seen;
    std::vector<cond_candidate> out;
    std::sort(cands.begin(), cands.end(), [](const cond_candidate& a, const cond_candidate& b) {
        if (a.value_pos != b.value_pos) return a.value_pos < b.value_pos;
        if (a.cond.col != b.cond.col) return a.cond.col < b.cond.col;
        if (a.cond.op != b.cond.op) return int(a.cond.op) < int(b.cond.op);
        return a.from_cell && !b.from_cell;
    });
    for (auto& c : cands) {
        std::string key = std::to_string(c.cond.col) + "|" + std::to_string(int(c.cond.op)) + "|" +
                          value_key(c.cond.value) + "|" + (c.from_cell ? "c" : "p") + "|" +
                          (c.phrase_in_window ? "1" : "0");
        if (seen.insert(std::move(key)).second) out.push_back(std::move(c));
    }
    return out;
}

// ---- features ----

namespace detail {

inline void add_unique_tokens(feature_vector& x, const std::vector<std::string>& tokens,
                              const std::string& prefix, const std::string& suffix = "") {
    std::set<std::string> uniq(tokens.begin(), tokens.end());
    for (const auto& t : uniq) x.add(prefix + t + suffix);
}

inline feature_vector sel_features(const std::vector<std::string>& tokens,
                                   const table_schema& schema,
                                   const std::vector<link_span>& links,
                                   const std::vector<cond_candidate>& cands,
                                   const std::vector<std::vector<std::string>>& headers,
                                   size_t col) {
    feature_vector x;
    std::string name = join_tokens(headers[col], 0, headers[col].size());
    std::string type = schema.col_types[col] == column_type::real ? "real" : "text";
    x.add("sel:bias");
    x.add("sel:col=" + name);
    x.add("sel:type=" + type);
    for (const auto& span : links) {
        if (span.col != col) continue;
        x.add(span.kind == link_kind::exact ? "sel:link=exact" : "sel:link=partial");
        break;
    }
    size_t overlap = 0;
    std::set<std::string> qset(tokens.begin(), tokens.end());
    std::set<std::string> nset(headers[col].begin(), headers[col].end());
    for (const auto& w : nset) overlap += qset.count(w);
    if (overlap > 0) {
        x.add("sel:overlap", float(overlap));
        x.add("sel:cover", float(overlap) / float(nset.size()));
    }
    for (const auto& c : cands) {
        if (c.cond.col != col) continue;
        x.add("sel:cellmatch");
        x.add("sel:cellmatch:col=" + name);
        break;
    }
    if (!tokens.empty()) x.add("sel:t0=" + tokens.front() + ":col=" + name);
    std::set<std::string> uniq(tokens.begin(), tokens.end());
    for (const auto& t : uniq) {
        x.add("sel:tok=" + t + ":col=" + name);
        x.add("sel:tok=" + t + ":type=" + type);
    }
    return x;
}

inline feature_vector agg_features(const std::vector<std::string>& tokens) {
    feature_vector x;
    x.add("agg:bias");
    if (!tokens.empty()) x.add("agg:t0=" + tokens.front());
    if (tokens.size() >= 2) x.add("agg:t01=" + tokens[0] + "_" + tokens[1]);
    add_unique_tokens(x, tokens, "agg:tok=");
    return x;
}

inline feature_vector op_features(const std::vector<std::string>& tokens,
                                  const table_schema& schema, const cond_candidate& c) {
    feature_vector x;
    bool numeric = parse_number(c.cond.value).has_value();
    x.add("op:bias");
    x.add(c.from_cell ? "op:src=cell" : "op:src=phrase");
    x.add(schema.col_types[c.cond.col] == column_type::real ? "op:ct=real" : "op:ct=text");
    x.add(numeric ? "op:num=1" : "op:num=0");
    // is the candidate column mentioned by name near the value?
    auto name_toks = normalize_question(schema.headers[c.cond.col]);
    bool near = false;
    size_t lo = c.value_pos > value_search_window ? c.value_pos - value_search_window : 0;
    size_t hi = std::min(tokens.size(), c.value_pos + c.value_len + value_search_window);
    for (size_t i = lo; i < hi && !near; ++i)
        for (const auto& w : name_toks)
            if (tokens[i] == w) { near = true; break; }
    x.add(near ? "op:cnear=1" : "op:cnear=0");
    x.add(std::string("op:cnear=") + (near ? "1" : "0") + ":num=" + (numeric ? "1" : "0"));
    if (c.phrase_in_window) {
        std::string ph = c.phrase;
        std::replace(ph.begin(), ph.end(), ' ', '_');
        x.add("op:phr=" + ph);
        x.add("op:phrop=" + std::to_string(int(c.phrase_op)));
    }
    for (size_t d = 1; d <= value_search_window; ++d) {
        if (d > c.value_pos) break;
        const auto& w = tokens[c.value_pos - d];
        x.add("op:w-" + std::to_string(d) + "=" + w);
        x.add("op:w=" + w);
    }
    size_t after = c.value_pos + c.value_len;
    x.add("op:w+1=" + (after < tokens.size() ? tokens[after] : std::string("</s>")));
    return x;
}

} // namespace detail

// ---- models ----

struct train_config {
    double learning_rate = 0.001;
    size_t batch_size = 32;
    size_t epochs = 1;
    uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// One linear scorer per slot: select column ranking, one-vs-rest aggregator
// classes, one-vs-rest condition operators. All share the hashed space.
struct slot_models {
    phrase_lexicon lexicon;
    linear_model sel;
    std::array<linear_model, num_aggregators> agg;
    std::array<linear_model, num_cond_ops> op;
    uint64_t seed = 0;
    train_config config;
};

namespace detail {

struct op_instance {
    feature_vector x;
    std::array<bool, num_cond_ops> allowed{};
    std::array<bool, num_cond_ops> label{};
};

struct featurized_example {
    std::vector<feature_vector> sel_x;
    size_t sel_gold = 0;
    feature_vector agg_x;
    int agg_gold = 0;
    std::vector<op_instance> ops;
};

inline featurized_example featurize(const example& ex, const table& t,
                                    const phrase_lexicon& lexicon) {
    const auto& tokens = ex.question_tokens;
    auto links = link_schema(tokens, t.schema);
    auto cands = extract_conditions(tokens, t, links, lexicon);
    auto headers = normalized_headers(t.schema);

    featurized_example f;
    f.sel_gold = ex.gold.sel;
    f.agg_gold = int(ex.gold.agg);
    f.sel_x.reserve(t.schema.column_count());
    for (size_t j = 0; j < t.schema.column_count(); ++j)
        f.sel_x.push_back(sel_features(tokens, t.schema, links, cands, headers, j));
    f.agg_x = agg_features(tokens);

    for (const auto& c : cands) {
        op_instance inst;
        inst.x = op_features(tokens, t.schema, c);
        inst.allowed[int(cond_op::eq)] = true;
        inst.allowed[int(cond_op::gt)] = c.phrase_in_window;
        inst.allowed[int(cond_op::lt)] = c.phrase_in_window;
        for (const auto& g : ex.gold.conds) {
            if (g.col != c.cond.col || value_key(g.value) != value_key(c.cond.value)) continue;
            if (inst.allowed[int(g.op)]) inst.label[int(g.op)] = true;
            break;
        }
        f.ops.push_back(std::move(inst));
    }
    return f;
}

inline void run_epochs(slot_models& models, const std::vector<featurized_example>& data,
                       const train_config& config, std::string_view shuffle_stage,
                       std::vector<double>* epoch_losses) {
    adam_config acfg{config.learning_rate, config.beta1, config.beta2, config.epsilon};
    adam_optimizer opt_sel(feature_hash_space, acfg);
    std::vector<adam_optimizer> opt_agg, opt_op;
    for (int k = 0; k < num_aggregators; ++k) opt_agg.emplace_back(feature_hash_space, acfg);
    for (int k = 0; k < num_cond_ops; ++k) opt_op.emplace_back(feature_hash_space, acfg);

    auto gen = rng::for_stage(config.seed, shuffle_stage);
    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    gradient_buffer g_sel;
    std::array<gradient_buffer, num_aggregators> g_agg;
    std::array<gradient_buffer, num_cond_ops> g_op;

    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        gen.shuffle(order);
        double epoch_loss = 0.0;
        size_t epoch_n = 0;
        for (size_t base = 0; base < order.size(); base += config.batch_size) {
            size_t batch_end = std::min(order.size(), base + config.batch_size);
            g_sel.clear();
            size_t n_sel = 0;
            std::array<size_t, num_aggregators> n_agg{};
            std::array<size_t, num_cond_ops> n_op{};
            for (auto& g : g_agg) g.clear();
            for (auto& g : g_op) g.clear();

            for (size_t bi = base; bi < batch_end; ++bi) {
                const auto& f = data[order[bi]];
                for (size_t j = 0; j < f.sel_x.size(); ++j) {
                    double z = models.sel.score(f.sel_x[j]);
                    double y = j == f.sel_gold ? 1.0 : 0.0;
                    epoch_loss += logistic_loss(z, y);
                    g_sel.accumulate(f.sel_x[j], logistic_loss_dz(z, y));
                    ++n_sel;
                    ++epoch_n;
                }
                for (int k = 0; k < num_aggregators; ++k) {
                    double z = models.agg[k].score(f.agg_x);
                    double y = k == f.agg_gold ? 1.0 : 0.0;
                    epoch_loss += logistic_loss(z, y);
                    g_agg[k].accumulate(f.agg_x, logistic_loss_dz(z, y));
                    ++n_agg[k];
                    ++epoch_n;
                }
                for (const auto& inst : f.ops) {
                    for (int k = 0; k < num_cond_ops; ++k) {
                        if (!inst.allowed[k]) continue;
                        double z = models.op[k].score(inst.x);
                        double y = inst.label[k] ? 1.0 : 0.0;
                        epoch_loss += logistic_loss(z, y);
                        g_op[k].accumulate(inst.x, logistic_loss_dz(z, y));
                        ++n_op[k];
                        ++epoch_n;
                    }
                }
            }

            std::string where = "batch " + std::to_string(base / config.batch_size) + " of epoch " +
                                std::to_string(epoch);
            auto apply = [&](linear_model& model, adam_optimizer& opt, gradient_buffer& g, size_t n) {
                if (n == 0) return;
                g.fold();
                for (auto& e : g.entries) e.second /= double(n);
                opt.step(model, g, where);
            };
            apply(models.sel, opt_sel, g_sel, n_sel);
            for (int k = 0; k < num_aggregators; ++k) apply(models.agg[k], opt_agg[k], g_agg[k], n_agg[k]);
            for (int k = 0; k < num_cond_ops; ++k) apply(models.op[k], opt_op[k], g_op[k], n_op[k]);
        }
        if (epoch_losses) epoch_losses->push_back(epoch_n ? epoch_loss / double(epoch_n) : 0.0);
    }
}

inline void check_train_config(const train_config& config) {
    if (!(config.learning_rate > 0) || !std::isfinite(config.learning_rate))
        throw config_error("learning rate must be positive");
    if (config.batch_size < 1) throw config_error("batch size must be at least 1");
}

inline std::vector<featurized_example> featurize_all(const std::vector<example>& examples,
                                                     const table_map& tables,
                                                     const phrase_lexicon& lexicon) {
    std::vector<featurized_example> data;
    data.reserve(examples.size());
    for (const auto& ex : examples) {
        auto it = tables.find(ex.table_id);
        if (it == tables.end())
            throw validation_error("example references unknown table '" + ex.table_id + "'");
        data.push_back(featurize(ex, it->second, lexicon));
    }
    return data;
}

} // namespace detail

inline slot_models train(const std::vector<example>& examples, const table_map& tables,
                         const train_config& config, const phrase_lexicon& lexicon,
                         std::vector<double>* epoch_losses = nullptr) {
    detail::check_train_config(config);
    if (config.epochs < 1) throw config_error("training needs at least one epoch");
    if (examples.empty()) throw empty_training_set_error("no training examples");

    slot_models models;
    models.lexicon = lexicon;
    models.seed = config.seed;
    models.config = config;
    auto data = detail::featurize_all(examples, tables, lexicon);
    detail::run_epochs(models, data, config, "train-shuffle", epoch_losses);
    return models;
}

// Continues training a copy of `base` on a seeded sample of the
// domain-specific slice. Zero epochs is a valid no-op pass.
inline slot_models finetune(const slot_models& base, const std::vector<example>& examples,
                            const table_map& tables, double subset_fraction,
                            const train_config& config,
                            std::vector<double>* epoch_losses = nullptr) {
    detail::check_train_config(config);
    if (!(subset_fraction > 0.0) || subset_fraction > 1.0)
        throw config_error("subset fraction must be in (0, 1]");

    std::vector<example> slice;
    for (const auto& ex : examples)
        if (is_domain_specific(ex)) slice.push_back(ex);
    if (slice.empty()) throw empty_subset_error("no domain-specific examples to finetune on");

    size_t k = subset_fraction >= 1.0
                   ? slice.size()
                   : std::min(slice.size(),
                              std::max<size_t>(1, size_t(std::llround(subset_fraction * double(slice.size())))));
    auto gen = rng::for_stage(config.seed, "finetune-sample");
    auto picked = gen.sample_without_replacement(slice.size(), k);
    std::sort(picked.begin(), picked.end());
    std::vector<example> subset;
    subset.reserve(k);
    for (size_t i : picked) subset.push_back(slice[i]);

    slot_models models = base;
    if (config.epochs == 0) return models;
    models.seed = config.seed;
    models.config = config;
    auto data = detail::featurize_all(subset, tables, base.lexicon);
    detail::run_epochs(models, data, config, "finetune-shuffle", epoch_losses);
    return models;
}

// ---- prediction ----

inline query_sketch predict(const std::vector<std::string>& tokens, const table& t,
                            const slot_models& models) {
    const auto& schema = t.schema;
    auto links = link_schema(tokens, schema);
    auto cands = extract_conditions(tokens, t, links, models.lexicon);
    auto headers = normalized_headers(schema);

    query_sketch sketch;
    double best = -1e300;
    for (size_t j = 0; j < schema.column_count(); ++j) {
        double z = models.sel.score(detail::sel_features(tokens, schema, links, cands, headers, j));
        if (z > best) {
            best = z;
            sketch.sel = j;
        }
    }

    auto agg_x = detail::agg_features(tokens);
    double best_agg = -1e300;
    for (int k = 0; k < num_aggregators; ++k) {
        double z = models.agg[k].score(agg_x);
        if (z > best_agg) {
            best_agg = z;
            sketch.agg = aggregator(k);
        }
    }

    struct scored {
        double score;
        size_t order;
        condition cond;
    };
    std::map<std::string, scored> chosen;
    for (size_t ci = 0; ci < cands.size(); ++ci) {
        const auto& c = cands[ci];
        auto x = detail::op_features(tokens, schema, c);
        double best_z = -1e300;
        cond_op best_op = cond_op::eq;
        for (int k = 0; k < num_cond_ops; ++k) {
            bool allowed = k == int(cond_op::eq) || c.phrase_in_window;
            if (!allowed) continue;
            double z = models.op[k].score(x);
            if (z > best_z) {
                best_z = z;
                best_op = cond_op(k);
            }
        }
        if (!(best_z > 0.0)) continue;
        std::string key = std::to_string(c.cond.col) + "|" + value_key(c.cond.value);
        auto it = chosen.find(key);
        if (it == chosen.end() || best_z > it->second.score)
            chosen[key] = {best_z, ci, condition{c.cond.col, best_op, c.cond.value}};
    }
    std::vector<scored> picks;
    for (auto& [key, s] : chosen) picks.push_back(s);
    std::sort(picks.begin(), picks.end(), [](const scored& a, const scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.order < b.order;
    });
    if (picks.size() > max_conditions) picks.resize(max_conditions);
    for (const auto& p : picks) sketch.conds.push_back(p.cond);
    return sketch;
}

inline query_sketch predict(const std::string& question_raw, const table& t,
                            const slot_models& models) {
    return predict(normalize_question(question_raw), t, models);
}

// ---- serialization ----

constexpr const char* model_format_version = "sketchsql-models v1";

namespace detail {

inline std::string hex_bits(double d) {
    uint64_t bits = std::bit_cast<uint64_t>(d);
    char buf[17] = {};
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[bits & 0xf];
        bits >>= 4;
    }
    return std::string(buf, 16);
}

inline double bits_hex(std::string_view s) {
    uint64_t bits = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), bits, 16);
    if (ec != std::errc() || p != s.data() + s.size())
        throw load_error("bad hex float '" + std::string(s) + "'");
    return std::bit_cast<double>(bits);
}

inline void write_weights(std::ostream& out, const std::string& name, const linear_model& m) {
    size_t nnz = 0;
    for (double w : m.weights)
        if (w != 0.0) ++nnz;
    out << "weights " << name << " " << nnz << "\n";
    for (size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] != 0.0) out << i << " " << hex_bits(m.weights[i]) << "\n";
}

inline void read_weights(std::istream& in, linear_model& m, size_t nnz) {
    for (size_t n = 0; n < nnz; ++n) {
        size_t idx = 0;
        std::string hex;
        if (!(in >> idx >> hex)) throw load_error("truncated weight section");
        if (idx >= m.weights.size()) throw load_error("weight index out of range");
        m.weights[idx] = bits_hex(hex);
    }
}

} // namespace detail

inline void serialize_models(const slot_models& models, std::ostream& out) {
    out << model_format_version << "\n";
    out << "hash " << feature_hash_name << " " << feature_hash_space << "\n";
    out << "seed " << models.seed << "\n";
    const auto& c = models.config;
    out << "config lr " << detail::hex_bits(c.learning_rate) << " batch " << c.batch_size
        << " epochs " << c.epochs << " beta1 " << detail::hex_bits(c.beta1) << " beta2 "
        << detail::hex_bits(c.beta2) << " eps " << detail::hex_bits(c.epsilon) << "\n";
    out << "lexicon " << models.lexicon.size() << "\n";
    for (const auto& [phrase, op] : models.lexicon) out << int(op) << "\t" << phrase << "\n";
    detail::write_weights(out, "sel", models.sel);
    for (int k = 0; k < num_aggregators; ++k)
        detail::write_weights(out, "agg" + std::to_string(k), models.agg[k]);
    for (int k = 0; k < num_cond_ops; ++k)
        detail::write_weights(out, "op" + std::to_string(k), models.op[k]);
    out << "end\n";
}

inline std::string serialize_models(const slot_models& models) {
    std::ostringstream out;
    serialize_models(models, out);
    return out.str();
}

inline slot_models deserialize_models(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != model_format_version)
        throw load_error("unsupported model format: '" + line + "'");
    slot_models models;
    std::string word, hash_name;
    uint32_t space = 0;
    if (!(in >> word >> hash_name >> space) || word != "hash") throw load_error("missing hash line");
    if (hash_name != feature_hash_name || space != feature_hash_space)
        throw load_error("model hashed with " + hash_name + "/" + std::to_string(space) +
                         ", expected " + feature_hash_name + "/" + std::to_string(feature_hash_space));
    if (!(in >> word >> models.seed) || word != "seed") throw load_error("missing seed line");
    std::string lr, b1, b2, eps;
    std::string kw1, kw2, kw3, kw4, kw5, kw6;
    if (!(in >> word >> kw1 >> lr >> kw2 >> models.config.batch_size >> kw3 >>
          models.config.epochs >> kw4 >> b1 >> kw5 >> b2 >> kw6 >> eps) ||
        word != "config")
        throw load_error("missing config line");
    models.config.learning_rate = detail::bits_hex(lr);
    models.config.beta1 = detail::bits_hex(b1);
    models.config.beta2 = detail::bits_hex(b2);
    models.config.epsilon = detail::bits_hex(eps);
    models.config.seed = models.seed;
    size_t lex_n = 0;
    if (!(in >> word >> lex_n) || word != "lexicon") throw load_error("missing lexicon line");
    std::getline(in, line);
    for (size_t i = 0; i < lex_n; ++i) {
        if (!std::getline(in, line)) throw load_error("truncated lexicon");
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw load_error("bad lexicon entry '" + line + "'");
        int op = std::stoi(line.substr(0, tab));
        if (op < 0 || op >= num_cond_ops) throw load_error("bad lexicon operator in '" + line + "'");
        models.lexicon[line.substr(tab + 1)] = cond_op(op);
    }
    while (in >> word) {
        if (word == "end") return models;
        if (word != "weights") throw load_error("unexpected token '" + word + "'");
        std::string name;
        size_t nnz = 0;
        if (!(in >> name >> nnz)) throw load_error("bad weights header");
        if (name == "sel") detail::read_weights(in, models.sel, nnz);
        else if (name.rfind("agg", 0) == 0) {
            int k = std::stoi(name.substr(3));
            if (k < 0 || k >= num_aggregators) throw load_error("bad section '" + name + "'");
            detail::read_weights(in, models.agg[k], nnz);
        } else if (name.rfind("op", 0) == 0) {
            int k = std::stoi(name.substr(2));
            if (k < 0 || k >= num_cond_ops) throw load_error("bad section '" + name + "'");
            detail::read_weights(in, models.op[k], nnz);
        } else throw load_error("unknown weight section '" + name + "'");
    }
    throw load_error("model file missing end marker");
}

inline void save_models(const slot_models& models, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw load_error("cannot open " + path + " for writing");
    serialize_models(models, out);
    if (!out) throw load_error("failed writing " + path);
}

inline slot_models load_models(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw load_error("cannot open " + path);
    return deserialize_models(in);
}

} // namespace sketchsql
