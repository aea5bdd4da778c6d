#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sketchsql/errors.hpp"
#include "sketchsql/features.hpp"

namespace sketchsql {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Numerically stable -[y log s + (1-y) log(1-s)] with s = sigmoid(z).
inline double logistic_loss(double z, double y) {
    double m = std::max(z, 0.0);
    return m - y * z + std::log(std::exp(-m) + std::exp(z - m));
}

// d loss / d z
inline double logistic_loss_dz(double z, double y) { return sigmoid(z) - y; }

struct linear_model {
    std::vector<double> weights;

    explicit linear_model(uint32_t dim = feature_hash_space) : weights(dim, 0.0) {}

    double score(const feature_vector& x) const {
        double z = 0.0;
        for (auto [i, v] : x.entries) z += weights[i] * double(v);
        return z;
    }
};

// Gradient of the per-instance logistic loss w.r.t. the weights, accumulated
// into a sparse buffer. Exposed separately so tests can finite-difference it.
struct gradient_buffer {
    std::vector<std::pair<uint32_t, double>> entries;

    void accumulate(const feature_vector& x, double dz) {
        for (auto [i, v] : x.entries) entries.emplace_back(i, dz * double(v));
    }

    void clear() { entries.clear(); }

    // Sums duplicates and sorts by coordinate so updates are order-independent.
    void fold() {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        size_t out = 0;
        for (size_t i = 0; i < entries.size();) {
            uint32_t idx = entries[i].first;
            double sum = 0.0;
            while (i < entries.size() && entries[i].first == idx) sum += entries[i++].second;
            entries[out++] = {idx, sum};
        }
        entries.resize(out);
    }
};

struct adam_config {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Lazy Adam: moments of untouched coordinates decay implicitly; the decay is
// applied in one catch-up multiplication when the coordinate next appears.
class adam_optimizer {
public:
    adam_optimizer(uint32_t dim, adam_config cfg)
        : cfg_(cfg), m_(dim, 0.0), v_(dim, 0.0), touched_(dim, 0) {}

    uint64_t steps() const { return t_; }

    // One update with the already-averaged batch gradient. Entries must be
    // folded (unique, sorted). Throws on non-finite gradients.
    void step(linear_model& model, const gradient_buffer& grad, const std::string& where) {
        ++t_;
        double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
        double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
        for (auto [i, g] : grad.entries) {
            if (!std::isfinite(g)) throw validation_error("non-finite gradient in " + where);
            uint64_t skipped = t_ - 1 - touched_[i];
            if (skipped > 0) {
                m_[i] *= std::pow(cfg_.beta1, double(skipped));
                v_[i] *= std::pow(cfg_.beta2, double(skipped));
            }
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
            touched_[i] = t_;
            double mhat = m_[i] / bc1;
            double vhat = v_[i] / bc2;
            model.weights[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }

private:
    adam_config cfg_;
    uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
    std::vector<uint64_t> touched_;
};

} // namespace sketchsql
