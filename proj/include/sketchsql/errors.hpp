#pragma once

#include <stdexcept>
#include <string>

namespace sketchsql {

struct load_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Aggregate over zero usable cells. Distinct from COUNT of an empty match,
// which is a valid scalar 0.
struct empty_aggregate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct empty_minority_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct empty_training_set_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct empty_subset_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct report_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sketchsql
