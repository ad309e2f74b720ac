#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pop/matrix.hpp"

namespace pop {

enum class Split { train, essential_oils, novel };

const char* to_string(Split split);
Split split_from_string(const std::string& name);

// One measured odor repeat: response matrix plus its centered pleasantness label.
struct OdorSample {
    std::string odor_id;
    int repeat_index = 0;
    SensorMatrix matrix;
    double label = 0.0;    // centered: 0 is the pleasant/unpleasant boundary
    double raw_vas = 0.0;  // label as stored in the manifest, before centering
    Split split = Split::train;
};

// Per-sensor min/max over the training split, for unit-interval scaling.
struct NormStats {
    std::vector<double> per_sensor_min;
    std::vector<double> per_sensor_max;

    int sensors() const { return static_cast<int>(per_sensor_min.size()); }
    void validate() const;
};

struct Dataset {
    std::vector<OdorSample> samples;
    std::optional<NormStats> norm_stats;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }

    // Distinct odor ids in first-appearance order.
    std::vector<std::string> odor_ids() const;

    Dataset filter_split(Split split) const;

    // Throws when samples disagree on (rows, cols). No-op on an empty set.
    void check_consistent_shapes() const;
};

} // namespace pop
