#pragma once

#include <vector>

#include "pop/matrix.hpp"

namespace pop {

// Sensor-averaged response change per second; entry i covers seconds i -> i+1.
struct GradientProfile {
    std::vector<double> values;

    // Width of the matrices this profile describes.
    int source_width() const { return static_cast<int>(values.size()) + 1; }
};

// Time indices picked by the gradient-driven sampler; always starts at 0
// and ends at the last second.
struct SamplingSchedule {
    std::vector<int> indices;
    double threshold = 0.0;

    int width() const { return static_cast<int>(indices.size()); }
};

// Entry i = mean over sensors of (column i+1 - column i).
GradientProfile per_sample_gradient(const SensorMatrix& matrix);

// Elementwise mean across per-sample profiles of equal length.
GradientProfile dataset_gradient(const std::vector<GradientProfile>& profiles);

// Walk the time axis accumulating |gradient|; select an index whenever the
// running sum strictly exceeds the threshold, then reset the sum. Index 0 and
// the last index are always selected.
SamplingSchedule build_schedule(const GradientProfile& profile, double threshold);

// Gather the scheduled columns, preserving order.
SensorMatrix apply_schedule(const SensorMatrix& matrix, const SamplingSchedule& schedule);

} // namespace pop
