#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pop/dataset.hpp"

namespace pop {

// Synthetic e-nose dataset: per-sensor rise/decay traces with latent
// amplitudes per odor and a pleasantness label linear in those amplitudes.
struct SynthConfig {
    int n_odors = 45;
    int repeats_per_odor = 5;
    int sensors = 16;
    int seconds = 500;
    std::pair<double, double> rise_time_range{2.0, 20.0};       // seconds
    std::pair<double, double> decay_constant_range{0.005, 0.05};  // 1/seconds
    std::pair<double, double> amplitude_range{50.0, 5000.0};    // counts
    double noise_sigma = 2.0;        // counts, per entry per repeat
    std::vector<double> label_weights;  // empty -> default alternating pattern
    double label_noise_sigma = 1.0;  // VAS units, per repeat
    double label_midpoint = 15.0;    // raw VAS value mapped to label 0
    std::uint64_t seed = 0;

    void validate() const;
};

// Fully seeded generation; identical configs give bit-identical datasets.
// All samples are tagged Split::train.
Dataset generate(const SynthConfig& config);

// One jointly generated pool partitioned into the study's three disjoint
// odor sets: 45 train, 22 essential oils, 21 novel.
Dataset make_paper_shaped_splits(const SynthConfig& config);

// The alternating +/- pattern used when config.label_weights is empty.
std::vector<double> default_label_weights(int sensors);

} // namespace pop
