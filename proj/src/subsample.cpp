#include "pop/subsample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pop {

GradientProfile per_sample_gradient(const SensorMatrix& matrix) {
    const int n = matrix.cols();
    if (n < 2) {
        throw std::invalid_argument("per_sample_gradient: need at least two time columns");
    }
    GradientProfile profile;
    profile.values.resize(static_cast<std::size_t>(n - 1));
    const double inv_m = 1.0 / static_cast<double>(matrix.rows());
    for (int i = 0; i + 1 < n; ++i) {
        double sum = 0.0;
        for (int r = 0; r < matrix.rows(); ++r) {
            sum += matrix.at(r, i + 1) - matrix.at(r, i);
        }
        profile.values[static_cast<std::size_t>(i)] = sum * inv_m;
    }
    return profile;
}

GradientProfile dataset_gradient(const std::vector<GradientProfile>& profiles) {
    if (profiles.empty()) {
        throw std::invalid_argument("dataset_gradient: empty profile list");
    }
    const std::size_t len = profiles.front().values.size();
    for (const auto& p : profiles) {
        if (p.values.size() != len) {
            throw std::invalid_argument("dataset_gradient: profiles have mixed lengths");
        }
    }
    GradientProfile mean;
    mean.values.assign(len, 0.0);
    for (const auto& p : profiles) {
        for (std::size_t i = 0; i < len; ++i) {
            mean.values[i] += p.values[i];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(profiles.size());
    for (double& v : mean.values) {
        v *= inv_n;
    }
    return mean;
}

SamplingSchedule build_schedule(const GradientProfile& profile, double threshold) {
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("build_schedule: threshold must be positive");
    }
    if (profile.values.empty()) {
        throw std::invalid_argument("build_schedule: empty gradient profile");
    }
    const int n = profile.source_width();

    SamplingSchedule schedule;
    schedule.threshold = threshold;
    schedule.indices.push_back(0);

    double running = 0.0;
    for (int i = 1; i < n; ++i) {
        running += std::abs(profile.values[static_cast<std::size_t>(i - 1)]);
        if (running > threshold) {
            schedule.indices.push_back(i);
            running = 0.0;
        }
    }
    // Last second is sampled whether the sum crossed the threshold or not.
    if (schedule.indices.back() != n - 1) {
        schedule.indices.push_back(n - 1);
    }
    return schedule;
}

SensorMatrix apply_schedule(const SensorMatrix& matrix, const SamplingSchedule& schedule) {
    if (schedule.indices.empty()) {
        throw std::invalid_argument("apply_schedule: empty schedule");
    }
    for (int idx : schedule.indices) {
        if (idx < 0 || idx >= matrix.cols()) {
            throw std::out_of_range("apply_schedule: index " + std::to_string(idx) +
                                    " out of range for width " + std::to_string(matrix.cols()));
        }
    }
    SensorMatrix out(matrix.rows(), schedule.width());
    for (int j = 0; j < schedule.width(); ++j) {
        const int src = schedule.indices[static_cast<std::size_t>(j)];
        for (int r = 0; r < matrix.rows(); ++r) {
            out.at(r, j) = matrix.at(r, src);
        }
    }
    return out;
}

} // namespace pop
