#include "pop/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pop/util.hpp"

namespace pop {

SensorMatrix truncate(const SensorMatrix& matrix, int keep_seconds) {
    if (keep_seconds <= 0) {
        throw std::invalid_argument("truncate: keep_seconds must be positive");
    }
    if (keep_seconds > matrix.cols()) {
        throw std::out_of_range("truncate: keep_seconds " + std::to_string(keep_seconds) +
                                " exceeds matrix width " + std::to_string(matrix.cols()));
    }
    if (keep_seconds == matrix.cols()) {
        return matrix;
    }
    SensorMatrix out(matrix.rows(), keep_seconds);
    for (int r = 0; r < matrix.rows(); ++r) {
        for (int c = 0; c < keep_seconds; ++c) {
            out.at(r, c) = matrix.at(r, c);
        }
    }
    return out;
}

SensorMatrix uniform_subsample(const SensorMatrix& matrix, int target_width) {
    const int n = matrix.cols();
    if (target_width < 2) {
        throw std::invalid_argument("uniform_subsample: target_width must be at least 2");
    }
    if (target_width > n) {
        throw std::out_of_range("uniform_subsample: target_width " + std::to_string(target_width) +
                                " exceeds matrix width " + std::to_string(n));
    }
    if (target_width == n) {
        return matrix;
    }
    SensorMatrix out(matrix.rows(), target_width);
    for (int i = 0; i < target_width; ++i) {
        const double pos = static_cast<double>(i) * static_cast<double>(n - 1) /
                           static_cast<double>(target_width - 1);
        const int col = static_cast<int>(std::llround(pos));
        for (int r = 0; r < matrix.rows(); ++r) {
            out.at(r, i) = matrix.at(r, col);
        }
    }
    return out;
}

NormStats fit_normalization(const Dataset& dataset) {
    if (dataset.empty()) {
        throw std::invalid_argument("fit_normalization: empty dataset");
    }
    dataset.check_consistent_shapes();

    NormStats stats;
    const int sensors = dataset.samples.front().matrix.rows();
    stats.per_sensor_min.assign(sensors, std::numeric_limits<double>::infinity());
    stats.per_sensor_max.assign(sensors, -std::numeric_limits<double>::infinity());

    bool saw_train = false;
    for (const auto& sample : dataset.samples) {
        if (sample.split != Split::train) continue;
        saw_train = true;
        const SensorMatrix& m = sample.matrix;
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) {
                stats.per_sensor_min[r] = std::min(stats.per_sensor_min[r], m.at(r, c));
                stats.per_sensor_max[r] = std::max(stats.per_sensor_max[r], m.at(r, c));
            }
        }
    }
    if (!saw_train) {
        throw std::invalid_argument("fit_normalization: dataset has no training-split samples");
    }
    stats.validate();
    return stats;
}

SensorMatrix apply_normalization(const SensorMatrix& matrix, const NormStats& stats) {
    stats.validate();
    if (matrix.rows() != stats.sensors()) {
        throw std::invalid_argument("apply_normalization: matrix has " +
                                    std::to_string(matrix.rows()) + " sensors, stats have " +
                                    std::to_string(stats.sensors()));
    }
    SensorMatrix out(matrix.rows(), matrix.cols());
    for (int r = 0; r < matrix.rows(); ++r) {
        const double lo = stats.per_sensor_min[r];
        const double hi = stats.per_sensor_max[r];
        const double range = hi - lo;
        for (int c = 0; c < matrix.cols(); ++c) {
            if (range == 0.0) {
                out.at(r, c) = 0.5;
            } else {
                out.at(r, c) = std::clamp((matrix.at(r, c) - lo) / range, 0.0, 1.0);
            }
        }
    }
    return out;
}

double center_label(double raw_vas, double scale_midpoint) {
    require_finite(raw_vas, "center_label raw_vas");
    require_finite(scale_midpoint, "center_label scale_midpoint");
    return raw_vas - scale_midpoint;
}

} // namespace pop
