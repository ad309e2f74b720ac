#include "pop/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace pop {

const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::essential_oils: return "essential_oils";
        case Split::novel: return "novel";
    }
    throw std::invalid_argument("to_string: unknown split value");
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "essential_oils") return Split::essential_oils;
    if (name == "novel") return Split::novel;
    throw std::invalid_argument("split_from_string: unknown split '" + name + "'");
}

void NormStats::validate() const {
    if (per_sensor_min.empty() || per_sensor_min.size() != per_sensor_max.size()) {
        throw std::invalid_argument("NormStats: min/max vectors must be non-empty and equal-sized");
    }
    for (std::size_t i = 0; i < per_sensor_min.size(); ++i) {
        if (!std::isfinite(per_sensor_min[i]) || !std::isfinite(per_sensor_max[i])) {
            throw std::invalid_argument("NormStats: entries must be finite");
        }
        if (per_sensor_min[i] > per_sensor_max[i]) {
            throw std::invalid_argument("NormStats: min > max for sensor " + std::to_string(i));
        }
    }
}

std::vector<std::string> Dataset::odor_ids() const {
    std::vector<std::string> ids;
    std::unordered_set<std::string> seen;
    for (const auto& s : samples) {
        if (seen.insert(s.odor_id).second) {
            ids.push_back(s.odor_id);
        }
    }
    return ids;
}

Dataset Dataset::filter_split(Split split) const {
    Dataset out;
    out.norm_stats = norm_stats;
    for (const auto& s : samples) {
        if (s.split == split) {
            out.samples.push_back(s);
        }
    }
    return out;
}

void Dataset::check_consistent_shapes() const {
    if (samples.empty()) return;
    const SensorMatrix& first = samples.front().matrix;
    for (const auto& s : samples) {
        if (!s.matrix.same_shape(first)) {
            throw std::invalid_argument(
                "Dataset: sample '" + s.odor_id + "' repeat " + std::to_string(s.repeat_index) +
                " has shape " + std::to_string(s.matrix.rows()) + "x" +
                std::to_string(s.matrix.cols()) + ", expected " + std::to_string(first.rows()) +
                "x" + std::to_string(first.cols()));
        }
    }
}

} // namespace pop
