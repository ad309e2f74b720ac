#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "pop/dataset.hpp"
#include "pop/matrix.hpp"
#include "pop/subsample.hpp"

namespace pop {

// File-level failure (missing, unreadable, unwritable). The CLI maps this
// to exit code 2, while validation errors map to 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// One sample per file: m sensor rows, n numeric columns, no header.
SensorMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const SensorMatrix& matrix, const std::filesystem::path& path);

// Manifest line: odor_id,repeat_index,relative_csv_path,raw_vas_label,split
Dataset load_dataset(const std::filesystem::path& manifest_path, double label_midpoint);

// Writes samples/<odor>_r<repeat>.csv plus manifest.csv under out_dir.
// Returns the manifest path.
std::filesystem::path save_dataset(const Dataset& dataset, const std::filesystem::path& out_dir);

// Rows = sensors, columns = min,max.
NormStats read_norm_stats(const std::filesystem::path& path);
void write_norm_stats(const NormStats& stats, const std::filesystem::path& path);

// Single-column CSVs.
GradientProfile read_profile_csv(const std::filesystem::path& path);
void write_profile_csv(const GradientProfile& profile, const std::filesystem::path& path);
SamplingSchedule read_schedule_csv(const std::filesystem::path& path);
void write_schedule_csv(const SamplingSchedule& schedule, const std::filesystem::path& path);

} // namespace pop
