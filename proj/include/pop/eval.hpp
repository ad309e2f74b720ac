#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pop/dataset.hpp"
#include "pop/model.hpp"

namespace pop {

struct OdorPrediction {
    std::string odor_id;
    double prediction = 0.0;
    double human_median = 0.0;  // centered label, median over repeats
};

struct EvalReport {
    double pearson_r = 0.0;
    int n_odors = 0;
    std::optional<double> machine_human_ratio_pct;
    std::optional<double> binary_accuracy;
    int n_binary = 0;
    std::vector<OdorPrediction> per_odor;
};

// Sample Pearson coefficient. Throws std::domain_error on a constant vector
// (never silently returns 0) and std::invalid_argument for n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

// 100 * r_machine / r_human_human, full precision; round for display.
double machine_human_ratio(double r_machine, double r_human_human);

struct BinaryResult {
    double accuracy = 0.0;
    int n_used = 0;
};

// Drops odors with |human label| <= neutral_half_width, then scores
// sign agreement (prediction > 0 means pleasant).
BinaryResult binary_classify(std::span<const OdorPrediction> items, double neutral_half_width);

// Full per-odor report on a held-out set. The set must already be
// preprocessed with the training split's schedule and normalization.
EvalReport evaluate(const PopNetwork& network, const Dataset& test_set,
                    std::optional<double> human_human_r, double neutral_half_width);

// report.csv (per-odor rows), summary.txt (one line), scatter.csv.
void write_report_files(const EvalReport& report, const std::filesystem::path& out_dir);

std::string summary_line(const EvalReport& report);

} // namespace pop
