#include "pop/eval.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pop/io.hpp"
#include "pop/util.hpp"

namespace pop {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("pearson: vectors differ in length");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw std::invalid_argument("pearson: need at least two points");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::domain_error("pearson: constant input vector, correlation undefined");
    }
    return sxy / std::sqrt(sxx * syy);
}

double machine_human_ratio(double r_machine, double r_human_human) {
    require_finite(r_machine, "machine_human_ratio r_machine");
    require_finite(r_human_human, "machine_human_ratio r_human_human");
    if (!(r_human_human > 0.0)) {
        throw std::invalid_argument("machine_human_ratio: human-human correlation must be > 0");
    }
    return 100.0 * r_machine / r_human_human;
}

BinaryResult binary_classify(std::span<const OdorPrediction> items, double neutral_half_width) {
    if (neutral_half_width < 0.0) {
        throw std::invalid_argument("binary_classify: neutral_half_width must be >= 0");
    }
    int used = 0;
    int correct = 0;
    for (const auto& item : items) {
        if (std::abs(item.human_median) <= neutral_half_width) {
            continue;  // neutral band removed from the denominator
        }
        ++used;
        const bool predicted_pleasant = item.prediction > 0.0;
        const bool actually_pleasant = item.human_median > 0.0;
        if (predicted_pleasant == actually_pleasant) {
            ++correct;
        }
    }
    if (used == 0) {
        throw std::domain_error("binary_classify: every odor falls inside the neutral band");
    }
    return {static_cast<double>(correct) / static_cast<double>(used), used};
}

EvalReport evaluate(const PopNetwork& net, const Dataset& test_set,
                    std::optional<double> human_human_r, double neutral_half_width) {
    if (test_set.empty()) {
        throw std::invalid_argument("evaluate: empty test set");
    }
    test_set.check_consistent_shapes();
    // Validate shape up front so the parallel loop below cannot throw.
    const SensorMatrix& probe = test_set.samples.front().matrix;
    if (probe.rows() != net.config.sensors || probe.cols() != net.config.width) {
        throw std::invalid_argument("evaluate: samples are " + std::to_string(probe.rows()) + "x" +
                                    std::to_string(probe.cols()) + ", network expects " +
                                    std::to_string(net.config.sensors) + "x" +
                                    std::to_string(net.config.width));
    }

    const std::vector<std::string> ids = test_set.odor_ids();
    EvalReport report;
    report.n_odors = static_cast<int>(ids.size());
    report.per_odor.resize(ids.size());

    // Read-only over the network: odors evaluated in parallel.
#pragma omp parallel for schedule(dynamic) if (ids.size() > 1)
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::vector<OdorSample> repeats;
        std::vector<double> labels;
        for (const auto& s : test_set.samples) {
            if (s.odor_id == ids[i]) {
                repeats.push_back(s);
                labels.push_back(s.label);
            }
        }
        OdorPrediction& row = report.per_odor[i];
        row.odor_id = ids[i];
        row.prediction = predict_odor(net, repeats);
        row.human_median = median_of(std::move(labels));
    }

    std::vector<double> machine;
    std::vector<double> human;
    machine.reserve(report.per_odor.size());
    human.reserve(report.per_odor.size());
    for (const auto& row : report.per_odor) {
        machine.push_back(row.prediction);
        human.push_back(row.human_median);
    }
    report.pearson_r = pearson(machine, human);

    if (human_human_r.has_value()) {
        report.machine_human_ratio_pct = machine_human_ratio(report.pearson_r, *human_human_r);
    }
    try {
        const BinaryResult binary = binary_classify(report.per_odor, neutral_half_width);
        report.binary_accuracy = binary.accuracy;
        report.n_binary = binary.n_used;
    } catch (const std::domain_error&) {
        report.binary_accuracy = std::nullopt;
        report.n_binary = 0;
    }
    return report;
}

std::string summary_line(const EvalReport& report) {
    std::ostringstream out;
    out << "pearson_r=" << format_double(report.pearson_r) << " n_odors=" << report.n_odors;
    if (report.machine_human_ratio_pct.has_value()) {
        out << " machine_human_ratio_pct=" << format_double(*report.machine_human_ratio_pct)
            << " machine_human_ratio_rounded=" << std::llround(*report.machine_human_ratio_pct);
    }
    if (report.binary_accuracy.has_value()) {
        out << " binary_accuracy=" << format_double(*report.binary_accuracy)
            << " n_binary=" << report.n_binary;
    }
    return out.str();
}

void write_report_files(const EvalReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create report directory " + out_dir.string() + ": " + ec.message());
    }

    std::ofstream per_odor(out_dir / "report.csv");
    if (!per_odor) {
        throw IoError("cannot open for writing: " + (out_dir / "report.csv").string());
    }
    per_odor << "odor_id,prediction,human_median\n";
    for (const auto& row : report.per_odor) {
        per_odor << row.odor_id << ',' << format_double(row.prediction) << ','
                 << format_double(row.human_median) << '\n';
    }

    std::ofstream scatter(out_dir / "scatter.csv");
    if (!scatter) {
        throw IoError("cannot open for writing: " + (out_dir / "scatter.csv").string());
    }
    scatter << "prediction,human_median\n";
    for (const auto& row : report.per_odor) {
        scatter << format_double(row.prediction) << ',' << format_double(row.human_median) << '\n';
    }

    std::ofstream summary(out_dir / "summary.txt");
    if (!summary) {
        throw IoError("cannot open for writing: " + (out_dir / "summary.txt").string());
    }
    summary << summary_line(report) << '\n';
    if (!per_odor || !scatter || !summary) {
        throw IoError("failed writing report files under " + out_dir.string());
    }
}

} // namespace pop
