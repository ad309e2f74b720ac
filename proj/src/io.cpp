#include "pop/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pop/signal.hpp"
#include "pop/util.hpp"

namespace fs = std::filesystem;

namespace pop {

namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                          ec.message());
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

double parse_double(const std::string& token, const fs::path& path, int line_no) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == token.c_str() || (end && *end != '\0') || errno == ERANGE) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                    ": malformed number '" + token + "'");
    }
    return value;
}

long parse_long(const std::string& token, const fs::path& path, int line_no) {
    errno = 0;
    char* end = nullptr;
    const long value = std::strtol(token.c_str(), &end, 10);
    if (end == token.c_str() || (end && *end != '\0' && *end != '\r') || errno == ERANGE) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                    ": malformed integer '" + token + "'");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool is_blank(const std::string& line) {
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

} // namespace

SensorMatrix read_matrix_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    std::vector<double> values;
    int rows = 0;
    int cols = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto fields = split_csv_line(line);
        if (cols < 0) {
            cols = static_cast<int>(fields.size());
        } else if (static_cast<int>(fields.size()) != cols) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": ragged row, expected " + std::to_string(cols) +
                                        " columns");
        }
        for (const auto& f : fields) {
            values.push_back(parse_double(f, path, line_no));
        }
        ++rows;
    }
    if (rows == 0) {
        throw std::invalid_argument(path.string() + ": empty sample file");
    }
    return SensorMatrix(rows, cols, std::move(values));
}

void write_matrix_csv(const SensorMatrix& matrix, const fs::path& path) {
    std::ofstream out = open_output(path);
    for (int r = 0; r < matrix.rows(); ++r) {
        for (int c = 0; c < matrix.cols(); ++c) {
            if (c) out << ',';
            out << format_double(matrix.at(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

Dataset load_dataset(const fs::path& manifest_path, double label_midpoint) {
    std::ifstream in = open_input(manifest_path);
    const fs::path base = manifest_path.parent_path();

    Dataset dataset;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw std::invalid_argument(manifest_path.string() + ":" + std::to_string(line_no) +
                                        ": expected 5 fields, got " +
                                        std::to_string(fields.size()));
        }
        OdorSample sample;
        sample.odor_id = fields[0];
        sample.repeat_index = static_cast<int>(parse_long(fields[1], manifest_path, line_no));
        if (sample.repeat_index < 0) {
            throw std::invalid_argument(manifest_path.string() + ":" + std::to_string(line_no) +
                                        ": repeat_index must be non-negative");
        }
        sample.raw_vas = parse_double(fields[3], manifest_path, line_no);
        sample.label = center_label(sample.raw_vas, label_midpoint);
        sample.split = split_from_string(fields[4]);
        sample.matrix = read_matrix_csv(base / fields[2]);
        dataset.samples.push_back(std::move(sample));
    }
    if (dataset.empty()) {
        throw std::invalid_argument(manifest_path.string() + ": manifest lists no samples");
    }
    return dataset;
}

std::filesystem::path save_dataset(const Dataset& dataset, const fs::path& out_dir) {
    if (dataset.empty()) {
        throw std::invalid_argument("save_dataset: empty dataset");
    }
    std::error_code ec;
    fs::create_directories(out_dir / "samples", ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    }
    const fs::path manifest_path = out_dir / "manifest.csv";
    std::ofstream manifest = open_output(manifest_path);
    for (const auto& sample : dataset.samples) {
        const std::string rel =
            "samples/" + sample.odor_id + "_r" + std::to_string(sample.repeat_index) + ".csv";
        write_matrix_csv(sample.matrix, out_dir / rel);
        manifest << sample.odor_id << ',' << sample.repeat_index << ',' << rel << ','
                 << format_double(sample.raw_vas) << ',' << to_string(sample.split) << '\n';
    }
    if (!manifest) {
        throw IoError("failed writing " + manifest_path.string());
    }
    return manifest_path;
}

NormStats read_norm_stats(const fs::path& path) {
    std::ifstream in = open_input(path);
    NormStats stats;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": expected min,max");
        }
        stats.per_sensor_min.push_back(parse_double(fields[0], path, line_no));
        stats.per_sensor_max.push_back(parse_double(fields[1], path, line_no));
    }
    stats.validate();
    return stats;
}

void write_norm_stats(const NormStats& stats, const fs::path& path) {
    stats.validate();
    std::ofstream out = open_output(path);
    for (int s = 0; s < stats.sensors(); ++s) {
        out << format_double(stats.per_sensor_min[static_cast<std::size_t>(s)]) << ','
            << format_double(stats.per_sensor_max[static_cast<std::size_t>(s)]) << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

GradientProfile read_profile_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    GradientProfile profile;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line[0] == '#') continue;
        profile.values.push_back(parse_double(line, path, line_no));
    }
    if (profile.values.empty()) {
        throw std::invalid_argument(path.string() + ": empty gradient profile");
    }
    return profile;
}

void write_profile_csv(const GradientProfile& profile, const fs::path& path) {
    std::ofstream out = open_output(path);
    for (double v : profile.values) {
        out << format_double(v) << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

SamplingSchedule read_schedule_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    SamplingSchedule schedule;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        if (line.rfind("# threshold=", 0) == 0) {
            schedule.threshold = parse_double(line.substr(12), path, line_no);
            continue;
        }
        if (line[0] == '#') continue;
        schedule.indices.push_back(static_cast<int>(parse_long(line, path, line_no)));
    }
    if (schedule.indices.empty()) {
        throw std::invalid_argument(path.string() + ": empty sampling schedule");
    }
    return schedule;
}

void write_schedule_csv(const SamplingSchedule& schedule, const fs::path& path) {
    std::ofstream out = open_output(path);
    if (schedule.threshold > 0.0) {
        out << "# threshold=" << format_double(schedule.threshold) << '\n';
    }
    for (int idx : schedule.indices) {
        out << idx << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace pop
