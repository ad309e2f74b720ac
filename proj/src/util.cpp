#include "pop/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pop {

double median_of(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("median_of: empty input");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(what) + ": value must be finite");
    }
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("mean_of: empty input");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double stddev_of(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double m = mean_of(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

} // namespace pop
