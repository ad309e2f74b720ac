#pragma once

#include <string>
#include <vector>

namespace pop {

// Median with the mean-of-middle-two rule for even counts.
double median_of(std::vector<double> values);

// Decimal string that parses back to the exact same double (%.17g).
std::string format_double(double value);

// Throws std::invalid_argument naming `what` when value is NaN or infinite.
void require_finite(double value, const char* what);

double mean_of(const std::vector<double>& values);
double stddev_of(const std::vector<double>& values);

} // namespace pop
