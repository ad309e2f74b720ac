#include "pop/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pop {

namespace {

void check_shape(int rows, int cols) {
    if (rows < 1) {
        throw std::invalid_argument("SensorMatrix: need at least one sensor row, got " +
                                    std::to_string(rows));
    }
    if (cols < 2) {
        throw std::invalid_argument("SensorMatrix: need at least two time columns, got " +
                                    std::to_string(cols));
    }
}

} // namespace

SensorMatrix::SensorMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols),
      values_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
    check_shape(rows, cols);
    if (!std::isfinite(fill)) {
        throw std::invalid_argument("SensorMatrix: fill value must be finite");
    }
}

SensorMatrix::SensorMatrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    check_shape(rows, cols);
    if (values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("SensorMatrix: value count does not match rows*cols");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("SensorMatrix: all entries must be finite");
        }
    }
}

} // namespace pop
