#pragma once

#include <cstddef>
#include <vector>

namespace pop {

// Raw sensor response grid: rows = sensors, columns = seconds of acquisition.
// At least one sensor and two seconds; every entry finite.
class SensorMatrix {
public:
    SensorMatrix() = default;
    SensorMatrix(int rows, int cols, double fill = 0.0);
    SensorMatrix(int rows, int cols, std::vector<double> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& at(int r, int c) { return values_[index(r, c)]; }
    double at(int r, int c) const { return values_[index(r, c)]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool same_shape(const SensorMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> values_;
};

} // namespace pop
