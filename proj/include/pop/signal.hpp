#pragma once

#include "pop/dataset.hpp"
#include "pop/matrix.hpp"

namespace pop {

// First keep_seconds columns, row count unchanged.
SensorMatrix truncate(const SensorMatrix& matrix, int keep_seconds);

// target_width columns evenly spaced over [0, n-1]; first and last always kept.
SensorMatrix uniform_subsample(const SensorMatrix& matrix, int target_width);

// Per-sensor min/max over all training-split samples jointly.
NormStats fit_normalization(const Dataset& dataset);

// (r - min) / (max - min) per sensor, clamped to [0, 1].
// A constant sensor (max == min) maps to 0.5 everywhere.
SensorMatrix apply_normalization(const SensorMatrix& matrix, const NormStats& stats);

// raw_vas - scale_midpoint, so 0 is the pleasant/unpleasant boundary.
double center_label(double raw_vas, double scale_midpoint);

} // namespace pop
