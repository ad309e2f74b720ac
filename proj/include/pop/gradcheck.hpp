#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pop/matrix.hpp"
#include "pop/model.hpp"

namespace pop {

// Flat get/set access to a model's parameters, in a fixed order.
struct ParameterAccess {
    std::size_t count = 0;
    std::function<double(std::size_t)> get;
    std::function<void(std::size_t, double)> set;
};

ParameterAccess parameter_access(PopNetwork& network);

// Concatenation of the six gradient arrays, matching parameter_access order.
std::vector<double> flatten_grads(const PopGrads& grads);

// Worst relative disagreement |a - n| / max(|a|, |n|, 1e-12) between the
// supplied analytic gradients and central finite differences of `loss`.
double max_relative_gradient_error(const ParameterAccess& params,
                                   const std::function<double()>& loss,
                                   std::span<const double> analytic_grads, double epsilon);

// Checks every parameter of the network on one sample. epsilon in [1e-7, 1e-3].
double gradient_check(PopNetwork& network, const SensorMatrix& sample, double target,
                      double epsilon);

} // namespace pop
