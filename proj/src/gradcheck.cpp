#include "pop/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pop {

ParameterAccess parameter_access(PopNetwork& net) {
    // Views are rebuilt on every call because vector storage is stable but
    // the network object may be moved between calls.
    ParameterAccess access;
    access.count = parameter_count(net);
    auto locate = [&net](std::size_t flat) -> double* {
        for (auto& view : parameter_views(net)) {
            if (flat < view.size) return view.data + flat;
            flat -= view.size;
        }
        throw std::out_of_range("parameter index out of range");
    };
    access.get = [locate](std::size_t i) { return *locate(i); };
    access.set = [locate](std::size_t i, double v) { *locate(i) = v; };
    return access;
}

std::vector<double> flatten_grads(const PopGrads& grads) {
    std::vector<double> flat;
    std::size_t total = 0;
    for (const auto& arr : grads.arrays) total += arr.size();
    flat.reserve(total);
    for (const auto& arr : grads.arrays) {
        flat.insert(flat.end(), arr.begin(), arr.end());
    }
    return flat;
}

double max_relative_gradient_error(const ParameterAccess& params,
                                   const std::function<double()>& loss,
                                   std::span<const double> analytic_grads, double epsilon) {
    if (analytic_grads.size() != params.count) {
        throw std::invalid_argument("max_relative_gradient_error: gradient count mismatch");
    }
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
        throw std::invalid_argument("max_relative_gradient_error: epsilon must be in [1e-7, 1e-3]");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < params.count; ++i) {
        const double saved = params.get(i);
        params.set(i, saved + epsilon);
        const double up = loss();
        params.set(i, saved - epsilon);
        const double down = loss();
        params.set(i, saved);

        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = analytic_grads[i];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    return worst;
}

double gradient_check(PopNetwork& net, const SensorMatrix& sample, double target, double epsilon) {
    const std::vector<double> analytic = flatten_grads(loss_and_grads(net, sample, target));
    const ParameterAccess access = parameter_access(net);
    const auto loss = [&net, &sample, target]() {
        return nn::mse_loss(predict(net, sample), target).loss;
    };
    return max_relative_gradient_error(access, loss, analytic, epsilon);
}

} // namespace pop
