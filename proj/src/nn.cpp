#include "pop/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pop/util.hpp"

namespace pop::nn {

namespace {

// Work threshold below which the OpenMP fork costs more than the loop.
constexpr std::size_t kParallelMinWork = std::size_t{1} << 15;

void check_conv_args(const Tensor& input, const ConvLayer& layer) {
    if (input.batch < 1 || input.channels < 1 || input.height < 1 || input.width < 1) {
        throw std::invalid_argument("conv: input tensor has empty dimensions");
    }
    if (input.channels != layer.in_channels) {
        throw std::invalid_argument("conv: input has " + std::to_string(input.channels) +
                                    " channels, layer expects " +
                                    std::to_string(layer.in_channels));
    }
    if (layer.kernel_h > input.height || layer.kernel_w > input.width) {
        throw std::invalid_argument("conv: kernel " + std::to_string(layer.kernel_h) + "x" +
                                    std::to_string(layer.kernel_w) + " larger than input " +
                                    std::to_string(input.height) + "x" +
                                    std::to_string(input.width));
    }
    if (layer.stride_h < 1 || layer.stride_w < 1) {
        throw std::invalid_argument("conv: stride components must be >= 1");
    }
}

} // namespace

Tensor::Tensor(int b, int c, int h, int w, double fill) : batch(b), channels(c), height(h), width(w) {
    if (b < 0 || c < 0 || h < 0 || w < 0) {
        throw std::invalid_argument("Tensor: negative dimension");
    }
    data.assign(static_cast<std::size_t>(b) * c * h * w, fill);
}

ConvLayer::ConvLayer(int oc, int ic, int kh, int kw, int sh, int sw)
    : out_channels(oc), in_channels(ic), kernel_h(kh), kernel_w(kw), stride_h(sh), stride_w(sw) {
    if (oc < 1 || ic < 1 || kh < 1 || kw < 1 || sh < 1 || sw < 1) {
        throw std::invalid_argument("ConvLayer: all dimensions and strides must be >= 1");
    }
    kernels.assign(static_cast<std::size_t>(oc) * ic * kh * kw, 0.0);
    biases.assign(static_cast<std::size_t>(oc), 0.0);
}

DenseLayer::DenseLayer(int out, int in) : out_size(out), in_size(in) {
    if (out < 1 || in < 1) {
        throw std::invalid_argument("DenseLayer: sizes must be >= 1");
    }
    weights.assign(static_cast<std::size_t>(out) * in, 0.0);
    bias.assign(static_cast<std::size_t>(out), 0.0);
}

Tensor conv_forward(const Tensor& input, const ConvLayer& layer) {
    check_conv_args(input, layer);

    const int oh = layer.out_height(input.height);
    const int ow = layer.out_width(input.width);
    Tensor out(input.batch, layer.out_channels, oh, ow);

    const std::size_t work = out.size() * static_cast<std::size_t>(layer.in_channels) *
                             layer.kernel_h * layer.kernel_w;

    // Each (b, oc) slice has a single writer; inner summation order is fixed,
    // so results do not depend on the thread count.
#pragma omp parallel for collapse(2) schedule(static) if (work >= kParallelMinWork)
    for (int b = 0; b < input.batch; ++b) {
        for (int oc = 0; oc < layer.out_channels; ++oc) {
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    double acc = layer.biases[static_cast<std::size_t>(oc)];
                    const int y0 = y * layer.stride_h;
                    const int x0 = x * layer.stride_w;
                    for (int ic = 0; ic < layer.in_channels; ++ic) {
                        for (int r = 0; r < layer.kernel_h; ++r) {
                            const double* in_row = &input.data[input.index(b, ic, y0 + r, x0)];
                            const double* k_row = &layer.kernels[layer.kernel_index(oc, ic, r, 0)];
                            for (int c = 0; c < layer.kernel_w; ++c) {
                                acc += in_row[c] * k_row[c];
                            }
                        }
                    }
                    out.at(b, oc, y, x) = acc;
                }
            }
        }
    }
    return out;
}

ConvGrads conv_backward(const Tensor& input, const ConvLayer& layer, const Tensor& upstream_grad) {
    check_conv_args(input, layer);

    const int oh = layer.out_height(input.height);
    const int ow = layer.out_width(input.width);
    if (upstream_grad.batch != input.batch || upstream_grad.channels != layer.out_channels ||
        upstream_grad.height != oh || upstream_grad.width != ow) {
        throw std::invalid_argument("conv_backward: upstream gradient shape mismatch");
    }

    ConvGrads grads;
    grads.kernel_grad.assign(layer.kernels.size(), 0.0);
    grads.bias_grad.assign(layer.biases.size(), 0.0);
    grads.input_grad = Tensor(input.batch, input.channels, input.height, input.width);

    const std::size_t work = upstream_grad.size() * static_cast<std::size_t>(layer.in_channels) *
                             layer.kernel_h * layer.kernel_w;

    // Kernel and bias gradients: one out-channel per thread, batch summed in
    // index order inside.
#pragma omp parallel for schedule(static) if (work >= kParallelMinWork)
    for (int oc = 0; oc < layer.out_channels; ++oc) {
        double bias_acc = 0.0;
        for (int b = 0; b < input.batch; ++b) {
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    const double g = upstream_grad.at(b, oc, y, x);
                    bias_acc += g;
                    const int y0 = y * layer.stride_h;
                    const int x0 = x * layer.stride_w;
                    for (int ic = 0; ic < layer.in_channels; ++ic) {
                        for (int r = 0; r < layer.kernel_h; ++r) {
                            const double* in_row = &input.data[input.index(b, ic, y0 + r, x0)];
                            double* kg_row = &grads.kernel_grad[layer.kernel_index(oc, ic, r, 0)];
                            for (int c = 0; c < layer.kernel_w; ++c) {
                                kg_row[c] += g * in_row[c];
                            }
                        }
                    }
                }
            }
        }
        grads.bias_grad[static_cast<std::size_t>(oc)] = bias_acc;
    }

    // Input gradient: one (b, ic) slice per thread, out-channels accumulated
    // in index order inside.
#pragma omp parallel for collapse(2) schedule(static) if (work >= kParallelMinWork)
    for (int b = 0; b < input.batch; ++b) {
        for (int ic = 0; ic < layer.in_channels; ++ic) {
            for (int oc = 0; oc < layer.out_channels; ++oc) {
                for (int y = 0; y < oh; ++y) {
                    for (int x = 0; x < ow; ++x) {
                        const double g = upstream_grad.at(b, oc, y, x);
                        const int y0 = y * layer.stride_h;
                        const int x0 = x * layer.stride_w;
                        for (int r = 0; r < layer.kernel_h; ++r) {
                            double* ig_row = &grads.input_grad.data[input.index(b, ic, y0 + r, x0)];
                            const double* k_row = &layer.kernels[layer.kernel_index(oc, ic, r, 0)];
                            for (int c = 0; c < layer.kernel_w; ++c) {
                                ig_row[c] += g * k_row[c];
                            }
                        }
                    }
                }
            }
        }
    }
    return grads;
}

Tensor relu_forward(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data) {
        if (v < 0.0) v = 0.0;
    }
    return out;
}

Tensor relu_backward(const Tensor& pre_activation, const Tensor& upstream_grad) {
    if (!pre_activation.same_shape(upstream_grad)) {
        throw std::invalid_argument("relu_backward: shape mismatch");
    }
    Tensor out = upstream_grad;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (!(pre_activation.data[i] > 0.0)) {
            out.data[i] = 0.0;
        }
    }
    return out;
}

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer) {
    if (static_cast<int>(input.size()) != layer.in_size) {
        throw std::invalid_argument("dense_forward: input length " + std::to_string(input.size()) +
                                    " does not match layer in_size " +
                                    std::to_string(layer.in_size));
    }
    std::vector<double> out(static_cast<std::size_t>(layer.out_size));
    for (int o = 0; o < layer.out_size; ++o) {
        double acc = layer.bias[static_cast<std::size_t>(o)];
        const double* w = &layer.weights[static_cast<std::size_t>(o) * layer.in_size];
        for (int i = 0; i < layer.in_size; ++i) {
            acc += w[i] * input[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(o)] = acc;
    }
    return out;
}

DenseGrads dense_backward(std::span<const double> input, const DenseLayer& layer,
                          std::span<const double> upstream_grad) {
    if (static_cast<int>(input.size()) != layer.in_size) {
        throw std::invalid_argument("dense_backward: input length mismatch");
    }
    if (static_cast<int>(upstream_grad.size()) != layer.out_size) {
        throw std::invalid_argument("dense_backward: upstream length mismatch");
    }
    DenseGrads grads;
    grads.weight_grad.assign(layer.weights.size(), 0.0);
    grads.bias_grad.assign(layer.bias.size(), 0.0);
    grads.input_grad.assign(input.size(), 0.0);
    for (int o = 0; o < layer.out_size; ++o) {
        const double g = upstream_grad[static_cast<std::size_t>(o)];
        grads.bias_grad[static_cast<std::size_t>(o)] = g;
        const double* w = &layer.weights[static_cast<std::size_t>(o) * layer.in_size];
        double* wg = &grads.weight_grad[static_cast<std::size_t>(o) * layer.in_size];
        for (int i = 0; i < layer.in_size; ++i) {
            wg[i] = g * input[static_cast<std::size_t>(i)];
            grads.input_grad[static_cast<std::size_t>(i)] += g * w[i];
        }
    }
    return grads;
}

LossGrad mse_loss(double pred, double target) {
    require_finite(pred, "mse_loss pred");
    require_finite(target, "mse_loss target");
    const double diff = pred - target;
    return {diff * diff, 2.0 * diff};
}

} // namespace pop::nn
