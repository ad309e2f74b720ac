#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pop::nn {

// Dense row-major (batch, channels, height, width) tensor, double precision.
struct Tensor {
    int batch = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int b, int c, int h, int w, double fill = 0.0);

    std::size_t size() const { return data.size(); }

    std::size_t index(int b, int c, int h, int w) const {
        return ((static_cast<std::size_t>(b) * channels + c) * height + h) *
                   static_cast<std::size_t>(width) +
               w;
    }
    double& at(int b, int c, int h, int w) { return data[index(b, c, h, w)]; }
    double at(int b, int c, int h, int w) const { return data[index(b, c, h, w)]; }

    bool same_shape(const Tensor& other) const {
        return batch == other.batch && channels == other.channels && height == other.height &&
               width == other.width;
    }
};

// Strided 2-D cross-correlation layer, valid padding.
struct ConvLayer {
    int out_channels = 0;
    int in_channels = 0;
    int kernel_h = 1;
    int kernel_w = 1;
    int stride_h = 1;
    int stride_w = 1;
    std::vector<double> kernels;  // [oc][ic][kh][kw]
    std::vector<double> biases;   // [oc]

    ConvLayer() = default;
    ConvLayer(int oc, int ic, int kh, int kw, int sh, int sw);

    std::size_t kernel_index(int oc, int ic, int r, int c) const {
        return ((static_cast<std::size_t>(oc) * in_channels + ic) * kernel_h + r) *
                   static_cast<std::size_t>(kernel_w) +
               c;
    }
    int out_height(int in_h) const { return (in_h - kernel_h) / stride_h + 1; }
    int out_width(int in_w) const { return (in_w - kernel_w) / stride_w + 1; }
};

struct DenseLayer {
    int out_size = 0;
    int in_size = 0;
    std::vector<double> weights;  // [out][in]
    std::vector<double> bias;     // [out]

    DenseLayer() = default;
    DenseLayer(int out, int in);
};

struct ConvGrads {
    std::vector<double> kernel_grad;
    std::vector<double> bias_grad;
    Tensor input_grad;
};

struct DenseGrads {
    std::vector<double> weight_grad;
    std::vector<double> bias_grad;
    std::vector<double> input_grad;
};

struct LossGrad {
    double loss = 0.0;
    double dpred = 0.0;
};

// Pre-activation strided convolution: out = sum(window .* kernel) + bias.
// Output height = (H - kh) / sh + 1, width = (W - kw) / sw + 1.
Tensor conv_forward(const Tensor& input, const ConvLayer& layer);

// Independent serial reference for conv_forward; same contract, no shared code.
Tensor conv_reference(const Tensor& input, const ConvLayer& layer);

ConvGrads conv_backward(const Tensor& input, const ConvLayer& layer, const Tensor& upstream_grad);

Tensor relu_forward(const Tensor& x);
// Upstream masked where the pre-activation is strictly positive (subgradient 0 at 0).
Tensor relu_backward(const Tensor& pre_activation, const Tensor& upstream_grad);

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer);
DenseGrads dense_backward(std::span<const double> input, const DenseLayer& layer,
                          std::span<const double> upstream_grad);

// Squared error for one scalar prediction: loss = (pred - target)^2.
LossGrad mse_loss(double pred, double target);

} // namespace pop::nn
