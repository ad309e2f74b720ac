#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pop/dataset.hpp"
#include "pop/matrix.hpp"
#include "pop/nn.hpp"

namespace pop {

struct PopConfig {
    int sensors = 16;
    int width = 250;
    int filters1 = 8;
    int filters2 = 16;
    int stride_w = 2;  // applied to both conv layers
    std::uint64_t seed = 0;

    int conv1_out_width() const { return (width - 4) / stride_w + 1; }
    int conv2_out_width() const { return (conv1_out_width() - 4) / stride_w + 1; }
    void validate() const;
};

// conv(sensors x 4) -> ReLU -> conv(1 x 4) -> ReLU -> dense(1).
// The first kernel spans all sensor rows, so both feature maps are 1 high.
struct PopNetwork {
    PopConfig config;
    nn::ConvLayer conv1;
    nn::ConvLayer conv2;
    nn::DenseLayer head;
};

// Parameter array in declaration order, with bias arrays flagged so the
// optimizer can skip weight decay on them.
struct ParamView {
    const char* name;
    double* data;
    std::size_t size;
    bool is_bias;
};

inline constexpr int kParamArrayCount = 6;

// Gradients for the six parameter arrays, in parameter_views() order.
struct PopGrads {
    std::array<std::vector<double>, kParamArrayCount> arrays;
    double loss = 0.0;
};

// Seeded construction; identical seeds give identical parameters.
PopNetwork build(const PopConfig& config);

std::vector<ParamView> parameter_views(PopNetwork& network);
std::size_t parameter_count(const PopNetwork& network);

// Forward pass with the intermediates backprop needs.
struct ForwardTrace {
    nn::Tensor input;
    nn::Tensor pre1, act1;
    nn::Tensor pre2, act2;
    double prediction = 0.0;
};

ForwardTrace forward(const PopNetwork& network, const SensorMatrix& matrix);

// Single-scalar pleasantness prediction; positive means pleasant.
double predict(const PopNetwork& network, const SensorMatrix& matrix);

// Median prediction over the repeats of one odor.
double predict_odor(const PopNetwork& network, std::span<const OdorSample> repeats);

// Squared-error loss on one sample plus gradients for every parameter array.
PopGrads loss_and_grads(const PopNetwork& network, const SensorMatrix& matrix, double target);

PopGrads zero_grads(const PopNetwork& network);
void accumulate_grads(PopGrads& into, const PopGrads& from);
void scale_grads(PopGrads& grads, double factor);

// Flat binary weight file: "POPW" magic, version, layer count, per-layer
// shape ints, then parameters in declaration order, all little-endian 64-bit.
void save_weights(const PopNetwork& network, const std::filesystem::path& path);
PopNetwork load_weights(const std::filesystem::path& path);

} // namespace pop
