#include "pop/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "pop/io.hpp"
#include "pop/util.hpp"

namespace pop {

namespace {

constexpr char kMagic[4] = {'P', 'O', 'P', 'W'};
constexpr std::int64_t kFormatVersion = 1;
constexpr std::int64_t kConvLayerTag = 1;
constexpr std::int64_t kDenseLayerTag = 2;

void init_uniform(std::vector<double>& weights, int fan_in, int fan_out, std::mt19937_64& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-s, s);
    for (double& w : weights) {
        w = dist(rng);
    }
}

void write_i64(std::ostream& out, std::int64_t value) {
    unsigned char bytes[8];
    auto u = static_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::int64_t read_i64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) {
        throw IoError("weight file truncated while reading header");
    }
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) {
        u |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return static_cast<std::int64_t>(u);
}

void write_f64_array(std::ostream& out, const std::vector<double>& values) {
    for (double v : values) {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        unsigned char bytes[8];
        for (int i = 0; i < 8; ++i) {
            bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
        }
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

void read_f64_array(std::istream& in, std::vector<double>& values) {
    for (double& v : values) {
        unsigned char bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) {
            throw IoError("weight file truncated while reading parameters");
        }
        std::uint64_t u = 0;
        for (int i = 0; i < 8; ++i) {
            u |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        }
        std::memcpy(&v, &u, 8);
    }
}

} // namespace

void PopConfig::validate() const {
    if (sensors < 1) {
        throw std::invalid_argument("PopConfig: sensors must be >= 1");
    }
    if (filters1 < 1 || filters2 < 1) {
        throw std::invalid_argument("PopConfig: filter counts must be >= 1");
    }
    if (stride_w < 1) {
        throw std::invalid_argument("PopConfig: stride_w must be >= 1");
    }
    if (width < 8 || conv1_out_width() < 4) {
        throw std::invalid_argument("PopConfig: width " + std::to_string(width) +
                                    " too small for two 4-wide kernels at stride " +
                                    std::to_string(stride_w));
    }
}

PopNetwork build(const PopConfig& config) {
    config.validate();

    PopNetwork net;
    net.config = config;
    net.conv1 = nn::ConvLayer(config.filters1, 1, config.sensors, 4, 1, config.stride_w);
    net.conv2 = nn::ConvLayer(config.filters2, config.filters1, 1, 4, 1, config.stride_w);
    net.head = nn::DenseLayer(1, config.filters2 * config.conv2_out_width());

    std::mt19937_64 rng(config.seed);
    init_uniform(net.conv1.kernels, 1 * config.sensors * 4, config.filters1 * config.sensors * 4,
                 rng);
    init_uniform(net.conv2.kernels, config.filters1 * 1 * 4, config.filters2 * 1 * 4, rng);
    init_uniform(net.head.weights, net.head.in_size, net.head.out_size, rng);
    // Biases start at zero.
    return net;
}

std::vector<ParamView> parameter_views(PopNetwork& net) {
    return {
        {"conv1.kernels", net.conv1.kernels.data(), net.conv1.kernels.size(), false},
        {"conv1.biases", net.conv1.biases.data(), net.conv1.biases.size(), true},
        {"conv2.kernels", net.conv2.kernels.data(), net.conv2.kernels.size(), false},
        {"conv2.biases", net.conv2.biases.data(), net.conv2.biases.size(), true},
        {"head.weights", net.head.weights.data(), net.head.weights.size(), false},
        {"head.bias", net.head.bias.data(), net.head.bias.size(), true},
    };
}

std::size_t parameter_count(const PopNetwork& net) {
    return net.conv1.kernels.size() + net.conv1.biases.size() + net.conv2.kernels.size() +
           net.conv2.biases.size() + net.head.weights.size() + net.head.bias.size();
}

ForwardTrace forward(const PopNetwork& net, const SensorMatrix& matrix) {
    if (matrix.rows() != net.config.sensors || matrix.cols() != net.config.width) {
        throw std::invalid_argument("predict: input is " + std::to_string(matrix.rows()) + "x" +
                                    std::to_string(matrix.cols()) + ", network expects " +
                                    std::to_string(net.config.sensors) + "x" +
                                    std::to_string(net.config.width));
    }
    ForwardTrace t;
    t.input = nn::Tensor(1, 1, matrix.rows(), matrix.cols());
    t.input.data = matrix.values();
    t.pre1 = nn::conv_forward(t.input, net.conv1);
    t.act1 = nn::relu_forward(t.pre1);
    t.pre2 = nn::conv_forward(t.act1, net.conv2);
    t.act2 = nn::relu_forward(t.pre2);
    t.prediction = nn::dense_forward(t.act2.data, net.head)[0];
    return t;
}

double predict(const PopNetwork& net, const SensorMatrix& matrix) {
    return forward(net, matrix).prediction;
}

double predict_odor(const PopNetwork& net, std::span<const OdorSample> repeats) {
    if (repeats.empty()) {
        throw std::invalid_argument("predict_odor: empty repeat list");
    }
    for (const auto& s : repeats) {
        if (s.odor_id != repeats.front().odor_id) {
            throw std::invalid_argument("predict_odor: repeats mix odor ids '" +
                                        repeats.front().odor_id + "' and '" + s.odor_id + "'");
        }
    }
    std::vector<double> preds;
    preds.reserve(repeats.size());
    for (const auto& s : repeats) {
        preds.push_back(predict(net, s.matrix));
    }
    return median_of(std::move(preds));
}

PopGrads zero_grads(const PopNetwork& net) {
    PopGrads g;
    g.arrays[0].assign(net.conv1.kernels.size(), 0.0);
    g.arrays[1].assign(net.conv1.biases.size(), 0.0);
    g.arrays[2].assign(net.conv2.kernels.size(), 0.0);
    g.arrays[3].assign(net.conv2.biases.size(), 0.0);
    g.arrays[4].assign(net.head.weights.size(), 0.0);
    g.arrays[5].assign(net.head.bias.size(), 0.0);
    return g;
}

PopGrads loss_and_grads(const PopNetwork& net, const SensorMatrix& matrix, double target) {
    const ForwardTrace t = forward(net, matrix);
    const auto [loss, dpred] = nn::mse_loss(t.prediction, target);

    const std::vector<double> upstream_head = {dpred};
    const nn::DenseGrads head_grads = nn::dense_backward(t.act2.data, net.head, upstream_head);

    nn::Tensor d_act2 = t.act2;  // reuse shape
    d_act2.data = head_grads.input_grad;
    const nn::Tensor d_pre2 = nn::relu_backward(t.pre2, d_act2);
    const nn::ConvGrads conv2_grads = nn::conv_backward(t.act1, net.conv2, d_pre2);

    const nn::Tensor d_pre1 = nn::relu_backward(t.pre1, conv2_grads.input_grad);
    const nn::ConvGrads conv1_grads = nn::conv_backward(t.input, net.conv1, d_pre1);

    PopGrads g;
    g.loss = loss;
    g.arrays[0] = conv1_grads.kernel_grad;
    g.arrays[1] = conv1_grads.bias_grad;
    g.arrays[2] = conv2_grads.kernel_grad;
    g.arrays[3] = conv2_grads.bias_grad;
    g.arrays[4] = head_grads.weight_grad;
    g.arrays[5] = head_grads.bias_grad;
    return g;
}

void accumulate_grads(PopGrads& into, const PopGrads& from) {
    for (int a = 0; a < kParamArrayCount; ++a) {
        if (into.arrays[a].size() != from.arrays[a].size()) {
            throw std::invalid_argument("accumulate_grads: array size mismatch");
        }
        for (std::size_t i = 0; i < into.arrays[a].size(); ++i) {
            into.arrays[a][i] += from.arrays[a][i];
        }
    }
    into.loss += from.loss;
}

void scale_grads(PopGrads& grads, double factor) {
    for (auto& arr : grads.arrays) {
        for (double& v : arr) {
            v *= factor;
        }
    }
    grads.loss *= factor;
}

void save_weights(const PopNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open weight file for writing: " + path.string());
    }
    out.write(kMagic, 4);
    write_i64(out, kFormatVersion);
    write_i64(out, 3);  // layer count

    // Conv records carry their input plane so the exact network geometry
    // (including the pre-stride width) survives a round trip.
    const auto write_conv = [&](const nn::ConvLayer& c, int in_h, int in_w) {
        write_i64(out, kConvLayerTag);
        write_i64(out, c.out_channels);
        write_i64(out, c.in_channels);
        write_i64(out, c.kernel_h);
        write_i64(out, c.kernel_w);
        write_i64(out, c.stride_h);
        write_i64(out, c.stride_w);
        write_i64(out, in_h);
        write_i64(out, in_w);
    };
    write_conv(net.conv1, net.config.sensors, net.config.width);
    write_conv(net.conv2, 1, net.config.conv1_out_width());
    write_i64(out, kDenseLayerTag);
    write_i64(out, net.head.out_size);
    write_i64(out, net.head.in_size);

    write_f64_array(out, net.conv1.kernels);
    write_f64_array(out, net.conv1.biases);
    write_f64_array(out, net.conv2.kernels);
    write_f64_array(out, net.conv2.biases);
    write_f64_array(out, net.head.weights);
    write_f64_array(out, net.head.bias);
    if (!out) {
        throw IoError("failed writing weight file: " + path.string());
    }
}

PopNetwork load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open weight file: " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not a POPW weight file: " + path.string());
    }
    const std::int64_t version = read_i64(in);
    if (version != kFormatVersion) {
        throw IoError("unsupported weight file version " + std::to_string(version));
    }
    const std::int64_t layers = read_i64(in);
    if (layers != 3) {
        throw IoError("unexpected layer count " + std::to_string(layers));
    }

    struct ConvRecord {
        std::int64_t oc, ic, kh, kw, sh, sw, in_h, in_w;
    };
    const auto read_conv = [&]() {
        if (read_i64(in) != kConvLayerTag) {
            throw IoError("weight file: expected conv layer record");
        }
        ConvRecord r{};
        r.oc = read_i64(in);
        r.ic = read_i64(in);
        r.kh = read_i64(in);
        r.kw = read_i64(in);
        r.sh = read_i64(in);
        r.sw = read_i64(in);
        r.in_h = read_i64(in);
        r.in_w = read_i64(in);
        return r;
    };
    const ConvRecord c1 = read_conv();
    const ConvRecord c2 = read_conv();
    if (read_i64(in) != kDenseLayerTag) {
        throw IoError("weight file: expected dense layer record");
    }
    const std::int64_t head_out = read_i64(in);
    const std::int64_t head_in = read_i64(in);

    PopConfig cfg;
    cfg.sensors = static_cast<int>(c1.in_h);
    cfg.width = static_cast<int>(c1.in_w);
    cfg.filters1 = static_cast<int>(c1.oc);
    cfg.filters2 = static_cast<int>(c2.oc);
    cfg.stride_w = static_cast<int>(c1.sw);
    cfg.validate();
    const bool arch_ok = c1.ic == 1 && c1.kh == c1.in_h && c1.kw == 4 && c1.sh == 1 &&
                         c2.ic == c1.oc && c2.kh == 1 && c2.kw == 4 && c2.sh == 1 &&
                         c2.sw == c1.sw && c2.in_w == cfg.conv1_out_width() && head_out == 1 &&
                         head_in == static_cast<std::int64_t>(cfg.filters2) * cfg.conv2_out_width();
    if (!arch_ok) {
        throw IoError("weight file: inconsistent layer shapes");
    }

    PopNetwork net;
    net.config = cfg;
    net.conv1 = nn::ConvLayer(cfg.filters1, 1, cfg.sensors, 4, 1, cfg.stride_w);
    net.conv2 = nn::ConvLayer(cfg.filters2, cfg.filters1, 1, 4, 1, cfg.stride_w);
    net.head = nn::DenseLayer(1, static_cast<int>(head_in));

    read_f64_array(in, net.conv1.kernels);
    read_f64_array(in, net.conv1.biases);
    read_f64_array(in, net.conv2.kernels);
    read_f64_array(in, net.conv2.biases);
    read_f64_array(in, net.head.weights);
    read_f64_array(in, net.head.bias);
    return net;
}

} // namespace pop
