#include "pop/nn.hpp"

#include <stdexcept>
#include <vector>

namespace pop::nn {

// Textbook sliding-window cross-correlation, kept deliberately serial and
// written without any of the fast path's helpers so the two routes can be
// checked against each other.
Tensor conv_reference(const Tensor& input, const ConvLayer& layer) {
    const int nb = input.batch;
    const int ic = input.channels;
    const int ih = input.height;
    const int iw = input.width;
    const int oc = layer.out_channels;
    const int kh = layer.kernel_h;
    const int kw = layer.kernel_w;
    const int sh = layer.stride_h;
    const int sw = layer.stride_w;

    if (nb < 1 || ic < 1 || ih < 1 || iw < 1) {
        throw std::invalid_argument("conv_reference: input tensor has empty dimensions");
    }
    if (ic != layer.in_channels) {
        throw std::invalid_argument("conv_reference: channel count mismatch");
    }
    if (kh > ih || kw > iw) {
        throw std::invalid_argument("conv_reference: kernel larger than input");
    }
    if (sh < 1 || sw < 1) {
        throw std::invalid_argument("conv_reference: stride components must be >= 1");
    }

    int oh = 0;
    while (oh * sh + kh <= ih) ++oh;
    int ow = 0;
    while (ow * sw + kw <= iw) ++ow;

    Tensor out(nb, oc, oh, ow);

    auto in_at = [&](int b, int c, int y, int x) {
        return input.data[((static_cast<std::size_t>(b) * ic + c) * ih + y) * iw + x];
    };
    auto kern_at = [&](int o, int c, int y, int x) {
        return layer.kernels[((static_cast<std::size_t>(o) * ic + c) * kh + y) * kw + x];
    };

    for (int b = 0; b < nb; ++b) {
        for (int o = 0; o < oc; ++o) {
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    double sum = 0.0;
                    for (int c = 0; c < ic; ++c) {
                        for (int r = 0; r < kh; ++r) {
                            for (int s = 0; s < kw; ++s) {
                                sum += in_at(b, c, y * sh + r, x * sw + s) * kern_at(o, c, r, s);
                            }
                        }
                    }
                    out.data[((static_cast<std::size_t>(b) * oc + o) * oh + y) * ow + x] =
                        sum + layer.biases[static_cast<std::size_t>(o)];
                }
            }
        }
    }
    return out;
}

} // namespace pop::nn
