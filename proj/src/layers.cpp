#include "wmr/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmr/error.hpp"

namespace wmr {

LayerParams LayerParams::conv(int out_channels, int in_channels, int kernel_h, int kernel_w) {
    LayerParams p;
    p.weights = Tensor({out_channels, in_channels, kernel_h, kernel_w});
    p.biases = Tensor({out_channels});
    p.grad_weights = Tensor(p.weights.shape());
    p.grad_biases = Tensor(p.biases.shape());
    return p;
}

LayerParams LayerParams::dense(int out_features, int in_features) {
    LayerParams p;
    p.weights = Tensor({out_features, in_features});
    p.biases = Tensor({out_features});
    p.grad_weights = Tensor(p.weights.shape());
    p.grad_biases = Tensor(p.biases.shape());
    return p;
}

void LayerParams::zero_grads() {
    grad_weights.fill(0.0);
    grad_biases.fill(0.0);
}

bool LayerParams::grads_finite() const {
    return grad_weights.all_finite() && grad_biases.all_finite();
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (dropout_ratio < 0.0 || dropout_ratio >= 1.0) {
        throw ConfigError("dropout_ratio must lie in [0, 1)");
    }
    if (batch_images < 1) throw ConfigError("batch_images must be at least 1");
    if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be at least 1");
    if (lr_decay_factor <= 0.0) throw ConfigError("lr_decay_factor must be positive");
    if (rois_per_batch < 1) throw ConfigError("rois_per_batch must be at least 1");
}

double learning_rate_at(const TrainConfig& config, std::int64_t iteration) {
    const std::int64_t steps = iteration / config.lr_decay_every;
    return config.learning_rate / std::pow(config.lr_decay_factor, static_cast<double>(steps));
}

// --- Convolution -------------------------------------------------------------

static void check_conv_shapes(const Tensor& input, const LayerParams& params, int stride,
                              int pad) {
    if (input.rank() != 3) throw ConfigError("conv2d input must be CxHxW");
    if (params.weights.rank() != 4) throw ConfigError("conv2d weights must be OCxICxKHxKW");
    if (params.weights.extent(1) != input.extent(0)) {
        throw ConfigError("conv2d channel mismatch: input " + input.shape_string() +
                          " vs weights " + params.weights.shape_string());
    }
    if (stride < 1 || pad < 0) throw ConfigError("conv2d stride/pad out of range");
    if (params.weights.extent(2) > input.extent(1) + 2 * pad ||
        params.weights.extent(3) > input.extent(2) + 2 * pad) {
        throw ConfigError("conv2d kernel larger than padded input");
    }
}

Tensor conv2d(const Tensor& input, const LayerParams& params, int stride, int pad) {
    check_conv_shapes(input, params, stride, pad);
    const int in_c = input.extent(0), in_h = input.extent(1), in_w = input.extent(2);
    const int out_c = params.weights.extent(0);
    const int k_h = params.weights.extent(2), k_w = params.weights.extent(3);
    const int out_h = (in_h + 2 * pad - k_h) / stride + 1;
    const int out_w = (in_w + 2 * pad - k_w) / stride + 1;

    Tensor output({out_c, out_h, out_w});
    for (int oc = 0; oc < out_c; ++oc) {
        const double bias = params.biases[static_cast<std::size_t>(oc)];
        double* out_plane = output.data() + static_cast<std::size_t>(oc) * out_h * out_w;
        for (int i = 0; i < out_h * out_w; ++i) out_plane[i] = bias;
        for (int ic = 0; ic < in_c; ++ic) {
            const double* in_plane = input.data() + static_cast<std::size_t>(ic) * in_h * in_w;
            const double* kernel = params.weights.data() +
                                   (static_cast<std::size_t>(oc) * in_c + ic) * k_h * k_w;
            for (int kh = 0; kh < k_h; ++kh) {
                for (int kw = 0; kw < k_w; ++kw) {
                    const double w = kernel[kh * k_w + kw];
                    for (int oy = 0; oy < out_h; ++oy) {
                        const int iy = oy * stride - pad + kh;
                        if (iy < 0 || iy >= in_h) continue;
                        const double* in_row = in_plane + static_cast<std::size_t>(iy) * in_w;
                        double* out_row = out_plane + static_cast<std::size_t>(oy) * out_w;
                        // Valid ox range so that ix = ox*stride - pad + kw stays in bounds.
                        const int shift = kw - pad;
                        int ox0 = 0;
                        if (shift < 0) ox0 = (-shift + stride - 1) / stride;
                        const int span = in_w - 1 - shift;
                        const int ox1 = span < 0 ? 0 : std::min(out_w, span / stride + 1);
                        if (stride == 1) {
                            const double* src = in_row + shift + ox0;
                            double* dst = out_row + ox0;
                            const int n = ox1 - ox0;
                            for (int i = 0; i < n; ++i) dst[i] += w * src[i];
                        } else {
                            for (int ox = ox0; ox < ox1; ++ox) {
                                out_row[ox] += w * in_row[ox * stride + shift];
                            }
                        }
                    }
                }
            }
        }
    }
    return output;
}

Tensor conv2d_backward(const Tensor& input, LayerParams& params, int stride, int pad,
                       const Tensor& grad_output) {
    check_conv_shapes(input, params, stride, pad);
    const int in_c = input.extent(0), in_h = input.extent(1), in_w = input.extent(2);
    const int out_c = params.weights.extent(0);
    const int k_h = params.weights.extent(2), k_w = params.weights.extent(3);
    const int out_h = grad_output.extent(1), out_w = grad_output.extent(2);
    if (grad_output.extent(0) != out_c) throw ConfigError("conv2d_backward grad channel mismatch");

    Tensor grad_input(input.shape());
    for (int oc = 0; oc < out_c; ++oc) {
        const double* go_plane = grad_output.data() + static_cast<std::size_t>(oc) * out_h * out_w;
        double bias_sum = 0.0;
        for (int i = 0; i < out_h * out_w; ++i) bias_sum += go_plane[i];
        params.grad_biases[static_cast<std::size_t>(oc)] += bias_sum;

        for (int ic = 0; ic < in_c; ++ic) {
            const double* in_plane = input.data() + static_cast<std::size_t>(ic) * in_h * in_w;
            double* gi_plane = grad_input.data() + static_cast<std::size_t>(ic) * in_h * in_w;
            const double* kernel = params.weights.data() +
                                   (static_cast<std::size_t>(oc) * in_c + ic) * k_h * k_w;
            double* gkernel = params.grad_weights.data() +
                              (static_cast<std::size_t>(oc) * in_c + ic) * k_h * k_w;
            for (int kh = 0; kh < k_h; ++kh) {
                for (int kw = 0; kw < k_w; ++kw) {
                    const double w = kernel[kh * k_w + kw];
                    double wsum = 0.0;
                    for (int oy = 0; oy < out_h; ++oy) {
                        const int iy = oy * stride - pad + kh;
                        if (iy < 0 || iy >= in_h) continue;
                        const double* in_row = in_plane + static_cast<std::size_t>(iy) * in_w;
                        double* gi_row = gi_plane + static_cast<std::size_t>(iy) * in_w;
                        const double* go_row = go_plane + static_cast<std::size_t>(oy) * out_w;
                        const int shift = kw - pad;
                        int ox0 = 0;
                        if (shift < 0) ox0 = (-shift + stride - 1) / stride;
                        const int span = in_w - 1 - shift;
                        const int ox1 = span < 0 ? 0 : std::min(out_w, span / stride + 1);
                        if (stride == 1) {
                            const double* in_src = in_row + shift + ox0;
                            double* gi_dst = gi_row + shift + ox0;
                            const double* go_src = go_row + ox0;
                            const int n = ox1 - ox0;
                            for (int i = 0; i < n; ++i) {
                                wsum += in_src[i] * go_src[i];
                                gi_dst[i] += w * go_src[i];
                            }
                        } else {
                            for (int ox = ox0; ox < ox1; ++ox) {
                                const int ix = ox * stride + shift;
                                wsum += in_row[ix] * go_row[ox];
                                gi_row[ix] += w * go_row[ox];
                            }
                        }
                    }
                    gkernel[kh * k_w + kw] += wsum;
                }
            }
        }
    }
    return grad_input;
}

// --- Max pooling ---------------------------------------------------------------

static void check_pool_shapes(const Tensor& input, int window, int stride) {
    if (input.rank() != 3) throw ConfigError("max_pool2d input must be CxHxW");
    if (window < 1 || stride < 1) throw ConfigError("max_pool2d window/stride out of range");
    if (window > input.extent(1) || window > input.extent(2)) {
        throw ConfigError("max_pool2d window larger than input");
    }
}

Tensor max_pool2d(const Tensor& input, int window, int stride) {
    check_pool_shapes(input, window, stride);
    const int c = input.extent(0), in_h = input.extent(1), in_w = input.extent(2);
    const int out_h = (in_h - window) / stride + 1;
    const int out_w = (in_w - window) / stride + 1;
    Tensor output({c, out_h, out_w});
    for (int ch = 0; ch < c; ++ch) {
        for (int oy = 0; oy < out_h; ++oy) {
            for (int ox = 0; ox < out_w; ++ox) {
                double best = -std::numeric_limits<double>::infinity();
                for (int wy = 0; wy < window; ++wy) {
                    for (int wx = 0; wx < window; ++wx) {
                        best = std::max(best, input.at(ch, oy * stride + wy, ox * stride + wx));
                    }
                }
                output.at(ch, oy, ox) = best;
            }
        }
    }
    return output;
}

Tensor max_pool2d_backward(const Tensor& input, int window, int stride,
                           const Tensor& grad_output) {
    check_pool_shapes(input, window, stride);
    const int c = input.extent(0);
    const int out_h = grad_output.extent(1), out_w = grad_output.extent(2);
    Tensor grad_input(input.shape());
    for (int ch = 0; ch < c; ++ch) {
        for (int oy = 0; oy < out_h; ++oy) {
            for (int ox = 0; ox < out_w; ++ox) {
                double best = -std::numeric_limits<double>::infinity();
                int best_y = 0, best_x = 0;
                for (int wy = 0; wy < window; ++wy) {
                    for (int wx = 0; wx < window; ++wx) {
                        const int iy = oy * stride + wy, ix = ox * stride + wx;
                        const double v = input.at(ch, iy, ix);
                        if (v > best) {  // strict: first max in scan order wins ties
                            best = v;
                            best_y = iy;
                            best_x = ix;
                        }
                    }
                }
                grad_input.at(ch, best_y, best_x) += grad_output.at(ch, oy, ox);
            }
        }
    }
    return grad_input;
}

// --- Fully connected -------------------------------------------------------------

Tensor fully_connected(const Tensor& input, const LayerParams& params) {
    const int out_n = params.weights.extent(0);
    const int in_n = params.weights.extent(1);
    if (static_cast<std::size_t>(in_n) != input.size()) {
        throw ConfigError("fully_connected input length " + std::to_string(input.size()) +
                          " does not match weight columns " + std::to_string(in_n));
    }
    Tensor output({out_n});
    const double* x = input.data();
    for (int o = 0; o < out_n; ++o) {
        const double* row = params.weights.data() + static_cast<std::size_t>(o) * in_n;
        double acc = params.biases[static_cast<std::size_t>(o)];
        for (int i = 0; i < in_n; ++i) acc += row[i] * x[i];
        output[static_cast<std::size_t>(o)] = acc;
    }
    return output;
}

Tensor fully_connected_backward(const Tensor& input, LayerParams& params,
                                const Tensor& grad_output) {
    const int out_n = params.weights.extent(0);
    const int in_n = params.weights.extent(1);
    if (static_cast<std::size_t>(in_n) != input.size()) {
        throw ConfigError("fully_connected_backward input length mismatch");
    }
    if (static_cast<std::size_t>(out_n) != grad_output.size()) {
        throw ConfigError("fully_connected_backward grad length mismatch");
    }
    Tensor grad_input(input.shape());
    const double* x = input.data();
    double* gx = grad_input.data();
    for (int o = 0; o < out_n; ++o) {
        const double g = grad_output[static_cast<std::size_t>(o)];
        params.grad_biases[static_cast<std::size_t>(o)] += g;
        const double* row = params.weights.data() + static_cast<std::size_t>(o) * in_n;
        double* grow = params.grad_weights.data() + static_cast<std::size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) {
            grow[i] += g * x[i];
            gx[i] += g * row[i];
        }
    }
    return grad_input;
}

// --- Pointwise ---------------------------------------------------------------------

Tensor relu(const Tensor& input) {
    Tensor output(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) {
        output[i] = input[i] > 0.0 ? input[i] : 0.0;
    }
    return output;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
    Tensor grad_input(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) {
        grad_input[i] = input[i] > 0.0 ? grad_output[i] : 0.0;
    }
    return grad_input;
}

Tensor softmax(const Tensor& scores) {
    if (scores.empty()) throw ConfigError("softmax of empty vector");
    double max_score = scores[0];
    for (std::size_t i = 1; i < scores.size(); ++i) max_score = std::max(max_score, scores[i]);
    Tensor probs(scores.shape());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp(scores[i] - max_score);
        sum += probs[i];
    }
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] /= sum;
    return probs;
}

double cross_entropy_loss(const Tensor& probs, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
        throw InputError("cross_entropy_loss label out of range");
    }
    const double p = std::max(probs[static_cast<std::size_t>(label)], 1e-12);
    return -std::log(p);
}

Tensor softmax_cross_entropy_backward(const Tensor& probs, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
        throw InputError("softmax_cross_entropy_backward label out of range");
    }
    Tensor grad(probs.shape());
    for (std::size_t i = 0; i < probs.size(); ++i) grad[i] = probs[i];
    grad[static_cast<std::size_t>(label)] -= 1.0;
    return grad;
}

// --- Dropout -----------------------------------------------------------------------

Tensor dropout(const Tensor& input, double ratio, DropoutMode mode, Rng& rng, Tensor* mask) {
    if (ratio < 0.0 || ratio >= 1.0) throw ConfigError("dropout ratio must lie in [0, 1)");
    if (mode == DropoutMode::kEval || ratio == 0.0) {
        if (mask) *mask = Tensor(input.shape(), 1.0);
        return input;
    }
    const double keep_scale = 1.0 / (1.0 - ratio);
    Tensor m(input.shape());
    Tensor output(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double keep = rng.uniform() >= ratio ? keep_scale : 0.0;
        m[i] = keep;
        output[i] = input[i] * keep;
    }
    if (mask) *mask = std::move(m);
    return output;
}

Tensor dropout_apply_mask(const Tensor& input, const Tensor& mask) {
    if (!input.same_shape(mask)) throw ConfigError("dropout mask shape mismatch");
    Tensor output(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) output[i] = input[i] * mask[i];
    return output;
}

Tensor dropout_backward(const Tensor& grad_output, const Tensor& mask) {
    return dropout_apply_mask(grad_output, mask);
}

// --- Smooth L1 -----------------------------------------------------------------------

double smooth_l1_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw ConfigError("smooth_l1_loss shape mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        const double a = std::abs(d);
        loss += a < 1.0 ? 0.5 * d * d : a - 0.5;
    }
    return loss;
}

Tensor smooth_l1_backward(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw ConfigError("smooth_l1_backward shape mismatch");
    Tensor grad(pred.shape());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        grad[i] = std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
    }
    return grad;
}

// --- SGD --------------------------------------------------------------------------------

void sgd_step(LayerParams& params, const TrainConfig& config, std::int64_t iteration) {
    if (!params.grads_finite()) {
        throw NumericError("sgd_step: non-finite gradients, step aborted");
    }
    const double lr = learning_rate_at(config, iteration);
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        params.weights[i] -= lr * params.grad_weights[i];
    }
    for (std::size_t i = 0; i < params.biases.size(); ++i) {
        params.biases[i] -= lr * params.grad_biases[i];
    }
    params.zero_grads();
}

void init_uniform_fan_in(LayerParams& params, int fan_in, Rng& rng) {
    const double bound = std::sqrt(3.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        params.weights[i] = rng.uniform(-bound, bound);
    }
    params.biases.fill(0.0);
}

}  // namespace wmr
