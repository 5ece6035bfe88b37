#pragma once

#include <cstdint>

#include "wmr/rng.hpp"
#include "wmr/tensor.hpp"

namespace wmr {

// Weights plus matching gradient accumulators. Gradient tensors always share
// their parameter's shape and are zeroed by sgd_step after an update.
struct LayerParams {
    Tensor weights;
    Tensor biases;
    Tensor grad_weights;
    Tensor grad_biases;

    static LayerParams conv(int out_channels, int in_channels, int kernel_h, int kernel_w);
    static LayerParams dense(int out_features, int in_features);

    void zero_grads();
    bool grads_finite() const;
};

struct TrainConfig {
    double learning_rate = 0.0001;
    double lr_decay_factor = 10.0;
    std::int64_t lr_decay_every = 50000;
    double dropout_ratio = 0.6;
    int batch_images = 2;
    int rois_per_batch = 256;
    std::int64_t max_iterations = 1000;
    std::uint64_t seed = 1;

    void validate() const;
};

// Piecewise-constant step schedule: base rate divided by decay_factor after
// every decay_every iterations.
double learning_rate_at(const TrainConfig& config, std::int64_t iteration);

// --- Convolution (single image, CHW layout, square stride/pad) -------------

Tensor conv2d(const Tensor& input, const LayerParams& params, int stride, int pad);
// Accumulates weight/bias gradients into params and returns grad wrt input.
Tensor conv2d_backward(const Tensor& input, LayerParams& params, int stride, int pad,
                       const Tensor& grad_output);

// --- Max pooling ------------------------------------------------------------

Tensor max_pool2d(const Tensor& input, int window, int stride);
// Routes each output gradient to its argmax input cell (first in row-major
// scan order on ties).
Tensor max_pool2d_backward(const Tensor& input, int window, int stride,
                           const Tensor& grad_output);

// --- Fully connected --------------------------------------------------------

// Input of any shape is read as a flat vector; weights are [out x in].
Tensor fully_connected(const Tensor& input, const LayerParams& params);
Tensor fully_connected_backward(const Tensor& input, LayerParams& params,
                                const Tensor& grad_output);

// --- Pointwise --------------------------------------------------------------

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

// Numerically stable softmax over a 1-D score vector.
Tensor softmax(const Tensor& scores);

// -log(probs[label]) with a 1e-12 floor inside the log.
double cross_entropy_loss(const Tensor& probs, int label);

// Gradient of cross_entropy_loss(softmax(scores), label) wrt the scores.
Tensor softmax_cross_entropy_backward(const Tensor& probs, int label);

// --- Dropout ----------------------------------------------------------------

enum class DropoutMode { kTrain, kEval };

// Inverted dropout: kept elements are scaled by 1/(1-ratio) so the expected
// value is unchanged and evaluation needs no correction. The multiplicative
// mask (0 or the keep scale) is written to *mask when provided.
Tensor dropout(const Tensor& input, double ratio, DropoutMode mode, Rng& rng,
               Tensor* mask = nullptr);
// Reapplies a previously drawn mask; used for the backward pass and for
// finite-difference checks where the mask must stay fixed.
Tensor dropout_apply_mask(const Tensor& input, const Tensor& mask);
Tensor dropout_backward(const Tensor& grad_output, const Tensor& mask);

// --- Huber / smooth-L1 ------------------------------------------------------

// Sum over elements of 0.5*d^2 for |d| < 1 else |d| - 0.5, d = pred - target.
double smooth_l1_loss(const Tensor& pred, const Tensor& target);
Tensor smooth_l1_backward(const Tensor& pred, const Tensor& target);

// --- SGD ---------------------------------------------------------------------

// w <- w - lr(iteration) * grad, then zeroes the gradients. Throws
// NumericError and leaves the parameters untouched if any gradient is
// non-finite.
void sgd_step(LayerParams& params, const TrainConfig& config, std::int64_t iteration);

// He-style init: zero-mean uniform with half-width sqrt(3 / fan_in).
void init_uniform_fan_in(LayerParams& params, int fan_in, Rng& rng);

}  // namespace wmr
