#pragma once

#include <string>
#include <vector>

#include "wmr/tensor.hpp"

namespace wmr {

// Raster image with 1 (gray) or 3 (RGB) channels, values in [0, 1],
// interleaved row-major storage.
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> pixels;

    Frame() = default;
    Frame(int w, int h, int c, double fill = 0.0);

    double& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool empty() const { return pixels.empty(); }
};

// Fixed-weight luma conversion (0.299, 0.587, 0.114). Gray frames pass through.
Frame to_grayscale(const Frame& frame);

// Channel-major tensor view of the frame. Gray frames are replicated when a
// larger channel count is requested.
Tensor frame_to_tensor(const Frame& frame, int out_channels);

// Binary PGM (P5) / PPM (P6), 8-bit. Values are quantized on write.
void write_pnm(const std::string& path, const Frame& frame);
Frame read_pnm(const std::string& path);

}  // namespace wmr
