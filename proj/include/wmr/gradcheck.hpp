#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wmr/tensor.hpp"

namespace wmr {

// Central finite-difference check of an analytic gradient. `scalar_fn` must
// evaluate the scalar objective at an arbitrary value of the checked tensor;
// `analytic` is d(objective)/d(tensor) at `point`. Returns the maximum
// relative error with denominator max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<double(const Tensor&)>& scalar_fn, const Tensor& point,
                  const Tensor& analytic, double eps = 1e-5);

struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
};

// The full finite-difference suite over every differentiable operation,
// including ROI pooling and the complete multi-region forward pass. All
// entries are expected to stay below `tolerance` (1e-4 at double precision).
std::vector<GradCheckEntry> run_gradcheck_suite();

bool gradcheck_suite_passes(const std::vector<GradCheckEntry>& entries, double tolerance = 1e-4);

}  // namespace wmr
