#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "g2node/tensor.hpp"

namespace g2node::autodiff {

struct GradcheckEntry {
    std::string name;
    double max_rel_dev = 0.0;
    bool pass = true;
};

struct GradcheckReport {
    double max_rel_dev = 0.0;
    bool pass = true;
    bool saw_nan = false;
    std::vector<GradcheckEntry> entries;
};

// Compares analytic gradients of loss_fn() against central finite
// differences for every listed tensor. loss_fn must rebuild its graph on
// each call so perturbed forwards are evaluated from scratch.
GradcheckReport gradcheck(const std::function<Tensor()>& loss_fn,
                          const std::vector<std::pair<std::string, Tensor>>& wrt, double tolerance,
                          double eps = 1e-5);

}  // namespace g2node::autodiff
