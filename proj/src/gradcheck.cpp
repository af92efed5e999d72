#include "g2node/gradcheck.hpp"

#include <cmath>

namespace g2node::autodiff {

GradcheckReport gradcheck(const std::function<Tensor()>& loss_fn,
                          const std::vector<std::pair<std::string, Tensor>>& wrt, double tolerance,
                          double eps) {
    GradcheckReport report;

    for (auto& [name, tensor] : wrt) tensor.zero_grad();
    Tensor loss = loss_fn();
    backward(loss);

    for (auto& [name, tensor] : wrt) {
        GradcheckEntry entry;
        entry.name = name;
        Tensor t = tensor;
        std::vector<double> analytic =
            t.has_grad() ? t.grad() : std::vector<double>(t.value().size(), 0.0);
        for (std::size_t i = 0; i < t.value().size(); ++i) {
            const double saved = t.value()[i];
            t.value_mut()[i] = saved + eps;
            const double up = loss_fn().item();
            t.value_mut()[i] = saved - eps;
            const double down = loss_fn().item();
            t.value_mut()[i] = saved;
            const double fd = (up - down) / (2.0 * eps);
            if (!std::isfinite(fd) || !std::isfinite(analytic[i])) {
                report.saw_nan = true;
                entry.pass = false;
                continue;
            }
            const double denom = std::max({std::fabs(fd), std::fabs(analytic[i]), 1e-4});
            const double dev = std::fabs(fd - analytic[i]) / denom;
            entry.max_rel_dev = std::max(entry.max_rel_dev, dev);
        }
        entry.pass = entry.pass && entry.max_rel_dev <= tolerance;
        report.max_rel_dev = std::max(report.max_rel_dev, entry.max_rel_dev);
        report.pass = report.pass && entry.pass;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace g2node::autodiff
