#include "fdlsd/sample_dropout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdlsd/errors.hpp"
#include "fdlsd/rng.hpp"

namespace fdlsd {

std::size_t selected_count(std::size_t num_target, double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
    // (1 - rho) * N can land a hair under an integer (0.7 * 10 = 6.999...);
    // nudge by a relative epsilon before flooring.
    const double exact = (1.0 - rho) * static_cast<double>(num_target);
    return static_cast<std::size_t>(std::floor(exact * (1.0 + 1e-12)));
}

EpochSelection select_epoch_subset(const LabeledDataset& target, double rho, int epoch_index,
                                   std::uint64_t seed) {
    const std::size_t n = target.size();
    const std::size_t m = selected_count(n, rho);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(seed, "sd", static_cast<std::uint64_t>(epoch_index));
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(order[i], order[j]);
    }

    EpochSelection sel;
    sel.epoch_index = epoch_index;
    sel.rho = rho;
    sel.selected_positions.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(sel.selected_positions.begin(), sel.selected_positions.end());
    std::vector<bool> chosen(n, false);
    for (auto p : sel.selected_positions) {
        chosen[p] = true;
        sel.selected_ids.push_back(target.samples[p].id);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (!chosen[p]) sel.dropped_ids.push_back(target.samples[p].id);
    }
    std::sort(sel.selected_ids.begin(), sel.selected_ids.end());
    std::sort(sel.dropped_ids.begin(), sel.dropped_ids.end());
    return sel;
}

}  // namespace fdlsd
