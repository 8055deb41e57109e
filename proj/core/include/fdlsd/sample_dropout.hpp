#pragma once

#include <cstdint>
#include <vector>

#include "fdlsd/dataset.hpp"

namespace fdlsd {

struct EpochSelection {
    int epoch_index = 0;
    double rho = 0.0;
    std::vector<SampleId> selected_ids;  // ascending
    std::vector<SampleId> dropped_ids;   // ascending
    std::vector<std::size_t> selected_positions;  // into the source dataset, ascending
};

/// floor((1 - rho) * N_t).
std::size_t selected_count(std::size_t num_target, double rho);

/// Uniform sample without replacement of selected_count(N_t, rho) target
/// samples. The random stream depends only on (seed, epoch_index), so any
/// epoch can be replayed on its own.
EpochSelection select_epoch_subset(const LabeledDataset& target, double rho, int epoch_index,
                                   std::uint64_t seed);

}  // namespace fdlsd
