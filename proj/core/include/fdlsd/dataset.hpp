#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fdlsd {

using SampleId = std::int64_t;
using Label = int;

enum class Domain { source, target };

std::string_view to_string(Domain domain);
Domain domain_from_string(std::string_view text);

struct Sample {
    SampleId id = 0;
    Eigen::VectorXd input;
    Label true_label = 0;
    Domain domain = Domain::source;
};

/// A corpus of samples of one domain. Target true labels exist only so that
/// diagnostics can score pseudo labels; training never reads them.
struct LabeledDataset {
    std::vector<Sample> samples;
    int num_identities = 0;
    int dim = 0;

    [[nodiscard]] std::size_t size() const { return samples.size(); }
    [[nodiscard]] bool empty() const { return samples.empty(); }

    /// Inputs stacked row-wise (size() x dim).
    [[nodiscard]] Eigen::MatrixXd inputs() const;
    [[nodiscard]] std::vector<Label> labels() const;
    [[nodiscard]] std::vector<SampleId> ids() const;

    /// Samples at the given positions, keeping num_identities and dim.
    [[nodiscard]] LabeledDataset subset(const std::vector<std::size_t>& positions) const;
};

/// Throws ConfigError when ids repeat, dimensions vary or labels fall outside
/// [0, num_identities).
void validate(const LabeledDataset& dataset);

}  // namespace fdlsd
