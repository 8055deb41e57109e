#include "fdlsd/dataset.hpp"

#include <set>
#include <string>

#include "fdlsd/errors.hpp"

namespace fdlsd {

std::string_view to_string(Domain domain) {
    return domain == Domain::source ? "source" : "target";
}

Domain domain_from_string(std::string_view text) {
    if (text == "source") return Domain::source;
    if (text == "target") return Domain::target;
    throw ParseError("unknown domain '" + std::string(text) + "'");
}

Eigen::MatrixXd LabeledDataset::inputs() const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = samples[i].input.transpose();
    }
    return out;
}

std::vector<Label> LabeledDataset::labels() const {
    std::vector<Label> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.true_label);
    return out;
}

std::vector<SampleId> LabeledDataset::ids() const {
    std::vector<SampleId> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.id);
    return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& positions) const {
    LabeledDataset out;
    out.num_identities = num_identities;
    out.dim = dim;
    out.samples.reserve(positions.size());
    for (auto p : positions) {
        if (p >= samples.size()) throw ShapeError("subset position out of range");
        out.samples.push_back(samples[p]);
    }
    return out;
}

void validate(const LabeledDataset& dataset) {
    std::set<SampleId> seen;
    for (const auto& s : dataset.samples) {
        if (!seen.insert(s.id).second) {
            throw ConfigError("duplicate sample_id " + std::to_string(s.id));
        }
        if (s.input.size() != dataset.dim) {
            throw ConfigError("sample " + std::to_string(s.id) + " has dimension " +
                              std::to_string(s.input.size()) + ", expected " +
                              std::to_string(dataset.dim));
        }
        if (s.true_label < 0 || s.true_label >= dataset.num_identities) {
            throw ConfigError("sample " + std::to_string(s.id) + " has label " +
                              std::to_string(s.true_label) + " outside [0, " +
                              std::to_string(dataset.num_identities) + ")");
        }
    }
}

}  // namespace fdlsd
