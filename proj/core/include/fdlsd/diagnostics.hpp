#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fdlsd/clustering.hpp"
#include "fdlsd/dataset.hpp"
#include "fdlsd/encoder.hpp"

namespace fdlsd {

struct NoiseCounts {
    int epochs_participated = 0;
    int epochs_noisy = 0;
};

/// Per-target-sample record of how often a pseudo label was assigned and how
/// often it was noisy. Constructed over the full target id set so samples
/// that were never noisy still count toward N_t.
class NoiseHistory {
public:
    NoiseHistory() = default;
    explicit NoiseHistory(const std::vector<SampleId>& target_ids);

    /// Adds one epoch of flags (outliers must not appear in `flags`).
    void record_epoch(const std::map<SampleId, bool>& flags);

    [[nodiscard]] const std::map<SampleId, NoiseCounts>& counts() const { return counts_; }
    [[nodiscard]] std::size_t size() const { return counts_.size(); }
    [[nodiscard]] int epochs_recorded() const { return epochs_; }
    [[nodiscard]] long long total_noisy() const;

    /// Direct construction for fixtures: id -> epochs_noisy.
    static NoiseHistory from_noisy_counts(const std::map<SampleId, int>& noisy, int epochs);

private:
    std::map<SampleId, NoiseCounts> counts_;
    int epochs_ = 0;
};

/// Dominant true label per cluster (mode, smallest label on ties); a member
/// is noisy when its true label differs. Outliers are absent from the result.
std::map<SampleId, bool> noisy_label_flags(const PseudoLabeling& pseudo,
                                           const std::map<SampleId, Label>& true_labels);

/// Flagged / assigned.
double clustering_error_rate(const std::map<SampleId, bool>& flags);

/// Share of all noisy assignments that fell on the ceil(percent * N_t)
/// samples with the most noisy epochs (ties by ascending id).
double hardest_relative_error(const NoiseHistory& history, double percent);

/// The ids hardest_relative_error sums over.
std::vector<SampleId> hardest_samples(const NoiseHistory& history, double percent);

struct EvalMetrics {
    double mAP = 0.0;
    double rank1 = 0.0;
    double rank5 = 0.0;
    double rank10 = 0.0;
};

/// Precision at each relevant rank, averaged over the relevant items.
double average_precision(const std::vector<bool>& relevance_in_rank_order);

/// Ranks the gallery by ascending Euclidean distance (ties by gallery
/// index) for every query.
EvalMetrics evaluate_rankings(const Eigen::MatrixXd& query_features, const std::vector<Label>& query_labels,
                              const Eigen::MatrixXd& gallery_features,
                              const std::vector<Label>& gallery_labels);

/// Retrieval in united-feature space.
EvalMetrics evaluate_cmc_map(const DualBranchModel& model, const LabeledDataset& query,
                             const LabeledDataset& gallery);

/// Mean cosine between f1(x) and mean_f2(x) over the rows of `inputs`.
double cross_branch_similarity(const DualBranchModel& model, const Eigen::MatrixXd& inputs);

}  // namespace fdlsd
