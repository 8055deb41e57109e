#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdlsd/clustering.hpp"
#include "fdlsd/dataset.hpp"
#include "fdlsd/diagnostics.hpp"
#include "fdlsd/encoder.hpp"
#include "fdlsd/losses.hpp"
#include "fdlsd/rng.hpp"

namespace fdlsd {

struct ExperimentConfig {
    double rho = 0.4;
    double alpha = 0.999;
    LossCoefficients coefficients{1.0, 1.0, 0.5};
    double tau = 0.3;
    double lr_initial = 0.00035;
    int lr_decay_every = 20;
    double lr_decay_factor = 0.1;
    /// Total epochs including the pretraining epochs.
    int epochs_total = 55;
    int pretrain_epochs = 1;
    int batch_identities = 15;
    int batch_instances = 4;
    ClusteringConfig clustering;
    double eps_retry_factor = 1.5;
    /// Hidden and output widths; the input width comes from the data.
    std::vector<int> layers{64, 32};
    Activation activation = Activation::relu;
    std::uint64_t seed = 1;
    bool fdl_enabled = true;

    [[nodiscard]] int batch_size() const { return batch_identities * batch_instances; }
    [[nodiscard]] int adaptation_epochs() const { return epochs_total - pretrain_epochs; }
    /// delta as applied; exactly 0 when FDL is disabled.
    [[nodiscard]] LossCoefficients effective_coefficients() const;
};

void validate(const ExperimentConfig& config);

/// lr_initial * lr_decay_factor ^ floor(epoch / lr_decay_every), with epoch
/// counted from the first pretraining epoch.
double learning_rate(const ExperimentConfig& config, int epoch);

/// P distinct labels with K positions each. Labels with fewer than K members
/// contribute all of them, topped up by draws with replacement. Positions
/// whose label is negative (outliers) are never drawn.
std::vector<std::size_t> sample_pk_batch(const std::vector<Label>& labels, int identities, int instances,
                                         Rng& rng);

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    std::size_t selected = 0;
    std::size_t dropped = 0;
    std::vector<SampleId> selected_ids;
    int num_clusters = 0;
    std::size_t num_outliers = 0;
    double eps_used = 0.0;
    bool aborted = false;
    std::string abort_reason;
    int steps = 0;
    LossBreakdown mean_loss;
    std::optional<double> clustering_error_rate;
    /// Pseudo label per selected sample, kOutlier for DBSCAN outliers.
    std::map<SampleId, int> pseudo_labels;
    double wall_ms = 0.0;  // not serialized
};

struct FinalDiagnostics {
    std::optional<EvalMetrics> eval;
    std::optional<double> clustering_error_rate;
    int num_clusters = 0;
    std::size_t num_outliers = 0;
    std::optional<double> rel_err_10;
    std::optional<double> rel_err_20;
    std::vector<SampleId> hardest_10;
    double cross_branch_similarity = 0.0;
};

struct TrainingReport {
    ExperimentConfig config;
    std::vector<LossBreakdown> pretrain_losses;
    std::vector<EpochRecord> epochs;
    NoiseHistory noise;
    FinalDiagnostics final;
    DualBranchModel model;
};

struct RetrievalSplit {
    LabeledDataset query;
    LabeledDataset gallery;
};

/// Called after every adaptation epoch; for progress output.
using EpochObserver = std::function<void(const EpochRecord&)>;

/// Source-only optimization of the objective for config.pretrain_epochs
/// epochs, one EMA update per step.
DualBranchModel pretrain(DualBranchModel model, const LabeledDataset& source, const ExperimentConfig& config,
                         std::vector<LossBreakdown>* epoch_losses = nullptr);

/// Pretraining followed by the adaptation epochs: sample dropout, pseudo
/// labels on the kept subset, target head rebuild, PK mini-batches from both
/// domains, EMA after every step. Noise flags are recorded per epoch from the
/// target true labels, which never reach the optimizer.
TrainingReport run(const LabeledDataset& source, const LabeledDataset& target, const ExperimentConfig& config,
                   const std::optional<RetrievalSplit>& retrieval = std::nullopt,
                   const EpochObserver& observer = {});

/// assign_pseudo_labels with one retry at eps * retry_factor.
PseudoLabeling cluster_with_retry(const DualBranchModel& model, const LabeledDataset& subset,
                                  const ClusteringConfig& config, double retry_factor);

}  // namespace fdlsd
