#include "fdlsd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "fdlsd/errors.hpp"
#include "fdlsd/objective.hpp"
#include "fdlsd/sample_dropout.hpp"

namespace fdlsd {
namespace {

int distinct_labels(const std::vector<Label>& labels) {
    std::vector<Label> l;
    for (auto x : labels) {
        if (x >= 0) l.push_back(x);
    }
    std::sort(l.begin(), l.end());
    return static_cast<int>(std::unique(l.begin(), l.end()) - l.begin());
}

DomainBatch gather(const Eigen::MatrixXd& inputs, const std::vector<Label>& labels,
                   const std::vector<std::size_t>& positions) {
    DomainBatch b;
    b.inputs.resize(static_cast<Eigen::Index>(positions.size()), inputs.cols());
    b.labels.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        b.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(positions[i]));
        b.labels.push_back(labels[positions[i]]);
    }
    return b;
}

std::size_t steps_for(std::size_t samples, int batch_size) {
    const auto b = static_cast<std::size_t>(batch_size);
    return (samples + b - 1) / b;
}

struct LossAccumulator {
    double ce = 0.0, tri = 0.0, fdl = 0.0;
    int n = 0;

    void add(const LossBreakdown& l) {
        ce += l.ce;
        tri += l.tri;
        fdl += l.fdl;
        ++n;
    }

    [[nodiscard]] LossBreakdown mean(const LossCoefficients& c) const {
        if (n == 0) return total_loss(0.0, 0.0, 0.0, c);
        return total_loss(ce / n, tri / n, fdl / n, c);
    }
};

void optimization_step(DualBranchModel& model, const DomainBatch& source, const std::optional<DomainBatch>& target,
                       const ExperimentConfig& config, double lr, LossAccumulator& acc) {
    const ObjectiveResult r =
        evaluate_objective(model, source, target, config.effective_coefficients(), config.tau);
    apply_gradients(model, r.grads, lr);
    model.mean_f1 = ema_update(model.mean_f1, model.f1, config.alpha);
    model.mean_f2 = ema_update(model.mean_f2, model.f2, config.alpha);
    acc.add(r.loss);
}

std::map<SampleId, Label> truth_of(const LabeledDataset& d) {
    std::map<SampleId, Label> m;
    for (const auto& s : d.samples) m.emplace(s.id, s.true_label);
    return m;
}

}  // namespace

LossCoefficients ExperimentConfig::effective_coefficients() const {
    LossCoefficients c = coefficients;
    if (!fdl_enabled) c.delta = 0.0;
    return c;
}

void validate(const ExperimentConfig& c) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(c.rho >= 0.0 && c.rho < 1.0)) throw ConfigError("trainer.rho must lie in [0, 1)");
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("trainer.alpha must lie in [0, 1]");
    if (!finite(c.coefficients.beta)) throw ConfigError("trainer.beta must be finite");
    if (!finite(c.coefficients.gamma)) throw ConfigError("trainer.gamma must be finite");
    if (!finite(c.coefficients.delta)) throw ConfigError("trainer.delta must be finite");
    if (!finite(c.tau)) throw ConfigError("trainer.tau must be finite");
    if (!(c.lr_initial >= 0.0) || !finite(c.lr_initial)) throw ConfigError("trainer.lr_initial must be >= 0");
    if (c.lr_decay_every < 1) throw ConfigError("trainer.lr_decay_every must be >= 1");
    if (!(c.lr_decay_factor >= 0.0) || !finite(c.lr_decay_factor)) {
        throw ConfigError("trainer.lr_decay_factor must be >= 0");
    }
    if (c.pretrain_epochs < 0) throw ConfigError("trainer.pretrain_epochs must be >= 0");
    if (c.epochs_total < c.pretrain_epochs) throw ConfigError("trainer.epochs_total must be >= pretrain_epochs");
    if (c.batch_identities < 2) throw ConfigError("trainer.batch_identities must be >= 2");
    if (c.batch_instances < 2) throw ConfigError("trainer.batch_instances must be >= 2");
    if (!(c.eps_retry_factor >= 1.0)) throw ConfigError("clustering.eps_retry_factor must be >= 1");
    if (c.layers.empty()) throw ConfigError("model.layers must list at least one layer width");
    for (int w : c.layers) {
        if (w < 1) throw ConfigError("model.layers widths must be >= 1");
    }
    validate(c.clustering);
}

double learning_rate(const ExperimentConfig& config, int epoch) {
    return config.lr_initial * std::pow(config.lr_decay_factor, epoch / config.lr_decay_every);
}

std::vector<std::size_t> sample_pk_batch(const std::vector<Label>& labels, int identities, int instances,
                                         Rng& rng) {
    if (identities < 1 || instances < 1) throw ConfigError("P and K must be >= 1");
    std::map<Label, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= 0) groups[labels[i]].push_back(i);
    }
    if (static_cast<int>(groups.size()) < identities) {
        throw BatchCompositionError("need " + std::to_string(identities) + " distinct labels, have " +
                                    std::to_string(groups.size()));
    }
    std::vector<const std::vector<std::size_t>*> pool;
    for (const auto& [label, members] : groups) pool.push_back(&members);
    for (std::size_t i = 0; i < static_cast<std::size_t>(identities); ++i) {
        std::swap(pool[i], pool[i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i))]);
    }

    const auto k = static_cast<std::size_t>(instances);
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(identities) * k);
    for (std::size_t p = 0; p < static_cast<std::size_t>(identities); ++p) {
        std::vector<std::size_t> members = *pool[p];
        const std::size_t take = std::min(k, members.size());
        for (std::size_t i = 0; i < take; ++i) {
            std::swap(members[i], members[i + static_cast<std::size_t>(uniform_index(rng, members.size() - i))]);
            out.push_back(members[i]);
        }
        for (std::size_t i = take; i < k; ++i) {
            out.push_back(members[static_cast<std::size_t>(uniform_index(rng, members.size()))]);
        }
    }
    return out;
}

PseudoLabeling cluster_with_retry(const DualBranchModel& model, const LabeledDataset& subset,
                                  const ClusteringConfig& config, double retry_factor) {
    try {
        return assign_pseudo_labels(model, subset, config);
    } catch (const EmptyClusteringError&) {
        ClusteringConfig wider = config;
        wider.eps *= retry_factor;
        return assign_pseudo_labels(model, subset, wider);
    }
}

DualBranchModel pretrain(DualBranchModel model, const LabeledDataset& source, const ExperimentConfig& config,
                         std::vector<LossBreakdown>* epoch_losses) {
    if (config.pretrain_epochs == 0) return model;
    if (source.empty()) throw ConfigError("pretraining needs a non-empty source dataset");
    const Eigen::MatrixXd inputs = source.inputs();
    const std::vector<Label> labels = source.labels();
    const int p = std::min(config.batch_identities, distinct_labels(labels));
    if (p < 2) throw BatchCompositionError("source needs at least two identities");
    const std::size_t steps = steps_for(source.size(), config.batch_size());

    for (int epoch = 0; epoch < config.pretrain_epochs; ++epoch) {
        Rng rng = make_rng(config.seed, "batches.pretrain", static_cast<std::uint64_t>(epoch));
        const double lr = learning_rate(config, epoch);
        LossAccumulator acc;
        for (std::size_t s = 0; s < steps; ++s) {
            const DomainBatch batch =
                gather(inputs, labels, sample_pk_batch(labels, p, config.batch_instances, rng));
            optimization_step(model, batch, std::nullopt, config, lr, acc);
        }
        if (epoch_losses) epoch_losses->push_back(acc.mean(config.effective_coefficients()));
    }
    return model;
}

TrainingReport run(const LabeledDataset& source, const LabeledDataset& target, const ExperimentConfig& config,
                   const std::optional<RetrievalSplit>& retrieval, const EpochObserver& observer) {
    validate(config);
    if (source.dim != target.dim) {
        throw ConfigError("source dimension " + std::to_string(source.dim) + " differs from target dimension " +
                          std::to_string(target.dim));
    }
    if (target.empty()) throw ConfigError("target dataset is empty");

    std::vector<int> arch{source.dim};
    arch.insert(arch.end(), config.layers.begin(), config.layers.end());

    TrainingReport report;
    report.config = config;
    report.noise = NoiseHistory(target.ids());
    DualBranchModel model =
        init_model(arch, source.num_identities, derive_seed(config.seed, "init"), config.activation);
    model = pretrain(std::move(model), source, config, &report.pretrain_losses);

    const Eigen::MatrixXd source_inputs = source.inputs();
    const std::vector<Label> source_labels = source.labels();
    const int source_p = std::min(config.batch_identities, distinct_labels(source_labels));
    const auto truth = truth_of(target);

    for (int epoch = config.pretrain_epochs; epoch < config.epochs_total; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = learning_rate(config, epoch);

        const EpochSelection sel = select_epoch_subset(target, config.rho, epoch, derive_seed(config.seed, "sd"));
        rec.selected = sel.selected_ids.size();
        rec.dropped = sel.dropped_ids.size();
        rec.selected_ids = sel.selected_ids;
        const LabeledDataset subset = target.subset(sel.selected_positions);

        LossAccumulator acc;
        try {
            if (subset.empty()) throw EmptyClusteringError("sample dropout left no target samples");
            const PseudoLabeling pseudo =
                cluster_with_retry(model, subset, config.clustering, config.eps_retry_factor);
            rec.num_clusters = pseudo.num_clusters;
            rec.num_outliers = pseudo.outliers.size();
            rec.eps_used = pseudo.eps_used;
            rec.pseudo_labels.insert(pseudo.assignments.begin(), pseudo.assignments.end());
            for (auto id : pseudo.outliers) rec.pseudo_labels.emplace(id, kOutlier);

            const auto flags = noisy_label_flags(pseudo, truth);
            report.noise.record_epoch(flags);
            rec.clustering_error_rate = clustering_error_rate(flags);

            const int target_p = std::min(config.batch_identities, pseudo.num_clusters);
            if (target_p < 2) {
                throw BatchCompositionError("only one pseudo class; target triplets need two");
            }
            model = rebuild_target_classifier(model, pseudo.centroids_branch1, pseudo.centroids_branch2);

            const Eigen::MatrixXd target_inputs = subset.inputs();
            const std::vector<Label> target_labels = pseudo_labels_in_order(pseudo, subset);
            const std::size_t steps = steps_for(subset.size(), config.batch_size());
            Rng rng = make_rng(config.seed, "batches", static_cast<std::uint64_t>(epoch));
            for (std::size_t s = 0; s < steps; ++s) {
                const DomainBatch src = gather(source_inputs, source_labels,
                                               sample_pk_batch(source_labels, source_p, config.batch_instances, rng));
                const DomainBatch tgt = gather(target_inputs, target_labels,
                                               sample_pk_batch(target_labels, target_p, config.batch_instances, rng));
                optimization_step(model, src, tgt, config, rec.lr, acc);
                ++rec.steps;
            }
        } catch (const EmptyClusteringError& e) {
            rec.aborted = true;
            rec.abort_reason = e.what();
        } catch (const BatchCompositionError& e) {
            rec.aborted = true;
            rec.abort_reason = e.what();
        }
        rec.mean_loss = acc.mean(config.effective_coefficients());
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        if (observer) observer(rec);
        report.epochs.push_back(std::move(rec));
    }

    FinalDiagnostics& fin = report.final;
    try {
        const PseudoLabeling pseudo = cluster_with_retry(model, target, config.clustering, config.eps_retry_factor);
        fin.num_clusters = pseudo.num_clusters;
        fin.num_outliers = pseudo.outliers.size();
        const auto flags = noisy_label_flags(pseudo, truth);
        if (!flags.empty()) fin.clustering_error_rate = clustering_error_rate(flags);
    } catch (const EmptyClusteringError&) {
        fin.num_clusters = 0;
        fin.num_outliers = target.size();
    }
    if (report.noise.total_noisy() > 0) {
        fin.rel_err_10 = hardest_relative_error(report.noise, 0.1);
        fin.rel_err_20 = hardest_relative_error(report.noise, 0.2);
    }
    fin.hardest_10 = hardest_samples(report.noise, 0.1);
    fin.cross_branch_similarity = cross_branch_similarity(model, target.inputs());
    if (retrieval) fin.eval = evaluate_cmc_map(model, retrieval->query, retrieval->gallery);
    report.model = std::move(model);
    return report;
}

}  // namespace fdlsd
