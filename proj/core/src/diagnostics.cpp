#include "fdlsd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "fdlsd/errors.hpp"

namespace fdlsd {

NoiseHistory::NoiseHistory(const std::vector<SampleId>& target_ids) {
    for (auto id : target_ids) counts_.emplace(id, NoiseCounts{});
}

void NoiseHistory::record_epoch(const std::map<SampleId, bool>& flags) {
    for (const auto& [id, noisy] : flags) {
        auto& c = counts_[id];
        ++c.epochs_participated;
        if (noisy) ++c.epochs_noisy;
    }
    ++epochs_;
}

long long NoiseHistory::total_noisy() const {
    long long total = 0;
    for (const auto& [id, c] : counts_) total += c.epochs_noisy;
    return total;
}

NoiseHistory NoiseHistory::from_noisy_counts(const std::map<SampleId, int>& noisy, int epochs) {
    NoiseHistory h;
    for (const auto& [id, n] : noisy) {
        if (n < 0 || n > epochs) throw DiagnosticsError("noisy count outside [0, epochs]");
        h.counts_[id] = NoiseCounts{epochs, n};
    }
    h.epochs_ = epochs;
    return h;
}

std::map<SampleId, bool> noisy_label_flags(const PseudoLabeling& pseudo,
                                           const std::map<SampleId, Label>& true_labels) {
    std::map<int, std::map<Label, int>> votes;
    for (const auto& [id, cluster] : pseudo.assignments) {
        auto it = true_labels.find(id);
        if (it == true_labels.end()) {
            throw DiagnosticsError("no true label for sample " + std::to_string(id));
        }
        ++votes[cluster][it->second];
    }
    std::map<int, Label> dominant;
    for (const auto& [cluster, hist] : votes) {
        // std::map iterates labels ascending, so strict > keeps the smallest on ties.
        Label best = hist.begin()->first;
        int best_count = hist.begin()->second;
        for (const auto& [label, count] : hist) {
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        }
        dominant[cluster] = best;
    }
    std::map<SampleId, bool> flags;
    for (const auto& [id, cluster] : pseudo.assignments) {
        flags[id] = true_labels.at(id) != dominant.at(cluster);
    }
    return flags;
}

double clustering_error_rate(const std::map<SampleId, bool>& flags) {
    if (flags.empty()) throw DiagnosticsError("clustering_error_rate of an empty assignment");
    std::size_t noisy = 0;
    for (const auto& [id, f] : flags) noisy += f ? 1 : 0;
    return static_cast<double>(noisy) / static_cast<double>(flags.size());
}

std::vector<SampleId> hardest_samples(const NoiseHistory& history, double percent) {
    if (!(percent > 0.0 && percent <= 1.0)) throw DiagnosticsError("percent must lie in (0, 1]");
    std::vector<std::pair<SampleId, int>> ranked;
    ranked.reserve(history.size());
    for (const auto& [id, c] : history.counts()) ranked.emplace_back(id, c.epochs_noisy);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const double want = percent * static_cast<double>(ranked.size());
    // Guard against 0.1 * 10 = 1.0000000000000002 style round-up.
    auto top = static_cast<std::size_t>(std::ceil(want * (1.0 - 1e-12)));
    top = std::min(top, ranked.size());
    std::vector<SampleId> out;
    out.reserve(top);
    for (std::size_t i = 0; i < top; ++i) out.push_back(ranked[i].first);
    return out;
}

double hardest_relative_error(const NoiseHistory& history, double percent) {
    const long long total = history.total_noisy();
    if (total <= 0) throw DiagnosticsError("no noisy labels recorded; relative error is undefined");
    long long top_sum = 0;
    for (auto id : hardest_samples(history, percent)) top_sum += history.counts().at(id).epochs_noisy;
    return static_cast<double>(top_sum) / static_cast<double>(total);
}

double average_precision(const std::vector<bool>& relevance) {
    double sum = 0.0;
    int hits = 0;
    for (std::size_t i = 0; i < relevance.size(); ++i) {
        if (!relevance[i]) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    return hits == 0 ? 0.0 : sum / hits;
}

EvalMetrics evaluate_rankings(const Eigen::MatrixXd& query_features, const std::vector<Label>& query_labels,
                              const Eigen::MatrixXd& gallery_features,
                              const std::vector<Label>& gallery_labels) {
    const auto nq = query_features.rows();
    const auto ng = gallery_features.rows();
    if (static_cast<std::size_t>(nq) != query_labels.size() ||
        static_cast<std::size_t>(ng) != gallery_labels.size()) {
        throw ShapeError("evaluate_rankings: label counts do not match feature rows");
    }
    if (query_features.cols() != gallery_features.cols()) {
        throw ShapeError("evaluate_rankings: query and gallery feature dimensions differ");
    }
    if (nq == 0) throw EvaluationError("no queries");
    const std::set<Label> gallery_set(gallery_labels.begin(), gallery_labels.end());
    for (auto l : query_labels) {
        if (!gallery_set.count(l)) {
            throw EvaluationError("query identity " + std::to_string(l) + " is absent from the gallery");
        }
    }

    EvalMetrics m;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ng));
    std::vector<double> dist(static_cast<std::size_t>(ng));
    std::vector<bool> relevance(static_cast<std::size_t>(ng));
    for (Eigen::Index q = 0; q < nq; ++q) {
        for (Eigen::Index g = 0; g < ng; ++g) {
            dist[static_cast<std::size_t>(g)] = (query_features.row(q) - gallery_features.row(g)).norm();
        }
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
        });
        const Label ql = query_labels[static_cast<std::size_t>(q)];
        std::size_t first_hit = relevance.size();
        for (std::size_t r = 0; r < order.size(); ++r) {
            relevance[r] = gallery_labels[static_cast<std::size_t>(order[r])] == ql;
            if (relevance[r] && first_hit == relevance.size()) first_hit = r;
        }
        m.mAP += average_precision(relevance);
        if (first_hit < 1) m.rank1 += 1.0;
        if (first_hit < 5) m.rank5 += 1.0;
        if (first_hit < 10) m.rank10 += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(nq);
    m.mAP *= inv;
    m.rank1 *= inv;
    m.rank5 *= inv;
    m.rank10 *= inv;
    return m;
}

EvalMetrics evaluate_cmc_map(const DualBranchModel& model, const LabeledDataset& query,
                             const LabeledDataset& gallery) {
    return evaluate_rankings(united_feature(model, query.inputs()), query.labels(),
                             united_feature(model, gallery.inputs()), gallery.labels());
}

double cross_branch_similarity(const DualBranchModel& model, const Eigen::MatrixXd& inputs) {
    if (inputs.rows() == 0) throw DiagnosticsError("cross_branch_similarity of an empty batch");
    const Eigen::MatrixXd f1 = encode_features(model.f1, inputs);
    const Eigen::MatrixXd m2 = encode_features(model.mean_f2, inputs);
    return (f1.array() * m2.array()).sum() / static_cast<double>(inputs.rows());
}

}  // namespace fdlsd
