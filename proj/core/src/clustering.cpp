#include "fdlsd/clustering.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "fdlsd/errors.hpp"

namespace fdlsd {

void validate(const ClusteringConfig& config) {
    if (!(config.eps > 0.0) || !std::isfinite(config.eps)) throw ConfigError("clustering.eps must be > 0");
    if (config.min_pts < 1) throw ConfigError("clustering.min_pts must be >= 1");
}

Eigen::MatrixXd united_feature(const DualBranchModel& model, const Eigen::MatrixXd& batch) {
    const Eigen::MatrixXd a = encode_features(model.mean_f1, batch);
    const Eigen::MatrixXd b = encode_features(model.mean_f2, batch);
    Eigen::MatrixXd out(batch.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& features) {
    const auto n = features.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (features.row(i) - features.row(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

DbscanResult dbscan(const Eigen::MatrixXd& distances, const ClusteringConfig& config) {
    validate(config);
    if (distances.rows() != distances.cols()) throw ShapeError("distance matrix must be square");
    const auto n = static_cast<std::size_t>(distances.rows());

    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= config.eps) {
                neighbors[i].push_back(j);
            }
        }
    }

    DbscanResult r;
    r.labels.assign(n, kOutlier);
    r.core.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        r.core[i] = static_cast<int>(neighbors[i].size()) >= config.min_pts;
    }

    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!r.core[seed] || r.labels[seed] != kOutlier) continue;
        const int id = r.num_clusters++;
        r.labels[seed] = id;
        std::deque<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const auto p = frontier.front();
            frontier.pop_front();
            for (auto q : neighbors[p]) {
                if (r.labels[q] != kOutlier) continue;
                r.labels[q] = id;
                if (r.core[q]) frontier.push_back(q);
            }
        }
    }
    return r;
}

PseudoLabeling assign_pseudo_labels(const DualBranchModel& model, const LabeledDataset& subset,
                                    const ClusteringConfig& config) {
    if (subset.empty()) throw ConfigError("cannot cluster an empty subset");
    const Eigen::MatrixXd united = united_feature(model, subset.inputs());
    const DbscanResult db = dbscan(pairwise_distances(united), config);
    if (db.num_clusters == 0) {
        throw EmptyClusteringError("DBSCAN found no cluster among " + std::to_string(subset.size()) +
                                   " samples at eps=" + std::to_string(config.eps));
    }

    const auto half = model.mean_f1.output_dim();
    PseudoLabeling out;
    out.num_clusters = db.num_clusters;
    out.eps_used = config.eps;
    out.centroids_branch1 = Eigen::MatrixXd::Zero(db.num_clusters, half);
    out.centroids_branch2 = Eigen::MatrixXd::Zero(db.num_clusters, united.cols() - half);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const int c = db.labels[i];
        if (c == kOutlier) {
            out.outliers.insert(subset.samples[i].id);
            continue;
        }
        out.assignments.emplace(subset.samples[i].id, c);
        out.centroids_branch1.row(c) += united.row(row).head(half);
        out.centroids_branch2.row(c) += united.row(row).tail(united.cols() - half);
    }
    for (int c = 0; c < db.num_clusters; ++c) {
        out.centroids_branch1.row(c).normalize();
        out.centroids_branch2.row(c).normalize();
    }
    return out;
}

std::vector<int> pseudo_labels_in_order(const PseudoLabeling& pseudo, const LabeledDataset& subset) {
    std::vector<int> out;
    out.reserve(subset.size());
    for (const auto& s : subset.samples) {
        auto it = pseudo.assignments.find(s.id);
        out.push_back(it == pseudo.assignments.end() ? kOutlier : it->second);
    }
    return out;
}

}  // namespace fdlsd
