#pragma once

#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "fdlsd/dataset.hpp"
#include "fdlsd/encoder.hpp"

namespace fdlsd {

struct ClusteringConfig {
    double eps = 0.6;
    int min_pts = 4;
};

void validate(const ClusteringConfig& config);

/// Row-wise [mean_f1(x); mean_f2(x)], used for clustering and retrieval.
Eigen::MatrixXd united_feature(const DualBranchModel& model, const Eigen::MatrixXd& batch);

/// Euclidean distances; exact zero diagonal and exact symmetry.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& features);

inline constexpr int kOutlier = -1;

struct DbscanResult {
    std::vector<int> labels;  // cluster id per row, or kOutlier
    std::vector<bool> core;
    int num_clusters = 0;
};

/// A point is core when at least min_pts points (itself included) lie within
/// eps. Clusters are numbered in the order their first core point appears
/// when scanning rows in ascending order; each cluster is expanded fully
/// before the scan resumes, so a border point reachable from several
/// clusters joins the lowest-numbered one.
DbscanResult dbscan(const Eigen::MatrixXd& distances, const ClusteringConfig& config);

struct PseudoLabeling {
    std::map<SampleId, int> assignments;
    std::set<SampleId> outliers;
    int num_clusters = 0;
    Eigen::MatrixXd centroids_branch1;  // num_clusters x feature_dim, unit rows
    Eigen::MatrixXd centroids_branch2;
    double eps_used = 0.0;
};

/// united_feature + dbscan on the subset; centroids are the re-normalized
/// means of each cluster's two halves. Throws EmptyClusteringError when no
/// cluster forms.
PseudoLabeling assign_pseudo_labels(const DualBranchModel& model, const LabeledDataset& subset,
                                    const ClusteringConfig& config);

/// Per-sample pseudo labels in subset order, kOutlier for outliers.
std::vector<int> pseudo_labels_in_order(const PseudoLabeling& pseudo, const LabeledDataset& subset);

}  // namespace fdlsd
