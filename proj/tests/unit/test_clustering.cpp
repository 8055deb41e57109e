#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fdlsd/clustering.hpp"
#include "fdlsd/datagen.hpp"
#include "fdlsd/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fdlsd {
namespace {

using testing::canonical_partition;
using testing::clumped_points;
using testing::dbscan_oracle;

TEST(UnitedFeature, LayoutAndNorm) {
    const DualBranchModel m = testing::small_model(1, 5, {6, 4}, 3, 2);
    Rng rng = make_rng(1, "uf");
    const Eigen::MatrixXd x = testing::gaussian_matrix(rng, 7, 5);
    const Eigen::MatrixXd u = united_feature(m, x);
    ASSERT_EQ(u.cols(), 8);
    EXPECT_EQ(u.leftCols(4), encode_features(m.mean_f1, x));
    EXPECT_EQ(u.rightCols(4), encode_features(m.mean_f2, x));
    for (Eigen::Index i = 0; i < u.rows(); ++i) EXPECT_NEAR(u.row(i).norm(), std::sqrt(2.0), 1e-12);
}

TEST(PairwiseDistances, SmallCases) {
    EXPECT_EQ(pairwise_distances(Eigen::MatrixXd::Ones(1, 3)), Eigen::MatrixXd::Zero(1, 1));
    Eigen::MatrixXd p(2, 2);
    p << 0, 0, 3, 4;
    const Eigen::MatrixXd d = pairwise_distances(p);
    EXPECT_EQ(d(0, 1), 5.0);
    EXPECT_EQ(d(1, 0), 5.0);
    Rng rng = make_rng(2, "pd");
    const Eigen::MatrixXd r = pairwise_distances(testing::gaussian_matrix(rng, 40, 6));
    EXPECT_EQ((r - r.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dbscan, TwoSeparatedGroups) {
    Eigen::MatrixXd p(10, 2);
    for (int i = 0; i < 5; ++i) {
        p.row(i) << 0.1 * i, 0.0;
        p.row(5 + i) << 100.0 + 0.1 * i, 0.0;
    }
    const DbscanResult r = dbscan(pairwise_distances(p), {0.5, 3});
    EXPECT_EQ(r.num_clusters, 2);
    EXPECT_EQ(std::count(r.labels.begin(), r.labels.end(), kOutlier), 0);
    EXPECT_EQ(canonical_partition(r.labels), canonical_partition(dbscan_oracle(pairwise_distances(p), 0.5, 3)));
}

TEST(Dbscan, AllFarApartMeansAllOutliers) {
    Eigen::MatrixXd p(6, 1);
    p << 0, 10, 20, 30, 40, 50;
    const DbscanResult r = dbscan(pairwise_distances(p), {1.0, 2});
    EXPECT_EQ(r.num_clusters, 0);
    EXPECT_EQ(std::count(r.labels.begin(), r.labels.end(), kOutlier), 6);
}

TEST(Dbscan, MatchesTheOracleOnRandomPlanarPoints) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng = make_rng(seed, "dbscan.2d");
        const Eigen::MatrixXd d = pairwise_distances(clumped_points(rng, 50, 2));
        const ClusteringConfig c{0.3 + 1.5 * uniform_unit(rng), 1 + static_cast<int>(uniform_index(rng, 6))};
        const DbscanResult r = dbscan(d, c);
        ASSERT_EQ(r.labels, dbscan_oracle(d, c.eps, c.min_pts)) << "seed " << seed;
    }
}

TEST(Dbscan, IdsHaveNoGaps) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng = make_rng(seed, "gaps");
        const DbscanResult r = dbscan(pairwise_distances(clumped_points(rng, 40, 2)), {1.0, 3});
        std::set<int> ids(r.labels.begin(), r.labels.end());
        ids.erase(kOutlier);
        ASSERT_EQ(static_cast<int>(ids.size()), r.num_clusters);
        if (!ids.empty()) EXPECT_EQ(*ids.rbegin(), r.num_clusters - 1);
    }
}

// Core points and outliers do not depend on input order; a border point may
// join any cluster that has one of its core neighbors.
TEST(Dbscan, PartitionIsOrderIndependentUpToBorderPoints) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = make_rng(seed, "perm");
        const Eigen::MatrixXd pts = clumped_points(rng, 45, 2);
        const ClusteringConfig c{0.8, 3};
        std::vector<Eigen::Index> perm(45);
        for (Eigen::Index i = 0; i < 45; ++i) perm[i] = i;
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
        Eigen::MatrixXd shuffled(45, 2);
        for (Eigen::Index i = 0; i < 45; ++i) shuffled.row(i) = pts.row(perm[i]);

        const Eigen::MatrixXd d = pairwise_distances(pts);
        const DbscanResult a = dbscan(d, c);
        const DbscanResult b = dbscan(pairwise_distances(shuffled), c);
        std::vector<int> b_in_a_order(45);
        std::vector<bool> b_core(45);
        for (Eigen::Index i = 0; i < 45; ++i) {
            b_in_a_order[perm[i]] = b.labels[i];
            b_core[perm[i]] = b.core[i];
        }
        EXPECT_EQ(a.core, b_core);
        std::map<int, int> rename;
        for (Eigen::Index i = 0; i < 45; ++i) {
            EXPECT_EQ(a.labels[i] == kOutlier, b_in_a_order[i] == kOutlier);
            if (!a.core[i]) continue;
            auto [it, fresh] = rename.emplace(a.labels[i], b_in_a_order[i]);
            EXPECT_EQ(it->second, b_in_a_order[i]) << "seed " << seed;
        }
        for (Eigen::Index i = 0; i < 45; ++i) {
            if (a.core[i] || a.labels[i] == kOutlier) continue;
            bool ok = false;
            for (Eigen::Index j = 0; j < 45; ++j) {
                if (a.core[j] && d(i, j) <= c.eps && rename.at(a.labels[j]) == b_in_a_order[i]) ok = true;
            }
            EXPECT_TRUE(ok) << "seed " << seed << " border " << i;
        }
    }
}

// Border points go to the first cluster that reaches them, so a later
// cluster can lose members it shares with an earlier one. What always holds
// is that the core points of a cluster plus every point within eps of them
// number at least min_pts.
TEST(Dbscan, EveryClusterHasACoreNeighborhoodOfMinPts) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng = make_rng(seed, "minpts");
        const Eigen::MatrixXd d = pairwise_distances(clumped_points(rng, 50, 2));
        const ClusteringConfig c{0.3 + 1.5 * uniform_unit(rng), 2 + static_cast<int>(uniform_index(rng, 6))};
        const DbscanResult r = dbscan(d, c);
        std::vector<int> size(static_cast<std::size_t>(r.num_clusters), 0);
        for (int l : r.labels) {
            if (l != kOutlier) ++size[static_cast<std::size_t>(l)];
        }
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
            if (!r.core[i]) continue;
            int reach = 0;
            for (Eigen::Index j = 0; j < d.rows(); ++j) reach += d(i, j) <= c.eps;
            EXPECT_GE(reach, c.min_pts);
            EXPECT_NE(r.labels[i], kOutlier);
        }
        for (int n : size) EXPECT_GE(n, 1);
    }
}

// Three dense groups each claim one border point that is also the only
// neighbor of a later core point, which is then left alone in its cluster.
TEST(Dbscan, LateCoreCanEndUpBelowMinPts) {
    Eigen::MatrixXd p(16, 2);
    const double groups[3][2] = {{2.0, 0.0}, {-2.0, 0.0}, {0.0, 2.0}};
    for (int g = 0; g < 3; ++g) {
        const double gx = groups[g][0];
        const double gy = groups[g][1];
        const double ox = gx / 2.0 * 0.6;
        const double oy = gy / 2.0 * 0.6;
        p.row(4 * g) << gx, gy;
        p.row(4 * g + 1) << gx + ox, gy + oy;
        p.row(4 * g + 2) << gx + ox - 0.3 * (gy != 0), gy + oy - 0.3 * (gx != 0);
        p.row(4 * g + 3) << gx + ox + 0.3 * (gy != 0), gy + oy + 0.3 * (gx != 0);
    }
    p.row(12) << 1.0, 0.0;
    p.row(13) << -1.0, 0.0;
    p.row(14) << 0.0, 1.0;
    p.row(15) << 0.0, 0.0;
    const Eigen::MatrixXd d = pairwise_distances(p);
    const DbscanResult r = dbscan(d, {1.0, 4});
    ASSERT_EQ(r.num_clusters, 4);
    EXPECT_TRUE(r.core[15]);
    EXPECT_EQ(r.labels[12], 0);
    EXPECT_EQ(r.labels[13], 1);
    EXPECT_EQ(r.labels[14], 2);
    EXPECT_EQ(std::count(r.labels.begin(), r.labels.end(), 3), 1);
    EXPECT_EQ(r.labels, dbscan_oracle(d, 1.0, 4));
}

LabeledDataset one_domain(int identities, int per, double spread, double separation, std::uint64_t seed) {
    DomainGenConfig c;
    c.num_identities = identities;
    c.samples_per_identity = per;
    c.dim = 6;
    c.intra_class_spread = spread;
    c.inter_class_separation = separation;
    c.seed = seed;
    return generate_domain(c);
}

// Linear encoders on the raw input make the united feature a pair of
// normalized copies of the input, so geometry carries over.
DualBranchModel pass_through_model(int dim) {
    EncoderParams e;
    e.layers.push_back({Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim)});
    DualBranchModel m;
    m.f1 = m.f2 = m.mean_f1 = m.mean_f2 = e;
    return m;
}

TEST(AssignPseudoLabels, OneDenseIdentityIsOneCluster) {
    const LabeledDataset d = one_domain(1, 12, 0.01, 2.0, 1);
    const PseudoLabeling p = assign_pseudo_labels(pass_through_model(6), d, {0.5, 4});
    EXPECT_EQ(p.num_clusters, 1);
    EXPECT_TRUE(p.outliers.empty());
    EXPECT_EQ(p.assignments.size(), 12u);
}

TEST(AssignPseudoLabels, ZeroSpreadRecoversTrueIdentities) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LabeledDataset d = one_domain(8, 5, 0.0, 20.0, seed);
        const DualBranchModel m = pass_through_model(6);
        const PseudoLabeling p = assign_pseudo_labels(m, d, {0.05, 3});
        ASSERT_EQ(p.num_clusters, 8);
        std::vector<int> pseudo;
        std::vector<int> truth;
        for (const auto& s : d.samples) {
            pseudo.push_back(p.assignments.at(s.id));
            truth.push_back(s.true_label);
        }
        EXPECT_EQ(canonical_partition(pseudo), canonical_partition(truth));
    }
}

TEST(AssignPseudoLabels, PartitionAndCentroids) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const LabeledDataset d = one_domain(5, 8, 0.4, 3.0, seed);
        const DualBranchModel m = testing::small_model(seed, 6, {8, 4}, 3, 1);
        const PseudoLabeling p = assign_pseudo_labels(m, d, {0.5, 3});
        std::set<SampleId> seen;
        for (const auto& [id, c] : p.assignments) {
            seen.insert(id);
            EXPECT_GE(c, 0);
            EXPECT_LT(c, p.num_clusters);
        }
        for (auto id : p.outliers) EXPECT_TRUE(seen.insert(id).second);
        EXPECT_EQ(seen.size(), d.size());

        const Eigen::MatrixXd u = united_feature(m, d.inputs());
        for (int k = 0; k < p.num_clusters; ++k) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(4);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
            for (std::size_t i = 0; i < d.size(); ++i) {
                auto it = p.assignments.find(d.samples[i].id);
                if (it == p.assignments.end() || it->second != k) continue;
                a += u.row(static_cast<Eigen::Index>(i)).head(4).transpose();
                b += u.row(static_cast<Eigen::Index>(i)).tail(4).transpose();
            }
            EXPECT_LT((p.centroids_branch1.row(k).transpose() - a.normalized()).norm(), 1e-12);
            EXPECT_LT((p.centroids_branch2.row(k).transpose() - b.normalized()).norm(), 1e-12);
        }
        const std::vector<int> in_order = pseudo_labels_in_order(p, d);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto it = p.assignments.find(d.samples[i].id);
            EXPECT_EQ(in_order[i], it == p.assignments.end() ? kOutlier : it->second);
        }
    }
}

TEST(AssignPseudoLabels, NoClusterIsAnError) {
    const LabeledDataset d = one_domain(4, 2, 0.0, 50.0, 1);
    EXPECT_THROW(assign_pseudo_labels(pass_through_model(6), d, {1e-3, 3}), EmptyClusteringError);
    EXPECT_THROW(dbscan(Eigen::MatrixXd::Zero(2, 2), {0.0, 1}), ConfigError);
    EXPECT_THROW(dbscan(Eigen::MatrixXd::Zero(2, 2), {1.0, 0}), ConfigError);
}

}  // namespace
}  // namespace fdlsd
