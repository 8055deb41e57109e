#include <gtest/gtest.h>

#include <cmath>

#include "fdlsd/encoder.hpp"
#include "fdlsd/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fdlsd {
namespace {

using testing::central_differences;
using testing::encoder_scalars;
using testing::flatten;
using testing::gaussian_matrix;
using testing::relative_error;

bool same_params(const EncoderParams& a, const EncoderParams& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias) return false;
    }
    return true;
}

TEST(InitModel, MeanEncodersAreExactCopies) {
    const DualBranchModel m = init_model({6, 8, 4}, 5, 11);
    EXPECT_TRUE(same_params(m.mean_f1, m.f1));
    EXPECT_TRUE(same_params(m.mean_f2, m.f2));
}

TEST(InitModel, BranchesDifferAndSeedIsDeterministic) {
    const DualBranchModel a = init_model({6, 8, 4}, 5, 11);
    const DualBranchModel b = init_model({6, 8, 4}, 5, 11);
    for (std::size_t l = 0; l < a.f1.layers.size(); ++l) {
        EXPECT_NE(a.f1.layers[l].weight, a.f2.layers[l].weight);
    }
    EXPECT_TRUE(same_params(a.f1, b.f1));
    EXPECT_TRUE(same_params(a.f2, b.f2));
    EXPECT_EQ(a.c1.source.weight, b.c1.source.weight);
    EXPECT_EQ(a.c1.source.num_classes(), 5);
    EXPECT_EQ(a.c1.source.feature_dim(), 4);
}

TEST(InitModel, EmptyArchitectureIsConfigError) {
    EXPECT_THROW(init_model({6}, 5, 1), ConfigError);
    EXPECT_THROW(init_model({}, 5, 1), ConfigError);
}

TEST(Encode, RowsAreUnitNorm) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_rng(seed, "rows");
        const EncoderParams p = init_encoder({5, 16, 7}, seed % 2 ? Activation::tanh : Activation::relu, seed);
        const Eigen::MatrixXd x = gaussian_matrix(rng, 30, 5, 3.0);
        const EncoderOutput out = encode(p, x);
        for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_NEAR(out.features.row(i).norm(), 1.0, 1e-9);
        EXPECT_EQ(out.features, encode_features(p, x));
    }
}

TEST(Encode, IdentityLayerPassesInputThrough) {
    EncoderParams p;
    p.layers.push_back({Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)});
    Eigen::MatrixXd x(2, 3);
    x << 3, 4, 0, 1, 2, 2;
    const EncoderOutput out = encode(p, x);
    EXPECT_EQ(out.cache.pre_activations.back(), x);
    EXPECT_NEAR(out.features(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(out.features(1, 2), 2.0 / 3.0, 1e-15);
}

TEST(Encode, WrongInputWidthIsShapeError) {
    const EncoderParams p = init_encoder({5, 4}, Activation::relu, 1);
    EXPECT_THROW(encode(p, Eigen::MatrixXd::Ones(2, 4)), ShapeError);
}

TEST(Encode, ZeroPreNormalizationRowIsNumericError) {
    EncoderParams p;
    p.layers.push_back({Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(2)});
    EXPECT_THROW(encode(p, Eigen::MatrixXd::Ones(1, 3)), NumericError);
}

// Full input Jacobian of a 3-in, 4-out encoder, column by column.
TEST(EncoderBackward, InputJacobianMatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_rng(seed, "jac");
        const EncoderParams p = init_encoder({3, 5, 4}, seed % 2 ? Activation::tanh : Activation::relu, seed);
        Eigen::MatrixXd x = gaussian_matrix(rng, 1, 3);
        const EncoderOutput out = encode(p, x);
        for (int j = 0; j < 4; ++j) {
            Eigen::MatrixXd probe = Eigen::MatrixXd::Zero(1, 4);
            probe(0, j) = 1.0;
            const Eigen::VectorXd analytic = encoder_backward(p, out.cache, probe).input.transpose();
            std::vector<double*> xs{x.data(), x.data() + 1, x.data() + 2};
            const Eigen::VectorXd numeric = central_differences(xs, [&] { return encode_features(p, x)(0, j); });
            EXPECT_LT(relative_error(analytic, numeric), 1e-5) << "seed " << seed << " output " << j;
        }
    }
}

TEST(EncoderBackward, ParameterGradientsMatchFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_rng(seed, "params");
        EncoderParams p = init_encoder({4, 6, 5, 3}, seed % 2 ? Activation::tanh : Activation::relu, seed);
        const Eigen::MatrixXd x = gaussian_matrix(rng, 8, 4);
        const Eigen::MatrixXd g = gaussian_matrix(rng, 8, 3);
        const EncoderOutput out = encode(p, x);
        const Eigen::VectorXd analytic = flatten(encoder_backward(p, out.cache, g));
        const Eigen::VectorXd numeric =
            central_differences(encoder_scalars(p), [&] { return (encode_features(p, x).array() * g.array()).sum(); });
        EXPECT_LT(relative_error(analytic, numeric), 1e-5) << "seed " << seed;
    }
}

TEST(EncoderBackward, IsLinearInTheUpstreamGradient) {
    Rng rng = make_rng(2, "lin");
    const EncoderParams p = init_encoder({4, 6, 3}, Activation::relu, 2);
    const Eigen::MatrixXd x = gaussian_matrix(rng, 8, 4);
    const EncoderOutput out = encode(p, x);
    const Eigen::VectorXd zero = flatten(encoder_backward(p, out.cache, Eigen::MatrixXd::Zero(8, 3)));
    EXPECT_EQ(zero.cwiseAbs().maxCoeff(), 0.0);
    const Eigen::MatrixXd g = gaussian_matrix(rng, 8, 3);
    const Eigen::VectorXd once = flatten(encoder_backward(p, out.cache, g));
    const Eigen::VectorXd twice = flatten(encoder_backward(p, out.cache, 2.0 * g));
    EXPECT_LT((twice - 2.0 * once).cwiseAbs().maxCoeff(), 1e-15 * (1.0 + once.cwiseAbs().maxCoeff()));
    EXPECT_THROW(encoder_backward(p, out.cache, Eigen::MatrixXd::Zero(8, 4)), ShapeError);
}

TEST(Ema, FixedPointBoundaryAndArithmetic) {
    const EncoderParams p = init_encoder({4, 6, 3}, Activation::relu, 4);
    EXPECT_TRUE(same_params(ema_update(p, p, 0.999), p));
    const EncoderParams q = init_encoder({4, 6, 3}, Activation::relu, 5);
    EXPECT_TRUE(same_params(ema_update(p, q, 0.0), q));
    EXPECT_TRUE(same_params(ema_update(p, q, 1.0), p));

    EncoderParams mean;
    mean.layers.push_back({Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1)});
    EncoderParams cur;
    cur.layers.push_back({Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1)});
    const EncoderParams r = ema_update(mean, cur, 0.999);
    EXPECT_NEAR(r.layers[0].weight(0, 0), 0.001, 1e-15);
}

TEST(Ema, ConvergesGeometricallyAtRateAlpha) {
    const EncoderParams target = init_encoder({3, 4, 2}, Activation::relu, 8);
    EncoderParams mean = init_encoder({3, 4, 2}, Activation::relu, 9);
    const double alpha = 0.9;
    auto gap = [&](const EncoderParams& m) {
        double s = 0.0;
        for (std::size_t l = 0; l < m.layers.size(); ++l) {
            s += (m.layers[l].weight - target.layers[l].weight).squaredNorm();
            s += (m.layers[l].bias - target.layers[l].bias).squaredNorm();
        }
        return std::sqrt(s);
    };
    double prev = gap(mean);
    for (int t = 0; t < 50; ++t) {
        mean = ema_update(mean, target, alpha);
        const double now = gap(mean);
        EXPECT_NEAR(now / prev, alpha, 1e-9);
        prev = now;
    }
}

TEST(Ema, RejectsShapeMismatchAndBadAlpha) {
    const EncoderParams a = init_encoder({3, 4, 2}, Activation::relu, 1);
    const EncoderParams b = init_encoder({3, 5, 2}, Activation::relu, 1);
    EXPECT_THROW(ema_update(a, b, 0.5), ShapeError);
    EXPECT_THROW(ema_update(a, a, 1.5), ConfigError);
    EXPECT_THROW(ema_update(a, a, -0.1), ConfigError);
}

TEST(Classify, ZeroHeadGivesUniformProbabilities) {
    LinearHead h{Eigen::MatrixXd::Zero(7, 4), Eigen::VectorXd::Zero(7)};
    Rng rng = make_rng(1, "c");
    const Eigen::MatrixXd p = classify(h, gaussian_matrix(rng, 5, 4));
    EXPECT_LT((p.array() - 1.0 / 7.0).abs().maxCoeff(), 1e-15);
}

TEST(Classify, RowsSumToOneAndShiftIsInvariant) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_rng(seed, "c");
        LinearHead h = init_head(6, 4, seed);
        h.weight *= 20.0;
        const Eigen::MatrixXd f = gaussian_matrix(rng, 9, 4);
        const Eigen::MatrixXd p = classify(h, f);
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
            EXPECT_GT(p.row(i).minCoeff(), 0.0);
            EXPECT_LT(p.row(i).maxCoeff(), 1.0);
        }
        LinearHead shifted = h;
        shifted.bias.array() += 123.0;
        EXPECT_LT((classify(shifted, f) - p).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_THROW(classify(init_head(3, 4, 1), Eigen::MatrixXd::Ones(2, 5)), ShapeError);
}

TEST(Classify, HeadGradientsMatchFiniteDifferences) {
    Rng rng = make_rng(3, "hb");
    LinearHead h = init_head(5, 4, 3);
    Eigen::MatrixXd f = gaussian_matrix(rng, 6, 4);
    const Eigen::MatrixXd g = gaussian_matrix(rng, 6, 5);
    const HeadGrads hg = head_backward(h, f, g);
    auto probe = [&] { return (logits(h, f).array() * g.array()).sum(); };
    std::vector<double*> ws;
    for (Eigen::Index i = 0; i < h.weight.size(); ++i) ws.push_back(h.weight.data() + i);
    for (Eigen::Index i = 0; i < h.bias.size(); ++i) ws.push_back(h.bias.data() + i);
    Eigen::VectorXd analytic(h.weight.size() + h.bias.size());
    analytic << Eigen::Map<const Eigen::VectorXd>(hg.weight.data(), hg.weight.size()), hg.bias;
    EXPECT_LT(relative_error(analytic, central_differences(ws, probe)), 1e-7);
    std::vector<double*> fs;
    for (Eigen::Index i = 0; i < f.size(); ++i) fs.push_back(f.data() + i);
    const Eigen::VectorXd af = Eigen::Map<const Eigen::VectorXd>(hg.features.data(), hg.features.size());
    EXPECT_LT(relative_error(af, central_differences(fs, probe)), 1e-7);
}

TEST(RebuildTargetClassifier, RowsAreTheCentroidsAndSourceIsUntouched) {
    const DualBranchModel m = init_model({4, 6, 3}, 5, 2);
    Rng rng = make_rng(2, "cent");
    const Eigen::MatrixXd c1 = testing::unit_rows(rng, 3, 3);
    const Eigen::MatrixXd c2 = testing::unit_rows(rng, 3, 3);
    const DualBranchModel r = rebuild_target_classifier(m, c1, c2);
    EXPECT_EQ(r.c1.target.num_classes(), 3);
    EXPECT_EQ(r.c2.target.num_classes(), 3);
    EXPECT_EQ(r.c1.target.weight, c1);
    EXPECT_EQ(r.c2.target.weight, c2);
    EXPECT_EQ(r.c1.target.bias, Eigen::VectorXd::Zero(3));
    EXPECT_EQ(r.c1.source.weight, m.c1.source.weight);
    EXPECT_EQ(r.c1.source.bias, m.c1.source.bias);
    EXPECT_EQ(r.c2.source.weight, m.c2.source.weight);
    EXPECT_THROW(rebuild_target_classifier(m, Eigen::MatrixXd(0, 3), Eigen::MatrixXd(0, 3)), EmptyClusteringError);
    EXPECT_THROW(rebuild_target_classifier(m, Eigen::MatrixXd::Ones(2, 4), Eigen::MatrixXd::Ones(2, 4)), ShapeError);
}

}  // namespace
}  // namespace fdlsd
