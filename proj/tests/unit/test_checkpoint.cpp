#include <gtest/gtest.h>

#include <sstream>

#include "fdlsd/checkpoint.hpp"
#include "fdlsd/errors.hpp"
#include "generators.hpp"

namespace fdlsd {
namespace {

void expect_identical(const EncoderParams& a, const EncoderParams& b) {
    ASSERT_EQ(a.layers.size(), b.layers.size());
    EXPECT_EQ(a.activation, b.activation);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        EXPECT_EQ(a.layers[l].weight, b.layers[l].weight);
        EXPECT_EQ(a.layers[l].bias, b.layers[l].bias);
    }
}

void expect_identical(const LinearHead& a, const LinearHead& b) {
    EXPECT_EQ(a.weight.rows(), b.weight.rows());
    EXPECT_EQ(a.weight.cols(), b.weight.cols());
    EXPECT_EQ(a.weight, b.weight);
    EXPECT_EQ(a.bias, b.bias);
}

TEST(Checkpoint, RoundTripIsBitExact) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = make_rng(seed, "ckpt");
        const int d_in = 1 + static_cast<int>(uniform_index(rng, 6));
        std::vector<int> widths;
        const int depth = 1 + static_cast<int>(uniform_index(rng, 3));
        for (int i = 0; i < depth; ++i) widths.push_back(1 + static_cast<int>(uniform_index(rng, 7)));
        const int targets = static_cast<int>(uniform_index(rng, 4));
        const Activation act = uniform_index(rng, 2) ? Activation::tanh : Activation::relu;
        DualBranchModel m = testing::small_model(seed, d_in, widths, 3, std::max(targets, 1), act);
        // Make the mean encoders differ from the encoders.
        for (double* x : testing::encoder_scalars(m.mean_f2)) *x *= 1.0 + 1e-3 * standard_normal(rng);

        std::stringstream buf;
        write_checkpoint(buf, m);
        const DualBranchModel r = read_checkpoint(buf);
        expect_identical(r.f1, m.f1);
        expect_identical(r.f2, m.f2);
        expect_identical(r.mean_f1, m.mean_f1);
        expect_identical(r.mean_f2, m.mean_f2);
        expect_identical(r.c1.source, m.c1.source);
        expect_identical(r.c2.source, m.c2.source);
        expect_identical(r.c1.target, m.c1.target);
        expect_identical(r.c2.target, m.c2.target);
    }
}

TEST(Checkpoint, EmptyTargetHeadsSurvive) {
    const DualBranchModel m = init_model({4, 5, 3}, 2, 1);
    ASSERT_EQ(m.c1.target.num_classes(), 0);
    std::stringstream buf;
    write_checkpoint(buf, m);
    const DualBranchModel r = read_checkpoint(buf);
    EXPECT_EQ(r.c1.target.num_classes(), 0);
    EXPECT_EQ(r.c1.target.feature_dim(), m.c1.target.feature_dim());
}

TEST(Checkpoint, KeysAreFlatAndNamed) {
    const DualBranchModel m = init_model({4, 5, 3}, 2, 1);
    std::stringstream buf;
    write_checkpoint(buf, m);
    const std::string text = buf.str();
    for (const char* key : {"f1.0.weight", "f2.1.bias", "mean_f1.0.weight", "mean_f2.1.bias", "c1.source.weight",
                            "c2.target.bias"}) {
        EXPECT_NE(text.find(std::string("\n") + key + ".shape "), std::string::npos) << key;
    }
}

TEST(Checkpoint, CorruptInputIsRejected) {
    const DualBranchModel m = init_model({4, 5, 3}, 2, 1);
    std::stringstream buf;
    write_checkpoint(buf, m);
    std::string text = buf.str();
    {
        std::istringstream in(text.substr(0, text.size() / 2));
        EXPECT_THROW(read_checkpoint(in), ParseError);
    }
    {
        std::string bad = text;
        bad.replace(bad.find("f1.0.weight.shape 5 4"), 21, "f1.0.weight.shape 5 9");
        std::istringstream in(bad);
        EXPECT_THROW(read_checkpoint(in), Error);
    }
}

}  // namespace
}  // namespace fdlsd
