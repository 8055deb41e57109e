#include <benchmark/benchmark.h>

#include "fdlsd/clustering.hpp"
#include "fdlsd/corpus.hpp"
#include "fdlsd/encoder.hpp"
#include "fdlsd/losses.hpp"
#include "fdlsd/rng.hpp"
#include "fdlsd/trainer.hpp"

namespace {

using namespace fdlsd;

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
    return m;
}

void BM_Dbscan(benchmark::State& state) {
    Rng rng = make_rng(1, "bench.dbscan");
    const Eigen::MatrixXd d = pairwise_distances(gaussian(rng, state.range(0), 8));
    for (auto _ : state) benchmark::DoNotOptimize(dbscan(d, {2.5, 4}));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_PairwiseDistances(benchmark::State& state) {
    Rng rng = make_rng(1, "bench.pdist");
    const Eigen::MatrixXd f = gaussian(rng, state.range(0), 64);
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_distances(f));
}
BENCHMARK(BM_PairwiseDistances)->Arg(360)->Arg(600);

void BM_EncodeBackward(benchmark::State& state) {
    const EncoderParams p = init_encoder({16, 64, 32}, Activation::relu, 1);
    Rng rng = make_rng(1, "bench.encode");
    const Eigen::MatrixXd x = gaussian(rng, 60, 16);
    const Eigen::MatrixXd upstream = gaussian(rng, 60, 32);
    for (auto _ : state) {
        const EncoderOutput out = encode(p, x);
        benchmark::DoNotOptimize(encoder_backward(p, out.cache, upstream));
    }
}
BENCHMARK(BM_EncodeBackward);

void BM_BatchHardTriplet(benchmark::State& state) {
    Rng rng = make_rng(1, "bench.triplet");
    Eigen::MatrixXd f = gaussian(rng, 60, 32);
    f.rowwise().normalize();
    std::vector<Label> labels;
    for (int k = 0; k < 15; ++k) labels.insert(labels.end(), 4, k);
    for (auto _ : state) benchmark::DoNotOptimize(triplet_loss(f, labels, 0.3));
}
BENCHMARK(BM_BatchHardTriplet);

void BM_TrainingRun(benchmark::State& state) {
    CorpusConfig cc;
    cc.source = {20, 30, 0.15, 2.0};
    cc.target = {20, 30, 0.1, 2.0};
    cc.shift_anisotropy = 3.0;
    cc.shift_translation = 1.0;
    const Corpus corpus = make_corpus(cc);
    ExperimentConfig c;
    c.lr_initial = 0.1;
    c.alpha = 0.99;
    c.epochs_total = 3;
    c.pretrain_epochs = 1;
    c.clustering = {0.45, 4};
    for (auto _ : state) benchmark::DoNotOptimize(run(corpus.source, corpus.target, c));
}
BENCHMARK(BM_TrainingRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
