#include <benchmark/benchmark.h>

#include "d2dra/channel_model.hpp"
#include "d2dra/ra_net.hpp"

using namespace d2dra;

namespace {

RaModel paper_scale_model() {
  SystemConfig config;
  ArchConfig arch;
  arch.input_dim = config.input_dim();
  RandomStream rng(1);
  RaModel model;
  model.arch = arch;
  model.system = config;
  model.tnet = nn::make_dense_stack("tnet", arch.tnet_dims(config), rng);
  model.pnet = nn::make_dense_stack("pnet", arch.pnet_dims(config), rng);
  model.norm.mean.assign(arch.input_dim, -90.0);
  model.norm.stddev.assign(arch.input_dim, 12.0);
  return model;
}

}  // namespace

static void BM_GenerateInstance(benchmark::State& state) {
  SystemConfig config;
  RandomStream rng(3);
  const Topology topo = place_users(config, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_instance(topo, config, rng));
  }
}
BENCHMARK(BM_GenerateInstance);

static void BM_GenerateDataset1k(benchmark::State& state) {
  SystemConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_dataset(config, 1000, 7));
  }
}
BENCHMARK(BM_GenerateDataset1k)->Unit(benchmark::kMillisecond);

// One inference: preprocess + Tnet/Pnet forward at width 100, 4 layers.
static void BM_Infer(benchmark::State& state) {
  const RaModel model = paper_scale_model();
  RandomStream rng(5);
  const ChannelInstance inst = generate_instance(place_users(model.system, rng), model.system,
                                                 rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(infer(model, inst));
  }
}
BENCHMARK(BM_Infer)->Unit(benchmark::kMicrosecond);

// One training step: loss graph build, forward, backward at batch size 1000.
static void BM_TrainStep(benchmark::State& state) {
  SystemConfig config;
  const Dataset ds = generate_dataset(config, 1000, 11);
  const RaModel model = paper_scale_model();
  std::vector<std::size_t> idx(ds.count());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  const NormStats norm = compute_norm_stats(ds, idx);
  const BatchData batch = make_batch(ds, idx, norm);
  const TrainHyper hyper;
  for (auto _ : state) {
    nn::Tape tape;
    const LossGraph graph =
        build_loss_graph(tape, model.tnet, model.pnet, batch, Goal::kMaxSe, config, hyper);
    tape.backward(graph.loss);
    benchmark::DoNotOptimize(tape.grad(graph.tnet_nodes[0]));
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
