#include <benchmark/benchmark.h>

#include "stepgrid/baseline.hpp"
#include "stepgrid/embed.hpp"
#include "stepgrid/heads.hpp"
#include "stepgrid/preproc.hpp"
#include "stepgrid/rng.hpp"
#include "stepgrid/synth.hpp"
#include "stepgrid/transform.hpp"

using namespace stepgrid;

namespace {

StepSequence bench_step(int frames, int h, int w) {
  Rng rng(1);
  StepSequence step;
  step.bbox = {0, 0, h, w};
  for (int t = 0; t < frames; ++t) {
    PressureFrame f(h, w);
    for (auto& v : f.values) v = float(rng.uniform(0.0, 1.0));
    step.frames.push_back(std::move(f));
  }
  step.step_id = "bench";
  step.subject_id = "s";
  return step;
}

void BM_render_resize(benchmark::State& state) {
  const auto step = bench_step(1, 40, 20);
  const RenderConfig cfg{int(state.range(0))};
  for (auto _ : state)
    benchmark::DoNotOptimize(transform_step(step, Strategy::MaxFrame, cfg));
}
BENCHMARK(BM_render_resize)->Arg(64)->Arg(299);

void BM_mock_embed(benchmark::State& state) {
  MockProjectionEmbedder embedder(7, int(state.range(0)), 64);
  Rng rng(2);
  GrayImage img(64, 64);
  for (auto& p : img.pixels) p = uint8_t(rng.below(256));
  for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(img));
}
BENCHMARK(BM_mock_embed)->Arg(64)->Arg(2048);

void BM_gru_forward(benchmark::State& state) {
  const int H = int(state.range(0)), D = 64, T = 12;
  Rng rng(3);
  GruClassifier g = GruClassifier::zeros(H, D, 13);
  for (Eigen::Index i = 0; i < g.theta.size(); ++i) g.theta[i] = rng.uniform(-0.3, 0.3);
  std::vector<Descriptor> seq(T);
  for (auto& d : seq)
    for (int i = 0; i < D; ++i) d.values.push_back(float(rng.uniform(-1, 1)));
  for (auto _ : state) benchmark::DoNotOptimize(gru_classify(g, seq));
}
BENCHMARK(BM_gru_forward)->Arg(32)->Arg(128);

void BM_gru_backward(benchmark::State& state) {
  const int H = int(state.range(0)), D = 64, T = 12;
  Rng rng(4);
  GruClassifier g = GruClassifier::zeros(H, D, 13);
  for (Eigen::Index i = 0; i < g.theta.size(); ++i) g.theta[i] = rng.uniform(-0.3, 0.3);
  std::vector<Descriptor> seq(T);
  for (auto& d : seq)
    for (int i = 0; i < D; ++i) d.values.push_back(float(rng.uniform(-1, 1)));
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(gru_loss_grad(g, seq, 5, &grad));
}
BENCHMARK(BM_gru_backward)->Arg(32)->Arg(128);

void BM_wavelet_descriptor(benchmark::State& state) {
  const auto step = bench_step(int(state.range(0)), 30, 14);
  for (auto _ : state) benchmark::DoNotOptimize(wavelet_descriptor(step));
}
BENCHMARK(BM_wavelet_descriptor)->Arg(8)->Arg(24);

void BM_haar_fwt(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> x(size_t(state.range(0)));
  for (auto& v : x) v = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(haar_fwt_1d(x));
}
BENCHMARK(BM_haar_fwt)->Arg(16)->Arg(1024);

void BM_segment_steps(benchmark::State& state) {
  GenConfig cfg;
  SubjectProfile p = sample_profiles(cfg).front();
  p.noise_sigma = 0.02;
  const auto seq = generate_sequence(p, cfg, 9);
  for (auto _ : state) benchmark::DoNotOptimize(segment_steps(seq));
}
BENCHMARK(BM_segment_steps);

}  // namespace

BENCHMARK_MAIN();
