#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "dkf/filters.hpp"
#include "dkf/graph.hpp"
#include "dkf/linalg.hpp"
#include "dkf/sim.hpp"

namespace {

using namespace dkf;

Matrix random_spd(GaussianSource& g, Eigen::Index n) {
  Matrix G(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) G(r, c) = g.next();
  }
  return symmetrize(G * G.transpose() + static_cast<double>(n) * Matrix::Identity(n, n));
}

void BM_invert_spd(benchmark::State& state) {
  GaussianSource g(1);
  const Matrix m = random_spd(g, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_spd(m, "bench"));
  }
}
BENCHMARK(BM_invert_spd);

void BM_kf_update(benchmark::State& state) {
  GaussianSource g(2);
  NodeBelief b;
  b.x_prior = g.next_vector(4);
  b.P_prior = random_spd(g, 4);
  const Matrix S = random_spd(g, 4);
  const Vector y = g.next_vector(4);
  for (auto _ : state) {
    NodeBelief work = b;
    kf_update(work, S, y);
    benchmark::DoNotOptimize(work);
  }
}
BENCHMARK(BM_kf_update);

void BM_ifdkf_update(benchmark::State& state) {
  const int members = static_cast<int>(state.range(0));
  GaussianSource g(3);
  NodeBelief b;
  b.x_prior = g.next_vector(4);
  b.P_prior = random_spd(g, 4);
  std::vector<ExchangeMessage> inbox;
  for (int j = 1; j <= members; ++j) {
    ExchangeMessage msg;
    msg.sender = j;
    msg.S = random_spd(g, 4);
    msg.y = g.next_vector(4);
    msg.x_prior = g.next_vector(4);
    msg.P_prior = random_spd(g, 4);
    inbox.push_back(std::move(msg));
  }
  for (auto _ : state) {
    NodeBelief work = b;
    ifdkf_update(work, inbox);
    benchmark::DoNotOptimize(work);
  }
}
BENCHMARK(BM_ifdkf_update)->Arg(1)->Arg(3)->Arg(5);

void BM_classify_naive(benchmark::State& state) {
  const Scenario s = scenario_preset("dense-tracking");
  LinearModel model = s.model;
  model.validate();
  const Topology topo = s.topology;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_naive(topo, model));
  }
}
BENCHMARK(BM_classify_naive);

void BM_preset_run(benchmark::State& state) {
  Scenario s = scenario_preset("dense-tracking");
  s.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(s));
  }
}
BENCHMARK(BM_preset_run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
