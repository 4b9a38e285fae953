#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "dkf/errors.hpp"
#include "dkf/metrics.hpp"
#include "dkf/sim.hpp"

using namespace dkf;

namespace {

TickTrace row_of(int tick, FilterKind filter, NodeId node, const Vector& abs_error) {
  TickTrace row;
  row.tick = tick;
  row.filter = filter;
  row.node = node;
  row.truth = Vector::Zero(abs_error.size());
  row.estimate = abs_error;
  row.abs_error = abs_error;
  row.cov_trace = 1.0;
  return row;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("mean absolute error averages the alive nodes") {
  std::vector<TickTrace> traces;
  traces.push_back(row_of(1, FilterKind::LKF, 1, Vector{{1, 0, 0, 0}}));
  traces.push_back(row_of(1, FilterKind::LKF, 2, Vector{{3, 0, 0, 0}}));
  const Vector mae = mean_abs_error(traces, 1, FilterKind::LKF);
  CHECK(mae(0) == doctest::Approx(2.0));
  CHECK(mae(1) == 0.0);

  CHECK_THROWS_AS(mean_abs_error(traces, 2, FilterKind::LKF), TraceError);
  CHECK_THROWS_AS(mean_abs_error(traces, 1, FilterKind::CKF), TraceError);
}

TEST_CASE("exact estimates give a zero MAE vector") {
  std::vector<TickTrace> traces;
  for (NodeId i = 1; i <= 4; ++i) {
    traces.push_back(row_of(1, FilterKind::IFDKF, i, Vector::Zero(4)));
  }
  CHECK(mean_abs_error(traces, 1, FilterKind::IFDKF).isZero(0.0));
}

TEST_CASE("the failed-node preset shrinks the MAE denominator") {
  const RunResult result = run(scenario_preset("fail-at-65"));
  int rows_70 = 0;
  for (const TickTrace& row : result.traces) {
    if (row.tick == 70 && row.filter == FilterKind::IFDKF) ++rows_70;
  }
  CHECK(rows_70 == 4);
  // averaging 4 rows, not 6: reconstruct by hand
  Vector sum = Vector::Zero(4);
  for (const TickTrace& row : result.traces) {
    if (row.tick == 70 && row.filter == FilterKind::IFDKF) sum += row.abs_error;
  }
  CHECK((mean_abs_error(result.traces, 70, FilterKind::IFDKF) - sum / 4.0)
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("the MAE decomposes into the per-node error sum") {
  const RunResult result = run(scenario_preset("dense-tracking"));
  for (int tick : {1, 40, 150}) {
    Vector sum = Vector::Zero(4);
    int alive = 0;
    for (const TickTrace& row : result.traces) {
      if (row.tick == tick && row.filter == FilterKind::IFDKF) {
        sum += row.abs_error;
        ++alive;
      }
    }
    const Vector mae = mean_abs_error(result.traces, tick, FilterKind::IFDKF);
    CHECK((static_cast<double>(alive) * mae - sum).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("steady-state stats") {
  std::vector<TickTrace> traces;
  for (int tick = 1; tick <= 10; ++tick) {
    traces.push_back(row_of(tick, FilterKind::CKF, kCentralNode, Vector{{2, 2, 2, 2}}));
  }
  const Vector window = steady_state_stats(traces, FilterKind::CKF, 3, 7);
  CHECK(window.isApproxToConstant(2.0, 1e-15));
  CHECK_THROWS_AS(steady_state_stats(traces, FilterKind::CKF, 5, 11), TraceError);
  CHECK_THROWS_AS(steady_state_stats(traces, FilterKind::CKF, 0, 5), TraceError);
}

TEST_CASE("steady-state ordering: IFDKF at or below GKCF over 20 seeds") {
  Scenario base = scenario_preset("dense-tracking");
  double ifdkf_acc = 0.0;
  double gkcf_acc = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    Scenario s = base;
    s.seed = static_cast<std::uint64_t>(seed);
    const RunResult result = run(s);
    const Vector ifdkf = steady_state_stats(result.traces, FilterKind::IFDKF, 50, 150);
    const Vector gkcf = steady_state_stats(result.traces, FilterKind::GKCF, 50, 150);
    ifdkf_acc += ifdkf.head(2).mean();
    gkcf_acc += gkcf.head(2).mean();
  }
  CHECK(ifdkf_acc / 20.0 <= gkcf_acc / 20.0);
}

TEST_CASE("summaries group by tick and filter") {
  std::vector<TickTrace> traces;
  traces.push_back(row_of(1, FilterKind::LKF, 1, Vector{{1, 0, 0, 0}}));
  traces.push_back(row_of(1, FilterKind::LKF, 2, Vector{{3, 0, 0, 0}}));
  traces.push_back(row_of(1, FilterKind::CKF, kCentralNode, Vector{{5, 0, 0, 0}}));
  traces.push_back(row_of(2, FilterKind::LKF, 1, Vector{{7, 0, 0, 0}}));

  const std::vector<FilterKind> order{FilterKind::CKF, FilterKind::LKF};
  const auto rows = summarize(traces, order);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].filter == FilterKind::CKF);
  CHECK(rows[0].mae(0) == doctest::Approx(5.0));
  CHECK(rows[1].filter == FilterKind::LKF);
  CHECK(rows[1].mae(0) == doctest::Approx(2.0));
  CHECK(rows[2].tick == 2);

  const auto mean = cross_seed_mean({rows, rows});
  CHECK(mean.size() == rows.size());
  CHECK(mean[1].mae(0) == doctest::Approx(2.0));
}

TEST_CASE("trace CSV layout") {
  const auto dir = std::filesystem::temp_directory_path() / "dkf_metrics_csv";
  std::filesystem::create_directories(dir);

  SUBCASE("an empty stream writes only the header") {
    emit_trace_csv({}, dir / "empty.csv", 4);
    const std::string text = slurp(dir / "empty.csv");
    CHECK(text ==
          "tick,filter,node,truth_0,truth_1,truth_2,truth_3,est_0,est_1,est_2,est_3,"
          "abs_err_0,abs_err_1,abs_err_2,abs_err_3,cov_trace\n");
  }

  SUBCASE("one tick with two alive nodes gives two data rows") {
    std::vector<TickTrace> traces;
    traces.push_back(row_of(1, FilterKind::LKF, 1, Vector{{1, 0, 0, 0}}));
    traces.push_back(row_of(1, FilterKind::LKF, 2, Vector{{3, 0, 0, 0}}));
    emit_trace_csv(traces, dir / "two_rows.csv", 4);
    const std::string text = slurp(dir / "two_rows.csv");
    int newlines = 0;
    for (char c : text) newlines += c == '\n';
    CHECK(newlines == 3);
    CHECK(text.find("1,LKF,1,") != std::string::npos);
    CHECK(text.find("1,LKF,2,") != std::string::npos);
  }

  SUBCASE("values print with 12 significant digits") {
    std::vector<TickTrace> traces;
    traces.push_back(row_of(1, FilterKind::CKF, kCentralNode,
                            Vector{{1.0 / 3.0, 0, 0, 0}}));
    emit_trace_csv(traces, dir / "digits.csv", 4);
    CHECK(slurp(dir / "digits.csv").find("0.333333333333") != std::string::npos);
  }

  SUBCASE("summary CSV header") {
    std::vector<SummaryRow> rows{{1, FilterKind::IFDKF, Vector{{1, 2, 3, 4}}}};
    emit_summary_csv(rows, dir / "summary.csv", 4);
    const std::string text = slurp(dir / "summary.csv");
    CHECK(text == "tick,filter,mae_0,mae_1,mae_2,mae_3\n1,IFDKF,1,2,3,4\n");
  }

  SUBCASE("unwritable paths are reported") {
    CHECK_THROWS_AS(emit_trace_csv({}, dir / "no_such_dir" / "x.csv", 4), IoError);
  }
}

TEST_CASE("the CKF gap vanishes on a complete graph with identical priors") {
  // a degenerate prior range hands every node (and the centralized filter,
  // whose prior is their mean) one and the same initial belief, so the
  // distributed posterior coincides with the centralized one at every tick
  Scenario s = scenario_preset("dense-tracking");
  s.topology = complete_topology(6);
  s.filters = {{FilterKind::CKF, {}}, {FilterKind::IFDKF, {}}};
  s.init.prior_low = 137.0;
  s.init.prior_high = 137.0;
  const RunResult result = run(s);
  REQUIRE(result.failures.empty());
  for (int tick = 1; tick <= s.ticks; ++tick) {
    CHECK(ckf_gap(result.traces, tick, FilterKind::IFDKF).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("CKF summaries use the single global row unchanged") {
  const RunResult result = run(scenario_preset("dense-tracking"));
  const Vector mae = mean_abs_error(result.traces, 10, FilterKind::CKF);
  for (const TickTrace& row : result.traces) {
    if (row.tick == 10 && row.filter == FilterKind::CKF) {
      CHECK((mae - row.abs_error).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}
