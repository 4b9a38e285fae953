#include "dkf/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>

#include "dkf/errors.hpp"

namespace dkf {
namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_vector(std::string& line, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    line += ',';
    line += format_value(v[i]);
  }
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_write(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

Vector mean_abs_error(std::span<const TickTrace> traces, int tick, FilterKind filter) {
  Vector sum;
  int count = 0;
  for (const TickTrace& row : traces) {
    if (row.tick != tick || row.filter != filter) continue;
    if (count == 0) sum = Vector::Zero(row.abs_error.size());
    sum += row.abs_error;
    ++count;
  }
  if (count == 0) {
    throw TraceError("mean_abs_error: no rows for tick " + std::to_string(tick) +
                     " filter " + std::string(to_string(filter)));
  }
  return sum / static_cast<double>(count);
}

Vector steady_state_stats(std::span<const TickTrace> traces, FilterKind filter,
                          int first_tick, int last_tick) {
  if (first_tick < 1 || last_tick < first_tick) {
    throw TraceError("steady_state_stats: invalid tick window");
  }
  Vector acc;
  for (int tick = first_tick; tick <= last_tick; ++tick) {
    const Vector mae = mean_abs_error(traces, tick, filter);
    if (acc.size() == 0) acc = Vector::Zero(mae.size());
    acc += mae;
  }
  return acc / static_cast<double>(last_tick - first_tick + 1);
}

Vector ckf_gap(std::span<const TickTrace> traces, int tick, FilterKind filter) {
  return mean_abs_error(traces, tick, filter) - mean_abs_error(traces, tick, FilterKind::CKF);
}

std::vector<SummaryRow> summarize(std::span<const TickTrace> traces,
                                  std::span<const FilterKind> filter_order) {
  // (tick, filter) -> (sum, count), one pass.
  std::map<std::pair<int, FilterKind>, std::pair<Vector, int>> groups;
  for (const TickTrace& row : traces) {
    auto& [sum, count] = groups[{row.tick, row.filter}];
    if (count == 0) sum = Vector::Zero(row.abs_error.size());
    sum += row.abs_error;
    ++count;
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  int last_tick = 0;
  for (const auto& [key, value] : groups) last_tick = std::max(last_tick, key.first);
  for (int tick = 1; tick <= last_tick; ++tick) {
    for (FilterKind kind : filter_order) {
      auto it = groups.find({tick, kind});
      if (it == groups.end()) continue;
      rows.push_back({tick, kind, it->second.first / static_cast<double>(it->second.second)});
    }
  }
  return rows;
}

std::vector<SummaryRow> cross_seed_mean(const std::vector<std::vector<SummaryRow>>& per_seed) {
  if (per_seed.empty()) return {};
  std::vector<SummaryRow> mean = per_seed.front();
  for (std::size_t s = 1; s < per_seed.size(); ++s) {
    const auto& rows = per_seed[s];
    if (rows.size() != mean.size()) {
      throw TraceError("cross_seed_mean: summaries have different shapes");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].tick != mean[i].tick || rows[i].filter != mean[i].filter) {
        throw TraceError("cross_seed_mean: summaries have different shapes");
      }
      mean[i].mae += rows[i].mae;
    }
  }
  for (SummaryRow& row : mean) row.mae /= static_cast<double>(per_seed.size());
  return mean;
}

void emit_trace_csv(std::span<const TickTrace> traces, const std::filesystem::path& path,
                    Eigen::Index state_dim) {
  std::ofstream out = open_csv(path);
  std::string header = "tick,filter,node";
  for (const char* prefix : {"truth_", "est_", "abs_err_"}) {
    for (Eigen::Index d = 0; d < state_dim; ++d) {
      header += ',';
      header += prefix;
      header += std::to_string(d);
    }
  }
  header += ",cov_trace\n";
  out << header;

  for (const TickTrace& row : traces) {
    std::string line = std::to_string(row.tick);
    line += ',';
    line += to_string(row.filter);
    line += ',';
    line += std::to_string(row.node);
    append_vector(line, row.truth);
    append_vector(line, row.estimate);
    append_vector(line, row.abs_error);
    line += ',';
    line += format_value(row.cov_trace);
    line += '\n';
    out << line;
  }
  out.flush();
  check_write(out, path);
}

void emit_summary_csv(std::span<const SummaryRow> rows, const std::filesystem::path& path,
                      Eigen::Index state_dim) {
  std::ofstream out = open_csv(path);
  std::string header = "tick,filter";
  for (Eigen::Index d = 0; d < state_dim; ++d) header += ",mae_" + std::to_string(d);
  header += '\n';
  out << header;

  for (const SummaryRow& row : rows) {
    std::string line = std::to_string(row.tick);
    line += ',';
    line += to_string(row.filter);
    append_vector(line, row.mae);
    line += '\n';
    out << line;
  }
  out.flush();
  check_write(out, path);
}

}  // namespace dkf
