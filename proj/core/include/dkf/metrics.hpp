#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "dkf/sim.hpp"

namespace dkf {

// Componentwise mean of |estimate - truth| over the rows of one (tick,
// filter) group, i.e. over the nodes alive at that tick. The centralized
// filter contributes its single global row unchanged. Throws TraceError when
// the group is empty.
Vector mean_abs_error(std::span<const TickTrace> traces, int tick, FilterKind filter);

// Time-averaged mean absolute error over ticks [first_tick, last_tick].
Vector steady_state_stats(std::span<const TickTrace> traces, FilterKind filter,
                          int first_tick, int last_tick);

// Componentwise gap between a filter's mean absolute error and the
// centralized filter's absolute error at the same tick.
Vector ckf_gap(std::span<const TickTrace> traces, int tick, FilterKind filter);

struct SummaryRow {
  int tick = 0;
  FilterKind filter = FilterKind::CKF;
  Vector mae;
};

// Per-(tick, filter) mean absolute error for every tick present in the
// traces, ordered by (tick, position of the filter in `filter_order`).
std::vector<SummaryRow> summarize(std::span<const TickTrace> traces,
                                  std::span<const FilterKind> filter_order);

// Entrywise mean of structurally identical summaries from independent seeds.
std::vector<SummaryRow> cross_seed_mean(const std::vector<std::vector<SummaryRow>>& per_seed);

// CSV with header tick,filter,node,truth_0..,est_0..,abs_err_0..,cov_trace;
// 12 significant digits; one row per record in input order. Failure rows
// print nan values.
void emit_trace_csv(std::span<const TickTrace> traces, const std::filesystem::path& path,
                    Eigen::Index state_dim);

// CSV with header tick,filter,mae_0..; same formatting rules.
void emit_summary_csv(std::span<const SummaryRow> rows, const std::filesystem::path& path,
                      Eigen::Index state_dim);

}  // namespace dkf
