#pragma once

#include <vector>

#include "memchan_cli/config.hpp"

namespace memchan::cli {

/// One row per (lambda, n, tau) in that nesting order. With jobs > 1 the
/// rows are computed on worker threads but returned in grid order.
std::vector<GammaPoint> run_sweep(const SweepConfig& config, int jobs = 1);

/// A single row; uses the fixed config.p when optimize_p is false.
GammaPoint sweep_point(const SweepConfig& config, double lambda, int n, double tau_over_tau_e);

}  // namespace memchan::cli
