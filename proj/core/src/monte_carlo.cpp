#include "brachiation/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "brachiation/errors.hpp"
#include "brachiation/rng.hpp"

namespace brachiation {

void InitialRanges::validate() const {
  if (!(theta1_min <= theta1_max)) {
    throw ConfigError("monte_carlo.theta1_min", "must not exceed theta1_max");
  }
  if (!(theta2_min <= theta2_max)) {
    throw ConfigError("monte_carlo.theta2_min", "must not exceed theta2_max");
  }
}

RobotState draw_initial_condition(const RobotState& base, const InitialRanges& ranges,
                                  std::uint64_t seed, int index) {
  RunRng rng(seed, static_cast<std::uint64_t>(index));
  RobotState s = base;
  s.q[0] = rng.uniform(ranges.theta1_min, ranges.theta1_max);
  s.q[1] = rng.uniform(ranges.theta2_min, ranges.theta2_max);
  return s;
}

AggregateRow aggregate(ControllerKind controller, const std::vector<Metrics>& runs) {
  AggregateRow row;
  row.controller = controller;
  row.runs = static_cast<int>(runs.size());
  if (runs.empty()) return row;
  for (const auto& m : runs) {
    row.rms_u += m.rms_u * m.rms_u;
    row.rmse_y += m.rmse_y * m.rmse_y;
    row.rmse_ydot += m.rmse_ydot * m.rmse_ydot;
    row.successes += m.success ? 1 : 0;
  }
  const double n = static_cast<double>(runs.size());
  row.rms_u = std::sqrt(row.rms_u / n);
  row.rmse_y = std::sqrt(row.rmse_y / n);
  row.rmse_ydot = std::sqrt(row.rmse_ydot / n);
  return row;
}

MonteCarloResult monte_carlo(const Scenario& base, const InitialRanges& ranges, int n,
                             std::uint64_t seed, const MonteCarloOptions& options) {
  if (n < 1) throw ConfigError("monte_carlo.n", "must be >= 1");
  ranges.validate();
  base.validate();

  const auto count = static_cast<std::size_t>(n);
  MonteCarloResult result;
  result.runs.resize(count);
  std::vector<EpisodeLog> adaptive(options.keep_logs ? count : 0);
  std::vector<EpisodeLog> baseline(options.keep_logs ? count : 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        Scenario sc = base;
        sc.swings = 1;
        sc.initial = draw_initial_condition(base.initial, ranges, seed, static_cast<int>(i));
        MonteCarloRun& run = result.runs[i];
        run.index = static_cast<int>(i);
        run.initial = sc.initial;

        sc.controller = ControllerKind::kAdaptiveRobust;
        EpisodeLog a = run_swing(sc);
        sc.controller = ControllerKind::kFeedbackLinearization;
        EpisodeLog b = run_swing(sc);
        run.adaptive = a.metrics;
        run.baseline = b.metrics;
        if (options.keep_logs) {
          adaptive[i] = std::move(a);
          baseline[i] = std::move(b);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<Metrics> a;
  std::vector<Metrics> b;
  for (const auto& r : result.runs) {
    a.push_back(r.adaptive);
    b.push_back(r.baseline);
  }
  result.aggregate = {aggregate(ControllerKind::kAdaptiveRobust, a),
                      aggregate(ControllerKind::kFeedbackLinearization, b)};
  result.adaptive_logs = std::move(adaptive);
  result.baseline_logs = std::move(baseline);
  return result;
}

}  // namespace brachiation
