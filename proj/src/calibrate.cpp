#include "riskcal/calibrate.hpp"

#include "riskcal/format.hpp"

#include <cmath>
#include <ostream>

namespace riskcal {

const char* to_string(StopMode mode) { return mode == StopMode::StrictStop ? "strict" : "best"; }

void RcConfig::validate() const {
  if (!std::isfinite(learning_rate) || learning_rate < 0.0)
    throw std::invalid_argument("learning rate must be finite and nonnegative");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
}

void RcTrace::record(const LossSummary& losses) {
  soft_error.push_back(losses.soft_error);
  error.push_back(losses.error);
}

void RcTrace::finalize_best() { best_iteration = argmin_earliest(soft_error); }

int argmin_earliest(const std::vector<double>& values) {
  int best = 0;
  for (std::size_t t = 1; t < values.size(); ++t)
    if (values[t] < values[static_cast<std::size_t>(best)]) best = static_cast<int>(t);
  return best;
}

StatisticsVector rc_step(const StatisticsVector& s, const StatisticsVector& s_xy,
                         const StatisticsVector& s_xh, double learning_rate) {
  if (!s.same_layout(s_xy) || !s.same_layout(s_xh)) throw std::invalid_argument("rc_step: layout mismatch");
  return stats_add_scaled(s, stats_add_scaled(s_xy, s_xh, -1.0), learning_rate);
}

void write_trace_csv(const RcTrace& trace, std::ostream& out) {
  out << "iteration,soft_error,error\n";
  for (std::size_t t = 0; t < trace.soft_error.size(); ++t)
    out << t << ',' << format_double(trace.soft_error[t]) << ',' << format_double(trace.error[t]) << '\n';
}

}  // namespace riskcal
