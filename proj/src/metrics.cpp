#include "ltos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ltos {
namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <typename Value>
void write_aggregate(std::ostream& out, std::span<const MetricsTable> runs, Value value,
                     bool use_evals) {
  out << "episode,mean,min,max\n";
  if (runs.empty()) return;
  std::size_t rows = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) rows = std::min(rows, use_evals ? r.evals.size() : r.episodes.size());
  for (std::size_t k = 0; k < rows; ++k) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::uint64_t episode = 0;
    for (const auto& r : runs) {
      const double v = value(r, k);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      episode = use_evals ? r.evals[k].episode : r.episodes[k].episode;
    }
    out << episode << ',' << format_real(sum / static_cast<double>(runs.size())) << ','
        << format_real(lo) << ',' << format_real(hi) << '\n';
  }
}

std::span<const EvalRecord> final_window(const MetricsTable& table, double fraction) {
  if (table.evals.empty()) throw std::invalid_argument("final window of an empty eval series");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("final window fraction must be in (0,1]");
  }
  const auto n = table.evals.size();
  const auto w = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  return std::span<const EvalRecord>(table.evals).last(w);
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double EpisodeRecord::average_return() const { return mean(returns); }
double EpisodeRecord::average_reward() const { return mean(rewards); }

void write_metrics_csv(std::ostream& out, const MetricsTable& table) {
  out << "episode,step,agent,return,reward,selfishness,q_loss\n";
  for (const auto& e : table.episodes) {
    for (std::size_t i = 0; i < e.returns.size(); ++i) {
      out << e.episode << ',' << e.step << ',' << i << ',' << format_real(e.returns[i]) << ','
          << format_real(e.rewards[i]) << ',' << format_real(e.selfishness[i]) << ','
          << format_real(e.q_loss[i]) << '\n';
    }
  }
}

void write_eval_csv(std::ostream& out, const MetricsTable& table) {
  out << "episode,step,return,reward\n";
  for (const auto& e : table.evals) {
    out << e.episode << ',' << e.step << ',' << format_real(e.average_return) << ','
        << format_real(e.average_reward) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const MetricsTable> runs) {
  write_aggregate(
      out, runs,
      [](const MetricsTable& t, std::size_t k) { return t.episodes[k].average_return(); }, false);
}

void write_eval_aggregate_csv(std::ostream& out, std::span<const MetricsTable> runs) {
  write_aggregate(
      out, runs, [](const MetricsTable& t, std::size_t k) { return t.evals[k].average_return; },
      true);
}

double final_window_return(const MetricsTable& table, double fraction) {
  const auto w = final_window(table, fraction);
  double sum = 0.0;
  for (const auto& e : w) sum += e.average_return;
  return sum / static_cast<double>(w.size());
}

double final_window_reward(const MetricsTable& table, double fraction) {
  const auto w = final_window(table, fraction);
  double sum = 0.0;
  for (const auto& e : w) sum += e.average_reward;
  return sum / static_cast<double>(w.size());
}

std::optional<std::uint64_t> episodes_to_threshold(const MetricsTable& table, double threshold) {
  for (const auto& e : table.evals) {
    if (e.average_return >= threshold) return e.episode;
  }
  return std::nullopt;
}

}  // namespace ltos
