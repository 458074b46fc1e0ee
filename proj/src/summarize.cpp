#include "pbo/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pbo/csv.hpp"

namespace pbo {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize_regret(
    const std::map<std::string, std::vector<std::vector<RegretRecord>>>& per_policy) {
  if (per_policy.empty()) throw AlignmentError("summarize: no policies");

  // All policies must cover the same seeds.
  std::set<std::uint64_t> reference_seeds;
  bool first = true;
  for (const auto& [policy, runs] : per_policy) {
    std::set<std::uint64_t> seeds;
    for (const auto& records : runs) {
      if (records.empty()) throw AlignmentError("summarize: empty trace for policy " + policy);
      seeds.insert(records.front().seed);
    }
    if (seeds.size() != runs.size())
      throw AlignmentError("summarize: duplicate seeds for policy " + policy);
    if (first) {
      reference_seeds = seeds;
      first = false;
    } else if (seeds != reference_seeds) {
      throw AlignmentError("summarize: seed sets differ between policies");
    }
  }

  // Common grid: all observed cumulative costs from the point where every
  // run has at least one record.
  double grid_start = 0.0;
  std::set<double> grid;
  for (const auto& [policy, runs] : per_policy)
    for (const auto& records : runs) {
      grid_start = std::max(grid_start, records.front().cumulative_cost);
      for (const RegretRecord& r : records) grid.insert(r.cumulative_cost);
    }

  std::vector<SummaryRow> rows;
  for (const auto& [policy, runs] : per_policy) {
    for (double g : grid) {
      if (g < grid_start) continue;
      std::vector<double> regrets;
      for (const auto& records : runs) {
        // Last record at cumulative cost <= g (carried forward).
        const RegretRecord* last = nullptr;
        for (const RegretRecord& r : records) {
          if (r.cumulative_cost <= g) last = &r;
          else break;
        }
        if (last == nullptr) throw AlignmentError("summarize: grid precedes first observation");
        regrets.push_back(last->regret);
      }
      SummaryRow row;
      row.policy = policy;
      row.cumulative_cost = g;
      row.median = quantile(regrets, 0.5);
      row.q25 = quantile(regrets, 0.25);
      row.q75 = quantile(regrets, 0.75);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "policy,cumulative_cost,median,q25,q75\n";
  for (const SummaryRow& r : rows)
    out << r.policy << "," << format_double(r.cumulative_cost) << "," << format_double(r.median)
        << "," << format_double(r.q25) << "," << format_double(r.q75) << "\n";
  return out.str();
}

}  // namespace pbo
