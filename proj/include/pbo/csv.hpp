#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pbo/experiment.hpp"

namespace pbo {

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double value);

/// Trace CSV with header seed,step,cumulative_cost,step_cost,observed,
/// incumbent,regret,lambda_t followed by the chosen point coordinates
/// x0..x{d-1}.
std::string records_csv_header(int dimension);
void write_records_csv(std::ostream& out, const std::vector<std::vector<RegretRecord>>& per_seed,
                       int dimension);
std::string records_to_csv(const std::vector<std::vector<RegretRecord>>& per_seed, int dimension);

/// Parses a trace CSV back into per-seed record lists (point columns
/// included). Throws on malformed headers or rows.
std::vector<std::vector<RegretRecord>> read_records_csv(std::istream& in);

}  // namespace pbo
