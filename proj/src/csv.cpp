#include "pbo/csv.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

namespace pbo {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string records_csv_header(int dimension) {
  std::string header = "seed,step,cumulative_cost,step_cost,observed,incumbent,regret,lambda_t";
  for (int i = 0; i < dimension; ++i) header += ",x" + std::to_string(i);
  return header;
}

void write_records_csv(std::ostream& out, const std::vector<std::vector<RegretRecord>>& per_seed,
                       int dimension) {
  out << records_csv_header(dimension) << "\n";
  for (const auto& records : per_seed) {
    for (const RegretRecord& r : records) {
      out << r.seed << "," << r.step << "," << format_double(r.cumulative_cost) << ","
          << format_double(r.step_cost) << "," << format_double(r.observed) << ","
          << format_double(r.incumbent) << "," << format_double(r.regret) << ","
          << format_double(r.lambda_t);
      for (int i = 0; i < dimension; ++i)
        out << "," << (i < r.point.size() ? format_double(r.point[i]) : "nan");
      out << "\n";
    }
  }
}

std::string records_to_csv(const std::vector<std::vector<RegretRecord>>& per_seed, int dimension) {
  std::ostringstream out;
  write_records_csv(out, per_seed, dimension);
  return out.str();
}

std::vector<std::vector<RegretRecord>> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_records_csv: empty file");
  if (line.rfind("seed,step,cumulative_cost,step_cost,observed,incumbent,regret,lambda_t", 0) != 0)
    throw std::runtime_error("read_records_csv: unexpected header");

  std::map<std::uint64_t, std::vector<RegretRecord>> by_seed;
  std::vector<std::uint64_t> seed_order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 8) throw std::runtime_error("read_records_csv: short row");
    RegretRecord r;
    r.seed = std::stoull(fields[0]);
    r.step = std::stoi(fields[1]);
    r.cumulative_cost = std::stod(fields[2]);
    r.step_cost = std::stod(fields[3]);
    r.observed = std::stod(fields[4]);
    r.incumbent = std::stod(fields[5]);
    r.regret = std::stod(fields[6]);
    r.lambda_t = std::stod(fields[7]);
    r.point.resize(static_cast<Eigen::Index>(fields.size()) - 8);
    for (std::size_t i = 8; i < fields.size(); ++i) r.point[i - 8] = std::stod(fields[i]);
    if (by_seed.find(r.seed) == by_seed.end()) seed_order.push_back(r.seed);
    by_seed[r.seed].push_back(std::move(r));
  }
  std::vector<std::vector<RegretRecord>> out;
  for (std::uint64_t s : seed_order) out.push_back(std::move(by_seed[s]));
  return out;
}

}  // namespace pbo
