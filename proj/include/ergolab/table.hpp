#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ergolab::runner {

inline constexpr const char* kToolVersion = "ergolab 0.1.0";

struct Column {
  enum class Type { real, integer, complex_ };
  std::string name;
  Type type = Type::real;
};

using Cell = std::variant<double, std::int64_t, std::complex<double>>;

// Typed result rows plus the metadata needed to reproduce them. Wall time is
// tracked in memory for reporting but never written to the CSV/JSON artifacts,
// which must be byte-identical across runs.
class ResultTable {
 public:
  ResultTable() = default;
  ResultTable(std::string experiment, std::vector<Column> columns);

  void add_row(std::vector<Cell> row);

  const std::string& experiment() const { return experiment_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void set_seed(std::uint64_t s) { seed_ = s; }
  std::uint64_t seed() const { return seed_; }
  void set_config_echo(nlohmann::json cfg) { config_echo_ = std::move(cfg); }
  const nlohmann::json& config_echo() const { return config_echo_; }
  void set_wall_time(double seconds) { wall_time_s_ = seconds; }
  double wall_time() const { return wall_time_s_; }
  const std::string& version() const { return version_; }

  // CSV: '#'-prefixed metadata block, a header row, then data rows. UTF-8,
  // '\n' line endings, shortest-round-trip floats. Complex columns split
  // into <name>_re,<name>_im cells.
  std::string to_csv() const;
  static ResultTable from_csv(const std::string& text);

  nlohmann::json to_json() const;
  static ResultTable from_json(const nlohmann::json& j);

 private:
  std::string experiment_;
  std::string version_ = kToolVersion;
  std::uint64_t seed_ = 0;
  nlohmann::json config_echo_ = nlohmann::json::object();
  double wall_time_s_ = 0.0;
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// Shortest representation that parses back to the same double.
std::string format_double(double v);

struct EmitPaths {
  std::string csv;
  std::string json;
};

// Writes <prefix>.csv and <prefix>.json.
EmitPaths emit(const ResultTable& table, const std::string& out_prefix);

}  // namespace ergolab::runner
