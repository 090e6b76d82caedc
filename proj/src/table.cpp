#include "ergolab/table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ergolab::runner {
namespace {

const char* type_name(Column::Type t) {
  switch (t) {
    case Column::Type::real: return "real";
    case Column::Type::integer: return "integer";
    case Column::Type::complex_: return "complex";
  }
  return "?";
}

Column::Type parse_type(const std::string& s) {
  if (s == "real") return Column::Type::real;
  if (s == "integer") return Column::Type::integer;
  if (s == "complex") return Column::Type::complex_;
  throw std::invalid_argument("unknown column type: " + s);
}

double parse_double_str(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad number: " + s);
  return v;
}

std::int64_t parse_int_str(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer: " + s);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ResultTable::ResultTable(std::string experiment, std::vector<Column> columns)
    : experiment_(std::move(experiment)), columns_(std::move(columns)) {
  if (columns_.empty())
    throw std::invalid_argument("ResultTable: needs >= 1 column");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument("ResultTable: row width mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) {
    const bool ok =
        (columns_[c].type == Column::Type::real &&
         std::holds_alternative<double>(row[c])) ||
        (columns_[c].type == Column::Type::integer &&
         std::holds_alternative<std::int64_t>(row[c])) ||
        (columns_[c].type == Column::Type::complex_ &&
         std::holds_alternative<std::complex<double>>(row[c]));
    if (!ok)
      throw std::invalid_argument("ResultTable: cell type mismatch in column " +
                                  columns_[c].name);
  }
  rows_.push_back(std::move(row));
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  os << "# ergolab-table v1\n";
  os << "# experiment: " << experiment_ << '\n';
  os << "# version: " << version_ << '\n';
  os << "# seed: " << seed_ << '\n';
  os << "# columns: ";
  for (std::size_t c = 0; c < columns_.size(); ++c)
    os << (c ? "," : "") << columns_[c].name << ':' << type_name(columns_[c].type);
  os << '\n';
  os << "# config: " << config_echo_.dump() << '\n';
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) os << ',';
    if (columns_[c].type == Column::Type::complex_)
      os << columns_[c].name << "_re," << columns_[c].name << "_im";
    else
      os << columns_[c].name;
  }
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      switch (columns_[c].type) {
        case Column::Type::real:
          os << format_double(std::get<double>(row[c]));
          break;
        case Column::Type::integer:
          os << std::get<std::int64_t>(row[c]);
          break;
        case Column::Type::complex_: {
          const auto z = std::get<std::complex<double>>(row[c]);
          os << format_double(z.real()) << ',' << format_double(z.imag());
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

ResultTable ResultTable::from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  ResultTable t;
  bool have_columns = false;
  bool header_done = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;  // banner line
      const std::string key = line.substr(2, colon - 2);
      const std::string val = line.substr(colon + 2);
      if (key == "experiment") {
        t.experiment_ = val;
      } else if (key == "version") {
        t.version_ = val;
      } else if (key == "seed") {
        t.seed_ = std::stoull(val);
      } else if (key == "columns") {
        for (const auto& spec : split(val, ',')) {
          const auto sep = spec.find(':');
          if (sep == std::string::npos)
            throw std::invalid_argument("bad columns metadata: " + spec);
          t.columns_.push_back(
              Column{spec.substr(0, sep), parse_type(spec.substr(sep + 1))});
        }
        have_columns = true;
      } else if (key == "config") {
        t.config_echo_ = nlohmann::json::parse(val);
      }
      continue;
    }
    if (!have_columns)
      throw std::invalid_argument("CSV missing '# columns:' metadata");
    if (!header_done) {
      header_done = true;  // header row carries no extra information
      continue;
    }
    const auto cells = split(line, ',');
    std::vector<Cell> row;
    std::size_t pos = 0;
    for (const auto& col : t.columns_) {
      switch (col.type) {
        case Column::Type::real:
          if (pos >= cells.size()) throw std::invalid_argument("short CSV row");
          row.emplace_back(parse_double_str(cells[pos++]));
          break;
        case Column::Type::integer:
          if (pos >= cells.size()) throw std::invalid_argument("short CSV row");
          row.emplace_back(parse_int_str(cells[pos++]));
          break;
        case Column::Type::complex_: {
          if (pos + 1 >= cells.size())
            throw std::invalid_argument("short CSV row");
          const double re = parse_double_str(cells[pos++]);
          const double im = parse_double_str(cells[pos++]);
          row.emplace_back(std::complex<double>(re, im));
          break;
        }
      }
    }
    if (pos != cells.size())
      throw std::invalid_argument("extra cells in CSV row");
    t.rows_.push_back(std::move(row));
  }
  if (!have_columns)
    throw std::invalid_argument("CSV missing '# columns:' metadata");
  return t;
}

nlohmann::json ResultTable::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_)
    cols.push_back({{"name", c.name}, {"type", type_name(c.type)}});
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json jr = nlohmann::json::array();
    for (std::size_t c = 0; c < row.size(); ++c) {
      switch (columns_[c].type) {
        case Column::Type::real:
          jr.push_back(std::get<double>(row[c]));
          break;
        case Column::Type::integer:
          jr.push_back(std::get<std::int64_t>(row[c]));
          break;
        case Column::Type::complex_: {
          const auto z = std::get<std::complex<double>>(row[c]);
          jr.push_back({z.real(), z.imag()});
          break;
        }
      }
    }
    rows.push_back(std::move(jr));
  }
  return nlohmann::json{
      {"format", "ergolab-table"},
      {"version", 1},
      {"metadata",
       {{"experiment", experiment_},
        {"version", version_},
        {"seed", seed_},
        {"config", config_echo_}}},
      {"columns", cols},
      {"rows", rows}};
}

ResultTable ResultTable::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "ergolab-table")
    throw std::invalid_argument("not an ergolab table JSON");
  ResultTable t;
  const auto& md = j.at("metadata");
  t.experiment_ = md.at("experiment").get<std::string>();
  t.version_ = md.at("version").get<std::string>();
  t.seed_ = md.at("seed").get<std::uint64_t>();
  t.config_echo_ = md.at("config");
  for (const auto& cj : j.at("columns"))
    t.columns_.push_back(Column{cj.at("name").get<std::string>(),
                                parse_type(cj.at("type").get<std::string>())});
  for (const auto& rj : j.at("rows")) {
    std::vector<Cell> row;
    for (std::size_t c = 0; c < t.columns_.size(); ++c) {
      switch (t.columns_[c].type) {
        case Column::Type::real:
          row.emplace_back(rj.at(c).get<double>());
          break;
        case Column::Type::integer:
          row.emplace_back(rj.at(c).get<std::int64_t>());
          break;
        case Column::Type::complex_:
          row.emplace_back(std::complex<double>(rj.at(c).at(0).get<double>(),
                                                rj.at(c).at(1).get<double>()));
          break;
      }
    }
    t.rows_.push_back(std::move(row));
  }
  return t;
}

EmitPaths emit(const ResultTable& table, const std::string& out_prefix) {
  if (table.rows().empty())
    throw std::invalid_argument("emit: table is empty");
  if (out_prefix.empty())
    throw std::invalid_argument("emit: empty output prefix");
  EmitPaths paths{out_prefix + ".csv", out_prefix + ".json"};
  {
    std::ofstream os(paths.csv, std::ios::binary);
    if (!os) throw std::runtime_error("emit: cannot write " + paths.csv);
    os << table.to_csv();
  }
  {
    std::ofstream os(paths.json, std::ios::binary);
    if (!os) throw std::runtime_error("emit: cannot write " + paths.json);
    os << table.to_json().dump(2) << '\n';
  }
  return paths;
}

}  // namespace ergolab::runner
