#include "photonbound/cli/table_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace photonbound::cli {
namespace {

struct Reader {
  std::string origin;
  int line = 0;

  [[noreturn]] void fail(int column, const std::string& what) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  }

  double number(const std::string& field, int column) const {
    double v = 0.0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end) fail(column, "not a number: `" + field + "`");
    return v;
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(std::ostream& os, const MeasurementTable& table) {
  os << "# detector=" << (table.kind == TableKind::Threshold ? "threshold" : "homodyne");
  for (const auto& [key, value] : table.parameters) os << ' ' << key << '=' << format_double(value);
  os << '\n' << 'x';
  if (table.kind == TableKind::Threshold) {
    for (double nu : table.attenuations) os << ',' << format_double(nu);
  } else {
    for (std::size_t j = 0; j + 1 < table.bin_edges.size(); ++j) {
      os << ',' << format_double(table.bin_edges[j]) << ':' << format_double(table.bin_edges[j + 1]);
    }
  }
  os << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    os << format_double(table.intensities[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) os << ',' << format_double(table.values(i, j));
    os << '\n';
  }
}

MeasurementTable read_table(std::istream& is, const std::string& origin) {
  Reader rd{origin};
  MeasurementTable table;
  std::string raw;

  // metadata
  if (!std::getline(is, raw)) rd.fail(1, "empty table");
  rd.line = 1;
  if (raw.empty() || raw[0] != '#') rd.fail(1, "expected `# detector=...` metadata line");
  {
    std::istringstream meta(raw.substr(1));
    std::string tok;
    bool have_kind = false;
    int column = 2;
    while (meta >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) rd.fail(column, "expected key=value, got `" + tok + "`");
      const std::string key = tok.substr(0, eq);
      const std::string value = tok.substr(eq + 1);
      if (key == "detector") {
        if (value == "threshold") {
          table.kind = TableKind::Threshold;
        } else if (value == "homodyne") {
          table.kind = TableKind::Homodyne;
        } else {
          rd.fail(column, "unknown detector `" + value + "`");
        }
        have_kind = true;
      } else {
        table.parameters[key] = rd.number(value, column);
      }
      ++column;
    }
    if (!have_kind) rd.fail(1, "metadata line lacks detector=threshold|homodyne");
  }

  // header
  if (!std::getline(is, raw)) rd.fail(1, "missing header row");
  rd.line = 2;
  const std::vector<std::string> header = split(raw, ',');
  if (header.size() < 2) rd.fail(1, "header lists no detector settings");
  for (std::size_t c = 1; c < header.size(); ++c) {
    const int column = static_cast<int>(c) + 1;
    if (table.kind == TableKind::Threshold) {
      table.attenuations.push_back(rd.number(header[c], column));
    } else {
      const auto parts = split(header[c], ':');
      if (parts.size() != 2) rd.fail(column, "expected bin `lo:hi`, got `" + header[c] + "`");
      const double lo = rd.number(parts[0], column);
      const double hi = rd.number(parts[1], column);
      if (table.bin_edges.empty()) {
        table.bin_edges.push_back(lo);
      } else if (lo != table.bin_edges.back()) {
        rd.fail(column, "bin does not start where the previous one ends");
      }
      table.bin_edges.push_back(hi);
    }
  }
  const std::size_t settings = header.size() - 1;

  // body
  std::vector<std::vector<double>> rows;
  while (std::getline(is, raw)) {
    ++rd.line;
    if (raw.empty() || raw == "\r") continue;
    const std::vector<std::string> fields = split(raw, ',');
    if (fields.size() != settings + 1) {
      rd.fail(static_cast<int>(std::min(fields.size(), settings + 1)) + 1,
              "expected " + std::to_string(settings + 1) + " fields, got " + std::to_string(fields.size()));
    }
    table.intensities.push_back(rd.number(fields[0], 1));
    std::vector<double> row;
    for (std::size_t c = 1; c < fields.size(); ++c) row.push_back(rd.number(fields[c], static_cast<int>(c) + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) rd.fail(1, "table has no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(settings));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < settings; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  try {
    table.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return table;
}

MeasurementTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table " + path);
  return read_table(in, path);
}

}  // namespace photonbound::cli
