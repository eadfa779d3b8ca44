#include "hjcert/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hjcert/errors.hpp"

namespace hjcert {

namespace {

// Column names x1..xd, optionally preceded and followed by extra names.
std::string header(const char* lead, std::size_t d, const char* tail) {
  std::string out = lead;
  for (std::size_t a = 0; a < d; ++a) {
    if (!out.empty()) out += ',';
    out += "x" + std::to_string(a + 1);
  }
  if (tail) out += std::string(",") + tail;
  return out;
}

struct Table {
  std::string header;
  std::vector<std::vector<double>> rows;
};

Table parse_csv(const std::string& path, std::size_t columns) {
  std::istringstream in(read_text(path));
  Table t;
  if (!std::getline(in, t.header)) throw ConfigError(path + ": empty file");
  if (!t.header.empty() && t.header.back() == '\r') t.header.pop_back();
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != columns) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) + " columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

void check_point(const std::string& path, const DomainGrid& grid, std::size_t node, const std::vector<double>& row,
                 std::size_t first) {
  const Point x = grid.point(node);
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!close(row[first + a], x[a])) {
      throw ConfigError(path + ": row " + std::to_string(node) + " does not match the grid node coordinates");
    }
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ResourceError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_field_csv(const std::string& path, const DomainGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw PreconditionError("field size does not match the grid");
  std::string out = header("", grid.dimension(), "value") + "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double c : grid.point(i)) out += format_double(c) + ",";
    out += format_double(values[i]) + "\n";
  }
  write_text(path, out);
}

std::vector<double> read_field_csv(const std::string& path, const DomainGrid& grid) {
  const std::size_t d = grid.dimension();
  const Table t = parse_csv(path, d + 1);
  if (t.header != header("", d, "value")) throw ConfigError(path + ": unexpected header '" + t.header + "'");
  if (t.rows.size() != grid.size()) {
    throw ConfigError(path + ": " + std::to_string(t.rows.size()) + " rows for a grid of " +
                      std::to_string(grid.size()) + " nodes");
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_point(path, grid, i, t.rows[i], 0);
    values[i] = t.rows[i][d];
  }
  return values;
}

void write_time_field_csv(const std::string& path, const DomainGrid& grid, const std::vector<double>& times,
                          const std::vector<std::vector<double>>& layers) {
  if (times.size() != layers.size()) throw PreconditionError("one time per layer expected");
  std::string out = header("", grid.dimension(), "value,t") + "\n";
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].size() != grid.size()) throw PreconditionError("layer size does not match the grid");
    const std::string t = "," + format_double(times[k]) + "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (double c : grid.point(i)) out += format_double(c) + ",";
      out += format_double(layers[k][i]) + t;
    }
  }
  write_text(path, out);
}

TimeFieldData read_time_field_csv(const std::string& path, const DomainGrid& grid) {
  const std::size_t d = grid.dimension();
  const Table t = parse_csv(path, d + 2);
  if (t.header != header("", d, "value,t")) throw ConfigError(path + ": unexpected header '" + t.header + "'");
  if (t.rows.empty() || t.rows.size() % grid.size() != 0) {
    throw ConfigError(path + ": row count is not a multiple of the grid size");
  }
  TimeFieldData data;
  const std::size_t layers = t.rows.size() / grid.size();
  for (std::size_t k = 0; k < layers; ++k) {
    const double tk = t.rows[k * grid.size()][d + 1];
    if (k > 0 && !(tk > data.times.back())) throw ConfigError(path + ": layer times must increase");
    data.times.push_back(tk);
    std::vector<double> layer(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& row = t.rows[k * grid.size() + i];
      if (row[d + 1] != tk) throw ConfigError(path + ": mixed times inside one layer");
      check_point(path, grid, i, row, 0);
      layer[i] = row[d];
    }
    data.layers.push_back(std::move(layer));
  }
  return data;
}

void write_curve_csv(const std::string& path, const Curve& curve) {
  std::string out = header("t", curve.dimension(), nullptr) + "\n";
  for (std::size_t k = 0; k < curve.times().size(); ++k) {
    out += format_double(curve.times()[k]);
    for (double c : curve.points()[k]) out += "," + format_double(c);
    out += "\n";
  }
  write_text(path, out);
}

Curve read_curve_csv(const std::string& path, const Geometry& geometry) {
  const std::size_t d = geometry.dimension();
  const Table t = parse_csv(path, d + 1);
  if (t.header != header("t", d, nullptr)) throw ConfigError(path + ": unexpected header '" + t.header + "'");
  std::vector<double> times;
  std::vector<Point> points;
  for (const auto& row : t.rows) {
    times.push_back(row[0]);
    points.emplace_back(row.begin() + 1, row.end());
  }
  return Curve(geometry, std::move(times), std::move(points));
}

}  // namespace hjcert
