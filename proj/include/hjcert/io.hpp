#pragma once

#include <string>
#include <vector>

#include "hjcert/curve.hpp"
#include "hjcert/grid.hpp"

namespace hjcert {

/// Shortest round-trip text form (%.17g).
std::string format_double(double x);

/// Writes `content` to `path`; throws ResourceError when the file cannot be written.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// Field CSV: header "x1,...,xd,value", one row per node in flat index order.
void write_field_csv(const std::string& path, const DomainGrid& grid, const std::vector<double>& values);
/// Validates the header, the row count and the node coordinates against
/// the grid (1e-9 relative). Throws ConfigError on mismatch.
std::vector<double> read_field_csv(const std::string& path, const DomainGrid& grid);

/// Space-time field CSV: header "x1,...,xd,value,t", layers in increasing t.
void write_time_field_csv(const std::string& path, const DomainGrid& grid, const std::vector<double>& times,
                          const std::vector<std::vector<double>>& layers);
struct TimeFieldData {
  std::vector<double> times;
  std::vector<std::vector<double>> layers;
};
TimeFieldData read_time_field_csv(const std::string& path, const DomainGrid& grid);

/// Curve CSV: header "t,x1,...,xd", one row per knot.
void write_curve_csv(const std::string& path, const Curve& curve);
Curve read_curve_csv(const std::string& path, const Geometry& geometry);

}  // namespace hjcert
