#include "csf/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace csf {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double(const std::string& cell, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str()) {
    throw InvalidInput("csv: unparseable number '" + cell + "' in " + path);
  }
  return v;
}

std::vector<std::string> coordinate_names(Eigen::Index n) {
  if (n == 2) return {"x", "y"};
  if (n == 3) return {"x", "y", "z"};
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < n; ++k) names.push_back("x" + std::to_string(k + 1));
  return names;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_curve_csv(const std::string& path, const CurveSample& curve) {
  curve.validate();
  std::ofstream out = open_out(path);
  const auto names = coordinate_names(curve.dimension());
  out << "t";
  for (const auto& n : names) out << "," << n;
  for (const auto& n : names) out << ",d" << n;
  for (const auto& n : names) out << ",dd" << n;
  out << "\n";
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    out << format_full(curve.params(i));
    for (Eigen::Index k = 0; k < curve.dimension(); ++k) {
      out << "," << format_full(curve.positions(k, i));
    }
    for (Eigen::Index k = 0; k < curve.dimension(); ++k) {
      out << "," << format_full(curve.d1(k, i));
    }
    for (Eigen::Index k = 0; k < curve.dimension(); ++k) {
      out << "," << format_full(curve.d2(k, i));
    }
    out << "\n";
  }
}

CurveSample read_curve_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("csv: empty file " + path);
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() < 7 || header[0] != "t" || (header.size() - 1) % 3 != 0) {
    throw InvalidInput("csv: '" + path + "' does not match the curve schema");
  }
  const Eigen::Index n = static_cast<Eigen::Index>((header.size() - 1) / 3);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InvalidInput("csv: ragged row in " + path);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    rows.push_back(std::move(row));
  }

  CurveSample curve;
  const Eigen::Index N = static_cast<Eigen::Index>(rows.size());
  curve.params.resize(N);
  curve.positions.resize(n, N);
  curve.d1.resize(n, N);
  curve.d2.resize(n, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    curve.params(i) = rows[i][0];
    for (Eigen::Index k = 0; k < n; ++k) {
      curve.positions(k, i) = rows[i][1 + k];
      curve.d1(k, i) = rows[i][1 + n + k];
      curve.d2(k, i) = rows[i][1 + 2 * n + k];
    }
  }
  curve.validate();
  return curve;
}

void write_closure_csv(const std::string& path, const std::vector<ClosureReport>& reports) {
  std::ofstream out = open_out(path);
  out << "alpha0,period,delta_theta,rotation_ratio,closure_gap,closed\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? format_full(*v) : std::string("nan");
  };
  for (const auto& r : reports) {
    out << format_full(r.alpha0) << "," << cell(r.period) << "," << cell(r.delta_theta) << ","
        << cell(r.rotation_ratio) << "," << cell(r.closure_gap) << "," << (r.closed ? 1 : 0)
        << "\n";
  }
}

void write_poly_csv(const std::string& path, const PolyCurve& curve) {
  curve.validate();
  std::ofstream out = open_out(path);
  const auto names = coordinate_names(curve.dimension());
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << "\n";
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    for (Eigen::Index k = 0; k < curve.dimension(); ++k) {
      out << (k ? "," : "") << format_full(curve.vertices(k, i));
    }
    out << "\n";
  }
}

PolyCurve read_poly_csv(const std::string& path, bool closed) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("csv: empty file " + path);
  const auto header = split_csv_line(strip_cr(line));
  if (header.empty() || header[0] != "x") {
    throw InvalidInput("csv: '" + path + "' does not match the snapshot schema");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(header.size());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw InvalidInput("csv: ragged row in " + path);
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    rows.push_back(std::move(row));
  }

  PolyCurve poly;
  poly.closed = closed;
  poly.vertices.resize(n, static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < poly.size(); ++i) {
    for (Eigen::Index k = 0; k < n; ++k) poly.vertices(k, i) = rows[i][k];
  }
  poly.validate();
  return poly;
}

bool is_curve_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) return false;
  const auto header = split_csv_line(strip_cr(line));
  return !header.empty() && header[0] == "t";
}

}  // namespace csf
