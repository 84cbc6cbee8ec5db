#pragma once

#include "error_density.hpp"
#include "errors.hpp"
#include "profile_likelihood.hpp"
#include "simulation.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace transmodel {

//! Round-trip formatting: 17 significant digits.
inline std::string
fmt_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::optional<double>
parse_double(std::string_view tok)
{
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
    tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
    tok.remove_suffix(1);
  if (tok.empty())
    return std::nullopt;
  if (tok.front() == '+')
    tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    return std::nullopt;
  return v;
}

//! Split on commas, or on runs of blanks when the line has no comma.
inline std::vector<std::string>
split_fields(const std::string& line)
{
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
      out.push_back(field);
    if (!line.empty() && line.back() == ',')
      out.emplace_back();
  } else {
    std::istringstream ss(line);
    std::string field;
    while (ss >> field)
      out.push_back(field);
  }
  return out;
}

struct XyData
{
  std::vector<double> xs;
  std::vector<double> ys;
};

//! Two numeric columns (x, y); an optional header on the first nonblank
//! line. Errors name the offending line.
inline XyData
read_xy(std::istream& in)
{
  XyData data;
  std::string line;
  std::size_t lineno = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto fields = split_fields(line);
    const bool first = !seen_first;
    seen_first = true;
    if (fields.size() != 2) {
      if (first && fields.size() > 0 && !parse_double(fields[0]))
        continue; // header with a different column count
      throw invalid_input("line " + std::to_string(lineno) + ": expected 2 columns, found " +
                          std::to_string(fields.size()));
    }
    const auto x = parse_double(fields[0]);
    const auto y = parse_double(fields[1]);
    if (!x || !y) {
      if (first && !x && !y)
        continue; // header
      throw invalid_input("line " + std::to_string(lineno) + ": non-numeric value '" +
                          (x ? fields[1] : fields[0]) + "'");
    }
    data.xs.push_back(*x);
    data.ys.push_back(*y);
  }
  if (data.xs.empty())
    throw invalid_input("input contains no data rows");
  return data;
}

inline XyData
read_xy_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw invalid_input("cannot open input file '" + path + "'");
  return read_xy(in);
}

//! Minimal CSV table: header plus rows of already formatted cells.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const
  {
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows)
      line(r);
  }
};

inline CsvTable
read_csv(std::istream& in)
{
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto fields = split_fields(line);
    if (first)
      t.header = std::move(fields);
    else
      t.rows.push_back(std::move(fields));
    first = false;
  }
  return t;
}

inline CsvTable
trace_table(const FitResult& fit)
{
  CsvTable t{ { "theta", "objective" }, {} };
  for (const auto& p : fit.objective_trace)
    t.rows.push_back({ fmt_double(p.theta), fmt_double(p.objective) });
  return t;
}

inline CsvTable
curve_table(const DensityCurve& c)
{
  CsvTable t{ { "t", "value" }, {} };
  for (std::size_t i = 0; i < c.ts.size(); ++i)
    t.rows.push_back({ fmt_double(c.ts[i]), fmt_double(c.values[i]) });
  return t;
}

inline CsvTable
residual_table(const Sample& s, const FitResult& fit)
{
  CsvTable t{ { "x", "y", "residual", "used" }, {} };
  for (std::size_t i = 0; i < s.size(); ++i)
    t.rows.push_back({ fmt_double(s.xs[i]),
                       fmt_double(s.ys[i]),
                       fmt_double(fit.residuals_at_theta_hat[i]),
                       fit.used_mask[i] ? "1" : "0" });
  return t;
}

inline std::vector<std::string>
table1_header()
{
  return { "model", "n", "theta_o", "mean", "std", "mse", "failures" };
}

inline std::vector<std::string>
table1_row(const McReport& r)
{
  return { std::to_string(r.model.model_id), std::to_string(r.n),     fmt_double(r.model.theta_o),
           fmt_double(r.theta_stats.mean),   fmt_double(r.theta_stats.std), fmt_double(r.theta_stats.mse),
           std::to_string(r.failures) };
}

inline std::vector<std::string>
table2_header()
{
  return { "model", "n", "theta_o", "t", "mse" };
}

inline std::vector<std::vector<std::string>>
table2_rows(const McReport& r)
{
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : r.density_mse)
    rows.push_back({ std::to_string(r.model.model_id),
                     std::to_string(r.n),
                     fmt_double(r.model.theta_o),
                     fmt_double(p.t),
                     fmt_double(p.mse) });
  return rows;
}

} // namespace transmodel
