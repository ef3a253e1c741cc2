#ifndef LSBVAR_DATASET_HPP
#define LSBVAR_DATASET_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lsbvar/types.hpp"

namespace lsbvar {

// Long-format table: one row per (subject, visit) with columns
//   subject_id, t, y_1..y_k, x_1..x_p, z_1..z_q
// Blank response cells mark missing entries. Baseline columns repeat on
// every row of a subject and must be constant.
struct LongRecord {
  std::size_t line_no = 0;
  std::string subject_id;
  int t = 0;
  std::vector<std::optional<double>> y;
  std::vector<double> x;
  std::vector<std::optional<double>> z;
};

struct LongTable {
  int resp_dim = 0;
  int tv_cov_dim = 0;
  int base_cov_dim = 0;
  std::vector<LongRecord> records;
};

struct DropReport {
  std::string subject_id;
  std::string reason;
};

struct ValidatedDataset {
  LongitudinalDataset data;
  std::vector<DropReport> dropped;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& cell, std::size_t line_no,
                           const std::string& col) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(line_no) + ": cannot parse '" +
                    cell + "' in column " + col);
  }
}

inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

inline LongTable read_long_csv(std::istream& in) {
  LongTable table;
  std::string line;
  if (!std::getline(in, line))
    return table;  // empty input: zero subjects
  auto header = detail::split_csv_line(line);
  std::size_t col = 0;
  auto expect = [&](const std::string& name) {
    if (col >= header.size() || detail::trim(header[col]) != name)
      throw DataError("header: expected column '" + name + "' at position " +
                      std::to_string(col + 1));
    ++col;
  };
  expect("subject_id");
  expect("t");
  auto count_prefix = [&](const std::string& prefix) {
    int n = 0;
    while (col < header.size() &&
           detail::trim(header[col]) == prefix + std::to_string(n + 1)) {
      ++n;
      ++col;
    }
    return n;
  };
  table.resp_dim = count_prefix("y_");
  table.tv_cov_dim = count_prefix("x_");
  table.base_cov_dim = count_prefix("z_");
  if (table.resp_dim == 0)
    throw DataError("header: no response columns y_1..y_k found");
  if (col != header.size())
    throw DataError("header: unexpected column '" + header[col] + "'");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    LongRecord rec;
    rec.line_no = line_no;
    rec.subject_id = detail::trim(cells[0]);
    if (rec.subject_id.empty())
      throw DataError("row " + std::to_string(line_no) + ": empty subject_id");
    rec.t = static_cast<int>(
        detail::parse_double(detail::trim(cells[1]), line_no, "t"));
    std::size_t c = 2;
    for (int j = 0; j < table.resp_dim; ++j, ++c) {
      auto cell = detail::trim(cells[c]);
      if (cell.empty())
        rec.y.push_back(std::nullopt);
      else
        rec.y.push_back(
            detail::parse_double(cell, line_no, "y_" + std::to_string(j + 1)));
    }
    for (int j = 0; j < table.tv_cov_dim; ++j, ++c) {
      auto cell = detail::trim(cells[c]);
      if (cell.empty())
        throw DataError("row " + std::to_string(line_no) +
                        ": time-varying covariate x_" + std::to_string(j + 1) +
                        " is blank");
      double v = detail::parse_double(cell, line_no, "x_" + std::to_string(j + 1));
      if (!std::isfinite(v))
        throw DataError("row " + std::to_string(line_no) +
                        ": non-finite covariate x_" + std::to_string(j + 1));
      rec.x.push_back(v);
    }
    for (int j = 0; j < table.base_cov_dim; ++j, ++c) {
      auto cell = detail::trim(cells[c]);
      if (cell.empty()) {
        rec.z.push_back(std::nullopt);
      } else {
        double v =
            detail::parse_double(cell, line_no, "z_" + std::to_string(j + 1));
        if (!std::isfinite(v))
          throw DataError("row " + std::to_string(line_no) +
                          ": non-finite covariate z_" + std::to_string(j + 1));
        rec.z.push_back(v);
      }
    }
    table.records.push_back(std::move(rec));
  }
  return table;
}

inline LongTable read_long_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  return read_long_csv(in);
}

// Builds a validated dataset from long records. Subjects are dropped (with a
// reason) when their observed visits never include two consecutive time
// points or when a baseline covariate is missing; structural problems in the
// rows themselves are hard errors.
inline ValidatedDataset validate_dataset(const LongTable& table) {
  ValidatedDataset out;
  out.data.resp_dim = table.resp_dim;
  out.data.tv_cov_dim = table.tv_cov_dim;
  out.data.base_cov_dim = table.base_cov_dim;

  // group rows by subject, preserving first-appearance order
  std::vector<std::string> order;
  std::map<std::string, std::vector<const LongRecord*>> groups;
  for (const auto& rec : table.records) {
    auto [it, inserted] = groups.try_emplace(rec.subject_id);
    if (inserted) order.push_back(rec.subject_id);
    it->second.push_back(&rec);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& id : order) {
    auto& rows = groups[id];
    std::sort(rows.begin(), rows.end(),
              [](const LongRecord* a, const LongRecord* b) { return a->t < b->t; });
    const int horizon = rows.back()->t;
    if (static_cast<int>(rows.size()) != horizon || rows.front()->t != 1) {
      // find the offending row for the message
      int expected = 1;
      for (const auto* r : rows) {
        if (r->t != expected)
          throw DataError("row " + std::to_string(r->line_no) + ": subject " +
                          id + " has visit t=" + std::to_string(r->t) +
                          " where t=" + std::to_string(expected) +
                          " was expected (visits must be 1..T with no gaps)");
        ++expected;
      }
      throw DataError("subject " + id + ": inconsistent visit grid");
    }

    Subject s;
    s.id = id;
    s.responses.setConstant(horizon, table.resp_dim, nan);
    s.observed = BoolArray::Constant(horizon, table.resp_dim, false);
    s.tv_covariates.resize(horizon, table.tv_cov_dim);
    s.baseline.resize(table.base_cov_dim);

    bool baseline_missing = false;
    for (int t = 0; t < horizon; ++t) {
      const auto& r = *rows[t];
      for (int j = 0; j < table.resp_dim; ++j) {
        if (r.y[j].has_value()) {
          if (!std::isfinite(*r.y[j]))
            throw DataError("row " + std::to_string(r.line_no) +
                            ": non-finite response y_" + std::to_string(j + 1));
          s.responses(t, j) = *r.y[j];
          s.observed(t, j) = true;
        }
      }
      for (int j = 0; j < table.tv_cov_dim; ++j)
        s.tv_covariates(t, j) = r.x[j];
      for (int j = 0; j < table.base_cov_dim; ++j) {
        if (!r.z[j].has_value()) {
          baseline_missing = true;
          continue;
        }
        if (t == 0) {
          s.baseline[j] = *r.z[j];
        } else if (*r.z[j] != s.baseline[j]) {
          throw DataError("row " + std::to_string(r.line_no) +
                          ": baseline covariate z_" + std::to_string(j + 1) +
                          " differs from the subject's first row");
        }
      }
    }

    if (baseline_missing) {
      out.dropped.push_back({id, "missing baseline covariate"});
      continue;
    }

    // visit t counts as observed when at least one response entry is present
    std::vector<bool> visit_observed(horizon, false);
    int n_visits = 0;
    for (int t = 0; t < horizon; ++t) {
      visit_observed[t] = s.observed.row(t).any();
      if (visit_observed[t]) ++n_visits;
    }
    if (n_visits < 2) {
      out.dropped.push_back({id, "fewer than two visits"});
      continue;
    }
    bool consecutive = false;
    for (int t = 0; t + 1 < horizon; ++t)
      if (visit_observed[t] && visit_observed[t + 1]) consecutive = true;
    if (!consecutive) {
      out.dropped.push_back({id, "no two consecutive visits"});
      continue;
    }
    out.data.subjects.push_back(std::move(s));
  }
  return out;
}

inline ValidatedDataset load_dataset(const std::string& path) {
  auto table = read_long_csv_file(path);
  return validate_dataset(table);
}

inline void write_long_csv(const LongitudinalDataset& ds, std::ostream& os) {
  os << "subject_id,t";
  for (int j = 0; j < ds.resp_dim; ++j) os << ",y_" << (j + 1);
  for (int j = 0; j < ds.tv_cov_dim; ++j) os << ",x_" << (j + 1);
  for (int j = 0; j < ds.base_cov_dim; ++j) os << ",z_" << (j + 1);
  os << "\n";
  for (const auto& s : ds.subjects) {
    for (int t = 0; t < s.horizon(); ++t) {
      os << s.id << "," << (t + 1);
      for (int j = 0; j < ds.resp_dim; ++j) {
        os << ",";
        if (s.observed(t, j)) os << detail::format_double(s.responses(t, j));
      }
      for (int j = 0; j < ds.tv_cov_dim; ++j)
        os << "," << detail::format_double(s.tv_covariates(t, j));
      for (int j = 0; j < ds.base_cov_dim; ++j)
        os << "," << detail::format_double(s.baseline[j]);
      os << "\n";
    }
  }
}

inline void write_long_csv_file(const LongitudinalDataset& ds,
                                const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write data file: " + path);
  write_long_csv(ds, os);
}

// Per-column location/scale record; sufficient to invert the transform.
struct StandardizeTransform {
  std::vector<int> columns;  // 0-based baseline column indices
  std::vector<double> mean;
  std::vector<double> sd;  // population convention (divisor N)
};

// Centers and scales the designated baseline columns to sample mean 0 and
// population standard deviation 1. Columns left out (intercept, dummies)
// pass through unchanged.
inline std::pair<LongitudinalDataset, StandardizeTransform>
standardize_covariates(const LongitudinalDataset& ds,
                       const std::vector<int>& numeric_columns) {
  LongitudinalDataset out = ds;
  StandardizeTransform tr;
  const int n = ds.n_subjects();
  if (n == 0 && !numeric_columns.empty())
    throw DataError("standardize: empty dataset");
  for (int col : numeric_columns) {
    if (col < 0 || col >= ds.base_cov_dim)
      throw DataError("standardize: column index " + std::to_string(col) +
                      " out of range");
    double mean = 0.0;
    for (const auto& s : ds.subjects) mean += s.baseline[col];
    mean /= n;
    double var = 0.0;
    for (const auto& s : ds.subjects) {
      const double d = s.baseline[col] - mean;
      var += d * d;
    }
    var /= n;
    const double sd = std::sqrt(var);
    if (sd == 0.0)
      throw DataError("standardize: baseline column z_" +
                      std::to_string(col + 1) + " has zero variance");
    for (auto& s : out.subjects) s.baseline[col] = (s.baseline[col] - mean) / sd;
    tr.columns.push_back(col);
    tr.mean.push_back(mean);
    tr.sd.push_back(sd);
  }
  return {std::move(out), std::move(tr)};
}

}  // namespace lsbvar

#endif
