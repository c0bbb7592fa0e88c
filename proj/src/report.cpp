#include "qcurv/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace qcurv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

const std::string& csv_header() {
  static const std::string h =
      "bound_id,trial,n,m,c,convention,direction,lhs,lower,upper,gap_lower,gap_upper,status";
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ReportRow make_row(const BoundReport& r, std::uint64_t trial, const SubmanifoldPoint& p,
                   const std::string& direction) {
  ReportRow row;
  row.bound_id = std::string(to_string(r.id));
  row.trial = trial;
  row.n = p.n();
  row.m = p.ambient().m();
  row.c = p.ambient().c();
  row.convention = std::string(to_string(p.ambient().convention()));
  row.direction = direction;
  row.lhs = r.lhs;
  row.lower = r.lower;
  row.upper = r.upper;
  row.gap_lower = r.gap_lower;
  row.gap_upper = r.gap_upper;
  row.status = std::string(to_string(r.status));
  return row;
}

std::string format_row(const ReportRow& row) {
  std::string s;
  s.reserve(200);
  s += row.bound_id;
  s += ',' + std::to_string(row.trial);
  s += ',' + std::to_string(row.n);
  s += ',' + std::to_string(row.m);
  s += ',' + format_double(row.c);
  s += ',' + row.convention;
  s += ',' + row.direction;
  s += ',' + format_double(row.lhs);
  s += ',' + opt(row.lower);
  s += ',' + opt(row.upper);
  s += ',' + opt(row.gap_lower);
  s += ',' + opt(row.gap_upper);
  s += ',' + row.status;
  return s;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows, bool header) {
  if (header) out << csv_header() << '\n';
  for (const ReportRow& r : rows) out << format_row(r) << '\n';
}

std::vector<ReportRow> read_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == csv_header()) continue;
    const auto f = split(line);
    auto bad = [&](std::size_t col, const std::string& what) -> Error {
      return Error(Errc::parse_error,
                   "csv line " + std::to_string(lineno) + " column " + std::to_string(col + 1) + ": " + what);
    };
    if (f.size() != 13) throw bad(f.size(), "expected 13 columns");
    auto num = [&](std::size_t col) {
      const char* b = f[col].c_str();
      char* e = nullptr;
      const double v = std::strtod(b, &e);
      if (f[col].empty() || *e != '\0') throw bad(col, "bad number '" + f[col] + "'");
      return v;
    };
    auto onum = [&](std::size_t col) -> std::optional<double> {
      if (f[col].empty()) return std::nullopt;
      return num(col);
    };
    auto inum = [&](std::size_t col) {
      const double v = num(col);
      if (v != std::floor(v)) throw bad(col, "expected an integer");
      return v;
    };
    ReportRow r;
    r.bound_id = f[0];
    r.trial = static_cast<std::uint64_t>(inum(1));
    r.n = static_cast<int>(inum(2));
    r.m = static_cast<int>(inum(3));
    r.c = num(4);
    r.convention = f[5];
    r.direction = f[6];
    r.lhs = num(7);
    r.lower = onum(8);
    r.upper = onum(9);
    r.gap_lower = onum(10);
    r.gap_upper = onum(11);
    r.status = f[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_gap_histogram(std::ostream& out, const CampaignResult& res, double lo, double hi, int bins) {
  out << "bound_id,bin_lo,bin_hi,count\n";
  const double width = (hi - lo) / bins;
  for (const auto& [id, s] : res.summary) {
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (double g : s.rel_gaps) {
      if (!std::isfinite(g)) continue;
      int b = 0;
      if (g > 1e-12) {
        b = static_cast<int>(std::floor((std::log10(g) - lo) / width));
        b = std::clamp(b, 0, bins - 1);
      }
      ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
      const std::string left = b == 0 ? "-inf" : format_double(lo + b * width);
      out << to_string(id) << ',' << left << ',' << format_double(lo + (b + 1) * width) << ','
          << counts[static_cast<std::size_t>(b)] << '\n';
    }
  }
}

}  // namespace qcurv
