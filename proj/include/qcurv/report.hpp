#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qcurv/search.hpp"

namespace qcurv {

/// bound_id,trial,n,m,c,convention,direction,lhs,lower,upper,gap_lower,gap_upper,status
const std::string& csv_header();

/// 17 significant digits ("%.17g"); reparsing with strtod gives the same double.
std::string format_double(double v);

ReportRow make_row(const BoundReport& r, std::uint64_t trial, const SubmanifoldPoint& p,
                   const std::string& direction);

/// One CSV line without the trailing newline. Absent optional fields are empty.
std::string format_row(const ReportRow& row);
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows, bool header = true);

/// Inverse of write_csv; throws Errc::parse_error naming the line and column.
std::vector<ReportRow> read_csv(std::istream& in);

/// Histogram of log10(relative gap) per bound, for external plotting.
/// Columns: bound_id,bin_lo,bin_hi,count. Gaps at or below 1e-12 (equality)
/// fall in the first bin, whose lower edge is -inf.
void write_gap_histogram(std::ostream& out, const CampaignResult& res, double lo = -12.0,
                         double hi = 4.0, int bins = 32);

}  // namespace qcurv
