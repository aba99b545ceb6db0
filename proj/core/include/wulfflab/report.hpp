#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wulfflab {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

void write_csv_header(std::ostream& out, const std::vector<std::string>& columns);
void write_csv_row(std::ostream& out, const std::vector<double>& values);

}  // namespace wulfflab
