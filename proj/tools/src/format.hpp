#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace maslov::cli {

/// Shortest representation that reads back to the same double.
std::string format_double(double value);

/// One CSV line, fields joined by commas.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace maslov::cli
