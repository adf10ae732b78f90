#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughlab {

// 17 significant digits, "%.17g".
std::string format_double(double v);

void write_csv_row(std::ostream& os, const std::vector<double>& row);
void write_csv_header(std::ostream& os, const std::vector<std::string>& names);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& is);

}  // namespace roughlab
