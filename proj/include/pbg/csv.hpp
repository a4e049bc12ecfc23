#pragma once

#include <string>
#include <vector>

namespace pbg {

// CSV with one header row; all floats printed with 12 significant digits.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string format_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

std::string format_double(double v); // %.12g

} // namespace pbg
