#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "pansde/common.hpp"

namespace pansde::cli {

/// Doubles serialized with 17 significant digits round-trip exactly.
std::string format_g17(double value);

/// CSV file with a leading '#'-prefixed metadata block, then a header row,
/// then data rows. Output is byte-deterministic for identical inputs.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& file);

    void comment(const std::string& line);
    void header(std::span<const std::string> columns);
    void row(std::span<const double> values);
    void row(std::span<const std::string> cells);

private:
    std::ofstream out_;
};

}  // namespace pansde::cli
