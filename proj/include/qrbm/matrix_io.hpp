#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrbm/types.hpp"

namespace qrbm {

// Matrices are comma-separated text, one row per line, no header. Reals are
// written in shortest round-trip form, so 0/1 matrices come out as literal
// 0 and 1.

Matrix parse_matrix(std::string_view text, std::string_view source = "<memory>");
Matrix read_matrix(const std::filesystem::path& path);
BinaryMatrix read_binary_matrix(const std::filesystem::path& path);

std::string format_matrix(const Matrix& m);
void write_matrix(const Matrix& m, const std::filesystem::path& path);
void write_matrix(const BinaryMatrix& m, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

using Report = std::vector<std::pair<std::string, std::string>>;

/// Flat `key=value` lines in insertion order.
void write_report(const Report& report, const std::filesystem::path& path);
Report read_report(const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);

} // namespace qrbm
