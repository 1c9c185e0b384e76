#include "icefill/csvio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace icefill {

namespace {

[[nodiscard]] double parse_double(const std::string& token, const std::string& path) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInputError("malformed number '" + token + "' in " + path);
  }
  return value;
}

[[nodiscard]] std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

[[nodiscard]] std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInputError("cannot open for writing: " + path);
  }
  return out;
}

[[nodiscard]] std::vector<std::string> read_data_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInputError("cannot open for reading: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw NumericError("format_double: conversion failed");
  }
  return std::string(buffer, ptr);
}

void write_complex_matrix_csv(const std::string& path, const MatC& matrix) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << format_double(matrix(i, j).real()) << ',' << format_double(matrix(i, j).imag());
    }
    out << '\n';
  }
  if (!out) {
    throw InvalidInputError("write failed: " + path);
  }
}

MatC read_complex_matrix_csv(const std::string& path) {
  const std::vector<std::string> lines = read_data_lines(path);
  if (lines.empty()) {
    throw InvalidInputError("empty matrix file: " + path);
  }
  std::vector<std::vector<std::string>> cells;
  cells.reserve(lines.size());
  std::size_t width = 0;
  for (const std::string& line : lines) {
    cells.push_back(split_fields(line));
    if (cells.size() == 1) {
      width = cells.front().size();
    } else if (cells.back().size() != width) {
      throw InvalidInputError("ragged rows in " + path);
    }
  }
  if (width == 0 || width % 2 != 0) {
    throw InvalidInputError("complex matrix needs an even field count per row: " + path);
  }
  MatC matrix(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(width / 2));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j + 1 < cells[i].size(); j += 2) {
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j / 2)) =
          cxd(parse_double(cells[i][j], path), parse_double(cells[i][j + 1], path));
    }
  }
  return matrix;
}

void write_real_vector_csv(const std::string& path, const VecD& values) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << format_double(values[i]) << '\n';
  }
  if (!out) {
    throw InvalidInputError("write failed: " + path);
  }
}

VecD read_real_vector_csv(const std::string& path) {
  const std::vector<std::string> lines = read_data_lines(path);
  VecD values(static_cast<Eigen::Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = parse_double(lines[i], path);
  }
  return values;
}

void write_allocation_csv(const std::string& path, const PilotAllocation& alloc) {
  std::ofstream out = open_out(path);
  out << "# pilot allocation v1: k,count,ice_level then an order row\n";
  for (std::size_t k = 0; k < alloc.counts.size(); ++k) {
    out << k << ',' << alloc.counts[k] << ','
        << format_double(alloc.ice_levels[static_cast<Eigen::Index>(k)]) << '\n';
  }
  out << "order";
  for (const int pick : alloc.selection_order) {
    out << ',' << pick;
  }
  out << '\n';
  if (!out) {
    throw InvalidInputError("write failed: " + path);
  }
}

void write_table_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out = open_out(path);
  if (!table.schema_comment.empty()) {
    out << "# " << table.schema_comment << '\n';
  }
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j > 0) {
      out << ',';
    }
    out << table.header[j];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << row[j];
    }
    out << '\n';
  }
  if (!out) {
    throw InvalidInputError("write failed: " + path);
  }
}

}  // namespace icefill
