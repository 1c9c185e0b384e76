#ifndef ICEFILL_CSVIO_HPP
#define ICEFILL_CSVIO_HPP

#include <string>
#include <vector>

#include "icefill/types.hpp"

// CSV import/export. Numbers are rendered with the shortest representation
// that round-trips (std::to_chars), so identical data produces identical
// bytes on every platform -- the determinism contract depends on it.
namespace icefill {

/// Shortest round-trip decimal form of a double (to_chars).
[[nodiscard]] std::string format_double(double value);

/// Complex matrices serialize row-major, each cell as "re,im", so an M x N
/// complex matrix becomes M lines of 2N comma-separated numbers.
void write_complex_matrix_csv(const std::string& path, const MatC& matrix);
[[nodiscard]] MatC read_complex_matrix_csv(const std::string& path);

/// Real vector: one value per line.
void write_real_vector_csv(const std::string& path, const VecD& values);
[[nodiscard]] VecD read_real_vector_csv(const std::string& path);

/// Pilot allocation: header comment, then rows "k,n_k,ice_level_k", then a
/// final row "order,<t1>,<t2>,..." with the slot-by-slot eigen indices.
void write_allocation_csv(const std::string& path, const PilotAllocation& alloc);

/// A generic rectangular CSV with a leading schema comment line.
struct CsvTable {
  std::string schema_comment;            ///< written as "# <comment>"
  std::vector<std::string> header;       ///< column names
  std::vector<std::vector<std::string>> rows;
};

void write_table_csv(const std::string& path, const CsvTable& table);

}  // namespace icefill

#endif
