#ifndef GICA_IO_HPP
#define GICA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gica/types.hpp"

namespace gica {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Comma-separated values, one observation per row, no header.  Returned as a
// p x n matrix with observations in columns.  CRLF line endings accepted.
Matrix read_csv_observations(const std::string& path);
void write_csv_observations(const std::string& path, const Matrix& data);

// Generic row-major table writer with 17-significant-digit decimals.
void write_csv_table(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int row, int col) const { return pixels[row * width + col]; }
};

// Binary PGM (P5), 8-bit only; any other maxval is rejected.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& img);

// "lo:step:hi" inclusive grid, e.g. "0.05:0.05:1.0".
std::vector<double> parse_grid(const std::string& text);

}  // namespace gica

#endif  // GICA_IO_HPP
