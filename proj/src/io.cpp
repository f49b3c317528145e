#include "gica/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gica {
namespace {

std::string format_double(double x) {
  std::ostringstream oss;
  oss.precision(17);
  oss << x;
  return oss.str();
}

}  // namespace

Matrix read_csv_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) +
                      ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(rows.front().size()) + " columns, got " +
                    std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no data rows");
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix data(p, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) data(j, i) = rows[i][j];
  return data;
}

void write_csv_observations(const std::string& path, const Matrix& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (Eigen::Index i = 0; i < data.cols(); ++i) {
    for (Eigen::Index j = 0; j < data.rows(); ++j) {
      if (j) out << ',';
      out << format_double(data(j, i));
    }
    out << '\n';
  }
}

void write_csv_table(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError(path + ": not a binary PGM (P5) file");
  auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError(path + ": truncated PGM header");
  };
  GrayImage img;
  img.width = std::stoi(next_token());
  img.height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 255)
    throw IoError(path + ": unsupported maxval " + std::to_string(maxval) +
                  " (only 8-bit PGM accepted)");
  in.get();  // single whitespace after maxval
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw IoError(path + ": truncated pixel data");
  return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0, step = 0.0, hi = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream iss(text);
  if (!(iss >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':' ||
      step <= 0.0 || hi < lo)
    throw IoError("bad grid '" + text + "', expected lo:step:hi");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double g = lo + k * step;
    if (g > hi + 1e-12) break;
    grid.push_back(g);
  }
  return grid;
}

}  // namespace gica
