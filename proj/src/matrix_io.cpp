#include "molcurr/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace molcurr {

namespace {

bool is_binary(const std::filesystem::path &p) { return p.extension() == ".bin"; }

std::pair<Eigen::Index, Eigen::Index> read_header(std::istream &in, const std::string &name) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixFormatError(name + ": missing 'N d' header");
  std::istringstream hs(line);
  long long n = 0, d = 0;
  std::string extra;
  if (!(hs >> n >> d) || (hs >> extra) || n < 1 || d < 1)
    throw MatrixFormatError(name + ": header must be two positive integers 'N d'");
  return {static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)};
}

}  // namespace

Embedding<double> read_matrix(const std::filesystem::path &path) {
  static_assert(std::endian::native == std::endian::little, "binary matrices assume little endian");
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixFormatError("cannot open " + name);
  const auto [n, d] = read_header(in, name);
  Embedding<double> m(n, d);
  if (is_binary(path)) {
    in.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(sizeof(double) * n * d));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * n * d))
      throw MatrixFormatError(name + ": truncated binary payload");
    return m;
  }
  std::string line;
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    std::replace_if(line.begin(), line.end(), [](char c) { return c == ',' || c == '\t' || c == '\r'; }, ' ');
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    if (row >= n) throw MatrixFormatError(fmt::format("{}: more than {} rows", name, n));
    const char *p = line.data(), *end = line.data() + line.size();
    Eigen::Index col = 0;
    while (true) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || col >= d)
        throw MatrixFormatError(fmt::format("{}: bad value in row {}", name, row + 1));
      m(row, col++) = v;
      p = next;
    }
    if (col != d)
      throw MatrixFormatError(fmt::format("{}: row {} has {} values, expected {}", name, row + 1, col, d));
    ++row;
  }
  if (row != n) throw MatrixFormatError(fmt::format("{}: {} rows, expected {}", name, row, n));
  return m;
}

void write_matrix(const std::filesystem::path &path, const Embedding<double> &m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MatrixFormatError("cannot write " + path.string());
  out << m.rows() << ' ' << m.cols() << '\n';
  if (is_binary(path)) {
    out.write(reinterpret_cast<const char *>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
    return;
  }
  std::string buf;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    buf.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      fmt::format_to(std::back_inserter(buf), "{}{}", j ? " " : "", m(i, j));
    out << buf << '\n';
  }
}

}  // namespace molcurr
