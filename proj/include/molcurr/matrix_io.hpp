#pragma once

#include <filesystem>
#include <stdexcept>

#include "molcurr/losses.hpp"

namespace molcurr {

class MatrixFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text: first line "N d", then N rows of d values separated by spaces, tabs
// or commas. Binary (.bin): the same header line, then N*d little-endian
// float64 values in row-major order.
Embedding<double> read_matrix(const std::filesystem::path &path);
void write_matrix(const std::filesystem::path &path, const Embedding<double> &m);

}  // namespace molcurr
