#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pdsplit {

// Single-channel image with values in [0, 1].
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;  // row-major
};

// Reads PGM P2 (ASCII) or P5 (binary), maxval <= 65535; samples above 255
// are two-byte big-endian. Values scale linearly to [0, 1].
Image read_pgm(const std::string& path);
Image read_pgm(std::istream& in, const std::string& name);

// Writes P5 (binary) or P2 (ascii) with the given maxval; values quantise
// by round-half-to-even and clamp to [0, maxval].
void write_pgm(const std::string& path, const Image& image, int maxval = 255,
               bool binary = true);
void write_pgm(std::ostream& out, const Image& image, int maxval = 255,
               bool binary = true);

}  // namespace pdsplit
