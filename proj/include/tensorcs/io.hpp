// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/tensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace tensorcs::io {

// DTF1 layout (all little-endian):
//   bytes 0..3   magic "DTF1"
//   u32          mode count d
//   d x u32      extents N_1..N_d
//   prod(N) x f64 values, first mode varying fastest
void write_dtf(std::ostream& out, const DenseTensor& x);
[[nodiscard]] DenseTensor read_dtf(std::istream& in);
void write_dtf(const std::filesystem::path& path, const DenseTensor& x);
[[nodiscard]] DenseTensor read_dtf(const std::filesystem::path& path);

/// One row per line, comma separated, shortest round-trip formatting.
void write_csv(std::ostream& out, const Matrix& m);
[[nodiscard]] Matrix read_csv(std::istream& in);
void write_csv(const std::filesystem::path& path, const Matrix& m);
[[nodiscard]] Matrix read_csv(const std::filesystem::path& path);

/// Binary 8-bit greyscale PGM (P5, maxval <= 255). Pixel (row, col) maps to
/// tensor entry (row, col), i.e. rows are mode 0.
[[nodiscard]] DenseTensor read_pgm(const std::filesystem::path& path);
/// Values are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const DenseTensor& image);

/// Reads every *.pgm in a directory (sorted by name) as the frames of a
/// rows x cols x frames tensor.
[[nodiscard]] DenseTensor read_pgm_frames(const std::filesystem::path& dir);

/// Dispatches on extension: .pgm -> image, directory -> frames, else DTF1.
[[nodiscard]] DenseTensor read_signal(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

}  // namespace tensorcs::io
