#pragma once

#include <filesystem>
#include <iosfwd>

#include "comal/image.hpp"

namespace comal {

/// Reads a binary (P5) PGM with maxval 255. Throws Errc::Io on failure.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage read_pgm(std::istream& in);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);
void write_pgm(std::ostream& out, const GrayImage& img);

/// Foreground masks are stored as PGM with 0 = background, 255 = foreground.
BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace comal
