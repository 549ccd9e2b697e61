#include "comal/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace comal {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int header_int(std::istream& in) {
  const std::string tok = header_token(in);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(Errc::Io, "malformed PGM header field '" + tok + "'");
  }
  return std::stoi(tok);
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  if (header_token(in) != "P5") throw Error(Errc::Io, "not a binary PGM (P5)");
  const int w = header_int(in);
  const int h = header_int(in);
  const int maxval = header_int(in);
  if (w < 1 || h < 1) throw Error(Errc::Io, "PGM has zero size");
  if (maxval != 255) throw Error(Errc::Io, "only maxval 255 PGM is supported");
  GrayImage img(h, w);
  in.read(reinterpret_cast<char*>(img.data()), static_cast<std::streamsize>(img.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.size())) {
    throw Error(Errc::Io, "truncated PGM pixel data");
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return read_pgm(in);
  } catch (const Error& e) {
    throw Error(Errc::Io, path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  write_pgm(out, img);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  return read_pgm(path) > 127;
}

void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  write_pgm(path, mask.select(GrayImage::Constant(mask.rows(), mask.cols(), 255),
                              GrayImage::Zero(mask.rows(), mask.cols())));
}

}  // namespace comal
