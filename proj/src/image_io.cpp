#include "vegtrack/image_io.hpp"

#include <fstream>
#include <string>

namespace vegtrack {
namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
      tok.push_back(static_cast<char>(in.get()));
    return tok;
  }
  throw ImageIoError("pnm: unexpected end of header");
}

int next_int(std::istream& in) {
  std::string tok = next_token(in);
  try {
    return std::stoi(tok);
  } catch (...) {
    throw ImageIoError("pnm: bad header token '" + tok + "'");
  }
}

struct PnmHeader {
  std::string magic;
  int width = 0, height = 0, maxval = 0;
};

PnmHeader read_header(std::istream& in, const std::filesystem::path& path) {
  PnmHeader h;
  h.magic = next_token(in);
  h.width = next_int(in);
  h.height = next_int(in);
  h.maxval = next_int(in);
  if (h.width < 1 || h.height < 1)
    throw ImageIoError("pnm: bad dimensions in " + path.string());
  if (h.maxval < 1 || h.maxval > 255)
    throw ImageIoError("pnm: only 8-bit images supported: " + path.string());
  return h;
}

}  // namespace

MaskRaster read_mask_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  auto h = read_header(in, path);
  MaskRaster mask(h.height, h.width);
  if (h.magic == "P5") {
    in.get();  // single whitespace after maxval
    std::vector<std::uint8_t> row(static_cast<std::size_t>(h.width));
    for (int y = 0; y < h.height; ++y) {
      in.read(reinterpret_cast<char*>(row.data()), h.width);
      if (!in) throw ImageIoError("pgm: truncated pixel data in " + path.string());
      for (int x = 0; x < h.width; ++x)
        if (row[static_cast<std::size_t>(x)]) mask.set(y, x, true);
    }
  } else if (h.magic == "P2") {
    for (int y = 0; y < h.height; ++y)
      for (int x = 0; x < h.width; ++x)
        if (next_int(in)) mask.set(y, x, true);
  } else {
    throw ImageIoError("expected P5/P2 PGM: " + path.string());
  }
  return mask;
}

void write_mask_pgm(const std::filesystem::path& path, const MaskRaster& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot open for writing " + path.string());
  out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(mask.width()));
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x)
      row[static_cast<std::size_t>(x)] = mask.at(y, x) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), mask.width());
  }
}

ImageRgb read_image_p6_or_p5(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  auto h = read_header(in, path);
  in.get();
  ImageRgb img(h.height, h.width);
  const bool color = h.magic == "P6";
  if (!color && h.magic != "P5")
    throw ImageIoError("expected P6/P5 image: " + path.string());
  const int ch = color ? 3 : 1;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(h.width) * ch);
  for (int y = 0; y < h.height; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (!in) throw ImageIoError("pnm: truncated pixel data in " + path.string());
    for (int x = 0; x < h.width; ++x) {
      if (color) {
        img.at(y, x) = {row[static_cast<std::size_t>(x) * 3],
                        row[static_cast<std::size_t>(x) * 3 + 1],
                        row[static_cast<std::size_t>(x) * 3 + 2]};
      } else {
        std::uint8_t g = row[static_cast<std::size_t>(x)];
        img.at(y, x) = {g, g, g};
      }
    }
  }
  return img;
}

void write_image_ppm(const std::filesystem::path& path, const ImageRgb& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot open for writing " + path.string());
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  for (const auto& px : img.pixels)
    out.write(reinterpret_cast<const char*>(px.data()), 3);
}

}  // namespace vegtrack
