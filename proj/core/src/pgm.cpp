#include "pdsplit/pgm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

// Next token in a PGM header, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, const std::string& name) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (tok.empty()) throw ConfigError(name + ": malformed PGM header");
  return tok;
}

long parse_header_int(std::istream& in, const std::string& name,
                      const char* what) {
  const std::string tok = next_token(in, name);
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(name + ": bad PGM " + what + " \"" + tok + "\"");
  }
}

}  // namespace

Image read_pgm(std::istream& in, const std::string& name) {
  std::string magic = next_token(in, name);
  if (magic != "P2" && magic != "P5")
    throw ConfigError(name + ": unsupported PGM magic \"" + magic + "\"");
  const long cols = parse_header_int(in, name, "width");
  const long rows = parse_header_int(in, name, "height");
  const long maxval = parse_header_int(in, name, "maxval");
  if (cols <= 0 || rows <= 0)
    throw ConfigError(name + ": degenerate PGM dimensions");
  if (maxval <= 0 || maxval > 65535)
    throw ConfigError(name + ": PGM maxval out of range");

  Image img;
  img.rows = static_cast<std::size_t>(rows);
  img.cols = static_cast<std::size_t>(cols);
  img.pixels.resize(img.rows * img.cols);
  const double scale = 1.0 / static_cast<double>(maxval);

  if (magic == "P2") {
    for (auto& px : img.pixels) {
      const long v = parse_header_int(in, name, "sample");
      if (v > maxval) throw ConfigError(name + ": sample exceeds maxval");
      px = v * scale;
    }
    return img;
  }

  // P5: exactly one whitespace byte separates maxval from the payload; the
  // token reader above has already consumed it.
  const bool wide = maxval > 255;
  const std::size_t bytes = img.pixels.size() * (wide ? 2 : 1);
  std::vector<unsigned char> buf(bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes)
    throw ConfigError(name + ": truncated PGM payload");
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    long v;
    if (wide)
      v = (static_cast<long>(buf[2 * i]) << 8) | buf[2 * i + 1];
    else
      v = buf[i];
    if (v > maxval) throw ConfigError(name + ": sample exceeds maxval");
    img.pixels[i] = v * scale;
  }
  return img;
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open for reading");
  return read_pgm(in, path);
}

void write_pgm(std::ostream& out, const Image& image, int maxval, bool binary) {
  if (maxval <= 0 || maxval > 65535)
    throw InvalidArgument("write_pgm: maxval out of range");
  if (image.pixels.size() != image.rows * image.cols)
    throw InvalidArgument("write_pgm: pixel count mismatch");
  out << (binary ? "P5" : "P2") << "\n"
      << image.cols << " " << image.rows << "\n"
      << maxval << "\n";
  const bool wide = maxval > 255;
  std::size_t col = 0;
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    double v = image.pixels[i];
    if (v < 0) v = 0;
    if (v > 1) v = 1;
    // nearbyint honours the default round-to-nearest-even mode.
    long q = static_cast<long>(std::nearbyint(v * maxval));
    if (q < 0) q = 0;
    if (q > maxval) q = maxval;
    if (binary) {
      if (wide) {
        out.put(static_cast<char>((q >> 8) & 0xff));
        out.put(static_cast<char>(q & 0xff));
      } else {
        out.put(static_cast<char>(q & 0xff));
      }
    } else {
      out << q;
      if (++col % 16 == 0 || i + 1 == image.pixels.size())
        out << "\n";
      else
        out << " ";
    }
  }
  if (!out) throw ConfigError("write_pgm: stream failure");
}

void write_pgm(const std::string& path, const Image& image, int maxval,
               bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  write_pgm(out, image, maxval, binary);
}

}  // namespace pdsplit
