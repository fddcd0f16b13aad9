#include "ctrect/raster.h"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "ctrect/errors.h"

namespace ctrect {

namespace {

// Next header token, skipping whitespace and '#' comments.
int header_int(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
    } else {
      break;
    }
  }
  int v = -1;
  if (!(in >> v)) throw Error(ErrorCode::kIo, "malformed PPM header");
  return v;
}

}  // namespace

Image read_ppm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '6') throw Error(ErrorCode::kIo, "not a binary PPM (P6)");
  const int w = header_int(in);
  const int h = header_int(in);
  const int maxval = header_int(in);
  if (w <= 0 || h <= 0 || w > 1 << 15 || h > 1 << 15) throw Error(ErrorCode::kIo, "bad PPM size");
  if (maxval != 255) throw Error(ErrorCode::kIo, "only 8-bit PPM is supported");
  in.get();  // single whitespace before the raster
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) {
    throw Error(ErrorCode::kIo, "truncated PPM raster");
  }
  return img;
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_ppm(in);
}

void write_ppm(std::ostream& out, const Image& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

void write_ppm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_ppm(out, img);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace ctrect
