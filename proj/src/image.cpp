#include "bsv/image.hpp"

#include <fstream>
#include <iomanip>
#include <string>

#include "bsv/error.hpp"

namespace bsv {

namespace {

std::ifstream open_with_magic(const std::filesystem::path& path, const std::string& magic,
                              int& width, int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != magic || version != 1) throw IoError(path.string() + ": expected " + magic + " 1 header");
  if (!(in >> width >> height) || width <= 0 || height <= 0) {
    throw IoError(path.string() + ": bad image dimensions");
  }
  return in;
}

}  // namespace

void write_depth_image(const std::filesystem::path& path, const DepthImage& depth, double fx,
                       double fy, double cx, double cy) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "BSVDEPTH 1\n" << depth.width << ' ' << depth.height << '\n'
      << std::setprecision(17) << fx << ' ' << fy << ' ' << cx << ' ' << cy << '\n';
  for (double d : depth.pixels) {
    const auto f = static_cast<float>(d);
    out.write(reinterpret_cast<const char*>(&f), sizeof f);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

DepthImage read_depth_image(const std::filesystem::path& path, std::array<double, 4>* intrinsics) {
  int w = 0;
  int h = 0;
  auto in = open_with_magic(path, "BSVDEPTH", w, h);
  double intr[4];
  for (double& x : intr) {
    if (!(in >> x)) throw IoError(path.string() + ": bad intrinsics line");
  }
  in.get();  // newline ending the header
  if (intrinsics) std::copy(std::begin(intr), std::end(intr), intrinsics->begin());
  DepthImage depth(w, h);
  for (double& d : depth.pixels) {
    float f = 0.0F;
    in.read(reinterpret_cast<char*>(&f), sizeof f);
    if (!in) throw IoError(path.string() + ": truncated depth data");
    d = f;
  }
  return depth;
}

void write_byte_image(const std::filesystem::path& path, const ByteImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "BSVMASK 1\n" << image.width << ' ' << image.height << '\n';
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

ByteImage read_byte_image(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  auto in = open_with_magic(path, "BSVMASK", w, h);
  in.get();
  ByteImage image(w, h);
  in.read(reinterpret_cast<char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!in) throw IoError(path.string() + ": truncated mask data");
  return image;
}

}  // namespace bsv
