#include "bsv/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "bsv/error.hpp"
#include "bsv/measures.hpp"
#include "bsv/topology.hpp"

namespace bsv {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_type(const std::string& name) {
  static const std::unordered_map<std::string, PlyType> kTypes = {
      {"char", PlyType::Int8},     {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},
      {"uint8", PlyType::UInt8},   {"short", PlyType::Int16},     {"int16", PlyType::Int16},
      {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16},   {"int", PlyType::Int32},
      {"int32", PlyType::Int32},   {"uint", PlyType::UInt32},     {"uint32", PlyType::UInt32},
      {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64},
      {"float64", PlyType::Float64}};
  auto it = kTypes.find(name);
  if (it == kTypes.end()) throw IoError("PLY: unknown property type '" + name + "'");
  return it->second;
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("PLY: unexpected end of binary data");
  return value;
}

double read_binary(std::istream& in, PlyType t) {
  switch (t) {
    case PlyType::Int8:
      return read_raw<std::int8_t>(in);
    case PlyType::UInt8:
      return read_raw<std::uint8_t>(in);
    case PlyType::Int16:
      return read_raw<std::int16_t>(in);
    case PlyType::UInt16:
      return read_raw<std::uint16_t>(in);
    case PlyType::Int32:
      return read_raw<std::int32_t>(in);
    case PlyType::UInt32:
      return read_raw<std::uint32_t>(in);
    case PlyType::Float32:
      return read_raw<float>(in);
    case PlyType::Float64:
      return read_raw<double>(in);
  }
  return 0.0;
}

double read_ascii(std::istream& in) {
  double v = 0.0;
  if (!(in >> v)) throw IoError("PLY: malformed ascii value");
  return v;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
  // Scalar property values, one column per property (lists stay empty).
  std::vector<std::vector<double>> columns;
  // List values per row for the first list property.
  std::vector<std::vector<int>> lists;

  int column(const std::string& prop) const {
    for (std::size_t i = 0; i < properties.size(); ++i) {
      if (properties[i].name == prop && !properties[i].is_list) return static_cast<int>(i);
    }
    return -1;
  }
};

std::vector<PlyElement> read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw IoError(path.string() + " is not a PLY file");

  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt != "ascii") {
        throw IoError("PLY: unsupported format '" + fmt + "'");
      }
    } else if (keyword == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) throw IoError("PLY: property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type;
        std::string item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = parse_type(count_type);
        p.type = parse_type(item_type);
      } else {
        p.type = parse_type(type);
        ls >> p.name;
      }
      elements.back().properties.push_back(p);
    } else if (keyword == "end_header") {
      break;
    }
  }

  for (auto& e : elements) {
    e.columns.assign(e.properties.size(), {});
    bool has_list = false;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p].is_list) {
        has_list = true;
      } else {
        e.columns[p].reserve(e.count);
      }
    }
    if (has_list) e.lists.reserve(e.count);
    for (std::size_t row = 0; row < e.count; ++row) {
      bool first_list = true;
      for (std::size_t p = 0; p < e.properties.size(); ++p) {
        const auto& prop = e.properties[p];
        if (prop.is_list) {
          const double n = binary ? read_binary(in, prop.count_type) : read_ascii(in);
          std::vector<int> items(static_cast<std::size_t>(n));
          for (auto& item : items) {
            item = static_cast<int>(binary ? read_binary(in, prop.type) : read_ascii(in));
          }
          if (first_list) e.lists.push_back(std::move(items));
          first_list = false;
        } else {
          e.columns[p].push_back(binary ? read_binary(in, prop.type) : read_ascii(in));
        }
      }
    }
  }
  return elements;
}

const PlyElement* find_element(const std::vector<PlyElement>& elements, const std::string& name) {
  for (const auto& e : elements) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

struct VertexData {
  std::vector<Vec3> points;
  std::vector<SegmentLabel> labels;
  std::vector<Rgb> colors;
};

VertexData vertex_data(const std::vector<PlyElement>& elements, const std::filesystem::path& path) {
  const PlyElement* v = find_element(elements, "vertex");
  if (v == nullptr) throw IoError(path.string() + ": no vertex element");
  const int x = v->column("x");
  const int y = v->column("y");
  const int z = v->column("z");
  if (x < 0 || y < 0 || z < 0) throw IoError(path.string() + ": vertex lacks x/y/z");
  VertexData out;
  out.points.reserve(v->count);
  for (std::size_t i = 0; i < v->count; ++i) {
    out.points.emplace_back(v->columns[x][i], v->columns[y][i], v->columns[z][i]);
  }
  if (const int s = v->column("segment"); s >= 0) {
    out.labels.reserve(v->count);
    for (std::size_t i = 0; i < v->count; ++i) {
      const auto label = label_from_ordinal(static_cast<int>(v->columns[s][i]));
      if (!label) throw IoError(path.string() + ": segment value out of range");
      out.labels.push_back(*label);
    }
  }
  const int r = v->column("red");
  const int g = v->column("green");
  const int b = v->column("blue");
  if (r >= 0 && g >= 0 && b >= 0) {
    out.colors.reserve(v->count);
    for (std::size_t i = 0; i < v->count; ++i) {
      out.colors.push_back({static_cast<std::uint8_t>(v->columns[r][i]),
                            static_cast<std::uint8_t>(v->columns[g][i]),
                            static_cast<std::uint8_t>(v->columns[b][i])});
    }
  }
  return out;
}

std::vector<Face> fan(const std::vector<int>& polygon) {
  std::vector<Face> faces;
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    faces.push_back({polygon[0], polygon[k], polygon[k + 1]});
  }
  return faces;
}

TriangleMesh orient_outward(TriangleMesh mesh) {
  if (!mesh.empty() && boundary_edge_count(mesh) == 0 && is_orientation_consistent(mesh) &&
      signed_volume_unchecked(mesh) < 0.0) {
    return mesh.flipped();
  }
  return mesh;
}

class PlyWriter {
 public:
  PlyWriter(const std::filesystem::path& path, PlyFormat format)
      : out_(path, std::ios::binary), format_(format) {
    if (!out_) throw IoError("cannot write " + path.string());
    out_ << "ply\nformat "
         << (format == PlyFormat::Ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
    out_ << std::setprecision(17);
  }

  std::ofstream& header() { return out_; }

  void value(double v) {
    if (format_ == PlyFormat::Ascii) {
      sep();
      out_ << v;
    } else {
      out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  void value(std::uint8_t v) {
    if (format_ == PlyFormat::Ascii) {
      sep();
      out_ << static_cast<int>(v);
    } else {
      out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  void value(std::int32_t v) {
    if (format_ == PlyFormat::Ascii) {
      sep();
      out_ << v;
    } else {
      out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  void end_row() {
    if (format_ == PlyFormat::Ascii) out_ << '\n';
    first_ = true;
  }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) throw IoError("failed writing " + path.string());
  }

 private:
  void sep() {
    if (!first_) out_ << ' ';
    first_ = false;
  }

  std::ofstream out_;
  PlyFormat format_;
  bool first_ = true;
};

std::string lowercase_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

TriangleMesh read_ply_mesh(const std::filesystem::path& path) {
  const auto elements = read_ply(path);
  auto vd = vertex_data(elements, path);
  std::vector<Face> faces;
  if (const PlyElement* f = find_element(elements, "face"); f != nullptr) {
    for (const auto& poly : f->lists) {
      for (const auto& tri : fan(poly)) faces.push_back(tri);
    }
  }
  return orient_outward(TriangleMesh(std::move(vd.points), std::move(faces), std::move(vd.labels)));
}

void write_ply_mesh(const std::filesystem::path& path, const TriangleMesh& mesh, PlyFormat format) {
  PlyWriter w(path, format);
  auto& h = w.header();
  h << "element vertex " << mesh.vertex_count() << "\n"
    << "property double x\nproperty double y\nproperty double z\n";
  if (mesh.has_labels()) h << "property uchar segment\n";
  h << "element face " << mesh.face_count() << "\n"
    << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const auto& p = mesh.vertices()[i];
    w.value(p.x());
    w.value(p.y());
    w.value(p.z());
    if (mesh.has_labels()) w.value(ordinal(mesh.labels()[i]));
    w.end_row();
  }
  for (const auto& f : mesh.faces()) {
    w.value(static_cast<std::uint8_t>(3));
    for (int idx : f) w.value(static_cast<std::int32_t>(idx));
    w.end_row();
  }
  w.finish(path);
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw IoError(path.string() + ": malformed vertex");
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        int idx = std::stoi(token.substr(0, token.find('/')));
        idx = idx < 0 ? static_cast<int>(vertices.size()) + idx : idx - 1;
        poly.push_back(idx);
      }
      for (const auto& tri : fan(poly)) faces.push_back(tri);
    }
  }
  return orient_outward(TriangleMesh(std::move(vertices), std::move(faces)));
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices()) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  const auto ext = lowercase_extension(path);
  if (ext == ".ply") return read_ply_mesh(path);
  if (ext == ".obj") return read_obj(path);
  throw IoError("unsupported mesh extension '" + ext + "'");
}

void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh, PlyFormat format) {
  const auto ext = lowercase_extension(path);
  if (ext == ".ply") return write_ply_mesh(path, mesh, format);
  if (ext == ".obj") return write_obj(path, mesh);
  throw IoError("unsupported mesh extension '" + ext + "'");
}

LabeledPointCloud read_ply_cloud(const std::filesystem::path& path) {
  const auto elements = read_ply(path);
  auto vd = vertex_data(elements, path);
  LabeledPointCloud cloud;
  cloud.points = std::move(vd.points);
  cloud.labels = std::move(vd.labels);
  cloud.colors = std::move(vd.colors);
  return cloud;
}

void write_ply_cloud(const std::filesystem::path& path, const LabeledPointCloud& cloud,
                     PlyFormat format) {
  cloud.validate();
  PlyWriter w(path, format);
  auto& h = w.header();
  h << "element vertex " << cloud.size() << "\n"
    << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_colors()) h << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (cloud.has_labels()) h << "property uchar segment\n";
  h << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    w.value(p.x());
    w.value(p.y());
    w.value(p.z());
    if (cloud.has_colors()) {
      for (auto c : cloud.colors[i]) w.value(c);
    }
    if (cloud.has_labels()) w.value(ordinal(cloud.labels[i]));
    w.end_row();
  }
  w.finish(path);
}

RigidTransform read_transform(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (!(in >> m(r, c))) throw IoError(path.string() + ": expected 16 numbers");
    }
  }
  RigidTransform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  if (!t.is_valid(1e-6)) throw IoError(path.string() + ": rotation block is not a rotation");
  return t;
}

void write_transform(const std::filesystem::path& path, const RigidTransform& transform) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << transform.rotation(r, c) << ' ';
    out << transform.translation[r] << '\n';
  }
  out << "0 0 0 1\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace bsv
