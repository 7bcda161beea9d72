#include "bsv/topology.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <map>
#include <unordered_set>

namespace bsv {

namespace {

std::uint64_t directed_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool segments_cross(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  const double d1 = orient2d(q1, q2, p1);
  const double d2 = orient2d(q1, q2, p2);
  const double d3 = orient2d(p1, p2, q1);
  const double d4 = orient2d(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Projects the loop onto its best-fit plane and tests non-adjacent segments.
bool loop_self_intersects(const TriangleMesh& mesh, const std::vector<int>& loop) {
  const std::size_t n = loop.size();
  if (n < 4) return false;
  Vec3 mean = Vec3::Zero();
  for (int v : loop) mean += mesh.vertex(v);
  mean /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (int v : loop) {
    const Vec3 d = mesh.vertex(v) - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 u = eig.eigenvectors().col(2);
  const Vec3 w = eig.eigenvectors().col(1);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(n);
  for (int v : loop) {
    const Vec3 d = mesh.vertex(v) - mean;
    pts.emplace_back(d.dot(u), d.dot(w));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
    }
  }
  return false;
}

SegmentLabel dominant_label(const TriangleMesh& mesh, const std::vector<int>& loop) {
  std::array<int, kSegmentLabelCount> counts{};
  for (int v : loop) ++counts[ordinal(mesh.labels()[static_cast<std::size_t>(v)])];
  int best = 0;
  for (int i = 1; i < kSegmentLabelCount; ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return static_cast<SegmentLabel>(best);
}

}  // namespace

std::vector<Edge> boundary_half_edges(const TriangleMesh& mesh) {
  std::unordered_set<std::uint64_t> directed;
  directed.reserve(mesh.face_count() * 3);
  for (const auto& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) directed.insert(directed_key(f[k], f[(k + 1) % 3]));
  }
  std::vector<Edge> out;
  for (const auto& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      if (!directed.contains(directed_key(b, a))) out.emplace_back(a, b);
    }
  }
  return out;
}

std::size_t boundary_edge_count(const TriangleMesh& mesh) {
  return boundary_half_edges(mesh).size();
}

bool is_watertight(const TriangleMesh& mesh) {
  return !mesh.empty() && is_orientation_consistent(mesh) && boundary_edge_count(mesh) == 0;
}

std::vector<std::vector<int>> boundary_loops(const TriangleMesh& mesh) {
  auto half_edges = boundary_half_edges(mesh);
  std::sort(half_edges.begin(), half_edges.end());
  // Outgoing boundary half-edges per start vertex, lowest target first.
  std::map<int, std::vector<int>> outgoing;
  for (const auto& [a, b] : half_edges) outgoing[a].push_back(b);
  std::map<int, std::size_t> cursor;

  // Walk half-edges; whenever the walk revisits a vertex the closed part is
  // split off, so every loop returned is a simple cycle even at pinch vertices.
  std::vector<std::vector<int>> loops;
  for (const auto& [start, _] : half_edges) {
    if (cursor[start] >= outgoing[start].size()) continue;
    std::vector<int> path;
    std::map<int, std::size_t> position;
    int current = start;
    while (true) {
      auto& slot = cursor[current];
      const auto& outs = outgoing[current];
      if (slot >= outs.size()) break;  // open chain; only possible for inconsistent input
      position[current] = path.size();
      path.push_back(current);
      current = outs[slot++];
      auto it = position.find(current);
      if (it == position.end()) continue;
      const std::size_t k = it->second;
      std::vector<int> cycle(path.begin() + static_cast<std::ptrdiff_t>(k), path.end());
      for (int v : cycle) position.erase(v);
      path.resize(k);
      if (cycle.size() >= 3) loops.push_back(std::move(cycle));
      if (path.empty()) break;
    }
  }
  return loops;
}

TriangleMesh fill_holes(const TriangleMesh& mesh, std::vector<std::string>* warnings) {
  const auto loops = boundary_loops(mesh);
  if (loops.empty()) return mesh;

  std::unordered_set<int> pinch;
  {
    std::map<int, int> out_degree;
    for (const auto& [a, b] : boundary_half_edges(mesh)) {
      if (++out_degree[a] > 1) pinch.insert(a);
    }
  }

  std::vector<Vec3> vertices = mesh.vertices();
  std::vector<Face> faces = mesh.faces();
  std::vector<SegmentLabel> labels = mesh.labels();

  for (std::size_t h = 0; h < loops.size(); ++h) {
    const auto& loop = loops[h];
    if (warnings != nullptr) {
      const bool pinched = std::any_of(loop.begin(), loop.end(),
                                       [&](int v) { return pinch.contains(v); });
      if (pinched) {
        warnings->push_back("hole " + std::to_string(h) + " touches a pinch vertex; fan fill used");
      } else if (loop_self_intersects(mesh, loop)) {
        warnings->push_back("hole " + std::to_string(h) +
                            " boundary self-intersects in projection; fan fill used");
      }
    }
    if (loop.size() == 3) {
      faces.push_back({loop[0], loop[2], loop[1]});
      continue;
    }
    Vec3 centroid = Vec3::Zero();
    for (int v : loop) centroid += mesh.vertex(v);
    centroid /= static_cast<double>(loop.size());
    const int c = static_cast<int>(vertices.size());
    vertices.push_back(centroid);
    if (mesh.has_labels()) labels.push_back(dominant_label(mesh, loop));
    for (std::size_t k = 0; k < loop.size(); ++k) {
      faces.push_back({loop[(k + 1) % loop.size()], loop[k], c});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces), std::move(labels));
}

TriangleMesh submesh(const TriangleMesh& mesh, const std::vector<int>& faces) {
  std::vector<int> remap(mesh.vertex_count(), -1);
  std::vector<Vec3> vertices;
  std::vector<SegmentLabel> labels;
  std::vector<Face> out_faces;
  out_faces.reserve(faces.size());
  for (int f : faces) {
    Face nf{};
    const auto& face = mesh.faces()[static_cast<std::size_t>(f)];
    for (int k = 0; k < 3; ++k) {
      int& slot = remap[static_cast<std::size_t>(face[k])];
      if (slot < 0) {
        slot = static_cast<int>(vertices.size());
        vertices.push_back(mesh.vertex(face[k]));
        if (mesh.has_labels()) labels.push_back(mesh.labels()[static_cast<std::size_t>(face[k])]);
      }
      nf[k] = slot;
    }
    out_faces.push_back(nf);
  }
  return TriangleMesh(std::move(vertices), std::move(out_faces), std::move(labels));
}

}  // namespace bsv
