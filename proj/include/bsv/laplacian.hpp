#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "bsv/mesh.hpp"

namespace bsv {

/// Each cotangent term is clamped to this magnitude so sliver triangles keep
/// the Laplacian finite.
inline constexpr double kCotangentClamp = 10.0;

/// Symmetric per-edge weights w_ij plus per-vertex (per-cell) weights w_i.
struct EdgeWeightMap {
  std::vector<Edge> edges;            // same order as MeshTopology::edges
  std::vector<double> edge_weights;   // w_ij
  std::vector<double> cell_weights;   // w_i, one per vertex

  double weight(int a, int b) const;  // 0 when (a,b) is not an edge
  std::size_t vertex_count() const { return cell_weights.size(); }
};

/// w_ij = 1/2 (cot a_ij + cot b_ij) over the faces incident to each edge; a
/// boundary edge keeps its single term. Cell weights default to 1.
/// Throws GeometryError naming the edge if more than two faces share it.
EdgeWeightMap cotangent_weights(const TriangleMesh& mesh);

/// Cotangent of the angle at `apex` in triangle (apex, a, b), clamped.
double clamped_cotangent(const Vec3& apex, const Vec3& a, const Vec3& b);

/// Cotangent Laplacian: L_ij = -w_ij, L_ii = sum_j w_ij.
struct SparseLaplacian {
  Eigen::SparseMatrix<double> matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

SparseLaplacian build_laplacian(const TriangleMesh& mesh, const EdgeWeightMap& weights);

}  // namespace bsv
