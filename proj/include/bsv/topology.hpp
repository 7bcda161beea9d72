#pragma once

#include <string>
#include <vector>

#include "bsv/mesh.hpp"

namespace bsv {

/// Directed edges (a -> b) of faces whose reverse edge is not present.
std::vector<Edge> boundary_half_edges(const TriangleMesh& mesh);

std::size_t boundary_edge_count(const TriangleMesh& mesh);

/// Closed, consistently oriented surface with no boundary edges.
bool is_watertight(const TriangleMesh& mesh);

/// Ordered vertex cycles of the boundary, following the direction of the
/// faces' boundary half-edges (a patch closing the hole runs the other way).
/// Empty iff the mesh is closed.
std::vector<std::vector<int>> boundary_loops(const TriangleMesh& mesh);

/// Closes every boundary loop. Loops of three vertices get one triangle; longer
/// loops get a centroid vertex and a triangle fan. Original faces are kept
/// unchanged and in order. Filled-in vertices inherit the label of the lowest
/// ordinal among the loop vertices' most common label.
///
/// Non-simple loops (pinch vertices, or a self-intersecting projection onto the
/// best-fit plane) are still filled; a message is appended to `warnings`.
TriangleMesh fill_holes(const TriangleMesh& mesh, std::vector<std::string>* warnings = nullptr);

/// Keeps only `faces`, reindexing vertices compactly (labels carried along).
TriangleMesh submesh(const TriangleMesh& mesh, const std::vector<int>& faces);

}  // namespace bsv
