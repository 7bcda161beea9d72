#pragma once

#include <filesystem>
#include <string>

#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"

namespace bsv {

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Reads a triangle mesh from PLY (ascii or binary_little_endian) or OBJ,
/// chosen by extension. Per-vertex `segment` bytes in PLY become labels.
/// Polygons are fan-triangulated. A closed mesh with negative signed volume
/// is flipped so faces point outward.
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
                PlyFormat format = PlyFormat::BinaryLittleEndian);

TriangleMesh read_ply_mesh(const std::filesystem::path& path);
void write_ply_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
                    PlyFormat format = PlyFormat::BinaryLittleEndian);
TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Point clouds as PLY with optional red/green/blue and `segment` properties.
LabeledPointCloud read_ply_cloud(const std::filesystem::path& path);
void write_ply_cloud(const std::filesystem::path& path, const LabeledPointCloud& cloud,
                     PlyFormat format = PlyFormat::BinaryLittleEndian);

/// Rigid transforms as a 4x4 row-major text matrix (one row per line).
RigidTransform read_transform(const std::filesystem::path& path);
void write_transform(const std::filesystem::path& path, const RigidTransform& transform);

}  // namespace bsv
