#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsv/laplacian.hpp"
#include "bsv/mesh.hpp"
#include "bsv/point_cloud.hpp"
#include "bsv/spatial_index.hpp"

namespace bsv {

enum class CorrespondenceDirection { MeshToPoint, PointToMesh };

std::string_view direction_name(CorrespondenceDirection d);  // "m2p" / "p2m"
std::optional<CorrespondenceDirection> parse_direction(std::string_view text);

struct SchedulePhase {
  CorrespondenceDirection direction = CorrespondenceDirection::MeshToPoint;
  int iterations = 0;
};

/// 5 m2p, 5 p2m, then 10 m2p iterations.
std::vector<SchedulePhase> default_schedule();

struct RegistrationConfig {
  double per_cell_weight = 1e-2;        // w_i
  double regularization_alpha = 1e6;    // alpha
  std::vector<SchedulePhase> schedule = default_schedule();
  int inner_sweeps = 1;                 // local/global sweeps per correspondence update
  double correspondence_weight = 1e8;   // soft-constraint weight per constrained vertex
  std::optional<double> max_correspondence_distance;
  bool early_exit = false;
  double early_exit_tolerance = 1e-6;   // relative objective change
  double instability_distortion = 10.0; // edge stretch/shrink factor flagged as unstable

  /// Throws InvalidArgument for non-positive weights (alpha may be 0),
  /// an empty schedule or a non-positive sweep count.
  void validate() const;
  int total_iterations() const;
};

struct Correspondence {
  int vertex = 0;
  Vec3 target = Vec3::Zero();
  double weight = 0.0;
};

/// At most one entry per mesh vertex, sorted by vertex index.
struct CorrespondenceSet {
  CorrespondenceDirection direction = CorrespondenceDirection::MeshToPoint;
  std::vector<Correspondence> pairs;
};

/// m2p pairs every vertex with its nearest cloud point. p2m sends every cloud
/// point to its nearest vertex and targets each hit vertex at the centroid of
/// its points. Pairs farther than the configured cap are dropped (for p2m
/// before averaging). Throws InvalidArgument for an empty cloud or mesh.
CorrespondenceSet compute_correspondences(const std::vector<Vec3>& vertices,
                                          const LabeledPointCloud& cloud,
                                          CorrespondenceDirection direction,
                                          const RegistrationConfig& config);
/// Same, reusing a prebuilt index over the cloud points.
CorrespondenceSet compute_correspondences(const std::vector<Vec3>& vertices,
                                          const SpatialIndex& cloud_index,
                                          CorrespondenceDirection direction,
                                          const RegistrationConfig& config);

using RotationField = std::vector<Mat3>;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Rotation maximizing tr(R S) for a cell covariance S = sum w e e'^T:
/// R = V U^T from S = U Sigma V^T, with the column of U belonging to the
/// smallest singular value negated when det(V U^T) < 0. Returns the identity
/// when S has rank below two.
Mat3 fit_rotation(const Mat3& covariance);

/// Closest 3x2 matrix with orthonormal columns (U V^T of the thin SVD).
Mat32 nearest_orthonormal(const Mat32& f);

/// One-ring cell of a vertex.
///
/// For the regularizer every cell gets a tangent deformation map
/// F_i = sum_j (p'_j - p'_i) g_j^T (3x2). The g_j come from the rest 1-ring
/// covariance C = sum_j e_j e_j^T with eigenpairs (l2, t1) >= (l1, t2):
/// g_j = (t1.e_j / l2, t2.e_j / l1), so F_i = [t1 t2] at rest and its two
/// singular values are all 1 for any rotation of the rest shape.
struct ArapCell {
  std::vector<int> neighbors;             // sorted
  std::vector<double> weights;            // w_ij per neighbor
  std::vector<Eigen::Vector2d> gradients; // g_j per neighbor
  bool regularized = false;               // false for a degenerate 1-ring
};

/// Rest-state data for a template: cotangent weights, cells and area.
class ArapModel {
 public:
  ArapModel(const TriangleMesh& rest, const RegistrationConfig& config);

  const TriangleMesh& rest() const { return rest_; }
  const EdgeWeightMap& weights() const { return weights_; }
  const std::vector<ArapCell>& cells() const { return cells_; }
  double area() const { return area_; }
  double cell_weight() const { return cell_weight_; }
  double alpha() const { return alpha_; }
  std::size_t vertex_count() const { return rest_.vertex_count(); }

  /// F_i for the given positions.
  Mat32 deformation_map(std::size_t i, const std::vector<Vec3>& positions) const;

 private:
  TriangleMesh rest_;
  EdgeWeightMap weights_;
  std::vector<ArapCell> cells_;
  double area_ = 0.0;
  double cell_weight_ = 0.0;
  double alpha_ = 0.0;
};

struct LocalStepResult {
  RotationField rotations;                      // R_i
  std::vector<Mat32> frames;                    // nearest orthonormal Q_i of F_i
  std::vector<Eigen::Vector2d> singular_values; // of F_i (zero for unregularized cells)
};

/// R_i from S_i = sum_j w_ij e_ij e'_ij^T and Q_i from F_i, per vertex.
LocalStepResult local_step(const ArapModel& model, const std::vector<Vec3>& positions);

/// alpha * A * sum_i sum_k (sigma_ik - 1)^2.
double regularization_energy(const std::vector<Eigen::Vector2d>& singular_values, double area,
                             double alpha);
/// Same for arbitrary singular value lists (any length per cell).
double regularization_energy(const std::vector<Eigen::VectorXd>& singular_values, double area,
                             double alpha);

struct EnergyBreakdown {
  double fitting = 0.0;         // sum_i w_i sum_j w_ij |e'_ij - R_i e_ij|^2
  double regularization = 0.0;  // sum_i w_i alpha A sum_k (sigma_ik - 1)^2
  double total = 0.0;           // fitting + regularization
  double correspondence = 0.0;  // sum_c weight_c |p'_c - target_c|^2

  /// The quantity minimized by the solver.
  double objective() const { return total + correspondence; }
};

/// Energy of `positions` with the given rotations; the regularizer uses the
/// singular values of the current F_i.
EnergyBreakdown total_energy(const ArapModel& model, const std::vector<Vec3>& positions,
                             const RotationField& rotations,
                             const CorrespondenceSet* correspondences = nullptr);

/// Sparse system of the global step:
///   (sum w_ij (w_i + w_j) edge terms + sum w_i alpha A G_i^T G_i + C) p' = b + r + c
/// with C, c the soft correspondence penalties. The constant part is
/// assembled once; the factorization is refreshed only when the constraint
/// diagonal changes (the sparsity pattern never does).
class GlobalSystem {
 public:
  explicit GlobalSystem(const ArapModel& model);

  /// Solves for new positions. Throws SolverError when there are no
  /// correspondences (the system would be singular), the factorization fails
  /// or the residual exceeds 1e-8 relative.
  std::vector<Vec3> solve(const LocalStepResult& local, const CorrespondenceSet& correspondences);

  /// Matrix for the current constraints (after at least one solve or
  /// set_constraints call).
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  /// Right-hand side (n x 3) for the given local step and correspondences.
  Eigen::MatrixX3d rhs(const LocalStepResult& local, const CorrespondenceSet& correspondences) const;
  void set_constraints(const CorrespondenceSet& correspondences);

  int factorizations() const { return factorizations_; }
  double last_residual() const { return last_residual_; }

 private:
  const ArapModel& model_;
  Eigen::SparseMatrix<double> base_;    // without constraints, diagonal stored explicitly
  Eigen::SparseMatrix<double> matrix_;
  std::vector<Eigen::Index> diagonal_;  // value index of (i,i) in the compressed storage
  Eigen::VectorXd constraint_diag_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool analyzed_ = false;
  bool factorized_ = false;
  int factorizations_ = 0;
  double last_residual_ = 0.0;
};

/// max over edges of max(l / l0, l0 / l); infinite if an edge collapsed.
double max_edge_distortion(const TriangleMesh& rest, const std::vector<Vec3>& positions);

struct IterationLog {
  int iteration = 0;  // 1-based outer iteration
  CorrespondenceDirection phase = CorrespondenceDirection::MeshToPoint;
  std::size_t correspondences = 0;
  EnergyBreakdown energy;
  double max_edge_distortion = 1.0;
};

struct RegistrationResult {
  TriangleMesh mesh;  // template connectivity and labels, fitted positions
  std::vector<IterationLog> log;
  /// First iteration whose edge distortion exceeded the configured factor.
  std::optional<int> unstable_iteration;
};

/// Runs the correspondence schedule on an aligned template. Each outer
/// iteration recomputes correspondences and then runs `inner_sweeps`
/// local/global sweeps. Throws SolverError carrying the iteration when the
/// solve fails or positions become non-finite.
RegistrationResult register_mesh(const TriangleMesh& tmpl, const LabeledPointCloud& cloud,
                                 const RegistrationConfig& config);

/// CSV with header iteration,phase,correspondences,fitting,regularization,
/// total,correspondence,objective,max_edge_distortion.
void write_energy_log(const std::filesystem::path& path, const std::vector<IterationLog>& log);

}  // namespace bsv
