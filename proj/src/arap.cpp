#include "bsv/arap.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "bsv/error.hpp"
#include "bsv/measures.hpp"

namespace bsv {

std::string_view direction_name(CorrespondenceDirection d) {
  return d == CorrespondenceDirection::MeshToPoint ? "m2p" : "p2m";
}

std::optional<CorrespondenceDirection> parse_direction(std::string_view text) {
  if (text == "m2p") return CorrespondenceDirection::MeshToPoint;
  if (text == "p2m") return CorrespondenceDirection::PointToMesh;
  return std::nullopt;
}

std::vector<SchedulePhase> default_schedule() {
  return {{CorrespondenceDirection::MeshToPoint, 5},
          {CorrespondenceDirection::PointToMesh, 5},
          {CorrespondenceDirection::MeshToPoint, 10}};
}

void RegistrationConfig::validate() const {
  if (!(per_cell_weight > 0.0)) throw InvalidArgument("registration: per-cell weight must be > 0");
  if (!(regularization_alpha >= 0.0)) throw InvalidArgument("registration: alpha must be >= 0");
  if (!(correspondence_weight > 0.0)) {
    throw InvalidArgument("registration: correspondence weight must be > 0");
  }
  if (schedule.empty()) throw InvalidArgument("registration: empty schedule");
  for (const auto& p : schedule) {
    if (p.iterations <= 0) throw InvalidArgument("registration: phase with no iterations");
  }
  if (inner_sweeps <= 0) throw InvalidArgument("registration: inner sweeps must be > 0");
  if (max_correspondence_distance && !(*max_correspondence_distance > 0.0)) {
    throw InvalidArgument("registration: correspondence distance cap must be > 0");
  }
}

int RegistrationConfig::total_iterations() const {
  int n = 0;
  for (const auto& p : schedule) n += p.iterations;
  return n;
}

CorrespondenceSet compute_correspondences(const std::vector<Vec3>& vertices,
                                          const LabeledPointCloud& cloud,
                                          CorrespondenceDirection direction,
                                          const RegistrationConfig& config) {
  if (cloud.empty()) throw InvalidArgument("compute_correspondences: empty cloud");
  return compute_correspondences(vertices, SpatialIndex(cloud.points), direction, config);
}

CorrespondenceSet compute_correspondences(const std::vector<Vec3>& vertices,
                                          const SpatialIndex& cloud_index,
                                          CorrespondenceDirection direction,
                                          const RegistrationConfig& config) {
  if (cloud_index.empty()) throw InvalidArgument("compute_correspondences: empty cloud");
  if (vertices.empty()) throw InvalidArgument("compute_correspondences: empty mesh");
  const double cap2 = config.max_correspondence_distance
                          ? *config.max_correspondence_distance * *config.max_correspondence_distance
                          : std::numeric_limits<double>::infinity();
  CorrespondenceSet set;
  set.direction = direction;
  if (direction == CorrespondenceDirection::MeshToPoint) {
    set.pairs.reserve(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto nn = cloud_index.nearest_neighbor(vertices[i]);
      if (nn.squared_distance > cap2) continue;
      set.pairs.push_back({static_cast<int>(i), cloud_index.point(nn.index),
                           config.correspondence_weight});
    }
    return set;
  }

  const SpatialIndex mesh_index(vertices);
  std::vector<Vec3> sums(vertices.size(), Vec3::Zero());
  std::vector<int> counts(vertices.size(), 0);
  for (std::size_t k = 0; k < cloud_index.size(); ++k) {
    const Vec3& p = cloud_index.point(k);
    const auto nn = mesh_index.nearest_neighbor(p);
    if (nn.squared_distance > cap2) continue;
    sums[nn.index] += p;
    ++counts[nn.index];
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (counts[i] == 0) continue;
    set.pairs.push_back({static_cast<int>(i), sums[i] / counts[i], config.correspondence_weight});
  }
  return set;
}

Mat3 fit_rotation(const Mat3& covariance) {
  Eigen::JacobiSVD<Mat3> svd(covariance, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= 1e-12 * sv[0]) return Mat3::Identity();
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 r = v * u.transpose();
  if (r.determinant() < 0.0) {
    u.col(2) *= -1.0;
    r = v * u.transpose();
  }
  return r;
}

Mat32 nearest_orthonormal(const Mat32& f) {
  Eigen::JacobiSVD<Mat32> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU().leftCols<2>() * svd.matrixV().transpose();
}

ArapModel::ArapModel(const TriangleMesh& rest, const RegistrationConfig& config)
    : rest_(rest),
      weights_(cotangent_weights(rest)),
      cell_weight_(config.per_cell_weight),
      alpha_(config.regularization_alpha) {
  config.validate();
  if (rest.empty()) throw InvalidArgument("ArapModel: empty template");
  weights_.cell_weights.assign(rest.vertex_count(), cell_weight_);
  area_ = surface_area(rest);
  const auto topo = build_topology(rest);
  cells_.resize(rest.vertex_count());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    auto& cell = cells_[i];
    cell.neighbors = topo.neighbors[i];
    const Vec3& pi = rest.vertices()[i];
    Mat3 c = Mat3::Zero();
    for (int j : cell.neighbors) {
      cell.weights.push_back(weights_.weight(static_cast<int>(i), j));
      const Vec3 e = rest.vertex(j) - pi;
      c += e * e.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(c);
    const Vec3 ev = eig.eigenvalues();  // ascending
    cell.regularized = cell.neighbors.size() >= 2 && ev[2] > 0.0 && ev[1] > 1e-12 * ev[2];
    if (!cell.regularized) continue;
    const Vec3 t1 = eig.eigenvectors().col(2);
    const Vec3 t2 = eig.eigenvectors().col(1);
    for (int j : cell.neighbors) {
      const Vec3 e = rest.vertex(j) - pi;
      cell.gradients.emplace_back(t1.dot(e) / ev[2], t2.dot(e) / ev[1]);
    }
  }
}

Mat32 ArapModel::deformation_map(std::size_t i, const std::vector<Vec3>& positions) const {
  const auto& cell = cells_[i];
  Mat32 f = Mat32::Zero();
  if (!cell.regularized) return f;
  for (std::size_t k = 0; k < cell.neighbors.size(); ++k) {
    f += (positions[static_cast<std::size_t>(cell.neighbors[k])] - positions[i]) *
         cell.gradients[k].transpose();
  }
  return f;
}

LocalStepResult local_step(const ArapModel& model, const std::vector<Vec3>& positions) {
  const std::size_t n = model.vertex_count();
  if (positions.size() != n) {
    throw InvalidArgument("local_step: position count does not match the template");
  }
  const auto& rest = model.rest().vertices();
  LocalStepResult out;
  out.rotations.resize(n);
  out.frames.assign(n, Mat32::Zero());
  out.singular_values.assign(n, Eigen::Vector2d::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cell = model.cells()[i];
    Mat3 s = Mat3::Zero();
    for (std::size_t k = 0; k < cell.neighbors.size(); ++k) {
      const auto j = static_cast<std::size_t>(cell.neighbors[k]);
      s += cell.weights[k] * (rest[i] - rest[j]) * (positions[i] - positions[j]).transpose();
    }
    out.rotations[i] = fit_rotation(s);
    if (!cell.regularized) continue;
    const Mat32 f = model.deformation_map(i, positions);
    Eigen::JacobiSVD<Mat32> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.frames[i] = svd.matrixU().leftCols<2>() * svd.matrixV().transpose();
    out.singular_values[i] = svd.singularValues();
  }
  return out;
}

double regularization_energy(const std::vector<Eigen::Vector2d>& singular_values, double area,
                             double alpha) {
  double sum = 0.0;
  for (const auto& sv : singular_values) sum += (sv.array() - 1.0).square().sum();
  return alpha * area * sum;
}

double regularization_energy(const std::vector<Eigen::VectorXd>& singular_values, double area,
                             double alpha) {
  double sum = 0.0;
  for (const auto& sv : singular_values) sum += (sv.array() - 1.0).square().sum();
  return alpha * area * sum;
}

EnergyBreakdown total_energy(const ArapModel& model, const std::vector<Vec3>& positions,
                             const RotationField& rotations,
                             const CorrespondenceSet* correspondences) {
  const std::size_t n = model.vertex_count();
  if (positions.size() != n || rotations.size() != n) {
    throw InvalidArgument("total_energy: size mismatch with the template");
  }
  const auto& rest = model.rest().vertices();
  EnergyBreakdown e;
  std::vector<Eigen::Vector2d> sv;
  sv.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cell = model.cells()[i];
    double cell_fit = 0.0;
    for (std::size_t k = 0; k < cell.neighbors.size(); ++k) {
      const auto j = static_cast<std::size_t>(cell.neighbors[k]);
      cell_fit += cell.weights[k] *
                  ((positions[i] - positions[j]) - rotations[i] * (rest[i] - rest[j])).squaredNorm();
    }
    e.fitting += model.cell_weight() * cell_fit;
    if (cell.regularized) {
      Eigen::JacobiSVD<Mat32> svd(model.deformation_map(i, positions));
      sv.push_back(svd.singularValues());
    }
  }
  e.regularization = model.cell_weight() * regularization_energy(sv, model.area(), model.alpha());
  e.total = e.fitting + e.regularization;
  if (correspondences != nullptr) {
    for (const auto& c : correspondences->pairs) {
      e.correspondence +=
          c.weight * (positions[static_cast<std::size_t>(c.vertex)] - c.target).squaredNorm();
    }
  }
  return e;
}

GlobalSystem::GlobalSystem(const ArapModel& model) : model_(model) {
  const auto n = static_cast<Eigen::Index>(model.vertex_count());
  const double w = model.cell_weight();
  std::vector<Eigen::Triplet<double>> t;
  const auto& ew = model.weights();
  t.reserve(ew.edges.size() * 4 + static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, 0.0);
  for (std::size_t e = 0; e < ew.edges.size(); ++e) {
    const auto [a, b] = ew.edges[e];
    const double c = ew.edge_weights[e] * 2.0 * w;
    t.emplace_back(a, a, c);
    t.emplace_back(b, b, c);
    t.emplace_back(a, b, -c);
    t.emplace_back(b, a, -c);
  }
  const double s = w * model.alpha() * model.area();
  if (s > 0.0) {
    for (std::size_t i = 0; i < model.vertex_count(); ++i) {
      const auto& cell = model.cells()[i];
      if (!cell.regularized) continue;
      std::vector<int> idx{static_cast<int>(i)};
      std::vector<Eigen::Vector2d> col{Eigen::Vector2d::Zero()};
      for (std::size_t k = 0; k < cell.neighbors.size(); ++k) {
        idx.push_back(cell.neighbors[k]);
        col.push_back(cell.gradients[k]);
        col[0] -= cell.gradients[k];
      }
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) {
          t.emplace_back(idx[a], idx[b], s * col[a].dot(col[b]));
        }
      }
    }
  }
  base_.resize(n, n);
  base_.setFromTriplets(t.begin(), t.end());
  base_.makeCompressed();
  diagonal_.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index p = base_.outerIndexPtr()[col]; p < base_.outerIndexPtr()[col + 1]; ++p) {
      if (base_.innerIndexPtr()[p] == col) diagonal_[static_cast<std::size_t>(col)] = p;
    }
  }
  constraint_diag_ = Eigen::VectorXd::Constant(n, -1.0);  // forces the first factorization
}

void GlobalSystem::set_constraints(const CorrespondenceSet& correspondences) {
  const auto n = static_cast<Eigen::Index>(model_.vertex_count());
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (const auto& c : correspondences.pairs) {
    if (c.vertex < 0 || c.vertex >= n) throw InvalidArgument("global step: correspondence vertex out of range");
    d[c.vertex] += c.weight;
  }
  if (factorized_ && d == constraint_diag_) return;
  matrix_ = base_;
  for (Eigen::Index i = 0; i < n; ++i) {
    matrix_.valuePtr()[diagonal_[static_cast<std::size_t>(i)]] += d[i];
  }
  if (!analyzed_) {
    solver_.analyzePattern(matrix_);
    analyzed_ = true;
  }
  solver_.factorize(matrix_);
  factorized_ = solver_.info() == Eigen::Success;
  if (!factorized_) throw SolverError("global step: factorization failed");
  constraint_diag_ = d;
  ++factorizations_;
}

Eigen::MatrixX3d GlobalSystem::rhs(const LocalStepResult& local,
                                   const CorrespondenceSet& correspondences) const {
  const std::size_t n = model_.vertex_count();
  const auto& rest = model_.rest().vertices();
  const double w = model_.cell_weight();
  Eigen::MatrixX3d b = Eigen::MatrixX3d::Zero(static_cast<Eigen::Index>(n), 3);
  const auto& ew = model_.weights();
  for (std::size_t e = 0; e < ew.edges.size(); ++e) {
    const auto [i, j] = ew.edges[e];
    const Vec3 edge = rest[static_cast<std::size_t>(i)] - rest[static_cast<std::size_t>(j)];
    const Vec3 v = ew.edge_weights[e] * w *
                   (local.rotations[static_cast<std::size_t>(i)] +
                    local.rotations[static_cast<std::size_t>(j)]) *
                   edge;
    b.row(i) += v.transpose();
    b.row(j) -= v.transpose();
  }
  const double s = w * model_.alpha() * model_.area();
  if (s > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cell = model_.cells()[i];
      if (!cell.regularized) continue;
      const Mat32& q = local.frames[i];
      Eigen::Vector2d self = Eigen::Vector2d::Zero();
      for (std::size_t k = 0; k < cell.neighbors.size(); ++k) {
        self -= cell.gradients[k];
        b.row(cell.neighbors[k]) += s * (q * cell.gradients[k]).transpose();
      }
      b.row(static_cast<Eigen::Index>(i)) += s * (q * self).transpose();
    }
  }
  for (const auto& c : correspondences.pairs) b.row(c.vertex) += c.weight * c.target.transpose();
  return b;
}

std::vector<Vec3> GlobalSystem::solve(const LocalStepResult& local,
                                      const CorrespondenceSet& correspondences) {
  if (correspondences.pairs.empty()) {
    throw SolverError("global step: no correspondences, the system is singular");
  }
  set_constraints(correspondences);
  const Eigen::MatrixX3d b = rhs(local, correspondences);
  Eigen::MatrixX3d x = solver_.solve(b);
  const double scale = std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (int refine = 0; refine < 2; ++refine) {
    const Eigen::MatrixX3d r = b - matrix_ * x;
    last_residual_ = r.cwiseAbs().maxCoeff() / scale;
    if (last_residual_ < 1e-12) break;
    x += solver_.solve(r);
  }
  last_residual_ = (b - matrix_ * x).cwiseAbs().maxCoeff() / scale;
  if (!x.allFinite()) throw SolverError("global step: non-finite positions");
  if (!(last_residual_ < 1e-8)) {
    throw SolverError("global step: residual " + std::to_string(last_residual_) +
                      " exceeds tolerance");
  }
  std::vector<Vec3> out(model_.vertex_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.row(static_cast<Eigen::Index>(i)).transpose();
  return out;
}

double max_edge_distortion(const TriangleMesh& rest, const std::vector<Vec3>& positions) {
  if (positions.size() != rest.vertex_count()) {
    throw InvalidArgument("max_edge_distortion: position count does not match the mesh");
  }
  double worst = 1.0;
  for (const auto& [a, b] : build_topology(rest).edges) {
    const double l0 = (rest.vertex(a) - rest.vertex(b)).norm();
    const double l = (positions[static_cast<std::size_t>(a)] - positions[static_cast<std::size_t>(b)]).norm();
    if (l0 == 0.0) continue;
    if (l == 0.0 || !std::isfinite(l)) return std::numeric_limits<double>::infinity();
    worst = std::max({worst, l / l0, l0 / l});
  }
  return worst;
}

RegistrationResult register_mesh(const TriangleMesh& tmpl, const LabeledPointCloud& cloud,
                                 const RegistrationConfig& config) {
  config.validate();
  if (cloud.empty()) throw InvalidArgument("register: empty point cloud");
  cloud.validate();
  const ArapModel model(tmpl, config);
  GlobalSystem system(model);
  const SpatialIndex cloud_index(cloud.points);

  std::vector<Vec3> positions = tmpl.vertices();
  LocalStepResult local = local_step(model, positions);
  RegistrationResult result;
  int iteration = 0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  bool stop = false;
  for (const auto& phase : config.schedule) {
    for (int k = 0; k < phase.iterations && !stop; ++k) {
      ++iteration;
      const auto corr = compute_correspondences(positions, cloud_index, phase.direction, config);
      for (int sweep = 0; sweep < config.inner_sweeps; ++sweep) {
        try {
          positions = system.solve(local, corr);
        } catch (const SolverError& e) {
          throw SolverError(e.what(), iteration);
        }
        local = local_step(model, positions);
      }
      IterationLog entry;
      entry.iteration = iteration;
      entry.phase = phase.direction;
      entry.correspondences = corr.pairs.size();
      entry.energy = total_energy(model, positions, local.rotations, &corr);
      entry.max_edge_distortion = max_edge_distortion(tmpl, positions);
      if (!std::isfinite(entry.energy.objective())) {
        throw SolverError("register: energy is not finite", iteration);
      }
      if (!result.unstable_iteration && entry.max_edge_distortion > config.instability_distortion) {
        result.unstable_iteration = iteration;
      }
      result.log.push_back(entry);
      const double current = entry.energy.objective();
      if (config.early_exit && std::isfinite(previous) &&
          std::abs(previous - current) <= config.early_exit_tolerance * std::max(std::abs(previous), 1e-300)) {
        stop = true;
      }
      previous = current;
    }
  }
  result.mesh = tmpl.with_vertices(std::move(positions));
  return result;
}

void write_energy_log(const std::filesystem::path& path, const std::vector<IterationLog>& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iteration,phase,correspondences,fitting,regularization,total,correspondence,objective,"
         "max_edge_distortion\n";
  out << std::setprecision(17);
  for (const auto& e : log) {
    out << e.iteration << ',' << direction_name(e.phase) << ',' << e.correspondences << ','
        << e.energy.fitting << ',' << e.energy.regularization << ',' << e.energy.total << ','
        << e.energy.correspondence << ',' << e.energy.objective() << ',' << e.max_edge_distortion
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace bsv
