#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "casimir/geometry.hpp"

namespace casimir {

// Scalar boundary problems of the z-invariant perfect conductor:
// Dirichlet carries the TM modes, Neumann the TE modes.
enum class Polarization { Dirichlet = 0, Neumann = 1 };

std::string to_string(Polarization p);
inline constexpr std::array<Polarization, 2> kPolarizations = {Polarization::Dirichlet,
                                                              Polarization::Neumann};

struct BemOptions {
  int oversampling = 2;  // collocation points per element
  int far_gauss = 8;     // Gauss points for well-separated elements
  double rank_tolerance = 1e-13;
  // Scale each collocation row by the square root of its boundary
  // quadrature weight, so least squares minimizes the L2 boundary residual
  // on nonuniform meshes.
  bool weighted_rows = true;
};

// Quadratic (or, at chain ends, linear) polynomial patch describing the
// layer density on one element in terms of nodal values at element
// midpoints: sigma(tau) = sum_k sum_m coeff[k][m] tau^m sigma[node[k]],
// tau = arc offset from the midpoint divided by the element length.
struct DensityPatch {
  std::array<int, 3> node{};
  std::array<std::array<double, 3>, 3> coeff{};
  int count = 0;
};

DensityPatch make_patch(const BoundaryMesh& mesh, int element);

enum class IntegralKind { Value, NormalDerivative, DoubleLayer };

// Integral over one element of tau^m times the kernel, m = 0, 1, 2.
// Value: Phi(|x - y|). NormalDerivative: d Phi / d n_x with n_x = target_normal.
// DoubleLayer: d Phi / d n_y along the element normal. Principal values when
// the target lies on the element. Near-field and
// on-element targets get singularity subtraction plus graded Gauss.
std::array<double, 3> element_moments(const Element& element, Vec2 target, double kappa,
                                      IntegralKind kind, Vec2 target_normal = {},
                                      const BemOptions& options = {});

// Plain integral of the kernel over the element (the m = 0 moment).
double element_integral(const Element& element, Vec2 target, double kappa, IntegralKind kind,
                        Vec2 target_normal = {});

// Collocation matrix and its Householder QR factorization.
// Dirichlet: single-layer representation u = S sigma, u = -Phi(. - source) on
// the boundary. Neumann: direct formulation for the boundary values u,
// (1/2 - K) u = -S g with g the prescribed normal derivative and K the
// double-layer operator; the field is u(x) = D u - S g. The unknowns are
// nodal values at element midpoints, interpolated by density patches.
class AssembledSystem {
 public:
  AssembledSystem(std::shared_ptr<const BoundaryMesh> mesh, double kappa, Polarization pol,
                  Eigen::MatrixXd matrix, std::vector<Vec2> points, std::vector<Vec2> normals,
                  const BemOptions& options, Eigen::VectorXd row_weights = {},
                  std::shared_ptr<const Eigen::MatrixXd> single_layer = nullptr);

  double kappa() const { return kappa_; }
  Polarization polarization() const { return pol_; }
  const BoundaryMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const BoundaryMesh> mesh_ptr() const { return mesh_; }
  // Unweighted collocation matrix.
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  // S at the collocation points; for Neumann systems only.
  const Eigen::MatrixXd& single_layer() const { return *single_layer_; }
  // Row scaling applied before factorization; empty when unweighted.
  const Eigen::VectorXd& row_weights() const { return weights_; }
  const std::vector<Vec2>& collocation_points() const { return points_; }
  const std::vector<Vec2>& collocation_normals() const { return normals_; }
  const Eigen::HouseholderQR<Eigen::MatrixXd>& factorization() const { return qr_; }
  int rows() const { return static_cast<int>(matrix_.rows()); }
  int cols() const { return static_cast<int>(matrix_.cols()); }
  // max |R_ii| / min |R_ii|, a cheap lower bound on the condition number.
  double condition_estimate() const { return condition_; }

 private:
  std::shared_ptr<const BoundaryMesh> mesh_;
  double kappa_;
  Polarization pol_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd weights_;
  std::vector<Vec2> points_;
  std::vector<Vec2> normals_;
  std::shared_ptr<const Eigen::MatrixXd> single_layer_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  double condition_ = 1.0;
};

// Throws DomainError for kappa <= 0, MeshError for an empty mesh,
// NumericError when the factorization is numerically rank deficient.
AssembledSystem assemble(std::shared_ptr<const BoundaryMesh> mesh, double kappa, Polarization pol,
                         const BemOptions& options = {});

// Both polarizations from one pass over the kernel evaluations.
std::array<AssembledSystem, 2> assemble_both(std::shared_ptr<const BoundaryMesh> mesh, double kappa,
                                             const BemOptions& options = {});

// Right-hand sides for point sources in the gap. Column layout per source:
// [monopole] or, with dipoles, [monopole, d/du_x, d/du_y].
struct RhsSet {
  Eigen::MatrixXd columns;
  // Neumann only: prescribed normal derivative at element midpoints.
  Eigen::MatrixXd boundary_flux;
  std::vector<Vec2> sources;
  bool with_dipoles = false;
  int columns_per_source() const { return with_dipoles ? 3 : 1; }
};

// Dirichlet: rhs = -Phi(|s - u|). Neumann: g = -dPhi/dn(s - u), rhs = -S g.
// Throws DomainError when a source sits on a collocation point.
RhsSet make_source_rhs(const AssembledSystem& system, const std::vector<Vec2>& sources,
                       bool with_source_derivatives);

struct LayerSolution {
  // One column per rhs: nodal layer density (Dirichlet) or boundary values
  // of the field (Neumann).
  Eigen::MatrixXd densities;
  Eigen::MatrixXd boundary_flux;  // Neumann: the prescribed g
  std::vector<double> residual_norm;
  std::vector<double> rhs_norm;
  std::vector<Vec2> sources;
  bool with_dipoles = false;
  double kappa = 0.0;
  Polarization pol = Polarization::Dirichlet;
  std::shared_ptr<const BoundaryMesh> mesh;

  double max_relative_residual() const;
};

// Least-squares solve sharing the factorization across the whole set.
LayerSolution solve(const AssembledSystem& system, const RhsSet& rhs);
// Raw columns (no source bookkeeping), mainly for tests.
Eigen::MatrixXd solve_columns(const AssembledSystem& system, const Eigen::MatrixXd& rhs);

// Linear functionals mapping nodal values onto single- and double-layer
// potentials at one point: index 0 value, 1 and 2 the target gradient
// (order 1 only).
struct EvaluationRow {
  std::array<Eigen::RowVectorXd, 3> single;
  std::array<Eigen::RowVectorXd, 3> dbl;
};

EvaluationRow evaluation_row(const BoundaryMesh& mesh, double kappa, Vec2 target, int order,
                             const BemOptions& options = {});

// {value, d/dx, d/dy} of the field of one solution column.
std::array<double, 3> apply_row(const EvaluationRow& row, const LayerSolution& solution, Eigen::Index column);

// Renormalized Green function g_ren(v; u) for the source u of group
// `source_index` evaluated at `target`.
struct GreenDerivatives {
  double value = 0.0;
  Vec2 grad_target;
  // d/du_alpha d/dv_beta g_ren, row-major {xx, xy, yx, yy} (alpha = source).
  std::optional<std::array<double, 4>> mixed;
};

// order 0: value; 1: + target gradient; 2: + mixed source/target second
// derivatives (needs a solution built with dipole right-hand sides, else
// UsageError).
GreenDerivatives eval_green(const LayerSolution& solution, int source_index, Vec2 target, int order,
                            const BemOptions& options = {});

}  // namespace casimir
