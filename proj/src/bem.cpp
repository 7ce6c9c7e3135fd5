#include "casimir/bem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/specfun.hpp"

namespace casimir {
namespace {

constexpr double kInv2Pi = 0.5 * std::numbers::inv_pi;
// K0, K1 < 1e-26 beyond this argument; such entries are dropped.
constexpr double kNegligibleArgument = 60.0;
constexpr int kNearGauss = 8;
constexpr double kGrading = 0.25;

using Moments = std::array<double, 3>;

// Antiderivatives in u of u^k * ln(sqrt(u^2 + q^2)), k = 0, 1, 2 (q >= 0).
struct LogAntiderivative {
  double q;

  double f0(double u) const {
    if (q == 0.0) return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u;
    return 0.5 * u * std::log(u * u + q * q) - u + q * std::atan(u / q);
  }
  double f1(double u) const {
    const double r2 = u * u + q * q;
    return r2 == 0.0 ? 0.0 : 0.25 * (r2 * std::log(r2) - u * u);
  }
  double f2(double u) const {
    const double r2 = u * u + q * q;
    const double u3 = u * u * u;
    const double lg = r2 == 0.0 ? 0.0 : u3 * std::log(r2) / 6.0;
    const double at = q == 0.0 ? 0.0 : q * q * q * std::atan(u / q) / 3.0;
    return lg - u3 / 9.0 + q * q * u / 3.0 - at;
  }
};

// int_{-l/2}^{l/2} (s/l)^m ln r(s) ds with r^2 = (s - p)^2 + q^2.
Moments log_moments(double length, double p, double q) {
  const LogAntiderivative F{std::abs(q)};
  const double ua = -0.5 * length - p;
  const double ub = 0.5 * length - p;
  const double i0 = F.f0(ub) - F.f0(ua);
  const double i1 = F.f1(ub) - F.f1(ua);
  const double i2 = F.f2(ub) - F.f2(ua);
  const double s0 = i0;
  const double s1 = i1 + p * i0;
  const double s2 = i2 + 2.0 * p * i1 + p * p * i0;
  return {s0, s1 / length, s2 / (length * length)};
}

// Composite Gauss on [-l/2, l/2] with pieces shrinking geometrically
// towards s_star until they reach `finest`. f(s) returns K kernel values;
// out[k][m] accumulates int (s/l)^m f_k(s) ds.
template <std::size_t K, class F>
void graded_moments(double length, double s_star, double finest, F&& f,
                    std::array<Moments, K>& out) {
  const auto& rule = quad::gauss_legendre(kNearGauss);
  auto piece = [&](double a, double b) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int g = 0; g < kNearGauss; ++g) {
      const double s = mid + half * rule.nodes[g];
      const double w = half * rule.weights[g];
      const double tau = s / length;
      const auto vals = f(s);
      for (std::size_t k = 0; k < K; ++k) {
        const double v = w * vals[k];
        out[k][0] += v;
        out[k][1] += v * tau;
        out[k][2] += v * tau * tau;
      }
    }
  };
  auto side = [&](double from, double to) {
    // Pieces between `from` (singular end) and `to`.
    const double span = std::abs(to - from);
    if (span <= 0.0) return;
    const double dir = to > from ? 1.0 : -1.0;
    double outer = span;
    while (outer * kGrading > finest) {
      const double inner = outer * kGrading;
      piece(from + dir * inner, from + dir * outer);
      outer = inner;
    }
    piece(from, from + dir * outer);
  };
  const double lo = -0.5 * length;
  const double hi = 0.5 * length;
  side(s_star, lo);
  side(s_star, hi);
}

struct LocalFrame {
  double p;  // along the element from its midpoint
  double q;  // along the element normal
};

LocalFrame local_frame(const Element& e, Vec2 x) {
  const Vec2 d = x - e.midpoint;
  return {dot(d, e.tangent), dot(d, e.normal)};
}

bool is_near(const Element& e, Vec2 x) { return distance(x, e.midpoint) <= 2.0 * e.length; }

Moments near_value_moments(const Element& e, Vec2 x, double kappa) {
  const auto [p, q] = local_frame(e, x);
  const double len = e.length;
  const Moments lg = log_moments(len, p, q);
  std::array<Moments, 1> rem{};
  const double s_star = std::clamp(p, -0.5 * len, 0.5 * len);
  const double finest = std::max(0.5 * std::abs(q), 1e-3 * len);
  graded_moments(len, s_star, finest,
                 [&](double s) {
                   const double r = std::hypot(s - p, q);
                   return std::array<double, 1>{kInv2Pi * (bessel_k0(kappa * r) + std::log(r))};
                 },
                 rem);
  return {rem[0][0] - kInv2Pi * lg[0], rem[0][1] - kInv2Pi * lg[1], rem[0][2] - kInv2Pi * lg[2]};
}

Moments near_normal_moments(const Element& e, Vec2 x, double kappa, Vec2 n) {
  const auto [p, q] = local_frame(e, x);
  const double len = e.length;
  const double tiny = 1e-13 * len;
  if (std::abs(q) <= tiny && std::abs(dot(n, e.tangent)) <= 1e-13) return {0.0, 0.0, 0.0};
  std::array<Moments, 1> out{};
  const double s_star = std::clamp(p, -0.5 * len, 0.5 * len);
  const double gap = std::max(std::abs(q), std::abs(p) - 0.5 * len);
  const double finest = std::max(0.5 * gap, 1e-9 * len);
  graded_moments(len, s_star, finest,
                 [&](double s) {
                   const Vec2 y = e.midpoint + s * e.tangent;
                   const Vec2 d = x - y;
                   const double r = norm(d);
                   const double dphi = -kInv2Pi * kappa * bessel_k1(kappa * r);
                   return std::array<double, 1>{dphi * dot(d, n) / r};
                 },
                 out);
  return out[0];
}

int far_points(const Element& e, double d, const BemOptions& options) {
  return d > 6.0 * e.length ? std::min(4, options.far_gauss) : options.far_gauss;
}

void scatter(const DensityPatch& patch, const Moments& m, double* row, Eigen::Index stride) {
  for (int k = 0; k < patch.count; ++k) {
    const auto& c = patch.coeff[k];
    row[patch.node[k] * stride] += c[0] * m[0] + c[1] * m[1] + c[2] * m[2];
  }
}

void scatter(const DensityPatch& patch, const Moments& m, Eigen::RowVectorXd& row) {
  for (int k = 0; k < patch.count; ++k) {
    const auto& c = patch.coeff[k];
    row[patch.node[k]] += c[0] * m[0] + c[1] * m[1] + c[2] * m[2];
  }
}

// Density at local coordinate tau of element e, as weights on nodal values.
void patch_point_weights(const DensityPatch& patch, double tau, double scale, double* row,
                         Eigen::Index stride) {
  for (int k = 0; k < patch.count; ++k) {
    const auto& c = patch.coeff[k];
    row[patch.node[k] * stride] += scale * (c[0] + tau * (c[1] + tau * c[2]));
  }
}

struct CollocationLayout {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<int> element;
  std::vector<double> tau;
  Eigen::VectorXd weights;
};

CollocationLayout collocation_layout(const BoundaryMesh& mesh, int oversampling) {
  if (oversampling < 1) throw DomainError("oversampling must be at least 1");
  const auto& rule = quad::gauss_legendre(oversampling);
  CollocationLayout out;
  const std::size_t rows = static_cast<std::size_t>(mesh.size()) * oversampling;
  out.points.reserve(rows);
  out.normals.reserve(rows);
  out.element.reserve(rows);
  out.tau.reserve(rows);
  out.weights.resize(static_cast<Eigen::Index>(rows));
  for (int j = 0; j < mesh.size(); ++j) {
    const auto& e = mesh.elements[j];
    for (int g = 0; g < oversampling; ++g) {
      const double tau = 0.5 * rule.nodes[g];
      out.points.push_back(e.midpoint + (tau * e.length) * e.tangent);
      out.normals.push_back(e.normal);
      out.element.push_back(j);
      out.tau.push_back(tau);
      out.weights(static_cast<Eigen::Index>(out.tau.size() - 1)) = std::sqrt(0.5 * rule.weights[g] * e.length);
    }
  }
  return out;
}

void check_assembly_input(const std::shared_ptr<const BoundaryMesh>& mesh, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("assemble: kappa must be positive and finite");
  }
  if (!mesh || mesh->size() == 0) throw MeshError("assemble: empty mesh");
  for (const auto& e : mesh->elements) {
    if (!(e.length > 0.0)) throw MeshError("assemble: zero-length element");
  }
}

// Fills the single-layer matrix S (Dirichlet unknown: layer density) and/or
// the Neumann matrix 1/2 - K acting on boundary values (direct formulation).
void fill_matrices(const BoundaryMesh& mesh, double kappa, const CollocationLayout& layout,
                   const BemOptions& options, Eigen::MatrixXd* dirichlet, Eigen::MatrixXd* neumann) {
  const int n = mesh.size();
  const auto rows = static_cast<Eigen::Index>(layout.points.size());
  if (dirichlet) dirichlet->setZero(rows, n);
  if (neumann) neumann->setZero(rows, n);

  std::vector<DensityPatch> patches(n);
  for (int j = 0; j < n; ++j) patches[j] = make_patch(mesh, j);

  const auto& rule8 = quad::gauss_legendre(options.far_gauss);
  const auto& rule4 = quad::gauss_legendre(std::min(4, options.far_gauss));

  for (int j = 0; j < n; ++j) {
    const auto& e = mesh.elements[j];
    const auto& patch = patches[j];
    const double reach = kNegligibleArgument / kappa + 0.5 * e.length;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Vec2 x = layout.points[i];
      const double d = distance(x, e.midpoint);
      if (d > reach) continue;
      Moments mv{};
      Moments mn{};
      if (d <= 2.0 * e.length) {
        if (dirichlet) mv = near_value_moments(e, x, kappa);
        if (neumann) mn = near_normal_moments(e, x, kappa, e.normal);
      } else {
        const auto& rule = far_points(e, d, options) == options.far_gauss ? rule8 : rule4;
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
          const double tau = 0.5 * rule.nodes[g];
          const double w = 0.5 * rule.weights[g] * e.length;
          const Vec2 dv = x - (e.midpoint + (tau * e.length) * e.tangent);
          const double r = norm(dv);
          const auto k = bessel_k01(kappa * r);
          const double v = w * kInv2Pi * k.k0;
          const double nd = -w * kInv2Pi * kappa * k.k1 * dot(dv, e.normal) / r;
          mv[0] += v;
          mv[1] += v * tau;
          mv[2] += v * tau * tau;
          mn[0] += nd;
          mn[1] += nd * tau;
          mn[2] += nd * tau * tau;
        }
      }
      if (dirichlet) scatter(patch, mv, &(*dirichlet)(i, 0), rows);
      if (neumann) scatter(patch, mn, &(*neumann)(i, 0), rows);
    }
  }

  if (neumann) {
    // mn holds -K u with K the double-layer operator (kernel d Phi / d n_y).
    // Green's identity on the vacuum side gives u/2 - K u = -S g.
    for (Eigen::Index i = 0; i < rows; ++i) {
      patch_point_weights(patches[layout.element[i]], layout.tau[i], 0.5, &(*neumann)(i, 0), rows);
    }
  }
}

}  // namespace

std::string to_string(Polarization p) { return p == Polarization::Dirichlet ? "dirichlet" : "neumann"; }

DensityPatch make_patch(const BoundaryMesh& mesh, int element) {
  const auto& e = mesh.elements.at(element);
  DensityPatch patch;
  std::array<double, 3> t{};
  patch.node[0] = element;
  t[0] = 0.0;
  patch.count = 1;
  if (e.prev >= 0) {
    patch.node[patch.count] = e.prev;
    t[patch.count++] = -0.5 * (mesh.elements[e.prev].length + e.length) / e.length;
  }
  if (e.next >= 0) {
    patch.node[patch.count] = e.next;
    t[patch.count++] = 0.5 * (mesh.elements[e.next].length + e.length) / e.length;
  }
  if (patch.count == 1) {
    patch.coeff[0] = {1.0, 0.0, 0.0};
  } else if (patch.count == 2) {
    // Linear fall-back at chain ends.
    for (int k = 0; k < 2; ++k) {
      const double other = t[1 - k];
      const double den = t[k] - other;
      patch.coeff[k] = {-other / den, 1.0 / den, 0.0};
    }
  } else {
    for (int k = 0; k < 3; ++k) {
      const double a = t[(k + 1) % 3];
      const double b = t[(k + 2) % 3];
      const double den = (t[k] - a) * (t[k] - b);
      patch.coeff[k] = {a * b / den, -(a + b) / den, 1.0 / den};
    }
  }
  return patch;
}

std::array<double, 3> element_moments(const Element& element, Vec2 target, double kappa,
                                      IntegralKind kind, Vec2 target_normal,
                                      const BemOptions& options) {
  if (!(kappa > 0.0)) throw DomainError("element_moments: kappa must be positive");
  // The double-layer kernel d Phi / d n_y is minus the target derivative
  // along the element normal.
  const bool dbl = kind == IntegralKind::DoubleLayer;
  const Vec2 n = dbl ? element.normal : target_normal;
  const double sign = dbl ? -1.0 : 1.0;
  if (is_near(element, target)) {
    if (kind == IntegralKind::Value) return near_value_moments(element, target, kappa);
    auto m = near_normal_moments(element, target, kappa, n);
    for (auto& v : m) v *= sign;
    return m;
  }
  const auto& rule = quad::gauss_legendre(options.far_gauss);
  Moments m{};
  for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
    const double tau = 0.5 * rule.nodes[g];
    const double w = 0.5 * rule.weights[g] * element.length;
    const Vec2 dv = target - (element.midpoint + (tau * element.length) * element.tangent);
    const double r = norm(dv);
    const auto k = bessel_k01(kappa * r);
    const double v = kind == IntegralKind::Value ? w * kInv2Pi * k.k0
                                                 : -sign * w * kInv2Pi * kappa * k.k1 * dot(dv, n) / r;
    m[0] += v;
    m[1] += v * tau;
    m[2] += v * tau * tau;
  }
  return m;
}

double element_integral(const Element& element, Vec2 target, double kappa, IntegralKind kind,
                        Vec2 target_normal) {
  return element_moments(element, target, kappa, kind, target_normal)[0];
}

AssembledSystem::AssembledSystem(std::shared_ptr<const BoundaryMesh> mesh, double kappa,
                                 Polarization pol, Eigen::MatrixXd matrix, std::vector<Vec2> points,
                                 std::vector<Vec2> normals, const BemOptions& options,
                                 Eigen::VectorXd row_weights,
                                 std::shared_ptr<const Eigen::MatrixXd> single_layer)
    : mesh_(std::move(mesh)),
      kappa_(kappa),
      pol_(pol),
      matrix_(std::move(matrix)),
      weights_(std::move(row_weights)),
      points_(std::move(points)),
      normals_(std::move(normals)),
      single_layer_(std::move(single_layer)) {
  if (pol_ == Polarization::Neumann && !single_layer_) {
    throw UsageError("AssembledSystem: the Neumann system needs the single-layer matrix");
  }
  if (weights_.size() > 0) {
    if (weights_.size() != matrix_.rows()) throw UsageError("AssembledSystem: row weight count mismatch");
    qr_.compute(weights_.asDiagonal() * matrix_);
  } else {
    qr_.compute(matrix_);
  }
  const auto diag = qr_.matrixQR().diagonal().cwiseAbs();
  const double dmax = diag.maxCoeff();
  const double dmin = diag.minCoeff();
  condition_ = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
  if (!(dmin > options.rank_tolerance * dmax)) {
    std::ostringstream msg;
    msg << "rank-deficient " << to_string(pol_) << " system at kappa=" << kappa_
        << " (condition estimate " << condition_ << ")";
    throw NumericError(msg.str());
  }
}

AssembledSystem assemble(std::shared_ptr<const BoundaryMesh> mesh, double kappa, Polarization pol,
                         const BemOptions& options) {
  if (pol == Polarization::Dirichlet) {
    check_assembly_input(mesh, kappa);
    auto layout = collocation_layout(*mesh, options.oversampling);
    Eigen::MatrixXd a;
    fill_matrices(*mesh, kappa, layout, options, &a, nullptr);
    Eigen::VectorXd w = options.weighted_rows ? layout.weights : Eigen::VectorXd();
    return AssembledSystem(std::move(mesh), kappa, pol, std::move(a), std::move(layout.points),
                           std::move(layout.normals), options, std::move(w));
  }
  // The Neumann right-hand side needs S as well.
  return std::move(assemble_both(std::move(mesh), kappa, options)[1]);
}

std::array<AssembledSystem, 2> assemble_both(std::shared_ptr<const BoundaryMesh> mesh, double kappa,
                                             const BemOptions& options) {
  check_assembly_input(mesh, kappa);
  auto layout = collocation_layout(*mesh, options.oversampling);
  Eigen::MatrixXd ad;
  Eigen::MatrixXd an;
  fill_matrices(*mesh, kappa, layout, options, &ad, &an);
  auto single = std::make_shared<const Eigen::MatrixXd>(ad);
  Eigen::VectorXd w = options.weighted_rows ? layout.weights : Eigen::VectorXd();
  return {AssembledSystem(mesh, kappa, Polarization::Dirichlet, std::move(ad), layout.points,
                          layout.normals, options, w),
          AssembledSystem(mesh, kappa, Polarization::Neumann, std::move(an), layout.points,
                          layout.normals, options, w, single)};
}

RhsSet make_source_rhs(const AssembledSystem& system, const std::vector<Vec2>& sources,
                       bool with_source_derivatives) {
  RhsSet out;
  out.sources = sources;
  out.with_dipoles = with_source_derivatives;
  const int per = out.columns_per_source();
  const auto& pts = system.collocation_points();
  const auto rows = static_cast<Eigen::Index>(pts.size());
  const auto cols = static_cast<Eigen::Index>(sources.size()) * per;
  const double kappa = system.kappa();
  for (const auto& src : sources) {
    for (const auto& x : pts) {
      if (distance(x, src) == 0.0) throw DomainError("make_source_rhs: source lies on the boundary");
    }
  }
  if (system.polarization() == Polarization::Dirichlet) {
    out.columns.resize(rows, cols);
    const int order = with_source_derivatives ? 1 : 0;
    for (std::size_t p = 0; p < sources.size(); ++p) {
      const Eigen::Index c = static_cast<Eigen::Index>(p) * per;
      for (Eigen::Index i = 0; i < rows; ++i) {
        // Kernel derivatives are taken w.r.t. the collocation point x; the
        // source derivative is minus the target derivative.
        const KernelValues k = kernel(kappa, sources[p], pts[i], order);
        out.columns(i, c) = -k.phi;
        if (with_source_derivatives) {
          out.columns(i, c + 1) = k.grad.x;
          out.columns(i, c + 2) = k.grad.y;
        }
      }
    }
    return out;
  }

  // Neumann: g = dn g_ren = -dn Phi(y - source) sampled at element midpoints,
  // interpolated by the density patches; the system rhs is -S g.
  const auto& mesh = system.mesh();
  const int n = mesh.size();
  out.boundary_flux.resize(n, cols);
  const int order = with_source_derivatives ? 2 : 1;
  for (std::size_t p = 0; p < sources.size(); ++p) {
    const Eigen::Index c = static_cast<Eigen::Index>(p) * per;
    for (int j = 0; j < n; ++j) {
      const auto& e = mesh.elements[j];
      if (distance(e.midpoint, sources[p]) == 0.0) throw DomainError("make_source_rhs: source lies on the boundary");
      const KernelValues k = kernel(kappa, sources[p], e.midpoint, order);
      const Vec2 nn = e.normal;
      out.boundary_flux(j, c) = -dot(k.grad, nn);
      if (with_source_derivatives) {
        out.boundary_flux(j, c + 1) = k.hess[0] * nn.x + k.hess[1] * nn.y;
        out.boundary_flux(j, c + 2) = k.hess[2] * nn.x + k.hess[3] * nn.y;
      }
    }
  }
  out.columns = -(system.single_layer() * out.boundary_flux);
  return out;
}

double LayerSolution::max_relative_residual() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < residual_norm.size(); ++k) {
    if (rhs_norm[k] > 0.0) worst = std::max(worst, residual_norm[k] / rhs_norm[k]);
  }
  return worst;
}

namespace {

Eigen::MatrixXd solve_impl(const AssembledSystem& system, const Eigen::MatrixXd& rhs,
                           std::vector<double>* residual, std::vector<double>* rhs_norm) {
  if (rhs.rows() != system.rows()) {
    throw UsageError("solve: right-hand side has " + std::to_string(rhs.rows()) + " rows, system has " +
                     std::to_string(system.rows()));
  }
  const auto& qr = system.factorization();
  const Eigen::Index n = system.cols();
  const auto& w = system.row_weights();
  Eigen::MatrixXd qtb = w.size() > 0 ? Eigen::MatrixXd(qr.householderQ().transpose() * (w.asDiagonal() * rhs))
                                     : Eigen::MatrixXd(qr.householderQ().transpose() * rhs);
  Eigen::MatrixXd x = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>().solve(qtb.topRows(n));
  if (residual) {
    residual->resize(rhs.cols());
    rhs_norm->resize(rhs.cols());
    for (Eigen::Index k = 0; k < rhs.cols(); ++k) {
      (*residual)[k] = qtb.col(k).tail(qtb.rows() - n).norm();
      (*rhs_norm)[k] = w.size() > 0 ? w.cwiseProduct(rhs.col(k)).norm() : rhs.col(k).norm();
    }
  }
  return x;
}

}  // namespace

Eigen::MatrixXd solve_columns(const AssembledSystem& system, const Eigen::MatrixXd& rhs) {
  return solve_impl(system, rhs, nullptr, nullptr);
}

LayerSolution solve(const AssembledSystem& system, const RhsSet& rhs) {
  LayerSolution out;
  out.densities = solve_impl(system, rhs.columns, &out.residual_norm, &out.rhs_norm);
  out.boundary_flux = rhs.boundary_flux;
  out.sources = rhs.sources;
  out.with_dipoles = rhs.with_dipoles;
  out.kappa = system.kappa();
  out.pol = system.polarization();
  out.mesh = system.mesh_ptr();
  return out;
}

EvaluationRow evaluation_row(const BoundaryMesh& mesh, double kappa, Vec2 target, int order,
                             const BemOptions& options) {
  if (!(kappa > 0.0)) throw DomainError("evaluation_row: kappa must be positive");
  const int n = mesh.size();
  EvaluationRow row;
  const int fields = order >= 1 ? 3 : 1;
  for (int f = 0; f < fields; ++f) {
    row.single[f] = Eigen::RowVectorXd::Zero(n);
    row.dbl[f] = Eigen::RowVectorXd::Zero(n);
  }
  for (int j = 0; j < n; ++j) {
    const auto& e = mesh.elements[j];
    const double d = distance(target, e.midpoint);
    if (d > kNegligibleArgument / kappa + 0.5 * e.length) continue;
    // Single layer Phi, its target gradient, the double layer
    // dPhi/dn_y = -grad Phi . n_y and its target gradient -H n_y.
    std::array<Moments, 6> m{};
    auto kernels = [&](Vec2 y) {
      const Vec2 dv = target - y;
      const double r = norm(dv);
      if (r == 0.0) throw DomainError("eval_green: target lies on the boundary");
      const auto k = bessel_k01(kappa * r);
      const double phi = kInv2Pi * k.k0;
      const double d1 = -kInv2Pi * kappa * k.k1;                          // Phi'
      const double d2 = kInv2Pi * kappa * kappa * (k.k0 + k.k1 / (kappa * r));  // Phi''
      const Vec2 u = (1.0 / r) * dv;
      const Vec2 nn = e.normal;
      const double un = dot(u, nn);
      // H n = (Phi'' - Phi'/r) u (u.n) + (Phi'/r) n
      const double radial = (d2 - d1 / r) * un;
      const Vec2 hn = radial * u + (d1 / r) * nn;
      return std::array<double, 6>{phi, d1 * u.x, d1 * u.y, -d1 * un, -hn.x, -hn.y};
    };
    if (d <= 2.0 * e.length) {
      const auto [p, q] = local_frame(e, target);
      const double s_star = std::clamp(p, -0.5 * e.length, 0.5 * e.length);
      const double gap = std::max(std::abs(q), std::abs(p) - 0.5 * e.length);
      graded_moments(e.length, s_star, std::max(0.5 * gap, 1e-9 * e.length),
                     [&](double s) { return kernels(e.midpoint + s * e.tangent); }, m);
    } else {
      const auto& rule = quad::gauss_legendre(far_points(e, d, options));
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double tau = 0.5 * rule.nodes[g];
        const double w = 0.5 * rule.weights[g] * e.length;
        const auto k = kernels(e.midpoint + (tau * e.length) * e.tangent);
        for (int c = 0; c < 6; ++c) {
          m[c][0] += w * k[c];
          m[c][1] += w * k[c] * tau;
          m[c][2] += w * k[c] * tau * tau;
        }
      }
    }
    const auto patch = make_patch(mesh, j);
    for (int f = 0; f < fields; ++f) {
      scatter(patch, m[f], row.single[f]);
      scatter(patch, m[3 + f], row.dbl[f]);
    }
  }
  return row;
}

std::array<double, 3> apply_row(const EvaluationRow& row, const LayerSolution& solution, Eigen::Index column) {
  if (column < 0 || column >= solution.densities.cols()) throw UsageError("apply_row: column out of range");
  std::array<double, 3> out{};
  const auto u = solution.densities.col(column);
  const int fields = row.single[1].size() > 0 ? 3 : 1;
  for (int f = 0; f < fields; ++f) {
    if (solution.pol == Polarization::Dirichlet) {
      out[f] = row.single[f].dot(u);
    } else {
      out[f] = row.dbl[f].dot(u) - row.single[f].dot(solution.boundary_flux.col(column));
    }
  }
  return out;
}

GreenDerivatives eval_green(const LayerSolution& solution, int source_index, Vec2 target, int order,
                            const BemOptions& options) {
  if (!solution.mesh) throw UsageError("eval_green: solution has no mesh");
  const int per = solution.with_dipoles ? 3 : 1;
  if (source_index < 0 || source_index * per >= solution.densities.cols()) {
    throw UsageError("eval_green: source index out of range");
  }
  if (order >= 2 && !solution.with_dipoles) {
    throw UsageError("eval_green: mixed derivatives need dipole right-hand sides");
  }
  const auto row = evaluation_row(*solution.mesh, solution.kappa, target, std::min(order, 1), options);
  const Eigen::Index c = static_cast<Eigen::Index>(source_index) * per;
  GreenDerivatives out;
  const auto f0 = apply_row(row, solution, c);
  out.value = f0[0];
  if (order >= 1) out.grad_target = {f0[1], f0[2]};
  if (order >= 2) {
    const auto fx = apply_row(row, solution, c + 1);
    const auto fy = apply_row(row, solution, c + 2);
    out.mixed = std::array<double, 4>{fx[1], fx[2], fy[1], fy[2]};
  }
  return out;
}

}  // namespace casimir
