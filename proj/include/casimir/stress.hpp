#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "casimir/bem.hpp"
#include "casimir/geometry.hpp"

namespace casimir {

// Prefactor turning the coincident-point derivative combinations of g_ren
// into force-density integrands (hbar = c = 1):
//
//   f_n   = (1/a) int_0^inf kappa dkappa int_period s_n   dy
//   s_n   = C [d_ux d_vx - d_uy d_vy - kappa^2] g_ren(v; u)|_{u=v}
//   s_tau = C [d_ux d_vy + d_uy d_vx]          g_ren(v; u)|_{u=v}
//
// The Euclidean two-point function of each scalar mode is
// int dmu dq / (2 pi)^2 e^{i mu dt + i q dz} g(kappa), kappa^2 = mu^2 + q^2.
// T_xx = (1/2)[d_x d_x' - d_y d_y' - d_z d_z' - d_t d_t'] and
// T_xy = (1/2)[d_x d_y' + d_y d_x'] acting on it give the same 1/(4 pi)
// after the angular integral in the (mu, q) plane. f_n = -<T_xx> is the
// attraction and f_tau = -<T_xy> the y-force on the lower plate, hence the
// sign. Flat Dirichlet plates reproduce pi^2/(480 b^4) with this value.
inline constexpr double kStressConstant = -0.07957747154594767;  // -1 / (4 pi)

// Quadrature in kappa over (kappa_min, kappa_max) with the rational map
// kappa = scale * u / (1 - u) and Gauss-Legendre nodes in u.
struct SpectralGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double scale = 1.0;
  std::string transform = "rational";

  int size() const { return static_cast<int>(nodes.size()); }
};

// Throws ConfigError for n < 1, scale <= 0 or an empty interval.
SpectralGrid make_spectral_grid(int n, double scale, double kappa_min, double kappa_max);

struct StressNumerics {
  double density = 20.0;  // elements per unit boundary length
  int n_buffer = 16;      // extra periods on each side of the evaluation period
  int n_y = 64;           // nodes on W per period
  int spectral_nodes = 16;
  double kappa_min = 1e-4;
  double kappa_max = 0.0;  // 0: 30 / b, where exp(-2 kappa b) < 1e-26
  int oversampling = 2;
  // Mesh coarsening beyond fine_periods / 2 + 1/2 periods from the centre.
  double grading = 0.5;
  double fine_periods = 3.0;
  int corner_levels = 4;
  double arc_factor = 4.0;  // density multiplier on fillet arcs
  std::optional<double> x_w;  // default b / 2
  bool estimate_error = true;
  int workers = 1;

  double line_position(const GearConfig& g) const { return x_w.value_or(0.5 * g.b); }
  MeshGrading mesh_grading(const GearConfig& g) const {
    MeshGrading m{grading, 0.5 * fine_periods * g.a, corner_levels};
    m.arc_factor = arc_factor;
    return m;
  }
  double resolved_kappa_max(const GearConfig& g) const { return kappa_max > 0.0 ? kappa_max : 30.0 / g.b; }
  // Throws ConfigError on non-positive parameters.
  void validate() const;
};

SpectralGrid make_spectral_grid(const GearConfig& config, const StressNumerics& numerics);

struct StressSample {
  double y = 0.0;
  double kappa = 0.0;
  Polarization pol = Polarization::Dirichlet;
  double s_n = 0.0;
  double s_tau = 0.0;
};

// Throws UsageError when `green` lacks the mixed derivatives.
StressSample stress_kernels(Vec2 u, double kappa, Polarization pol, const GreenDerivatives& green);

struct PeriodIntegrals {
  double normal = 0.0;
  double tangential = 0.0;
};

// y nodes on W: midpoints of n_y equal cells of the central period.
std::vector<Vec2> stress_line_nodes(const GearConfig& config, const StressNumerics& numerics);

// Integrals of s_n and s_tau over one period of W at one kappa, both
// polarizations from one assembly. Throws DomainError when W touches a plate.
std::array<PeriodIntegrals, 2> integrate_period_both(const std::shared_ptr<const BoundaryMesh>& mesh,
                                                     const GearConfig& config, double kappa,
                                                     const StressNumerics& numerics);

PeriodIntegrals integrate_period(const GearConfig& config, double kappa, Polarization pol,
                                 const StressNumerics& numerics);

struct ForceDensity {
  double f_n = 0.0;
  double f_tau = 0.0;
  // max(|df_n|, |df_tau|) / f_n against a run with half the mesh density and
  // three quarters of the spectral nodes; 0 when not requested.
  double err_estimate = 0.0;
  std::array<double, 2> f_n_pol{};  // Dirichlet, Neumann
  std::array<double, 2> f_tau_pol{};
  double wall_time_s = 0.0;
};

// Per-kappa values behind a force density, mainly for diagnostics.
struct SpectralSample {
  double kappa = 0.0;
  double weight = 0.0;
  std::array<PeriodIntegrals, 2> integrals{};
};

ForceDensity integrate_kappa(const GearConfig& config, const SpectralGrid& grid,
                             const StressNumerics& numerics,
                             std::vector<SpectralSample>* samples = nullptr);

// integrate_kappa with the default grid for the configuration.
ForceDensity compute_force(const GearConfig& config, const StressNumerics& numerics);

// Flat plates through the same kappa machinery, with the closed-form
// parallel-plate Green function instead of the boundary solver. nullopt
// sums both polarizations.
double flat_force(double b, std::optional<Polarization> pol, const SpectralGrid& grid);
double flat_force(double b, std::optional<Polarization> pol = std::nullopt);

}  // namespace casimir
