#include "casimir/stress.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {
namespace {

constexpr double kInv2Pi = 0.15915494309189535;

BemOptions bem_options(const StressNumerics& numerics) {
  BemOptions opt;
  opt.oversampling = numerics.oversampling;
  return opt;
}

// Runs task(i) for i in [0, count) on `workers` threads. Each task writes
// its own slot, so the outcome does not depend on the schedule.
template <class Task>
void parallel_for(int count, int workers, Task&& task) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct KappaTask {
  const std::shared_ptr<const BoundaryMesh>* mesh;
  const StressNumerics* numerics;
  double kappa;
  double weight;
  std::array<PeriodIntegrals, 2> result{};
};

ForceDensity reduce(const GearConfig& g, const std::vector<KappaTask>& tasks, std::size_t begin,
                    std::size_t end) {
  ForceDensity f;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = tasks[i];
    for (int p = 0; p < 2; ++p) {
      f.f_n_pol[p] += t.weight * t.kappa * t.result[p].normal;
      f.f_tau_pol[p] += t.weight * t.kappa * t.result[p].tangential;
    }
  }
  for (int p = 0; p < 2; ++p) {
    f.f_n_pol[p] /= g.a;
    f.f_tau_pol[p] /= g.a;
  }
  f.f_n = f.f_n_pol[0] + f.f_n_pol[1];
  f.f_tau = f.f_tau_pol[0] + f.f_tau_pol[1];
  return f;
}

}  // namespace

void StressNumerics::validate() const {
  auto fail = [](const std::string& key) { throw ConfigError("numerics." + key + " must be positive"); };
  if (!(density > 0.0)) fail("density");
  if (n_buffer < 0) throw ConfigError("numerics.n_buffer must be non-negative");
  if (n_y < 1) fail("n_y");
  if (spectral_nodes < 1) fail("spectral_nodes");
  if (!(kappa_min > 0.0)) fail("kappa_min");
  if (kappa_max < 0.0) fail("kappa_max");
  if (oversampling < 1) fail("oversampling");
  if (workers < 1) fail("workers");
  if (!(grading >= 0.0)) throw ConfigError("numerics.grading must be non-negative");
  if (!(fine_periods >= 1.0)) throw ConfigError("numerics.fine_periods must be at least 1");
  if (corner_levels < 0) throw ConfigError("numerics.corner_levels must be non-negative");
  if (!(arc_factor > 0.0)) fail("arc_factor");
}

SpectralGrid make_spectral_grid(int n, double scale, double kappa_min, double kappa_max) {
  if (n < 1) throw ConfigError("spectral grid needs at least one node");
  if (!(scale > 0.0)) throw ConfigError("spectral grid scale must be positive");
  if (!(kappa_min >= 0.0) || !(kappa_max > kappa_min)) {
    throw ConfigError("spectral grid needs 0 <= kappa_min < kappa_max");
  }
  SpectralGrid grid;
  grid.kappa_min = kappa_min;
  grid.kappa_max = kappa_max;
  grid.scale = scale;
  const double u_lo = kappa_min / (scale + kappa_min);
  const double u_hi = std::isinf(kappa_max) ? 1.0 : kappa_max / (scale + kappa_max);
  const auto& rule = quad::gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    const double u = u_lo + 0.5 * (u_hi - u_lo) * (rule.nodes[i] + 1.0);
    const double jac = scale / ((1.0 - u) * (1.0 - u));
    grid.nodes.push_back(scale * u / (1.0 - u));
    grid.weights.push_back(0.5 * (u_hi - u_lo) * rule.weights[i] * jac);
  }
  return grid;
}

SpectralGrid make_spectral_grid(const GearConfig& config, const StressNumerics& numerics) {
  return make_spectral_grid(numerics.spectral_nodes, 1.0 / config.b, numerics.kappa_min,
                            numerics.resolved_kappa_max(config));
}

StressSample stress_kernels(Vec2 u, double kappa, Polarization pol, const GreenDerivatives& green) {
  if (!green.mixed) throw UsageError("stress_kernels: mixed source/target derivatives missing");
  const auto& m = *green.mixed;  // {ux vx, ux vy, uy vx, uy vy}
  StressSample s;
  s.y = u.y;
  s.kappa = kappa;
  s.pol = pol;
  s.s_n = kStressConstant * (m[0] - m[3] - kappa * kappa * green.value);
  s.s_tau = kStressConstant * (m[1] + m[2]);
  return s;
}

std::vector<Vec2> stress_line_nodes(const GearConfig& config, const StressNumerics& numerics) {
  const GearConfig g = config.validated();
  const double x = numerics.line_position(g);
  if (!(x > 0.0 && x < g.b)) {
    std::ostringstream msg;
    msg << "stress line x_W = " << x << " must lie strictly inside the gap (0, " << g.b << ")";
    throw DomainError(msg.str());
  }
  if (numerics.n_y < 1) throw ConfigError("numerics.n_y must be positive");
  std::vector<Vec2> nodes;
  nodes.reserve(numerics.n_y);
  for (int p = 0; p < numerics.n_y; ++p) {
    nodes.push_back({x, -0.5 * g.a + (p + 0.5) * g.a / numerics.n_y});
  }
  return nodes;
}

std::array<PeriodIntegrals, 2> integrate_period_both(const std::shared_ptr<const BoundaryMesh>& mesh,
                                                     const GearConfig& config, double kappa,
                                                     const StressNumerics& numerics) {
  const GearConfig g = config.validated();
  const auto nodes = stress_line_nodes(g, numerics);
  const BemOptions opt = bem_options(numerics);
  auto systems = assemble_both(mesh, kappa, opt);

  std::array<LayerSolution, 2> solutions;
  for (int p = 0; p < 2; ++p) {
    solutions[p] = solve(systems[p], make_source_rhs(systems[p], nodes, true));
  }

  const double dy = g.a / static_cast<double>(nodes.size());
  std::array<PeriodIntegrals, 2> out{};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto row = evaluation_row(*mesh, kappa, nodes[k], 1, opt);
    for (int p = 0; p < 2; ++p) {
      const Eigen::Index c = 3 * static_cast<Eigen::Index>(k);
      const auto f0 = apply_row(row, solutions[p], c);
      const auto fx = apply_row(row, solutions[p], c + 1);
      const auto fy = apply_row(row, solutions[p], c + 2);
      GreenDerivatives green;
      green.value = f0[0];
      green.mixed = std::array<double, 4>{fx[1], fx[2], fy[1], fy[2]};
      const auto sample = stress_kernels(nodes[k], kappa, static_cast<Polarization>(p), green);
      out[p].normal += dy * sample.s_n;
      out[p].tangential += dy * sample.s_tau;
    }
  }
  return out;
}

PeriodIntegrals integrate_period(const GearConfig& config, double kappa, Polarization pol,
                                 const StressNumerics& numerics) {
  numerics.validate();
  const GearConfig g = config.validated();
  auto mesh = std::make_shared<const BoundaryMesh>(build_mesh(g, numerics.density, numerics.n_buffer, numerics.mesh_grading(g)));
  return integrate_period_both(mesh, g, kappa, numerics)[static_cast<int>(pol)];
}

ForceDensity integrate_kappa(const GearConfig& config, const SpectralGrid& grid,
                             const StressNumerics& numerics, std::vector<SpectralSample>* samples) {
  const auto start = std::chrono::steady_clock::now();
  numerics.validate();
  const GearConfig g = config.validated();
  // Fail early on a bad stress line.
  stress_line_nodes(g, numerics);

  auto mesh = std::make_shared<const BoundaryMesh>(build_mesh(g, numerics.density, numerics.n_buffer, numerics.mesh_grading(g)));
  std::shared_ptr<const BoundaryMesh> coarse_mesh;
  SpectralGrid coarse_grid;
  if (numerics.estimate_error) {
    coarse_mesh = std::make_shared<const BoundaryMesh>(build_mesh(g, 0.5 * numerics.density, numerics.n_buffer, numerics.mesh_grading(g)));
    coarse_grid = make_spectral_grid(std::max(4, (3 * grid.size()) / 4), grid.scale, grid.kappa_min, grid.kappa_max);
  }

  std::vector<KappaTask> tasks;
  for (int i = 0; i < grid.size(); ++i) tasks.push_back({&mesh, &numerics, grid.nodes[i], grid.weights[i]});
  const std::size_t main_count = tasks.size();
  for (int i = 0; i < coarse_grid.size(); ++i) {
    tasks.push_back({&coarse_mesh, &numerics, coarse_grid.nodes[i], coarse_grid.weights[i]});
  }

  parallel_for(static_cast<int>(tasks.size()), numerics.workers, [&](int i) {
    auto& t = tasks[i];
    try {
      t.result = integrate_period_both(*t.mesh, g, t.kappa, *t.numerics);
    } catch (const NumericError& e) {
      std::ostringstream msg;
      msg << "kappa=" << t.kappa << ": " << e.what();
      throw NumericError(msg.str());
    }
  });

  ForceDensity f = reduce(g, tasks, 0, main_count);
  if (numerics.estimate_error) {
    const ForceDensity c = reduce(g, tasks, main_count, tasks.size());
    const double scale = std::abs(f.f_n) > 0.0 ? std::abs(f.f_n) : 1.0;
    f.err_estimate = std::max(std::abs(f.f_n - c.f_n), std::abs(f.f_tau - c.f_tau)) / scale;
  }
  if (samples) {
    samples->clear();
    for (std::size_t i = 0; i < main_count; ++i) samples->push_back({tasks[i].kappa, tasks[i].weight, tasks[i].result});
  }
  f.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return f;
}

ForceDensity compute_force(const GearConfig& config, const StressNumerics& numerics) {
  const GearConfig g = config.validated();
  return integrate_kappa(g, make_spectral_grid(g, numerics), numerics);
}

double flat_force(double b, std::optional<Polarization> pol, const SpectralGrid& grid) {
  if (!(b > 0.0)) throw DomainError("flat_force: gap must be positive");
  // Transverse wavenumber k along y; gamma^2 = kappa^2 + k^2. For both
  // closed-form parallel-plate Green functions the coincident combination
  // [d_x d_x' - gamma^2] g_ren is -gamma (coth(gamma b) - 1), independent of
  // the position in the gap.
  const SpectralGrid transverse = make_spectral_grid(64, 1.0 / b, 0.0, 60.0 / b);
  double total = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double kappa = grid.nodes[i];
    double line = 0.0;
    for (int j = 0; j < transverse.size(); ++j) {
      const double k = transverse.nodes[j];
      const double gamma = std::hypot(kappa, k);
      const double combo = -2.0 * gamma / std::expm1(2.0 * gamma * b);
      // Even in k: int_R dk / 2pi = (1/pi) int_0^inf dk.
      line += transverse.weights[j] * combo * 2.0 * kInv2Pi;
    }
    total += grid.weights[i] * kappa * kStressConstant * line;
  }
  return pol ? total : 2.0 * total;
}

double flat_force(double b, std::optional<Polarization> pol) {
  GearConfig g;
  g.b = b;
  g.h = 0.0;
  StressNumerics numerics;
  return flat_force(b, pol, make_spectral_grid(g, numerics));
}

}  // namespace casimir
