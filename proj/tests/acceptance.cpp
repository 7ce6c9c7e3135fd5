// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "casimir/pfa.hpp"
#include "casimir/reference.hpp"
#include "casimir/runner.hpp"
#include "casimir/stress.hpp"

using namespace casimir;

namespace {

constexpr double kFlat = 0.0411233516712056609;

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("criterion %d %s: %s  %s\n", id, title.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

GearConfig rack(double s, EdgeSpec edge = {}) {
  GearConfig g;
  g.a = 2.0;
  g.h = 0.5;
  g.b = 1.0;
  g.s = s;
  g.edge = edge;
  return g;
}

// Default numerics, memoized by a label so shared points run once.
std::map<std::string, ForceDensity> cache;

ForceDensity force(const std::string& label, const GearConfig& g, const StressNumerics& n = {}) {
  auto it = cache.find(label);
  if (it != cache.end()) return it->second;
  const auto f = compute_force(g, n);
  std::printf("  [%s] f_n=%.8g f_tau=%.6g err=%.2g t=%.1fs\n", label.c_str(), f.f_n, f.f_tau, f.err_estimate,
              f.wall_time_s);
  std::fflush(stdout);
  cache[label] = f;
  return f;
}

void criterion1() {
  GearConfig g = rack(0.0);
  g.h = 0.0;
  const auto f = force("flat", g);
  const bool ok = rel(f.f_n, kFlat) <= 1e-4 && std::abs(f.f_tau) <= 1e-6 && f.wall_time_s <= 60.0;
  report(1, "flat calibration", ok,
         fmt("f_n=%.9f", f.f_n) + fmt(" rel=%.2e", rel(f.f_n, kFlat)) + fmt(" f_tau=%.1e", f.f_tau) +
             fmt(" time=%.1fs", f.wall_time_s));
}

void criterion2() {
  const auto f = force("rect s=0", rack(0.0));
  const bool ok = rel(f.f_n, 0.0124) <= 0.02 && std::abs(f.f_tau) <= 1e-5 && f.wall_time_s <= 600.0;
  report(2, "rectangular rack s=0", ok,
         fmt("f_n=%.6f", f.f_n) + fmt(" (target 0.0124, rel=%.3f)", rel(f.f_n, 0.0124)) + fmt(" f_tau=%.1e", f.f_tau) +
             fmt(" time=%.1fs", f.wall_time_s));
}

void criterion3() {
  const auto c = force("chamfer 0.08 s=0", rack(0.0, EdgeSpec::chamfer(0.08)));
  const auto f = force("fillet 0.08 s=0", rack(0.0, EdgeSpec::fillet(0.08)));
  const bool ok = rel(c.f_n, 0.0121) <= 0.03 && rel(f.f_n, 0.0121) <= 0.03;
  report(3, "edge variants s=0 size 0.08", ok,
         fmt("chamfer f_n=%.6f", c.f_n) + fmt(" fillet f_n=%.6f", f.f_n) + " (target 0.0121)");
}

void criterion4() {
  const double sizes[] = {0.0, 0.04, 0.08, 0.12};
  const double target[] = {0.00178, 0.00153, 0.00129, 0.00110};
  bool ok = true;
  std::string detail;
  double prev = INFINITY;
  for (int i = 0; i < 4; ++i) {
    const auto g = sizes[i] == 0.0 ? rack(0.6) : rack(0.6, EdgeSpec::chamfer(sizes[i]));
    const auto f = force(sizes[i] == 0.0 ? "rect s=0.6" : fmt("chamfer %.2f s=0.6", sizes[i]), g);
    ok = ok && rel(f.f_tau, target[i]) <= 0.03 && f.f_tau < prev;
    prev = f.f_tau;
    detail += fmt(" L=%.2f:", sizes[i]) + fmt("%.6f", f.f_tau) + fmt("/%.5f", target[i]);
  }
  report(4, "tangential table (measured/target)", ok, detail);
}

void criterion5() {
  const auto r = force("rect s=0.6", rack(0.6));
  const auto f = force("fillet 0.14 s=0.6", rack(0.6, EdgeSpec::fillet(0.14)));
  const double ratio = f.f_tau / r.f_tau;
  report(5, "fillet 0.14 shape dependence", ratio >= 0.1 && ratio <= 1.0 / 6.0,
         fmt("f_tau ratio fillet/rect=%.4f", ratio) + " (target [0.1, 0.1667], 1/8 quoted)");
}

void criterion6() {
  // mpmath, 30 digits.
  const double oracle_rect = 0.010923390287664003680;
  const double oracle_chamfer = 0.010528841715500231768;
  const double oracle_fillet = 0.010739349897549267105;
  const auto r = pfa::pfa_rect(2, 0.5, 1).f_pfa;
  const auto a = pfa::pfa_chamfer(2, 0.5, 1, 0.08).f_pfa;
  const auto b = pfa::pfa_fillet(2, 0.5, 1, 0.08).f_pfa;
  const bool formulas = rel(r, oracle_rect) <= 1e-8 && rel(a, oracle_chamfer) <= 1e-8 && rel(b, oracle_fillet) <= 1e-8;
  // Normalization with the published rectangular f_n, as in the comparison
  // being reproduced; the values with this solver's f_n are printed as well.
  const double na = pfa::normalize(0.0124, r, a);
  const double nb = pfa::normalize(0.0124, r, b);
  const bool normalized = rel(na, 0.0115) <= 0.10 && rel(nb, 0.0111) <= 0.10;
  const auto bem = force("rect s=0", rack(0.0));
  report(6, "PFA", formulas && normalized,
         fmt("formula rel err max=%.1e", std::max({rel(r, oracle_rect), rel(a, oracle_chamfer), rel(b, oracle_fillet)})) +
             fmt(" N*f_A=%.5f", na) + fmt(" (0.0115, dev %.1f%%)", 100 * rel(na, 0.0115)) + fmt(" N*f_B=%.5f", nb) +
             fmt(" (0.0111, dev %.1f%%)", 100 * rel(nb, 0.0111)) +
             fmt("; with BEM f_n: A=%.5f", pfa::normalize(bem.f_n, r, a)) + fmt(" B=%.5f", pfa::normalize(bem.f_n, r, b)));
}

void criterion7() {
  bool ok = true;
  std::string detail;
  auto check = [&](const std::string& name, bool pass, const std::string& info) {
    std::printf("  7.%s: %s %s\n", name.c_str(), pass ? "ok" : "FAILED", info.c_str());
    std::fflush(stdout);
    ok = ok && pass;
    if (!pass) detail += " " + name;
  };

  const auto p = force("rect s=0.6", rack(0.6));
  const auto m = force("rect s=1.4", rack(1.4));
  const auto z = force("rect s=0", rack(0.0));
  const auto h = force("rect s=1", rack(1.0));
  const double tol_pm = 2.0 * std::max(p.err_estimate, m.err_estimate);
  check("f_n symmetric", rel(m.f_n, p.f_n) <= tol_pm, fmt("rel diff %.2e", rel(m.f_n, p.f_n)) + fmt(" tol %.2e", tol_pm));
  check("f_tau antisymmetric about a/2", std::abs(p.f_tau + m.f_tau) <= tol_pm * p.f_n,
        fmt("|f(s)+f(a-s)|=%.2e", std::abs(p.f_tau + m.f_tau)) + fmt(" tol %.2e", tol_pm * p.f_n));
  check("f_tau(0)=0", std::abs(z.f_tau) <= 2.0 * z.err_estimate * z.f_n, fmt("%.2e", z.f_tau));
  check("f_tau(a/2)=0", std::abs(h.f_tau) <= 2.0 * h.err_estimate * h.f_n, fmt("%.2e", h.f_tau));

  // Geometrically similar meshes: density and grading rate scale with 1/lambda.
  const auto g1 = rack(0.6, EdgeSpec::chamfer(0.08));
  const auto f1 = force("chamfer 0.08 s=0.6", g1);
  StressNumerics n2;
  n2.density /= 2.0;
  n2.grading /= 2.0;
  const auto f2 = force("chamfer 0.08 s=0.6 x2", g1.scaled(2.0), n2);
  const double tol_l = std::max(f1.err_estimate, f2.err_estimate);
  check("lambda^-4 scaling", rel(16.0 * f2.f_n, f1.f_n) <= tol_l && std::abs(16.0 * f2.f_tau - f1.f_tau) <= tol_l * f1.f_n,
        fmt("rel f_n %.2e", rel(16.0 * f2.f_n, f1.f_n)) + fmt(" rel f_tau %.2e", rel(16.0 * f2.f_tau, f1.f_tau)) +
            fmt(" tol %.2e", tol_l));

  StressNumerics nw;
  nw.estimate_error = false;
  double worst = 0.0;
  for (double x : {0.3, 0.7}) {
    nw.x_w = x;
    const auto f = force(fmt("rect s=0.6 x_w=%.1f", x), rack(0.6), nw);
    worst = std::max({worst, rel(f.f_n, p.f_n), rel(f.f_tau, p.f_tau)});
  }
  check("W-line independence", worst <= 1e-3, fmt("max rel %.2e", worst));

  double oracle = 0.0;
  for (double kappa : {0.5, 1.0, 3.0}) {
    for (const auto& c : check_image_oracle(kappa, 20.0)) oracle = std::max(oracle, c.error);
    for (const auto& c : check_parallel_oracle(kappa, 1.0, 20.0)) oracle = std::max(oracle, c.error);
  }
  check("BEM vs image/1D oracles", oracle <= 1e-4, fmt("max rel %.2e", oracle));

  StressNumerics nd;
  nd.density *= 2.0;
  nd.estimate_error = false;
  const auto d = force("rect s=0.6 density x2", rack(0.6), nd);
  const double dd = std::max(rel(d.f_n, p.f_n), rel(d.f_tau, p.f_tau));
  check("density doubling", dd <= 1e-3, fmt("max rel change %.2e", dd));

  report(7, "property suite", ok, ok ? "all properties hold" : "failed:" + detail);
}

void criterion8() {
  StressNumerics n;
  n.density = 10.0;
  n.n_buffer = 4;
  n.spectral_nodes = 8;
  n.estimate_error = false;
  const auto g = rack(0.6, EdgeSpec::fillet(0.08));
  std::vector<ForceDensity> runs;
  for (int w : {1, 2, 4}) {
    n.workers = w;
    runs.push_back(compute_force(g, n));
  }
  double worst = 0.0;
  for (const auto& r : runs) worst = std::max({worst, rel(r.f_n, runs[0].f_n), rel(r.f_tau, runs[0].f_tau)});
  report(8, "determinism across workers 1/2/4", worst <= 1e-12, fmt("max rel diff %.1e", worst));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance: %d of 8 criteria failed (%.0fs)\n", failures, t);
  return failures == 0 ? 0 : 1;
}
