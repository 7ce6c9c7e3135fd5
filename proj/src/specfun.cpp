#include "casimir/specfun.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "casimir/error.hpp"

namespace casimir {
namespace {

// Chebyshev expansions generated by tools/gen_bessel_tables.py (50-digit
// reference values, truncated at 1e-19 relative).
// clang-format off
constexpr std::array<double, 10> kI0Small = {
    1.6029228068079633154,
    6.3880962565117701084e-1,
    3.6854859694361757994e-2,
    9.8287812725147983206e-4,
    1.4983654208927292747e-5,
    1.4738449008423846976e-7,
    1.0114797900674825495e-9,
    5.1149979020112798134e-12,
    1.9842806226805618733e-14,
    6.0905165060589549044e-17,
};
constexpr std::array<double, 10> kI1Small = {
    6.4175899699118740499e-1,
    1.4753932014919341906e-1,
    5.8987426800207883051e-3,
    1.198813717463870829e-4,
    1.4739165119093126904e-6,
    1.2138074968740921606e-8,
    7.1611066927992794695e-11,
    3.1748793113101199308e-13,
    1.0962998348773075276e-15,
    3.0315021220933554353e-18,
};
constexpr std::array<double, 11> kK0Small = {
    -2.6766369661695138436e-1,
    3.4428989992462848689e-1,
    3.5979936515361501627e-2,
    1.2646154114469259234e-3,
    2.2862121031194517861e-5,
    2.5347910790261494573e-7,
    1.904516377220208859e-9,
    1.0349695257633624585e-11,
    4.2598161427910825765e-14,
    1.3744654358807508969e-16,
    3.570896528508373591e-19,
};
constexpr std::array<double, 11> kK1Small = {
    7.6265011366947388527e-1,
    -3.5315596077654487567e-1,
    -1.2261118082265714823e-1,
    -6.9757238596398643502e-3,
    -1.730288957513052063e-4,
    -2.433406141565968235e-6,
    -2.2133876307347258558e-8,
    -1.4114883926335277611e-10,
    -6.6669016941993290061e-13,
    -2.4274498505193659339e-15,
    -7.0238634793862875972e-18,
};
constexpr std::array<double, 20> kK0Mid = {
    1.2117802604833602929,
    -2.235652605699819052e-2,
    7.7341811546938582353e-4,
    -4.2810066888860994645e-5,
    3.0817001738629747437e-6,
    -2.6393672220096649741e-7,
    2.5637130364034692063e-8,
    -2.7427055499002012639e-9,
    3.1694296580974995921e-10,
    -3.9023532869621841416e-11,
    5.0680406981885754021e-12,
    -6.8895747410078706795e-13,
    9.7449784978259176914e-14,
    -1.4273328418845485054e-14,
    2.1564125710214630396e-15,
    -3.3496542551495627722e-16,
    5.3352602169529116922e-17,
    -8.6936699808907538077e-18,
    1.4464043478622122279e-18,
    -2.4528898255001296818e-19,
};
constexpr std::array<double, 20> kK1Mid = {
    1.3872156703486941485,
    7.5719899531993678171e-2,
    -1.441051556475406123e-3,
    6.6501169551257479394e-5,
    -4.3699847095201407661e-6,
    3.5402774997630526799e-7,
    -3.3111637792932920209e-8,
    3.4459775819010534532e-9,
    -3.8989323474754271049e-10,
    4.7208197504658356401e-11,
    -6.0478356628753562345e-12,
    8.1284948748658747888e-13,
    -1.1386945747147891429e-13,
    1.6540358408462282326e-14,
    -2.4809025677068848222e-15,
    3.8292378907024096948e-16,
    -6.0647341040012418188e-17,
    9.8324256232648616039e-18,
    -1.6284168738284380036e-18,
    2.7501536496752623714e-19,
};
constexpr std::array<double, 16> kK0Far = {
    1.2439906508684620388,
    -9.1748526910256953107e-3,
    1.444550931775005821e-4,
    -4.0136141754357097287e-6,
    1.5678318108523106726e-7,
    -7.7701104385217377103e-9,
    4.6111825761797178825e-10,
    -3.1585929978605657705e-11,
    2.4350180393650411278e-12,
    -2.0743313873983478977e-13,
    1.9257872805899170847e-14,
    -1.9275548058389561036e-15,
    2.0621980291978182783e-16,
    -2.3416851175792424026e-17,
    2.8059028106430422468e-18,
    -3.5305076311618079458e-19,
};
constexpr std::array<double, 16> kK1Far = {
    1.2818965417186950052,
    2.8328878130497209358e-2,
    -2.4753706739052503454e-4,
    5.7719724516072488205e-6,
    -2.0689392195365483027e-7,
    9.7399834413818041803e-9,
    -5.5853361403806249847e-10,
    3.7329966340461852402e-11,
    -2.8250519610232254451e-12,
    2.3720190024841441736e-13,
    -2.1766773879917539793e-14,
    2.1579141616160324539e-15,
    -2.290196930718269276e-16,
    2.5828857298232749619e-17,
    -3.0767526412684631876e-18,
    3.8514877212804915971e-19,
};
// clang-format on

double clenshaw(std::span<const double> c, double t) {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  const double tt = 2.0 * t;
  for (std::size_t k = c.size(); k-- > 0;) {
    b2 = b1;
    b1 = b0;
    b0 = tt * b1 - b2 + c[k];
  }
  return b0 - t * b1;
}

constexpr double kSmallLimit = 2.0;
constexpr double kMidLimit = 8.0;

double small_t(double x) { return 0.5 * x * x - 1.0; }

// u = 2/x in [1/4, 1) for the middle range, [0, 1/4) for the far range.
double mid_t(double x) { return 2.0 * ((2.0 / x) - 0.25) / 0.75 - 1.0; }
double far_t(double x) { return 2.0 * (2.0 / x) / 0.25 - 1.0; }

void check_positive(double x, const char* name) {
  if (!(x > 0.0)) {
    throw DomainError(std::string(name) + ": argument must be positive, got " + std::to_string(x));
  }
}

// sqrt(x) e^x K_n(x) for x > 2.
BesselK01 large_scaled_sqrt(double x) {
  if (x <= kMidLimit) {
    const double t = mid_t(x);
    return {clenshaw(kK0Mid, t), clenshaw(kK1Mid, t)};
  }
  const double t = far_t(x);
  return {clenshaw(kK0Far, t), clenshaw(kK1Far, t)};
}

BesselK01 small_k01(double x) {
  const double t = small_t(x);
  const double lg = std::log(0.5 * x);
  const double i0 = clenshaw(kI0Small, t);
  const double i1 = x * clenshaw(kI1Small, t);
  return {clenshaw(kK0Small, t) - lg * i0, lg * i1 + clenshaw(kK1Small, t) / x};
}

}  // namespace

double bessel_i0(double x) {
  x = std::abs(x);
  if (x <= kSmallLimit) return clenshaw(kI0Small, small_t(x));
  // Power series; only reached by tests and never for large x.
  double term = 1.0;
  double sum = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 500 && term > 1e-18 * sum; ++k) {
    term *= q / (double(k) * k);
    sum += term;
  }
  return sum;
}

double bessel_i1(double x) {
  const double ax = std::abs(x);
  double v = 0.0;
  if (ax <= kSmallLimit) {
    v = ax * clenshaw(kI1Small, small_t(ax));
  } else {
    double term = 0.5 * ax;
    double sum = term;
    const double q = 0.25 * ax * ax;
    for (int k = 1; k < 500 && term > 1e-18 * sum; ++k) {
      term *= q / (double(k) * (k + 1));
      sum += term;
    }
    v = sum;
  }
  return x < 0 ? -v : v;
}

BesselK01 bessel_k01(double x) {
  check_positive(x, "bessel_k01");
  if (x <= kSmallLimit) return small_k01(x);
  const auto s = large_scaled_sqrt(x);
  const double f = std::exp(-x) / std::sqrt(x);
  return {s.k0 * f, s.k1 * f};
}

double bessel_k0(double x) { return bessel_k01(x).k0; }
double bessel_k1(double x) { return bessel_k01(x).k1; }

double bessel_k0_scaled(double x) {
  check_positive(x, "bessel_k0_scaled");
  if (x <= kSmallLimit) return std::exp(x) * small_k01(x).k0;
  return large_scaled_sqrt(x).k0 / std::sqrt(x);
}

double bessel_k1_scaled(double x) {
  check_positive(x, "bessel_k1_scaled");
  if (x <= kSmallLimit) return std::exp(x) * small_k01(x).k1;
  return large_scaled_sqrt(x).k1 / std::sqrt(x);
}

KernelValues kernel(double kappa, Vec2 source, Vec2 target, int order) {
  if (!(kappa > 0.0)) throw DomainError("kernel: kappa must be positive");
  const Vec2 d = target - source;
  const double r = norm(d);
  if (r == 0.0) throw DomainError("kernel: coincident source and target need singular quadrature");

  constexpr double inv2pi = 0.5 * std::numbers::inv_pi;
  const double z = kappa * r;
  const auto k = bessel_k01(z);

  KernelValues out;
  out.phi = inv2pi * k.k0;
  if (order < 1) return out;

  const Vec2 e = (1.0 / r) * d;
  const double dphi = -inv2pi * kappa * k.k1;
  out.grad = dphi * e;
  if (order < 2) return out;

  // Phi'' = kappa^2 (K0 + K1/z) / 2pi; the transverse part is Phi'/r.
  const double d2phi = inv2pi * kappa * kappa * (k.k0 + k.k1 / z);
  const double trans = dphi / r;
  const double rad = d2phi - trans;
  out.hess = {rad * e.x * e.x + trans, rad * e.x * e.y, rad * e.x * e.y, rad * e.y * e.y + trans};
  return out;
}

}  // namespace casimir
