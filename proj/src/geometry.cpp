#include "casimir/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "casimir/error.hpp"

namespace casimir {
namespace {

constexpr double kPi = std::numbers::pi;

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

[[noreturn]] void config_error(const std::string& what) { throw ConfigError(what); }

BoundarySegment line(Vec2 p, Vec2 q, Plate plate) {
  BoundarySegment seg;
  seg.kind = SegmentKind::Line;
  seg.start = p;
  seg.end = q;
  seg.plate = plate;
  return seg;
}

// Rectangular-profile polyline of the lower plate covering periods
// [k_lo, k_hi]; every interior vertex is a right-angle corner.
std::vector<Vec2> lower_polyline(const GearConfig& g, int k_lo, int k_hi) {
  const double half = 0.5 * g.tooth_width();
  std::vector<Vec2> pts;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double c = k * g.a;
    pts.push_back({-g.h, c - half});
    pts.push_back({0.0, c - half});
    pts.push_back({0.0, c + half});
    pts.push_back({-g.h, c + half});
  }
  return pts;
}

// Replaces every interior corner of the polyline according to the edge spec.
std::vector<BoundarySegment> round_corners(const std::vector<Vec2>& pts, const EdgeSpec& edge) {
  std::vector<BoundarySegment> out;
  const double size = edge.variant == EdgeVariant::Rectangular ? 0.0 : edge.size;
  Vec2 cursor = pts.front();
  auto push_line = [&](Vec2 to) {
    if (distance(cursor, to) > 0.0) out.push_back(line(cursor, to, Plate::Lower));
    cursor = to;
  };
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 v = pts[i];
    const Vec2 din = (1.0 / distance(pts[i - 1], v)) * (v - pts[i - 1]);
    const Vec2 dout = (1.0 / distance(v, pts[i + 1])) * (pts[i + 1] - v);
    if (size == 0.0) {
      push_line(v);
      continue;
    }
    const Vec2 p = v - size * din;
    const Vec2 q = v + size * dout;
    push_line(p);
    if (edge.variant == EdgeVariant::Chamfer) {
      out.push_back(line(p, q, Plate::Lower));
    } else {
      // Tangent quarter circle; the centre sits on the inside of the turn.
      const double turn = cross(din, dout) > 0.0 ? 1.0 : -1.0;
      const Vec2 center = p + (turn * size) * perp(din);
      BoundarySegment arc;
      arc.kind = SegmentKind::Arc;
      arc.start = p;
      arc.end = q;
      arc.center = center;
      arc.radius = size;
      arc.angle_start = std::atan2(p.y - center.y, p.x - center.x);
      arc.angle_span = turn * 0.5 * kPi;
      arc.plate = Plate::Lower;
      out.push_back(arc);
    }
    cursor = q;
  }
  push_line(pts.back());
  return out;
}

BoundarySegment mirror_shift(const BoundarySegment& seg, double b, double s) {
  auto map = [&](Vec2 p) { return Vec2{b - p.x, p.y + s}; };
  BoundarySegment out = seg;
  out.start = map(seg.start);
  out.end = map(seg.end);
  out.plate = Plate::Upper;
  out.normal_sign = +1;
  if (seg.kind == SegmentKind::Arc) {
    out.center = map(seg.center);
    out.angle_start = kPi - seg.angle_start;
    out.angle_span = -seg.angle_span;
  }
  return out;
}

// Restriction of seg to the parameter interval [u0, u1].
BoundarySegment restrict(const BoundarySegment& seg, double u0, double u1) {
  BoundarySegment out = seg;
  out.start = seg.point_at(u0);
  out.end = seg.point_at(u1);
  if (seg.kind == SegmentKind::Arc) {
    out.angle_start = seg.angle_start + u0 * seg.angle_span;
    out.angle_span = (u1 - u0) * seg.angle_span;
  }
  return out;
}

// Parameter where the (monotone) y coordinate of seg reaches y.
double solve_y(const BoundarySegment& seg, double y) {
  if (seg.kind == SegmentKind::Line) {
    return std::clamp((y - seg.start.y) / (seg.end.y - seg.start.y), 0.0, 1.0);
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (seg.point_at(mid).y < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void clip_append(const BoundarySegment& seg, double y_lo, double y_hi, double min_length,
                 std::vector<BoundarySegment>& out) {
  const double y0 = seg.start.y;
  const double y1 = seg.end.y;
  if (y0 == y1) {
    // On the window edge it would overlap the end cap.
    if (y0 > y_lo && y0 < y_hi) out.push_back(seg);
    return;
  }
  if (y1 <= y_lo || y0 >= y_hi) return;
  const double u0 = y0 < y_lo ? solve_y(seg, y_lo) : 0.0;
  const double u1 = y1 > y_hi ? solve_y(seg, y_hi) : 1.0;
  BoundarySegment piece = (u0 == 0.0 && u1 == 1.0) ? seg : restrict(seg, u0, u1);
  if (piece.length() >= min_length) out.push_back(piece);
}

}  // namespace

std::string to_string(EdgeVariant v) {
  switch (v) {
    case EdgeVariant::Rectangular:
      return "rect";
    case EdgeVariant::Chamfer:
      return "chamfer";
    case EdgeVariant::Fillet:
      return "fillet";
  }
  return "?";
}

EdgeVariant parse_edge_variant(const std::string& name) {
  if (name == "rect" || name == "rectangular") return EdgeVariant::Rectangular;
  if (name == "chamfer" || name == "flat") return EdgeVariant::Chamfer;
  if (name == "fillet" || name == "smooth") return EdgeVariant::Fillet;
  config_error("unknown edge variant '" + name + "' (expected rect, chamfer or fillet)");
}

double reduce_shift(double s, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) config_error("period a must be positive");
  if (!std::isfinite(s)) config_error("shift s must be finite");
  double r = std::fmod(s, a);
  if (r < 0.0) r += a;
  if (r >= a) r = 0.0;  // fmod rounding at -tiny
  return r;
}

GearConfig GearConfig::validated() const {
  if (!finite_all({a, h, b, s, duty, edge.size})) config_error("geometry parameters must be finite");
  if (!(a > 0.0)) config_error("geometry.a must be positive");
  if (!(h >= 0.0)) config_error("geometry.h must be non-negative");
  if (!(b > 0.0)) config_error("geometry.b must be positive");
  if (!(duty > 0.0 && duty < 1.0)) config_error("geometry.duty must lie in (0, 1)");
  GearConfig out = *this;
  out.s = reduce_shift(s, a);
  if (edge.variant == EdgeVariant::Rectangular) {
    out.edge.size = 0.0;
    return out;
  }
  const double size = edge.size;
  const double narrowest = std::min(tooth_width(), groove_width());
  const double tol = 1e-12 * std::max(1.0, a);
  if (!(size > 0.0)) config_error("edge.size must be positive for " + to_string(edge.variant));
  if (2.0 * size > h + tol) {
    std::ostringstream msg;
    msg << "edge.size " << size << " too large: 2*size must not exceed depth h = " << h;
    config_error(msg.str());
  }
  if (2.0 * size > narrowest + tol) {
    std::ostringstream msg;
    msg << "edge.size " << size << " too large: 2*size must not exceed the tooth/groove width "
        << narrowest;
    config_error(msg.str());
  }
  return out;
}

GearConfig GearConfig::scaled(double lambda) const {
  GearConfig out = *this;
  out.a *= lambda;
  out.h *= lambda;
  out.b *= lambda;
  out.s *= lambda;
  out.edge.size *= lambda;
  return out;
}

double BoundarySegment::length() const {
  if (kind == SegmentKind::Line) return distance(start, end);
  return radius * std::abs(angle_span);
}

Vec2 BoundarySegment::point_at(double u) const {
  if (kind == SegmentKind::Line) {
    if (u == 1.0) return end;
    return start + u * (end - start);
  }
  if (u == 0.0) return start;
  if (u == 1.0) return end;
  const double t = angle_start + u * angle_span;
  return center + radius * Vec2{std::cos(t), std::sin(t)};
}

Vec2 BoundarySegment::tangent_at(double u) const {
  if (kind == SegmentKind::Line) return (1.0 / length()) * (end - start);
  const double t = angle_start + u * angle_span;
  const double dir = angle_span > 0.0 ? 1.0 : -1.0;
  return dir * Vec2{-std::sin(t), std::cos(t)};
}

Vec2 BoundarySegment::normal_at(double u) const {
  return static_cast<double>(normal_sign) * perp(tangent_at(u));
}

double period_boundary_length(const GearConfig& config) {
  const GearConfig g = config.validated();
  const double rect = g.a + 2.0 * g.h;
  if (g.h == 0.0) return g.a;
  switch (g.edge.variant) {
    case EdgeVariant::Rectangular:
      return rect;
    case EdgeVariant::Chamfer:
      return rect - 4.0 * (2.0 - std::numbers::sqrt2) * g.edge.size;
    case EdgeVariant::Fillet:
      return rect - 4.0 * (2.0 - 0.5 * kPi) * g.edge.size;
  }
  return rect;
}

std::vector<BoundarySegment> build_profile(const GearConfig& config, int n_buffer_periods, bool closed) {
  if (n_buffer_periods < 0) config_error("n_buffer_periods must be non-negative");
  const GearConfig g = config.validated();
  const double y_hi = (n_buffer_periods + 0.5) * g.a;
  const double y_lo = -y_hi;
  const double min_length = 1e-9 * g.a;

  std::vector<BoundarySegment> lower_full;
  if (g.h == 0.0) {
    lower_full.push_back(line({0.0, y_lo - 2.0 * g.a}, {0.0, y_hi + 2.0 * g.a}, Plate::Lower));
  } else {
    const int k = n_buffer_periods + 2;
    lower_full = round_corners(lower_polyline(g, -k, k), g.edge);
  }

  std::vector<BoundarySegment> out;
  auto close = [&](std::size_t first, double x_back, Plate plate, int sign) {
    if (!closed) return;
    const Vec2 head = out[first].start;
    const Vec2 tail = out.back().end;
    for (auto [p, q] : {std::pair{tail, Vec2{x_back, tail.y}}, std::pair{Vec2{x_back, tail.y}, Vec2{x_back, head.y}},
                        std::pair{Vec2{x_back, head.y}, head}}) {
      BoundarySegment seg = line(p, q, plate);
      seg.normal_sign = sign;
      seg.closure = true;
      out.push_back(seg);
    }
  };
  const double back = g.h + 0.5 * g.a;
  for (const auto& seg : lower_full) clip_append(seg, y_lo, y_hi, min_length, out);
  close(0, -back, Plate::Lower, -1);
  const std::size_t upper = out.size();
  for (const auto& seg : lower_full) {
    clip_append(mirror_shift(seg, g.b, g.s), y_lo, y_hi, min_length, out);
  }
  close(upper, g.b + back, Plate::Upper, +1);
  return out;
}

namespace {

// Parameter values t_0 = 0 < ... < t_n = 1 splitting `seg` for the graded
// density. Uniform in t when the whole segment sits in the fine zone.
std::vector<double> split_points(const BoundarySegment& seg, double density, const MeshGrading& grading) {
  const double len = seg.length();
  auto uniform = [](int n) {
    std::vector<double> t(n + 1);
    for (int k = 0; k <= n; ++k) t[k] = static_cast<double>(k) / n;
    return t;
  };
  auto count = [](double want) { return std::max(1, static_cast<int>(std::ceil(want - 1e-9 * std::max(1.0, want)))); };
  auto excess = [&](double t) { return std::max(0.0, std::abs(seg.point_at(t).y) - grading.fine_half_width); };
  if (seg.closure) density *= grading.closure_factor;
  if (seg.kind == SegmentKind::Arc) density *= grading.arc_factor;
  if (grading.rate == 0.0 || (excess(0.0) == 0.0 && excess(1.0) == 0.0 && excess(0.5) == 0.0)) {
    return uniform(count(len * density));
  }
  // Cumulative element count by the midpoint rule on a fine parameter grid.
  constexpr int kSamples = 256;
  std::vector<double> cumulative(kSamples + 1, 0.0);
  for (int i = 0; i < kSamples; ++i) {
    const double t = (i + 0.5) / kSamples;
    cumulative[i + 1] = cumulative[i] + len * density / kSamples / (1.0 + grading.rate * excess(t));
  }
  const int n = count(cumulative.back());
  std::vector<double> t(n + 1, 1.0);
  t[0] = 0.0;
  int i = 0;
  for (int k = 1; k < n; ++k) {
    const double target = cumulative.back() * k / n;
    while (cumulative[i + 1] < target) ++i;
    const double frac = (target - cumulative[i]) / (cumulative[i + 1] - cumulative[i]);
    t[k] = (i + frac) / kSamples;
  }
  return t;
}

}  // namespace

BoundaryMesh discretize(const std::vector<BoundarySegment>& segments, double density, double period,
                        MeshGrading grading) {
  if (segments.empty()) throw MeshError("discretize: empty segment list");
  if (!(density > 0.0) || !std::isfinite(density)) throw DomainError("discretize: density must be positive");
  if (!(grading.rate >= 0.0) || !std::isfinite(grading.rate)) throw DomainError("discretize: grading rate must be non-negative");

  BoundaryMesh mesh;
  mesh.segments = segments;
  mesh.period = period;

  double scale = 0.0;
  for (const auto& seg : segments) scale = std::max(scale, seg.length());
  const double joint_tol = 1e-9 * std::max(1.0, scale);

  int chain = -1;
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const auto& seg = segments[si];
    const double len = seg.length();
    if (!(len > 0.0)) throw MeshError("discretize: zero-length segment");

    bool new_chain = si == 0;
    if (si > 0) {
      const auto& prev = segments[si - 1];
      new_chain = prev.plate != seg.plate || distance(prev.end, seg.start) > joint_tol ||
                  dot(prev.tangent_at(1.0), seg.tangent_at(0.0)) < 1.0 - 1e-9;
    }
    if (new_chain) ++chain;

    auto t = split_points(seg, density, grading);
    if (grading.corner_levels > 0) {
      auto corner = [&](std::size_t other, Vec2 here, Vec2 there, Vec2 t_here, Vec2 t_there) {
        const auto& o = segments[other];
        // Only corners in the fine zone; the buffers do not need it.
        const bool fine = grading.rate == 0.0 || std::abs(here.y) <= grading.fine_half_width + joint_tol;
        return fine && !seg.closure && !o.closure && o.plate == seg.plate && distance(here, there) <= joint_tol && dot(t_here, t_there) < 1.0 - 1e-9;
      };
      const bool at_start = si > 0 && corner(si - 1, seg.start, segments[si - 1].end, seg.tangent_at(0.0),
                                             segments[si - 1].tangent_at(1.0));
      const bool at_end = si + 1 < segments.size() &&
                          corner(si + 1, seg.end, segments[si + 1].start, seg.tangent_at(1.0),
                                 segments[si + 1].tangent_at(0.0));
      std::vector<double> refined;
      const std::size_t last = t.size() - 1;
      for (std::size_t k = 0; k < last; ++k) {
        refined.push_back(t[k]);
        const double lo = t[k], hi = t[k + 1];
        // A single element with corners at both ends is refined from its middle outwards.
        const bool start_side = at_start && k == 0;
        const bool end_side = at_end && k + 1 == last;
        const double mid = start_side && end_side ? 0.5 * (lo + hi) : (start_side ? hi : lo);
        if (start_side) {
          std::vector<double> inner;
          for (int l = grading.corner_levels; l >= 1; --l) inner.push_back(lo + (mid - lo) * std::pow(grading.corner_ratio, l));
          refined.insert(refined.end(), inner.begin(), inner.end());
        }
        if (start_side && end_side) refined.push_back(mid);
        if (end_side) {
          for (int l = 1; l <= grading.corner_levels; ++l) refined.push_back(hi - (hi - mid) * std::pow(grading.corner_ratio, l));
        }
      }
      refined.push_back(t.back());
      t = std::move(refined);
    }
    const int n = static_cast<int>(t.size()) - 1;
    for (int k = 0; k < n; ++k) {
      Element e;
      e.start = seg.point_at(t[k]);
      e.end = seg.point_at(t[k + 1]);
      e.length = distance(e.start, e.end);
      if (!(e.length > 0.0)) throw MeshError("discretize: degenerate element");
      e.midpoint = 0.5 * (e.start + e.end);
      e.tangent = (1.0 / e.length) * (e.end - e.start);
      e.normal = static_cast<double>(seg.normal_sign) * perp(e.tangent);
      e.segment = static_cast<int>(si);
      e.chain = chain;
      e.plate = seg.plate;
      const int idx = mesh.size();
      if (!mesh.elements.empty() && !(k == 0 && new_chain)) {
        e.prev = idx - 1;
        mesh.elements.back().next = idx;
      }
      mesh.elements.push_back(e);
    }
  }

  for (int p = 0; p < 2; ++p) {
    const Plate plate = static_cast<Plate>(p);
    auto first = std::find_if(mesh.elements.begin(), mesh.elements.end(),
                              [&](const Element& e) { return e.plate == plate; });
    auto last = std::find_if(first, mesh.elements.end(), [&](const Element& e) { return e.plate != plate; });
    mesh.plate_range[p] = {static_cast<int>(first - mesh.elements.begin()),
                           static_cast<int>(last - mesh.elements.begin())};
    IndexRange core{mesh.plate_range[p].begin, mesh.plate_range[p].begin};
    if (period > 0.0) {
      int i = mesh.plate_range[p].begin;
      while (i < mesh.plate_range[p].end && mesh.elements[i].midpoint.y < -0.5 * period) ++i;
      core.begin = i;
      while (i < mesh.plate_range[p].end && mesh.elements[i].midpoint.y < 0.5 * period) ++i;
      core.end = i;
    }
    mesh.core_period_range[p] = core;
  }

  if (period > 0.0 && mesh.plate_range[0].size() > 0) {
    const auto& r = mesh.plate_range[0];
    int last = r.end - 1;
    while (last > r.begin && mesh.segments[mesh.elements[last].segment].closure) --last;
    const double extent = mesh.elements[last].end.y - mesh.elements[r.begin].start.y;
    mesh.period_count = static_cast<int>(std::lround(extent / period));
  }
  return mesh;
}

BoundaryMesh build_mesh(const GearConfig& config, double density, int n_buffer_periods, MeshGrading grading) {
  const GearConfig g = config.validated();
  return discretize(build_profile(g, n_buffer_periods), density, g.a, grading);
}

}  // namespace casimir
