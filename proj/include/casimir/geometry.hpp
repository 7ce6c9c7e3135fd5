#pragma once

#include <string>
#include <vector>

#include "casimir/vec2.hpp"

namespace casimir {

enum class EdgeVariant { Rectangular, Chamfer, Fillet };

std::string to_string(EdgeVariant v);
EdgeVariant parse_edge_variant(const std::string& name);  // "rect" | "chamfer" | "fillet"

// Treatment applied to every right-angle corner of the profile. `size` is
// the chamfer leg length or the fillet radius and is ignored for
// Rectangular corners.
struct EdgeSpec {
  EdgeVariant variant = EdgeVariant::Rectangular;
  double size = 0.0;

  static EdgeSpec rectangular() { return {}; }
  static EdgeSpec chamfer(double leg) { return {EdgeVariant::Chamfer, leg}; }
  static EdgeSpec fillet(double radius) { return {EdgeVariant::Fillet, radius}; }
};

// Two facing perfectly conducting plates with square-wave profiles.
//
// Lower plate: tooth tops on x = 0, groove bottoms on x = -h, one tooth
// centred on y = 0. Upper plate: the lower plate mirrored through x = b/2
// and shifted by s along y, so its tooth tops lie on x = b.
struct GearConfig {
  double a = 2.0;     // period
  double h = 0.5;     // profile depth
  double b = 1.0;     // gap between opposing tooth tops
  double s = 0.0;     // shift of the upper plate, kept in [0, a)
  EdgeSpec edge;
  double duty = 0.5;  // tooth width / period

  double tooth_width() const { return duty * a; }
  double groove_width() const { return (1.0 - duty) * a; }

  // Validates every invariant and returns a copy with s reduced into [0, a).
  // Throws ConfigError.
  GearConfig validated() const;

  // Same geometry with every length multiplied by lambda.
  GearConfig scaled(double lambda) const;
};

// s mod a, in [0, a). Throws ConfigError for a <= 0.
double reduce_shift(double s, double a);

enum class Plate { Lower = 0, Upper = 1 };
enum class SegmentKind { Line, Arc };

// One smooth piece of a plate boundary, traversed in the +y direction.
struct BoundarySegment {
  SegmentKind kind = SegmentKind::Line;
  Vec2 start;
  Vec2 end;
  // Arc data: point(u) = center + radius * (cos, sin)(angle_start + u * angle_span).
  Vec2 center;
  double radius = 0.0;
  double angle_start = 0.0;
  double angle_span = 0.0;
  Plate plate = Plate::Lower;
  // The vacuum-side normal is normal_sign * perp(tangent).
  int normal_sign = -1;
  // Part of the end caps and back face closing a truncated plate.
  bool closure = false;

  double length() const;
  Vec2 point_at(double u) const;  // u in [0, 1]
  Vec2 tangent_at(double u) const;
  Vec2 normal_at(double u) const;
};

// Both plates (lower first, then upper), clipped to the window
// |y| <= (n_buffer_periods + 1/2) a centred on the evaluation period.
// With `closed`, each clipped profile is continued by an end cap, a flat
// back face a/2 behind the groove bottoms and the other end cap, so every
// plate is a finite solid body. Open profiles are bare sheets. Throws
// ConfigError when the configuration is invalid.
std::vector<BoundarySegment> build_profile(const GearConfig& config, int n_buffer_periods,
                                           bool closed = true);

struct Element {
  Vec2 start;
  Vec2 end;
  Vec2 midpoint;
  Vec2 tangent;  // unit, along the traversal direction
  Vec2 normal;   // unit, into the vacuum gap
  double length = 0.0;
  int segment = 0;
  int chain = 0;  // maximal run of tangent-continuous segments
  Plate plate = Plate::Lower;
  int prev = -1;  // neighbours on the same chain, -1 at chain ends
  int next = -1;
};

struct IndexRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

struct BoundaryMesh {
  std::vector<Element> elements;
  std::vector<BoundarySegment> segments;
  double period = 0.0;
  int period_count = 0;  // periods meshed per plate
  // Elements of each plate (lower, upper) in traversal order.
  IndexRange plate_range[2];
  // Elements of each plate whose midpoint lies in the central period
  // -a/2 <= y < a/2.
  IndexRange core_period_range[2];

  int size() const { return static_cast<int>(elements.size()); }
};

// Coarsening away from the evaluation period: the local density is
// density / (1 + rate * max(0, |y| - fine_half_width)). rate = 0 meshes
// uniformly.
// corner_levels > 0 splits the element touching a corner (a junction
// where the tangent jumps) geometrically, ratio corner_ratio per level.
// With rate > 0 only corners inside the fine zone are refined.
struct MeshGrading {
  double rate = 0.0;
  double fine_half_width = 0.0;
  int corner_levels = 0;
  double corner_ratio = 0.5;
  double closure_factor = 0.25;  // density multiplier on closure segments
  double arc_factor = 1.0;       // density multiplier on arcs (chords stand in for them)
};

// Splits every segment into ceil(int density ds) pieces (equal pieces of
// the parameter when ungraded: equal angles on arcs; elements are straight
// chords). Element boundaries always coincide with segment junctions.
// Throws MeshError on empty input and DomainError for density <= 0 or a
// negative grading rate.
BoundaryMesh discretize(const std::vector<BoundarySegment>& segments, double density,
                        double period = 0.0, MeshGrading grading = {});

// build_profile + discretize.
BoundaryMesh build_mesh(const GearConfig& config, double density, int n_buffer_periods,
                        MeshGrading grading = {});

// Per-plate boundary length of one period of the infinite profile.
double period_boundary_length(const GearConfig& config);

}  // namespace casimir
