#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "linfty/error.hpp"

namespace linfty {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Analytic domain descriptions. All lengths in domain units.
struct Interval {
  double a, b;  // a < b
};
struct Rectangle {
  double ax, ay, bx, by;  // ax < bx, ay < by
};
struct Disk {
  double cx, cy, r;  // r > 0
};
/// Stadium: the open r-neighborhood of the segment p0--p1.
struct Stadium {
  Vec2 p0, p1;
  double r;
};
/// Simple closed polygon, stored counterclockwise.
struct Polygon {
  std::vector<Vec2> vertices;
};
/// Mask-backed domain (PGM P2: 0 = exterior, 255 = interior candidate).
struct CustomMask {
  std::string path;
};

using ShapeSpec = std::variant<Interval, Rectangle, Disk, Stadium, Polygon, CustomMask>;

int shape_dim(const ShapeSpec& s);  // 1 for Interval, 2 otherwise

/// Throws BadShape on degenerate extents or self-intersecting polygons.
/// Clockwise polygons are reversed in place to restore the CCW invariant.
void validate_shape(ShapeSpec& s);

/// Axis-aligned bounding box {xmin, xmax, ymin, ymax}; for 1D the y slots are 0.
std::array<double, 4> bounding_box(const ShapeSpec& s);

bool shape_contains(const ShapeSpec& s, Vec2 p);

/// Euclidean distance from an inside point to the shape's boundary curve,
/// in closed form per segment/arc. Throws OutsideDomain / UnsupportedShape.
double exact_boundary_distance(const ShapeSpec& s, Vec2 p);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// JSON codecs for shape files: {"kind": "...", params...}.
ShapeSpec shape_from_json_text(const std::string& text);
std::string shape_to_json_text(const ShapeSpec& s);
ShapeSpec load_shape(const std::string& path);

}  // namespace linfty
