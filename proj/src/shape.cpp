#include "linfty/shape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace linfty {

using nlohmann::json;

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

int shape_dim(const ShapeSpec& s) { return std::holds_alternative<Interval>(s) ? 1 : 2; }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

namespace {

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

double polygon_signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    size_t j = (i + 1) % v.size();
    s += cross(v[i], v[j]);
  }
  return 0.5 * s;
}

bool polygon_contains(const std::vector<Vec2>& v, Vec2 p) {
  // crossing number; boundary points count as outside (open domain)
  bool in = false;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (point_segment_distance(p, v[j], v[i]) == 0.0) return false;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double xint = v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (p.x < xint) in = !in;
    }
  }
  return in;
}

}  // namespace

void validate_shape(ShapeSpec& s) {
  if (auto* iv = std::get_if<Interval>(&s)) {
    if (!(iv->b > iv->a)) throw Error(ErrorCode::BadShape, "interval needs a < b");
  } else if (auto* r = std::get_if<Rectangle>(&s)) {
    if (!(r->bx > r->ax && r->by > r->ay))
      throw Error(ErrorCode::BadShape, "rectangle needs positive extent");
  } else if (auto* d = std::get_if<Disk>(&s)) {
    if (!(d->r > 0)) throw Error(ErrorCode::BadShape, "disk needs r > 0");
  } else if (auto* st = std::get_if<Stadium>(&s)) {
    if (!(st->r > 0)) throw Error(ErrorCode::BadShape, "stadium needs r > 0");
  } else if (auto* pg = std::get_if<Polygon>(&s)) {
    auto& v = pg->vertices;
    if (v.size() < 3) throw Error(ErrorCode::BadShape, "polygon needs >= 3 vertices");
    size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        // skip adjacent edges (they share an endpoint)
        if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
        if (segments_properly_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
          throw Error(ErrorCode::BadShape, "polygon self-intersects");
      }
    }
    double area = polygon_signed_area(v);
    if (area == 0.0) throw Error(ErrorCode::BadShape, "polygon has zero area");
    if (area < 0.0) std::reverse(v.begin(), v.end());
  }
}

std::array<double, 4> bounding_box(const ShapeSpec& s) {
  if (auto* iv = std::get_if<Interval>(&s)) return {iv->a, iv->b, 0.0, 0.0};
  if (auto* r = std::get_if<Rectangle>(&s)) return {r->ax, r->bx, r->ay, r->by};
  if (auto* d = std::get_if<Disk>(&s)) return {d->cx - d->r, d->cx + d->r, d->cy - d->r, d->cy + d->r};
  if (auto* st = std::get_if<Stadium>(&s)) {
    double xmin = std::min(st->p0.x, st->p1.x) - st->r;
    double xmax = std::max(st->p0.x, st->p1.x) + st->r;
    double ymin = std::min(st->p0.y, st->p1.y) - st->r;
    double ymax = std::max(st->p0.y, st->p1.y) + st->r;
    return {xmin, xmax, ymin, ymax};
  }
  if (auto* pg = std::get_if<Polygon>(&s)) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (auto& p : pg->vertices) {
      xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
    return {xmin, xmax, ymin, ymax};
  }
  throw Error(ErrorCode::UnsupportedShape, "custom masks have no analytic bounding box");
}

bool shape_contains(const ShapeSpec& s, Vec2 p) {
  if (auto* iv = std::get_if<Interval>(&s)) return p.x > iv->a && p.x < iv->b;
  if (auto* r = std::get_if<Rectangle>(&s))
    return p.x > r->ax && p.x < r->bx && p.y > r->ay && p.y < r->by;
  if (auto* d = std::get_if<Disk>(&s)) return norm(p - Vec2{d->cx, d->cy}) < d->r;
  if (auto* st = std::get_if<Stadium>(&s)) return point_segment_distance(p, st->p0, st->p1) < st->r;
  if (auto* pg = std::get_if<Polygon>(&s)) return polygon_contains(pg->vertices, p);
  throw Error(ErrorCode::UnsupportedShape, "containment query on custom mask");
}

double exact_boundary_distance(const ShapeSpec& s, Vec2 p) {
  if (std::holds_alternative<CustomMask>(s))
    throw Error(ErrorCode::UnsupportedShape, "no exact distance for custom masks");
  if (!shape_contains(s, p)) throw Error(ErrorCode::OutsideDomain, "point not inside shape");
  if (auto* iv = std::get_if<Interval>(&s)) return std::min(p.x - iv->a, iv->b - p.x);
  if (auto* r = std::get_if<Rectangle>(&s))
    return std::min(std::min(p.x - r->ax, r->bx - p.x), std::min(p.y - r->ay, r->by - p.y));
  if (auto* d = std::get_if<Disk>(&s)) return d->r - norm(p - Vec2{d->cx, d->cy});
  if (auto* st = std::get_if<Stadium>(&s)) return st->r - point_segment_distance(p, st->p0, st->p1);
  auto* pg = std::get_if<Polygon>(&s);
  double best = std::numeric_limits<double>::infinity();
  auto& v = pg->vertices;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
    best = std::min(best, point_segment_distance(p, v[j], v[i]));
  return best;
}

namespace {

ShapeSpec shape_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  ShapeSpec s;
  if (kind == "interval") {
    s = Interval{j.at("a").get<double>(), j.at("b").get<double>()};
  } else if (kind == "rectangle") {
    s = Rectangle{j.at("ax").get<double>(), j.at("ay").get<double>(), j.at("bx").get<double>(),
                  j.at("by").get<double>()};
  } else if (kind == "disk") {
    s = Disk{j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("r").get<double>()};
  } else if (kind == "stadium") {
    s = Stadium{{j.at("x0").get<double>(), j.at("y0").get<double>()},
                {j.at("x1").get<double>(), j.at("y1").get<double>()},
                j.at("r").get<double>()};
  } else if (kind == "polygon") {
    Polygon pg;
    for (auto& v : j.at("vertices")) pg.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    s = pg;
  } else if (kind == "mask") {
    s = CustomMask{j.at("path").get<std::string>()};
  } else {
    throw Error(ErrorCode::FormatError, "unknown shape kind '" + kind + "'");
  }
  validate_shape(s);
  return s;
}

}  // namespace

ShapeSpec shape_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::FormatError, "invalid shape JSON");
  try {
    return shape_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, e.what());
  }
}

std::string shape_to_json_text(const ShapeSpec& s) {
  json j;
  if (auto* iv = std::get_if<Interval>(&s)) {
    j = {{"kind", "interval"}, {"a", iv->a}, {"b", iv->b}};
  } else if (auto* r = std::get_if<Rectangle>(&s)) {
    j = {{"kind", "rectangle"}, {"ax", r->ax}, {"ay", r->ay}, {"bx", r->bx}, {"by", r->by}};
  } else if (auto* d = std::get_if<Disk>(&s)) {
    j = {{"kind", "disk"}, {"cx", d->cx}, {"cy", d->cy}, {"r", d->r}};
  } else if (auto* st = std::get_if<Stadium>(&s)) {
    j = {{"kind", "stadium"}, {"x0", st->p0.x}, {"y0", st->p0.y},
         {"x1", st->p1.x}, {"y1", st->p1.y}, {"r", st->r}};
  } else if (auto* pg = std::get_if<Polygon>(&s)) {
    json verts = json::array();
    for (auto& v : pg->vertices) verts.push_back({v.x, v.y});
    j = {{"kind", "polygon"}, {"vertices", verts}};
  } else if (auto* m = std::get_if<CustomMask>(&s)) {
    j = {{"kind", "mask"}, {"path", m->path}};
  }
  return j.dump(2);
}

ShapeSpec load_shape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open shape file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return shape_from_json_text(ss.str());
}

}  // namespace linfty
