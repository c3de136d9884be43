#include "linfty/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>

namespace linfty {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

int grid_steps(double span, double h) {
  double q = span / h;
  int r = static_cast<int>(std::lround(q));
  if (std::abs(q - r) < 1e-9 && r >= 1) return r;
  return static_cast<int>(std::ceil(q - 1e-9));
}

}  // namespace

int GridDomain::nearest_node(Vec2 p) const {
  int ix = std::clamp(static_cast<int>(std::lround((p.x - x0) / h)), 0, nx - 1);
  int iy = dim == 1 ? 0 : std::clamp(static_cast<int>(std::lround((p.y - y0) / h)), 0, ny - 1);
  return id(ix, iy);
}

void GridDomain::build_topology() {
  edges.clear();
  interior_nodes.clear();
  boundary_nodes.clear();
  active_nodes.clear();

  for (int i = 0; i < num_nodes(); ++i) {
    if (cls[i] == NodeClass::Interior) interior_nodes.push_back(i);
    if (cls[i] == NodeClass::Boundary) boundary_nodes.push_back(i);
    if (cls[i] != NodeClass::Exterior) active_nodes.push_back(i);
  }

  // forward offsets only, so each undirected edge is created once
  struct Off {
    int dx, dy;
    double len;
  };
  std::vector<Off> offs;
  if (dim == 1) {
    offs = {{1, 0, h}};
  } else {
    offs = {{1, 0, h}, {0, 1, h}, {1, 1, h * kSqrt2}, {-1, 1, h * kSqrt2}};
  }
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      int a = id(ix, iy);
      if (!active(a)) continue;
      for (auto& o : offs) {
        int jx = ix + o.dx, jy = iy + o.dy;
        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
        int b = id(jx, jy);
        if (!active(b)) continue;
        edges.push_back({std::min(a, b), std::max(a, b), o.len});
      }
    }
  }

  adj_start_.assign(num_nodes() + 1, 0);
  for (auto& e : edges) {
    ++adj_start_[e.a + 1];
    ++adj_start_[e.b + 1];
  }
  for (int i = 0; i < num_nodes(); ++i) adj_start_[i + 1] += adj_start_[i];
  adj_.resize(edges.size() * 2);
  std::vector<int> cur(adj_start_.begin(), adj_start_.end() - 1);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    adj_[cur[edges[e].a]++] = {edges[e].b, e};
    adj_[cur[edges[e].b]++] = {edges[e].a, e};
  }
}

void GridDomain::check_invariants() const {
  if (interior_nodes.empty()) throw Error(ErrorCode::EmptyInterior, "no interior node");
  // Interior never touches Exterior, and every interior node reaches the
  // boundary through active nodes.
  for (int i : interior_nodes) {
    for (auto [j, e] : neighbors(i)) {
      (void)e;
      if (!active(j)) throw Error(ErrorCode::BadShape, "interior node adjacent to exterior");
    }
  }
  std::vector<char> seen(num_nodes(), 0);
  std::queue<int> q;
  for (int b : boundary_nodes) {
    seen[b] = 1;
    q.push(b);
  }
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    for (auto [j, e] : neighbors(i)) {
      (void)e;
      if (!seen[j]) {
        seen[j] = 1;
        q.push(j);
      }
    }
  }
  for (int i : interior_nodes)
    if (!seen[i]) throw Error(ErrorCode::BadShape, "interior node cannot reach boundary");
}

namespace {

DomainPtr rasterize_mask(const CustomMask& mask, double h) {
  auto dom = std::make_shared<GridDomain>();
  int w = 0, ht = 0, maxval = 255;
  std::vector<int> pix = read_pgm(mask.path, w, ht, maxval);
  dom->dim = 2;
  dom->nx = w;
  dom->ny = ht;
  dom->h = h;
  dom->x0 = 0.0;
  dom->y0 = 0.0;
  dom->shape = ShapeSpec(mask);
  dom->cls.assign(w * ht, NodeClass::Exterior);
  auto candidate = [&](int ix, int iy) {
    if (ix < 0 || ix >= w || iy < 0 || iy >= ht) return false;
    // pixel rows are stored top-down
    return pix[ix + w * (ht - 1 - iy)] >= (maxval + 1) / 2;
  };
  // clearance analog: a candidate whose full stencil ring is candidate
  for (int iy = 0; iy < ht; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      if (!candidate(ix, iy)) continue;
      bool inner = true;
      for (int dy = -1; dy <= 1 && inner; ++dy)
        for (int dx = -1; dx <= 1 && inner; ++dx)
          if (!candidate(ix + dx, iy + dy)) inner = false;
      if (inner) dom->cls[dom->id(ix, iy)] = NodeClass::Interior;
    }
  for (int iy = 0; iy < ht; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      int i = dom->id(ix, iy);
      if (dom->cls[i] == NodeClass::Interior) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jx >= w || jy < 0 || jy >= ht) continue;
          if (dom->cls[dom->id(jx, jy)] == NodeClass::Interior) dom->cls[i] = NodeClass::Boundary;
        }
    }
  dom->build_topology();
  dom->check_invariants();
  return dom;
}

}  // namespace

DomainPtr rasterize(const ShapeSpec& shape_in, double h) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
  ShapeSpec shape = shape_in;
  validate_shape(shape);
  if (auto* m = std::get_if<CustomMask>(&shape)) return rasterize_mask(*m, h);

  auto dom = std::make_shared<GridDomain>();
  auto bb = bounding_box(shape);
  dom->dim = shape_dim(shape);
  dom->h = h;
  dom->x0 = bb[0];
  dom->nx = grid_steps(bb[1] - bb[0], h) + 1;
  if (dom->dim == 1) {
    dom->ny = 1;
    dom->y0 = 0.0;
  } else {
    dom->y0 = bb[2];
    dom->ny = grid_steps(bb[3] - bb[2], h) + 1;
  }
  dom->shape = shape;
  dom->cls.assign(dom->num_nodes(), NodeClass::Exterior);

  for (int iy = 0; iy < dom->ny; ++iy)
    for (int ix = 0; ix < dom->nx; ++ix) {
      Vec2 p = dom->pos(dom->id(ix, iy));
      if (!shape_contains(shape, p)) continue;
      if (exact_boundary_distance(shape, p) >= h / 2)
        dom->cls[dom->id(ix, iy)] = NodeClass::Interior;
    }

  int lo = dom->dim == 1 ? 0 : -1, hi = dom->dim == 1 ? 0 : 1;
  for (int iy = 0; iy < dom->ny; ++iy)
    for (int ix = 0; ix < dom->nx; ++ix) {
      int i = dom->id(ix, iy);
      if (dom->cls[i] == NodeClass::Interior) continue;
      bool adj = false;
      for (int dy = lo; dy <= hi && !adj; ++dy)
        for (int dx = -1; dx <= 1 && !adj; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jx >= dom->nx || jy < 0 || jy >= dom->ny) continue;
          if (dom->cls[dom->id(jx, jy)] == NodeClass::Interior) adj = true;
        }
      if (adj) dom->cls[i] = NodeClass::Boundary;
    }

  dom->build_topology();
  dom->check_invariants();
  return dom;
}

std::vector<int> read_pgm(const std::string& path, int& w, int& h, int& maxval) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open PGM " + path);
  std::string tok;
  auto next = [&]() -> std::string {
    std::string t;
    while (in >> t) {
      if (t[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return t;
    }
    throw Error(ErrorCode::FormatError, "truncated PGM " + path);
  };
  if (next() != "P2") throw Error(ErrorCode::FormatError, "not a P2 PGM: " + path);
  w = std::stoi(next());
  h = std::stoi(next());
  maxval = std::stoi(next());
  if (w <= 0 || h <= 0 || maxval <= 0) throw Error(ErrorCode::FormatError, "bad PGM header");
  std::vector<int> pix(static_cast<size_t>(w) * h);
  for (auto& p : pix) p = std::stoi(next());
  return pix;
}

void write_pgm(const std::string& path, int w, int h, const std::vector<int>& pix, int maxval) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write PGM " + path);
  out << "P2\n" << w << " " << h << "\n" << maxval << "\n";
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out << pix[x + static_cast<size_t>(w) * y] << (x + 1 == w ? '\n' : ' ');
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace linfty
