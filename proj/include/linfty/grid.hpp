#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "linfty/shape.hpp"

namespace linfty {

enum class NodeClass : std::uint8_t { Exterior = 0, Boundary = 1, Interior = 2 };

/// Uniform grid carrier of a rasterized domain.
///
/// Nodes live at (x0 + ix*h, y0 + iy*h). Interior nodes are strictly inside
/// the shape with clearance >= h/2 from the boundary curve; Boundary nodes are
/// the non-Interior nodes stencil-adjacent to Interior ones, so Interior never
/// touches Exterior. The stencil is 2-neighbor in 1D and 8-neighbor in 2D with
/// edge lengths h and h*sqrt(2). Immutable after construction.
class GridDomain {
 public:
  struct Edge {
    int a, b;    // node ids, a < b
    double len;  // h or h*sqrt(2)
  };

  int dim = 2;
  int nx = 0, ny = 1;
  double h = 0.0;
  double x0 = 0.0, y0 = 0.0;
  std::vector<NodeClass> cls;
  std::optional<ShapeSpec> shape;

  std::vector<Edge> edges;  // undirected, between non-Exterior nodes only
  std::vector<int> interior_nodes;
  std::vector<int> boundary_nodes;
  std::vector<int> active_nodes;  // Interior u Boundary, ascending ids

  int num_nodes() const { return nx * ny; }
  int id(int ix, int iy) const { return ix + nx * iy; }
  int ix_of(int id) const { return id % nx; }
  int iy_of(int id) const { return id / nx; }
  Vec2 pos(int id) const { return {x0 + h * ix_of(id), y0 + h * iy_of(id)}; }

  bool active(int id) const { return cls[id] != NodeClass::Exterior; }
  bool interior(int id) const { return cls[id] == NodeClass::Interior; }
  bool boundary(int id) const { return cls[id] == NodeClass::Boundary; }

  /// CSR adjacency over active nodes: for node i, neighbors(i) yields
  /// (neighbor id, edge id) pairs in a fixed deterministic order.
  struct NeighborRange {
    const std::pair<int, int>* first;
    const std::pair<int, int>* last;
    const std::pair<int, int>* begin() const { return first; }
    const std::pair<int, int>* end() const { return last; }
  };
  NeighborRange neighbors(int id) const {
    return {adj_.data() + adj_start_[id], adj_.data() + adj_start_[id + 1]};
  }
  double edge_len(int e) const { return edges[e].len; }
  int opposite(int e, int node) const { return edges[e].a == node ? edges[e].b : edges[e].a; }

  /// Nearest grid node to a point (clamped to the grid).
  int nearest_node(Vec2 p) const;

  void build_topology();  // fills edges/adjacency/index lists from cls
  void check_invariants() const;

 private:
  std::vector<int> adj_start_;
  std::vector<std::pair<int, int>> adj_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Rasterize an analytic shape (or PGM mask) at spacing h > 0.
/// Throws EmptyInterior when no node qualifies.
DomainPtr rasterize(const ShapeSpec& shape, double h);

/// PGM P2 mask io. Pixels are row-major top-down; row 0 maps to iy = ny-1.
std::vector<int> read_pgm(const std::string& path, int& w, int& h, int& maxval);
void write_pgm(const std::string& path, int w, int h, const std::vector<int>& pix, int maxval = 255);

}  // namespace linfty
