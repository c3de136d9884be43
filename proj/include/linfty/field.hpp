#pragma once

#include <string>
#include <vector>

#include "linfty/grid.hpp"

namespace linfty {

/// Per-node real values on Interior u Boundary. Storage is dense over the
/// whole grid; Exterior slots are kept at zero and ignored semantically.
struct ScalarField {
  DomainPtr dom;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(DomainPtr d, double fill = 0.0)
      : dom(std::move(d)), v(dom->num_nodes(), fill) {}

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  double max_abs() const;           // over active nodes
  double max_value() const;         // over active nodes
  bool zero_trace(double tol = 0.0) const;
  void assert_finite() const;
};

/// CSV round-trip is bit-exact on values; header is `ix,value` (1D) or
/// `ix,iy,value`, one row per active node.
void save_field_csv(const ScalarField& f, const std::string& path);
ScalarField load_field_csv(const DomainPtr& dom, const std::string& path);

/// PGM P2 heatmap: pixel = floor((v - min)/(max - min) * 255), with
/// max == min mapping to 0. Exterior pixels are 0.
void save_field_pgm(const ScalarField& f, const std::string& path);

/// Indicator image for a node set (255 on the set, 64 elsewhere-active, 0 exterior).
void save_indicator_pgm(const DomainPtr& dom, const std::vector<int>& nodes,
                        const std::string& path);

}  // namespace linfty
