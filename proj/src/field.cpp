#include "linfty/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace linfty {

double ScalarField::max_abs() const {
  double m = 0.0;
  for (int i : dom->active_nodes) m = std::max(m, std::abs(v[i]));
  return m;
}

double ScalarField::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (int i : dom->active_nodes) m = std::max(m, v[i]);
  return m;
}

bool ScalarField::zero_trace(double tol) const {
  for (int i : dom->boundary_nodes)
    if (std::abs(v[i]) > tol) return false;
  return true;
}

void ScalarField::assert_finite() const {
  for (int i : dom->active_nodes)
    if (!std::isfinite(v[i])) throw Error(ErrorCode::InvalidArgument, "non-finite field value");
}

namespace {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void save_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  const auto& dom = *f.dom;
  out << (dom.dim == 1 ? "ix,value\n" : "ix,iy,value\n");
  for (int i : dom.active_nodes) {
    if (dom.dim == 1)
      out << dom.ix_of(i) << "," << fmt_double(f[i]) << "\n";
    else
      out << dom.ix_of(i) << "," << dom.iy_of(i) << "," << fmt_double(f[i]) << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

ScalarField load_field_csv(const DomainPtr& dom, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  ScalarField f(dom);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, "empty CSV " + path);
  ++lineno;
  int cols = dom->dim == 1 ? 2 : 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != cols)
      throw Error(ErrorCode::FormatError, path + " row " + std::to_string(lineno) +
                                              ": expected " + std::to_string(cols) + " columns");
    try {
      size_t used = 0;
      int ix = std::stoi(cells[0], &used);
      int iy = cols == 3 ? std::stoi(cells[1]) : 0;
      double val = std::stod(cells[cols - 1]);
      if (ix < 0 || ix >= dom->nx || iy < 0 || iy >= dom->ny)
        throw Error(ErrorCode::FormatError,
                    path + " row " + std::to_string(lineno) + ": index out of range");
      f[dom->id(ix, iy)] = val;
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::FormatError, path + " row " + std::to_string(lineno) + ": bad number");
    } catch (const std::out_of_range&) {
      throw Error(ErrorCode::FormatError, path + " row " + std::to_string(lineno) + ": bad number");
    }
  }
  f.assert_finite();
  return f;
}

void save_field_pgm(const ScalarField& f, const std::string& path) {
  const auto& dom = *f.dom;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i : dom.active_nodes) {
    lo = std::min(lo, f[i]);
    hi = std::max(hi, f[i]);
  }
  std::vector<int> pix(static_cast<size_t>(dom.nx) * std::max(dom.ny, 1), 0);
  for (int i : dom.active_nodes) {
    int level = 0;
    if (hi > lo) level = std::min(255, static_cast<int>(std::floor((f[i] - lo) / (hi - lo) * 255.0)));
    // image rows run top-down
    pix[dom.ix_of(i) + static_cast<size_t>(dom.nx) * (dom.ny - 1 - dom.iy_of(i))] = level;
  }
  write_pgm(path, dom.nx, dom.ny, pix);
}

void save_indicator_pgm(const DomainPtr& dom, const std::vector<int>& nodes,
                        const std::string& path) {
  std::vector<int> pix(static_cast<size_t>(dom->nx) * std::max(dom->ny, 1), 0);
  for (int i : dom->active_nodes)
    pix[dom->ix_of(i) + static_cast<size_t>(dom->nx) * (dom->ny - 1 - dom->iy_of(i))] = 64;
  for (int i : nodes)
    pix[dom->ix_of(i) + static_cast<size_t>(dom->nx) * (dom->ny - 1 - dom->iy_of(i))] = 255;
  write_pgm(path, dom->nx, dom->ny, pix);
}

}  // namespace linfty
