#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ibkit/vec2.hpp"

namespace ibkit {

/// Periodic N x N grid on [0, L)^2. N must be a power of two, at least 8.
class GridSpec {
 public:
  GridSpec(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  double h() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  int wrap(int i) const { return i & mask_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(wrap(i)) * n_ + static_cast<std::size_t>(wrap(j));
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  int n_;
  int mask_;
  double length_;
  double h_;
};

bool is_power_of_two(int n);

/// Where a scalar lives on the MAC grid. Offsets are in units of h.
enum class Centering { Cell, XEdge, YEdge, Node };

constexpr double x_offset(Centering c) { return (c == Centering::Cell || c == Centering::YEdge) ? 0.5 : 0.0; }
constexpr double y_offset(Centering c) { return (c == Centering::Cell || c == Centering::XEdge) ? 0.5 : 0.0; }

/// Periodic scalar field at one centering. Entry (i, j) sits at
/// ((i + x_offset) h, (j + y_offset) h); indices wrap modulo N.
template <Centering C>
class Field {
 public:
  static constexpr Centering centering = C;

  explicit Field(const GridSpec& grid, double fill = 0.0) : grid_(grid), data_(grid.size(), fill) {}

  const GridSpec& grid() const { return grid_; }
  int n() const { return grid_.n(); }

  double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double x(int i) const { return (i + x_offset(C)) * grid_.h(); }
  double y(int j) const { return (j + y_offset(C)) * grid_.h(); }

  Field& operator+=(const Field& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

using CellField = Field<Centering::Cell>;
using NodeField = Field<Centering::Node>;
using XEdgeField = Field<Centering::XEdge>;
using YEdgeField = Field<Centering::YEdge>;

/// MAC velocity-like field: u on x-edges (i h, (j + 1/2) h), v on y-edges
/// ((i + 1/2) h, j h).
struct EdgeVectorField {
  XEdgeField u;
  YEdgeField v;

  explicit EdgeVectorField(const GridSpec& grid) : u(grid), v(grid) {}
  EdgeVectorField(XEdgeField u_, YEdgeField v_) : u(std::move(u_)), v(std::move(v_)) {}

  const GridSpec& grid() const { return u.grid(); }

  EdgeVectorField& operator+=(const EdgeVectorField& o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  EdgeVectorField& operator-=(const EdgeVectorField& o) {
    u -= o.u;
    v -= o.v;
    return *this;
  }
  EdgeVectorField& operator*=(double s) {
    u *= s;
    v *= s;
    return *this;
  }
  friend EdgeVectorField operator+(EdgeVectorField a, const EdgeVectorField& b) { return a += b; }
  friend EdgeVectorField operator-(EdgeVectorField a, const EdgeVectorField& b) { return a -= b; }
  friend EdgeVectorField operator*(EdgeVectorField a, double s) { return a *= s; }
  friend EdgeVectorField operator*(double s, EdgeVectorField a) { return a *= s; }
};

// Discrete operators on the periodic MAC grid.

/// Backward-difference gradient, cells -> edges.
EdgeVectorField grad(const CellField& p);
/// (u_{i+1,j} - u_{i,j} + v_{i,j+1} - v_{i,j}) / h, edges -> cells.
CellField div(const EdgeVectorField& w);
/// dx v - dy u at nodes: (v_{i,j} - v_{i-1,j} - u_{i,j} + u_{i,j-1}) / h.
NodeField curl(const EdgeVectorField& w);
/// ((a_{i,j} - a_{i,j+1}) / h, (a_{i+1,j} - a_{i,j}) / h), nodes -> edges.
EdgeVectorField perp_grad(const NodeField& a);

/// Five-point Laplacian at the field's own centering.
template <Centering C>
Field<C> laplacian(const Field<C>& f);
EdgeVectorField laplacian(const EdgeVectorField& w);

/// Advective-form convective term (u . grad) u with averaged central differences.
EdgeVectorField convective(const EdgeVectorField& w);

/// Arithmetic mean of each component (the discrete mean flow).
Vec2 mean_flow(const EdgeVectorField& w);

template <Centering C>
double mean(const Field<C>& f);
template <Centering C>
double max_abs(const Field<C>& f);
double max_abs(const EdgeVectorField& w);

/// Sum of f g h^2 over the grid.
template <Centering C>
double inner(const Field<C>& f, const Field<C>& g);
double inner(const EdgeVectorField& a, const EdgeVectorField& b);

/// Largest |u| over the grid, with both components averaged to cell centers.
double max_speed(const EdgeVectorField& w);

bool all_finite(const EdgeVectorField& w);

}  // namespace ibkit
