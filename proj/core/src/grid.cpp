#include "ibkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ibkit {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GridSpec::GridSpec(int n, double length) : n_(n), mask_(n - 1), length_(length), h_(length / n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("N must be a power of two, got " + std::to_string(n));
  }
  if (n < 8) throw std::invalid_argument("N must be at least 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("domain length must be positive and finite");
  }
}

EdgeVectorField grad(const CellField& p) {
  const GridSpec& g = p.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.h();
  EdgeVectorField out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.u(i, j) = (p(i, j) - p(i - 1, j)) * inv_h;
      out.v(i, j) = (p(i, j) - p(i, j - 1)) * inv_h;
    }
  }
  return out;
}

CellField div(const EdgeVectorField& w) {
  const GridSpec& g = w.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.h();
  CellField out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) = (w.u(i + 1, j) - w.u(i, j) + w.v(i, j + 1) - w.v(i, j)) * inv_h;
    }
  }
  return out;
}

NodeField curl(const EdgeVectorField& w) {
  const GridSpec& g = w.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.h();
  NodeField out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) = (w.v(i, j) - w.v(i - 1, j) - w.u(i, j) + w.u(i, j - 1)) * inv_h;
    }
  }
  return out;
}

EdgeVectorField perp_grad(const NodeField& a) {
  const GridSpec& g = a.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.h();
  EdgeVectorField out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.u(i, j) = (a(i, j) - a(i, j + 1)) * inv_h;
      out.v(i, j) = (a(i + 1, j) - a(i, j)) * inv_h;
    }
  }
  return out;
}

template <Centering C>
Field<C> laplacian(const Field<C>& f) {
  const GridSpec& g = f.grid();
  const int n = g.n();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  Field<C> out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) =
          (f(i + 1, j) + f(i, j + 1) + f(i - 1, j) + f(i, j - 1) - 4.0 * f(i, j)) * inv_h2;
    }
  }
  return out;
}

template CellField laplacian(const CellField&);
template NodeField laplacian(const NodeField&);
template XEdgeField laplacian(const XEdgeField&);
template YEdgeField laplacian(const YEdgeField&);

EdgeVectorField laplacian(const EdgeVectorField& w) { return {laplacian(w.u), laplacian(w.v)}; }

EdgeVectorField convective(const EdgeVectorField& w) {
  const GridSpec& g = w.grid();
  const int n = g.n();
  const double c = 1.0 / (2.0 * g.h());
  const XEdgeField& u = w.u;
  const YEdgeField& v = w.v;
  EdgeVectorField out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v_at_u = 0.25 * (v(i - 1, j) + v(i, j) + v(i - 1, j + 1) + v(i, j + 1));
      out.u(i, j) = c * (u(i, j) * (u(i + 1, j) - u(i - 1, j)) + v_at_u * (u(i, j + 1) - u(i, j - 1)));
      const double u_at_v = 0.25 * (u(i, j - 1) + u(i, j) + u(i + 1, j) + u(i + 1, j - 1));
      out.v(i, j) = c * (u_at_v * (v(i + 1, j) - v(i - 1, j)) + v(i, j) * (v(i, j + 1) - v(i, j - 1)));
    }
  }
  return out;
}

template <Centering C>
double mean(const Field<C>& f) {
  double s = 0.0;
  for (double v : f.data()) s += v;
  return s / static_cast<double>(f.data().size());
}

template <Centering C>
double max_abs(const Field<C>& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

template <Centering C>
double inner(const Field<C>& f, const Field<C>& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.data().size(); ++k) s += f.data()[k] * g.data()[k];
  const double h = f.grid().h();
  return s * h * h;
}

#define IBKIT_INSTANTIATE_REDUCTIONS(C)                 \
  template double mean(const Field<C>&);                \
  template double max_abs(const Field<C>&);             \
  template double inner(const Field<C>&, const Field<C>&);

IBKIT_INSTANTIATE_REDUCTIONS(Centering::Cell)
IBKIT_INSTANTIATE_REDUCTIONS(Centering::Node)
IBKIT_INSTANTIATE_REDUCTIONS(Centering::XEdge)
IBKIT_INSTANTIATE_REDUCTIONS(Centering::YEdge)
#undef IBKIT_INSTANTIATE_REDUCTIONS

Vec2 mean_flow(const EdgeVectorField& w) { return {mean(w.u), mean(w.v)}; }

double max_abs(const EdgeVectorField& w) { return std::max(max_abs(w.u), max_abs(w.v)); }

double inner(const EdgeVectorField& a, const EdgeVectorField& b) {
  return inner(a.u, b.u) + inner(a.v, b.v);
}

double max_speed(const EdgeVectorField& w) {
  const int n = w.grid().n();
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double uc = 0.5 * (w.u(i, j) + w.u(i + 1, j));
      const double vc = 0.5 * (w.v(i, j) + w.v(i, j + 1));
      m = std::max(m, std::hypot(uc, vc));
    }
  }
  return m;
}

bool all_finite(const EdgeVectorField& w) {
  const auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(w.u.data().begin(), w.u.data().end(), finite) &&
         std::all_of(w.v.data().begin(), w.v.data().end(), finite);
}

}  // namespace ibkit
