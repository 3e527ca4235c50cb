#pragma once

#include <random>

#include "ibkit/grid.hpp"

namespace testing {

template <ibkit::Centering C>
ibkit::Field<C> random_field(const ibkit::GridSpec& g, std::mt19937& rng, bool zero_mean = false) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ibkit::Field<C> f(g);
  for (double& v : f.data()) v = dist(rng);
  if (zero_mean) {
    const double m = ibkit::mean(f);
    for (double& v : f.data()) v -= m;
  }
  return f;
}

inline ibkit::EdgeVectorField random_edges(const ibkit::GridSpec& g, std::mt19937& rng) {
  return {random_field<ibkit::Centering::XEdge>(g, rng), random_field<ibkit::Centering::YEdge>(g, rng)};
}

/// Random discretely divergence-free field: perp_grad of a random potential plus a mean flow.
inline ibkit::EdgeVectorField random_solenoidal(const ibkit::GridSpec& g, std::mt19937& rng) {
  auto w = ibkit::perp_grad(random_field<ibkit::Centering::Node>(g, rng));
  for (double& v : w.u.data()) v += 0.3;
  for (double& v : w.v.data()) v -= 0.2;
  return w;
}

}  // namespace testing
