#pragma once

#include "tropskel/newton_core.hpp"

#include <numbers>

namespace tropskel::testing {

inline NewtonData make_instance(std::vector<LatticeVector> pts, std::vector<int> h, double beta = 100.0) {
  std::vector<Rational> heights;
  std::vector<double> phases;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    heights.emplace_back(h[i]);
    phases.push_back(pts[i].is_zero() ? std::numbers::pi : 0.0);
  }
  return NewtonData::create(std::move(pts), std::move(heights), std::move(phases), beta);
}

// Pair of pants.
inline NewtonData e1(double beta = 100.0) { return make_instance({{0, 0}, {1, 0}, {0, 1}}, {0, 1, 1}, beta); }

// Mirror of P^2.
inline NewtonData e2(double beta = 100.0) {
  return make_instance({{0, 0}, {1, 0}, {0, 1}, {-1, -1}}, {0, 1, 1, 1}, beta);
}

// Skewed triangle whose P is not adapted to |u|^2.
inline NewtonData e3(double beta = 100.0) {
  return make_instance({{0, 0}, {0, 1}, {1, 1}, {-1, -2}}, {0, 1, 1, 1}, beta);
}

// Star instance whose boundary edge {(1,1),(1,-1)} is not unimodular.
inline NewtonData two_component_instance(double beta = 100.0) {
  return make_instance({{0, 0}, {1, 1}, {1, -1}, {-1, 0}}, {0, 1, 1, 1}, beta);
}

}  // namespace tropskel::testing
