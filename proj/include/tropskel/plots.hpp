#pragma once

#include "tropskel/morse_skeleton.hpp"
#include "tropskel/polyhedron.hpp"
#include "tropskel/potential.hpp"

#include <string>
#include <vector>

namespace tropskel {

struct PlotInput {
  const NewtonData* data = nullptr;
  const StarTriangulation* triangulation = nullptr;
  const Polyhedron* polytope = nullptr;
  const AdaptednessReport* adaptedness = nullptr;  // optional
  const SkeletonRun* skeleton = nullptr;           // optional
};

// SVG figures plus CSV polyline tables; n = 2 only. Returns the files written.
std::vector<std::string> emit_plots(const PlotInput& in, const std::string& dir);

}  // namespace tropskel
