#pragma once

#include <span>
#include <string>

#include "geotess/config.hpp"
#include "geotess/eikonal.hpp"
#include "geotess/mesh.hpp"
#include "geotess/tessellation.hpp"

namespace geotess {

inline constexpr const char* kVersion = "0.1.0";

/// `triangle_index,x,y,value`; unreachable values are written as inf.
std::string field_csv(const Mesh& mesh, const DistanceField& field);

/// Config echo, solve statistics and the values (null when unreachable).
std::string field_json(const RunConfig& config, const Mesh& mesh, const DistanceField& field);

/// `triangle_index,label` with 0-based labels.
std::string labels_csv(const Tessellation& t);

/// `iteration,cell,capacity,target` for every recorded iteration.
std::string capacities_csv(const Tessellation& t, std::span<const double> targets);

/// Config echo, mesh statistics, per-iteration records and final state. No
/// timings, so identical runs give identical bytes.
std::string tessellation_json(const RunConfig& config, const Mesh& mesh, const Tessellation& t);

/// Cells filled from a fixed 20-colour palette, one group per cell, and the
/// generator trajectories as polylines with numbered iterates. The first line
/// after the XML header is a generator-version comment.
std::string tessellation_svg(const Mesh& mesh, const Tessellation& t);

/// Triangle outlines.
std::string mesh_svg(const Mesh& mesh);

}  // namespace geotess
