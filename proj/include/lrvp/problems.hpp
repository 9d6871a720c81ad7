#pragma once

// Initial conditions for the standard test problems, built directly in
// low-rank / hierarchical form from their separable terms.

#include "lrvp/config.hpp"
#include "lrvp/htensor.hpp"
#include "lrvp/lowrank.hpp"

namespace lrvp {

// 1D1V presets: weak_landau_1d, strong_landau_1d, bump_on_tail.
LowRankMatrix initial_condition_1d(const SimulationConfig& cfg, const AxisGrid& xgrid,
                                   const AxisGrid& vgrid);

// 2D2V presets: weak_landau_2d, two_stream_2d.
HTensor initial_condition_2d(const SimulationConfig& cfg, const AxisGrid& xgrid,
                             const AxisGrid& vgrid);

}  // namespace lrvp
