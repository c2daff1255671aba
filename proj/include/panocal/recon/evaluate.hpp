#pragma once

#include "panocal/recon/map.hpp"
#include "panocal/sim/scene.hpp"

namespace panocal::recon {

struct ReconEvaluation {
  double mean_error_m = 0;       // mean nearest-center distance (consensus pairs)
  double plane_fit_error_m = 0;  // mean |point-to-plane| of the fitted planes
  double consensus_fraction = 0;
  int matched = 0;
  Pose t_world_map = Pose();     // alignment used for the comparison
};

struct EvalParams {
  double consensus_radius = 0.03;  // m, a pair closer than this counts as matched
  double trim_radius = 0.10;       // m, alignment correspondences cap
  int max_iters = 60;
};

/// Rigidly aligns the map onto the truth markers (nearest-neighbour fit
/// iterated to convergence, seeded by `init`: world <- map) and reports the
/// paper's reconstruction metrics. Throws AlignmentFailure below 50%
/// consensus.
ReconEvaluation evaluate_reconstruction(const MarkerMap& map, const sim::SceneTruth& truth,
                                        const Pose& init, const EvalParams& params = {});

}  // namespace panocal::recon
