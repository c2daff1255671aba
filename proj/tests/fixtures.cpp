#include "fixtures.hpp"

#include "panocal/recon/map.hpp"

namespace fixtures {

namespace {

ReconFixture build(int n_frames, double pixel_sigma, std::uint64_t seed) {
  ReconFixture fx;
  fx.scene = sim::build_room(sim::RoomConfig{});
  fx.rig = sim::default_survey_rig();

  sim::TrajectoryParams traj_params;
  traj_params.camera = fx.rig.left;
  fx.trajectory = sim::make_stereo_trajectory(fx.scene, n_frames, derive_seed(seed, "traj"),
                                              traj_params);
  fx.frames = render_stereo_frames(fx.scene, fx.trajectory, fx.rig, pixel_sigma,
                                   derive_seed(seed, "render"));
  fx.tracking = recon::track_sequence(fx.frames);

  std::vector<recon::LoopClosure> closures;
  for (std::size_t k = 0; k < fx.frames.size(); ++k) {
    auto lc = recon::detect_loop_closure(fx.frames, static_cast<int>(k), 10, fx.rig.left);
    if (lc) closures.push_back(*lc);
  }
  fx.map = recon::build_map(fx.frames, fx.tracking, closures);
  fx.ba = recon::global_ba(fx.frames, fx.map, fx.rig);
  // second merge pass unifies tracks split by pre-BA drift, then re-refine
  fx.map = recon::merge_points(fx.map, 0.02);
  fx.ba = recon::global_ba(fx.frames, fx.map, fx.rig);
  recon::fit_map_planes(fx.map);
  return fx;
}

}  // namespace

const ReconFixture& default_reconstruction() {
  static const ReconFixture fx = build(60, 0.2, 424242);
  return fx;
}

const ReconFixture& noiseless_reconstruction() {
  static const ReconFixture fx = build(40, 0.0, 777);
  return fx;
}

}  // namespace fixtures
