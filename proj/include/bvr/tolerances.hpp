#pragma once

namespace bvr {

// Every numeric knob used by the solvers, in one place so tests pin a single
// source of truth. Values are part of the library contract; do not tune them
// per call site.
struct Tolerances {
  // --- polynomial roots ---
  double root_imag_rel = 1e-6;      // |Im z| <= rel * spectral scale -> near-real candidate
  double root_residual_rel = 1e-10; // accept x iff |p(x)| <= rel * (1 + sum|c_i x^i|)
  double root_dedup = 1e-8;         // cluster width: max(dedup, dedup*|x|)
  double root_snap_span = 1e-6;     // stationary-point snap allowed within ~span*(1+|x|)
  int newton_max_iter = 60;

  // --- dominance-region / aimpoint selection ---
  double oval_on_boundary_rel = 1e-6; // |O(P)| <= rel * max(1, x1): point lies on the oval
  double stationarity_rel = 1e-6;     // un-squared stationarity residual filter
  double membership_slack_rel = 1e-9; // region-membership tie counts as inside

  // --- retreat heading optimization ---
  int heading_grid = 721;        // seed grid for the 1-D maximization
  double golden_tol = 1e-6;      // radians; golden-section stop width
  double parallel_sin_eps = 1e-10; // |sin phi| below this counts as parallel
  double band_edge_slack = 1e-9; // heading-in-band check slack (radians)

  // --- generic geometry ---
  double tiny = 1e-12; // coincidence / zero-length guards
};

inline constexpr Tolerances kTol{};

}  // namespace bvr
