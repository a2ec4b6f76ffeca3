#pragma once

#include <cstddef>
#include <span>

#include "lidaraug/adv_mix.hpp"
#include "lidaraug/random.hpp"

namespace lidaraug {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t points_checked = 0;
};

/// Compares the provider's analytic gradient with central differences of its loss.
/// Per point the error is |g_analytic - g_numeric| / max(|g_analytic|, |g_numeric|);
/// points where both vanish count as exact.
GradCheckResult finite_difference_check(const GradientProvider& provider, const Scene& scene,
                                        std::span<const Box3D> boxes, double step = 1e-5);

/// Rotated boxes holding off-center clusters, plus background points well clear of every
/// box face so that no point changes membership under a small step.
Scene gradcheck_fixture(Rng& rng, int n_boxes = 4, int background_points = 200);

}  // namespace lidaraug
