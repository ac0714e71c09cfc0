#pragma once

#include "hetflow/model.hpp"

namespace scenario {

/// alpha = -1, gamma = -1 + g exp(-x^2), s0 = 1.
inline hetflow::NonlinearityModel switch_well(double g) {
  return hetflow::build_switch_model({1.0, hetflow::Well::zero()},
                                     {1.0, hetflow::Well::gaussian(g, 1.0)}, 1.0);
}

}  // namespace scenario
