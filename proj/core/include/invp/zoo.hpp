#pragma once

// Reference models with closed-form dimensions and pressures.

#include <string>
#include <vector>

#include "invp/skew_model.hpp"

namespace invp::zoo {

// Full 4-shift, slopes 4; fibers y/3, y/3, y/3 + 2/3, y/3 + 2/3 (open, d' = 2).
SkewSystem m1();
// Full 3-shift, slopes 3; fibers y/4, y/4, y/4 + 3/4 (d' = 1, d'' = 2).
SkewSystem m2();
// Full 2-shift, slopes 2; fibers y/4, y/4 + 3/4 (separated, slice dimension 1/2).
SkewSystem s2();
// Golden-mean shift realized on [0, a] u [a, 1], a = (sqrt 5 - 1) / 2.
SkewSystem golden_mean();
// Full 2-shift with both fibers y/4: the slice is a single point.
SkewSystem degenerate();
// M1 with quadratic fibers c0 + (1/3 + sigma) y - sigma y^2.
SkewSystem smooth_m1(double sigma = 0.02);

std::vector<std::string> names();
// Throws InvalidInput for an unknown name.
SkewSystem by_name(const std::string& name);

}  // namespace invp::zoo
