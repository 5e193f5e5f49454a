#pragma once

#include "racf/types.hpp"

namespace racf {

struct MotionHistory {
    Point loc_km1{0, 0};
    Point loc_k{0, 0};
    int valid_count = 0;

    /// Shifts in the location accepted for the newest frame.
    void push(const Point& loc);
};

/// Displacement consistency: blends the new displacement's length and
/// direction with the previous one, d = wd*d1 + (1-wd)*d0 and
/// phi = wa*phi1 + (1-wa)*phi0 (shortest angular path). Needs two past
/// locations; otherwise `raw` is returned as is.
Point smooth_update(const MotionHistory& hist, const Point& raw, double omega_d, double omega_a);

}  // namespace racf
