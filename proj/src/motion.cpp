#include "racf/motion.hpp"

namespace racf {

void MotionHistory::push(const Point& loc) {
    loc_km1 = loc_k;
    loc_k = loc;
    if (valid_count < 2) ++valid_count;
}

Point smooth_update(const MotionHistory& hist, const Point& raw, double omega_d, double omega_a) {
    require(omega_d >= 0 && omega_d <= 1 && omega_a >= 0 && omega_a <= 1,
            "smooth_update: weights must lie in [0,1]");
    if (hist.valid_count < 2) return raw;
    if (omega_d == 1.0 && omega_a == 1.0) return raw;

    const Point prev_step = hist.loc_k - hist.loc_km1;
    const Point step = raw - hist.loc_k;
    const double d0 = prev_step.norm(), d1 = step.norm();
    const double phi1 = rad2deg(std::atan2(step.y(), step.x()));
    const double phi0 = d0 > 0 ? rad2deg(std::atan2(prev_step.y(), prev_step.x())) : phi1;

    const double d = omega_d * d1 + (1 - omega_d) * d0;
    // phi1 + (1 - wa) * (phi0 - phi1) along the shorter arc
    const double phi = normalize_degrees(phi1 + (1 - omega_a) * normalize_degrees(phi0 - phi1));
    const auto [c, s] = cos_sin_deg(phi);
    return hist.loc_k + d * Point(c, s);
}

}  // namespace racf
