#pragma once

#include <cmath>

namespace sarmoco::detail {

// sin and cos of x with absolute error below 1e-15 for |x| up to ~1e6.
// Quadrant reduction with a two-part pi/2, then Taylor series on [-pi/4, pi/4].
inline void sincos(double x, double& s, double& c) noexcept {
    constexpr double kTwoOverPi = 0.63661977236758134308;
    constexpr double kPiOver2Hi = 1.5707963267341256e+00;
    constexpr double kPiOver2Lo = 6.0771005065061922e-11;
    // Round to nearest via the 1.5 * 2^52 shift; valid for |x| well below 2^50.
    constexpr double kShift = 6755399441055744.0;
    const double q = (x * kTwoOverPi + kShift) - kShift;
    const double y = (x - q * kPiOver2Hi) - q * kPiOver2Lo;
    const double y2 = y * y;

    double ps = -1.0 / 1307674368000.0;  // -1/15!
    ps = ps * y2 + 1.0 / 6227020800.0;
    ps = ps * y2 - 1.0 / 39916800.0;
    ps = ps * y2 + 1.0 / 362880.0;
    ps = ps * y2 - 1.0 / 5040.0;
    ps = ps * y2 + 1.0 / 120.0;
    ps = ps * y2 - 1.0 / 6.0;
    const double sy = y + y * y2 * ps;

    double pc = 1.0 / 20922789888000.0;  // 1/16!
    pc = pc * y2 - 1.0 / 87178291200.0;
    pc = pc * y2 + 1.0 / 479001600.0;
    pc = pc * y2 - 1.0 / 3628800.0;
    pc = pc * y2 + 1.0 / 40320.0;
    pc = pc * y2 - 1.0 / 720.0;
    pc = pc * y2 + 1.0 / 24.0;
    pc = pc * y2 - 0.5;
    const double cy = 1.0 + y2 * pc;

    switch (static_cast<long long>(q) & 3) {
        case 0: s = sy; c = cy; break;
        case 1: s = cy; c = -sy; break;
        case 2: s = -sy; c = -cy; break;
        default: s = -cy; c = sy; break;
    }
}

}  // namespace sarmoco::detail
