#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace valet {

// Delivery-time coefficient calibration. For each station count K in
// [k_lo, k_hi], customers are drawn uniformly over a square zone of side
// sqrt(area/K) with the station at its center; the mean Manhattan distance
// divided by the courier speed gives a travel time, and regressing travel
// time on sqrt(area/K) yields theta. In expectation theta = 1/(2*speed).
struct ThetaCalibration {
    double theta = 0;         // regression slope
    double intercept = 0;
    double r_squared = 0;
    double slope_stderr = 0;
    std::uint64_t seed = 0;
    std::vector<std::array<double, 2>> samples;  // (sqrt(area/K), mean travel time)
};

ThetaCalibration calibrate_theta(double area, int k_lo, int k_hi, double speed,
                                 long samples, std::uint64_t seed);

}  // namespace valet
