#include "valet/calibrate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace valet {

ThetaCalibration calibrate_theta(double area, int k_lo, int k_hi, double speed,
                                 long samples, std::uint64_t seed) {
    if (!(area > 0.0)) throw std::invalid_argument("area must be positive");
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
    if (samples < 100) throw std::invalid_argument("need at least 100 samples");
    if (k_hi < k_lo || k_lo < 1) throw std::invalid_argument("empty station range");
    if (k_lo == k_hi)
        throw std::invalid_argument("degenerate regression: need at least two station counts");

    ThetaCalibration cal;
    cal.seed = seed;
    std::mt19937_64 rng(seed);

    for (int k = k_lo; k <= k_hi; ++k) {
        const double side = std::sqrt(area / k);
        const double center = 0.5 * side;
        std::uniform_real_distribution<double> coord(0.0, side);
        double dist_sum = 0;
        for (long i = 0; i < samples; ++i) {
            const double x = coord(rng);
            const double y = coord(rng);
            dist_sum += std::abs(x - center) + std::abs(y - center);
        }
        cal.samples.push_back({side, dist_sum / samples / speed});
    }

    // ordinary least squares of travel time on sqrt(area/K)
    const std::size_t n = cal.samples.size();
    double sx = 0, sy = 0;
    for (const auto& s : cal.samples) {
        sx += s[0];
        sy += s[1];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& s : cal.samples) {
        sxx += (s[0] - mx) * (s[0] - mx);
        sxy += (s[0] - mx) * (s[1] - my);
    }
    cal.theta = sxy / sxx;
    cal.intercept = my - cal.theta * mx;

    double ss_res = 0, ss_tot = 0;
    for (const auto& s : cal.samples) {
        const double fit = cal.intercept + cal.theta * s[0];
        ss_res += (s[1] - fit) * (s[1] - fit);
        ss_tot += (s[1] - my) * (s[1] - my);
    }
    cal.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    cal.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return cal;
}

}  // namespace valet
