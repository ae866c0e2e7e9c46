#include <algorithm>
#include <cmath>

#include "ocp2d/sampler.hpp"

namespace ocp2d {

// Radial law of the beta = 1 quadratic gas: {N |z_i|^2} equals in law a set of
// independent gamma variables with shapes 1, ..., N. Each Gamma(k, 1) is drawn
// as a sum of k unit exponentials, which keeps the byte stream trivially
// reproducible.
std::vector<double> ginibre_radii_sample(int N, Rng& rng) {
    if (N < 1) throw std::invalid_argument("ginibre_radii_sample: N must be >= 1");
    std::vector<double> radii(N);
    for (int k = 1; k <= N; ++k) {
        double g = 0.0;
        for (int i = 0; i < k; ++i) g += -std::log(rng.uniform_pos());
        radii[k - 1] = std::sqrt(g / N);
    }
    std::sort(radii.begin(), radii.end());
    return radii;
}

} // namespace ocp2d
