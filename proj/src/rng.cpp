#include "lc/rng.hpp"

#include <cmath>
#include <numbers>

namespace lc {

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do { u1 = uniform(); } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

RngStream RngStream::substream(std::uint64_t index) const {
    return RngStream(mix_seed(seed_ ^ mix_seed(index + 1)));
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace lc
