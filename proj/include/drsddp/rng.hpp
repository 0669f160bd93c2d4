#ifndef DRSDDP_RNG_HPP_
#define DRSDDP_RNG_HPP_

// Reproducible random streams. std::mt19937_64 has a standard-mandated
// sequence, but the standard distributions do not, so all mappings from raw
// 64-bit words to doubles and ranges live here. Truncated normal sampling
// goes through Acklam's rational approximation of the normal quantile, which
// keeps streams bit-identical across platforms.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "drsddp/common.hpp"

namespace drsddp {

// Standard normal CDF via erfc (IEEE-stable in both tails).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's inverse normal CDF; relative error below 1.15e-9 on (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw SolverError("normal_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n); modulo mapping with rejection of the biased
    // tail, so results do not depend on platform-specific distributions.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw SolverError("uniform_index: empty range");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    int uniform_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Draw an index according to a probability vector (sums to 1).
    int categorical(const std::vector<double>& probs) {
        double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    // Inverse-CDF sampling restricted to [lo, hi].
    double truncated_normal(double mean, double sd, double lo, double hi) {
        double flo = normal_cdf((lo - mean) / sd);
        double fhi = normal_cdf((hi - mean) / sd);
        double u = flo + (fhi - flo) * uniform01();
        u = std::min(std::max(u, 1e-15), 1.0 - 1e-15);
        double z = normal_quantile(u);
        double v = mean + sd * z;
        return std::min(std::max(v, lo), hi);
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace drsddp

#endif  // DRSDDP_RNG_HPP_
