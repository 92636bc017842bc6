#pragma once

#include "ounloc/core.hpp"
#include "ounloc/rng.hpp"

namespace ounloc {

// Links shorter than this are lengthened when generating powers.
inline constexpr double kMinLinkDistance = 1e-6;

// Received power P_R = P_T * alpha * d^-G.
struct RssModel {
    double transmit_power = 1.0;  // mW
    double alpha = 1.0;
    double exponent_min = 2.0;  // per-link G ~ U[exponent_min, exponent_max]
    double exponent_max = 2.0;

    void validate() const;
};

// tau ~ N(d / c, sigma^2)
struct ToaModel {
    double speed = 1.0;
    double sigma = 0.0;

    void validate() const;
};

double rss_power(const RssModel& model, double distance, double exponent);
double sample_path_loss_exponent(double a, double b, Rng& rng);
double toa_sample(const ToaModel& model, double distance, Rng& rng);
// d = (P_T alpha / P_R)^(1/G); exact inverse of rss_power for the same G.
double invert_rss(const RssModel& model, double power, double exponent);

// Symmetric per-link exponents (one draw per unordered pair), zero diagonal.
Matrix sample_link_exponents(int order, double a, double b, Rng& rng);
// Symmetric received-power matrix for the given link exponents; the diagonal is unused.
Matrix rss_power_matrix(const RssModel& model, const Matrix& distances, const Matrix& exponents);
// Symmetric TOA matrix, one draw per unordered pair; zero diagonal.
Matrix toa_matrix(const ToaModel& model, const Matrix& distances, Rng& rng);

}  // namespace ounloc
