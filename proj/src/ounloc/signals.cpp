#include "ounloc/signals.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ounloc/error.hpp"

namespace ounloc {

void RssModel::validate() const {
    if (!(transmit_power > 0.0)) fail(ErrorCode::InvalidArgument, "transmit power must be positive");
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
    if (!(exponent_min >= 2.0 && exponent_min <= exponent_max)) {
        fail(ErrorCode::InvalidArgument, "path-loss exponent range must satisfy 2 <= a <= b");
    }
}

void ToaModel::validate() const {
    if (!(speed > 0.0)) fail(ErrorCode::InvalidArgument, "propagation speed must be positive");
    if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "TOA sigma must be >= 0");
}

double rss_power(const RssModel& model, double distance, double exponent) {
    if (!(distance > 0.0)) fail(ErrorCode::InvalidArgument, "received power needs a positive distance");
    return model.transmit_power * model.alpha * std::pow(distance, -exponent);
}

double sample_path_loss_exponent(double a, double b, Rng& rng) {
    if (!(a <= b)) fail(ErrorCode::InvalidArgument, "path-loss exponent range must satisfy a <= b");
    if (a == b) return a;
    return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double toa_sample(const ToaModel& model, double distance, Rng& rng) {
    if (!(distance >= 0.0)) fail(ErrorCode::InvalidArgument, "TOA needs a non-negative distance");
    const double mean = distance / model.speed;
    if (model.sigma == 0.0) return mean;
    return mean + model.sigma * std::normal_distribution<double>(0.0, 1.0)(rng);
}

double invert_rss(const RssModel& model, double power, double exponent) {
    if (!(power > 0.0)) fail(ErrorCode::InvalidArgument, "received power must be positive to invert");
    if (!(exponent > 0.0)) fail(ErrorCode::InvalidArgument, "path-loss exponent must be positive to invert");
    return std::pow(model.transmit_power * model.alpha / power, 1.0 / exponent);
}

Matrix sample_link_exponents(int order, double a, double b, Rng& rng) {
    Matrix g = Matrix::Zero(order, order);
    for (int i = 0; i < order; ++i)
        for (int j = i + 1; j < order; ++j) g(i, j) = g(j, i) = sample_path_loss_exponent(a, b, rng);
    return g;
}

Matrix rss_power_matrix(const RssModel& model, const Matrix& distances, const Matrix& exponents) {
    const auto n = distances.rows();
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            p(i, j) = p(j, i) = rss_power(model, std::max(distances(i, j), kMinLinkDistance), exponents(i, j));
    return p;
}

Matrix toa_matrix(const ToaModel& model, const Matrix& distances, Rng& rng) {
    const auto n = distances.rows();
    Matrix t = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) t(i, j) = t(j, i) = toa_sample(model, distances(i, j), rng);
    return t;
}

}  // namespace ounloc
