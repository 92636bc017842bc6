#include "ounloc/funclearn.hpp"

#include <cmath>

#include "ounloc/error.hpp"

namespace ounloc {

LinearFit fit_linear_map(const Vector& psi, const Vector& d) {
    if (psi.size() != d.size()) fail(ErrorCode::InvalidArgument, "fit inputs differ in length");
    if (psi.size() < 2) fail(ErrorCode::InvalidArgument, "linear fit is underdetermined with fewer than 2 points");
    if (!psi.allFinite() || !d.allFinite()) fail(ErrorCode::Numerical, "non-finite fit input");

    const double psi_mean = psi.mean();
    const double d_mean = d.mean();
    const Vector dp = psi.array() - psi_mean;
    const double sxx = dp.squaredNorm();
    const double sxy = dp.dot((d.array() - d_mean).matrix());

    LinearFit fit;
    const double scale = std::max(1.0, psi.cwiseAbs().maxCoeff());
    if (sxx <= 1e-24 * scale * scale * static_cast<double>(psi.size())) {
        fit.status = FitStatus::Degenerate;
        fit.map.slope = kMinSlope;
    } else {
        const double slope = sxy / sxx;
        if (slope <= 0.0) {
            fit.status = FitStatus::SlopeClamped;
            fit.map.slope = kMinSlope;
        } else {
            fit.map.slope = slope;
        }
    }
    fit.map.offset = d_mean - fit.map.slope * psi_mean;
    return fit;
}

namespace {

void count_status(EstimatedDistanceMatrix& out, FitStatus status) {
    out.clamped_fits += status == FitStatus::SlopeClamped;
    out.degenerate_fits += status == FitStatus::Degenerate;
}

}  // namespace

EstimatedDistanceMatrix preliminary_distances(const ProximityMatrix& psi, const Matrix& anchor_distances) {
    const int m = psi.anchor_count();
    const int n = psi.target_count();
    if (m < 2) fail(ErrorCode::InvalidArgument, "function learning needs at least 2 anchors");
    if (anchor_distances.rows() != m || anchor_distances.cols() != m) {
        fail(ErrorCode::InvalidArgument, "anchor distance block does not match the proximity partition");
    }
    const Matrix psi_y = psi.block(Block::Y);
    const Matrix psi_xy = psi.block(Block::XY);

    EstimatedDistanceMatrix out;
    out.stage = EstimateStage::Preliminary;
    out.values = Matrix::Zero(m, n);
    out.maps.resize(static_cast<std::size_t>(m));
    std::vector<bool> ok(static_cast<std::size_t>(m), false);
    for (int k = 0; k < m; ++k) {
        try {
            const LinearFit fit = fit_linear_map(psi_y.col(k), anchor_distances.col(k));
            count_status(out, fit.status);
            out.maps[static_cast<std::size_t>(k)] = fit.map;
            for (int j = 0; j < n; ++j) out.values(k, j) = fit.map(psi_xy(j, k));
            ok[static_cast<std::size_t>(k)] = true;
        } catch (const Error&) {
            out.failed_columns.push_back(k);
        }
    }
    if (!out.failed_columns.empty()) {
        const int good = m - static_cast<int>(out.failed_columns.size());
        if (good == 0) fail(ErrorCode::Numerical, "every anchor fit failed");
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(n);
        for (int k = 0; k < m; ++k)
            if (ok[static_cast<std::size_t>(k)]) mean += out.values.row(k);
        mean /= good;
        for (int k : out.failed_columns) out.values.row(k) = mean;
    }
    return out;
}

EstimatedDistanceMatrix recalibrate(const ProximityMatrix& psi, const EstimatedDistanceMatrix& preliminary) {
    const int m = psi.anchor_count();
    const int n = psi.target_count();
    if (preliminary.values.rows() != m || preliminary.values.cols() != n) {
        fail(ErrorCode::InvalidArgument, "preliminary estimates do not match the proximity partition");
    }
    const Matrix psi_yx = psi.block(Block::YX);

    EstimatedDistanceMatrix out;
    out.stage = EstimateStage::Recalibrated;
    out.values = Matrix::Zero(m, n);
    out.maps.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const LinearFit fit = fit_linear_map(psi_yx.col(j), preliminary.values.col(j));
        count_status(out, fit.status);
        out.maps[static_cast<std::size_t>(j)] = fit.map;
        out.values.col(j) = (fit.map.offset + fit.map.slope * psi_yx.col(j).array()).matrix();
    }
    return out;
}

EstimatedDistanceMatrix estimate_distances(const ProximityMatrix& psi, const Matrix& anchor_distances) {
    const EstimatedDistanceMatrix preliminary = preliminary_distances(psi, anchor_distances);
    EstimatedDistanceMatrix out = recalibrate(psi, preliminary);
    out.clamped_fits += preliminary.clamped_fits;
    out.degenerate_fits += preliminary.degenerate_fits;
    out.failed_columns = preliminary.failed_columns;
    return out;
}

}  // namespace ounloc
