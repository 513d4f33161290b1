#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "efsis/error.hpp"
#include "efsis/rankers.hpp"

namespace efsis {

// Characteristic direction b ~ Sigma_shrunk^{-1} (mu_pos - mu_neg), with
// Sigma_shrunk = g * mean(diag Sigma) * I + (1 - g) * Sigma_pooled and no PCA
// pre-projection. With p << d the inverse is applied through the Woodbury
// identity on the p x p Gram matrix of class-centred samples.
std::vector<double> geode_direction(const LabeledMatrix& data, double shrinkage)
{
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto p = static_cast<Eigen::Index>(data.rows());
    const auto d = static_cast<Eigen::Index>(data.cols());
    const double n1 = static_cast<double>(data.count_positive());
    const double n0 = static_cast<double>(data.count_negative());
    if (n1 < 1 || n0 < 1) {
        throw Error("GeoDE needs both classes");
    }
    if (!(shrinkage > 0.0 && shrinkage <= 1.0)) {
        throw Error("GeoDE shrinkage must be in (0, 1]");
    }

    Eigen::Map<const RowMatrix> x(data.values().data(), p, d);
    Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd mu_neg = Eigen::VectorXd::Zero(d);
    for (Eigen::Index r = 0; r < p; ++r) {
        (data.positive(static_cast<std::size_t>(r)) ? mu_pos : mu_neg) += x.row(r).transpose();
    }
    mu_pos /= n1;
    mu_neg /= n0;

    RowMatrix centred(p, d);
    for (Eigen::Index r = 0; r < p; ++r) {
        const auto& mu = data.positive(static_cast<std::size_t>(r)) ? mu_pos : mu_neg;
        centred.row(r) = x.row(r) - mu.transpose();
    }
    const double dof = std::max(1.0, n0 + n1 - 2.0);
    const double mean_var = centred.squaredNorm() / (dof * static_cast<double>(d));
    if (!(mean_var > 0.0)) {
        throw Error("GeoDE: shrunk covariance is singular (all features constant within classes)");
    }
    const double a = shrinkage * mean_var;
    const Eigen::VectorXd diff = mu_pos - mu_neg;

    Eigen::VectorXd b;
    if (shrinkage >= 1.0) {
        b = diff / a;
    } else {
        const double ratio = a * dof / (1.0 - shrinkage); // a / ((1-g)/dof)
        Eigen::MatrixXd gram = centred * centred.transpose();
        gram.diagonal().array() += ratio;
        const Eigen::VectorXd z = gram.llt().solve(centred * diff);
        b = (diff - centred.transpose() * z) / a;
    }
    const double norm = b.norm();
    if (norm > 0.0) {
        b /= norm;
    }
    return {b.data(), b.data() + b.size()};
}

RankedList rank_geode(const LabeledMatrix& data)
{
    auto b = geode_direction(data);
    for (auto& v : b) {
        v = std::abs(v);
    }
    auto list = scores_to_ranks(b, SortOrder::Descending);
    list.ranker = Ranker::GeoDE;
    return list;
}

} // namespace efsis
