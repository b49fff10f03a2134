#include "tndkit/features.hpp"

#include "tndkit/errors.hpp"

#include <cmath>

namespace tndkit {

namespace {

Eigen::MatrixXd map_identity(const Eigen::MatrixXd& x) { return x; }

Eigen::MatrixXd map_ps_correct(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(x.rows(), 3 * x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        out.col(3 * j) = x.col(j);
        out.col(3 * j + 1) = x.col(j).array().abs();
        out.col(3 * j + 2) = (M_PI * x.col(j).array()).sin();
    }
    return out;
}

Eigen::MatrixXd map_out_correct(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(x.rows(), 2 * x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        out.col(2 * j) = x.col(j);
        out.col(2 * j + 1) = x.col(j).array().exp();
    }
    return out;
}

} // namespace

FeatureMap feature_map(const std::string& name) {
    if (name == "identity" || name == "ps_wrong" || name == "out_wrong") {
        return FeatureMap{name, map_identity};
    }
    if (name == "ps_correct") return FeatureMap{name, map_ps_correct};
    if (name == "out_correct") return FeatureMap{name, map_out_correct};
    throw ConfigError("unknown feature map: " + name);
}

} // namespace tndkit
