#pragma once

#include <Eigen/Dense>

namespace winpred {

// Column-wise z-score transform fit on training data. Standard deviations are
// population ones, floored at sd_floor so constant columns map to zero.
struct Normalizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;

    static Normalizer fit(const Eigen::MatrixXd& train, double sd_floor = 1e-8);

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

    bool empty() const { return mean.size() == 0; }
    Eigen::Index dim() const { return mean.size(); }
};

}  // namespace winpred
