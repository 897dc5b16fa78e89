#include "winpred/normalizer.hpp"

#include "winpred/errors.hpp"

namespace winpred {

Normalizer Normalizer::fit(const Eigen::MatrixXd& train, double sd_floor) {
    if (train.rows() == 0) throw DataError("cannot fit a normalizer on an empty set");
    Normalizer n;
    n.mean = train.colwise().mean();
    const Eigen::MatrixXd centered = train.rowwise() - n.mean.transpose();
    n.sd = (centered.array().square().colwise().mean()).sqrt();
    n.sd = n.sd.cwiseMax(sd_floor);
    return n;
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& v) const {
    if (empty()) return v;
    if (v.size() != mean.size()) {
        throw DataError("normalizer dimension mismatch: " + std::to_string(v.size()) +
                        " vs " + std::to_string(mean.size()));
    }
    return (v - mean).cwiseQuotient(sd);
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& x) const {
    if (empty()) return x;
    if (x.cols() != mean.size()) {
        throw DataError("normalizer dimension mismatch: " + std::to_string(x.cols()) +
                        " vs " + std::to_string(mean.size()));
    }
    return (x.rowwise() - mean.transpose()).array().rowwise() /
           sd.transpose().array();
}

}  // namespace winpred
