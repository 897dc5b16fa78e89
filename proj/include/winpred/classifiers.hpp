#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "winpred/normalizer.hpp"

namespace winpred {

enum class Activation { Sigmoid, Relu, Tanh };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct TrainConfig {
    double step0 = 1.0;       // initial line-search step
    int max_epochs = 5000;
    double tol = 1e-6;        // gradient-norm convergence threshold
    double lambda = 1e-6;     // L2 coefficient on weights (bias unregularized)
    std::uint64_t seed = 0;   // fixes random initialization
};

// Numerically stable sigmoid.
double sigmoid(double z);

struct LinearModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    double lambda = 0.0;
    Normalizer norm;          // empty means identity
    std::string layout_name;

    // sigma(w . norm(x) + b)
    double predict(const Eigen::VectorXd& x) const;
};

struct MLPModel {
    Eigen::MatrixXd hidden_weights;  // hidden_size x input_dim
    Eigen::VectorXd hidden_bias;
    Eigen::VectorXd output_weights;  // hidden_size
    double output_bias = 0.0;
    Activation activation = Activation::Sigmoid;
    double lambda = 0.0;
    Normalizer norm;
    std::string layout_name;

    double predict(const Eigen::VectorXd& x) const;
};

// Full-batch gradient descent with a backtracking (Armijo) line search on the
// L2-regularized mean negative log-likelihood. Deterministic given the seed.
// Throws NumericError when the loss diverges, DataError on empty/ragged data.
LinearModel train_lr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const TrainConfig& cfg, const std::string& layout_name = "",
                     const Normalizer* prefit_norm = nullptr);

MLPModel train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& cfg,
                   int hidden_size = 64, Activation activation = Activation::Sigmoid,
                   const std::string& layout_name = "",
                   const Normalizer* prefit_norm = nullptr);

// Objective value at given parameters, for independent verification.
// x is in the model's input space (already normalized when applicable).
double lr_objective(const Eigen::VectorXd& weights, double bias, double lambda,
                    const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Max relative disagreement between the analytic gradient of the full
// objective and central finite differences (step 1e-5), over all parameters.
double gradient_check(const LinearModel& model, const Eigen::MatrixXd& x,
                      const Eigen::VectorXd& y);
double gradient_check(const MLPModel& model, const Eigen::MatrixXd& x,
                      const Eigen::VectorXd& y);

}  // namespace winpred
