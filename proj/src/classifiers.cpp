#include "winpred/classifiers.hpp"

#include <cmath>
#include <random>

#include "winpred/errors.hpp"

namespace winpred {

const char* to_string(Activation a) {
    switch (a) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
    }
    return "sigmoid";
}

Activation activation_from_string(const std::string& name) {
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    throw DataError("unknown activation \"" + name + "\"");
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    // exact complement of the z >= 0 branch, so sigmoid(-z) == 1 - sigmoid(z)
    return 1.0 - 1.0 / (1.0 + std::exp(z));
}

namespace {

void check_training_data(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() == 0 || x.cols() == 0) throw DataError("empty training data");
    if (x.rows() != y.size()) {
        throw DataError("row mismatch: " + std::to_string(x.rows()) + " samples vs " +
                        std::to_string(y.size()) + " labels");
    }
    if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite training data");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) throw DataError("labels must be 0 or 1");
    }
}

// Per-sample negative log-likelihood of the logit vector z, numerically
// stable for large |z|.
double mean_nll(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
    const auto za = z.array();
    return (za.max(0.0) - y.array() * za + (-za.abs()).exp().log1p()).mean();
}

Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& z) {
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

struct Objective {
    // Forward-pass values at some parameter point, so the gradient after an
    // accepted line-search step can reuse the loss evaluation's work.
    struct State {
        Eigen::VectorXd z;   // output logits
        Eigen::ArrayXXd z1;  // MLP hidden pre-activations
        Eigen::ArrayXXd a1;  // MLP hidden activations
    };

    virtual ~Objective() = default;
    virtual double loss(const Eigen::VectorXd& params, State* out = nullptr) const = 0;
    virtual Eigen::VectorXd grad(const Eigen::VectorXd& params,
                                 const State* cached = nullptr) const = 0;
};

// params = [weights(d); bias]
struct LrObjective final : Objective {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& y;
    double lambda;

    LrObjective(const Eigen::MatrixXd& x_, const Eigen::VectorXd& y_, double lambda_)
        : x(x_), y(y_), lambda(lambda_) {}

    double loss(const Eigen::VectorXd& p, State* out) const override {
        const Eigen::Index d = x.cols();
        const Eigen::VectorXd w = p.head(d);
        Eigen::VectorXd z = ((x * w).array() + p[d]).matrix();
        const double value = mean_nll(z, y) + lambda * w.squaredNorm();
        if (out != nullptr) out->z = std::move(z);
        return value;
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& p, const State* cached) const override {
        const Eigen::Index d = x.cols();
        const Eigen::VectorXd w = p.head(d);
        const Eigen::VectorXd z = cached != nullptr && cached->z.size() == x.rows()
                                      ? cached->z
                                      : Eigen::VectorXd(((x * w).array() + p[d]).matrix());
        const Eigen::VectorXd r = (sigmoid_vec(z) - y) / static_cast<double>(x.rows());
        Eigen::VectorXd g(d + 1);
        g.head(d) = x.transpose() * r + 2.0 * lambda * w;
        g[d] = r.sum();
        return g;
    }
};

Eigen::ArrayXXd activate(const Eigen::ArrayXXd& z, Activation act) {
    switch (act) {
        case Activation::Sigmoid:
            return z.unaryExpr([](double v) { return sigmoid(v); });
        case Activation::Relu:
            return z.max(0.0);
        case Activation::Tanh:
            return z.tanh();
    }
    return z;
}

Eigen::ArrayXXd activate_grad(const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& a,
                              Activation act) {
    switch (act) {
        case Activation::Sigmoid:
            return a * (1.0 - a);
        case Activation::Relu:
            return (z > 0.0).cast<double>();
        case Activation::Tanh:
            return 1.0 - a.square();
    }
    return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
}

// params = [hidden_weights row-major (H*d); hidden_bias (H);
//           output_weights (H); output_bias]
struct MlpObjective final : Objective {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& y;
    double lambda;
    int hidden;
    Activation act;

    MlpObjective(const Eigen::MatrixXd& x_, const Eigen::VectorXd& y_, double lambda_,
                 int hidden_, Activation act_)
        : x(x_), y(y_), lambda(lambda_), hidden(hidden_), act(act_) {}

    Eigen::Index size() const { return hidden * x.cols() + 2 * hidden + 1; }

    struct Parts {
        Eigen::MatrixXd w1;
        Eigen::VectorXd b1;
        Eigen::VectorXd w2;
        double b2;
    };

    Parts unpack(const Eigen::VectorXd& p) const {
        const Eigen::Index d = x.cols();
        Parts parts;
        parts.w1 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(p.data(), hidden, d);
        parts.b1 = p.segment(hidden * d, hidden);
        parts.w2 = p.segment(hidden * d + hidden, hidden);
        parts.b2 = p[p.size() - 1];
        return parts;
    }

    static void pack(const Parts& parts, Eigen::VectorXd& p) {
        const Eigen::Index h = parts.w1.rows();
        const Eigen::Index d = parts.w1.cols();
        p.resize(h * d + 2 * h + 1);
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            p.data(), h, d) = parts.w1;
        p.segment(h * d, h) = parts.b1;
        p.segment(h * d + h, h) = parts.w2;
        p[p.size() - 1] = parts.b2;
    }

    double loss(const Eigen::VectorXd& p) const override {
        const Parts parts = unpack(p);
        const Eigen::ArrayXXd z1 =
            ((x * parts.w1.transpose()).rowwise() + parts.b1.transpose()).array();
        const Eigen::ArrayXXd a1 = activate(z1, act);
        const Eigen::VectorXd z2 = ((a1.matrix() * parts.w2).array() + parts.b2).matrix();
        return mean_nll(z2, y) +
               lambda * (parts.w1.squaredNorm() + parts.w2.squaredNorm());
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& p) const override {
        const Parts parts = unpack(p);
        const double n = static_cast<double>(x.rows());
        const Eigen::ArrayXXd z1 =
            ((x * parts.w1.transpose()).rowwise() + parts.b1.transpose()).array();
        const Eigen::ArrayXXd a1 = activate(z1, act);
        const Eigen::VectorXd z2 = ((a1.matrix() * parts.w2).array() + parts.b2).matrix();

        const Eigen::VectorXd dz2 = (sigmoid_vec(z2) - y) / n;
        Parts g;
        g.w2 = a1.matrix().transpose() * dz2 + 2.0 * lambda * parts.w2;
        g.b2 = dz2.sum();
        const Eigen::ArrayXXd da1 = (dz2 * parts.w2.transpose()).array();  // n x H
        const Eigen::ArrayXXd dz1 = da1 * activate_grad(z1, a1, act);
        g.w1 = dz1.matrix().transpose() * x + 2.0 * lambda * parts.w1;
        g.b1 = dz1.colwise().sum().matrix().transpose();

        Eigen::VectorXd out;
        pack(g, out);
        return out;
    }
};

// Armijo backtracking descent; the loss is nonincreasing across accepted
// steps and the step size regrows after successes.
Eigen::VectorXd gradient_descent(const Objective& obj, Eigen::VectorXd p,
                                 const TrainConfig& cfg) {
    double step = cfg.step0;
    double loss = obj.loss(p);
    if (!std::isfinite(loss)) throw NumericError("loss diverged at epoch 0");

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const Eigen::VectorXd g = obj.grad(p);
        const double gnorm2 = g.squaredNorm();
        if (std::sqrt(gnorm2) < cfg.tol) break;
        if (!std::isfinite(gnorm2)) {
            throw NumericError("loss diverged at epoch " + std::to_string(epoch));
        }

        bool accepted = false;
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            const Eigen::VectorXd candidate = p - step * g;
            const double candidate_loss = obj.loss(candidate);
            if (std::isfinite(candidate_loss) &&
                candidate_loss <= loss - 1e-4 * step * gnorm2) {
                p = candidate;
                loss = candidate_loss;
                step *= 1.3;
                accepted = true;
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) break;  // step shrank to numerical floor
    }
    return p;
}

double rel_error(double a, double b) {
    return std::abs(a - b) / std::max(1e-6, std::abs(a) + std::abs(b));
}

double max_rel_grad_error(const Objective& obj, const Eigen::VectorXd& p, double h = 1e-5) {
    const Eigen::VectorXd analytic = obj.grad(p);
    double worst = 0.0;
    Eigen::VectorXd probe = p;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        probe[i] = p[i] + h;
        const double up = obj.loss(probe);
        probe[i] = p[i] - h;
        const double down = obj.loss(probe);
        probe[i] = p[i];
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, rel_error(analytic[i], numeric));
    }
    return worst;
}

}  // namespace

double lr_objective(const Eigen::VectorXd& weights, double bias, double lambda,
                    const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd p(weights.size() + 1);
    p << weights, bias;
    return LrObjective(x, y, lambda).loss(p);
}

double LinearModel::predict(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd xn = norm.empty() ? x : norm.apply(x);
    if (xn.size() != weights.size()) {
        throw DataError("feature length " + std::to_string(xn.size()) +
                        " does not match model dimension " + std::to_string(weights.size()));
    }
    return sigmoid(weights.dot(xn) + bias);
}

double MLPModel::predict(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd xn = norm.empty() ? x : norm.apply(x);
    if (xn.size() != hidden_weights.cols()) {
        throw DataError("feature length " + std::to_string(xn.size()) +
                        " does not match model dimension " +
                        std::to_string(hidden_weights.cols()));
    }
    const Eigen::ArrayXd z1 = (hidden_weights * xn + hidden_bias).array();
    Eigen::ArrayXd a1;
    switch (activation) {
        case Activation::Sigmoid: a1 = z1.unaryExpr([](double v) { return sigmoid(v); }); break;
        case Activation::Relu: a1 = z1.max(0.0); break;
        case Activation::Tanh: a1 = z1.tanh(); break;
    }
    return sigmoid(output_weights.dot(a1.matrix()) + output_bias);
}

LinearModel train_lr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& cfg,
                     const std::string& layout_name, const Normalizer* prefit_norm) {
    check_training_data(x, y);
    LinearModel model;
    model.norm = prefit_norm != nullptr ? *prefit_norm : Normalizer::fit(x);
    model.lambda = cfg.lambda;
    model.layout_name = layout_name;

    const Eigen::MatrixXd xn = model.norm.apply(x);
    const LrObjective obj(xn, y, cfg.lambda);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(x.cols() + 1);
    p = gradient_descent(obj, std::move(p), cfg);
    model.weights = p.head(x.cols());
    model.bias = p[x.cols()];
    return model;
}

MLPModel train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& cfg,
                   int hidden_size, Activation activation, const std::string& layout_name,
                   const Normalizer* prefit_norm) {
    check_training_data(x, y);
    if (hidden_size < 1) throw DataError("hidden_size must be positive");
    MLPModel model;
    model.norm = prefit_norm != nullptr ? *prefit_norm : Normalizer::fit(x);
    model.lambda = cfg.lambda;
    model.activation = activation;
    model.layout_name = layout_name;

    const Eigen::MatrixXd xn = model.norm.apply(x);
    const MlpObjective obj(xn, y, cfg.lambda, hidden_size, activation);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    MlpObjective::Parts init;
    init.w1.resize(hidden_size, x.cols());
    for (Eigen::Index i = 0; i < init.w1.rows(); ++i) {
        for (Eigen::Index j = 0; j < init.w1.cols(); ++j) {
            init.w1(i, j) = dist(rng) / std::sqrt(static_cast<double>(x.cols()));
        }
    }
    init.b1 = Eigen::VectorXd::Zero(hidden_size);
    init.w2.resize(hidden_size);
    for (Eigen::Index i = 0; i < init.w2.size(); ++i) {
        init.w2[i] = dist(rng) / std::sqrt(static_cast<double>(hidden_size));
    }
    init.b2 = 0.0;

    Eigen::VectorXd p;
    MlpObjective::pack(init, p);
    p = gradient_descent(obj, std::move(p), cfg);

    const MlpObjective::Parts parts = obj.unpack(p);
    model.hidden_weights = parts.w1;
    model.hidden_bias = parts.b1;
    model.output_weights = parts.w2;
    model.output_bias = parts.b2;
    return model;
}

double gradient_check(const LinearModel& model, const Eigen::MatrixXd& x,
                      const Eigen::VectorXd& y) {
    check_training_data(x, y);
    Eigen::VectorXd p(model.weights.size() + 1);
    p << model.weights, model.bias;
    return max_rel_grad_error(LrObjective(x, y, model.lambda), p);
}

double gradient_check(const MLPModel& model, const Eigen::MatrixXd& x,
                      const Eigen::VectorXd& y) {
    check_training_data(x, y);
    MlpObjective obj(x, y, model.lambda, static_cast<int>(model.hidden_weights.rows()),
                     model.activation);
    MlpObjective::Parts parts{model.hidden_weights, model.hidden_bias, model.output_weights,
                              model.output_bias};
    Eigen::VectorXd p;
    MlpObjective::pack(parts, p);
    return max_rel_grad_error(obj, p);
}

}  // namespace winpred
