#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "wassrobust/vec.hpp"

namespace wassrobust {

/// A data point z = (x, y). Only the feature block x is ever perturbed.
struct Datum {
    Vec x;
    double y = 0.0;
};

/// Augmented parameter: model weights plus the scalar dual variable.
struct ModelParams {
    Vec theta;
    double gamma = 0.0;

    std::size_t dim() const { return theta.size(); }

    /// Flattened (theta..., gamma).
    Vec flat() const;
    static ModelParams from_flat(std::span<const double> v);

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class LossKind { LeastSquares, Logistic, TinyMlp, LinearScore };

/// Smoothness constants of the loss; unset means unknown.
struct Lipschitz {
    std::optional<double> tt;  // grad_theta in theta
    std::optional<double> tz;  // grad_theta in features
    std::optional<double> zz;  // grad_features in features
    std::optional<double> zt;  // grad_features in theta
};

/// Differentiable loss l(theta; z) with analytic gradients.
///
/// * LeastSquares: 0.5 * (theta.x - y)^2
/// * Logistic:     log(1 + exp(theta.x)) - y * theta.x, labels in {0, 1}
/// * TinyMlp:      logistic loss on f(x) = v.softplus(W x + b) + c, labels in {0, 1};
///                 theta is laid out as [W (row-major, hidden x d), b, v, c]
/// * LinearScore:  theta.x, label ignored. Not a proper loss (it can be
///                 negative); it exists because its inner maximization has a
///                 closed form, which makes it a convenient verification instance.
class LossModel {
  public:
    static LossModel least_squares(std::size_t feature_dim, Lipschitz lip = {});
    static LossModel logistic(std::size_t feature_dim, Lipschitz lip = {});
    static LossModel tiny_mlp(std::size_t feature_dim, std::size_t hidden);
    static LossModel linear_score(std::size_t feature_dim);

    LossKind kind() const { return kind_; }
    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t hidden() const { return hidden_; }
    std::size_t weights_dim() const;
    const Lipschitz& lipschitz() const { return lip_; }
    bool is_classifier() const { return kind_ == LossKind::Logistic || kind_ == LossKind::TinyMlp; }

  private:
    LossModel(LossKind kind, std::size_t d, std::size_t hidden, Lipschitz lip)
        : kind_(kind), feature_dim_(d), hidden_(hidden), lip_(lip) {}

    LossKind kind_;
    std::size_t feature_dim_;
    std::size_t hidden_;
    Lipschitz lip_;
};

double loss(const LossModel& model, std::span<const double> theta, std::span<const double> x, double y);
Vec grad_theta(const LossModel& model, std::span<const double> theta, std::span<const double> x, double y);
Vec grad_features(const LossModel& model, std::span<const double> theta, std::span<const double> x, double y);

inline double loss(const LossModel& m, const ModelParams& p, const Datum& z) { return loss(m, p.theta, z.x, z.y); }
inline Vec grad_theta(const LossModel& m, const ModelParams& p, const Datum& z) { return grad_theta(m, p.theta, z.x, z.y); }
inline Vec grad_features(const LossModel& m, const ModelParams& p, const Datum& z) {
    return grad_features(m, p.theta, z.x, z.y);
}

/// Raw model output: theta.x for linear kinds, f(x) for TinyMlp.
double score(const LossModel& model, std::span<const double> theta, std::span<const double> x);

/// Hard label for classifiers (score > 0 -> 1). Throws ConfigError for regression models.
int predict(const LossModel& model, std::span<const double> theta, std::span<const double> x);

/// Curvature bound of the loss in the features at fixed theta.
///
/// Uses the declared L_zz when present; otherwise the closed form for the
/// linear kinds (||theta||^2 for least squares, ||theta||^2/4 for logistic,
/// 0 for linear score). Unknown for TinyMlp without metadata.
std::optional<double> feature_curvature(const LossModel& model, std::span<const double> theta);

/// Throws ConfigError unless theta and x have the model's dimensions.
void check_dims(const LossModel& model, std::span<const double> theta, std::span<const double> x);

double sigmoid(double t);
double softplus(double t);

}  // namespace wassrobust
