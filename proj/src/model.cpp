#include "wassrobust/model.hpp"

#include <cmath>
#include <string>

#include "wassrobust/error.hpp"

namespace wassrobust {

Vec ModelParams::flat() const {
    Vec v(theta);
    v.push_back(gamma);
    return v;
}

ModelParams ModelParams::from_flat(std::span<const double> v) {
    if (v.empty()) throw ConfigError("flattened parameters must contain at least gamma");
    return ModelParams{Vec(v.begin(), v.end() - 1), v.back()};
}

LossModel LossModel::least_squares(std::size_t d, Lipschitz lip) { return {LossKind::LeastSquares, d, 0, lip}; }
LossModel LossModel::logistic(std::size_t d, Lipschitz lip) { return {LossKind::Logistic, d, 0, lip}; }
LossModel LossModel::linear_score(std::size_t d) { return {LossKind::LinearScore, d, 0, Lipschitz{0.0, 1.0, 0.0, 1.0}}; }

LossModel LossModel::tiny_mlp(std::size_t d, std::size_t hidden) {
    if (hidden == 0) throw ConfigError("tiny-mlp needs at least one hidden unit");
    return {LossKind::TinyMlp, d, hidden, {}};
}

std::size_t LossModel::weights_dim() const {
    if (kind_ == LossKind::TinyMlp) return hidden_ * feature_dim_ + 2 * hidden_ + 1;
    return feature_dim_;
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

void check_dims(const LossModel& model, std::span<const double> theta, std::span<const double> x) {
    if (theta.size() != model.weights_dim())
        throw ConfigError("theta has dimension " + std::to_string(theta.size()) + ", model expects " +
                          std::to_string(model.weights_dim()));
    if (x.size() != model.feature_dim())
        throw ConfigError("features have dimension " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.feature_dim()));
}

namespace {

struct MlpView {
    std::span<const double> w, b, v;
    double c;
};

MlpView mlp_view(const LossModel& m, std::span<const double> theta) {
    const std::size_t h = m.hidden(), d = m.feature_dim();
    return {theta.subspan(0, h * d), theta.subspan(h * d, h), theta.subspan(h * d + h, h), theta[h * d + 2 * h]};
}

// Pre-activations a_h = W_h . x + b_h.
Vec mlp_preact(const LossModel& m, const MlpView& p, std::span<const double> x) {
    const std::size_t h = m.hidden(), d = m.feature_dim();
    Vec a(h);
    for (std::size_t j = 0; j < h; ++j) a[j] = dot(p.w.subspan(j * d, d), x) + p.b[j];
    return a;
}

double mlp_output(const MlpView& p, const Vec& a) {
    double f = p.c;
    for (std::size_t j = 0; j < a.size(); ++j) f += p.v[j] * softplus(a[j]);
    return f;
}

}  // namespace

double score(const LossModel& model, std::span<const double> theta, std::span<const double> x) {
    check_dims(model, theta, x);
    if (model.kind() == LossKind::TinyMlp) {
        const auto p = mlp_view(model, theta);
        return mlp_output(p, mlp_preact(model, p, x));
    }
    return dot(theta, x);
}

double loss(const LossModel& model, std::span<const double> theta, std::span<const double> x, double y) {
    const double s = score(model, theta, x);
    switch (model.kind()) {
        case LossKind::LeastSquares: return 0.5 * (s - y) * (s - y);
        case LossKind::Logistic:
        case LossKind::TinyMlp: return softplus(s) - y * s;
        case LossKind::LinearScore: return s;
    }
    return 0.0;
}

Vec grad_theta(const LossModel& model, std::span<const double> theta, std::span<const double> x, double y) {
    check_dims(model, theta, x);
    switch (model.kind()) {
        case LossKind::LeastSquares: return scaled(dot(theta, x) - y, x);
        case LossKind::Logistic: return scaled(sigmoid(dot(theta, x)) - y, x);
        case LossKind::LinearScore: return Vec(x.begin(), x.end());
        case LossKind::TinyMlp: break;
    }
    const std::size_t h = model.hidden(), d = model.feature_dim();
    const auto p = mlp_view(model, theta);
    const Vec a = mlp_preact(model, p, x);
    const double r = sigmoid(mlp_output(p, a)) - y;
    Vec g(theta.size(), 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        const double back = r * p.v[j] * sigmoid(a[j]);
        for (std::size_t i = 0; i < d; ++i) g[j * d + i] = back * x[i];
        g[h * d + j] = back;
        g[h * d + h + j] = r * softplus(a[j]);
    }
    g[h * d + 2 * h] = r;
    return g;
}

Vec grad_features(const LossModel& model, std::span<const double> theta, std::span<const double> x, double y) {
    check_dims(model, theta, x);
    switch (model.kind()) {
        case LossKind::LeastSquares: return scaled(dot(theta, x) - y, theta);
        case LossKind::Logistic: return scaled(sigmoid(dot(theta, x)) - y, theta);
        case LossKind::LinearScore: return Vec(theta.begin(), theta.end());
        case LossKind::TinyMlp: break;
    }
    const std::size_t h = model.hidden(), d = model.feature_dim();
    const auto p = mlp_view(model, theta);
    const Vec a = mlp_preact(model, p, x);
    const double r = sigmoid(mlp_output(p, a)) - y;
    Vec g(d, 0.0);
    for (std::size_t j = 0; j < h; ++j) axpy(r * p.v[j] * sigmoid(a[j]), p.w.subspan(j * d, d), g);
    return g;
}

int predict(const LossModel& model, std::span<const double> theta, std::span<const double> x) {
    if (!model.is_classifier()) throw ConfigError("predict requires a classification model");
    return score(model, theta, x) > 0.0 ? 1 : 0;
}

std::optional<double> feature_curvature(const LossModel& model, std::span<const double> theta) {
    if (model.lipschitz().zz) return model.lipschitz().zz;
    switch (model.kind()) {
        case LossKind::LeastSquares: return norm2_squared(theta);
        case LossKind::Logistic: return 0.25 * norm2_squared(theta);
        case LossKind::LinearScore: return 0.0;
        case LossKind::TinyMlp: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace wassrobust
