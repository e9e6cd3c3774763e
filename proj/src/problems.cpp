#include "sscope/problems.hpp"

#include <cmath>
#include <Eigen/Eigenvalues>

#include "sscope/errors.hpp"

namespace sscope {

double log1pexp(double t) {
    if (t > 0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

void CostModel::check_dimension(const Eigen::VectorXd& w) const {
    if (w.size() != dimension_) {
        throw ContractViolation("cost model: vector has length " + std::to_string(w.size()) +
                                ", expected " + std::to_string(dimension_));
    }
}

double CostModel::cost(const Eigen::VectorXd& w) const {
    check_dimension(w);
    return eval_cost(w);
}

Eigen::VectorXd CostModel::gradient(const Eigen::VectorXd& w) const {
    check_dimension(w);
    return eval_grad(w);
}

Eigen::MatrixXd CostModel::hessian(const Eigen::VectorXd& w) const {
    check_dimension(w);
    return eval_hess(w);
}

Eigen::VectorXd CostModel::linearization_error(const Eigen::VectorXd& anchor,
                                               const Eigen::VectorXd& anchor_grad,
                                               const Eigen::MatrixXd& anchor_hess,
                                               const Eigen::VectorXd& w,
                                               const Eigen::VectorXd& grad_w) const {
    return grad_w - anchor_grad - anchor_hess * (w - anchor);
}

// ---------------------------------------------------------------------------
// QuadraticModel

QuadraticModel::QuadraticModel(Eigen::VectorXd curvature, double noise_std)
    : curvature_(std::move(curvature)), noise_std_(noise_std) {
    if (curvature_.size() == 0) throw ContractViolation("quadratic model: empty curvature");
    if (noise_std_ < 0) throw ContractViolation("quadratic model: negative noise std");
    dimension_ = static_cast<int>(curvature_.size());
    lipschitz_grad_ = curvature_.cwiseAbs().maxCoeff();
    lipschitz_hess_ = 0.0;
    if (curvature_.minCoeff() >= 0.0) lower_bound_ = 0.0;
}

double QuadraticModel::eval_cost(const Eigen::VectorXd& w) const {
    return 0.5 * curvature_.dot(w.cwiseProduct(w));
}

Eigen::VectorXd QuadraticModel::eval_grad(const Eigen::VectorXd& w) const {
    return curvature_.cwiseProduct(w);
}

Eigen::MatrixXd QuadraticModel::eval_hess(const Eigen::VectorXd& w) const {
    (void)w;
    return curvature_.asDiagonal();
}

Eigen::VectorXd QuadraticModel::sample_gradient(const Eigen::VectorXd& w, RngStream& rng) const {
    check_dimension(w);
    Eigen::VectorXd noise = rng.normal_vector(dimension_, noise_std_);
    return curvature_.cwiseProduct(w) + noise;
}

Eigen::VectorXd QuadraticModel::linearization_error(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                                    const Eigen::MatrixXd&, const Eigen::VectorXd&,
                                                    const Eigen::VectorXd&) const {
    // The gradient is affine, so the frozen-Hessian linearization is exact.
    return Eigen::VectorXd::Zero(dimension_);
}

nlohmann::json QuadraticModel::to_json() const {
    nlohmann::json j;
    j["kind"] = "quadratic";
    j["curvature"] = std::vector<double>(curvature_.data(), curvature_.data() + curvature_.size());
    j["feature_noise_std"] = noise_std_;
    return j;
}

// ---------------------------------------------------------------------------
// Gauss-Hermite

void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) throw ContractViolation("gauss_hermite: order must be positive");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1 > 0 ? order - 1 : 0);
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k / 2.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolver failed");

    const double mu0 = std::sqrt(M_PI);  // integral of exp(-x^2)
    nodes.resize(order);
    weights.resize(order);
    for (int i = 0; i < order; ++i) {
        nodes[i] = solver.eigenvalues()[i];
        double v0 = solver.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

// ---------------------------------------------------------------------------
// TwoLayerLogisticModel

TwoLayerLogisticModel::TwoLayerLogisticModel(Spec spec, int quadrature_order)
    : spec_(spec), order_(quadrature_order) {
    if (spec_.reg < 0) throw ContractViolation("logistic model: negative ridge weight");
    if (spec_.feature_noise_std < 0) throw ContractViolation("logistic model: negative feature noise std");
    if (order_ < 8) throw ContractViolation("logistic model: quadrature order must be >= 8");
    dimension_ = 2;
    lower_bound_ = 0.0;  // both the logistic term and the ridge are nonnegative

    std::vector<double> x, wt;
    gauss_hermite(order_, x, wt);
    u_nodes_.resize(order_);
    q_weights_.resize(order_);
    const double root2 = std::sqrt(2.0);
    double total = 0.0;
    for (int i = 0; i < order_; ++i) {
        u_nodes_[i] = spec_.label_mean + root2 * spec_.feature_noise_std * x[i];
        q_weights_[i] = wt[i];
        total += wt[i];
    }
    for (double& q : q_weights_) q /= total;

    certify_smoothness();
}

TwoLayerLogisticModel::Profile TwoLayerLogisticModel::profile_with(
    double p, const std::vector<double>& u, const std::vector<double>& q) const {
    Profile out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
        double t = -p * u[i];
        double sg = sigmoid(t);  // sigmoid(-p u)
        out.risk += q[i] * log1pexp(t);
        out.d1 += q[i] * (-u[i] * sg);
        out.d2 += q[i] * (u[i] * u[i] * sg * (1.0 - sg));
    }
    return out;
}

TwoLayerLogisticModel::Profile TwoLayerLogisticModel::profile(double p) const {
    return profile_with(p, u_nodes_, q_weights_);
}

double TwoLayerLogisticModel::eval_cost(const Eigen::VectorXd& w) const {
    double p = w[0] * w[1];
    return profile(p).risk + 0.5 * spec_.reg * w.squaredNorm();
}

Eigen::VectorXd TwoLayerLogisticModel::eval_grad(const Eigen::VectorXd& w) const {
    double p = w[0] * w[1];
    double d1 = profile(p).d1;
    Eigen::VectorXd g(2);
    g[0] = w[1] * d1 + spec_.reg * w[0];
    g[1] = w[0] * d1 + spec_.reg * w[1];
    return g;
}

Eigen::MatrixXd TwoLayerLogisticModel::eval_hess(const Eigen::VectorXd& w) const {
    double p = w[0] * w[1];
    Profile pr = profile(p);
    Eigen::MatrixXd h(2, 2);
    h(0, 0) = w[1] * w[1] * pr.d2 + spec_.reg;
    h(1, 1) = w[0] * w[0] * pr.d2 + spec_.reg;
    h(0, 1) = h(1, 0) = pr.d1 + w[0] * w[1] * pr.d2;
    return h;
}

DataSample TwoLayerLogisticModel::draw_sample(RngStream& rng) const {
    double label = rng.sign();
    double z = rng.normal();
    return DataSample{label, label * spec_.label_mean + spec_.feature_noise_std * z};
}

std::vector<DataSample> TwoLayerLogisticModel::sample_data(int count, RngStream& rng) const {
    if (count < 1) throw ContractViolation("sample_data: count must be >= 1");
    std::vector<DataSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(draw_sample(rng));
    return out;
}

Eigen::VectorXd TwoLayerLogisticModel::loss_grad(const Eigen::VectorXd& w, const DataSample& s) const {
    check_dimension(w);
    double gh = s.label * s.feature;
    double u = w[0] * w[1] * gh;
    double factor = -sigmoid(-u) * gh;
    Eigen::VectorXd g(2);
    g[0] = factor * w[1] + spec_.reg * w[0];
    g[1] = factor * w[0] + spec_.reg * w[1];
    return g;
}

Eigen::VectorXd TwoLayerLogisticModel::sample_gradient(const Eigen::VectorXd& w, RngStream& rng) const {
    return loss_grad(w, draw_sample(rng));
}

double TwoLayerLogisticModel::expected_risk(const Eigen::VectorXd& w, int order) const {
    check_dimension(w);
    if (order < 8) throw ContractViolation("expected_risk: order must be >= 8");
    std::vector<double> x, wt;
    gauss_hermite(order, x, wt);
    std::vector<double> u(order), q(order);
    const double root2 = std::sqrt(2.0);
    double total = 0.0;
    for (int i = 0; i < order; ++i) {
        u[i] = spec_.label_mean + root2 * spec_.feature_noise_std * x[i];
        total += wt[i];
    }
    for (int i = 0; i < order; ++i) q[i] = wt[i] / total;
    return profile_with(w[0] * w[1], u, q).risk + 0.5 * spec_.reg * w.squaredNorm();
}

namespace {

double spectral_norm_2x2(const Eigen::MatrixXd& h) {
    double mean = 0.5 * (h(0, 0) + h(1, 1));
    double disc = std::sqrt(0.25 * (h(0, 0) - h(1, 1)) * (h(0, 0) - h(1, 1)) + h(0, 1) * h(0, 1));
    return std::max(std::abs(mean + disc), std::abs(mean - disc));
}

}  // namespace

void TwoLayerLogisticModel::certify_smoothness() {
    // Numeric certificates over the working box [-3, 3]^2: delta bounds the
    // Hessian spectral norm, rho bounds the Hessian difference ratio between
    // neighboring grid points. Margins cover off-grid maxima.
    const int n = 49;
    const double lo = -3.0, hi = 3.0;
    const double step = (hi - lo) / (n - 1);

    std::vector<Eigen::MatrixXd> row_prev(n), row_cur(n);
    double max_norm = 0.0;
    double max_ratio = 0.0;
    Eigen::VectorXd w(2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            w[0] = lo + i * step;
            w[1] = lo + j * step;
            row_cur[j] = eval_hess(w);
            max_norm = std::max(max_norm, spectral_norm_2x2(row_cur[j]));
            if (j > 0) {
                max_ratio = std::max(max_ratio, spectral_norm_2x2(row_cur[j] - row_cur[j - 1]) / step);
            }
            if (i > 0) {
                max_ratio = std::max(max_ratio, spectral_norm_2x2(row_cur[j] - row_prev[j]) / step);
            }
        }
        std::swap(row_prev, row_cur);
    }
    lipschitz_grad_ = 1.05 * max_norm;
    lipschitz_hess_ = 1.25 * max_ratio;
}

nlohmann::json TwoLayerLogisticModel::to_json() const {
    nlohmann::json j;
    j["kind"] = "two_layer_logistic";
    j["reg"] = spec_.reg;
    j["label_mean"] = spec_.label_mean;
    j["feature_noise_std"] = spec_.feature_noise_std;
    return j;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                         const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed) {
            if (it.key() == k) { known = true; break; }
        }
        if (!known) throw ConfigError(path + "." + it.key() + ": unknown field");
    }
}

double number_or(const nlohmann::json& j, const std::string& key, double fallback,
                 const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

}  // namespace

std::unique_ptr<CostModel> model_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError(path + ".kind: missing or not a string");
    std::string kind = j["kind"].get<std::string>();

    if (kind == "quadratic") {
        reject_unknown_keys(j, {"kind", "curvature", "feature_noise_std"}, path);
        if (!j.contains("curvature") || !j["curvature"].is_array() || j["curvature"].empty())
            throw ConfigError(path + ".curvature: expected a non-empty array of numbers");
        Eigen::VectorXd c(j["curvature"].size());
        int i = 0;
        for (const auto& v : j["curvature"]) {
            if (!v.is_number()) throw ConfigError(path + ".curvature: expected a non-empty array of numbers");
            c[i++] = v.get<double>();
        }
        double noise_std = number_or(j, "feature_noise_std", 0.0, path);
        return std::make_unique<QuadraticModel>(std::move(c), noise_std);
    }
    if (kind == "two_layer_logistic") {
        reject_unknown_keys(j, {"kind", "reg", "label_mean", "feature_noise_std"}, path);
        TwoLayerLogisticModel::Spec spec;
        spec.reg = number_or(j, "reg", spec.reg, path);
        spec.label_mean = number_or(j, "label_mean", spec.label_mean, path);
        spec.feature_noise_std = number_or(j, "feature_noise_std", spec.feature_noise_std, path);
        return std::make_unique<TwoLayerLogisticModel>(spec);
    }
    throw ConfigError(path + ".kind: unknown model kind \"" + kind + "\"");
}

}  // namespace sscope
