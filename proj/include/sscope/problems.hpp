#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sscope/rng.hpp"

namespace sscope {

/// One streaming observation for the two-layer logistic problem.
/// label is +1 or -1; feature is the scalar input h.
struct DataSample {
    double label;
    double feature;
};

/// A differentiable expected risk with hand-coded derivatives and numeric
/// smoothness certificates. Instances are immutable after construction and
/// safe to share across threads.
class CostModel {
public:
    virtual ~CostModel() = default;

    int dimension() const { return dimension_; }
    /// Gradient-Lipschitz constant (certified upper bound).
    double lipschitz_grad() const { return lipschitz_grad_; }
    /// Hessian-Lipschitz constant (certified upper bound).
    double lipschitz_hess() const { return lipschitz_hess_; }
    /// Global lower bound on the cost, when one is known.
    std::optional<double> lower_bound() const { return lower_bound_; }

    double cost(const Eigen::VectorXd& w) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& w) const;

    /// Single-sample stochastic gradient estimate at w (one fresh draw).
    virtual Eigen::VectorXd sample_gradient(const Eigen::VectorXd& w, RngStream& rng) const = 0;

    /// grad_w - anchor_grad - anchor_hess * (w - anchor). Models whose Hessian
    /// is constant override this to return an exact zero, which keeps coupled
    /// trajectories bitwise identical on such models.
    virtual Eigen::VectorXd linearization_error(const Eigen::VectorXd& anchor,
                                                const Eigen::VectorXd& anchor_grad,
                                                const Eigen::MatrixXd& anchor_hess,
                                                const Eigen::VectorXd& w,
                                                const Eigen::VectorXd& grad_w) const;

    virtual nlohmann::json to_json() const = 0;

protected:
    void check_dimension(const Eigen::VectorXd& w) const;

    virtual double eval_cost(const Eigen::VectorXd& w) const = 0;
    virtual Eigen::VectorXd eval_grad(const Eigen::VectorXd& w) const = 0;
    virtual Eigen::MatrixXd eval_hess(const Eigen::VectorXd& w) const = 0;

    int dimension_ = 0;
    double lipschitz_grad_ = 0.0;
    double lipschitz_hess_ = 0.0;
    std::optional<double> lower_bound_;
};

/// J(w) = 1/2 sum_m curvature_m w_m^2. The Hessian is the constant matrix
/// diag(curvature); a strict saddle sits at the origin iff some entry is
/// negative. Stochastic gradients add N(0, noise_std^2 I) to the true
/// gradient, so the induced noise covariance is state independent.
class QuadraticModel final : public CostModel {
public:
    explicit QuadraticModel(Eigen::VectorXd curvature, double noise_std = 0.0);

    const Eigen::VectorXd& curvature() const { return curvature_; }
    double noise_std() const { return noise_std_; }

    Eigen::VectorXd sample_gradient(const Eigen::VectorXd& w, RngStream& rng) const override;
    Eigen::VectorXd linearization_error(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                        const Eigen::MatrixXd&, const Eigen::VectorXd&,
                                        const Eigen::VectorXd&) const override;
    nlohmann::json to_json() const override;

protected:
    double eval_cost(const Eigen::VectorXd& w) const override;
    Eigen::VectorXd eval_grad(const Eigen::VectorXd& w) const override;
    Eigen::MatrixXd eval_hess(const Eigen::VectorXd& w) const override;

private:
    Eigen::VectorXd curvature_;
    double noise_std_;
};

/// Gauss-Hermite nodes and weights for the weight function exp(-x^2),
/// computed by Golub-Welsch on the Jacobi matrix.
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Two-layer scalar network with logistic loss and ridge term:
///   Q(w1, w2; label, h) = log(1 + exp(-label * w1 * w2 * h)) + reg/2 * |w|^2
/// Data law: label uniform on {-1, +1}, h = label * label_mean + std * z with
/// z standard normal, so u = label * h ~ N(label_mean, std^2). The expected
/// risk has no closed form and is evaluated by Gauss-Hermite quadrature over
/// the law of u. The cost is even in w and, for label_mean > 0, has two
/// symmetric minima and a strict saddle at the origin whose descent
/// eigenvector is proportional to (1, 1).
class TwoLayerLogisticModel final : public CostModel {
public:
    struct Spec {
        double reg = 0.1;                // ridge weight
        double label_mean = 1.0;         // E[label * h]
        double feature_noise_std = 0.5;  // std of h around label * label_mean
    };

    explicit TwoLayerLogisticModel(Spec spec, int quadrature_order = 64);

    const Spec& spec() const { return spec_; }
    int quadrature_order() const { return order_; }

    std::vector<DataSample> sample_data(int count, RngStream& rng) const;
    DataSample draw_sample(RngStream& rng) const;

    /// Per-sample gradient of Q at w for a given observation.
    Eigen::VectorXd loss_grad(const Eigen::VectorXd& w, const DataSample& sample) const;

    /// Expected risk evaluated with a fresh quadrature table of the given
    /// order (order >= 8). Deterministic; used as a convergence oracle.
    double expected_risk(const Eigen::VectorXd& w, int order) const;

    Eigen::VectorXd sample_gradient(const Eigen::VectorXd& w, RngStream& rng) const override;
    nlohmann::json to_json() const override;

protected:
    double eval_cost(const Eigen::VectorXd& w) const override;
    Eigen::VectorXd eval_grad(const Eigen::VectorXd& w) const override;
    Eigen::MatrixXd eval_hess(const Eigen::VectorXd& w) const override;

private:
    struct Profile {
        double risk;  // E log(1 + exp(-p u))
        double d1;    // d/dp of the above
        double d2;    // d^2/dp^2
    };
    Profile profile(double p) const;
    Profile profile_with(double p, const std::vector<double>& u, const std::vector<double>& q) const;
    void certify_smoothness();

    Spec spec_;
    int order_;
    std::vector<double> u_nodes_;   // quadrature abscissae in u-space
    std::vector<double> q_weights_; // probability weights, sum to 1
};

double log1pexp(double t);
double sigmoid(double t);

/// Parses a model document {"kind": ...}. Unknown fields are rejected with a
/// path-qualified message; `path` is the prefix used in messages.
std::unique_ptr<CostModel> model_from_json(const nlohmann::json& j, const std::string& path = "$.model");

}  // namespace sscope
