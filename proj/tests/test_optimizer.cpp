#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sscope/errors.hpp"
#include "sscope/optimizer.hpp"

using namespace sscope;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

OracleConfig exact_cfg() { return OracleConfig{}; }

OracleConfig perturbed_cfg(double sv) {
    OracleConfig c;
    c.kind = OracleKind::PerturbedExact;
    c.perturbation_std = sv;
    return c;
}

}  // namespace

TEST_CASE("zero step size keeps the trajectory constant") {
    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(perturbed_cfg(1.0), model);
    RunConfig cfg{0.0, 50, 9, 1};
    Trajectory traj = run(model, oracle, vec2(0.3, -0.2), cfg);
    REQUIRE(traj.size() == 51);
    for (const auto& w : traj.iterates) CHECK(w == vec2(0.3, -0.2));
}

TEST_CASE("one exact step on the saddle quadratic") {
    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(exact_cfg(), model);
    RunConfig cfg{0.1, 1, 0, 1};
    Trajectory traj = run(model, oracle, vec2(1, 1), cfg);
    REQUIRE(traj.size() == 2);
    CHECK(traj.iterates[1][0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(traj.iterates[1][1] == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("exact descent on a convex quadratic matches the closed form") {
    QuadraticModel model(vec2(1, 1));
    GradientOracle oracle(exact_cfg(), model);
    RunConfig cfg{0.1, 200, 0, 1};
    Trajectory traj = run(model, oracle, vec2(1, 0), cfg);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double expected = std::pow(0.9, static_cast<double>(traj.indices[k]));
        CHECK(std::abs(traj.iterates[k][0] - expected) <= 1e-10 * std::max(1.0, expected));
        CHECK(traj.iterates[k][1] == 0.0);
    }
    // Monotone descent while mu <= 1/delta.
    for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.costs[k] <= traj.costs[k - 1]);
}

TEST_CASE("exact descent is monotone on the logistic model too") {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    GradientOracle oracle(exact_cfg(), model);
    RunConfig cfg{0.1, 400, 0, 1};  // mu <= 1/delta (delta ~ 3.4)
    Trajectory traj = run(model, oracle, vec2(-0.5, 0.5), cfg);
    for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.costs[k] <= traj.costs[k - 1] + 1e-15);
}

TEST_CASE("seed determinism and step-noise consistency") {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    OracleConfig cfg;
    cfg.kind = OracleKind::PerturbedStochastic;
    cfg.perturbation_std = 0.8;
    GradientOracle oracle(cfg, model);
    RunConfig rc{0.02, 300, 1234, 1};
    Trajectory a = run(model, oracle, vec2(-0.5, 0.5), rc);
    Trajectory b = run(model, oracle, vec2(-0.5, 0.5), rc);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.iterates[k] == b.iterates[k]);
        CHECK(a.costs[k] == b.costs[k]);
    }

    // |w_{i+1} - w_i| <= mu (|grad J(w_i)| + |s_{i+1}|), reconstructed from
    // the recorded gradient and noise norms.
    for (std::size_t k = 1; k < a.size(); ++k) {
        double step = (a.iterates[k] - a.iterates[k - 1]).norm();
        double bound = rc.step_size * (std::sqrt(a.grad_norm_sq[k - 1]) +
                                       std::sqrt(a.noise_norm_sq[k]));
        CHECK(step <= bound * (1 + 1e-12) + 1e-15);
    }
}

TEST_CASE("record stride subsamples and keeps the final iterate") {
    QuadraticModel model(vec2(1, 1));
    GradientOracle oracle(exact_cfg(), model);
    RunConfig cfg{0.01, 103, 0, 10};
    Trajectory traj = run(model, oracle, vec2(1, 1), cfg);
    CHECK(traj.indices.front() == 0);
    CHECK(traj.indices.back() == 103);
    CHECK(traj.size() == 12);  // 0,10,...,100,103
}

TEST_CASE("divergence raises a labeled error") {
    QuadraticModel model(vec2(-1.0, -1.0));  // concave: exact GD runs away
    GradientOracle oracle(exact_cfg(), model);
    RunConfig cfg{1.5, 100000, 0, 1};
    try {
        run(model, oracle, vec2(1, 1), cfg);
        FAIL("expected DivergedError");
    } catch (const DivergedError& e) {
        CHECK(e.last_finite_index >= 1);
    }
}

TEST_CASE("coupled run on a quadratic has exactly zero deviation") {
    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(perturbed_cfg(1.0), model);
    CoupledPair pair = run_coupled(model, oracle, vec2(0.2, -0.1), 500, 0.02, 77);
    REQUIRE(pair.deviation_sq.size() == 501);
    for (double d : pair.deviation_sq) CHECK(d == 0.0);
    for (std::size_t k = 0; k < pair.true_traj.size(); ++k) {
        CHECK(pair.true_traj.iterates[k] == pair.model_traj.iterates[k]);
    }
}

TEST_CASE("coupled deviation at j = 0 is zero and noise is shared") {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    OracleConfig cfg;
    cfg.kind = OracleKind::TargetedStochastic;
    cfg.perturbation_std = 1.0;
    cfg.direction = vec2(1, 1).normalized();
    GradientOracle oracle(cfg, model);

    CoupledPair pair = run_coupled(model, oracle, vec2(0, 0), 200, 0.01, 5);
    CHECK(pair.deviation_sq[0] == 0.0);
    CHECK(pair.true_traj.noise_norm_sq == pair.model_traj.noise_norm_sq);

    // Cross-validate the gap recursion against directly stepping the
    // short-term model with the logged shared noise.
    const Eigen::VectorXd anchor = pair.anchor;
    const Eigen::VectorXd g0 = model.gradient(anchor);
    const Eigen::MatrixXd h0 = model.hessian(anchor);
    Eigen::VectorXd wp = anchor;
    for (std::size_t j = 1; j < pair.true_traj.size(); ++j) {
        const Eigen::VectorXd& w_prev = pair.true_traj.iterates[j - 1];
        const Eigen::VectorXd& w_next = pair.true_traj.iterates[j];
        // Recover the consumed noise from the true step: w+ = w - mu(grad - s).
        Eigen::VectorXd direction = (w_prev - w_next) / 0.01;
        Eigen::VectorXd s = model.gradient(w_prev) - direction;
        wp = wp - 0.01 * (g0 + h0 * (wp - anchor)) + 0.01 * s;
        double dev = (w_next - wp).squaredNorm();
        CHECK(std::abs(dev - pair.deviation_sq[j]) < 1e-12 * std::max(1.0, dev));
    }
}

TEST_CASE("deviation moments validate the ensemble and handle edge cases") {
    QuadraticModel model(vec2(1, 1));
    GradientOracle exact(exact_cfg(), model);

    // Exact oracle anchored at the stationary point: everything stays put.
    std::vector<CoupledPair> ens;
    for (int k = 0; k < 4; ++k) ens.push_back(run_coupled(model, exact, vec2(0, 0), 50, 0.05, k));
    for (int order : {2, 3, 4}) {
        DeviationMoments m = deviation_moments(ens, order);
        for (double v : m.anchor_moment) CHECK(v == 0.0);
        for (double v : m.coupling_gap_sq) CHECK(v == 0.0);
    }

    // mu = 0: no motion.
    std::vector<CoupledPair> still;
    GradientOracle noisy(perturbed_cfg(1.0), model);
    for (int k = 0; k < 4; ++k) still.push_back(run_coupled(model, noisy, vec2(0.5, 0.5), 20, 0.0, k));
    DeviationMoments m0 = deviation_moments(still, 2);
    for (double v : m0.anchor_moment) CHECK(v == 0.0);

    CHECK_THROWS_AS(deviation_moments({}, 2), ContractViolation);
    std::vector<CoupledPair> mixed = {run_coupled(model, exact, vec2(0, 0), 10, 0.05, 0),
                                      run_coupled(model, exact, vec2(0, 0), 10, 0.01, 0)};
    CHECK_THROWS_AS(deviation_moments(mixed, 2), ContractViolation);
}

TEST_CASE("trajectory CSV layout") {
    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(exact_cfg(), model);
    RunConfig cfg{0.1, 3, 0, 1};
    Trajectory traj = run(model, oracle, vec2(1, 1), cfg);

    auto path = std::filesystem::temp_directory_path() / "sscope_test_traj.csv";
    write_trajectory_csv(traj, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,w_0,w_1,cost,grad_norm_sq,region");
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == 4);
    std::filesystem::remove(path);
}

TEST_CASE("coupled CSV layout") {
    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(perturbed_cfg(0.5), model);
    CoupledPair pair = run_coupled(model, oracle, vec2(0.1, 0.1), 5, 0.05, 3);

    auto path = std::filesystem::temp_directory_path() / "sscope_test_coupled.csv";
    write_coupled_csv(pair, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,w_0,w_1,cost,grad_norm_sq,region,model_w_0,model_w_1,deviation_sq");
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == 6);
    std::filesystem::remove(path);
}
