// Acceptance suite: one check per shipped claim, each printed as a PASS/FAIL
// line with the measured statistic and its pinned tolerance. Exit status is
// the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "sscope/analysis.hpp"
#include "sscope/commands.hpp"
#include "sscope/config.hpp"
#include "sscope/io.hpp"
#include "sscope/parallel.hpp"
#include "sscope/verify.hpp"

using namespace sscope;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRoot = 20250809;

int g_failures = 0;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name << " — "
              << detail << "\n";
    if (!passed) ++g_failures;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

OracleConfig targeted_cfg(double sv) {
    OracleConfig c;
    c.kind = OracleKind::TargetedStochastic;
    c.perturbation_std = sv;
    c.direction = vec2(1, 1).normalized();
    return c;
}

OracleConfig perturbed_exact_cfg(double sv) {
    OracleConfig c;
    c.kind = OracleKind::PerturbedExact;
    c.perturbation_std = sv;
    return c;
}

OracleConfig perturbed_stochastic_cfg(double sv) {
    OracleConfig c;
    c.kind = OracleKind::PerturbedStochastic;
    c.perturbation_std = sv;
    return c;
}

ClassifierParams params_for(double mu, double delta, double sigma_sq, double tau = 0.1) {
    ClassifierParams p;
    p.step_size = mu;
    p.tau = tau;
    p.pi = 0.5;
    p.delta = delta;
    p.beta = 0.0;
    p.sigma_sq = sigma_sq;
    return p;
}

std::string g(double x) { return g17(x); }

// 1. Saddle geometry of the simulation model.
void criterion_1() {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    Eigen::MatrixXd h = model.hessian(vec2(0, 0));
    SpectralSplit split = spectral_split(h);
    bool ok = split.eigvals_nonneg.size() == 1 && split.eigvals_neg.size() == 1;
    double e_pos = ok ? split.eigvals_nonneg[0] : 0;
    double e_neg = ok ? split.eigvals_neg[0] : 0;
    Eigen::VectorXd v = ok ? Eigen::VectorXd(split.basis_neg.col(0)) : Eigen::VectorXd::Zero(2);
    double vec_err = (v - vec2(1, 1).normalized()).norm();
    ok = ok && std::abs(e_pos - 0.6) < 1e-8 && std::abs(e_neg + 0.4) < 1e-8 && vec_err < 1e-8;
    report(1, "saddle geometry", ok,
           "eigs=(" + g(e_pos) + "," + g(e_neg) + ") vs (0.6,-0.4), min-eigvec err=" + g(vec_err));
}

// 2. Basin symmetry from w0 = (-0.5, 0.5) under targeted noise: the terminal
// basin of each run, read off the projection onto the saddle's descent
// direction (1, 1)/sqrt(2).
void criterion_2() {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    GradientOracle oracle(targeted_cfg(1.0), model);
    const long long n = 400;
    std::vector<int> basin(n, 0);
    std::vector<double> product(n, 0.0);
    parallel_for(n, [&](long long k) {
        RunConfig cfg;
        cfg.step_size = 0.01;
        cfg.horizon = 6000;
        cfg.seed = splitmix64(kRoot + 2 + 0x9E3779B97F4A7C15ull * (k + 1));
        cfg.record_stride = cfg.horizon;
        Trajectory traj = run(model, oracle, vec2(-0.5, 0.5), cfg);
        const Eigen::VectorXd& w = traj.iterates.back();
        basin[k] = (w[0] + w[1]) >= 0 ? 1 : -1;
        product[k] = w[0] * w[1];
    });
    long long positive = 0;
    bool settled = true;
    for (long long k = 0; k < n; ++k) {
        if (basin[k] > 0) ++positive;
        settled = settled && product[k] > 0.5;  // near a minimum, not the saddle
    }
    double rate = static_cast<double>(positive) / static_cast<double>(n);
    bool ok = settled && std::abs(rate - 0.5) <= 0.1;
    report(2, "basin symmetry", ok,
           "positive-basin frequency=" + g(rate) + " (target 0.5 +/- 0.1), all runs settled=" +
               (settled ? "yes" : "no") + ", n=400");
}

// 3. Escape-time O(1/mu) scaling on the logistic saddle.
void criterion_3() {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    GradientOracle oracle(targeted_cfg(1.0), model);
    const std::vector<double> mus{0.04, 0.02, 0.01};
    std::vector<double> medians;
    for (double mu : mus) {
        ClassifierParams p = params_for(mu, model.lipschitz_grad(), 1.0);
        long long horizon = static_cast<long long>(std::ceil(80.0 / mu));
        EscapeReport rep =
            run_escape_ensemble(model, oracle, p, vec2(0, 0), horizon, 200, kRoot + 3);
        medians.push_back(rep.median_escape);
    }
    bool finite = std::isfinite(medians[0]) && std::isfinite(medians[1]) && std::isfinite(medians[2]);
    double slope = finite ? loglog_slope(mus, medians) : 0.0;
    bool ok = finite && slope >= -1.3 && slope <= -0.7;
    report(3, "escape-time scaling", ok,
           "medians=(" + g(medians[0]) + "," + g(medians[1]) + "," + g(medians[2]) +
               "), slope=" + g(slope) + " (target [-1.3,-0.7])");
}

// 4. One-step descent in G / bounded ascent in M.
void criterion_4() {
    const double mu = 0.01;
    {
        QuadraticModel saddle(vec2(1, -1));
        GradientOracle oracle(perturbed_stochastic_cfg(1.0), saddle);
        ClassifierParams p = params_for(mu, 1.0, 2.0);
        SampleBox box{vec2(-2, -2), vec2(2, 2)};
        DescentReport r = verify_descent(saddle, oracle, p, Region::G, 10000, box, kRoot + 41);
        report(4, "one-step descent in G", r.passed,
               "mean=" + g(r.mean_delta) + " <= bound " + g(r.bound) + " + 3se (se=" +
                   g(r.stderr_mean) + "), n=" + std::to_string(r.n));
    }
    {
        QuadraticModel convex(vec2(1, 1));
        GradientOracle oracle(perturbed_stochastic_cfg(1.0), convex);
        ClassifierParams p = params_for(mu, 1.0, 2.0);
        SampleBox box{vec2(-0.2, -0.2), vec2(0.2, 0.2)};
        DescentReport r = verify_descent(convex, oracle, p, Region::M, 10000, box, kRoot + 42);
        report(4, "one-step ascent bound in M", r.passed,
               "mean=" + g(r.mean_delta) + " <= bound " + g(r.bound) + " + 3se (se=" +
                   g(r.stderr_mean) + "), n=" + std::to_string(r.n));
    }
}

// 5. Short-term-model deviation exponents, anchored at the strict saddle.
//
// The second- and fourth-moment exponents are tight there and come out
// cleanly. The coupling-gap band (2 +/- 0.3) encodes the generic envelope
// rate, but this cost is even, so the third-derivative tensor vanishes at
// the origin and the realized gap decays like mu^3 (faster than the mu^2
// envelope, which therefore still holds). The measured slope ~2.9 fails the
// two-sided band by construction of the model; the check is kept as pinned
// rather than loosened. Nearby non-symmetric anchors only trade this
// overshoot against drift contamination of the other two clauses, so no
// anchor makes all three robustly tight at 200 seeds.
void criterion_5() {
    TwoLayerLogisticModel model({0.1, 1.0, 0.5});
    GradientOracle oracle(targeted_cfg(1.0), model);
    const Eigen::VectorXd anchor = vec2(0, 0);
    const double T = 2.0;
    const std::vector<double> mus{0.04, 0.02, 0.01};
    const long long n_seeds = 200;

    bool anchor_in_h = true;
    std::vector<double> max_m2, max_m4, max_gap;
    for (double mu : mus) {
        ClassifierParams p = params_for(mu, model.lipschitz_grad(), 1.0);
        anchor_in_h = anchor_in_h && classify(anchor, model, p) == Region::H;

        long long horizon = static_cast<long long>(std::llround(T / mu));
        std::vector<CoupledPair> ensemble(n_seeds);
        parallel_for(n_seeds, [&](long long k) {
            std::uint64_t seed = splitmix64(kRoot + 5 + 0x9E3779B97F4A7C15ull * (k + 1));
            ensemble[k] = run_coupled(model, oracle, anchor, horizon, mu, seed);
        });
        DeviationMoments m2 = deviation_moments(ensemble, 2);
        DeviationMoments m4 = deviation_moments(ensemble, 4);
        max_m2.push_back(*std::max_element(m2.anchor_moment.begin(), m2.anchor_moment.end()));
        max_m4.push_back(*std::max_element(m4.anchor_moment.begin(), m4.anchor_moment.end()));
        max_gap.push_back(
            *std::max_element(m2.coupling_gap_sq.begin(), m2.coupling_gap_sq.end()));
    }
    report(5, "anchor lies in H for every step size", anchor_in_h,
           "classify(origin) == H for mu in {0.04, 0.02, 0.01}");

    double s2 = loglog_slope(mus, max_m2);
    double s4 = loglog_slope(mus, max_m4);
    double sg = loglog_slope(mus, max_gap);
    report(5, "deviation exponent E|w~|^2", std::abs(s2 - 1.0) <= 0.3,
           "slope=" + g(s2) + " (target 1 +/- 0.3)");
    report(5, "deviation exponent E|w~|^4", std::abs(s4 - 2.0) <= 0.3,
           "slope=" + g(s4) + " (target 2 +/- 0.3)");
    report(5, "deviation exponent E|w~-w~'|^2", std::abs(sg - 2.0) <= 0.3,
           "slope=" + g(sg) + " (target 2 +/- 0.3; measured decay at the even-symmetry anchor "
           "is ~mu^3, faster than the mu^2 envelope, so the band is missed from the safe side)");

    QuadraticModel quad(vec2(1, -1));
    GradientOracle qo(perturbed_exact_cfg(1.0), quad);
    CoupledPair pair = run_coupled(quad, qo, vec2(0, 0), 500, 0.02, kRoot + 55);
    double worst = *std::max_element(pair.deviation_sq.begin(), pair.deviation_sq.end());
    report(5, "coupled deviation exactly 0 on a quadratic", worst == 0.0,
           "max deviation_sq=" + g(worst));
}

// 6. Limiting-ratio identity.
void criterion_6() {
    bool all_ok = true;
    std::ostringstream detail;
    for (int k = 1; k <= 3; ++k) {
        LimitingRatio r = limiting_ratio(1e-4, 1.0, k, 1.0);
        all_ok = all_ok && r.rel_error < 1e-3;
        detail << "k=" << k << " rel_err=" << g(r.rel_error) << " ";
    }
    report(6, "limiting-ratio identity", all_ok, detail.str() + "(tolerance 1e-3)");
}

// 7. Escape-time prediction on the quadratic saddle.
void criterion_7() {
    long long exact_value = predict_escape_time(2, 1.0, 1.0, 0.01, 0.4);
    report(7, "predicted i_s exact value", exact_value == 202,
           "predict_escape_time(2,1,1,0.01,0.4)=" + std::to_string(exact_value) + " (expected 202)");

    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(perturbed_exact_cfg(1.0), model);
    for (double mu : {0.02, 0.01}) {
        ClassifierParams p = params_for(mu, 1.0, 2.0);
        long long predicted = predict_escape_time(2, 2.0, 1.0, mu, 1.0);  // tau = |lambda_min| = 1
        long long horizon = static_cast<long long>(std::ceil(60.0 / mu));
        EscapeReport rep = run_escape_ensemble(model, oracle, p, vec2(0, 0), horizon, 200,
                                               kRoot + 7 + static_cast<std::uint64_t>(1.0 / mu));
        double med = rep.median_escape;
        bool ok = std::isfinite(med) && med >= 0.5 * predicted && med <= 2.0 * predicted;
        report(7, "measured median within factor 2 (mu=" + g(mu) + ")", ok,
               "median=" + g(med) + " vs predicted " + std::to_string(predicted));
    }
}

// 8. Gaussian noise certificates at 1e5 draws.
void criterion_8() {
    QuadraticModel model(vec2(1, -1));
    GradientOracle oracle(perturbed_exact_cfg(1.0), model);
    RngStream rng(kRoot + 8);
    const long long n = 100000;
    const Eigen::VectorXd w = vec2(0.3, -0.2);
    const Eigen::VectorXd grad = model.gradient(w);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    double m4 = 0.0;
    for (long long i = 0; i < n; ++i) {
        Eigen::VectorXd s = grad - oracle.draw_direction(w, rng);
        mean += s;
        cov += s * s.transpose();
        m4 += s.squaredNorm() * s.squaredNorm();
    }
    mean /= static_cast<double>(n);
    cov /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    bool fourth_ok = std::abs(m4 - 8.0) <= 0.4;  // 5% of M(M+2) sv^4 = 8
    report(8, "gaussian fourth moment", fourth_ok, "E|v|^4=" + g(m4) + " vs 8 +/- 5%");

    double mean_bound = 4.0 / std::sqrt(static_cast<double>(n));  // 4 sigma/sqrt(n), sigma = 1
    bool mean_ok = mean.norm() < mean_bound;
    report(8, "conditional zero mean", mean_ok,
           "|mean|=" + g(mean.norm()) + " < " + g(mean_bound));

    bool cov_ok = std::abs(cov(0, 0) - 1.0) < 0.05 && std::abs(cov(1, 1) - 1.0) < 0.05 &&
                  std::abs(cov(0, 1)) < 0.05;
    report(8, "isotropic covariance", cov_ok,
           "diag=(" + g(cov(0, 0)) + "," + g(cov(1, 1)) + "), offdiag=" + g(cov(0, 1)) +
               " (5% of I)");
}

// 9. Escape is noise-driven: the exact recursion stays at the saddle.
void criterion_9() {
    QuadraticModel model(vec2(1, -1));
    ClassifierParams p = params_for(0.01, 1.0, 2.0);

    GradientOracle exact(OracleConfig{}, model);
    EscapeReport stuck = run_escape_ensemble(model, exact, p, vec2(0, 0), 100000, 1, kRoot + 91);
    bool stays = stuck.censor_rate == 1.0;
    report(9, "noiseless dynamics never escape", stays,
           "censor_rate=" + g(stuck.censor_rate) + " over 1e5 iterations");

    bool all_escape = true;
    std::ostringstream detail;
    for (double sv : {0.25, 1.0}) {
        GradientOracle noisy(perturbed_exact_cfg(sv), model);
        ClassifierParams psv = params_for(0.01, 1.0, 2.0 * sv * sv);
        EscapeReport rep = run_escape_ensemble(model, noisy, psv, vec2(0, 0), 100000, 20, kRoot + 92);
        all_escape = all_escape && rep.censor_rate == 0.0;
        detail << "sv=" << g(sv) << " censor_rate=" << g(rep.censor_rate) << " median="
               << g(rep.median_escape) << " ";
    }
    report(9, "any positive perturbation escapes", all_escape, detail.str());
}

// 10. Byte-identical outputs for every command under a fixed seed.
void criterion_10() {
#ifndef SSCOPE_CLI_BIN
    report(10, "determinism", false, "CLI binary path not wired into the build");
#else
    auto dir = fs::temp_directory_path() / "sscope_acceptance";
    fs::create_directories(dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run_twice = [&](const std::string& name, const std::string& args_template) {
        fs::path out_a = dir / (name + "_a.out");
        fs::path out_b = dir / (name + "_b.out");
        auto cmd = [&](const fs::path& out) {
            std::string c = std::string(SSCOPE_CLI_BIN) + " " + args_template + " --out \"" +
                            out.string() + "\" > /dev/null 2>&1";
            return std::system(c.c_str());
        };
        if (cmd(out_a) != 0 || cmd(out_b) != 0) return std::string("command failed");
        if (slurp(out_a).empty()) return std::string("empty output");
        return slurp(out_a) == slurp(out_b) ? std::string() : std::string("outputs differ");
    };

    nlohmann::json run_cfg = {
        {"model", {{"kind", "two_layer_logistic"}, {"reg", 0.1}, {"label_mean", 1.0}, {"feature_noise_std", 0.5}}},
        {"oracle", {{"kind", "targeted_stochastic"}, {"perturbation_std", 1.0},
                    {"direction", {0.70710678118654757, 0.70710678118654757}}, {"minibatch", 1},
                    {"gate_threshold", nullptr}}},
        {"run", {{"step_size", 0.01}, {"horizon", 4000}, {"seed", 97}, {"record_stride", 1}}},
        {"init", {-0.5, 0.5}},
        {"classifier", {{"tau", 0.1}, {"pi", 0.5}, {"beta", 0.0}, {"sigma_sq", 2.0}}}};
    fs::path run_cfg_path = dir / "run_cfg.json";
    write_file(run_cfg_path.string(), run_cfg.dump(2));

    nlohmann::json sweep_cfg = {
        {"model", {{"kind", "quadratic"}, {"curvature", {1.0, -1.0}}}},
        {"oracle", {{"kind", "perturbed_exact"}, {"perturbation_std", 1.0}}},
        {"run", {{"step_size", 0.05}, {"horizon", 1}, {"seed", 13}}},
        {"init", {0.0, 0.0}},
        {"classifier", {{"tau", 0.1}, {"pi", 0.5}, {"beta", 0.0}, {"sigma_sq", 2.0}, {"delta", 1.0}}},
        {"sweep", {{"mu_list", {0.05, 0.025}}, {"seeds", 60}}}};
    fs::path sweep_cfg_path = dir / "sweep_cfg.json";
    write_file(sweep_cfg_path.string(), sweep_cfg.dump(2));

    nlohmann::json surf_cfg = {
        {"model", {{"kind", "two_layer_logistic"}, {"reg", 0.1}, {"label_mean", 1.0}, {"feature_noise_std", 0.5}}},
        {"classifier", {{"tau", 0.1}, {"pi", 0.5}, {"beta", 0.0}, {"sigma_sq", 2.0}}},
        {"surface", {{"grid_points", 41}, {"w_max", 2.0}}}};
    fs::path surf_cfg_path = dir / "surf_cfg.json";
    write_file(surf_cfg_path.string(), surf_cfg.dump(2));

    std::string problems;
    auto add = [&](const std::string& name, const std::string& err) {
        if (!err.empty()) problems += name + ": " + err + "; ";
    };
    add("run", run_twice("run", "run --config \"" + run_cfg_path.string() + "\""));
    add("sweep", run_twice("sweep", "sweep --config \"" + sweep_cfg_path.string() + "\""));
    add("verify", run_twice("verify", "verify --suite limits --seed 5"));
    add("surface", run_twice("surface", "surface --config \"" + surf_cfg_path.string() + "\""));

    report(10, "determinism of all commands", problems.empty(),
           problems.empty() ? "run/sweep/verify/surface byte-identical across reruns" : problems);
#endif
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();

    std::cout << (g_failures == 0 ? "ACCEPTANCE: all criteria passed\n"
                                  : "ACCEPTANCE: " + std::to_string(g_failures) +
                                        " check(s) failed\n");
    return g_failures == 0 ? 0 : 1;
}
