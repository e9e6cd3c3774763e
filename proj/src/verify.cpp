#include "sscope/verify.hpp"

#include <algorithm>
#include <cmath>

#include "sscope/analysis.hpp"
#include "sscope/errors.hpp"
#include "sscope/parallel.hpp"

namespace sscope {

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

std::uint64_t check_seed(std::uint64_t root, std::uint64_t salt) {
    return splitmix64(root ^ (0xC2B2AE3D27D4EB4Full * (salt + 1)));
}

// Shared presets. The quadratic pair mirrors the analytic examples; the
// logistic preset is the simulation model.
const double kMu = 0.01;

QuadraticModel saddle_quadratic() { return QuadraticModel(vec2(1.0, -1.0)); }
QuadraticModel convex_quadratic() { return QuadraticModel(vec2(1.0, 1.0)); }

ClassifierParams quad_params(double mu, double sigma_sq = 2.0) {
    ClassifierParams p;
    p.step_size = mu;
    p.tau = 0.1;
    p.pi = 0.5;
    p.delta = 1.0;
    p.beta = 0.0;
    p.sigma_sq = sigma_sq;
    return p;
}

OracleConfig perturbed_stochastic(double sv) {
    OracleConfig c;
    c.kind = OracleKind::PerturbedStochastic;
    c.perturbation_std = sv;
    return c;
}

OracleConfig perturbed_exact(double sv) {
    OracleConfig c;
    c.kind = OracleKind::PerturbedExact;
    c.perturbation_std = sv;
    return c;
}

OracleConfig targeted(double sv) {
    OracleConfig c;
    c.kind = OracleKind::TargetedStochastic;
    c.perturbation_std = sv;
    c.direction = vec2(1.0, 1.0).normalized();
    return c;
}

void descent_suite(std::vector<CheckReport>& out, std::uint64_t root) {
    {
        QuadraticModel model = saddle_quadratic();
        ClassifierParams params = quad_params(kMu);
        GradientOracle oracle(perturbed_stochastic(1.0), model);
        SampleBox box{vec2(-2, -2), vec2(2, 2)};
        DescentReport r =
            verify_descent(model, oracle, params, Region::G, 10000, box, check_seed(root, 1));
        CheckReport c;
        c.check = "descent_G_quadratic_saddle";
        c.statistic = r.mean_delta;
        c.threshold = r.bound + 3 * r.stderr_mean;
        c.stderr_stat = r.stderr_mean;
        c.n = r.n;
        c.seeds = {check_seed(root, 1)};
        if (!r.premise_ok) c.note = "skipped-premise";
        else if (r.inconclusive) c.note = "inconclusive: sampler starved";
        c.passed = r.passed;
        out.push_back(c);
    }
    {
        QuadraticModel model = convex_quadratic();
        ClassifierParams params = quad_params(kMu);
        GradientOracle oracle(perturbed_stochastic(1.0), model);
        SampleBox box{vec2(-0.2, -0.2), vec2(0.2, 0.2)};
        DescentReport r =
            verify_descent(model, oracle, params, Region::M, 10000, box, check_seed(root, 2));
        CheckReport c;
        c.check = "ascent_M_quadratic_convex";
        c.statistic = r.mean_delta;
        c.threshold = r.bound + 3 * r.stderr_mean;
        c.stderr_stat = r.stderr_mean;
        c.n = r.n;
        c.seeds = {check_seed(root, 2)};
        if (!r.premise_ok) c.note = "skipped-premise";
        else if (r.inconclusive) c.note = "inconclusive: sampler starved";
        c.passed = r.passed;
        out.push_back(c);
    }
    {
        // Noiseless control: with the exact oracle every accepted G draw
        // descends, not just in expectation.
        QuadraticModel model = saddle_quadratic();
        ClassifierParams params = quad_params(kMu);
        GradientOracle oracle(OracleConfig{}, model);
        RngStream rng(check_seed(root, 3));
        Constants consts = compute_constants(params);
        double worst = -1e300;
        long long n = 0;
        while (n < 2000) {
            Eigen::VectorXd w = vec2(-2 + 4 * rng.uniform(), -2 + 4 * rng.uniform());
            if (model.gradient(w).squaredNorm() < consts.g_threshold) continue;
            double delta = model.cost(w - kMu * oracle.draw_direction(w, rng)) - model.cost(w);
            worst = std::max(worst, delta);
            ++n;
        }
        CheckReport c;
        c.check = "descent_G_noiseless_every_draw";
        c.statistic = worst;
        c.threshold = 0.0;
        c.n = n;
        c.seeds = {check_seed(root, 3)};
        c.passed = worst <= 0.0;
        out.push_back(c);
    }
}

void deviation_suite(std::vector<CheckReport>& out, std::uint64_t root) {
    TwoLayerLogisticModel model({});
    GradientOracle oracle(targeted(1.0), model);
    const Eigen::VectorXd anchor = vec2(0.0, 0.0);
    const double T = 2.0;
    const std::vector<double> mus{0.04, 0.02, 0.01};
    // Fourth moments of the deviation are heavy tailed; the per-step means
    // averaged over the window at 800 seeds keep the slope estimate stable
    // across seed roots.
    const long long n_seeds = 800;

    std::vector<double> avg_m2(mus.size()), avg_m4(mus.size()), avg_gap(mus.size());
    for (std::size_t mi = 0; mi < mus.size(); ++mi) {
        double mu = mus[mi];
        long long horizon = static_cast<long long>(std::llround(T / mu));
        std::vector<CoupledPair> ensemble(n_seeds);
        parallel_for(n_seeds, [&](long long k) {
            std::uint64_t seed = splitmix64(check_seed(root, 10) + 0x9E3779B97F4A7C15ull * (k + 1));
            ensemble[k] = run_coupled(model, oracle, anchor, horizon, mu, seed);
        });
        DeviationMoments m2 = deviation_moments(ensemble, 2);
        DeviationMoments m4 = deviation_moments(ensemble, 4);
        auto window_mean = [](const std::vector<double>& v) {
            double acc = 0.0;
            for (std::size_t j = 1; j < v.size(); ++j) acc += v[j];
            return acc / static_cast<double>(v.size() - 1);
        };
        avg_m2[mi] = window_mean(m2.anchor_moment);
        avg_m4[mi] = window_mean(m4.anchor_moment);
        avg_gap[mi] = window_mean(m2.coupling_gap_sq);
    }

    // The deviation statements are upper bounds, so the faithful check is
    // one-sided: the measured decay must be at least as fast as the bound's
    // exponent. Decaying faster (as the coupling gap does on this even cost,
    // whose third derivative vanishes at the symmetric saddle) satisfies it.
    auto slope_check = [&](const char* name, const std::vector<double>& stat, double target) {
        CheckReport c;
        c.check = name;
        c.statistic = loglog_slope(mus, stat);
        c.threshold = target - 0.3;
        c.stderr_stat = 0.3;
        c.n = n_seeds;
        c.seeds = {check_seed(root, 10)};
        c.passed = c.statistic >= target - 0.3;
        c.note = "one-sided: decay exponent >= " + std::to_string(target) + " - 0.3";
        out.push_back(c);
    };
    slope_check("deviation_slope_second_moment", avg_m2, 1.0);
    slope_check("deviation_slope_fourth_moment", avg_m4, 2.0);
    slope_check("deviation_slope_model_gap", avg_gap, 2.0);

    {
        QuadraticModel quad = saddle_quadratic();
        GradientOracle qo(perturbed_exact(1.0), quad);
        CoupledPair pair = run_coupled(quad, qo, vec2(0.1, -0.2), 400, 0.01, check_seed(root, 11));
        double max_dev = *std::max_element(pair.deviation_sq.begin(), pair.deviation_sq.end());
        CheckReport c;
        c.check = "deviation_quadratic_exactly_zero";
        c.statistic = max_dev;
        c.threshold = 0.0;
        c.n = 400;
        c.seeds = {check_seed(root, 11)};
        c.passed = max_dev == 0.0;
        out.push_back(c);
    }
}

void limits_suite(std::vector<CheckReport>& out, std::uint64_t) {
    for (int k = 1; k <= 3; ++k) {
        LimitingRatio r = limiting_ratio(1e-4, 1.0, k, 1.0);
        CheckReport c;
        c.check = "limiting_ratio_k" + std::to_string(k);
        c.statistic = r.rel_error;
        c.threshold = 1e-3;
        c.n = 1;
        c.passed = r.rel_error < 1e-3;
        out.push_back(c);
    }
}

void escape_suite(std::vector<CheckReport>& out, std::uint64_t root) {
    {
        CheckReport c;
        c.check = "predict_escape_time_exact_value";
        c.statistic = static_cast<double>(predict_escape_time(2, 1.0, 1.0, 0.01, 0.4));
        c.threshold = 202.0;
        c.n = 1;
        c.passed = c.statistic == 202.0;
        out.push_back(c);
    }

    QuadraticModel model = saddle_quadratic();
    GradientOracle oracle(perturbed_exact(1.0), model);
    for (double mu : {0.02, 0.01}) {
        ClassifierParams params = quad_params(mu);
        long long predicted = predict_escape_time(2, 2.0, 1.0, mu, 1.0);  // tau = |lambda_min|
        long long horizon = static_cast<long long>(std::llround(60.0 / mu));
        EscapeReport rep = run_escape_ensemble(model, oracle, params, vec2(0, 0), horizon, 200,
                                               check_seed(root, 20 + std::llround(1 / mu)));
        CheckReport c;
        c.check = "escape_median_within_factor2_mu" + std::to_string(mu);
        c.statistic = rep.median_escape;
        c.threshold = static_cast<double>(predicted);
        c.n = 200;
        c.seeds = {check_seed(root, 20 + std::llround(1 / mu))};
        c.passed = std::isfinite(rep.median_escape) && rep.median_escape <= 2.0 * predicted &&
                   rep.median_escape >= 0.5 * predicted;
        c.note = "factor-2 band around prediction";
        out.push_back(c);
    }

    {
        // Noiseless negative control: the exact recursion is pinned at the
        // stationary saddle forever.
        ClassifierParams params = quad_params(0.01);
        GradientOracle exact(OracleConfig{}, model);
        EscapeReport rep =
            run_escape_ensemble(model, exact, params, vec2(0, 0), 100000, 1, check_seed(root, 22));
        CheckReport c;
        c.check = "escape_noiseless_censored";
        c.statistic = rep.censor_rate;
        c.threshold = 1.0;
        c.n = 1;
        c.passed = rep.censor_rate == 1.0;
        out.push_back(c);
    }
    {
        ClassifierParams params = quad_params(0.01, 2.0 * 0.1 * 0.1);  // sigma^2 = M sv^2
        GradientOracle small_noise(perturbed_exact(0.1), model);
        EscapeReport rep = run_escape_ensemble(model, small_noise, params, vec2(0, 0), 100000, 20,
                                               check_seed(root, 23));
        CheckReport c;
        c.check = "escape_any_positive_noise";
        c.statistic = rep.censor_rate;
        c.threshold = 0.0;
        c.n = 20;
        c.seeds = {check_seed(root, 23)};
        c.passed = rep.censor_rate == 0.0;
        out.push_back(c);
    }
}

void final_suite(std::vector<CheckReport>& out, std::uint64_t root) {
    TwoLayerLogisticModel model({});
    GradientOracle oracle(perturbed_stochastic(1.0), model);
    ClassifierParams params;
    params.step_size = 0.01;
    params.tau = 0.1;
    params.pi = 0.5;
    params.delta = model.lipschitz_grad();
    params.beta = 0.0;
    params.sigma_sq = 2.5;
    FinalBoundReport r = verify_final_bound(model, oracle, params, 1.0, vec2(-0.5, 0.5), 100,
                                            20000, check_seed(root, 30));
    CheckReport c;
    c.check = "final_bound_hitting_quantile";
    c.statistic = r.quantile_hit;
    c.threshold = r.bound;
    c.n = 100;
    c.seeds = {check_seed(root, 30)};
    if (!r.premise_ok) {
        c.note = "skipped-premise";
        c.passed = false;
    } else {
        c.passed = r.passed;
    }
    out.push_back(c);
}

}  // namespace

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["check"] = r.check;
        j["passed"] = r.passed;
        j["statistic"] = r.statistic;
        j["threshold"] = r.threshold;
        j["stderr"] = r.stderr_stat;
        j["n"] = r.n;
        j["seeds"] = r.seeds;
        if (!r.note.empty()) j["note"] = r.note;
        arr.push_back(j);
    }
    return arr;
}

bool is_known_suite(const std::string& suite) {
    return suite == "descent" || suite == "deviation" || suite == "limits" || suite == "escape" ||
           suite == "final" || suite == "all";
}

std::vector<CheckReport> run_verify_suite(const std::string& suite, std::uint64_t root_seed) {
    if (!is_known_suite(suite)) throw ContractViolation("unknown verify suite: " + suite);
    std::vector<CheckReport> out;
    if (suite == "descent" || suite == "all") descent_suite(out, root_seed);
    if (suite == "deviation" || suite == "all") deviation_suite(out, root_seed);
    if (suite == "limits" || suite == "all") limits_suite(out, root_seed);
    if (suite == "escape" || suite == "all") escape_suite(out, root_seed);
    if (suite == "final" || suite == "all") final_suite(out, root_seed);
    return out;
}

}  // namespace sscope
