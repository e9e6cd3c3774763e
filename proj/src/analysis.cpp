#include "sscope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "sscope/errors.hpp"
#include "sscope/parallel.hpp"

namespace sscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t replica_seed(std::uint64_t root, std::uint64_t k) {
    return splitmix64(root + 0x9E3779B97F4A7C15ull * (k + 1));
}

double lambda_min(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()),
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Constants compute_constants(const ClassifierParams& p) {
    if (!(p.pi > 0.0 && p.pi < 1.0)) throw ContractViolation("classifier: pi must lie in (0, 1)");
    if (p.step_size < 0) throw ContractViolation("classifier: step_size must be nonnegative");
    if (p.delta < 0) throw ContractViolation("classifier: delta must be nonnegative");
    if (p.sigma_sq < 0) throw ContractViolation("classifier: sigma_sq must be nonnegative");
    if (p.tau <= 0) throw ContractViolation("classifier: tau must be positive");
    Constants c;
    c.c1 = 1.0 - p.step_size * (p.delta / 2.0) * (1.0 + p.beta * p.beta);
    c.c2 = (p.delta / 2.0) * p.sigma_sq;
    c.g_threshold = p.step_size == 0.0 ? 0.0
                                       : p.step_size * (c.c2 / c.c1) * (1.0 + 1.0 / p.pi);
    return c;
}

Region classify_with_grad_sq(double grad_sq, const Eigen::VectorXd& w, const CostModel& model,
                             const ClassifierParams& params) {
    Constants c = compute_constants(params);
    if (grad_sq >= c.g_threshold) return Region::G;
    return lambda_min(model.hessian(w)) <= -params.tau ? Region::H : Region::M;
}

Region classify(const Eigen::VectorXd& w, const CostModel& model, const ClassifierParams& params) {
    if (!w.allFinite()) throw ContractViolation("classify: w must be finite");
    return classify_with_grad_sq(model.gradient(w).squaredNorm(), w, model, params);
}

SpectralSplit spectral_split(const Eigen::MatrixXd& hessian) {
    if (hessian.rows() != hessian.cols())
        throw ContractViolation("spectral_split: matrix must be square");
    double asym = (hessian - hessian.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw ContractViolation("spectral_split: matrix is not symmetric within 1e-10");

    Eigen::MatrixXd sym = 0.5 * (hessian + hessian.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_split: eigensolver failed");

    const int n = static_cast<int>(hessian.rows());
    // Eigen sorts ascending; walk backwards for a descending convention and
    // fix each eigenvector's sign so the first non-tiny component is positive.
    std::vector<int> nonneg, neg;
    for (int i = n - 1; i >= 0; --i) {
        (solver.eigenvalues()[i] >= 0.0 ? nonneg : neg).push_back(i);
    }
    auto fill = [&](const std::vector<int>& idx, Eigen::VectorXd& vals, Eigen::MatrixXd& basis) {
        vals.resize(idx.size());
        basis.resize(n, idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            vals[static_cast<int>(k)] = solver.eigenvalues()[idx[k]];
            Eigen::VectorXd v = solver.eigenvectors().col(idx[k]);
            for (int r = 0; r < n; ++r) {
                if (std::abs(v[r]) > 1e-12) {
                    if (v[r] < 0) v = -v;
                    break;
                }
            }
            basis.col(static_cast<int>(k)) = v;
        }
    };
    SpectralSplit split;
    fill(nonneg, split.eigvals_nonneg, split.basis_nonneg);
    fill(neg, split.eigvals_neg, split.basis_neg);
    return split;
}

double saddle_noise_floor(const Eigen::MatrixXd& noise_cov, const SpectralSplit& split) {
    if (split.basis_neg.cols() == 0)
        throw std::domain_error("saddle_noise_floor: empty negative subspace (condition vacuous)");
    if (noise_cov.rows() != split.basis_neg.rows() || noise_cov.rows() != noise_cov.cols())
        throw ContractViolation("saddle_noise_floor: covariance has wrong shape");
    Eigen::MatrixXd projected =
        split.basis_neg.transpose() * (0.5 * (noise_cov + noise_cov.transpose())) * split.basis_neg;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(projected, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Eigen::MatrixXd estimate_noise_covariance(const GradientOracle& oracle, const Eigen::VectorXd& w,
                                          long long n, RngStream& rng) {
    if (n < 1000) throw ContractViolation("estimate_noise_covariance: n must be >= 1000");
    const int m = oracle.model().dimension();
    Eigen::VectorXd grad = oracle.model().gradient(w);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    for (long long i = 0; i < n; ++i) {
        Eigen::VectorXd s = grad - oracle.draw_direction(w, rng);
        acc.noalias() += s * s.transpose();
    }
    return acc / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Fourth-moment fit

NoiseMomentFit fit_noise_moments(const GradientOracle& oracle,
                                 const std::vector<Eigen::VectorXd>& probe_points,
                                 long long n_per_point, RngStream& rng) {
    if (probe_points.empty()) throw ContractViolation("fit_noise_moments: no probe points");
    if (n_per_point < 10000)
        throw ContractViolation("fit_noise_moments: n_per_point must be >= 10000");

    const std::size_t np = probe_points.size();
    std::vector<double> g4(np), m4(np), m2(np), m4_var(np);
    for (std::size_t p = 0; p < np; ++p) {
        Eigen::VectorXd grad = oracle.model().gradient(probe_points[p]);
        double gsq = grad.squaredNorm();
        g4[p] = gsq * gsq;
        double s2 = 0.0, s4 = 0.0, s8 = 0.0;
        for (long long i = 0; i < n_per_point; ++i) {
            double nsq = (grad - oracle.draw_direction(probe_points[p], rng)).squaredNorm();
            s2 += nsq;
            s4 += nsq * nsq;
            s8 += nsq * nsq * nsq * nsq;
        }
        m2[p] = s2 / n_per_point;
        m4[p] = s4 / n_per_point;
        m4_var[p] = std::max(0.0, s8 / n_per_point - m4[p] * m4[p]);
    }

    // Minimal dominating pair: minimize sum_p (b g4_p + s(b) - m4_p)^2 with
    // s(b) = max(0, max_p (m4_p - b g4_p)), over b >= 0. The objective is
    // piecewise quadratic in b; candidate minima are interval endpoints and
    // the per-interval closed-form minimizers.
    std::vector<double> breakpoints{0.0};
    for (std::size_t p = 0; p < np; ++p) {
        if (g4[p] > 0) breakpoints.push_back(std::max(0.0, m4[p] / g4[p]));
        for (std::size_t q = p + 1; q < np; ++q) {
            double dg = g4[p] - g4[q];
            if (std::abs(dg) > 0) {
                double b = (m4[p] - m4[q]) / dg;
                if (b > 0) breakpoints.push_back(b);
            }
        }
    }
    double b_hi = 0.0;
    for (std::size_t p = 0; p < np; ++p)
        if (g4[p] > 0) b_hi = std::max(b_hi, 2.0 * m4[p] / g4[p] + 1.0);
    breakpoints.push_back(b_hi);
    std::sort(breakpoints.begin(), breakpoints.end());

    auto slack_at = [&](double b) {
        double s = 0.0;
        for (std::size_t p = 0; p < np; ++p) s = std::max(s, m4[p] - b * g4[p]);
        return s;
    };
    auto objective = [&](double b) {
        double s = slack_at(b), f = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
            double r = b * g4[p] + s - m4[p];
            f += r * r;
        }
        return f;
    };

    double best_b = 0.0, best_f = objective(0.0);
    auto consider = [&](double b) {
        if (b < 0) return;
        double f = objective(b);
        if (f < best_f) { best_f = f; best_b = b; }
    };
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        double lo = breakpoints[k], hi = breakpoints[k + 1];
        if (hi <= lo) continue;
        double mid = 0.5 * (lo + hi);
        consider(lo);
        consider(hi);
        // Identify the active branch at the midpoint and minimize its quadratic.
        double s_mid = slack_at(mid);
        double num = 0.0, den = 0.0;
        if (s_mid > 0) {
            std::size_t act = 0;
            double best = -kInf;
            for (std::size_t p = 0; p < np; ++p) {
                double v = m4[p] - mid * g4[p];
                if (v > best) { best = v; act = p; }
            }
            for (std::size_t p = 0; p < np; ++p) {
                double d = g4[p] - g4[act];
                double c = m4[act] - m4[p];
                num += d * c;
                den += d * d;
            }
        } else {
            for (std::size_t p = 0; p < np; ++p) {
                num += g4[p] * (0.0 - m4[p]);
                den += g4[p] * g4[p];
            }
        }
        if (den > 0) consider(std::clamp(-num / den, lo, hi));
    }

    NoiseMomentFit fit;
    fit.beta4_hat = best_b;
    fit.sigma4_hat = slack_at(best_b);
    double beta_sq = std::sqrt(fit.beta4_hat);
    double sigma_sq = std::sqrt(fit.sigma4_hat);
    for (std::size_t p = 0; p < np; ++p) {
        NoiseMomentFit::Probe probe;
        probe.grad_norm_sq = std::sqrt(g4[p]);
        probe.m2 = m2[p];
        probe.m4 = m4[p];
        probe.m4_se = std::sqrt(m4_var[p] / static_cast<double>(n_per_point));
        probe.bound4 = fit.beta4_hat * g4[p] + fit.sigma4_hat;
        probe.residual = probe.bound4 - m4[p];
        fit.probes.push_back(probe);
        double m2_bound = beta_sq * probe.grad_norm_sq + sigma_sq;
        double m2_se = probe.m4 > 0 ? std::sqrt(std::max(0.0, probe.m4 - m2[p] * m2[p]) /
                                                static_cast<double>(n_per_point))
                                    : 0.0;
        if (m2[p] > m2_bound + 3.0 * m2_se) fit.second_moment_ok = false;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Covariance smoothness probe

CovLipschitzFit covariance_lipschitz_probe(
    const GradientOracle& oracle,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& point_pairs, long long n,
    RngStream& rng) {
    if (point_pairs.empty()) throw ContractViolation("covariance_lipschitz_probe: no pairs");
    if (n < 2000) throw ContractViolation("covariance_lipschitz_probe: n must be >= 2000");
    const int m = oracle.model().dimension();

    auto half_covs = [&](const Eigen::VectorXd& w, Eigen::MatrixXd& a, Eigen::MatrixXd& b) {
        Eigen::VectorXd grad = oracle.model().gradient(w);
        a.setZero(m, m);
        b.setZero(m, m);
        long long half = n / 2;
        for (long long i = 0; i < 2 * half; ++i) {
            Eigen::VectorXd s = grad - oracle.draw_direction(w, rng);
            (i < half ? a : b).noalias() += s * s.transpose();
        }
        a /= static_cast<double>(half);
        b /= static_cast<double>(half);
    };

    CovLipschitzFit fit;
    for (const auto& [x, y] : point_pairs) {
        Eigen::MatrixXd xa, xb, ya, yb;
        half_covs(x, xa, xb);
        half_covs(y, ya, yb);
        Eigen::MatrixXd rx = 0.5 * (xa + xb), ry = 0.5 * (ya + yb);
        CovLipschitzFit::PairSample ps;
        ps.distance = (x - y).norm();
        ps.cov_diff = spectral_norm(rx - ry);
        // The half-sample null overstates the pooled-estimate noise by 2x;
        // the factor 3 on top keeps the false-positive rate per pair small.
        ps.null_scale = 0.5 * (spectral_norm(xa - xb) + spectral_norm(ya - yb));
        ps.significant = ps.cov_diff > 3.0 * ps.null_scale && ps.distance > 0;
        fit.pairs.push_back(ps);
    }

    std::vector<double> xs, ys;
    for (const auto& ps : fit.pairs) {
        if (ps.significant && ps.cov_diff > 0) {
            xs.push_back(ps.distance);
            ys.push_back(ps.cov_diff);
        }
    }
    if (xs.empty()) {
        fit.flag = CovProbeFlag::ConstantCovariance;
        return fit;
    }
    if (xs.size() < 2) {
        fit.flag = CovProbeFlag::Inconclusive;
        return fit;
    }
    fit.gamma_hat = loglog_slope(xs, ys);
    if (!(fit.gamma_hat > 0.0 && fit.gamma_hat <= 4.0)) {
        fit.flag = CovProbeFlag::Inconclusive;
        return fit;
    }
    double beta_r = 0.0;
    for (const auto& ps : fit.pairs) {
        if (ps.distance > 0) beta_r = std::max(beta_r, ps.cov_diff / std::pow(ps.distance, fit.gamma_hat));
    }
    fit.beta_r_hat = beta_r;
    fit.flag = CovProbeFlag::Ok;
    return fit;
}

// ---------------------------------------------------------------------------
// Escape machinery

long long predict_escape_time(int dimension, double sigma_sq, double sigma_l_sq, double mu,
                              double tau) {
    if (dimension < 1) throw ContractViolation("predict_escape_time: dimension must be >= 1");
    if (sigma_l_sq == 0.0)
        throw std::domain_error(
            "predict_escape_time: saddle noise floor is zero; escape is not guaranteed");
    if (sigma_l_sq < 0 || sigma_sq <= 0 || mu <= 0 || tau <= 0)
        throw ContractViolation("predict_escape_time: arguments must be positive");
    double ratio = std::log(2.0 * dimension * sigma_sq / sigma_l_sq + 1.0) / std::log1p(2.0 * mu * tau);
    long long is = static_cast<long long>(std::ceil(ratio));
    return std::max<long long>(1, is);
}

EscapeOutcome try_measure_escape(const Trajectory& traj, const CostModel& model,
                                 const ClassifierParams& params) {
    EscapeOutcome out;
    Constants c = compute_constants(params);
    const double tau = params.tau;

    std::size_t k = 0;
    for (; k < traj.size(); ++k) {
        if (traj.grad_norm_sq[k] >= c.g_threshold) continue;  // G
        if (lambda_min(model.hessian(traj.iterates[k])) <= -tau) break;  // H
    }
    if (k == traj.size()) return out;  // never entered H

    out.entered_h = true;
    out.anchor_index = traj.indices[k];
    const Eigen::VectorXd anchor = traj.iterates[k];
    const double cost_threshold =
        traj.costs[k] - (params.step_size / 4.0) * model.dimension() * params.sigma_sq;

    for (std::size_t j = k + 1; j < traj.size(); ++j) {
        bool in_h = traj.grad_norm_sq[j] < c.g_threshold &&
                    lambda_min(model.hessian(traj.iterates[j])) <= -tau;
        if (!in_h && traj.costs[j] <= cost_threshold) {
            out.escaped = true;
            out.escape_index = traj.indices[j] - out.anchor_index;
            out.cost_at_escape = traj.costs[j];
            break;
        }
    }
    if (!out.escaped) {
        out.censored = true;
        return out;
    }

    SpectralSplit split = spectral_split(model.hessian(anchor));
    if (split.basis_neg.cols() > 0) {
        // Most negative eigenvalue sits last in the descending negative block.
        Eigen::VectorXd v = split.basis_neg.col(split.basis_neg.cols() - 1);
        double proj = v.dot(traj.iterates.back() - anchor);
        out.basin = proj >= 0 ? 1 : -1;
    }
    return out;
}

EscapeOutcome measure_escape(const Trajectory& traj, const CostModel& model,
                             const ClassifierParams& params) {
    EscapeOutcome out = try_measure_escape(traj, model, params);
    if (!out.entered_h)
        throw ContractViolation("measure_escape: trajectory never enters an H-classified point");
    return out;
}

EscapeReport run_escape_ensemble(const CostModel& model, const GradientOracle& oracle,
                                 const ClassifierParams& params, const Eigen::VectorXd& start,
                                 long long horizon, long long n_seeds, std::uint64_t root_seed) {
    if (n_seeds < 1) throw ContractViolation("run_escape_ensemble: n_seeds must be >= 1");
    EscapeReport report;
    report.outcomes.resize(n_seeds);

    parallel_for(n_seeds, [&](long long k) {
        RunConfig cfg;
        cfg.step_size = params.step_size;
        cfg.horizon = horizon;
        cfg.seed = replica_seed(root_seed, static_cast<std::uint64_t>(k));
        cfg.record_stride = 1;
        // Costs without a lower bound keep accelerating after the escape;
        // ending the run at a large radius keeps it well clear of both the
        // classification scale and the divergence guard.
        cfg.stop_radius = 1e3;
        Trajectory traj = run(model, oracle, start, cfg);
        report.outcomes[k] = try_measure_escape(traj, model, params);
    });

    std::vector<double> times;
    long long censored = 0, escaped = 0, positive = 0;
    for (const auto& o : report.outcomes) {
        if (o.escaped) {
            times.push_back(static_cast<double>(o.escape_index));
            ++escaped;
            if (o.basin > 0) ++positive;
        } else {
            times.push_back(kInf);
            ++censored;
        }
    }
    report.censor_rate = static_cast<double>(censored) / static_cast<double>(n_seeds);
    report.median_escape = sample_quantile(times, 0.5);
    report.q1 = sample_quantile(times, 0.25);
    report.q3 = sample_quantile(times, 0.75);
    report.positive_basin_rate = escaped > 0 ? static_cast<double>(positive) / escaped : 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Theorem verifiers

DescentReport verify_descent(const CostModel& model, const GradientOracle& oracle,
                             const ClassifierParams& params, Region region, long long n_trials,
                             const SampleBox& box, std::uint64_t seed) {
    if (region == Region::H)
        throw ContractViolation("verify_descent: descent/ascent bounds apply to G and M only");
    if (n_trials < 1) throw ContractViolation("verify_descent: n_trials must be >= 1");
    if (box.lo.size() != model.dimension() || box.hi.size() != model.dimension())
        throw ContractViolation("verify_descent: box has wrong dimension");

    Constants c = compute_constants(params);
    DescentReport report;
    report.region = region;
    report.bound = region == Region::G ? -params.step_size * params.step_size * c.c2 / params.pi
                                       : params.step_size * params.step_size * c.c2;
    report.premise_ok =
        params.step_size <= 2.0 / (params.delta * (1.0 + params.beta * params.beta)) && c.c1 > 0;

    RngStream rng(seed);
    const long long max_attempts = 1000 * n_trials;
    long long attempts = 0;
    double sum = 0.0, sum_sq = 0.0;
    long long n = 0;
    Eigen::VectorXd w(model.dimension());
    while (n < n_trials && attempts < max_attempts) {
        ++attempts;
        for (int m = 0; m < model.dimension(); ++m) {
            w[m] = box.lo[m] + (box.hi[m] - box.lo[m]) * rng.uniform();
        }
        if (classify(w, model, params) != region) continue;
        Eigen::VectorXd direction = oracle.draw_direction(w, rng);
        double delta = model.cost(w - params.step_size * direction) - model.cost(w);
        sum += delta;
        sum_sq += delta * delta;
        ++n;
    }
    report.n = n;
    if (n < n_trials) {
        report.inconclusive = true;
        return report;
    }
    report.mean_delta = sum / n;
    double var = std::max(0.0, sum_sq / n - report.mean_delta * report.mean_delta);
    report.stderr_mean = std::sqrt(var / n);
    report.passed = report.premise_ok &&
                    report.mean_delta <= report.bound + 3.0 * report.stderr_mean;
    return report;
}

LimitingRatio limiting_ratio(double mu, double delta, int k, double T) {
    if (mu <= 0 || delta <= 0) throw ContractViolation("limiting_ratio: mu and delta must be positive");
    if (T < 0) throw ContractViolation("limiting_ratio: T must be nonnegative");
    if (k < 1) throw ContractViolation("limiting_ratio: k must be a positive integer");
    if (mu >= 1.0 / delta) throw ContractViolation("limiting_ratio: requires mu < 1/delta");
    LimitingRatio out;
    double base = std::pow(1.0 + mu * delta, k) / std::pow(1.0 - mu * delta, k - 1);
    out.value = std::pow(base, T / mu);
    out.limit = std::exp((2.0 * k - 1.0) * T * delta);
    out.rel_error = std::abs(out.value - out.limit) / out.limit;
    return out;
}

FinalBoundReport verify_final_bound(const CostModel& model, const GradientOracle& oracle,
                                    const ClassifierParams& params, double sigma_l_sq,
                                    const Eigen::VectorXd& w0, long long n_seeds,
                                    long long horizon_cap, std::uint64_t root_seed) {
    if (n_seeds < 1) throw ContractViolation("verify_final_bound: n_seeds must be >= 1");
    FinalBoundReport report;
    Constants c = compute_constants(params);

    const double mu = params.step_size;
    double descent_gain = mu / 2.0 * model.dimension() * params.sigma_sq - mu * mu * c.c2 / params.pi;
    report.premise_ok = model.lower_bound().has_value() && descent_gain > 0 && c.c1 > 0;
    if (!report.premise_ok) return report;

    report.i_s = predict_escape_time(model.dimension(), params.sigma_sq, sigma_l_sq, mu, params.tau);
    double gap0 = model.cost(w0) - *model.lower_bound();
    report.bound = gap0 / (mu * mu * c.c2 * params.pi) * static_cast<double>(report.i_s);

    report.hitting_times.assign(n_seeds, kInf);
    parallel_for(n_seeds, [&](long long k) {
        RunConfig cfg;
        cfg.step_size = mu;
        cfg.horizon = horizon_cap;
        cfg.seed = replica_seed(root_seed, static_cast<std::uint64_t>(k));
        cfg.record_stride = 1;
        Trajectory traj = run(model, oracle, w0, cfg);
        Constants cc = compute_constants(params);
        for (std::size_t j = 0; j < traj.size(); ++j) {
            if (traj.grad_norm_sq[j] < cc.g_threshold &&
                lambda_min(model.hessian(traj.iterates[j])) > -params.tau) {
                report.hitting_times[k] = static_cast<double>(traj.indices[j]);
                break;
            }
        }
    });

    report.n_censored = static_cast<long long>(
        std::count(report.hitting_times.begin(), report.hitting_times.end(), kInf));
    report.quantile_hit = sample_quantile(report.hitting_times, 1.0 - params.pi);
    report.passed = std::isfinite(report.quantile_hit) && report.quantile_hit <= report.bound;
    return report;
}

// ---------------------------------------------------------------------------
// Small statistics helpers

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ContractViolation("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw ContractViolation("loglog_slope: values must be positive");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) throw ContractViolation("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

double sample_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractViolation("sample_quantile: empty sample");
    if (q < 0 || q > 1) throw ContractViolation("sample_quantile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    if (!std::isfinite(values[lo]) || !std::isfinite(values[hi])) return kInf;
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace sscope
