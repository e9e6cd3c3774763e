#include "sscope/commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "sscope/analysis.hpp"
#include "sscope/errors.hpp"
#include "sscope/io.hpp"
#include "sscope/verify.hpp"

namespace sscope {

namespace {

RegionAnnotator make_annotator(const CostModel& model, const ClassifierParams& params) {
    return [&model, params](const Eigen::VectorXd& w, double grad_sq) {
        return region_letter(classify_with_grad_sq(grad_sq, w, model, params));
    };
}

}  // namespace

int cmd_run(const ExperimentConfig& config, const std::string& out_path) {
    if (!config.oracle || !config.has_run || !config.init) {
        std::cerr << "run: config requires model, oracle, run, and init sections\n";
        return kExitBadConfig;
    }
    try {
        auto model = config.make_model();
        GradientOracle oracle(*config.oracle, *model);
        Trajectory traj = run(*model, oracle, *config.init, config.run);

        std::optional<ClassifierParams> params;
        RegionAnnotator annotate;
        if (config.classifier) {
            params = config.classifier->resolve(config.run.step_size, *model);
            annotate = make_annotator(*model, *params);
        }
        write_trajectory_csv(traj, out_path, annotate);

        std::ostringstream summary;
        summary << "final_cost=" << g17(traj.costs.back());
        summary << " final_grad_norm_sq=" << g17(traj.grad_norm_sq.back());
        if (params) {
            Region final_region = classify_with_grad_sq(traj.grad_norm_sq.back(),
                                                        traj.iterates.back(), *model, *params);
            summary << " final_region=" << region_letter(final_region);
            if (config.run.record_stride == 1) {
                EscapeOutcome esc = try_measure_escape(traj, *model, *params);
                if (!esc.entered_h) {
                    summary << " escape=never-entered-H";
                } else if (esc.escaped) {
                    summary << " escape: anchor_index=" << esc.anchor_index
                            << " escape_index=" << esc.escape_index << " basin="
                            << (esc.basin > 0 ? "+1" : "-1");
                } else {
                    summary << " escape=censored(horizon=" << config.run.horizon << ")";
                }
            }
        } else {
            summary << " final_region=-";
        }
        std::cout << summary.str() << "\n";
        return kExitOk;
    } catch (const DivergedError& e) {
        std::cerr << "run: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const ConfigError& e) {
        std::cerr << "run: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "run: " << e.what() << "\n";
        return kExitBadConfig;
    }
}

int cmd_sweep(const ExperimentConfig& config, const std::vector<double>& mu_override,
              std::optional<long long> seeds_override, const std::string& out_path) {
    try {
        if (!config.oracle || !config.init || !config.classifier) {
            std::cerr << "sweep: config requires model, oracle, init, and classifier sections\n";
            return kExitBadConfig;
        }
        std::vector<double> mu_list = mu_override;
        if (mu_list.empty() && config.sweep) mu_list = config.sweep->mu_list;
        long long seeds = seeds_override.value_or(config.sweep ? config.sweep->seeds : 200);
        if (mu_list.size() < 2) {
            std::cerr << "sweep: need at least two step sizes to fit a slope\n";
            return kExitBadConfig;
        }
        if (seeds < 50) {
            std::cerr << "sweep: need at least 50 seeds per step size\n";
            return kExitBadConfig;
        }
        std::uint64_t root = config.has_run ? config.run.seed : default_seed_root();

        auto model = config.make_model();
        GradientOracle oracle(*config.oracle, *model);

        struct Row {
            double mu;
            EscapeReport report;
            long long horizon;
        };
        std::vector<Row> rows;
        for (double mu : mu_list) {
            if (mu <= 0) {
                std::cerr << "sweep: step sizes must be positive\n";
                return kExitBadConfig;
            }
            long long horizon = config.sweep && config.sweep->horizon
                                    ? *config.sweep->horizon
                                    : static_cast<long long>(std::ceil(80.0 / mu));
            ClassifierParams params = config.classifier->resolve(mu, *model);
            EscapeReport rep = run_escape_ensemble(*model, oracle, params, *config.init, horizon,
                                                   seeds, splitmix64(root ^ std::hash<double>{}(mu)));
            if (config.classifier->sigma_l_sq) {
                rep.predicted_is = predict_escape_time(model->dimension(), params.sigma_sq,
                                                       *config.classifier->sigma_l_sq, mu,
                                                       params.tau);
            }
            rows.push_back({mu, std::move(rep), horizon});
        }

        std::vector<double> xs, ys;
        for (const auto& row : rows) {
            if (std::isfinite(row.report.median_escape) && row.report.median_escape > 0) {
                xs.push_back(row.mu);
                ys.push_back(row.report.median_escape);
            }
        }
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (xs.size() >= 2) slope = loglog_slope(xs, ys);

        std::ostringstream os;
        os << "mu,seeds,escaped,censor_rate,q1,median,q3,loglog_slope\n";
        for (const auto& row : rows) {
            long long escaped = 0;
            for (const auto& o : row.report.outcomes)
                if (o.escaped) ++escaped;
            os << g17(row.mu) << "," << seeds << "," << escaped << ","
               << g17(row.report.censor_rate) << "," << g17(row.report.q1) << ","
               << g17(row.report.median_escape) << "," << g17(row.report.q3) << "," << g17(slope)
               << "\n";
        }
        write_file(out_path, os.str());

        for (const auto& row : rows) {
            std::cout << "mu=" << g17(row.mu) << " median_escape=" << g17(row.report.median_escape)
                      << " censor_rate=" << g17(row.report.censor_rate) << " horizon="
                      << row.horizon;
            if (row.report.predicted_is > 0) std::cout << " predicted_is=" << row.report.predicted_is;
            std::cout << "\n";
        }
        std::cout << "loglog_slope=" << g17(slope) << "\n";
        return kExitOk;
    } catch (const DivergedError& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const ConfigError& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitBadConfig;
    }
}

int cmd_verify(const std::string& suite, std::uint64_t root_seed, const std::string& out_path) {
    if (!is_known_suite(suite)) {
        std::cerr << "verify: unknown suite \"" << suite
                  << "\" (expected descent|deviation|limits|escape|final|all)\n";
        return kExitBadConfig;
    }
    std::vector<CheckReport> reports = run_verify_suite(suite, root_seed);
    write_file(out_path, reports_to_json(reports).dump(2) + "\n");

    bool any_failed = false;
    for (const auto& r : reports) {
        const char* status = r.skipped() ? "SKIP" : (r.passed ? "PASS" : "FAIL");
        if (!r.passed && !r.skipped()) any_failed = true;
        std::cout << status << " " << r.check << " statistic=" << g17(r.statistic)
                  << " threshold=" << g17(r.threshold);
        if (!r.note.empty()) std::cout << " (" << r.note << ")";
        std::cout << "\n";
    }
    return any_failed ? kExitVerifyFailed : kExitOk;
}

int cmd_surface(const ExperimentConfig& config, const std::string& out_path) {
    try {
        auto model = config.make_model();
        if (model->dimension() != 2) {
            std::cerr << "surface: requires a 2-D model\n";
            return kExitBadConfig;
        }
        SurfaceConfig sc = config.surface.value_or(SurfaceConfig{});
        std::optional<ClassifierParams> params;
        if (config.classifier) {
            double mu = config.has_run ? config.run.step_size : 0.01;
            params = config.classifier->resolve(mu, *model);
        }

        std::ostringstream os;
        os << "w_0,w_1,cost,region\n";
        const int n = sc.grid_points;
        Eigen::VectorXd w(2);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                w[0] = n == 1 ? -sc.w_max : -sc.w_max + 2.0 * sc.w_max * i / (n - 1);
                w[1] = n == 1 ? -sc.w_max : -sc.w_max + 2.0 * sc.w_max * j / (n - 1);
                char region = '-';
                if (params) region = region_letter(classify(w, *model, *params));
                os << g17(w[0]) << "," << g17(w[1]) << "," << g17(model->cost(w)) << "," << region
                   << "\n";
            }
        }
        write_file(out_path, os.str());
        std::cout << "surface: wrote " << n * n << " grid points\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "surface: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "surface: " << e.what() << "\n";
        return kExitBadConfig;
    }
}

}  // namespace sscope
