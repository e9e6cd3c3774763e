#include "sscope/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "sscope/errors.hpp"
#include "sscope/io.hpp"

namespace sscope {

namespace {

constexpr double kDivergenceRadius = 1e6;

void validate_run_config(const RunConfig& cfg) {
    if (cfg.step_size < 0) throw ContractViolation("run: step_size must be nonnegative");
    if (cfg.horizon < 1) throw ContractViolation("run: horizon must be >= 1");
    if (cfg.record_stride < 1) throw ContractViolation("run: record_stride must be >= 1");
}

bool finite_in_bounds(const Eigen::VectorXd& w) {
    return w.allFinite() && w.norm() <= kDivergenceRadius;
}

}  // namespace

Trajectory run(const CostModel& model, const GradientOracle& oracle, const Eigen::VectorXd& w0,
               const RunConfig& config) {
    validate_run_config(config);
    if (w0.size() != model.dimension()) throw ContractViolation("run: w0 has wrong dimension");
    if (!finite_in_bounds(w0)) throw ContractViolation("run: w0 is not finite");

    RngStream rng(config.seed);
    Trajectory traj;
    traj.seed = config.seed;
    traj.config = config;

    auto record = [&](long long index, const Eigen::VectorXd& w, double noise_sq) {
        traj.indices.push_back(index);
        traj.iterates.push_back(w);
        traj.costs.push_back(model.cost(w));
        traj.grad_norm_sq.push_back(model.gradient(w).squaredNorm());
        traj.noise_norm_sq.push_back(noise_sq);
    };

    Eigen::VectorXd w = w0;
    record(0, w, 0.0);

    for (long long i = 1; i <= config.horizon; ++i) {
        bool will_record = (i % config.record_stride == 0) || i == config.horizon;
        Eigen::VectorXd direction = oracle.draw_direction(w, rng);
        double noise_sq = 0.0;
        if (will_record || config.stop_radius) {
            noise_sq = (model.gradient(w) - direction).squaredNorm();
        }
        Eigen::VectorXd next = w - config.step_size * direction;
        if (!finite_in_bounds(next)) {
            throw DivergedError("run diverged at iteration " + std::to_string(i) +
                                    " (last finite index " + std::to_string(i - 1) + ")",
                                i - 1);
        }
        w = std::move(next);
        bool stop_now = config.stop_radius && w.norm() > *config.stop_radius;
        if (will_record || stop_now) record(i, w, noise_sq);
        if (stop_now) break;
    }
    return traj;
}

CoupledPair run_coupled(const CostModel& model, const GradientOracle& oracle,
                        const Eigen::VectorXd& anchor, long long horizon, double step_size,
                        std::uint64_t seed) {
    if (horizon < 1) throw ContractViolation("run_coupled: horizon must be >= 1");
    if (step_size < 0) throw ContractViolation("run_coupled: step_size must be nonnegative");
    if (anchor.size() != model.dimension())
        throw ContractViolation("run_coupled: anchor has wrong dimension");
    if (!anchor.allFinite()) throw ContractViolation("run_coupled: anchor is not finite");

    const double mu = step_size;
    const Eigen::VectorXd anchor_grad = model.gradient(anchor);
    const Eigen::MatrixXd anchor_hess = model.hessian(anchor);

    RngStream rng(seed);
    CoupledPair pair;
    pair.anchor = anchor;
    RunConfig cfg;
    cfg.step_size = mu;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.record_stride = 1;
    pair.true_traj.seed = pair.model_traj.seed = seed;
    pair.true_traj.config = pair.model_traj.config = cfg;

    auto record = [&](Trajectory& t, long long index, const Eigen::VectorXd& w, double noise_sq) {
        t.indices.push_back(index);
        t.iterates.push_back(w);
        t.costs.push_back(model.cost(w));
        t.grad_norm_sq.push_back(model.gradient(w).squaredNorm());
        t.noise_norm_sq.push_back(noise_sq);
    };

    Eigen::VectorXd w = anchor;
    Eigen::VectorXd gap = Eigen::VectorXd::Zero(model.dimension());
    record(pair.true_traj, 0, w, 0.0);
    record(pair.model_traj, 0, w, 0.0);
    pair.deviation_sq.push_back(0.0);

    for (long long j = 1; j <= horizon; ++j) {
        Eigen::VectorXd direction = oracle.draw_direction(w, rng);
        Eigen::VectorXd grad_w = model.gradient(w);
        double noise_sq = (grad_w - direction).squaredNorm();
        Eigen::VectorXd err = model.linearization_error(anchor, anchor_grad, anchor_hess, w, grad_w);

        Eigen::VectorXd next = w - mu * direction;
        if (!next.allFinite() || next.norm() > kDivergenceRadius) {
            throw DivergedError("coupled run diverged at iteration " + std::to_string(j) +
                                    " (last finite index " + std::to_string(j - 1) + ")",
                                j - 1);
        }
        gap = gap - mu * (anchor_hess * gap) - mu * err;
        w = std::move(next);

        record(pair.true_traj, j, w, noise_sq);
        record(pair.model_traj, j, w - gap, noise_sq);
        pair.deviation_sq.push_back(gap.squaredNorm());
    }
    return pair;
}

DeviationMoments deviation_moments(const std::vector<CoupledPair>& ensemble, int order) {
    if (ensemble.empty()) throw ContractViolation("deviation_moments: empty ensemble");
    if (order < 2 || order > 4) throw ContractViolation("deviation_moments: order must be 2, 3 or 4");
    const auto& first = ensemble.front();
    const std::size_t steps = first.deviation_sq.size();
    for (const auto& p : ensemble) {
        if (p.deviation_sq.size() != steps || p.anchor != first.anchor ||
            p.true_traj.config.step_size != first.true_traj.config.step_size) {
            throw ContractViolation("deviation_moments: ensemble members have mixed configs");
        }
    }

    DeviationMoments out;
    out.anchor_moment.assign(steps, 0.0);
    out.coupling_gap_sq.assign(steps, 0.0);
    for (const auto& p : ensemble) {
        for (std::size_t j = 0; j < steps; ++j) {
            double dist = (p.true_traj.iterates[j] - p.anchor).norm();
            out.anchor_moment[j] += std::pow(dist, order);
            out.coupling_gap_sq[j] += p.deviation_sq[j];
        }
    }
    const double n = static_cast<double>(ensemble.size());
    for (std::size_t j = 0; j < steps; ++j) {
        out.anchor_moment[j] /= n;
        out.coupling_gap_sq[j] /= n;
    }
    return out;
}

namespace {

void append_header(std::ostringstream& os, int dim, bool coupled) {
    os << "iter";
    for (int m = 0; m < dim; ++m) os << ",w_" << m;
    os << ",cost,grad_norm_sq,region";
    if (coupled) {
        for (int m = 0; m < dim; ++m) os << ",model_w_" << m;
        os << ",deviation_sq";
    }
    os << "\n";
}

void append_row(std::ostringstream& os, const Trajectory& t, std::size_t k,
                const RegionAnnotator& annotate) {
    os << t.indices[k];
    for (long long m = 0; m < t.iterates[k].size(); ++m) os << "," << g17(t.iterates[k][m]);
    os << "," << g17(t.costs[k]) << "," << g17(t.grad_norm_sq[k]) << ",";
    os << (annotate ? annotate(t.iterates[k], t.grad_norm_sq[k]) : '-');
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const RegionAnnotator& annotate) {
    std::ostringstream os;
    int dim = traj.iterates.empty() ? 0 : static_cast<int>(traj.iterates.front().size());
    append_header(os, dim, false);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        append_row(os, traj, k, annotate);
        os << "\n";
    }
    write_file(path, os.str());
}

void write_coupled_csv(const CoupledPair& pair, const std::string& path,
                       const RegionAnnotator& annotate) {
    std::ostringstream os;
    int dim = static_cast<int>(pair.anchor.size());
    append_header(os, dim, true);
    for (std::size_t k = 0; k < pair.true_traj.size(); ++k) {
        append_row(os, pair.true_traj, k, annotate);
        for (int m = 0; m < dim; ++m) os << "," << g17(pair.model_traj.iterates[k][m]);
        os << "," << g17(pair.deviation_sq[k]) << "\n";
    }
    write_file(path, os.str());
}

}  // namespace sscope
