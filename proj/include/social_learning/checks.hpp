#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "social_learning/engine.hpp"

namespace social_learning {

enum class CheckStatus { Pass, Fail, Skipped };

std::string status_name(CheckStatus status);

struct CheckReport {
    std::string name;
    CheckStatus status = CheckStatus::Fail;
    double statistic = 0.0;
    double tolerance = 0.0;
    std::string comparison;  // how statistic relates to tolerance when passing, e.g. "<"
    std::vector<std::pair<std::string, std::size_t>> samples;
    std::uint64_t seed = 0;
    std::vector<std::string> details;
    std::string note;
    std::vector<CheckReport> parts;

    bool passed() const { return status != CheckStatus::Fail; }
};

nlohmann::json report_json(const CheckReport& report);
// One line per report and part: "PASS name: statistic < tolerance".
std::string report_summary(const CheckReport& report);

// |r_{k,T}(h)/T - d_ave(h)| / |d_ave(h)| < tolerance for every agent. With no
// hypothesis given, every wrong h the protocol can share is checked as a part.
CheckReport check_rate_convergence(const ExperimentConfig& config, std::optional<Hypothesis> hypothesis,
                                   double tolerance = 0.05);

// Same config under FullSharing: per-agent r_T(h)/T of both protocols agree
// within `tolerance` relative to the full-sharing value.
CheckReport check_protocol_equivalence(const ExperimentConfig& config, double tolerance = 0.02);

// Every agent ends with mu_{k,T}(truth) > threshold.
CheckReport check_truth_learning(const ExperimentConfig& config, double threshold = 0.99);

struct SupermartingaleOptions {
    std::size_t states = 20;
    std::size_t branches = 1000;
    std::size_t prefix = 200;  // frozen states are spread over times [1, prefix)
    bool flipped = false;      // assert E[Q_i] >= Q_{i-1} - 3 SE instead (negative control)
};

// Branches one step from frozen states of a run and compares the Monte-Carlo
// estimate of E[Q(mu_i) | F_{i-1}] with Q(mu_{i-1}) + 3 SE.
CheckReport check_supermartingale(const ExperimentConfig& config, std::uint64_t seed,
                                  const SupermartingaleOptions& options = {});

// Three-agent equilibrium with zero beliefs: beliefs stay within `tolerance`
// of their initial values for `steps` rounds.
CheckReport check_fixed_point(double alpha, std::uint64_t seed, std::size_t steps = 100, double tolerance = 1e-10);
// Same construction with a uniform trend; passes when the beliefs move by
// more than `min_drift`.
CheckReport check_fixed_point_contrast(double alpha, std::uint64_t seed, std::size_t steps = 100,
                                       double min_drift = 1e-3);

// Truth belief stays positive and the least-squares slope of log mu_k(truth)
// over the final quarter is >= -epsilon per step, for every named config.
CheckReport check_no_mislearning(const std::vector<std::pair<std::string, ExperimentConfig>>& configs,
                                 double epsilon = 1e-3);

// min over recorded times and agents of mu(truth) > floor, and no agent
// exceeds `ceiling` on a wrong hypothesis.
CheckReport check_confidence_bounds(const ExperimentConfig& config, double floor = 0.01, double ceiling = 0.99);

struct MatrixLemmaOptions {
    std::size_t samples = 10000;    // windows for the factor-count test
    std::size_t window = 20;        // factors per window
    std::size_t max_length = 40;    // longest window for the slope fit
    std::size_t slope_samples = 2000;
    std::size_t product_length = 500;
    std::size_t product_samples = 50;
    double slope_margin = 0.05;
    double product_tolerance = 1e-6;
};

// Random products of A (probability pi) and I: factor counts, exact A^m
// structure, decay rate of E||(A~)^T (I - A^T)||_2, and convergence to v 1^T.
CheckReport check_matrix_product_lemmas(const CombinationMatrix& combination, double pi, std::uint64_t seed,
                                        const MatrixLemmaOptions& options = {});

struct MislearningCondition {
    double shared_side;      // sum_k v_k KL(L_k(.|truth) || L_k(.|tau))
    double complement_side;  // sum_k v_k KL(L_k(.|truth) || mixture over h != tau)
    double quadrature_error;
    bool holds;              // shared_side < complement_side
};

MislearningCondition evaluate_mislearning_condition(const ObservationModel& model, const Eigen::VectorXd& perron,
                                                    Hypothesis truth, Hypothesis tau);

// Condition evaluated for the config's FixedPartial tau; when it holds the
// uniform-fill run must end with mu_{k,T}(tau) > threshold for all agents.
CheckReport check_mislearning_condition(const ExperimentConfig& config, double threshold = 0.99,
                                        double quadrature_tolerance = 1e-6);

// FixedPartial with tau = truth: every agent ends above `threshold` on the truth.
CheckReport check_truth_sharing_uniform_fill(const ExperimentConfig& config, double threshold = 0.99);

// Running max over j of ||Psi_j||_inf, Psi_j = -log psi_{.,j}(truth), is finite
// and grows by at most `growth` over the second half of the run.
CheckReport check_boundedness(const ExperimentConfig& config, double growth = 0.1);

// Splits x_T = log mu_T(h) - log mu_T(truth) into data, initial and
// residual parts via the effective matrices; checks the split reproduces x_T
// and that |residual / T| <= fraction * |d_ave(h)| for every agent.
CheckReport check_residual_mean(const ExperimentConfig& config, double fraction = 0.1);

struct BatteryEntry {
    std::string name;
    std::string description;
    std::function<CheckReport(std::uint64_t seed)> run;
};

const std::vector<BatteryEntry>& available_checks();
std::vector<std::string> check_names();
// Throws std::invalid_argument for an unknown name; "all" selects everything.
std::vector<CheckReport> run_battery(const std::vector<std::string>& selected, std::uint64_t seed);

}  // namespace social_learning
