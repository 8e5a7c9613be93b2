#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "social_learning/belief.hpp"
#include "social_learning/network.hpp"
#include "social_learning/protocol.hpp"

namespace social_learning {

// Which time steps get a trace record: every step up to `dense_until`,
// then every `every` steps. Time 0 and the horizon are always recorded.
struct RecordStride {
    std::size_t dense_until = 100;
    std::size_t every = 10;

    bool should_record(std::size_t time, std::size_t horizon) const;
};

struct ExperimentConfig {
    Topology topology;
    SocialNetwork network;
    Protocol protocol;
    std::vector<Belief> initial_beliefs;
    std::size_t horizon = 2000;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    RecordStride stride;
    // Zero initial beliefs violate the positivity requirement on priors;
    // only constructed equilibria opt in.
    bool allow_zero_beliefs = false;

    // Throws std::invalid_argument listing the first inconsistency.
    void validate() const;
    std::size_t num_agents() const { return network.num_agents(); }
    std::size_t hypotheses() const { return network.hypotheses(); }
};

struct TraceRecord {
    std::size_t time;
    std::optional<Hypothesis> tau;
    double loss;  // Q(mu_i); +inf flags a zero truth-belief
    std::vector<Belief> beliefs;
};

struct RunTrace {
    std::uint64_t seed = 0;
    Hypothesis truth = 0;
    std::vector<TraceRecord> records;
    // Recorded times at which some agent had zero belief on the truth.
    std::vector<std::size_t> zero_truth_events;

    const TraceRecord& last() const { return records.back(); }
};

// Thrown when a step fails; carries every record produced before the failure.
class SimulationError : public std::runtime_error {
   public:
    SimulationError(const std::string& what, RunTrace partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const RunTrace& partial() const { return partial_; }

   private:
    RunTrace partial_;
};

// Q = -sum_k v_k log mu_k(truth).
double network_loss(std::span<const Belief> beliefs, const Eigen::VectorXd& perron, Hypothesis truth);

// log mu(h) - log mu(truth).
double log_belief_ratio(const Belief& belief, Hypothesis h, Hypothesis truth);

// d_ave(h) = -sum_k v_k D_KL(L_k(.|truth) || L_k(.|h)).
double asymptotic_rate(const ObservationModel& model, const Eigen::VectorXd& perron, Hypothesis h, Hypothesis truth);
// d_ave for every hypothesis (0 at the truth).
std::vector<double> asymptotic_rates(const ObservationModel& model, const Eigen::VectorXd& perron, Hypothesis truth);

std::uint64_t seed_for_run(std::uint64_t master_seed, std::size_t run);

RunTrace run_single(const ExperimentConfig& config, std::uint64_t seed);

// Every state from time 0 to the horizon, unrecorded, for analyses that
// need the intermediate beliefs of every round.
std::vector<NetworkState> simulate_states(const ExperimentConfig& config, std::uint64_t seed);

struct MeanRecord {
    std::size_t time;
    double loss;
    std::vector<std::vector<double>> log_beliefs;  // [agent][hypothesis], averaged over runs
};

struct ExperimentResult {
    std::vector<RunTrace> runs;
    std::vector<MeanRecord> mean;  // empty for a single run
};

// Runs config.runs independent replicas (run r uses seed_for_run(seed, r))
// on a small thread pool.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct GuardResult {
    double min_truth_belief;
    double min_log_truth_belief;
    std::size_t agent;
    std::size_t time;
    bool zero_reached;
};

// Infimum of mu_{k,i}(truth) over recorded times and agents.
GuardResult mislearning_guard(const RunTrace& trace);

}  // namespace social_learning
