#include "social_learning/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "social_learning/numeric.hpp"

namespace social_learning {

bool RecordStride::should_record(std::size_t time, std::size_t horizon) const {
    if (time == 0 || time == horizon || time <= dense_until) return true;
    return every != 0 && time % every == 0;
}

void ExperimentConfig::validate() const {
    if (topology.num_agents() != network.num_agents()) {
        throw std::invalid_argument("topology and observation model disagree on the number of agents");
    }
    validate_network(network);
    validate_protocol(protocol, network.hypotheses());
    if (initial_beliefs.size() != network.num_agents()) {
        throw std::invalid_argument("need one initial belief per agent");
    }
    for (std::size_t k = 0; k < initial_beliefs.size(); ++k) {
        if (initial_beliefs[k].size() != network.hypotheses()) {
            throw std::invalid_argument("initial belief of agent " + std::to_string(k) + " has the wrong size");
        }
        if (!allow_zero_beliefs && !initial_beliefs[k].strictly_positive()) {
            throw std::invalid_argument("initial belief of agent " + std::to_string(k) +
                                        " has a zero entry; initial beliefs must be strictly positive");
        }
        if (initial_beliefs[k].log(network.truth) == kNegInf) {
            throw std::invalid_argument("initial belief of agent " + std::to_string(k) + " is zero on the truth");
        }
    }
    if (runs == 0) throw std::invalid_argument("runs must be positive");
}

double network_loss(std::span<const Belief> beliefs, const Eigen::VectorXd& perron, Hypothesis truth) {
    double q = 0.0;
    for (std::size_t k = 0; k < beliefs.size(); ++k) q -= perron[static_cast<Eigen::Index>(k)] * beliefs[k].log(truth);
    return q;
}

double log_belief_ratio(const Belief& belief, Hypothesis h, Hypothesis truth) { return belief.log(h) - belief.log(truth); }

double asymptotic_rate(const ObservationModel& model, const Eigen::VectorXd& perron, Hypothesis h, Hypothesis truth) {
    double rate = 0.0;
    for (std::size_t k = 0; k < model.num_agents(); ++k) {
        rate -= perron[static_cast<Eigen::Index>(k)] * model.agent(k).kl_divergence(truth, h);
    }
    return rate;
}

std::vector<double> asymptotic_rates(const ObservationModel& model, const Eigen::VectorXd& perron, Hypothesis truth) {
    std::vector<double> out(model.hypotheses());
    for (Hypothesis h = 0; h < out.size(); ++h) out[h] = asymptotic_rate(model, perron, h, truth);
    return out;
}

std::uint64_t seed_for_run(std::uint64_t master_seed, std::size_t run) {
    return run == 0 ? master_seed : derive_seed(master_seed, StreamKind::Run, run, 0);
}

namespace {

TraceRecord make_record(const NetworkState& state, const SocialNetwork& network) {
    return {state.time, state.tau, network_loss(state.beliefs, network.combination.perron(), network.truth),
            state.beliefs};
}

void append(RunTrace& trace, TraceRecord record) {
    if (!std::isfinite(record.loss)) trace.zero_truth_events.push_back(record.time);
    trace.records.push_back(std::move(record));
}

}  // namespace

RunTrace run_single(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    RunTrace trace;
    trace.seed = seed;
    trace.truth = config.network.truth;
    NetworkState state = NetworkState::initial(config.initial_beliefs);
    append(trace, make_record(state, config.network));
    for (std::size_t t = 1; t <= config.horizon; ++t) {
        try {
            state = step(state, config.protocol, config.network, seed);
        } catch (const std::exception& e) {
            throw SimulationError(e.what(), std::move(trace));
        }
        if (config.stride.should_record(t, config.horizon)) append(trace, make_record(state, config.network));
    }
    return trace;
}

std::vector<NetworkState> simulate_states(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    std::vector<NetworkState> states;
    states.reserve(config.horizon + 1);
    states.push_back(NetworkState::initial(config.initial_beliefs));
    for (std::size_t t = 1; t <= config.horizon; ++t) {
        states.push_back(step(states.back(), config.protocol, config.network, seed));
    }
    return states;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    result.runs.resize(config.runs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t r = next++; r < config.runs; r = next++) {
            try {
                result.runs[r] = run_single(config, seed_for_run(config.seed, r));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t workers =
        std::min<std::size_t>(config.runs, std::max(1U, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);

    if (config.runs > 1) {
        const auto& reference = result.runs.front().records;
        const double scale = 1.0 / static_cast<double>(config.runs);
        for (std::size_t i = 0; i < reference.size(); ++i) {
            MeanRecord m{reference[i].time, 0.0,
                         std::vector<std::vector<double>>(config.num_agents(), std::vector<double>(config.hypotheses(), 0.0))};
            for (const auto& run : result.runs) {
                const auto& rec = run.records[i];
                m.loss += scale * rec.loss;
                for (std::size_t k = 0; k < rec.beliefs.size(); ++k) {
                    for (Hypothesis h = 0; h < config.hypotheses(); ++h) m.log_beliefs[k][h] += scale * rec.beliefs[k].log(h);
                }
            }
            result.mean.push_back(std::move(m));
        }
    }
    return result;
}

GuardResult mislearning_guard(const RunTrace& trace) {
    GuardResult g{1.0, 0.0, 0, 0, false};
    for (const auto& rec : trace.records) {
        for (std::size_t k = 0; k < rec.beliefs.size(); ++k) {
            const double lg = rec.beliefs[k].log(trace.truth);
            if (lg < g.min_log_truth_belief) {
                g.min_log_truth_belief = lg;
                g.min_truth_belief = std::exp(lg);
                g.agent = k;
                g.time = rec.time;
            }
            if (lg == kNegInf) g.zero_reached = true;
        }
    }
    return g;
}

}  // namespace social_learning
