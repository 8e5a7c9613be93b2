#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "social_learning/rng.hpp"

namespace social_learning {

// Hypotheses are 0-based internally; configs and emitted files use 1-based
// labels.
using Hypothesis = std::size_t;

// A real-valued sample for Gaussian agents, a symbol index for finite ones.
using Observation = std::variant<double, std::size_t>;

// Unit-variance Gaussian family, one mean per hypothesis.
struct GaussianFamily {
    std::vector<double> means;
};

// Finite alphabet family, one pmf row per hypothesis.
struct FiniteFamily {
    std::vector<std::vector<double>> rows;
};

class InfiniteDivergence : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

inline constexpr double kPmfTolerance = 1e-12;
// KL values at or below this are treated as "cannot distinguish".
inline constexpr double kIdentifiabilityThreshold = 1e-12;

class AgentLikelihood {
   public:
    // Throws std::invalid_argument on malformed families (fewer than two
    // hypotheses, non-finite means, rows that are not pmfs).
    static AgentLikelihood gaussian(std::vector<double> means);
    static AgentLikelihood finite(std::vector<std::vector<double>> rows);

    std::size_t hypotheses() const;
    bool is_gaussian() const { return std::holds_alternative<GaussianFamily>(family_); }
    const GaussianFamily* gaussian_family() const { return std::get_if<GaussianFamily>(&family_); }
    const FiniteFamily* finite_family() const { return std::get_if<FiniteFamily>(&family_); }

    double log_likelihood(const Observation& x, Hypothesis h) const;
    double likelihood(const Observation& x, Hypothesis h) const;
    std::vector<double> log_likelihood_row(const Observation& x) const;

    Observation sample(Hypothesis truth, Stream& stream) const;

    // D_KL(L(.|a) || L(.|b)). Throws InfiniteDivergence on a support violation.
    double kl_divergence(Hypothesis a, Hypothesis b) const;

    // (1/(H-1)) sum over h != excluded of L(x|h).
    double average_likelihood(Hypothesis excluded, const Observation& x) const;

   private:
    using Family = std::variant<GaussianFamily, FiniteFamily>;
    explicit AgentLikelihood(Family f) : family_(std::move(f)) {}
    Family family_;
};

// Likelihood families for every agent of a network over a shared hypothesis
// set.
class ObservationModel {
   public:
    explicit ObservationModel(std::vector<AgentLikelihood> agents);

    std::size_t num_agents() const { return agents_.size(); }
    std::size_t hypotheses() const { return hypotheses_; }
    const AgentLikelihood& agent(std::size_t k) const { return agents_.at(k); }
    const std::vector<AgentLikelihood>& agents() const { return agents_; }

    // Every agent must have finite KL from the true hypothesis to every
    // other one. Throws std::invalid_argument naming the first offender.
    void require_finite_informativeness(Hypothesis truth) const;

   private:
    std::vector<AgentLikelihood> agents_;
    std::size_t hypotheses_ = 0;
};

double kl_divergence(const ObservationModel& model, std::size_t agent, Hypothesis a, Hypothesis b);
double average_likelihood(const ObservationModel& model, std::size_t agent, Hypothesis excluded,
                          const Observation& x);

struct IdentifiabilityEntry {
    Hypothesis hypothesis;
    bool identifiable;
    std::optional<std::size_t> witness;  // first agent with positive KL
    std::vector<std::size_t> distinguishing_agents;
};

// One entry per wrong hypothesis, in index order.
std::vector<IdentifiabilityEntry> check_global_identifiability(const ObservationModel& model, Hypothesis truth);

// Observation for (agent, time) is drawn from its own stream.
Observation sample_observation(const ObservationModel& model, std::size_t agent, Hypothesis truth,
                               Stream& stream);

class TrendDistribution {
   public:
    // Throws std::invalid_argument if probs is not a pmf.
    explicit TrendDistribution(std::vector<double> probs);
    static TrendDistribution point_mass(std::size_t hypotheses, Hypothesis h);
    static TrendDistribution uniform(std::size_t hypotheses);

    std::size_t size() const { return probs_.size(); }
    double prob(Hypothesis h) const { return probs_.at(h); }
    const std::vector<double>& probs() const { return probs_; }

    // Inverse-CDF draw in index order.
    Hypothesis sample(Stream& stream) const;

   private:
    std::vector<double> probs_;
};

Hypothesis sample_trend(const TrendDistribution& trend, Stream& stream);

struct QuadratureResult {
    double value;
    double error_estimate;
};

// D_KL(L(.|from) || L(.|not excluded)), the second argument being the
// uniform mixture over every hypothesis except `excluded`. Gaussian
// families are integrated numerically over a 10-sigma window around the
// mean of `from`; finite families are summed exactly (error 0).
QuadratureResult kl_to_complement_mixture(const AgentLikelihood& likelihood, Hypothesis from, Hypothesis excluded);

}  // namespace social_learning
