#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "social_learning/models.hpp"
#include "social_learning/network.hpp"

namespace social_learning {

class BeliefError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

// Probability mass function over the hypotheses, stored as natural logs.
// Construction always renormalizes, so log-sum-exp of the entries is 0 up
// to rounding. Entries may be -inf (zero belief).
class Belief {
   public:
    // Throws BeliefError if every entry is zero / -inf.
    static Belief from_log(std::vector<double> log_values);
    // Entries must be nonnegative and sum to 1 within 1e-9.
    static Belief from_probabilities(std::span<const double> probs);
    static Belief uniform(std::size_t hypotheses);

    std::size_t size() const { return log_.size(); }
    double log(Hypothesis h) const { return log_.at(h); }
    double prob(Hypothesis h) const;
    std::span<const double> log_values() const { return log_; }
    std::vector<double> probabilities() const;

    bool strictly_positive() const;
    // |log-sum-exp(entries)|, zero for an exactly normalized vector.
    double normalization_error() const;

    friend bool operator==(const Belief&, const Belief&) = default;

   private:
    explicit Belief(std::vector<double> log_values) : log_(std::move(log_values)) {}
    std::vector<double> log_;
};

// Exact Bayes on the simplex: log psi = log L(x|.) + log mu - normalizer.
Belief local_bayes_update(const Belief& prior, std::span<const double> log_likelihood_row);

// Normalized weighted geometric mean; weights must be nonnegative and sum
// to 1. Zero-weight entries do not participate, so a -inf entry of such a
// belief does not leak into the result.
Belief combine_geometric(std::span<const Belief> beliefs, std::span<const double> weights);

// Geometric fusion at agent k with the weights of column k of A.
Belief combine_full(std::span<const Belief> intermediates, const CombinationMatrix& combination, std::size_t agent);

// The single belief component an agent transmits. The complement
// log(1 - psi(tau)) is carried alongside so receivers never form 1 - psi in
// floating point when psi(tau) is close to one.
struct SharedComponent {
    Hypothesis hypothesis;
    double log_value;
    double log_complement;
};

SharedComponent share(const Belief& intermediate, Hypothesis tau);
// Build a message from a bare probability in (0, 1).
SharedComponent shared_value(Hypothesis tau, double value);

// Uniform completion: psi(tau) as received, (1 - psi(tau)) / (H - 1)
// everywhere else. Throws BeliefError unless the received value is in (0, 1).
Belief fill_uniform(const SharedComponent& received, std::size_t hypotheses);

// Bootstrap completion at the receiving agent: take psi_l(tau) from the
// message, own psi_k(theta) elsewhere, divide by
// Z = 1 - psi_k(tau) + psi_l(tau). Z is formed as a log-sum-exp of the
// own non-tau entries and the received value. Throws BeliefError unless the
// received value is in (0, 1].
Belief bootstrap_fill(const Belief& own, const SharedComponent& received);

}  // namespace social_learning
