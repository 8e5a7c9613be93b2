#include "social_learning/belief.hpp"

#include <cmath>
#include <sstream>

#include "social_learning/numeric.hpp"

namespace social_learning {

Belief Belief::from_log(std::vector<double> log_values) {
    if (log_values.empty()) throw BeliefError("belief over an empty hypothesis set");
    for (double v : log_values) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            throw BeliefError("belief log entries must be finite or -inf");
        }
    }
    const double z = log_sum_exp(log_values);
    if (z == kNegInf) throw BeliefError("belief has no mass on any hypothesis");
    for (double& v : log_values) v -= z;
    return Belief(std::move(log_values));
}

Belief Belief::from_probabilities(std::span<const double> probs) {
    double sum = 0.0;
    std::vector<double> logs;
    logs.reserve(probs.size());
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw BeliefError("belief probabilities must be finite and nonnegative");
        sum += p;
        logs.push_back(std::log(p));
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "belief sums to " << sum << ", expected 1";
        throw BeliefError(msg.str());
    }
    return from_log(std::move(logs));
}

Belief Belief::uniform(std::size_t hypotheses) {
    if (hypotheses == 0) throw BeliefError("belief over an empty hypothesis set");
    return Belief(std::vector<double>(hypotheses, -std::log(static_cast<double>(hypotheses))));
}

double Belief::prob(Hypothesis h) const { return std::exp(log_.at(h)); }

std::vector<double> Belief::probabilities() const {
    std::vector<double> p(log_.size());
    for (std::size_t h = 0; h < p.size(); ++h) p[h] = std::exp(log_[h]);
    return p;
}

bool Belief::strictly_positive() const {
    for (double v : log_) {
        if (v == kNegInf) return false;
    }
    return true;
}

double Belief::normalization_error() const { return std::abs(log_sum_exp(log_)); }

Belief local_bayes_update(const Belief& prior, std::span<const double> log_likelihood_row) {
    if (log_likelihood_row.size() != prior.size()) throw BeliefError("likelihood row size does not match the belief");
    std::vector<double> posterior(prior.size());
    for (std::size_t h = 0; h < posterior.size(); ++h) {
        const double ll = log_likelihood_row[h];
        if (std::isnan(ll) || ll == std::numeric_limits<double>::infinity()) {
            throw BeliefError("likelihood row has a non-finite entry");
        }
        posterior[h] = ll + prior.log(h);
    }
    if (log_sum_exp(posterior) == kNegInf) {
        throw BeliefError("observation has zero likelihood under every hypothesis with positive belief");
    }
    return Belief::from_log(std::move(posterior));
}

Belief combine_geometric(std::span<const Belief> beliefs, std::span<const double> weights) {
    if (beliefs.empty() || beliefs.size() != weights.size()) throw BeliefError("combine needs one weight per belief");
    const std::size_t n = beliefs.front().size();
    std::vector<double> acc(n, 0.0);
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        if (beliefs[j].size() != n) throw BeliefError("combined beliefs differ in size");
        const double w = weights[j];
        if (w == 0.0) continue;
        for (std::size_t h = 0; h < n; ++h) acc[h] += w * beliefs[j].log(h);
    }
    return Belief::from_log(std::move(acc));
}

Belief combine_full(std::span<const Belief> intermediates, const CombinationMatrix& combination, std::size_t agent) {
    const auto& hood = combination.neighbors(agent);
    std::vector<Belief> received;
    std::vector<double> weights;
    received.reserve(hood.size());
    weights.reserve(hood.size());
    for (std::size_t l : hood) {
        received.push_back(intermediates[l]);
        weights.push_back(combination.weight(l, agent));
    }
    return combine_geometric(received, weights);
}

SharedComponent share(const Belief& intermediate, Hypothesis tau) {
    std::vector<double> others;
    others.reserve(intermediate.size() - 1);
    for (Hypothesis h = 0; h < intermediate.size(); ++h) {
        if (h != tau) others.push_back(intermediate.log(h));
    }
    return {tau, intermediate.log(tau), log_sum_exp(others)};
}

SharedComponent shared_value(Hypothesis tau, double value) {
    if (!(value >= 0.0 && value <= 1.0)) throw BeliefError("shared belief value must lie in [0, 1]");
    return {tau, std::log(value), std::log1p(-value)};
}

Belief fill_uniform(const SharedComponent& received, std::size_t hypotheses) {
    if (hypotheses < 2) throw BeliefError("uniform fill needs at least two hypotheses");
    if (received.hypothesis >= hypotheses) throw BeliefError("shared hypothesis out of range");
    if (!std::isfinite(received.log_value) || !std::isfinite(received.log_complement)) {
        throw BeliefError("uniform fill needs a received value strictly inside (0, 1)");
    }
    const double rest = received.log_complement - std::log(static_cast<double>(hypotheses - 1));
    std::vector<double> out(hypotheses, rest);
    out[received.hypothesis] = received.log_value;
    return Belief::from_log(std::move(out));
}

Belief bootstrap_fill(const Belief& own, const SharedComponent& received) {
    const Hypothesis tau = received.hypothesis;
    if (tau >= own.size()) throw BeliefError("shared hypothesis out of range");
    // A received zero is allowed: Z = 1 - psi_k(tau) stays positive unless
    // own is a point mass on tau, which from_log rejects below.
    if (std::isnan(received.log_value) || received.log_value > 0.0) {
        throw BeliefError("bootstrap fill needs a received value in [0, 1]");
    }
    // Neighbor agrees with us on tau: Z = 1 and the completion is our own belief.
    if (received.log_value == own.log(tau)) return own;

    std::vector<double> out(own.log_values().begin(), own.log_values().end());
    out[tau] = received.log_value;
    // from_log divides by Z; the received entry keeps Z > 0.
    return Belief::from_log(std::move(out));
}

}  // namespace social_learning
