#include "social_learning/models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "social_learning/numeric.hpp"

namespace social_learning {

namespace {

const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

double gaussian_log_density(double x, double mean) {
    const double d = x - mean;
    return -0.5 * d * d - kHalfLogTwoPi;
}

void check_pmf(const std::vector<double>& p, const std::string& what) {
    if (p.empty()) throw std::invalid_argument(what + " is empty");
    double sum = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument(what + " has a negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kPmfTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " sums to " << sum << ", expected 1";
        throw std::invalid_argument(msg.str());
    }
}

std::size_t symbol_of(const Observation& x, std::size_t alphabet) {
    const auto* s = std::get_if<std::size_t>(&x);
    if (s == nullptr) throw std::invalid_argument("finite-alphabet likelihood needs a symbol observation");
    if (*s >= alphabet) throw std::out_of_range("observation symbol outside the alphabet");
    return *s;
}

double real_of(const Observation& x) {
    const auto* v = std::get_if<double>(&x);
    if (v == nullptr) throw std::invalid_argument("Gaussian likelihood needs a real observation");
    return *v;
}

}  // namespace

AgentLikelihood AgentLikelihood::gaussian(std::vector<double> means) {
    if (means.size() < 2) throw std::invalid_argument("a likelihood family needs at least two hypotheses");
    for (double m : means) {
        if (!std::isfinite(m)) throw std::invalid_argument("Gaussian means must be finite");
    }
    return AgentLikelihood(GaussianFamily{std::move(means)});
}

AgentLikelihood AgentLikelihood::finite(std::vector<std::vector<double>> rows) {
    if (rows.size() < 2) throw std::invalid_argument("a likelihood family needs at least two hypotheses");
    const std::size_t alphabet = rows.front().size();
    for (std::size_t h = 0; h < rows.size(); ++h) {
        if (rows[h].size() != alphabet) throw std::invalid_argument("finite likelihood rows differ in alphabet size");
        check_pmf(rows[h], "likelihood row " + std::to_string(h + 1));
    }
    return AgentLikelihood(FiniteFamily{std::move(rows)});
}

std::size_t AgentLikelihood::hypotheses() const {
    return std::visit(
        [](const auto& f) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(f)>, GaussianFamily>) {
                return f.means.size();
            } else {
                return f.rows.size();
            }
        },
        family_);
}

double AgentLikelihood::log_likelihood(const Observation& x, Hypothesis h) const {
    if (const auto* g = gaussian_family()) return gaussian_log_density(real_of(x), g->means.at(h));
    const auto& rows = finite_family()->rows;
    return std::log(rows.at(h)[symbol_of(x, rows.front().size())]);
}

double AgentLikelihood::likelihood(const Observation& x, Hypothesis h) const { return std::exp(log_likelihood(x, h)); }

std::vector<double> AgentLikelihood::log_likelihood_row(const Observation& x) const {
    std::vector<double> row(hypotheses());
    for (Hypothesis h = 0; h < row.size(); ++h) row[h] = log_likelihood(x, h);
    return row;
}

Observation AgentLikelihood::sample(Hypothesis truth, Stream& stream) const {
    if (const auto* g = gaussian_family()) return g->means.at(truth) + stream.normal();
    const auto& row = finite_family()->rows.at(truth);
    const double u = stream.uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t s = 0; s < row.size(); ++s) {
        if (row[s] <= 0.0) continue;
        last_positive = s;
        cumulative += row[s];
        if (u < cumulative) return s;
    }
    // Rounding left u above the accumulated mass.
    return last_positive;
}

double AgentLikelihood::kl_divergence(Hypothesis a, Hypothesis b) const {
    if (const auto* g = gaussian_family()) {
        const double d = g->means.at(a) - g->means.at(b);
        return 0.5 * d * d;
    }
    const auto& p = finite_family()->rows.at(a);
    const auto& q = finite_family()->rows.at(b);
    double kl = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (p[s] == 0.0) continue;
        if (q[s] == 0.0) {
            std::ostringstream msg;
            msg << "KL divergence between hypotheses " << a + 1 << " and " << b + 1
                << " is infinite: symbol " << s << " has zero mass under " << b + 1;
            throw InfiniteDivergence(msg.str());
        }
        kl += p[s] * std::log(p[s] / q[s]);
    }
    return std::max(kl, 0.0);
}

double AgentLikelihood::average_likelihood(Hypothesis excluded, const Observation& x) const {
    const std::size_t n = hypotheses();
    double sum = 0.0;
    for (Hypothesis h = 0; h < n; ++h) {
        if (h != excluded) sum += likelihood(x, h);
    }
    return sum / static_cast<double>(n - 1);
}

ObservationModel::ObservationModel(std::vector<AgentLikelihood> agents) : agents_(std::move(agents)) {
    if (agents_.empty()) throw std::invalid_argument("observation model needs at least one agent");
    hypotheses_ = agents_.front().hypotheses();
    for (std::size_t k = 0; k < agents_.size(); ++k) {
        if (agents_[k].hypotheses() != hypotheses_) {
            std::ostringstream msg;
            msg << "agent " << k << " has " << agents_[k].hypotheses() << " hypotheses, expected " << hypotheses_;
            throw std::invalid_argument(msg.str());
        }
    }
}

void ObservationModel::require_finite_informativeness(Hypothesis truth) const {
    if (truth >= hypotheses_) throw std::invalid_argument("true hypothesis out of range");
    for (std::size_t k = 0; k < agents_.size(); ++k) {
        for (Hypothesis h = 0; h < hypotheses_; ++h) {
            try {
                (void)agents_[k].kl_divergence(truth, h);
            } catch (const InfiniteDivergence& e) {
                throw std::invalid_argument("agent " + std::to_string(k) + ": " + e.what());
            }
        }
    }
}

double kl_divergence(const ObservationModel& model, std::size_t agent, Hypothesis a, Hypothesis b) {
    return model.agent(agent).kl_divergence(a, b);
}

double average_likelihood(const ObservationModel& model, std::size_t agent, Hypothesis excluded, const Observation& x) {
    return model.agent(agent).average_likelihood(excluded, x);
}

std::vector<IdentifiabilityEntry> check_global_identifiability(const ObservationModel& model, Hypothesis truth) {
    std::vector<IdentifiabilityEntry> out;
    for (Hypothesis h = 0; h < model.hypotheses(); ++h) {
        if (h == truth) continue;
        IdentifiabilityEntry entry{h, false, std::nullopt, {}};
        for (std::size_t k = 0; k < model.num_agents(); ++k) {
            if (model.agent(k).kl_divergence(truth, h) > kIdentifiabilityThreshold) {
                entry.distinguishing_agents.push_back(k);
            }
        }
        entry.identifiable = !entry.distinguishing_agents.empty();
        if (entry.identifiable) entry.witness = entry.distinguishing_agents.front();
        out.push_back(std::move(entry));
    }
    return out;
}

Observation sample_observation(const ObservationModel& model, std::size_t agent, Hypothesis truth, Stream& stream) {
    return model.agent(agent).sample(truth, stream);
}

TrendDistribution::TrendDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    check_pmf(probs_, "trend distribution");
}

TrendDistribution TrendDistribution::point_mass(std::size_t hypotheses, Hypothesis h) {
    std::vector<double> p(hypotheses, 0.0);
    p.at(h) = 1.0;
    return TrendDistribution(std::move(p));
}

TrendDistribution TrendDistribution::uniform(std::size_t hypotheses) {
    return TrendDistribution(std::vector<double>(hypotheses, 1.0 / static_cast<double>(hypotheses)));
}

Hypothesis TrendDistribution::sample(Stream& stream) const {
    const double u = stream.uniform();
    double cumulative = 0.0;
    Hypothesis last_positive = 0;
    for (Hypothesis h = 0; h < probs_.size(); ++h) {
        if (probs_[h] <= 0.0) continue;
        last_positive = h;
        cumulative += probs_[h];
        if (u < cumulative) return h;
    }
    return last_positive;
}

Hypothesis sample_trend(const TrendDistribution& trend, Stream& stream) { return trend.sample(stream); }

QuadratureResult kl_to_complement_mixture(const AgentLikelihood& likelihood, Hypothesis from, Hypothesis excluded) {
    const std::size_t n = likelihood.hypotheses();
    if (from >= n || excluded >= n) throw std::out_of_range("hypothesis out of range");
    const double log_weight = -std::log(static_cast<double>(n - 1));

    if (const auto* finite = likelihood.finite_family()) {
        const auto& p = finite->rows[from];
        double kl = 0.0;
        for (std::size_t s = 0; s < p.size(); ++s) {
            if (p[s] == 0.0) continue;
            double q = 0.0;
            for (Hypothesis h = 0; h < n; ++h) {
                if (h != excluded) q += finite->rows[h][s];
            }
            q /= static_cast<double>(n - 1);
            if (q == 0.0) throw InfiniteDivergence("mixture assigns zero mass to an observable symbol");
            kl += p[s] * std::log(p[s] / q);
        }
        return {std::max(kl, 0.0), 0.0};
    }

    const auto& means = likelihood.gaussian_family()->means;
    const double center = means[from];
    std::vector<double> terms(n - 1);
    const auto integrand = [&](double x) {
        const double log_p = gaussian_log_density(x, center);
        std::size_t j = 0;
        for (Hypothesis h = 0; h < n; ++h) {
            if (h != excluded) terms[j++] = gaussian_log_density(x, means[h]);
        }
        const double log_q = log_sum_exp(terms) + log_weight;
        return std::exp(log_p) * (log_p - log_q);
    };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, center - 10.0, center + 10.0, 20, 1e-13, &error);
    // Mass outside the window is below 2e-23 and its log-ratio is bounded
    // by a polynomial, so the truncation error is far below 1e-6.
    return {value, error};
}

}  // namespace social_learning
