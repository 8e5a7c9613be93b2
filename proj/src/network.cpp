#include "social_learning/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace social_learning {

namespace {

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix support_of(const Eigen::MatrixXd& m) {
    const auto n = static_cast<std::size_t>(m.rows());
    BoolMatrix s(n, std::vector<bool>(n, false));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            s[r][c] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) > 0.0;
        }
    }
    return s;
}

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
    const std::size_t n = a.size();
    BoolMatrix out(n, std::vector<bool>(n, false));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!a[r][k]) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (b[k][c]) out[r][c] = true;
            }
        }
    }
    return out;
}

bool all_true(const BoolMatrix& m) {
    return std::all_of(m.begin(), m.end(),
                       [](const auto& row) { return std::all_of(row.begin(), row.end(), [](bool b) { return b; }); });
}

bool reaches_all(std::size_t n, std::size_t start, const auto& adjacent) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen[start] = true;
    frontier.push(start);
    std::size_t count = 1;
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t w = 0; w < n; ++w) {
            if (!seen[w] && adjacent(u, w)) {
                seen[w] = true;
                ++count;
                frontier.push(w);
            }
        }
    }
    return count == n;
}

}  // namespace

Topology::Topology(std::size_t num_agents) : num_agents_(num_agents), in_(num_agents, std::vector<bool>(num_agents, false)) {
    if (num_agents == 0) throw std::invalid_argument("topology needs at least one agent");
}

Topology Topology::from_adjacency(const std::vector<std::vector<std::size_t>>& neighbors) {
    Topology t(neighbors.size());
    for (std::size_t k = 0; k < neighbors.size(); ++k) {
        for (std::size_t l : neighbors[k]) {
            if (l == k) continue;
            t.add_edge(l, k);
        }
    }
    return t;
}

Topology Topology::undirected(std::size_t num_agents, const std::vector<std::pair<std::size_t, std::size_t>>& links) {
    Topology t(num_agents);
    for (const auto& [a, b] : links) {
        t.add_edge(a, b);
        t.add_edge(b, a);
    }
    return t;
}

void Topology::add_edge(std::size_t from, std::size_t to) {
    if (from >= num_agents_ || to >= num_agents_) {
        std::ostringstream msg;
        msg << "edge " << from << "->" << to << " references an agent outside [0, " << num_agents_ << ")";
        throw std::invalid_argument(msg.str());
    }
    if (from == to) {
        throw std::invalid_argument("self loops are implied and cannot be added explicitly");
    }
    if (in_[to][from]) {
        std::ostringstream msg;
        msg << "duplicate edge " << from << "->" << to;
        throw std::invalid_argument(msg.str());
    }
    in_[to][from] = true;
}

bool Topology::has_edge(std::size_t from, std::size_t to) const { return from == to || in_.at(to).at(from); }

std::size_t Topology::degree(std::size_t agent) const {
    return 1 + static_cast<std::size_t>(std::count(in_.at(agent).begin(), in_.at(agent).end(), true));
}

std::vector<std::size_t> Topology::neighbors(std::size_t agent) const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < num_agents_; ++l) {
        if (has_edge(l, agent)) out.push_back(l);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Topology::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t from = 0; from < num_agents_; ++from) {
        for (std::size_t to = 0; to < num_agents_; ++to) {
            if (in_[to][from]) out.emplace_back(from, to);
        }
    }
    return out;
}

bool Topology::is_symmetric() const {
    for (std::size_t a = 0; a < num_agents_; ++a) {
        for (std::size_t b = a + 1; b < num_agents_; ++b) {
            if (in_[a][b] != in_[b][a]) return false;
        }
    }
    return true;
}

bool Topology::is_strongly_connected() const {
    // Reachability from agent 0 along edges and along reversed edges.
    const auto forward = [this](std::size_t u, std::size_t w) { return in_[w][u]; };
    const auto backward = [this](std::size_t u, std::size_t w) { return in_[u][w]; };
    return reaches_all(num_agents_, 0, forward) && reaches_all(num_agents_, 0, backward);
}

CombinationMatrix CombinationMatrix::from_entries(const Eigen::MatrixXd& entries) {
    if (entries.rows() == 0 || entries.rows() != entries.cols()) {
        throw std::invalid_argument("combination matrix must be square and non-empty");
    }
    if (!entries.allFinite() || (entries.array() < 0.0).any()) {
        throw std::invalid_argument("combination matrix entries must be finite and nonnegative");
    }
    for (Eigen::Index c = 0; c < entries.cols(); ++c) {
        const double sum = entries.col(c).sum();
        if (std::abs(sum - 1.0) > kColumnSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "column " << c << " sums to " << sum << ", expected 1 (left-stochastic)";
            throw std::invalid_argument(msg.str());
        }
    }
    CombinationMatrix m;
    m.entries_ = entries;
    m.perron_ = perron_vector(entries);
    m.mixing_lambda_ = mixing_bound(entries);
    const auto n = static_cast<std::size_t>(entries.rows());
    m.neighbors_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            if (entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) > 0.0) m.neighbors_[k].push_back(l);
        }
    }
    return m;
}

CombinationMatrix CombinationMatrix::from_entries(const Eigen::MatrixXd& entries, const Topology& topology) {
    if (static_cast<std::size_t>(entries.rows()) != topology.num_agents()) {
        throw std::invalid_argument("combination matrix size does not match the number of agents");
    }
    for (std::size_t l = 0; l < topology.num_agents(); ++l) {
        for (std::size_t k = 0; k < topology.num_agents(); ++k) {
            const bool positive = entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) > 0.0;
            if (positive != topology.has_edge(l, k)) {
                std::ostringstream msg;
                msg << "weight a(" << l << "," << k << ") " << (positive ? "is positive but " : "is zero but ") << l
                    << (positive ? " is not" : " is") << " a neighbor of " << k;
                throw std::invalid_argument(msg.str());
            }
        }
    }
    return from_entries(entries);
}

CombinationMatrix build_metropolis(const Topology& topology) {
    if (!topology.is_symmetric()) throw std::invalid_argument("Metropolis rule needs an undirected (symmetric) topology");
    if (!topology.is_strongly_connected()) throw std::invalid_argument("Metropolis rule needs a connected topology");
    const std::size_t n = topology.num_agents();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double off = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            if (l == k || !topology.has_edge(l, k)) continue;
            const double w = 1.0 / static_cast<double>(std::max(topology.degree(l), topology.degree(k)));
            a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = w;
            off += w;
        }
        a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0 - off;
    }
    return CombinationMatrix::from_entries(a, topology);
}

Eigen::VectorXd perron_vector(const Eigen::MatrixXd& entries) {
    if (!check_primitive(entries)) throw std::invalid_argument("matrix is not primitive; Perron vector is not unique and positive");
    const Eigen::Index n = entries.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    constexpr int kMaxIterations = 1'000'000;
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd next = entries * v;
        next /= next.sum();
        const double delta = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (delta < 1e-12) return v;
    }
    throw std::runtime_error("Perron power iteration did not converge");
}

bool check_primitive(const Eigen::MatrixXd& entries) {
    if (entries.rows() != entries.cols() || entries.rows() == 0) return false;
    const auto n = static_cast<std::size_t>(entries.rows());
    const std::size_t wielandt = (n - 1) * (n - 1) + 1;
    BoolMatrix power = support_of(entries);
    // Repeated squaring reaches an exponent >= the Wielandt bound.
    for (std::size_t exponent = 1; exponent < wielandt; exponent *= 2) {
        power = bool_product(power, power);
    }
    return all_true(power);
}

double mixing_bound(const Eigen::MatrixXd& entries) {
    if (entries.rows() <= 1) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(entries, false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    return moduli[1];
}

}  // namespace social_learning
