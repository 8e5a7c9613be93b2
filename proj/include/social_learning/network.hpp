#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace social_learning {

// Directed communication graph. An edge (from -> to) means agent `from`
// belongs to the neighborhood of agent `to`. Every agent is implicitly its
// own neighbor.
class Topology {
   public:
    explicit Topology(std::size_t num_agents);

    // neighbors[k] lists the agents k listens to; self entries are ignored.
    static Topology from_adjacency(const std::vector<std::vector<std::size_t>>& neighbors);
    static Topology undirected(std::size_t num_agents,
                               const std::vector<std::pair<std::size_t, std::size_t>>& links);

    // Throws std::invalid_argument on out-of-range ids or duplicate edges.
    void add_edge(std::size_t from, std::size_t to);

    std::size_t num_agents() const { return num_agents_; }
    bool has_edge(std::size_t from, std::size_t to) const;
    // Neighborhood size including the agent itself.
    std::size_t degree(std::size_t agent) const;
    std::vector<std::size_t> neighbors(std::size_t agent) const;
    // Directed edges excluding self loops, sorted by (from, to).
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    bool is_symmetric() const;
    bool is_strongly_connected() const;

   private:
    std::size_t num_agents_;
    std::vector<std::vector<bool>> in_;  // in_[to][from]
};

// Left-stochastic combination matrix with its Perron vector and the second
// largest eigenvalue modulus.
class CombinationMatrix {
   public:
    // Validates nonnegativity, unit column sums and primitivity.
    static CombinationMatrix from_entries(const Eigen::MatrixXd& entries);
    // Additionally requires the support to equal the topology (plus self loops).
    static CombinationMatrix from_entries(const Eigen::MatrixXd& entries, const Topology& topology);

    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double weight(std::size_t from, std::size_t to) const { return entries_(from, to); }
    const Eigen::VectorXd& perron() const { return perron_; }
    double mixing_lambda() const { return mixing_lambda_; }
    // Agents with a strictly positive weight in column `agent`.
    const std::vector<std::size_t>& neighbors(std::size_t agent) const { return neighbors_[agent]; }

   private:
    CombinationMatrix() = default;

    Eigen::MatrixXd entries_;
    Eigen::VectorXd perron_;
    double mixing_lambda_ = 0.0;
    std::vector<std::vector<std::size_t>> neighbors_;
};

inline constexpr double kColumnSumTolerance = 1e-12;

// Metropolis weights a_lk = 1 / max(d_l, d_k) for neighbors l != k, where
// degrees count the self loop; the diagonal takes the remainder. Requires a
// symmetric, strongly connected topology.
CombinationMatrix build_metropolis(const Topology& topology);

// Power iteration v <- A v with unit l1 normalization. Throws
// std::invalid_argument if the matrix is not primitive.
Eigen::VectorXd perron_vector(const Eigen::MatrixXd& entries);

// Exact test on the zero pattern: A is primitive iff A^M > 0 for M at least
// the Wielandt exponent (K-1)^2 + 1.
bool check_primitive(const Eigen::MatrixXd& entries);

// Second-largest eigenvalue modulus.
double mixing_bound(const Eigen::MatrixXd& entries);

}  // namespace social_learning
