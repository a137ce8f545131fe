// Independent reference implementations used as test oracles. They share
// only the model tables with the library, never its algorithms.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "rhodec/model.hpp"
#include "rhodec/policy.hpp"

namespace oracle {

using rhodec::RhoDecPomdp;

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n,
                                          double zero_chance = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = u(rng) < zero_chance ? 0.0 : e(rng);
    sum += x;
  }
  if (sum == 0.0) {
    v[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

struct RandomModelSpec {
  std::size_t agents = 2;
  std::size_t states = 3;
  std::size_t actions = 2;       // per agent
  std::size_t observations = 2;  // per agent
  double alpha = 1.0;
  double zero_chance = 0.2;
};

inline RhoDecPomdp random_model(std::mt19937_64& rng,
                                const RandomModelSpec& spec) {
  rhodec::ModelDefinition def;
  for (std::size_t s = 0; s < spec.states; ++s) {
    def.states.push_back("s" + std::to_string(s));
  }
  for (std::size_t i = 0; i < spec.agents; ++i) {
    std::vector<std::string> a, z;
    for (std::size_t k = 0; k < spec.actions; ++k) {
      a.push_back("ag" + std::to_string(i) + "a" + std::to_string(k));
    }
    for (std::size_t k = 0; k < spec.observations; ++k) {
      z.push_back("ag" + std::to_string(i) + "z" + std::to_string(k));
    }
    def.actions.push_back(a);
    def.observations.push_back(z);
  }
  def.alpha = spec.alpha;
  def.uncertainty = spec.alpha > 0.0 ? rhodec::Uncertainty::kShannonEntropy
                                     : rhodec::Uncertainty::kNone;
  def.allocate();
  const std::size_t S = spec.states;
  const std::size_t A = def.num_joint_actions();
  const std::size_t Z = def.num_joint_observations();
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t s = 0; s < S; ++s) {
      auto t = random_simplex(rng, S, spec.zero_chance);
      auto o = random_simplex(rng, Z, spec.zero_chance);
      for (std::size_t n = 0; n < S; ++n) def.T(a, s, n) = t[n];
      for (std::size_t z = 0; z < Z; ++z) def.O(a, s, z) = o[z];
      def.R(s, a) = reward(rng);
    }
  }
  def.initial_belief = random_simplex(rng, S, spec.zero_chance);
  return RhoDecPomdp(std::move(def));
}

inline double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

inline double rho(const RhoDecPomdp& m, const std::vector<double>& b,
                  std::size_t a) {
  double r = 0.0;
  for (std::size_t s = 0; s < b.size(); ++s) r += m.reward(s, a) * b[s];
  if (m.uncertainty() == rhodec::Uncertainty::kShannonEntropy) {
    r -= m.alpha() * entropy_bits(b);
  }
  return r;
}

// Unnormalized posterior; returns eta.
inline double filter(const RhoDecPomdp& m, const std::vector<double>& b,
                     std::size_t a, std::size_t z, std::vector<double>& out) {
  const std::size_t S = b.size();
  out.assign(S, 0.0);
  double eta = 0.0;
  for (std::size_t n = 0; n < S; ++n) {
    double pred = 0.0;
    for (std::size_t s = 0; s < S; ++s) pred += b[s] * m.transition(a, s, n);
    out[n] = pred * m.observation(a, n, z);
    eta += out[n];
  }
  if (eta > 0.0) {
    for (double& x : out) x /= eta;
  }
  return eta;
}

// Local policy stored flat: level t occupies [offset(t), offset(t) + Z^t).
struct FlatPolicy {
  std::size_t observations = 0;
  std::vector<std::size_t> actions;

  std::size_t offset(std::size_t t) const {
    std::size_t off = 0, width = 1;
    for (std::size_t k = 0; k < t; ++k) {
      off += width;
      width *= observations;
    }
    return off;
  }
  std::size_t at(std::size_t t, std::size_t seq) const {
    return actions[offset(t) + seq];
  }
};

inline std::size_t flat_size(std::size_t Z, std::size_t h) {
  std::size_t n = 0, w = 1;
  for (std::size_t t = 0; t < h; ++t) {
    n += w;
    w *= Z;
  }
  return n;
}

inline FlatPolicy flatten(const rhodec::LocalPolicyTree& tree, std::size_t h) {
  FlatPolicy p{tree.num_observations(), {}};
  for (std::size_t t = 0; t < h; ++t) {
    const auto& rule = tree.level(t);
    p.actions.insert(p.actions.end(), rule.begin(), rule.end());
  }
  return p;
}

// Expected rho-sum of a joint policy by explicit history recursion.
inline double evaluate(const RhoDecPomdp& m, const std::vector<FlatPolicy>& pol,
                       const std::vector<double>& b, std::size_t t,
                       std::size_t h, std::vector<std::size_t> seq) {
  if (t == h) return 0.0;
  const std::size_t n = pol.size();
  std::size_t a = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a = a * m.action_space().size_of(i) + pol[i].at(t, seq[i]);
  }
  double v = rho(m, b, a);
  if (t + 1 == h) return v;
  const std::size_t Z = m.num_joint_observations();
  std::vector<double> post;
  for (std::size_t z = 0; z < Z; ++z) {
    const double eta = filter(m, b, a, z, post);
    if (eta <= 0.0) continue;
    std::vector<std::size_t> next(n);
    std::size_t rest = z;
    for (std::size_t i = n; i-- > 0;) {
      const std::size_t zi = m.observation_space().size_of(i);
      next[i] = seq[i] * zi + rest % zi;
      rest /= zi;
    }
    v += eta * evaluate(m, pol, post, t + 1, h, next);
  }
  return v;
}

inline double evaluate(const RhoDecPomdp& m, const rhodec::JointPolicy& policy,
                       std::size_t h) {
  std::vector<FlatPolicy> pol;
  for (std::size_t i = 0; i < policy.num_agents(); ++i) {
    pol.push_back(flatten(policy.agent(i), h));
  }
  std::vector<double> b0(m.initial_belief_probs().begin(),
                         m.initial_belief_probs().end());
  return evaluate(m, pol, b0, 0, h, std::vector<std::size_t>(pol.size(), 0));
}

// Best value over every deterministic joint policy (two agents).
inline double brute_force_optimum(const RhoDecPomdp& m, std::size_t h) {
  const std::size_t A1 = m.action_space().size_of(0);
  const std::size_t A2 = m.action_space().size_of(1);
  const std::size_t Z1 = m.observation_space().size_of(0);
  const std::size_t Z2 = m.observation_space().size_of(1);
  auto all = [](std::size_t A, std::size_t Z, std::size_t h) {
    std::vector<FlatPolicy> out;
    const std::size_t len = flat_size(Z, h);
    std::vector<std::size_t> digits(len, 0);
    for (;;) {
      out.push_back({Z, digits});
      std::size_t k = len;
      while (k-- > 0) {
        if (++digits[k] < A) break;
        digits[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) break;
    }
    return out;
  };
  const auto p1 = all(A1, Z1, h);
  const auto p2 = all(A2, Z2, h);
  std::vector<double> b0(m.initial_belief_probs().begin(),
                         m.initial_belief_probs().end());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : p1) {
    for (const auto& y : p2) {
      best = std::max(best, evaluate(m, {x, y}, b0, 0, h, {0, 0}));
    }
  }
  return best;
}

// Fully communicating (centralized) optimum, plain recursion.
inline double expectimax(const RhoDecPomdp& m, const std::vector<double>& b,
                         std::size_t remaining) {
  if (remaining == 0) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> post;
  for (std::size_t a = 0; a < m.num_joint_actions(); ++a) {
    double v = rho(m, b, a);
    if (remaining > 1) {
      for (std::size_t z = 0; z < m.num_joint_observations(); ++z) {
        const double eta = filter(m, b, a, z, post);
        if (eta > 0.0) v += eta * expectimax(m, post, remaining - 1);
      }
    }
    best = std::max(best, v);
  }
  return best;
}

// Textbook Kalman filter with explicit inverses and the short covariance
// update.
struct TextbookKf {
  Eigen::Vector4d x;
  Eigen::Matrix4d P;

  void predict(double dt, double sigma_acc) {
    Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
    F(0, 2) = F(1, 3) = dt;
    Eigen::Matrix<double, 4, 2> G;
    G << dt * dt / 2, 0, 0, dt * dt / 2, dt, 0, 0, dt;
    x = F * x;
    P = F * P * F.transpose() + sigma_acc * sigma_acc * G * G.transpose();
  }
  void update(const Eigen::Vector2d& z, double sigma) {
    Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
    H(0, 0) = H(1, 1) = 1.0;
    const Eigen::Matrix2d S =
        H * P * H.transpose() + sigma * sigma * Eigen::Matrix2d::Identity();
    const Eigen::Matrix<double, 4, 2> K = P * H.transpose() * S.inverse();
    x = x + K * (z - H * x);
    P = (Eigen::Matrix4d::Identity() - K * H) * P;
  }
};

inline double gaussian_entropy_nats(const Eigen::Matrix2d& cov) {
  const double a = cov(0, 0), b = cov(0, 1), c = cov(1, 0), d = cov(1, 1);
  const double det = a * d - b * c;
  return 1.0 + std::log(2.0 * std::numbers::pi) + 0.5 * std::log(det);
}

// Mass of N(mean, cov) over each cell of a 5x5 grid by midpoint quadrature,
// renormalized over the grid.
inline std::vector<double> cell_masses_by_quadrature(
    const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
    const Eigen::Vector2d& center, double cell, int sub = 200) {
  const Eigen::Matrix2d inv = cov.inverse();
  std::vector<double> mass(25, 0.0);
  double total = 0.0;
  const double h = cell / sub;
  for (int row = 0; row < 5; ++row) {
    for (int col = 0; col < 5; ++col) {
      const double x0 = center.x() + (col - 2.5) * cell;
      const double y0 = center.y() + (row - 2.5) * cell;
      double acc = 0.0;
      for (int i = 0; i < sub; ++i) {
        for (int j = 0; j < sub; ++j) {
          const Eigen::Vector2d p(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h);
          const Eigen::Vector2d d = p - mean;
          acc += std::exp(-0.5 * d.dot(inv * d));
        }
      }
      mass[row * 5 + col] = acc;
      total += acc;
    }
  }
  for (double& m : mass) m /= total;
  return mass;
}

struct PlainSector {
  Eigen::Vector2d apex;
  double heading, half_width, range;

  bool inside(const Eigen::Vector2d& p) const {
    const Eigen::Vector2d d = p - apex;
    if (d.norm() > range) return false;
    double diff = std::atan2(d.y(), d.x()) - heading;
    diff = std::remainder(diff, 2.0 * std::numbers::pi);
    return std::abs(diff) <= half_width;
  }
};

// Overlap over the smaller sector by rejection sampling from its bounding
// box.
inline double overlap_fraction(const PlainSector& a, const PlainSector& b,
                               std::size_t samples, std::uint64_t seed) {
  const double area_a = a.half_width * a.range * a.range;
  const double area_b = b.half_width * b.range * b.range;
  const PlainSector& small = area_a <= area_b ? a : b;
  const PlainSector& other = area_a <= area_b ? b : a;
  Eigen::Vector2d lo = small.apex, hi = small.apex;
  for (int k = 0; k <= 4096; ++k) {
    const double t = small.heading - small.half_width +
                     2.0 * small.half_width * k / 4096.0;
    const Eigen::Vector2d p =
        small.apex + small.range * Eigen::Vector2d(std::cos(t), std::sin(t));
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo.array() -= 1e-3 * small.range;
  hi.array() += 1e-3 * small.range;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x());
  std::uniform_real_distribution<double> uy(lo.y(), hi.y());
  std::size_t in_small = 0, in_both = 0;
  while (in_small < samples) {
    const Eigen::Vector2d p(ux(rng), uy(rng));
    if (!small.inside(p)) continue;
    ++in_small;
    if (other.inside(p)) ++in_both;
  }
  return static_cast<double>(in_both) / static_cast<double>(samples);
}

}  // namespace oracle
