#include "rhodec/mav_domain.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rhodec/errors.hpp"

namespace rhodec::mav {

namespace {

constexpr double kMinSigma = 1e-6;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double distance_to(std::size_t observer, std::size_t location) {
  return std::abs(kObserverPosition[observer] - static_cast<double>(location));
}

}  // namespace

void MavDomainParams::validate() const {
  if (!is_probability(p_stay_neutral) || !is_probability(p_stay_hostile) ||
      !is_probability(prior_neutral)) {
    throw InvalidArgument("MAV probabilities must lie in [0, 1]");
  }
  for (const auto& row : sensor_table) {
    for (const auto& cell : row) {
      if (!(cell.half_efficiency_distance > 0.0) ||
          !(cell.nominal_sigma > 0.0)) {
        throw InvalidArgument("sensor d0 and sigma0 must be positive");
      }
    }
  }
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
}

double sensor_sigma(const MavDomainParams& params, Sensor mode, Status status,
                    bool interference, double distance) {
  if (!(distance >= 0.0)) throw InvalidArgument("distance must be >= 0");
  std::size_t row = static_cast<std::size_t>(mode);
  if (mode == Sensor::kRadar && interference) row = 2;
  const SensorParams& p =
      params.sensor_table[row][static_cast<std::size_t>(status)];
  return p.nominal_sigma * std::exp2(distance / p.half_efficiency_distance);
}

std::array<double, kLocations> detection_distribution(
    const MavDomainParams& params, std::size_t observer, Sensor mode,
    bool interference, std::size_t target_location, Status status) {
  if (observer >= 2 || target_location >= kLocations) {
    throw InvalidArgument("observer or location out of range");
  }
  const double sigma =
      std::max(kMinSigma, sensor_sigma(params, mode, status, interference,
                                       distance_to(observer, target_location)));
  std::array<double, kLocations> w{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kLocations; ++k) {
    const double dx =
        static_cast<double>(k) - static_cast<double>(target_location);
    w[k] = std::exp(-dx * dx / (2.0 * sigma * sigma));
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

RhoDecPomdp build_mav_domain(const MavDomainParams& params) {
  params.validate();
  ModelDefinition def;
  for (std::size_t s = 0; s < kStates; ++s) {
    def.states.push_back("l" + std::to_string(location_of(s) + 1) +
                         (status_of(s) == Status::kNeutral ? "-neutral"
                                                           : "-hostile"));
  }
  def.actions.assign(2, {"camera", "radar"});
  def.observations.assign(2, {"l1", "l2", "l3", "l4"});
  def.alpha = params.alpha;
  def.uncertainty = Uncertainty::kShannonEntropy;
  def.allocate();

  const std::size_t A = def.num_joint_actions();
  for (std::size_t a = 0; a < A; ++a) {
    const Sensor mode[2] = {static_cast<Sensor>(a / 2),
                            static_cast<Sensor>(a % 2)};
    const bool interference =
        mode[0] == Sensor::kRadar && mode[1] == Sensor::kRadar;

    for (std::size_t s = 0; s < kStates; ++s) {
      const std::size_t loc = location_of(s);
      const Status status = status_of(s);

      // Location random walk; the status never changes. A missing neighbour
      // at either end of the line folds its share back into staying.
      const double stay = status == Status::kNeutral ? params.p_stay_neutral
                                                     : params.p_stay_hostile;
      const double move = (1.0 - stay) / 2.0;
      def.T(a, s, s) += stay;
      def.T(a, s, loc > 0 ? s - 1 : s) += move;
      def.T(a, s, loc + 1 < kLocations ? s + 1 : s) += move;

      double r = 0.0;
      for (std::size_t i = 0; i < 2; ++i) {
        if (mode[i] != Sensor::kRadar) continue;
        r += params.radar_cost;
        if (status == Status::kHostile) {
          const double d = distance_to(i, loc);
          if (d == 0.0) r += params.hostile_radar_penalty_d0;
          if (d == 1.0) r += params.hostile_radar_penalty_d1;
        }
      }
      def.R(s, a) = r;

      const auto first = detection_distribution(params, 0, mode[0],
                                                interference, loc, status);
      const auto second = detection_distribution(params, 1, mode[1],
                                                 interference, loc, status);
      for (std::size_t z1 = 0; z1 < kLocations; ++z1) {
        for (std::size_t z2 = 0; z2 < kLocations; ++z2) {
          def.O(a, s, z1 * kLocations + z2) = first[z1] * second[z2];
        }
      }
    }
  }

  for (std::size_t s = 0; s < kStates; ++s) {
    const double status_mass = status_of(s) == Status::kNeutral
                                   ? params.prior_neutral
                                   : 1.0 - params.prior_neutral;
    def.initial_belief[s] = status_mass / static_cast<double>(kLocations);
  }
  return RhoDecPomdp(std::move(def));
}

std::string_view to_string(Baseline kind) {
  switch (kind) {
    case Baseline::kCamerasOnly:
      return "cameras_only";
    case Baseline::kFixedRoles1:
      return "fixed_roles_1";
    case Baseline::kFixedRoles2:
      return "fixed_roles_2";
    case Baseline::kTurnTaking1:
      return "turn_taking_1";
    case Baseline::kTurnTaking2:
      return "turn_taking_2";
    case Baseline::kRandom:
      return "random";
  }
  return "random";
}

Baseline baseline_from_string(std::string_view name) {
  for (Baseline kind :
       {Baseline::kCamerasOnly, Baseline::kFixedRoles1, Baseline::kFixedRoles2,
        Baseline::kTurnTaking1, Baseline::kTurnTaking2, Baseline::kRandom}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown baseline policy '" + std::string(name) + "'");
}

JointPolicy make_baseline_policy(Baseline kind, std::size_t horizon,
                                 std::uint64_t seed, std::size_t phase) {
  if (horizon == 0) throw InvalidArgument("horizon must be at least 1");
  constexpr std::size_t kCamera = 0;
  constexpr std::size_t kRadar = 1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> coin(0, 1);

  std::vector<LocalPolicyTree> trees(2, LocalPolicyTree(2, kLocations));
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t width = integer_power(kLocations, t);
    const bool even = (t + phase) % 2 == 0;
    for (std::size_t i = 0; i < 2; ++i) {
      std::size_t action = kCamera;
      switch (kind) {
        case Baseline::kCamerasOnly:
          action = kCamera;
          break;
        case Baseline::kFixedRoles1:
          action = i == 0 ? kCamera : kRadar;
          break;
        case Baseline::kFixedRoles2:
          action = i == 0 ? kRadar : kCamera;
          break;
        case Baseline::kTurnTaking1:
          action = (i == 0) == even ? kCamera : kRadar;
          break;
        case Baseline::kTurnTaking2:
          action = (i == 0) == even ? kRadar : kCamera;
          break;
        case Baseline::kRandom:
          break;
      }
      DecisionRule rule(width, action);
      if (kind == Baseline::kRandom) {
        for (auto& a : rule) a = coin(rng);
      }
      trees[i].append(std::move(rule));
    }
  }
  return JointPolicy(std::move(trees));
}

}  // namespace rhodec::mav
