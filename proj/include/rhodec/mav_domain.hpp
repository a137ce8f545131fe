#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "rhodec/model.hpp"
#include "rhodec/policy.hpp"

namespace rhodec::mav {

// Two MAVs observe a target on a line of four locations. MAV 1 sits at
// position 0, MAV 2 at position 3.
inline constexpr std::size_t kLocations = 4;
inline constexpr std::size_t kStates = 2 * kLocations;
inline constexpr std::array<double, 2> kObserverPosition = {0.0, 3.0};

enum class Sensor : std::size_t { kCamera = 0, kRadar = 1 };
enum class Status : std::size_t { kNeutral = 0, kHostile = 1 };

struct SensorParams {
  double half_efficiency_distance;  // d0
  double nominal_sigma;             // sigma0
};

struct MavDomainParams {
  double p_stay_neutral = 0.85;
  double p_stay_hostile = 0.6;
  /// Rows: camera, radar, radar under interference. Columns: neutral, hostile.
  std::array<std::array<SensorParams, 2>, 3> sensor_table = {{
      {{{0.6, 0.3}, {0.7, 0.75}}},
      {{{1.0, 0.2}, {1.0, 0.45}}},
      {{{2.0, 1.0}, {1.5, 1.2}}},
  }};
  double radar_cost = -0.1;
  double hostile_radar_penalty_d0 = -1.0;
  double hostile_radar_penalty_d1 = -0.1;
  double alpha = 1.0;
  double prior_neutral = 0.5;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

inline std::size_t state_index(std::size_t location, Status status) {
  return static_cast<std::size_t>(status) * kLocations + location;
}
inline std::size_t location_of(std::size_t state) { return state % kLocations; }
inline Status status_of(std::size_t state) {
  return static_cast<Status>(state / kLocations);
}

/// sigma0 * 2^(d / d0) for the selected sensor row.
double sensor_sigma(const MavDomainParams& params, Sensor mode, Status status,
                    bool interference, double distance);

/// Normalized Gaussian weights over the four location positions, centred on
/// the target, with the width seen by `observer` (0 or 1).
std::array<double, kLocations> detection_distribution(
    const MavDomainParams& params, std::size_t observer, Sensor mode,
    bool interference, std::size_t target_location, Status status);

RhoDecPomdp build_mav_domain(const MavDomainParams& params = {});

enum class Baseline {
  kCamerasOnly,
  kFixedRoles1,   // MAV 1 camera, MAV 2 radar
  kFixedRoles2,   // roles reversed
  kTurnTaking1,   // starts (camera, radar), switching every step
  kTurnTaking2,   // starts (radar, camera)
  kRandom,
};

std::string_view to_string(Baseline kind);
/// Accepts the names printed by to_string; throws InvalidArgument otherwise.
Baseline baseline_from_string(std::string_view name);

/// Open-loop baseline trees for the MAV domain. `phase` is the absolute time
/// of the tree's first step, so turn-taking keeps alternating when a tree is
/// re-issued mid-episode.
JointPolicy make_baseline_policy(Baseline kind, std::size_t horizon,
                                 std::uint64_t seed = 0,
                                 std::size_t phase = 0);

}  // namespace rhodec::mav
