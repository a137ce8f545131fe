#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rhodec/maastar.hpp"
#include "rhodec/model.hpp"

namespace rhodec::tracking {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Constant-velocity Gaussian over (x, y, vx, vy) in metres and m/s.
struct KalmanEstimate {
  Vec4 mean = Vec4::Zero();
  Mat4 covariance = Mat4::Identity();

  Vec2 position() const { return mean.head<2>(); }
  Vec2 velocity() const { return mean.tail<2>(); }
  Mat2 position_covariance() const { return covariance.topLeftCorner<2, 2>(); }
};

struct KalmanNoise {
  double accel_sigma = 0.3;         // white acceleration, m/s^2
  double measurement_sigma = 0.05;  // position measurement, m
};

KalmanEstimate kf_predict(const KalmanEstimate& est, double dt,
                          double accel_sigma);
KalmanEstimate kf_update(const KalmanEstimate& est, const Vec2& measurement,
                         double measurement_sigma);
/// Predict, then update when a measurement is present. Throws
/// NumericalFailure if the covariance cannot be kept positive definite.
KalmanEstimate kf_step(const KalmanEstimate& est,
                       const std::optional<Vec2>& measurement, double dt,
                       const KalmanNoise& noise);

/// ½ ln((2πe)^2 det Σ), in nats.
double differential_entropy(const Mat2& position_covariance);

/// 5x5 grid centred on the position mean; cell index = row * 5 + column,
/// rows along +y.
struct GridGeometry {
  static constexpr std::size_t kSide = 5;
  static constexpr std::size_t kCells = kSide * kSide;

  Vec2 center = Vec2::Zero();
  double cell_size = 1.0;

  Vec2 cell_center(std::size_t cell) const;
};

struct GridBelief {
  std::vector<double> mass;
  GridGeometry geometry;
};

/// Probability mass of the position marginal in each cell. The grid spans
/// ±3 of the larger marginal standard deviation, but cells are never smaller
/// than `min_cell_size`.
GridBelief discretize_belief(const KalmanEstimate& est,
                             double min_cell_size = 0.0);

struct ObserverSpec {
  Vec2 position = Vec2::Zero();
  double max_range = 2.5;       // m
  double sector_width_deg = 15.0;
  std::size_t sector_count = 5;  // odd; the middle sector aims at the target
};

struct Sector {
  Vec2 apex = Vec2::Zero();
  double heading = 0.0;     // rad
  double half_width = 0.0;  // rad
  double range = 0.0;

  bool contains(const Vec2& p) const;
  double area() const { return half_width * range * range; }
};

/// Sector `action` (0-based) of the fan whose middle sector points at `aim`.
Sector make_sector(const ObserverSpec& observer, std::size_t action,
                   const Vec2& aim);

inline constexpr std::size_t kOverlapSamples = 100'000;
inline constexpr std::uint64_t kOverlapSeed = 0x5EC7'0B5E;

/// Area of the intersection over the area of the smaller sector, estimated
/// by Monte Carlo inside the smaller sector. Symmetric in its arguments.
double sector_overlap_fraction(const Sector& a, const Sector& b,
                               std::size_t samples = kOverlapSamples,
                               std::uint64_t seed = kOverlapSeed);
double sector_overlap_fraction(const ObserverSpec& obs_a, std::size_t action_a,
                               const ObserverSpec& obs_b, std::size_t action_b,
                               const Vec2& aim);

struct TrackingModelParams {
  double base_false_negative = 0.15;
  double base_false_positive = 0.05;
  double max_corrupt = 0.5;
  double expected_speed = 0.3;  // m/s, isotropic motion spread
  double dt = 1.0;
};

/// One replanning instant: 25 grid states, one action per sector, and
/// {no-detect, detect} observations per observer.
struct TrackingStepModel {
  RhoDecPomdp model;
  GridGeometry geometry;
  std::array<std::vector<Sector>, 2> sectors;
  std::vector<double> overlap;  // [a1 * count + a2]
};

TrackingStepModel build_tracking_model(
    const KalmanEstimate& est, const std::array<ObserverSpec, 2>& observers,
    const Vec2& velocity_estimate, const TrackingModelParams& params = {});

enum class Controller { kRhoDec, kScanning, kRandom };
std::string_view to_string(Controller c);
Controller controller_from_string(std::string_view name);

struct TrackingScenario {
  Vec2 arena_min = Vec2(0.0, 0.0);
  Vec2 arena_max = Vec2(4.0, 4.0);
  std::array<ObserverSpec, 2> observers = {
      ObserverSpec{Vec2(0.0, 2.0), 2.5, 15.0, 5},
      ObserverSpec{Vec2(4.0, 2.0), 3.0, 15.0, 5},
  };
  double target_max_speed = 0.3;
  std::size_t steps = 150;
  std::uint64_t seed = 0;
  KalmanNoise noise;
  TrackingModelParams model;
  double initial_position_sigma = 0.5;
  double initial_velocity_sigma = 0.1;
  std::size_t horizon = 3;
  std::size_t comm_period = 3;
  SolveOptions solver;
};

struct TrackingStepRecord {
  std::size_t step = 0;
  double entropy = 0.0;  // nats, controller's position estimate
  bool interfered = false;
  Vec2 error = Vec2::Zero();           // controller estimate - truth
  Vec2 baseline_error = Vec2::Zero();  // all-data estimate - truth
  std::array<std::size_t, 2> actions{};
};

struct TrackingMetrics {
  std::vector<TrackingStepRecord> steps;
  double mean_entropy = 0.0;
  std::size_t interference_steps = 0;
  /// Sum over steps of |controller mean - all-data mean|^2.
  double squared_error_vs_baseline = 0.0;
};

TrackingMetrics simulate_tracking(const TrackingScenario& scenario,
                                  Controller controller);

}  // namespace rhodec::tracking
