#include "rhodec/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rhodec/errors.hpp"
#include "rhodec/policy.hpp"

namespace rhodec::tracking {

namespace {

Mat4 symmetrized(const Mat4& m) { return 0.5 * (m + m.transpose()); }

// Restores symmetry and, if needed, adds growing diagonal jitter until the
// Cholesky factorization succeeds.
Mat4 repaired(const Mat4& covariance) {
  if (!covariance.allFinite()) {
    throw NumericalFailure("covariance has non-finite entries");
  }
  Mat4 p = symmetrized(covariance);
  if (p.llt().info() == Eigen::Success) return p;
  double jitter = 1e-12 * std::max(1.0, p.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 8; ++attempt, jitter *= 100.0) {
    Mat4 q = p + jitter * Mat4::Identity();
    if (q.llt().info() == Eigen::Success) return q;
  }
  throw NumericalFailure("covariance is not positive definite");
}

}  // namespace

KalmanEstimate kf_predict(const KalmanEstimate& est, double dt,
                          double accel_sigma) {
  Mat4 F = Mat4::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;
  const double q = accel_sigma * accel_sigma;
  const double dt2 = dt * dt;
  Mat4 Q = Mat4::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    Q(axis, axis) = q * dt2 * dt2 / 4.0;
    Q(axis, axis + 2) = Q(axis + 2, axis) = q * dt2 * dt / 2.0;
    Q(axis + 2, axis + 2) = q * dt2;
  }
  KalmanEstimate out;
  out.mean = F * est.mean;
  out.covariance = repaired(F * est.covariance * F.transpose() + Q);
  return out;
}

KalmanEstimate kf_update(const KalmanEstimate& est, const Vec2& measurement,
                         double measurement_sigma) {
  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = 1.0;
  H(1, 1) = 1.0;
  const Mat2 R = measurement_sigma * measurement_sigma * Mat2::Identity();
  const Mat2 S = H * est.covariance * H.transpose() + R;
  // K = P H' S^-1, solved rather than inverted.
  const Eigen::Matrix<double, 4, 2> K =
      S.ldlt().solve(H * est.covariance.transpose()).transpose();
  const Mat4 I_KH = Mat4::Identity() - K * H;
  KalmanEstimate out;
  out.mean = est.mean + K * (measurement - H * est.mean);
  // Joseph form keeps the covariance symmetric positive semidefinite.
  out.covariance = repaired(I_KH * est.covariance * I_KH.transpose() +
                            K * R * K.transpose());
  return out;
}

KalmanEstimate kf_step(const KalmanEstimate& est,
                       const std::optional<Vec2>& measurement, double dt,
                       const KalmanNoise& noise) {
  KalmanEstimate out = kf_predict(est, dt, noise.accel_sigma);
  if (measurement) out = kf_update(out, *measurement, noise.measurement_sigma);
  if (!out.mean.allFinite()) {
    throw NumericalFailure("state estimate has non-finite entries");
  }
  return out;
}

double differential_entropy(const Mat2& position_covariance) {
  const double det = position_covariance.determinant();
  if (!(det > 0.0)) {
    throw NumericalFailure("covariance determinant is not positive");
  }
  const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
  return 0.5 * std::log(two_pi_e * two_pi_e * det);
}

Vec2 GridGeometry::cell_center(std::size_t cell) const {
  const double half = static_cast<double>(kSide / 2);
  const double col = static_cast<double>(cell % kSide) - half;
  const double row = static_cast<double>(cell / kSide) - half;
  return center + cell_size * Vec2(col, row);
}

namespace {

// Probability that N(mean, cov) falls in [x0, x1] x [y0, y1]. The inner axis
// is integrated in closed form from the conditional Gaussian, the outer one
// adaptively.
double rectangle_mass(const Vec2& mean, const Mat2& cov, double x0, double x1,
                      double y0, double y1) {
  const double sx = std::sqrt(cov(0, 0));
  const double slope = cov(0, 1) / cov(0, 0);
  const double cond_var = cov(1, 1) - slope * cov(0, 1);
  const double cond_sd = std::sqrt(std::max(0.0, cond_var));
  auto band = [&](double x) {
    const double my = mean.y() + slope * (x - mean.x());
    if (cond_sd <= 0.0) return (my >= y0 && my <= y1) ? 1.0 : 0.0;
    const double k = 1.0 / (cond_sd * std::numbers::sqrt2);
    return 0.5 * (std::erfc((y0 - my) * k) - std::erfc((y1 - my) * k));
  };
  auto integrand = [&](double x) {
    const double u = (x - mean.x()) / sx;
    return std::exp(-0.5 * u * u) * band(x);
  };
  const double scale = 1.0 / (sx * std::sqrt(2.0 * std::numbers::pi));
  return scale * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                     integrand, x0, x1, 12, 1e-11);
}

}  // namespace

GridBelief discretize_belief(const KalmanEstimate& est, double min_cell_size) {
  Mat2 cov = est.position_covariance();
  if (!cov.allFinite() || !(cov.determinant() > 0.0)) {
    throw NumericalFailure("position covariance is not positive definite");
  }
  Vec2 mean = est.position();
  const double sigma = std::sqrt(std::max(cov(0, 0), cov(1, 1)));
  GridBelief out;
  out.geometry.center = mean;
  out.geometry.cell_size =
      std::max({1e-9, min_cell_size,
                6.0 * sigma / static_cast<double>(GridGeometry::kSide)});
  const double half = 0.5 * out.geometry.cell_size;

  // Integrate along the wider axis so the conditional band stays smooth.
  const bool swap = cov(1, 1) > cov(0, 0);
  if (swap) {
    cov = Mat2(cov.reverse());
    mean = mean.reverse().eval();
  }
  out.mass.resize(GridGeometry::kCells);
  double sum = 0.0;
  for (std::size_t c = 0; c < GridGeometry::kCells; ++c) {
    Vec2 mid = out.geometry.cell_center(c);
    if (swap) mid = mid.reverse().eval();
    out.mass[c] = rectangle_mass(mean, cov, mid.x() - half, mid.x() + half,
                                 mid.y() - half, mid.y() + half);
    sum += out.mass[c];
  }
  for (double& m : out.mass) m /= sum;
  return out;
}

bool Sector::contains(const Vec2& p) const {
  const Vec2 d = p - apex;
  const double dist2 = d.squaredNorm();
  if (dist2 > range * range) return false;
  if (dist2 == 0.0) return true;
  const Vec2 dir(std::cos(heading), std::sin(heading));
  return d.dot(dir) >= std::sqrt(dist2) * std::cos(half_width);
}

Sector make_sector(const ObserverSpec& observer, std::size_t action,
                   const Vec2& aim) {
  if (action >= observer.sector_count) {
    throw InvalidArgument("sector index out of range");
  }
  const double width = observer.sector_width_deg * std::numbers::pi / 180.0;
  const Vec2 to_aim = aim - observer.position;
  const double bearing = to_aim.squaredNorm() > 0.0
                             ? std::atan2(to_aim.y(), to_aim.x())
                             : 0.0;
  const double middle = static_cast<double>(observer.sector_count - 1) / 2.0;
  Sector s;
  s.apex = observer.position;
  s.heading = bearing + (middle - static_cast<double>(action)) * width;
  s.half_width = width / 2.0;
  s.range = observer.max_range;
  return s;
}

namespace {

// Unit-sector samples (radius fraction, angle fraction in [-1, 1]).
struct UnitSamples {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> radius;
  std::vector<double> angle;
};

const UnitSamples& unit_samples(std::size_t count, std::uint64_t seed) {
  thread_local UnitSamples cache;
  if (cache.count != count || cache.seed != seed || cache.radius.empty()) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    cache.count = count;
    cache.seed = seed;
    cache.radius.resize(count);
    cache.angle.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      cache.radius[i] = std::sqrt(u(rng));
      cache.angle[i] = 2.0 * u(rng) - 1.0;
    }
  }
  return cache;
}

bool sampled_first(const Sector& a, const Sector& b) {
  if (a.area() != b.area()) return a.area() < b.area();
  return std::make_tuple(a.apex.x(), a.apex.y(), a.heading, a.range) <=
         std::make_tuple(b.apex.x(), b.apex.y(), b.heading, b.range);
}

}  // namespace

double sector_overlap_fraction(const Sector& a, const Sector& b,
                               std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("need at least one sample");
  const Sector& inner = sampled_first(a, b) ? a : b;
  const Sector& outer = sampled_first(a, b) ? b : a;
  if ((inner.apex - outer.apex).norm() > inner.range + outer.range) return 0.0;

  const UnitSamples& unit = unit_samples(samples, seed);
  const Vec2 outer_dir(std::cos(outer.heading), std::sin(outer.heading));
  const double outer_cos = std::cos(outer.half_width);
  const double outer_r2 = outer.range * outer.range;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double theta = inner.heading + unit.angle[i] * inner.half_width;
    const double r = inner.range * unit.radius[i];
    const Vec2 d = inner.apex + r * Vec2(std::cos(theta), std::sin(theta)) -
                   outer.apex;
    const double dist2 = d.squaredNorm();
    if (dist2 > outer_r2) continue;
    if (dist2 == 0.0 || d.dot(outer_dir) >= std::sqrt(dist2) * outer_cos) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double sector_overlap_fraction(const ObserverSpec& obs_a, std::size_t action_a,
                               const ObserverSpec& obs_b, std::size_t action_b,
                               const Vec2& aim) {
  return sector_overlap_fraction(make_sector(obs_a, action_a, aim),
                                 make_sector(obs_b, action_b, aim));
}

TrackingStepModel build_tracking_model(
    const KalmanEstimate& est, const std::array<ObserverSpec, 2>& observers,
    const Vec2& velocity_estimate, const TrackingModelParams& params) {
  GridBelief grid = discretize_belief(est);
  const GridGeometry& geo = grid.geometry;
  constexpr std::size_t kCells = GridGeometry::kCells;

  std::array<std::vector<Sector>, 2> sectors;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < observers[i].sector_count; ++k) {
      sectors[i].push_back(make_sector(observers[i], k, est.position()));
    }
  }
  const std::size_t K1 = sectors[0].size();
  const std::size_t K2 = sectors[1].size();
  std::vector<double> overlap(K1 * K2);
  for (std::size_t k1 = 0; k1 < K1; ++k1) {
    for (std::size_t k2 = 0; k2 < K2; ++k2) {
      overlap[k1 * K2 + k2] =
          sector_overlap_fraction(sectors[0][k1], sectors[1][k2]);
    }
  }

  ModelDefinition def;
  for (std::size_t c = 0; c < kCells; ++c) {
    def.states.push_back("c" + std::to_string(c));
  }
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < sectors[i].size(); ++k) {
      labels.push_back("a" + std::to_string(k + 1));
    }
    def.actions.push_back(std::move(labels));
    def.observations.push_back({"miss", "detect"});
  }
  def.alpha = 1.0;
  def.uncertainty = Uncertainty::kShannonEntropy;
  def.allocate();
  def.initial_belief = grid.mass;

  // Gaussian displacement between cell centres, normalized over the grid.
  const Vec2 shift = velocity_estimate * params.dt;
  const double spread =
      std::max(1e-9, params.expected_speed * params.dt);
  std::vector<double> motion(kCells * kCells);
  for (std::size_t from = 0; from < kCells; ++from) {
    double* row = motion.data() + from * kCells;
    double max_exponent = -std::numeric_limits<double>::infinity();
    for (std::size_t to = 0; to < kCells; ++to) {
      const Vec2 d = geo.cell_center(to) - geo.cell_center(from) - shift;
      row[to] = -0.5 * d.squaredNorm() / (spread * spread);
      max_exponent = std::max(max_exponent, row[to]);
    }
    double sum = 0.0;
    for (std::size_t to = 0; to < kCells; ++to) {
      row[to] = std::exp(row[to] - max_exponent);
      sum += row[to];
    }
    for (std::size_t to = 0; to < kCells; ++to) row[to] /= sum;
  }

  std::array<std::vector<bool>, 2> inside;
  for (std::size_t i = 0; i < 2; ++i) {
    for (const Sector& s : sectors[i]) {
      for (std::size_t c = 0; c < kCells; ++c) {
        inside[i].push_back(s.contains(geo.cell_center(c)));
      }
    }
  }

  for (std::size_t k1 = 0; k1 < K1; ++k1) {
    for (std::size_t k2 = 0; k2 < K2; ++k2) {
      const std::size_t a = k1 * K2 + k2;
      const double ov = overlap[a];
      const double fn = params.base_false_negative +
                        (params.max_corrupt - params.base_false_negative) * ov;
      const double fp = params.base_false_positive +
                        (params.max_corrupt - params.base_false_positive) * ov;
      for (std::size_t s = 0; s < kCells; ++s) {
        for (std::size_t next = 0; next < kCells; ++next) {
          def.T(a, s, next) = motion[s * kCells + next];
        }
        const double d1 = inside[0][k1 * kCells + s] ? 1.0 - fn : fp;
        const double d2 = inside[1][k2 * kCells + s] ? 1.0 - fn : fp;
        def.O(a, s, 0) = (1.0 - d1) * (1.0 - d2);
        def.O(a, s, 1) = (1.0 - d1) * d2;
        def.O(a, s, 2) = d1 * (1.0 - d2);
        def.O(a, s, 3) = d1 * d2;
      }
    }
  }

  return {RhoDecPomdp(std::move(def)), geo, std::move(sectors),
          std::move(overlap)};
}

std::string_view to_string(Controller c) {
  switch (c) {
    case Controller::kRhoDec:
      return "rho_dec";
    case Controller::kScanning:
      return "scanning";
    case Controller::kRandom:
      return "random";
  }
  return "random";
}

Controller controller_from_string(std::string_view name) {
  if (name == "rho_dec" || name == "optimal") return Controller::kRhoDec;
  if (name == "scanning") return Controller::kScanning;
  if (name == "random") return Controller::kRandom;
  throw InvalidArgument("unknown tracking controller '" + std::string(name) +
                        "'");
}

namespace {

class Target {
 public:
  Target(const TrackingScenario& sc, std::mt19937_64& rng)
      : min_(sc.arena_min), max_(sc.arena_max), top_speed_(sc.target_max_speed),
        rng_(rng) {
    position_ = random_point();
    pick_leg();
  }

  const Vec2& position() const { return position_; }

  void advance(double dt) {
    double budget = speed_ * dt;
    while (budget > 0.0) {
      const Vec2 d = waypoint_ - position_;
      const double dist = d.norm();
      if (dist > budget) {
        position_ += d * (budget / dist);
        break;
      }
      position_ = waypoint_;
      budget -= dist;
      pick_leg();
    }
  }

 private:
  Vec2 random_point() {
    std::uniform_real_distribution<double> ux(min_.x(), max_.x());
    std::uniform_real_distribution<double> uy(min_.y(), max_.y());
    const double x = ux(rng_);
    return Vec2(x, uy(rng_));
  }
  void pick_leg() {
    waypoint_ = random_point();
    speed_ = std::uniform_real_distribution<double>(0.3 * top_speed_,
                                                    top_speed_)(rng_);
  }

  Vec2 min_, max_;
  double top_speed_;
  std::mt19937_64& rng_;
  Vec2 position_;
  Vec2 waypoint_;
  double speed_ = 0.0;
};

Vec2 sample_in_intersection(const Sector& a, const Sector& b,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double theta = a.heading + (2.0 * u(rng) - 1.0) * a.half_width;
    const double r = a.range * std::sqrt(u(rng));
    const Vec2 p = a.apex + r * Vec2(std::cos(theta), std::sin(theta));
    if (b.contains(p)) return p;
  }
  return a.apex;
}

// Projects the mean onto the known constraints: target inside the arena and
// no faster than its top speed.
void project(KalmanEstimate& est, const TrackingScenario& sc) {
  for (int axis = 0; axis < 2; ++axis) {
    est.mean(axis) =
        std::clamp(est.mean(axis), sc.arena_min(axis), sc.arena_max(axis));
  }
  const double speed = est.velocity().norm();
  if (speed > sc.target_max_speed) {
    est.mean.tail<2>() *= sc.target_max_speed / speed;
  }
  // Covariance is shrunk by congruence so it never claims more spread than a
  // uniform position over the arena or a velocity beyond the top speed.
  const Vec2 extent = sc.arena_max - sc.arena_min;
  const double position_cap = extent.squaredNorm() / 24.0;
  const double velocity_cap = sc.target_max_speed * sc.target_max_speed;
  const double position_spread =
      Eigen::SelfAdjointEigenSolver<Mat2>(est.position_covariance())
          .eigenvalues()
          .maxCoeff();
  const double velocity_spread =
      Eigen::SelfAdjointEigenSolver<Mat2>(
          est.covariance.bottomRightCorner<2, 2>())
          .eigenvalues()
          .maxCoeff();
  Vec4 scale = Vec4::Ones();
  if (position_spread > position_cap) {
    scale.head<2>().setConstant(std::sqrt(position_cap / position_spread));
  }
  if (velocity_spread > velocity_cap) {
    scale.tail<2>().setConstant(std::sqrt(velocity_cap / velocity_spread));
  }
  est.covariance = scale.asDiagonal() * est.covariance * scale.asDiagonal();
}

}  // namespace

TrackingMetrics simulate_tracking(const TrackingScenario& scenario,
                                  Controller controller) {
  if (scenario.comm_period == 0 || scenario.comm_period > scenario.horizon) {
    throw InvalidArgument("communication period must satisfy 1 <= c <= h");
  }
  const auto& observers = scenario.observers;
  const double dt = scenario.model.dt;

  // Independent streams so that every controller faces the same target path
  // and the same sensor noise.
  std::mt19937_64 target_rng(scenario.seed);
  std::mt19937_64 sense_rng(scenario.seed ^ 0x9E3779B97F4A7C15ull);
  std::mt19937_64 ghost_rng(scenario.seed ^ 0xC2B2AE3D27D4EB4Full);
  std::mt19937_64 choice_rng(scenario.seed ^ 0x165667B19E3779F9ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Target target(scenario, target_rng);
  KalmanEstimate est;
  est.mean << target.position(), 0.0, 0.0;
  est.covariance = Vec4(std::pow(scenario.initial_position_sigma, 2),
                        std::pow(scenario.initial_position_sigma, 2),
                        std::pow(scenario.initial_velocity_sigma, 2),
                        std::pow(scenario.initial_velocity_sigma, 2))
                       .asDiagonal();
  KalmanEstimate baseline = est;

  TrackingMetrics metrics;
  JointPolicy plan;
  std::array<std::size_t, 2> sequence{};
  std::size_t cycle_step = 0;

  for (std::size_t step = 0; step < scenario.steps; ++step) {
    // Sectors are chosen against the predicted estimate for this step.
    target.advance(dt);
    est = kf_predict(est, dt, scenario.noise.accel_sigma);
    baseline = kf_predict(baseline, dt, scenario.noise.accel_sigma);

    std::array<std::size_t, 2> action{};
    std::array<Sector, 2> sector;
    switch (controller) {
      case Controller::kRhoDec: {
        if (step % scenario.comm_period == 0) {
          const auto m = build_tracking_model(est, observers, est.velocity(),
                                              scenario.model);
          plan = solve_maastar(m.model, scenario.horizon, scenario.solver)
                     .policy;
          sequence = {0, 0};
          cycle_step = 0;
        }
        for (std::size_t i = 0; i < 2; ++i) {
          action[i] = plan.agent(i).action(cycle_step, sequence[i]);
        }
        break;
      }
      case Controller::kScanning: {
        const std::size_t k = step % observers[0].sector_count;
        action = {k, observers[1].sector_count - 1 -
                         step % observers[1].sector_count};
        break;
      }
      case Controller::kRandom: {
        for (std::size_t i = 0; i < 2; ++i) {
          action[i] = std::uniform_int_distribution<std::size_t>(
              0, observers[i].sector_count - 1)(choice_rng);
        }
        break;
      }
    }
    // The fan is re-aimed at the current mean every step.
    for (std::size_t i = 0; i < 2; ++i) {
      sector[i] = make_sector(observers[i], action[i], est.position());
    }

    // Draw every random number each step regardless of use.
    std::array<Vec2, 2> clean;
    std::array<double, 2> detect_u{}, false_u{};
    for (std::size_t i = 0; i < 2; ++i) {
      const double ex = gauss(sense_rng);
      const double ey = gauss(sense_rng);
      clean[i] = target.position() +
                 scenario.noise.measurement_sigma * Vec2(ex, ey);
      detect_u[i] = unit(sense_rng);
      false_u[i] = unit(sense_rng);
    }
    const double interference_u = unit(sense_rng);

    const double overlap = sector_overlap_fraction(sector[0], sector[1]);
    const bool interfered = interference_u < overlap;

    std::array<bool, 2> flag{};
    for (std::size_t i = 0; i < 2; ++i) {
      const bool visible = sector[i].contains(target.position());
      const bool detected =
          visible && detect_u[i] < 1.0 - scenario.model.base_false_negative;
      if (detected) {
        const Vec2 z = interfered
                           ? sample_in_intersection(sector[i], sector[1 - i],
                                                    ghost_rng)
                           : clean[i];
        est = kf_update(est, z, scenario.noise.measurement_sigma);
      }
      flag[i] = detected ||
                (!visible && false_u[i] < scenario.model.base_false_positive);
    }
    for (std::size_t i = 0; i < 2; ++i) {
      baseline = kf_update(baseline, clean[i], scenario.noise.measurement_sigma);
    }
    project(est, scenario);
    project(baseline, scenario);

    if (controller == Controller::kRhoDec) {
      for (std::size_t i = 0; i < 2; ++i) {
        sequence[i] = sequence[i] * 2 + (flag[i] ? 1 : 0);
      }
      ++cycle_step;
    }

    TrackingStepRecord rec;
    rec.step = step;
    rec.entropy = differential_entropy(est.position_covariance());
    rec.interfered = interfered;
    rec.error = est.position() - target.position();
    rec.baseline_error = baseline.position() - target.position();
    rec.actions = action;
    metrics.mean_entropy += rec.entropy;
    metrics.interference_steps += interfered ? 1 : 0;
    metrics.squared_error_vs_baseline +=
        (est.position() - baseline.position()).squaredNorm();
    metrics.steps.push_back(rec);
  }
  if (!metrics.steps.empty()) {
    metrics.mean_entropy /= static_cast<double>(metrics.steps.size());
  }
  return metrics;
}

}  // namespace rhodec::tracking
