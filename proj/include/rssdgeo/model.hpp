#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace rssdgeo {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Variant { Rssd, Rss };

/// Transmit-side unknowns: reference power P0 (dB) and horizontal position.
struct SourceParams {
  double p0 = 0.0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// One localization problem instance.
///
/// Per-sensor vectors all have length N. Distances are in meters, noise_std
/// is the per-sample standard deviation in dB, beta_max is in radians.
struct Scenario {
  Eigen::Vector3d source = Eigen::Vector3d::Zero();
  double gamma = 2.0;
  Eigen::VectorXd horiz_dist;
  Eigen::VectorXd vert_dist;
  Eigen::VectorXd noise_std;
  int samples_per_position = 10;
  double beta_max = kTwoPi;
  Variant variant = Variant::Rssd;

  std::size_t size() const noexcept { return static_cast<std::size_t>(horiz_dist.size()); }

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;

  /// sigma_i^2 / m, the variance of one averaged measurement.
  Eigen::VectorXd effective_variance() const;

  Eigen::Vector2d source_xy() const { return source.head<2>(); }
};

/// N horizontal angles and the matching N x 2 direction matrix G whose i-th
/// row is [cos beta_i, sin beta_i].
class Placement {
 public:
  Placement() = default;

  /// Angles outside [0, 2pi] are wrapped into [0, 2pi).
  static Placement from_angles(const Eigen::VectorXd& angles);
  /// Rows must be unit vectors within 1e-9.
  static Placement from_directions(const Eigen::MatrixX2d& directions);

  const Eigen::VectorXd& angles() const noexcept { return angles_; }
  const Eigen::MatrixX2d& directions() const noexcept { return directions_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(angles_.size()); }

 private:
  Eigen::VectorXd angles_;
  Eigen::MatrixX2d directions_;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double beta);

Eigen::Vector2d angle_to_direction(double beta);
double direction_to_angle(const Eigen::Vector2d& g);

double slant_distance(double r, double h);

/// Sensor i (zero-based) at horizontal angle beta around `center`.
///
/// beta = 0 points along +y and beta = pi/2 along +x, i.e.
/// tan(beta) = (x_i - x) / (y_i - y).
Eigen::Vector3d sensor_position(const Scenario& scenario, std::size_t i, double beta,
                                const Eigen::Vector2d& center);
Eigen::Vector3d sensor_position(const Scenario& scenario, std::size_t i, double beta);

/// All N sensor positions (rows) for a placement around `center`.
Eigen::MatrixX3d sensor_positions(const Scenario& scenario, const Placement& placement,
                                  const Eigen::Vector2d& center);

/// Noiseless received power P0 - 10 gamma log10(d).
double mean_rss(double p0, double gamma, double d);

/// Averaged noisy RSS per sensor with the sensors placed around the true
/// source. Sample j of sensor i uses substream (seed, i) at position j.
Eigen::VectorXd simulate_measurements(const Scenario& scenario, const Placement& placement,
                                      const SourceParams& truth, std::uint64_t seed);

/// Same, for sensors at explicit positions (rows x, y, z).
Eigen::VectorXd simulate_measurements(const Scenario& scenario, const Eigen::MatrixX3d& positions,
                                      const SourceParams& truth, std::uint64_t seed);

}  // namespace rssdgeo
