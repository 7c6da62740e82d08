#include "rssdgeo/model.hpp"

#include <cmath>
#include <string>

#include "rssdgeo/error.hpp"
#include "rssdgeo/rng.hpp"

namespace rssdgeo {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

void Scenario::validate() const {
  const auto n = horiz_dist.size();
  require(n >= 1, "scenario: at least one sensor required");
  require(vert_dist.size() == n && noise_std.size() == n,
          "scenario: per-sensor vectors must all have length N");
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string at = "sensor " + std::to_string(i);
    require(std::isfinite(horiz_dist(i)) && horiz_dist(i) > 0.0, at + ": r must be > 0");
    require(std::isfinite(vert_dist(i)) && vert_dist(i) >= 0.0, at + ": h must be >= 0");
    require(std::isfinite(noise_std(i)) && noise_std(i) > 0.0, at + ": sigma must be > 0");
  }
  require(std::isfinite(gamma) && gamma > 0.0, "scenario: gamma must be > 0");
  require(samples_per_position >= 1, "scenario: samples_per_position must be >= 1");
  require(beta_max > 0.0 && beta_max <= kTwoPi, "scenario: beta_max must lie in (0, 2pi]");
  require(source.allFinite() && source.z() == 0.0, "scenario: source must be finite with zero height");
}

Eigen::VectorXd Scenario::effective_variance() const {
  return noise_std.array().square() / static_cast<double>(samples_per_position);
}

Placement Placement::from_angles(const Eigen::VectorXd& angles) {
  Placement p;
  p.angles_ = angles.unaryExpr([](double b) { return b >= 0.0 && b <= kTwoPi ? b : wrap_angle(b); });
  p.directions_.resize(angles.size(), 2);
  for (Eigen::Index i = 0; i < angles.size(); ++i)
    p.directions_.row(i) = angle_to_direction(p.angles_(i)).transpose();
  return p;
}

Placement Placement::from_directions(const Eigen::MatrixX2d& directions) {
  Placement p;
  p.directions_ = directions;
  p.angles_.resize(directions.rows());
  for (Eigen::Index i = 0; i < directions.rows(); ++i)
    p.angles_(i) = direction_to_angle(directions.row(i).transpose());
  return p;
}

double wrap_angle(double beta) {
  double w = std::fmod(beta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative can round up to exactly 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Eigen::Vector2d angle_to_direction(double beta) {
  return {std::cos(beta), std::sin(beta)};
}

double direction_to_angle(const Eigen::Vector2d& g) {
  if (!g.allFinite() || std::abs(g.norm() - 1.0) > 1e-9)
    throw InvalidArgument("direction_to_angle: direction must have unit norm");
  return wrap_angle(std::atan2(g.y(), g.x()));
}

double slant_distance(double r, double h) {
  if (!(r > 0.0)) throw InvalidArgument("slant_distance: r must be > 0");
  if (!(h >= 0.0)) throw InvalidArgument("slant_distance: h must be >= 0");
  return std::hypot(r, h);
}

Eigen::Vector3d sensor_position(const Scenario& scenario, std::size_t i, double beta,
                                const Eigen::Vector2d& center) {
  if (i >= scenario.size()) throw InvalidArgument("sensor_position: index out of range");
  const double r = scenario.horiz_dist(static_cast<Eigen::Index>(i));
  const double h = scenario.vert_dist(static_cast<Eigen::Index>(i));
  return {center.x() + r * std::sin(beta), center.y() + r * std::cos(beta), h};
}

Eigen::Vector3d sensor_position(const Scenario& scenario, std::size_t i, double beta) {
  return sensor_position(scenario, i, beta, scenario.source_xy());
}

Eigen::MatrixX3d sensor_positions(const Scenario& scenario, const Placement& placement,
                                  const Eigen::Vector2d& center) {
  if (placement.size() != scenario.size())
    throw InvalidArgument("sensor_positions: placement size does not match scenario");
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(scenario.size()), 3);
  for (std::size_t i = 0; i < scenario.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        sensor_position(scenario, i, placement.angles()(static_cast<Eigen::Index>(i)), center)
            .transpose();
  return out;
}

double mean_rss(double p0, double gamma, double d) {
  if (!(d > 0.0)) throw InvalidArgument("mean_rss: distance must be > 0");
  return p0 - 10.0 * gamma * std::log10(d);
}

Eigen::VectorXd simulate_measurements(const Scenario& scenario, const Placement& placement,
                                      const SourceParams& truth, std::uint64_t seed) {
  return simulate_measurements(scenario, sensor_positions(scenario, placement, truth.position), truth, seed);
}

Eigen::VectorXd simulate_measurements(const Scenario& scenario, const Eigen::MatrixX3d& pos,
                                      const SourceParams& truth, std::uint64_t seed) {
  if (static_cast<std::size_t>(pos.rows()) != scenario.size())
    throw InvalidArgument("simulate_measurements: positions do not match scenario size");
  const Rng root(seed);
  const int m = scenario.samples_per_position;
  Eigen::VectorXd out(pos.rows());
  for (Eigen::Index i = 0; i < pos.rows(); ++i) {
    const Eigen::Vector3d delta(pos(i, 0) - truth.position.x(), pos(i, 1) - truth.position.y(),
                                pos(i, 2));
    const double f = mean_rss(truth.p0, scenario.gamma, delta.norm());
    Rng stream = root.split(static_cast<std::uint64_t>(i));
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += f + stream.normal(0.0, scenario.noise_std(i));
    out(i) = sum / m;
  }
  return out;
}

}  // namespace rssdgeo
