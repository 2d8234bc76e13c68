#ifndef DETSCHED_GEOMETRY_HPP
#define DETSCHED_GEOMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "detsched/rng.hpp"

namespace detsched {

struct Point {
  double x = 0;
  double y = 0;
};

double distance(const Point& a, const Point& b);

enum class PathLossKind { SingularPowerLaw, BoundedPowerLaw };

/// Path-loss gain: the singular power law (kappa*d)^(-beta) and the bounded
/// law (1+d)^(-beta) share one interface. Gain is strictly decreasing on
/// (0, inf); the singular law diverges at d = 0, the bounded law has gain 1.
struct PathLossModel {
  PathLossKind kind = PathLossKind::BoundedPowerLaw;
  double kappa = 1.0;  // singular law only
  double beta = 4.0;

  double gain(double d) const;

  static PathLossModel singular(double kappa, double beta);
  static PathLossModel bounded(double beta);
};

/// A fixed bi-pole network: n transmitter points, each with a dedicated
/// receiver, plus the propagation model. Immutable after construction.
class Network {
 public:
  Network(std::vector<Point> transmitters, std::vector<Point> receivers,
          PathLossModel pathloss, double noise_power, double window,
          double r_max, std::int64_t seed);

  int size() const { return static_cast<int>(tx_.size()); }
  const Point& transmitter(int i) const { return tx_.at(i); }
  const Point& receiver(int i) const { return rx_.at(i); }
  const std::vector<Point>& transmitters() const { return tx_; }
  const std::vector<Point>& receivers() const { return rx_; }
  const PathLossModel& pathloss() const { return pathloss_; }
  double noise_power() const { return noise_; }

  // Generation metadata, kept for serialization and feature sentinels.
  double window() const { return window_; }
  double r_max() const { return r_max_; }
  std::int64_t seed() const { return seed_; }

 private:
  std::vector<Point> tx_;
  std::vector<Point> rx_;
  PathLossModel pathloss_;
  double noise_;
  double window_;
  double r_max_;
  std::int64_t seed_;
};

/// Binomial point process of n transmitters in [0, window_side]^2, each
/// receiver uniform in the disc of radius r_max around its transmitter.
/// Deterministic given the seed.
Network generate_network(int n, double window_side, double r_max,
                         const PathLossModel& pathloss, double noise,
                         std::uint64_t seed);

double link_distance(const Network& net, int i);

/// Distance from interferer x_j to receiver y_i. j == i is rejected.
double cross_distance(const Network& net, int j, int i);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace detsched

#endif
