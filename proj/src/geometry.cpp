#include "detsched/geometry.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace detsched {

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double PathLossModel::gain(double d) const {
  if (d < 0) throw std::invalid_argument("gain: negative distance");
  switch (kind) {
    case PathLossKind::SingularPowerLaw:
      return std::pow(kappa * d, -beta);
    case PathLossKind::BoundedPowerLaw:
      return std::pow(1.0 + d, -beta);
  }
  throw std::logic_error("gain: unknown path-loss kind");
}

PathLossModel PathLossModel::singular(double kappa, double beta) {
  if (kappa <= 0 || beta <= 0)
    throw std::invalid_argument("singular path loss needs kappa > 0, beta > 0");
  return {PathLossKind::SingularPowerLaw, kappa, beta};
}

PathLossModel PathLossModel::bounded(double beta) {
  if (beta <= 0) throw std::invalid_argument("bounded path loss needs beta > 0");
  return {PathLossKind::BoundedPowerLaw, 1.0, beta};
}

Network::Network(std::vector<Point> transmitters, std::vector<Point> receivers,
                 PathLossModel pathloss, double noise_power, double window,
                 double r_max, std::int64_t seed)
    : tx_(std::move(transmitters)),
      rx_(std::move(receivers)),
      pathloss_(pathloss),
      noise_(noise_power),
      window_(window),
      r_max_(r_max),
      seed_(seed) {
  if (tx_.empty()) throw std::invalid_argument("network needs n >= 1 pairs");
  if (tx_.size() != rx_.size())
    throw std::invalid_argument("transmitter/receiver count mismatch");
  if (noise_ < 0) throw std::invalid_argument("noise power must be >= 0");
  for (std::size_t i = 0; i < tx_.size(); ++i) {
    if (distance(tx_[i], rx_[i]) <= 0)
      throw std::invalid_argument("zero-length link at index " +
                                  std::to_string(i));
  }
}

Network generate_network(int n, double window_side, double r_max,
                         const PathLossModel& pathloss, double noise,
                         std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n_pairs must be >= 1");
  if (window_side <= 0) throw std::invalid_argument("window must be > 0");
  if (r_max <= 0) throw std::invalid_argument("r_max must be > 0");

  Rng rng = make_rng(seed);
  std::vector<Point> tx(n), rx(n);
  for (int i = 0; i < n; ++i) {
    tx[i] = {uniform(rng, 0, window_side), uniform(rng, 0, window_side)};
  }
  for (int i = 0; i < n; ++i) {
    // Uniform in the disc: radius r_max*sqrt(U), angle uniform.
    double r = r_max * std::sqrt(uniform01(rng));
    double ang = uniform(rng, 0, 2 * std::numbers::pi);
    rx[i] = {tx[i].x + r * std::cos(ang), tx[i].y + r * std::sin(ang)};
  }
  return Network(std::move(tx), std::move(rx), pathloss, noise, window_side,
                 r_max, static_cast<std::int64_t>(seed));
}

double link_distance(const Network& net, int i) {
  if (i < 0 || i >= net.size())
    throw std::invalid_argument("link_distance: index out of range");
  return distance(net.transmitter(i), net.receiver(i));
}

double cross_distance(const Network& net, int j, int i) {
  if (i < 0 || i >= net.size() || j < 0 || j >= net.size())
    throw std::invalid_argument("cross_distance: index out of range");
  if (j == i)
    throw std::invalid_argument("cross_distance: self-interference distance");
  return distance(net.transmitter(j), net.receiver(i));
}

namespace {

nlohmann::json points_to_json(const std::vector<Point>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point> points_from_json(const nlohmann::json& arr) {
  std::vector<Point> pts;
  for (const auto& p : arr) pts.push_back({p.at(0), p.at(1)});
  return pts;
}

}  // namespace

std::string network_to_json(const Network& net) {
  nlohmann::json j;
  j["transmitters"] = points_to_json(net.transmitters());
  j["receivers"] = points_to_json(net.receivers());
  nlohmann::json pl;
  if (net.pathloss().kind == PathLossKind::SingularPowerLaw) {
    pl["kind"] = "singular";
    pl["kappa"] = net.pathloss().kappa;
  } else {
    pl["kind"] = "bounded";
  }
  pl["beta"] = net.pathloss().beta;
  j["pathloss"] = pl;
  j["noise"] = net.noise_power();
  j["window"] = net.window();
  j["r_max"] = net.r_max();
  j["seed"] = net.seed();
  return j.dump(2) + "\n";
}

Network network_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto tx = points_from_json(j.at("transmitters"));
  auto rx = points_from_json(j.at("receivers"));
  const auto& pl = j.at("pathloss");
  PathLossModel model;
  std::string kind = pl.at("kind");
  if (kind == "singular") {
    model = PathLossModel::singular(pl.at("kappa"), pl.at("beta"));
  } else if (kind == "bounded") {
    model = PathLossModel::bounded(pl.at("beta"));
  } else {
    throw std::invalid_argument("unknown pathloss kind: " + kind);
  }
  double window = j.value("window", 0.0);
  Network net(std::move(tx), std::move(rx), model, j.at("noise"), window,
              j.value("r_max", 0.0), j.value("seed", std::int64_t{0}));
  if (window > 0) {
    for (const auto& p : net.transmitters()) {
      if (p.x < 0 || p.x > window || p.y < 0 || p.y > window) {
        std::cerr << "warning: loaded network has transmitters outside the "
                     "recorded window\n";
        break;
      }
    }
  }
  return net;
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << network_to_json(net);
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace detsched
