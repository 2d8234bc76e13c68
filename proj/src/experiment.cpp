#include "detsched/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detsched/csv.hpp"
#include "detsched/errors.hpp"
#include "detsched/oracle.hpp"

namespace detsched {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  if (n_pairs > 32)
    throw std::invalid_argument("n_pairs capped at 32 for optimization");
  if (realizations < 1)
    throw std::invalid_argument("realizations must be >= 1");
  if (window <= 0) throw std::invalid_argument("window must be > 0");
  if (r_max <= 0) throw std::invalid_argument("r_max must be > 0");
  if (tau <= 0) throw std::invalid_argument("tau must be > 0");
  if (beta <= 0) throw std::invalid_argument("beta must be > 0");
  if (sigma <= 0) throw std::invalid_argument("sigma must be > 0");
  if (R0 <= 0) throw std::invalid_argument("R0 must be > 0");
  if (noise < 0) throw std::invalid_argument("noise must be >= 0");
  if (fading_mean <= 0) throw std::invalid_argument("fading_mean must be > 0");
  if (pathloss_kind != "bounded" && pathloss_kind != "singular")
    throw std::invalid_argument("pathloss_kind must be bounded or singular");
  if (pathloss_kind == "singular" && kappa <= 0)
    throw std::invalid_argument("kappa must be > 0 for the singular law");
  if (schedulers.empty())
    throw std::invalid_argument("at least one scheduler required");
  for (const auto& s : schedulers) {
    if (s != "fixed" && s != "adaptive" && s != "determinantal")
      throw std::invalid_argument("unknown scheduler: " + s);
  }
}

PathLossModel ExperimentConfig::pathloss() const {
  return pathloss_kind == "singular" ? PathLossModel::singular(kappa, beta)
                                     : PathLossModel::bounded(beta);
}

SinrParams ExperimentConfig::sinr_params() const {
  return {tau, noise, fading_mean};
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.seed = j.value("seed", c.seed);
  c.n_pairs = j.value("n_pairs", c.n_pairs);
  c.realizations = j.value("realizations", c.realizations);
  c.window = j.value("window", c.window);
  c.r_max = j.value("r_max", c.r_max);
  c.tau = j.value("tau", c.tau);
  c.beta = j.value("beta", c.beta);
  c.kappa = j.value("kappa", c.kappa);
  c.pathloss_kind = j.value("pathloss_kind", c.pathloss_kind);
  c.noise = j.value("noise", c.noise);
  c.fading_mean = j.value("fading_mean", c.fading_mean);
  c.sigma = j.value("sigma", c.sigma);
  c.R0 = j.value("R0", c.R0);
  if (j.contains("schedulers"))
    c.schedulers = j["schedulers"].get<std::vector<std::string>>();
  c.output_dir = j.value("output_dir", c.output_dir);
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    c.optimizer.max_iterations =
        o.value("max_iterations", c.optimizer.max_iterations);
    c.optimizer.gradient_step =
        o.value("gradient_step", c.optimizer.gradient_step);
    c.optimizer.initial_step =
        o.value("initial_step", c.optimizer.initial_step);
    c.optimizer.utility_tolerance =
        o.value("utility_tolerance", c.optimizer.utility_tolerance);
    c.optimizer.w_min = o.value("w_min", c.optimizer.w_min);
    c.optimizer.w_max = o.value("w_max", c.optimizer.w_max);
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["n_pairs"] = n_pairs;
  j["realizations"] = realizations;
  j["window"] = window;
  j["r_max"] = r_max;
  j["tau"] = tau;
  j["beta"] = beta;
  j["kappa"] = kappa;
  j["pathloss_kind"] = pathloss_kind;
  j["noise"] = noise;
  j["fading_mean"] = fading_mean;
  j["sigma"] = sigma;
  j["R0"] = R0;
  j["schedulers"] = schedulers;
  j["output_dir"] = output_dir;
  j["optimizer"] = {{"max_iterations", optimizer.max_iterations},
                    {"gradient_step", optimizer.gradient_step},
                    {"initial_step", optimizer.initial_step},
                    {"utility_tolerance", optimizer.utility_tolerance},
                    {"w_min", optimizer.w_min},
                    {"w_max", optimizer.w_max}};
  return j.dump(2) + "\n";
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void echo_config(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir + "/config.json", cfg.to_json_text());
}

struct SchedulerRun {
  std::string name;
  SymmetricKernel kernel;
  double utility = 0;
  bool ok = true;
};

// Optimize one scheduler family on a concrete network realization.
SchedulerRun run_scheduler(const std::string& name, const Network& net,
                           const ExperimentConfig& cfg) {
  SinrParams params = cfg.sinr_params();
  if (name == "fixed") {
    auto r = optimize_fixed_aloha(net, params, cfg.R0, cfg.optimizer);
    return {name, lower_to_marginal(FixedAloha{r.p}, net.size()), r.utility,
            true};
  }
  if (name == "adaptive") {
    auto r = optimize_adaptive_aloha(net, params, cfg.R0, cfg.optimizer);
    return {name, lower_to_marginal(AdaptiveAloha{r.p}, net.size()),
            r.utility, true};
  }
  SymmetricKernel s = gaussian_similarity(net, cfg.sigma);
  auto r = optimize_lensemble(net, s, params, cfg.R0, cfg.optimizer);
  return {name, lower_to_marginal(LEnsembleSpec{s, r.q}, net.size()),
          r.utility, true};
}

std::string plot_script(const ExperimentConfig& cfg) {
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "\"\"\"Per-link coverage: single realization and average across "
        "realizations.\"\"\"\n"
     << "import csv\n"
     << "from collections import defaultdict\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "per_path = '" << cfg.output_dir << "/per_realization.csv'\n"
     << "agg_path = '" << cfg.output_dir << "/aggregate.csv'\n\n"
     << "single = defaultdict(dict)\n"
     << "with open(per_path) as f:\n"
     << "    for row in csv.DictReader(f):\n"
     << "        if row['realization'] == '0':\n"
     << "            single[row['scheduler']][int(row['link'])] = "
        "float(row['coverage'])\n\n"
     << "mean = defaultdict(dict)\n"
     << "se = defaultdict(dict)\n"
     << "with open(agg_path) as f:\n"
     << "    for row in csv.DictReader(f):\n"
     << "        mean[row['scheduler']][int(row['link'])] = "
        "float(row['coverage_mean'])\n"
     << "        se[row['scheduler']][int(row['link'])] = "
        "float(row['coverage_se'])\n\n"
     << "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharey=True)\n"
     << "for sched, cov in single.items():\n"
     << "    links = sorted(cov)\n"
     << "    ax1.plot(links, [cov[l] for l in links], 'o-', label=sched)\n"
     << "ax1.set_title('Single realization (" << cfg.n_pairs << " pairs)')\n"
     << "ax1.set_xlabel('link')\n"
     << "ax1.set_ylabel('coverage probability')\n"
     << "ax1.legend()\n"
     << "for sched, cov in mean.items():\n"
     << "    links = sorted(cov)\n"
     << "    ax2.errorbar(links, [cov[l] for l in links],\n"
     << "                 yerr=[se[sched][l] for l in links], fmt='o-', "
        "label=sched)\n"
     << "ax2.set_title('Averaged over " << cfg.realizations
     << " realizations')\n"
     << "ax2.set_xlabel('link')\n"
     << "ax2.legend()\n"
     << "fig.tight_layout()\n"
     << "fig.savefig('" << cfg.output_dir << "/coverage.png', dpi=150)\n"
     << "print('wrote " << cfg.output_dir << "/coverage.png')\n";
  return py.str();
}

}  // namespace

int cmd_gen(const ExperimentConfig& cfg) {
  cfg.validate();
  echo_config(cfg);
  Network net = generate_network(cfg.n_pairs, cfg.window, cfg.r_max,
                                 cfg.pathloss(), cfg.noise, cfg.seed);
  save_network(net, cfg.output_dir + "/network.json");
  std::cout << "wrote " << cfg.output_dir << "/network.json\n";
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  echo_config(cfg);
  SinrParams params = cfg.sinr_params();

  std::ostringstream per;
  per << "realization,scheduler,link,coverage,utility\n";

  // mean/SE accumulation per (scheduler, link) and per-scheduler utility
  const int n = cfg.n_pairs;
  std::vector<std::vector<std::vector<double>>> cov(
      cfg.schedulers.size(), std::vector<std::vector<double>>(n));
  std::vector<std::vector<double>> utils(cfg.schedulers.size());
  int warnings = 0;

  for (int k = 0; k < cfg.realizations; ++k) {
    Network net = generate_network(n, cfg.window, cfg.r_max, cfg.pathloss(),
                                   cfg.noise, cfg.seed + k);
    CoverageEvaluator eval(net, params);
    for (std::size_t s = 0; s < cfg.schedulers.size(); ++s) {
      SchedulerRun run{cfg.schedulers[s], SymmetricKernel(
          Eigen::MatrixXd::Zero(n, n), KernelRole::MarginalK)};
      try {
        run = run_scheduler(cfg.schedulers[s], net, cfg);
      } catch (const InfeasibleStart& e) {
        ++warnings;
        std::cerr << "warning: realization " << k << " scheduler "
                  << cfg.schedulers[s] << ": " << e.what() << "\n";
        continue;
      }
      utils[s].push_back(run.utility);
      for (int i = 0; i < n; ++i) {
        // Coverage through the compact determinant form.
        Eigen::MatrixXd cm = eval.coverage_matrix(run.kernel.matrix(), i);
        double c = cm.determinant();
        c = std::clamp(c, 0.0, 1.0);
        cov[s][i].push_back(c);
        per << k << "," << run.name << "," << i << "," << format_sig(c, 12)
            << "," << format_sig(run.utility, 12) << "\n";
      }
    }
  }
  write_text(cfg.output_dir + "/per_realization.csv", per.str());

  auto mean_se = [](const std::vector<double>& xs) {
    double m = 0;
    for (double x : xs) m += x;
    m /= xs.empty() ? 1 : xs.size();
    double var = 0;
    for (double x : xs) var += (x - m) * (x - m);
    double se = xs.size() > 1
                    ? std::sqrt(var / (xs.size() - 1) / xs.size())
                    : 0.0;
    return std::pair<double, double>(m, se);
  };

  std::ostringstream agg;
  agg << "scheduler,link,coverage_mean,coverage_se,utility_mean,utility_se\n";
  for (std::size_t s = 0; s < cfg.schedulers.size(); ++s) {
    auto [um, use] = mean_se(utils[s]);
    for (int i = 0; i < n; ++i) {
      auto [cm, cse] = mean_se(cov[s][i]);
      agg << cfg.schedulers[s] << "," << i << "," << format_sig(cm, 12) << ","
          << format_sig(cse, 12) << "," << format_sig(um, 12) << ","
          << format_sig(use, 12) << "\n";
    }
  }
  write_text(cfg.output_dir + "/aggregate.csv", agg.str());
  write_text(cfg.output_dir + "/plot.py", plot_script(cfg));

  if (warnings > 0)
    std::cerr << warnings << " scheduler runs were infeasible\n";
  std::cout << "wrote " << cfg.output_dir << "/per_realization.csv, "
            << cfg.output_dir << "/aggregate.csv, " << cfg.output_dir
            << "/plot.py\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg, bool tamper_h) {
  cfg.validate();
  if (cfg.n_pairs > 12)
    throw SizeLimit("verify needs n_pairs <= 12 for subset enumeration");
  echo_config(cfg);
  SinrParams params = cfg.sinr_params();

  HTransform hook;
  if (tamper_h) hook = [](double h) { return 1.0 - h; };

  const int n = cfg.n_pairs;
  const long mc_samples = 200000;
  const int instances = 2;
  bool pass = true;

  for (const auto& name : cfg.schedulers) {
    std::ostringstream out;
    out << "link,exact_det,exact_enum,mc_mean,mc_se,abs_diff\n";
    for (int t = 0; t < instances; ++t) {
      Network net = generate_network(n, cfg.window, cfg.r_max, cfg.pathloss(),
                                     cfg.noise, cfg.seed + t);
      // Deterministic non-trivial parameters; verification only needs a
      // valid kernel, not an optimized one.
      SchedulerSpec spec = FixedAloha{0.5};
      SymmetricKernel L(Eigen::MatrixXd::Identity(n, n),
                        KernelRole::EnsembleL);
      if (name == "fixed") {
        double p = 0.4;
        spec = FixedAloha{p};
        L = SymmetricKernel(
            Eigen::MatrixXd(
                Eigen::VectorXd::Constant(n, p / (1 - p)).asDiagonal()),
            KernelRole::EnsembleL);
      } else if (name == "adaptive") {
        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i) p[i] = 0.25 + 0.5 * i / std::max(1, n - 1);
        spec = AdaptiveAloha{p};
        Eigen::VectorXd lq(n);
        for (int i = 0; i < n; ++i) lq[i] = p[i] / (1 - p[i]);
        L = SymmetricKernel(Eigen::MatrixXd(lq.asDiagonal()),
                            KernelRole::EnsembleL);
      } else {
        SymmetricKernel s = gaussian_similarity(net, cfg.sigma);
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q[i] = 0.8 + 0.1 * i;
        auto qv = QualityVector::from_values(q);
        spec = LEnsembleSpec{s, qv};
        L = build_L(s, qv);
      }
      SymmetricKernel K = lower_to_marginal(spec, n);

      for (int i = 0; i < n; ++i) {
        double exact_det = coverage_prob(K, net, i, params);
        double exact_enum = enumerate_coverage(L, net, i, params, hook);
        McEstimate mc = mc_coverage(spec, net, i, params, mc_samples,
                                    cfg.seed + 1000 * t + i);
        double diff = std::abs(exact_det - exact_enum);
        out << i << "," << format_sig(exact_det, 12) << ","
            << format_sig(exact_enum, 12) << "," << format_sig(mc.mean, 12)
            << "," << format_sig(mc.std_error, 12) << ","
            << format_sig(diff, 12) << "\n";
        if (diff >= 1e-10) {
          pass = false;
          std::cerr << "verify FAIL: " << name << " instance " << t << " link "
                    << i << " det=" << exact_det << " enum=" << exact_enum
                    << " diff=" << diff << "\n";
        }
        if (std::abs(mc.mean - exact_det) > 4 * mc.std_error + 1e-12) {
          pass = false;
          std::cerr << "verify FAIL: " << name << " instance " << t << " link "
                    << i << " mc=" << mc.mean << " +/- " << mc.std_error
                    << " vs exact " << exact_det << "\n";
        }
      }
    }
    write_text(cfg.output_dir + "/verify_" + name + ".csv", out.str());
  }
  std::cout << (pass ? "verify PASS\n" : "verify FAIL\n");
  return pass ? 0 : 1;
}

int cmd_sample(const ExperimentConfig& cfg, const std::string& kernel_path,
               long count, std::uint64_t seed) {
  cfg.validate();
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  echo_config(cfg);

  SymmetricKernel K(Eigen::MatrixXd::Zero(1, 1), KernelRole::MarginalK);
  if (!kernel_path.empty()) {
    SymmetricKernel loaded = load_kernel_csv(kernel_path);
    if (loaded.role() == KernelRole::EnsembleL) {
      K = marginal_from_L(loaded);
    } else if (loaded.role() == KernelRole::MarginalK) {
      K = loaded;
    } else {
      throw std::invalid_argument(
          "sample needs a marginal-K or ensemble-L kernel dump");
    }
  } else {
    Network net = generate_network(cfg.n_pairs, cfg.window, cfg.r_max,
                                   cfg.pathloss(), cfg.noise, cfg.seed);
    SymmetricKernel s = gaussian_similarity(net, cfg.sigma);
    K = marginal_from_L(build_L(
        s, QualityVector::from_values(Eigen::VectorXd::Ones(cfg.n_pairs))));
  }

  DppSampler sampler(K);
  Rng rng = make_rng(seed);
  std::ostringstream out;
  for (long c = 0; c < count; ++c) {
    Subset psi = sampler.draw(rng);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (i) out << " ";
      out << psi[i];
    }
    out << "\n";
  }
  write_text(cfg.output_dir + "/samples.txt", out.str());
  std::cout << "wrote " << cfg.output_dir << "/samples.txt\n";
  return 0;
}

}  // namespace detsched
