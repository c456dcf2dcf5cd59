#include "photonbound/cli/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "photonbound/analytical/estimator.hpp"
#include "photonbound/channel/sampling.hpp"
#include "photonbound/cli/table_csv.hpp"
#include "photonbound/errors.hpp"
#include "photonbound/lp/lp_estimator.hpp"
#include "photonbound/qkd/pipeline.hpp"
#include "photonbound/tcspc/pipeline.hpp"

namespace photonbound::cli {
namespace {

const std::vector<std::string> kKnownKeys = {
    "source.intensities",
    "detector.type",
    "detector.dark_count",
    "detector.efficiency",
    "detector.attenuations",
    "detector.bin_edges",
    "detector.bins",
    "detector.y_max",
    "channel.flip_probability",
    "channel.loss_db",
    "channel.loss_start",
    "channel.loss_stop",
    "channel.loss_step",
    "scene.excitation_time",
    "scene.decay_time",
    "scene.bin_duration",
    "scene.excitation_coefficient",
    "scene.time_start",
    "scene.time_stop",
    "estimator.method",
    "estimator.n0",
    "estimator.m0",
    "estimator.n_c",
    "estimator.m_c",
    "estimator.targets",
    "estimator.max_iterations",
    "estimator.tolerance",
    "estimator.scan_orders",
    "qkd.protocols",
    "sampling.seed",
    "sampling.shots",
    "output.dir",
    "estimate.table",
};

std::string fmt(double v) { return format_double(v); }

std::ofstream open_out(const RunConfig& cfg, const std::string& name, std::string& written) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / name).string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  written += path + "\n";
  return os;
}

EstimatorOptions estimator_options(const Config& c) {
  EstimatorOptions o;
  o.max_iterations = c.get_int("estimator.max_iterations", o.max_iterations);
  o.tolerance = c.get_double("estimator.tolerance", o.tolerance);
  o.scan_orders = c.get_int("estimator.scan_orders", o.scan_orders);
  if (o.max_iterations < 1) throw ConfigError("estimator.max_iterations must be >= 1");
  if (!(o.tolerance > 0.0)) throw ConfigError("estimator.tolerance must be > 0");
  if (o.scan_orders < 1) throw ConfigError("estimator.scan_orders must be >= 1");
  return o;
}

Method method_of(const RunConfig& cfg) {
  if (cfg.method) return *cfg.method;
  return parse_method(cfg.config.get_string("estimator.method", "both"));
}

std::uint64_t seed_of(const RunConfig& cfg) { return cfg.seed.value_or(cfg.config.get_u64("sampling.seed", 1)); }
std::uint64_t shots_of(const RunConfig& cfg) { return cfg.shots.value_or(cfg.config.get_u64("sampling.shots", 0)); }

// detector.type is optional; when given it must match what the command uses
void check_detector_type(const Config& c, const std::string& expected) {
  const std::string type = c.get_string("detector.type", expected);
  if (type != "threshold" && type != "homodyne") {
    throw ConfigError("detector.type must be threshold or homodyne, got `" + type + "`");
  }
  if (type != expected) throw ConfigError("detector.type `" + type + "` does not fit this command (" + expected + ")");
}

std::vector<std::pair<int, int>> parse_targets(const Config& c) {
  std::vector<std::pair<int, int>> out;
  if (c.has("estimator.targets") && c.get_string("estimator.targets", "").empty()) return out;
  for (const std::string& item : c.get_strings("estimator.targets", {"1|1"})) {
    const auto bar = item.find('|');
    int m = 0;
    int n = 0;
    char extra = 0;
    if (bar == std::string::npos || std::sscanf(item.c_str(), "%d|%d%c", &m, &n, &extra) != 2 || m < 0 || n < 0) {
      throw ConfigError("estimator.targets: expected entries `m|n`, got `" + item + "`");
    }
    out.emplace_back(n, m);
  }
  return out;
}

HomodyneDetector homodyne_from(const Config& c, double default_eta) {
  HomodyneDetector det;
  const double eta = c.get_double("detector.efficiency", default_eta);
  if (c.has("detector.bin_edges")) {
    det.efficiency = eta;
    det.bin_edges = c.get_doubles("detector.bin_edges", {});
  } else {
    const int bins = c.get_int("detector.bins", 16);
    const double y_max = c.get_double("detector.y_max", 5.0);
    if (bins < 1 || !(y_max > 0.0)) throw ConfigError("detector.bins and detector.y_max must be positive");
    det = HomodyneDetector::uniform(eta, y_max, bins);
  }
  det.validate();
  return det;
}

std::vector<double> loss_grid(const Config& c) {
  if (c.has("channel.loss_db")) return c.get_doubles("channel.loss_db", {});
  const double start = c.get_double("channel.loss_start", 0.0);
  const double stop = c.get_double("channel.loss_stop", 45.0);
  const double step = c.get_double("channel.loss_step", 1.0);
  if (!(step > 0.0) || stop < start) throw ConfigError("channel loss range is empty");
  std::vector<double> out;
  const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9));
  for (int k = 0; k <= count; ++k) out.push_back(start + k * step);
  return out;
}

QkdSetup qkd_setup(const RunConfig& cfg) {
  const Config& c = cfg.config;
  check_detector_type(c, "threshold");
  QkdSetup s;
  s.source.intensities = c.get_doubles("source.intensities", s.source.intensities);
  s.detectors.dark_count_prob = c.get_double("detector.dark_count", s.detectors.dark_count_prob);
  s.detectors.single_photon_efficiency = c.get_double("detector.efficiency", s.detectors.single_photon_efficiency);
  s.detectors.attenuation_levels = c.get_doubles("detector.attenuations", s.detectors.attenuation_levels);
  s.flip_probability = c.get_double("channel.flip_probability", s.flip_probability);
  s.n0 = c.get_int("estimator.n0", s.n0);
  s.m0 = c.get_int("estimator.m0", s.m0);
  s.losses_db = loss_grid(c);
  s.protocols.clear();
  for (const std::string& p : c.get_strings("qkd.protocols", {"bb84", "six-state"})) {
    if (p == "bb84") {
      s.protocols.push_back(Protocol::BB84);
    } else if (p == "six-state") {
      s.protocols.push_back(Protocol::SixState);
    } else {
      throw ConfigError("qkd.protocols: unknown protocol `" + p + "` (bb84, six-state)");
    }
  }
  s.shots = shots_of(cfg);
  s.seed = seed_of(cfg);
  s.estimator = estimator_options(c);
  s.validate();
  return s;
}

TcspcScene tcspc_scene(const Config& c) {
  TcspcScene s;
  s.excitation_time = c.get_double("scene.excitation_time", s.excitation_time);
  s.decay_time = c.get_double("scene.decay_time", s.decay_time);
  s.bin_duration = c.get_double("scene.bin_duration", s.bin_duration);
  s.excitation_coefficient = c.get_double("scene.excitation_coefficient", s.excitation_coefficient);
  s.time_start = c.get_double("scene.time_start", s.time_start);
  s.time_stop = c.get_double("scene.time_stop", s.time_stop);
  s.validate();
  return s;
}

void write_qkd_csv(std::ostream& os, const std::vector<KeyRateReport>& reports) {
  os << "loss_db,protocol,key_rate,gain,qber,e_z_lo,e_z_hi,e_x_lo,e_x_hi,e_y_lo,e_y_hi,p_det_lo,p_det_hi,"
        "entropy_lower,vacuum_term,single_photon_term,leakage,baseline_e1\n";
  for (const KeyRateReport& r : reports) {
    os << fmt(r.loss_db) << ',' << to_string(r.protocol) << ',' << fmt(r.key_rate) << ',' << fmt(r.gain) << ','
       << fmt(r.qber) << ',' << fmt(r.e_z.lower) << ',' << fmt(r.e_z.upper) << ',' << fmt(r.e_x.lower) << ','
       << fmt(r.e_x.upper) << ',' << fmt(r.e_y.lower) << ',' << fmt(r.e_y.upper) << ',' << fmt(r.p_det.lower) << ','
       << fmt(r.p_det.upper) << ',' << fmt(r.entropy_lower) << ',' << fmt(r.vacuum_term) << ','
       << fmt(r.single_photon_term) << ',' << fmt(r.leakage) << ',' << fmt(r.baseline_e1) << '\n';
  }
}

void write_tcspc_csv(std::ostream& os, const TcspcReport& report) {
  os << "t_ns,q0_lo,q0_hi,q1_lo,q1_hi,q1_exact,q1_contains,q2_lo,q2_hi,q2_exact,q2_contains,qc_lo,qc_hi,qc_exact,"
        "pt_lo,pt_hi,pt_exact,pt_contains\n";
  for (const TcspcRow& r : report.rows) {
    os << fmt(r.t_ns) << ',' << fmt(r.q0.lower) << ',' << fmt(r.q0.upper) << ',' << fmt(r.q1.lower) << ','
       << fmt(r.q1.upper) << ',' << fmt(r.q1_exact) << ',' << (r.q1.contains(r.q1_exact) ? "true" : "false") << ','
       << fmt(r.q2.lower) << ',' << fmt(r.q2.upper) << ',' << fmt(r.q2_exact) << ','
       << (r.q2.contains(r.q2_exact) ? "true" : "false") << ',' << fmt(r.qc.lower) << ',' << fmt(r.qc.upper) << ','
       << fmt(r.qc_exact) << ',' << fmt(r.pt.lower) << ',' << fmt(r.pt.upper) << ',' << fmt(r.pt_exact) << ','
       << (r.pt.contains(r.pt_exact) ? "true" : "false") << '\n';
  }
}

template <class F>
void write_series(const RunConfig& cfg, const std::string& name, std::string& written, std::size_t count, F point) {
  std::ofstream os = open_out(cfg, name, written);
  for (std::size_t i = 0; i < count; ++i) {
    const auto [x, y] = point(i);
    os << fmt(x) << ' ' << fmt(y) << '\n';
  }
}

TcspcReport tcspc_report(const RunConfig& cfg) {
  const Config& c = cfg.config;
  if (shots_of(cfg) != 0) throw ConfigError("simulate-tcspc works on exact tables only; drop --shots");
  check_detector_type(c, "homodyne");
  const TcspcScene scene = tcspc_scene(c);
  const HomodyneDetector det = homodyne_from(c, 1.0);
  TcspcOptions opts;
  opts.n0 = c.get_int("estimator.n0", opts.n0);
  if (opts.n0 < 2) throw ConfigError("estimator.n0 must be >= 2 for TCSPC (q2 is reported)");
  opts.estimator = estimator_options(c);
  return run_tcspc(scene, det, opts);
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "analytical") return Method::Analytical;
  if (name == "lp") return Method::Lp;
  if (name == "both") return Method::Both;
  throw ConfigError("method must be analytical, lp or both, got `" + name + "`");
}

std::string cmd_estimate(const RunConfig& cfg) {
  const Config& c = cfg.config;
  const std::string path = cfg.table_path.empty() ? c.get_string("estimate.table", "") : cfg.table_path;
  if (path.empty()) throw ConfigError("estimate needs a table file (argument or estimate.table)");
  MeasurementTable table = load_table(path);
  check_detector_type(c, table.kind == TableKind::Threshold ? "threshold" : "homodyne");
  if (shots_of(cfg) != 0) table = sample_table(table, shots_of(cfg), seed_of(cfg));

  PoissonSource source{table.intensities};
  source.validate();
  const Method method = method_of(cfg);
  const EstimatorOptions opts = estimator_options(c);
  const int n0 = c.get_int("estimator.n0", static_cast<int>(source.size()) - 1);
  const int m0 = c.get_int("estimator.m0", 2);
  const int n_c = c.get_int("estimator.n_c", 8);
  const int m_c = c.get_int("estimator.m_c", 8);
  if (n0 < 0 || m0 < 0 || n_c < 0 || m_c < 0) throw ConfigError("estimator orders must be non-negative");
  const auto targets = parse_targets(c);

  std::unique_ptr<DetectorResponse> detector;
  const auto param = [&](const char* key) {
    const auto it = table.parameters.find(key);
    if (it == table.parameters.end()) throw ConfigError(path + ": metadata lacks " + std::string(key));
    return it->second;
  };
  if (table.kind == TableKind::Threshold) {
    ThresholdDetector det{param("p_dc"), param("eta_det"), table.attenuations};
    det.validate();
    detector = std::make_unique<ThresholdResponse>(det);
  } else {
    HomodyneDetector det{param("eta"), table.bin_edges};
    det.validate();
    detector = std::make_unique<HomodyneResponse>(det, std::max(m_c + 1, m0 + opts.scan_orders + 1));
  }

  std::string written;
  std::ofstream os = open_out(cfg, "estimate.csv", written);
  os << "target,method,lower,upper,lambda,source_tail_lo,source_tail_hi,detector_tail_lo,detector_tail_hi,cross,"
        "qtilde_upper\n";
  for (const auto& [n, m] : targets) {
    const std::string label = std::to_string(m) + "|" + std::to_string(n);
    if (method != Method::Lp) {
      const IntervalEstimate e = estimate_interval(table, source, *detector, n, m, n0, m0, opts);
      const ResidualBudget& b = e.budget;
      os << label << ",analytical," << fmt(e.lower) << ',' << fmt(e.upper) << ',' << fmt(e.lambda) << ','
         << fmt(b.source_tail.lower) << ',' << fmt(b.source_tail.upper) << ',' << fmt(b.detector_tail.lower) << ','
         << fmt(b.detector_tail.upper) << ',' << fmt(b.cross) << ',' << fmt(b.qtilde_upper) << '\n';
    }
    if (method != Method::Analytical) {
      const IntervalEstimate e = lp_interval(table, source, *detector, n_c, m_c, n, m);
      os << label << ",lp," << fmt(e.lower) << ',' << fmt(e.upper) << ",,,,,,,\n";
    }
  }
  return written;
}

std::string cmd_simulate_qkd(const RunConfig& cfg) {
  const std::vector<KeyRateReport> reports = run_qkd_sweep(qkd_setup(cfg));
  std::string written;
  std::ofstream os = open_out(cfg, "qkd.csv", written);
  write_qkd_csv(os, reports);
  return written;
}

std::string cmd_simulate_tcspc(const RunConfig& cfg) {
  const TcspcReport report = tcspc_report(cfg);
  std::string written;
  std::ofstream os = open_out(cfg, "tcspc.csv", written);
  write_tcspc_csv(os, report);
  return written;
}

std::string cmd_demo(const RunConfig& cfg) {
  std::string written;
  if (cfg.figure == "fig2") {
    const std::vector<KeyRateReport> reports = run_qkd_sweep(qkd_setup(cfg));
    {
      std::ofstream os = open_out(cfg, "fig2.csv", written);
      write_qkd_csv(os, reports);
    }
    for (Protocol p : {Protocol::BB84, Protocol::SixState}) {
      std::vector<const KeyRateReport*> rows;
      for (const KeyRateReport& r : reports) {
        if (r.protocol == p) rows.push_back(&r);
      }
      const std::string name = p == Protocol::BB84 ? "fig2_key_rate_bb84.dat" : "fig2_key_rate_six_state.dat";
      write_series(cfg, name, written, rows.size(), [&](std::size_t i) {
        return std::pair{rows[i]->loss_db, rows[i]->key_rate};
      });
    }
  } else if (cfg.figure == "fig3") {
    RunConfig bb84 = cfg;
    bb84.config.set("qkd.protocols", "bb84");
    const std::vector<KeyRateReport> reports = run_qkd_sweep(qkd_setup(bb84));
    const double e_ch = bb84.config.get_double("channel.flip_probability", 0.05);
    {
      std::ofstream os = open_out(cfg, "fig3.csv", written);
      write_qkd_csv(os, reports);
    }
    write_series(cfg, "fig3_exact.dat", written, reports.size(), [&](std::size_t i) {
      return std::pair{reports[i].loss_db, e_ch};
    });
    write_series(cfg, "fig3_bound.dat", written, reports.size(), [&](std::size_t i) {
      return std::pair{reports[i].loss_db, reports[i].e_z.upper};
    });
    write_series(cfg, "fig3_baseline.dat", written, reports.size(), [&](std::size_t i) {
      return std::pair{reports[i].loss_db, reports[i].baseline_e1};
    });
  } else if (cfg.figure == "fig5") {
    const TcspcReport report = tcspc_report(cfg);
    {
      std::ofstream os = open_out(cfg, "fig5.csv", written);
      write_tcspc_csv(os, report);
    }
    const auto& rows = report.rows;
    const std::size_t n = rows.size();
    write_series(cfg, "fig5_q1_exact.dat", written, n, [&](std::size_t i) { return std::pair{rows[i].t_ns, rows[i].q1_exact}; });
    write_series(cfg, "fig5_q1_lo.dat", written, n, [&](std::size_t i) { return std::pair{rows[i].t_ns, rows[i].q1.lower}; });
    write_series(cfg, "fig5_q1_hi.dat", written, n, [&](std::size_t i) { return std::pair{rows[i].t_ns, rows[i].q1.upper}; });
    write_series(cfg, "fig5_q2_exact.dat", written, n, [&](std::size_t i) { return std::pair{rows[i].t_ns, rows[i].q2_exact}; });
    write_series(cfg, "fig5_q2_lo.dat", written, n, [&](std::size_t i) { return std::pair{rows[i].t_ns, rows[i].q2.lower}; });
    write_series(cfg, "fig5_q2_hi.dat", written, n, [&](std::size_t i) { return std::pair{rows[i].t_ns, rows[i].q2.upper}; });
  } else {
    throw ConfigError("unknown figure `" + cfg.figure + "` (fig2, fig3, fig5)");
  }
  return written;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Certified bounds on photon-number statistics"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
  std::string method;
  app.add_option("--config", config_path, "configuration file (section.key = value)");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "sampling seed");
  auto* shots_opt = app.add_option("--shots", shots, "shots per table cell; 0 keeps exact tables");
  app.add_option("--method", method, "analytical, lp or both")->check(CLI::IsMember({"analytical", "lp", "both"}));

  RunConfig cfg;
  auto* estimate = app.add_subcommand("estimate", "bound q(m|n) from a measurement table");
  estimate->add_option("table", cfg.table_path, "measurement table CSV");
  auto* qkd = app.add_subcommand("simulate-qkd", "key-rate sweep over channel loss");
  auto* tcspc = app.add_subcommand("simulate-tcspc", "photon statistics per TCSPC time bin");
  auto* demo = app.add_subcommand("demo", "canonical runs with plot series");
  demo->add_option("figure", cfg.figure, "fig2, fig3 or fig5")->required();
  for (auto* sub : {estimate, qkd, tcspc, demo}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) cfg.config = Config::load(config_path);
    cfg.config.check_keys(kKnownKeys);
    cfg.out_dir = out_dir.empty() ? cfg.config.get_string("output.dir", ".") : out_dir;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (shots_opt->count() > 0) cfg.shots = shots;
    if (!method.empty()) cfg.method = parse_method(method);

    std::string written;
    if (estimate->parsed()) {
      cfg.command = "estimate";
      written = cmd_estimate(cfg);
    } else if (qkd->parsed()) {
      cfg.command = "simulate-qkd";
      written = cmd_simulate_qkd(cfg);
    } else if (tcspc->parsed()) {
      cfg.command = "simulate-tcspc";
      written = cmd_simulate_tcspc(cfg);
    } else {
      cfg.command = "demo";
      written = cmd_demo(cfg);
    }
    std::cout << written;
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace photonbound::cli
