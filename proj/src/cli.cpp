#include "fbmpersist/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <type_traits>

#include <CLI11.hpp>

#include "fbmpersist/batch_io.hpp"
#include "fbmpersist/covmodel.hpp"
#include "fbmpersist/curve.hpp"
#include "fbmpersist/errors.hpp"
#include "fbmpersist/geometry.hpp"
#include "fbmpersist/persistence.hpp"
#include "fbmpersist/sampler.hpp"
#include "fbmpersist/verify.hpp"

#ifndef FBMPERSIST_VERSION
#define FBMPERSIST_VERSION "0.0.0"
#endif

namespace fbmpersist::cli {

namespace fs = std::filesystem;

namespace {

template <class F>
void for_each_field(RunConfig& c, F&& f) {
  f("model", c.model);
  f("H", c.H);
  f("sigma", c.sigma);
  f("ell", c.ell);
  f("domain", c.domain);
  f("d", c.d);
  f("size", c.size);
  f("T", c.T);
  f("barrier", c.barrier);
  f("mesh", c.mesh);
  f("seed", c.seed);
  f("N", c.N);
  f("workers", c.workers);
  f("cap", c.cap);
  f("nmax", c.nmax);
  f("eps", c.eps);
  f("L", c.L);
  f("rho", c.rho);
  f("a", c.a);
  f("c", c.c);
  f("b", c.b);
  f("kappa", c.kappa);
  f("r", c.r);
  f("n", c.n);
  f("q", c.q);
  f("out", c.out);
}

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

CovarianceModel make_model(const RunConfig& c) {
  switch (model_kind_from_string(c.model)) {
    case ModelKind::Fbm:
      return CovarianceModel::fbm(c.H);
    case ModelKind::PerturbedFbm:
      return CovarianceModel::perturbed_fbm(c.H, c.sigma, c.ell);
  }
  throw ConfigError("unknown model");
}

Domain make_domain(const RunConfig& c) { return Domain::make(domain_kind_from_string(c.domain), c.d, c.size); }

int refinement(const RunConfig& c) {
  if (!(c.mesh > 0.0 && c.mesh <= 1.0)) throw ConfigError("mesh must lie in (0, 1]");
  const double m = 1.0 / c.mesh;
  const double k = std::round(m);
  if (std::abs(m - k) > 1e-9 * k) throw ConfigError("mesh must be 1/m for an integer m");
  return static_cast<int>(k);
}

RunOptions make_options(const RunConfig& c) {
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  return RunOptions{c.cap, c.workers};
}

// Checks everything a command needs before any sampling starts.
void validate(const RunConfig& c) {
  make_model(c);
  make_domain(c);
  make_options(c);
  refinement(c);
  if (c.T.empty()) throw ConfigError("at least one T is required");
  for (double t : c.T)
    if (!(t > 0.0)) throw ConfigError("T values must be positive");
  if (!(c.barrier >= 0.0)) throw ConfigError("barrier must be >= 0");
  if (c.command == "exponent" && std::set<double>(c.T.begin(), c.T.end()).size() < 3)
    throw ConfigError("need >= 3 scales for an exponent fit");
  if ((c.command == "persist" || c.command == "exponent" || c.command == "maxscale" ||
       c.command.rfind("verify", 0) == 0) &&
      c.N < 100)
    throw ConfigError("N must be >= 100");
  if (c.command == "sample" && c.N < 1) throw ConfigError("N must be >= 1");
}

fs::path output_dir(const RunConfig& c) {
  std::string dir = c.out;
  if (dir.empty())
    if (const char* env = std::getenv("FBMPERSIST_OUT")) dir = env;
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << std::setprecision(17);
  return os;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  nlohmann::json summary = nlohmann::json::object();

  std::ofstream open(const std::string& name) {
    files.push_back(name);
    return open_out(dir / name);
  }
};

void write_json(Outputs& out, const std::string& name, const nlohmann::json& j) {
  auto os = out.open(name);
  os << j.dump(2) << "\n";
}

int cmd_sample(const RunConfig& c, Outputs& out) {
  const auto model = make_model(c);
  const auto pts = persistence_net(make_domain(c), c.T.front(), refinement(c), c.cap);
  const auto batch = sample(model, pts, c.seed, c.N, 0, c.workers);
  {
    auto os = out.open("points.csv");
    for (int i = 0; i < c.d; ++i) os << (i ? "," : "") << "t" << (i + 1);
    os << "\n";
    for (const auto& p : pts) {
      for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? "," : "") << p[i];
      os << "\n";
    }
  }
  auto os = out.open("samples.csv");
  write_batch_csv(os, batch);
  out.summary["n_points"] = pts.size();
  out.summary["points_digest"] = points_digest(pts);
  std::cout << "sampled " << c.N << " realizations on " << pts.size() << " points\n";
  return kExitOk;
}

std::vector<PersistenceEstimate> run_persist(const RunConfig& c, Outputs& out) {
  const auto model = make_model(c);
  const auto domain = make_domain(c);
  std::vector<PersistenceEstimate> est;
  auto os = out.open("persist.csv");
  os << "model,domain,d,size,T,barrier,mesh,n_points,N,seed,hits,p_hat,std_error,ci_lo,ci_hi\n";
  for (double T : c.T) {
    est.push_back(estimate_p(model, domain, T, c.barrier, refinement(c), c.seed, c.N, make_options(c)));
    const auto& e = est.back();
    os << '"' << model.describe() << "\"," << c.domain << ',' << c.d << ',' << c.size << ',' << T << ','
       << c.barrier << ',' << c.mesh << ',' << e.n_points << ',' << c.N << ',' << c.seed << ',' << e.p.hits << ','
       << e.p.p_hat << ',' << e.p.std_error << ',' << e.p.ci_lo << ',' << e.p.ci_hi << "\n";
    std::cout << "T=" << T << " points=" << e.n_points << " p_hat=" << e.p.p_hat << " +- " << e.p.std_error
              << "\n";
  }
  return est;
}

int cmd_persist(const RunConfig& c, Outputs& out) {
  run_persist(c, out);
  return kExitOk;
}

int cmd_exponent(const RunConfig& c, Outputs& out) {
  const auto est = run_persist(c, out);
  const auto fit = fit_exponent(est);
  {
    auto os = out.open("plot_data.csv");
    os << "log_T,log_p,weight\n";
    for (std::size_t i = 0; i < fit.T.size(); ++i)
      os << std::log(fit.T[i]) << ',' << std::log(fit.p[i]) << ',' << fit.weights[i] << "\n";
  }
  nlohmann::json j = {{"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"slope_std_error", fit.slope_std_error},
                      {"T", fit.T},
                      {"p", fit.p},
                      {"std_error", fit.std_error},
                      {"weights", fit.weights}};
  write_json(out, "exponent.json", j);
  out.summary["slope"] = fit.slope;
  out.summary["slope_std_error"] = fit.slope_std_error;
  std::cout << "slope=" << fit.slope << " +- " << fit.slope_std_error << "\n";
  return kExitOk;
}

int cmd_maxscale(const RunConfig& c, Outputs& out) {
  const auto model = make_model(c);
  const auto domain = make_domain(c);
  auto os = out.open("maxscale.csv");
  os << "T,mesh,n_points,N,mean_max,std_error,ratio_T_pow_H,log_T,log_mean_max\n";
  for (double T : c.T) {
    const auto e = estimate_EM(model, domain, T, refinement(c), c.seed, c.N, make_options(c));
    const double ratio = e.mean.mean / std::pow(T, c.H);
    os << T << ',' << c.mesh << ',' << e.n_points << ',' << c.N << ',' << e.mean.mean << ',' << e.mean.std_error
       << ',' << ratio << ',' << std::log(T) << ',' << std::log(e.mean.mean) << "\n";
    std::cout << "T=" << T << " points=" << e.n_points << " EM=" << e.mean.mean << " +- " << e.mean.std_error
              << " EM/T^H=" << ratio << "\n";
  }
  return kExitOk;
}

nlohmann::json curve_report_json(const EnumerationCurve& curve, const CurveReport& rep) {
  nlohmann::json j = {{"dim", curve.dim},
                      {"n_max", curve.n_max},
                      {"eps", curve.eps},
                      {"step_bound", curve.step_bound},
                      {"length", curve.size()},
                      {"length_ratio", rep.length_ratio},
                      {"passed", rep.all_passed()}};
  j["checks"] = nlohmann::json::array();
  for (const auto& ck : rep.checks) {
    nlohmann::json e = {{"name", ck.name}, {"passed", ck.passed}, {"detail", ck.detail}};
    if (ck.counterexample) e["counterexample"] = *ck.counterexample;
    j["checks"].push_back(e);
  }
  return j;
}

int cmd_curve(const RunConfig& c, Outputs& out, bool write_curve) {
  const auto curve = build_curve(c.d, c.nmax, c.eps, c.L);
  const auto rep = validate_curve(curve);
  if (write_curve) {
    auto os = out.open("curve.csv");
    write_curve_csv(os, curve);
  }
  write_json(out, "curve_report.json", curve_report_json(curve, rep));
  for (const auto& ck : rep.checks)
    std::cout << std::left << std::setw(16) << ck.name << (ck.passed ? "pass" : "FAIL") << "  " << ck.detail << "\n";
  std::cout << "length " << curve.size() << " (ratio " << rep.length_ratio << ")\n";
  out.summary["passed"] = rep.all_passed();
  return rep.all_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const RunConfig& c, Outputs& out, const std::string& suite) {
  const auto options = make_options(c);
  VerifyReport rep;
  if (suite == "lemma2") {
    rep = lemma2_check(make_model(c), make_domain(c), c.T.front(), c.rho, c.a, c.c, c.b, c.seed, c.N, options);
  } else if (suite == "cor3") {
    rep = corollary3_sweep(make_model(c), make_domain(c), c.T, c.kappa, c.seed, c.N, options);
  } else if (suite == "fernique") {
    rep = fernique_tail_check(make_model(c), unit_ball_net(c.d), c.seed, c.N, c.r, options);
  } else if (suite == "chain") {
    if (c.model != "fbm") throw ConfigError("verify chain runs on the fbm model only");
    rep = chain_report(c.H, c.d, c.n, c.q, c.eps, c.seed, c.N, options);
  } else {
    throw ConfigError("unknown verify suite '" + suite + "'");
  }
  write_json(out, suite + "_report.json", rep.to_json());
  {
    auto os = out.open(suite + "_summary.txt");
    rep.print_table(os);
  }
  rep.print_table(std::cout);
  out.summary["passed"] = rep.passed();
  return rep.passed() ? kExitOk : kExitCheckFailed;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  std::set<std::string> known{"command"};
  for_each_field(c, [&](const char* key, auto& field) { known.insert(key); });
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  if (j.contains("command")) c.command = j.at("command").get<std::string>();
  try {
    for_each_field(c, [&](const char* key, auto& field) {
      if (!j.contains(key)) return;
      using V = std::decay_t<decltype(field)>;
      const auto& v = j.at(key);
      if constexpr (is_vector<V>::value) {
        if (v.is_number())
          field = V{v.get<typename V::value_type>()};
        else
          field = v.get<V>();
      } else {
        field = v.get<V>();
      }
    });
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  RunConfig copy = c;
  for_each_field(copy, [&](const char* key, auto& field) { j[key] = field; });
  return j;
}

int run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  Outputs out;
  out.dir = output_dir(config);

  int code = kExitOk;
  const auto& cmd = config.command;
  if (cmd == "sample") code = cmd_sample(config, out);
  else if (cmd == "persist") code = cmd_persist(config, out);
  else if (cmd == "exponent") code = cmd_exponent(config, out);
  else if (cmd == "maxscale") code = cmd_maxscale(config, out);
  else if (cmd == "curve build") code = cmd_curve(config, out, true);
  else if (cmd == "curve validate") code = cmd_curve(config, out, false);
  else if (cmd.rfind("verify ", 0) == 0) code = cmd_verify(config, out, cmd.substr(7));
  else throw ConfigError("unknown command '" + cmd + "'");

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json manifest = {{"command", cmd},
                             {"config", config_to_json(config)},
                             {"version", FBMPERSIST_VERSION},
                             {"elapsed_seconds", elapsed},
                             {"finished_utc", utc_timestamp()},
                             {"exit_code", code},
                             {"outputs", out.files},
                             {"summary", out.summary}};
  std::ofstream(out.dir / "manifest.json") << manifest.dump(2) << "\n";
  return code;
}

int main(int argc, char** argv) {
  CLI::App app{"Persistence of fractional Brownian motion with multidimensional time"};
  app.set_version_flag("--version", FBMPERSIST_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  for_each_field(cfg, [&](const char* key, auto& field) {
    using V = std::decay_t<decltype(field)>;
    auto* opt = app.add_option(std::string("--") + key, field);
    if constexpr (is_vector<V>::value) opt->delimiter(',');
  });

  std::vector<std::pair<CLI::App*, std::string>> leaves;
  for (const char* name : {"sample", "persist", "exponent", "maxscale"})
    leaves.emplace_back(app.add_subcommand(name), name);
  auto* curve = app.add_subcommand("curve", "Build or validate the enumeration curve");
  curve->require_subcommand(1);
  for (const char* name : {"build", "validate"})
    leaves.emplace_back(curve->add_subcommand(name), std::string("curve ") + name);
  auto* verify = app.add_subcommand("verify", "Verification suites");
  verify->require_subcommand(1);
  for (const char* name : {"lemma2", "cor3", "fernique", "chain"})
    leaves.emplace_back(verify->add_subcommand(name), std::string("verify ") + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot read config file " + config_path);
      nlohmann::json merged;
      try {
        merged = nlohmann::json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      config_from_json(merged);  // reject unknown keys early
      const auto flags = config_to_json(cfg);
      for_each_field(cfg, [&](const char* key, auto&) {
        if (app.get_option(std::string("--") + key)->count() > 0) merged[key] = flags[key];
      });
      merged.erase("command");
      cfg = config_from_json(merged);
    }
    for (const auto& [sub, name] : leaves)
      if (sub->parsed()) cfg.command = name;
    return run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace fbmpersist::cli
