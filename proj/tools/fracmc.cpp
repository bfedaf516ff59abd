// fracmc: Monte Carlo solver for time-fractional PDEs driven by isotropic
// stable processes, with closed-form error bounds and statistical
// diagnostics.  Subcommands: estimate, bounds, tail, clt, scaling,
// bias-decay, figures.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracmc/bounds.hpp"
#include "fracmc/catalog.hpp"
#include "fracmc/csv.hpp"
#include "fracmc/diagnostics.hpp"
#include "fracmc/estimator.hpp"
#include "fracmc/expr.hpp"
#include "fracmc/figures.hpp"
#include "fracmc/special.hpp"

using namespace fracmc;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

struct Options {
  double alpha = 0.5;
  double beta = 1.5;
  double c = 1.0;
  std::optional<double> gamma;
  std::optional<double> lip;
  std::optional<double> growth;
  int dim = 1;
  double a = 0.0;
  double t = 1.0;
  std::string x = "0";
  std::string phi = "pow(norm(x),0.5)";
  std::string g;
  std::int64_t n = 100000;
  std::string h = "0";
  std::uint64_t seed = 3202501;
  double level = 0.95;
  int workers = 0;
  std::string out_dir = ".";
  std::string config_file;

  // diagnostics knobs
  std::int64_t reps = 500;
  double q_lo = 0.99;
  double q_hi = 0.9999;
  std::string abar_grid = "1:0.1:10";
  std::string h_grid = "0.2,0.1,0.05,0.025";
  double h_ref = 1e-3;
  double scaling_exponent = std::nan("");
};

std::vector<double> parse_vector(const std::string& src) {
  std::vector<double> v;
  std::stringstream ss(src);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) v.push_back(std::stod(item));
  }
  return v;
}

std::vector<double> parse_grid(const std::string& src) {
  // "lo:step:hi" or a comma list
  const auto c1 = src.find(':');
  if (c1 == std::string::npos) return parse_vector(src);
  const auto c2 = src.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("grid must be lo:step:hi or a comma list");
  const double lo = std::stod(src.substr(0, c1));
  const double step = std::stod(src.substr(c1 + 1, c2 - c1 - 1));
  const double hi = std::stod(src.substr(c2 + 1));
  if (!(step > 0.0) || hi < lo)
    throw std::invalid_argument("grid must satisfy lo <= hi, step > 0");
  std::vector<double> v;
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::int64_t i = 0; i <= count; ++i)
    v.push_back(lo + step * static_cast<double>(i));
  return v;
}

// flat key=value file; command-line flags win
void apply_config_file(const std::string& path,
                       std::map<std::string, std::string>& kv) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
}

ProblemSpec build_problem(const Options& opt) {
  ProblemSpec p;
  p.sub = {opt.alpha};
  p.stable = {opt.beta, opt.c, opt.dim};
  p.win = {opt.a, opt.t};
  p.x = parse_vector(opt.x);
  if (p.x.empty()) p.x.assign(static_cast<std::size_t>(opt.dim), 0.0);
  if (static_cast<int>(p.x.size()) != opt.dim)
    throw std::invalid_argument("--x must list exactly --dim coordinates");

  const Expr phi_ast = Expr::parse(opt.phi, opt.dim);
  p.phi = phi_ast.as_field();
  const auto phi_meta = phi_ast.derive_metadata();
  if (phi_meta.known) {
    p.phi_form = phi_meta.form;
    p.phi_growth = phi_meta.growth;
  }
  if (opt.growth) p.phi_growth = *opt.growth;
  if (!phi_meta.known && !opt.growth)
    throw std::invalid_argument(
        "--phi is outside the catalog; declare --growth explicitly");

  if (!opt.g.empty()) {
    const Expr g_ast = Expr::parse(opt.g, opt.dim);
    p.g = g_ast.as_field();
    const auto g_meta = g_ast.derive_metadata();
    double gamma = 0.0, lip = 0.0;
    if (g_meta.known) {
      p.g_form = g_meta.form;
      lip = g_meta.lip;
      gamma = g_meta.gamma ? *g_meta.gamma
                           : std::min(0.5, opt.beta / 4.0);  // constant g
    }
    if (opt.gamma) gamma = *opt.gamma;
    if (opt.lip) lip = *opt.lip;
    if (!g_meta.known && (!opt.gamma || !opt.lip))
      throw std::invalid_argument(
          "--g is outside the catalog; declare --gamma and --lip explicitly");
    p.gamma = gamma;
    p.lip = lip;
    if (!(p.gamma > 0.0 && p.gamma < opt.beta / 2.0))
      throw std::invalid_argument(
          "constraint violated: 0 < gamma < beta/2 (gamma = " +
          std::to_string(p.gamma) + ", beta = " + std::to_string(opt.beta) +
          ")");
  }
  p.validate();
  return p;
}

double resolve_step(const Options& opt, const ProblemSpec& p) {
  if (opt.h == "auto:paper")
    return default_step(opt.n, p.stable.beta, p.gamma, StepMode::paper_exact);
  if (opt.h == "auto:balanced")
    return default_step(opt.n, p.stable.beta, p.gamma, StepMode::balanced);
  const double h = std::stod(opt.h);
  if (h < 0.0) throw std::invalid_argument("--h must be >= 0");
  return h;
}

void write_manifest(const Options& opt, const std::string& command,
                    double wall_seconds) {
  nlohmann::json j;
  j["command"] = command;
  j["alpha"] = opt.alpha;
  j["beta"] = opt.beta;
  j["c"] = opt.c;
  j["dim"] = opt.dim;
  j["a"] = opt.a;
  j["t"] = opt.t;
  j["x"] = opt.x;
  j["phi"] = opt.phi;
  j["g"] = opt.g;
  if (opt.gamma) j["gamma"] = *opt.gamma;
  if (opt.lip) j["lip"] = *opt.lip;
  if (opt.growth) j["growth"] = *opt.growth;
  j["n"] = opt.n;
  j["h"] = opt.h;
  j["seed"] = opt.seed;
  j["level"] = opt.level;
  j["workers"] = opt.workers;
  j["reps"] = opt.reps;
  j["wall_seconds"] = wall_seconds;
  j["version"] = "fracmc 1.0";
  std::ofstream out(fs::path(opt.out_dir) / ("manifest_" + command + ".json"));
  out << j.dump(2) << "\n";
}

int cmd_estimate(const Options& opt) {
  const ProblemSpec p = build_problem(opt);
  const double h = resolve_step(opt, p);
  const EstimateResult r = estimate(p, opt.n, h, opt.seed, opt.workers);

  CsvWriter w((fs::path(opt.out_dir) / "estimate.csv").string());
  w.header(EstimateResult::csv_header(p.stable.d));
  w.raw_row(r.csv_row(p));

  const TailBoundParams params = TailBoundParams::defaults(p);
  std::cout << "mean      " << r.mean << "\n"
            << "stderr    " << r.stderr_mean() << "\n"
            << "variance  " << r.variance() << "\n"
            << "n         " << r.n << "\n"
            << "h         " << h << "\n";
  if (p.stable.beta < 2.0 && (!p.has_forcing() || p.g_form)) {
    const BoundsReport b = make_bounds_report(p, params, r.n, h);
    const Interval markov = markov_ci(r.mean, b.l2_bound, opt.level);
    const Interval clt =
        asymptotic_ci(r.mean, std::sqrt(b.z_sq_bound), r.n, opt.level);
    std::cout << "markov_ci     [" << markov.lo << ", " << markov.hi << "]\n"
              << "asymptotic_ci [" << clt.lo << ", " << clt.hi << "]\n";
  }
  return kExitOk;
}

int cmd_bounds(const Options& opt) {
  const ProblemSpec p = build_problem(opt);
  const double h = resolve_step(opt, p);
  const TailBoundParams params = TailBoundParams::defaults(p);
  const BoundsReport r = make_bounds_report(p, params, opt.n, h);

  std::ostringstream fp;
  fp << "a" << opt.alpha << "_b" << opt.beta << "_g" << p.gamma << "_d"
     << opt.dim << "_abar" << p.win.abar();
  CsvWriter w((fs::path(opt.out_dir) / "bounds.csv").string());
  w.header(BoundsReport::csv_header());
  w.raw_row(r.csv_row(fp.str()));

  std::cout << "C_beta        " << r.c_beta << "\n"
            << "M1_tail       " << r.m1_tail << "\n"
            << "M2_tail       " << r.m2_tail << "\n"
            << "phi_sq_bound  " << r.phi_sq_bound << "\n"
            << "M2_const      " << r.m2_const << "\n"
            << "var_bound     " << r.var_bound << "\n"
            << "bias_const    " << r.bias_const << "\n"
            << "bias2_const   " << r.bias2_const << "\n"
            << "z_sq_bound    " << r.z_sq_bound << "\n"
            << "l2_bound      " << r.l2_bound << "\n";
  return kExitOk;
}

int cmd_tail(const Options& opt) {
  const ProblemSpec p = build_problem(opt);
  std::vector<double> xs(static_cast<std::size_t>(opt.n));
  for (std::int64_t k = 0; k < opt.n; ++k) {
    RngStream rng(opt.seed, static_cast<std::uint64_t>(k));
    const auto state =
        sample_terminal_state(p.stable, p.sub, p.win, p.x, rng);
    double s = 0.0;
    for (double v : state) s += v * v;
    xs[static_cast<std::size_t>(k)] = std::sqrt(s);
  }
  const TailFit fit = fit_tail_exponent(xs, opt.q_lo, opt.q_hi);

  CsvWriter w((fs::path(opt.out_dir) / "tail.csv").string());
  w.header("threshold,survival,fitted");
  for (std::size_t i = 0; i < fit.thresholds.size(); ++i) {
    const double fitted =
        std::exp(fit.intercept + fit.slope * std::log(fit.thresholds[i]));
    w.cell(fit.thresholds[i]).cell(fit.survival[i]).cell(fitted);
    w.end_row();
  }
  std::cout << "slope     " << fit.slope << "  (tail order estimate)\n"
            << "r_squared " << fit.r_squared << "\n"
            << "window    [" << fit.u_min << ", " << fit.u_max << "]\n";
  const bool ok = std::abs(fit.slope + p.stable.beta) <= 0.15;
  std::cout << (ok ? "tail exponent consistent with -beta\n"
                   : "tail exponent INCONSISTENT with -beta\n");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_clt(const Options& opt) {
  const ProblemSpec p = build_problem(opt);
  const double h = resolve_step(opt, p);
  const CltReport rep =
      clt_replication(p, opt.n, opt.reps, opt.seed, opt.level, h);

  CsvWriter w((fs::path(opt.out_dir) / "clt.csv").string());
  w.header("replication,standardized,covered");
  for (std::size_t i = 0; i < rep.standardized.size(); ++i) {
    w.cell(static_cast<long long>(i))
        .cell(rep.standardized[i])
        .cell(static_cast<long long>(rep.covered[i]));
    w.end_row();
  }
  std::cout << "reference        " << rep.reference << "\n"
            << "pooled_sd        " << rep.pooled_sd << "\n"
            << "KS statistic     " << rep.normality_stat << "\n"
            << "KS p-value       " << rep.normality_pvalue << "\n"
            << "coverage         " << rep.empirical_coverage << " at level "
            << rep.level << "\n";
  const bool ok = rep.normality_pvalue > 0.01 &&
                  rep.empirical_coverage >= 0.93 &&
                  rep.empirical_coverage <= 0.98;
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_scaling(const Options& opt) {
  const ProblemSpec p = build_problem(opt);
  const double h = resolve_step(opt, p);
  double expo = opt.scaling_exponent;
  if (std::isnan(expo)) {
    // the two studied laws: alpha/(2 beta) for the phi part alone,
    // alpha(1+2 beta)/(2 beta) for the forcing part
    expo = p.has_forcing()
               ? p.sub.alpha * (1.0 + 2.0 * p.stable.beta) / (2.0 * p.stable.beta)
               : p.sub.alpha / (2.0 * p.stable.beta);
  }
  const auto grid = parse_grid(opt.abar_grid);
  const auto pts =
      scaling_check(p, grid, expo, opt.n, h, opt.seed, opt.workers);

  CsvWriter w((fs::path(opt.out_dir) / "scaling.csv").string());
  w.header("abar,estimate,stderr,ratio");
  double lo = pts[0].ratio, hi = pts[0].ratio, rel = 0.0;
  for (const auto& pt : pts) {
    w.cell(pt.abar).cell(pt.estimate).cell(pt.stderr_mean).cell(pt.ratio);
    w.end_row();
    lo = std::min(lo, pt.ratio);
    hi = std::max(hi, pt.ratio);
    rel = std::max(rel, pt.stderr_mean / pt.estimate);
  }
  const double spread = hi / lo - 1.0;
  const double allowance = 5.0 * std::sqrt(2.0) * rel;
  std::cout << "exponent  " << expo << "\n"
            << "spread    " << spread << " (max/min ratio - 1)\n"
            << "allowance " << allowance << "\n";
  return spread < allowance ? kExitOk : kExitCheckFailed;
}

int cmd_bias_decay(const Options& opt) {
  const ProblemSpec p = build_problem(opt);
  const auto grid = parse_grid(opt.h_grid);
  const BiasDecayResult res =
      bias_decay_check(p, grid, opt.h_ref, opt.n, opt.seed);

  CsvWriter w((fs::path(opt.out_dir) / "bias_decay.csv").string());
  w.header("h,mean_abs_diff,stderr,mean_sq_diff,stderr_sq");
  for (const auto& pt : res.points) {
    w.cell(pt.h).cell(pt.mean_abs).cell(pt.se_abs).cell(pt.mean_sq).cell(
        pt.se_sq);
    w.end_row();
  }
  if (res.exact_agreement) {
    std::cout << "zero forcing: coarse and fine sums agree exactly\n";
    return kExitOk;
  }
  const double target = p.gamma / p.stable.beta;
  std::cout << "L1 slope  " << res.slope << "  (expected " << target << ")\n"
            << "L2 slope  " << res.slope_sq << "  (expected " << 2.0 * target
            << ")\n";
  const bool ok = std::abs(res.slope - target) <= 0.1 &&
                  std::abs(res.slope_sq - 2.0 * target) <= 0.15;
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_figures(const Options& opt) {
  FigureConfig cfg;
  cfg.out_dir = opt.out_dir;
  cfg.n = opt.n;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  cfg.level = opt.level;
  const auto files = run_figures(cfg);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fracmc: Monte Carlo solver and diagnostics for time-fractional PDEs "
      "driven by isotropic stable processes"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // keep --h free for the step

  Options opt;
  if (const char* env_seed = std::getenv("FRACMC_SEED"))
    opt.seed = std::strtoull(env_seed, nullptr, 10);

  std::string command;
  for (const char* name :
       {"estimate", "bounds", "tail", "clt", "scaling", "bias-decay",
        "figures"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->set_help_flag("--help", "print help");
    auto add = [sub](const std::string& flag, auto& target,
                     const std::string& help) {
      sub->add_option(flag, target, help)->take_last();
    };
    add("--config", opt.config_file, "flat key=value config file (flags win)");
    add("--alpha", opt.alpha, "subordinator index in (0,1)");
    add("--beta", opt.beta, "stable index in (0,2]");
    add("--c", opt.c, "component scale, E exp(izX) = exp(-c|z|^beta)");
    add("--gamma", opt.gamma, "Hoelder exponent of g");
    add("--lip", opt.lip, "Hoelder constant of g");
    add("--growth", opt.growth, "growth exponent of phi");
    add("--dim", opt.dim, "dimension d");
    add("--a", opt.a, "initial time");
    add("--t", opt.t, "evaluation time");
    add("--x", opt.x, "start point, comma separated");
    add("--phi", opt.phi, "initial datum expression");
    add("--g", opt.g, "forcing expression (empty: g = 0)");
    add("--n", opt.n, "sample count");
    add("--h", opt.h, "step: number, auto:paper, auto:balanced");
    add("--seed", opt.seed, "rng seed (env FRACMC_SEED fallback)");
    add("--level", opt.level, "confidence level");
    add("--workers", opt.workers,
        "worker threads (0 = all; never changes results)");
    add("--out", opt.out_dir, "output directory");
    add("--reps", opt.reps, "replications (clt)");
    add("--q-lo", opt.q_lo, "tail window lower quantile");
    add("--q-hi", opt.q_hi, "tail window upper quantile");
    add("--abar-grid", opt.abar_grid, "scaling grid, lo:step:hi or comma list");
    add("--h-grid", opt.h_grid, "bias-decay step grid");
    add("--h-ref", opt.h_ref, "bias-decay reference step");
    add("--exponent", opt.scaling_exponent,
        "scaling exponent (default by configuration)");
    sub->callback([&command, name]() { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!opt.config_file.empty()) {
      // config values are injected before the original flags and every
      // option takes its last occurrence, so flags win
      std::map<std::string, std::string> kv;
      apply_config_file(opt.config_file, kv);
      std::vector<std::string> synth{command};
      for (const auto& [k, v] : kv) synth.push_back("--" + k + "=" + v);
      for (int i = 2; i < argc; ++i) synth.emplace_back(argv[i]);
      std::reverse(synth.begin(), synth.end());
      try {
        app.parse(synth);
      } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
      }
    }

    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(opt.out_dir);
    int rc = kExitConfig;
    if (command == "estimate") rc = cmd_estimate(opt);
    else if (command == "bounds") rc = cmd_bounds(opt);
    else if (command == "tail") rc = cmd_tail(opt);
    else if (command == "clt") rc = cmd_clt(opt);
    else if (command == "scaling") rc = cmd_scaling(opt);
    else if (command == "bias-decay") rc = cmd_bias_decay(opt);
    else if (command == "figures") rc = cmd_figures(opt);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_manifest(opt, command, wall);
    return rc;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (sample "
              << e.sample_index() << ")\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
