#include "roughpath/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "roughpath/averaging.hpp"
#include "roughpath/bdg.hpp"
#include "roughpath/error.hpp"
#include "roughpath/io.hpp"
#include "roughpath/ito_lemma.hpp"
#include "roughpath/parallel.hpp"
#include "roughpath/rde.hpp"
#include "roughpath/signature.hpp"
#include "roughpath/stochastic.hpp"

namespace rp::harness {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- helpers

double num(const json& c, const char* key) { return c.at(key).get<double>(); }
long long integer(const json& c, const char* key) { return c.at(key).get<long long>(); }
std::string str(const json& c, const char* key) { return c.at(key).get<std::string>(); }

std::size_t positive(const json& c, const char* key) {
  const auto v = integer(c, key);
  require(v >= 1, std::string(key) + " must be >= 1");
  return static_cast<std::size_t>(v);
}

std::vector<double> number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  require(!out.empty(), "empty list: '" + s + "'");
  return out;
}

// "3-8" or "3,5,7".
std::vector<int> level_list(const std::string& s) {
  std::vector<int> out;
  const auto dash = s.find('-');
  if (dash != std::string::npos) {
    const int a = std::stoi(s.substr(0, dash)), b = std::stoi(s.substr(dash + 1));
    require(a <= b, "bad level range: " + s);
    for (int m = a; m <= b; ++m) out.push_back(m);
  } else {
    for (double x : number_list(s)) out.push_back(static_cast<int>(x));
  }
  return out;
}

std::size_t steps_for(double horizon, double mesh) {
  require(horizon > 0.0 && mesh > 0.0 && mesh <= horizon, "need 0 < mesh <= T");
  return static_cast<std::size_t>(std::llround(horizon / mesh));
}

// Z_t = ∫ σ(s) dB_s with σ constant or σ(s) = sigma (1 + ½ sin(2πs/T)).
GridPath sample_martingale(const std::vector<double>& t, int d, double sigma, const std::string& vol,
                           RandomStream& rng) {
  require(vol == "constant" || vol == "sine", "vol must be 'constant' or 'sine'");
  const auto b = sample_brownian(t, d, rng);
  const auto w = static_cast<std::size_t>(d * d);
  std::vector<double> phi(t.size() * w, 0.0);
  const double horizon = t.back() - t.front();
  for (std::size_t i = 0; i < t.size(); ++i) {
    double s = sigma;
    if (vol == "sine") s *= 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * (t[i] - t.front()) / horizon);
    for (int k = 0; k < d; ++k) phi[i * w + static_cast<std::size_t>(k * d + k)] = s;
  }
  return martingale_from_phi(GridPath(t, d * d, std::move(phi)), b);
}

json uniform_grid_spec(double t1, std::size_t steps) {
  return json{{"t0", 0.0}, {"t1", t1}, {"steps", steps}};
}

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------- commands

RunResult cmd_signature(const json& c) {
  RunResult r;
  const int n = static_cast<int>(positive(c, "depth"));
  GridPath x;
  const auto input = str(c, "input");
  if (!input.empty()) {
    x = grid_path_from_table(CsvTable::read(input));
    r.inputs.push_back(input);
  } else {
    const auto steps = positive(c, "steps");
    RandomStream rng(static_cast<std::uint64_t>(integer(c, "seed")));
    x = sample_brownian(uniform_grid(0.0, num(c, "T"), steps), static_cast<int>(positive(c, "dim")), rng);
    r.files["path.csv"] = grid_path_table(x).to_string();
    r.grids["path"] = uniform_grid_spec(num(c, "T"), steps);
  }
  const auto s = pl_signature(x, n);
  r.files["signature.csv"] = group_path_table(s).to_string();
  const auto& last = s[s.size() - 1];
  for (int k = 1; k <= n; ++k)
    r.report.push_back("level " + std::to_string(k) + " norm " + fmt(level_norm(last, k)));
  return r;
}

bool is_group_table(const CsvTable& t) { return t.header().size() >= 2 && t.header()[1].rfind("L1_", 0) == 0; }

RunResult cmd_pvar(const json& c) {
  RunResult r;
  const auto input = str(c, "input");
  require(!input.empty(), "pvar needs --input");
  const double p = num(c, "p");
  require(p >= 1.0, "p must be >= 1");
  r.inputs.push_back(input);
  const auto table = CsvTable::read(input);
  CsvTable out({"quantity", "value"});
  double value = 0.0;
  if (is_group_table(table)) {
    const auto g = group_path_from_table(table);
    value = p_variation(g, p);
  } else {
    value = p_variation(grid_path_from_table(table), p);
  }
  out.add_row({"p_variation", fmt(value)});
  r.report.push_back("p_variation " + fmt(value));
  const auto other = str(c, "compare");
  if (!other.empty()) {
    r.inputs.push_back(other);
    const auto b = CsvTable::read(other);
    require(is_group_table(table) && is_group_table(b), "d_p needs two group-path csv files");
    const double dp = dp_distance(group_path_from_table(table), group_path_from_table(b), p);
    out.add_row({"d_p", fmt(dp)});
    r.report.push_back("d_p " + fmt(dp));
  }
  r.files["pvar.csv"] = out.to_string();
  return r;
}

RunResult cmd_lift(const json& c) {
  RunResult r;
  const auto steps = positive(c, "steps");
  const int d = static_cast<int>(positive(c, "dim"));
  const auto t = uniform_grid(0.0, num(c, "T"), steps);
  RandomStream rng(static_cast<std::uint64_t>(integer(c, "seed")));
  const auto z = sample_martingale(t, d, num(c, "sigma"), str(c, "vol"), rng);
  r.grids["path"] = uniform_grid_spec(num(c, "T"), steps);
  r.files["path.csv"] = grid_path_table(z).to_string();
  r.files["ito.csv"] = group_path_table(ito_lift(z)).to_string();
  r.files["strat.csv"] = group_path_table(strat_lift(z)).to_string();
  r.files["bracket.csv"] = grid_path_table(bracket_fine(z).as_path()).to_string();
  const auto m = integer(c, "partition_level");
  if (m >= 0) {
    const auto idx = dyadic_indices(steps, static_cast<int>(m));
    std::vector<double> part;
    for (auto i : idx) part.push_back(t[i]);
    const auto pl = pl_ito_lift(z, part);
    r.files["pl_ito.csv"] = group_path_table(pl).to_string();
    const double dp = dp_distance(pl, ito_lift(z), num(c, "p"));
    r.report.push_back("d_p(pl_ito, ito) " + fmt(dp));
  }
  r.report.push_back("Z_T - Z_0 " + fmt(z.increment(0, z.size() - 1)[0]));
  return r;
}

StepScheme parse_scheme(const std::string& s) {
  if (s == "increment_euler") return StepScheme::increment_euler;
  if (s == "ode_approx") return StepScheme::ode_approx;
  throw InvalidArgument("unknown scheme: " + s);
}

RunResult cmd_rde(const json& c) {
  RunResult r;
  const int d = static_cast<int>(positive(c, "dim"));
  const auto vf = make_field(str(c, "field"), d, d, num(c, "scale"));
  const double horizon = num(c, "T");
  const auto steps = steps_for(horizon, num(c, "mesh"));
  const auto t = uniform_grid(0.0, horizon, steps);
  const auto paths = positive(c, "paths");
  const auto driver = str(c, "driver");
  require(driver == "ito" || driver == "strat", "driver must be 'ito' or 'strat'");
  RdeOptions opts;
  opts.scheme = parse_scheme(str(c, "scheme"));
  const std::vector<double> y0(static_cast<std::size_t>(d), num(c, "y0"));
  double lin = 0.0;
  const bool closed = scalar_linear_coefficient(vf, lin);
  const auto seed = static_cast<std::uint64_t>(integer(c, "seed"));

  std::vector<double> yT(paths), cf(paths, std::nan("")), rel(paths, std::nan("")), emT(paths),
      sup(paths);
  parallel_for(paths, [&](std::size_t i) {
    RandomStream rng(seed, {i});
    const auto b = sample_brownian(t, d, rng);
    const auto gamma = driver == "ito" ? ito_lift(b) : strat_lift(b);
    const auto y = solve_first_level(gamma, vf, y0, opts);
    const auto em = sde_euler_maruyama(b, vf, y0, opts.blowup);
    double s = 0.0;
    for (std::size_t k = 0; k < y.values().size(); ++k)
      s = std::max(s, std::abs(y.values()[k] - em.values()[k]));
    sup[i] = s;
    yT[i] = y.at(y.size() - 1)[0];
    emT[i] = em.at(em.size() - 1)[0];
    if (closed) {
      const double bt = b.at(b.size() - 1)[0];
      const double expo = driver == "ito" ? lin * bt - 0.5 * lin * lin * horizon : lin * bt;
      cf[i] = y0[0] * std::exp(expo);
      rel[i] = std::abs(yT[i] - cf[i]) / std::abs(cf[i]);
    }
  });
  CsvTable table({"path", "y_T", "closed_form", "rel_err", "em_T", "sup_diff_em"});
  for (std::size_t i = 0; i < paths; ++i)
    table.add_row({std::to_string(i), fmt(yT[i]), fmt(cf[i]), fmt(rel[i]), fmt(emT[i]), fmt(sup[i])});
  r.files["rde.csv"] = table.to_string();
  CsvTable summary({"statistic", "value"});
  if (closed) {
    const double m = median(rel);
    summary.add_row({"median_rel_err", fmt(m)});
    r.report.push_back("median relative error vs closed form " + fmt(m));
  }
  const double ms = median(sup);
  summary.add_row({"median_sup_diff_em", fmt(ms)});
  r.report.push_back("median sup difference vs Euler-Maruyama " + fmt(ms));
  r.files["summary.csv"] = summary.to_string();
  r.grids["driver"] = uniform_grid_spec(horizon, steps);
  return r;
}

RunResult cmd_avg(const json& c) {
  RunResult r;
  const int d = static_cast<int>(positive(c, "dim"));
  const auto vf = make_field(str(c, "field"), d, d, num(c, "scale"));
  const double horizon = num(c, "T");
  const auto steps = positive(c, "steps");
  const auto t = uniform_grid(0.0, horizon, steps);
  const int n = static_cast<int>(positive(c, "depth"));
  const auto seed = static_cast<std::uint64_t>(integer(c, "seed"));
  const auto driver = str(c, "driver");
  const auto noise = str(c, "noise");
  const auto mode = str(c, "mode");
  require(driver == "trivial" || driver == "strat", "driver must be 'trivial' or 'strat'");
  require(noise == "bm" || noise == "zero" || noise == "ztilde", "noise must be 'bm', 'zero' or 'ztilde'");
  require(mode == "closed-form" || mode == "monte-carlo", "mode must be 'closed-form' or 'monte-carlo'");

  GridPath z;
  if (driver == "strat" || noise == "ztilde") {
    RandomStream rng(seed, {0xD81FE5ULL});
    z = sample_martingale(t, d, num(c, "sigma"), str(c, "vol"), rng);
  }
  const RoughPathGrid gamma = driver == "trivial" ? GroupPath::identity(t, d, 2) : strat_lift(z);
  const auto mc = positive(c, "mc");
  const double ns = num(c, "noise_scale");

  SchemeConfig cfg;
  cfg.depth = n;
  cfg.mc_samples = mc;
  cfg.min_mc_samples = static_cast<std::size_t>(integer(c, "min_mc"));
  cfg.expectation_mode =
      mode == "closed-form" ? ExpectationMode::closed_form_linear : ExpectationMode::monte_carlo;
  cfg.rde.scheme = parse_scheme(str(c, "scheme"));
  BracketGrid bracket = BracketGrid::zeros(t, d);
  if (noise == "ztilde") {
    cfg.noise = ztilde_noise(z, seed, mc);
    bracket = bracket_fine(z);
  } else {
    cfg.noise = NoiseSpec::scaled_identity(t, d, noise == "bm" ? ns : 0.0, seed, mc);
    if (noise == "bm") {
      std::vector<double> q(t.size() * static_cast<std::size_t>(d * d), 0.0);
      for (std::size_t i = 0; i < t.size(); ++i)
        for (int k = 0; k < d; ++k) q[i * static_cast<std::size_t>(d * d) + static_cast<std::size_t>(k * d + k)] = ns * ns * t[i];
      bracket = BracketGrid(t, d, std::move(q));
    }
  }
  TruncatedTensor xi(d, n);
  for (double& v : xi.level(1)) v = num(c, "y0");

  const auto m = static_cast<int>(integer(c, "m"));
  for (auto i : dyadic_indices(steps, m)) cfg.partition.push_back(t[i]);
  const auto res = concat_discounted(gamma, vf, xi, cfg);
  r.files["avg.csv"] = group_path_table(GroupPath(cfg.partition, res.values)).to_string();
  CsvTable diag({"interval", "t0", "t1", "max_se", "driver_moment"});
  for (std::size_t j = 0; j < res.diagnostics.size(); ++j) {
    const auto& g = res.diagnostics[j];
    diag.add_row({std::to_string(j), fmt(g.t0), fmt(g.t1), fmt(g.max_se), fmt(g.driver_moment)});
  }
  r.files["diagnostics.csv"] = diag.to_string();
  const auto& last = res.values.back();
  r.report.push_back("final level-1 value " + fmt(last.level(1)[0]));
  double lin = 0.0;
  if (driver == "trivial" && noise == "bm" && scalar_linear_coefficient(vf, lin)) {
    const double target = num(c, "y0") * std::exp(-0.5 * lin * lin * ns * ns * horizon);
    r.report.push_back("Ito closed form xi*exp(-c^2 T/2) " + fmt(target));
    r.report.push_back("difference " + fmt(last.level(1)[0] - target));
  }

  const auto study = str(c, "study");
  if (!study.empty()) {
    const auto levels = level_list(study);
    const auto ref = ito_reference(gamma, bracket, vf, xi, cfg.rde);
    const auto rows = convergence_study(gamma, vf, xi, cfg, levels, ref);
    std::vector<std::string> h{"m", "intervals", "error"};
    for (int k = 1; k <= n; ++k) h.push_back("level" + std::to_string(k) + "_error");
    h.push_back("max_se");
    CsvTable conv(h);
    for (const auto& row : rows) {
      std::vector<std::string> cells{std::to_string(row.m), std::to_string(row.intervals), fmt(row.error)};
      for (double e : row.level_error) cells.push_back(fmt(e));
      cells.push_back(fmt(row.max_se));
      conv.add_row(std::move(cells));
      r.report.push_back("m=" + std::to_string(row.m) + " error " + fmt(row.error));
    }
    r.files["convergence.csv"] = conv.to_string();
  }
  r.grids["driver"] = uniform_grid_spec(horizon, steps);
  r.grids["partition_level"] = m;
  return r;
}

RunResult cmd_itolemma(const json& c) {
  RunResult r;
  const int d = static_cast<int>(positive(c, "dim"));
  const auto f = make_map(str(c, "map"), d, static_cast<int>(positive(c, "e")));
  const double horizon = num(c, "T");
  const auto steps = steps_for(horizon, num(c, "mesh"));
  const auto halvings = static_cast<int>(integer(c, "halvings"));
  require(halvings >= 0 && steps % (std::size_t{1} << halvings) == 0,
          "steps must be divisible by 2^halvings");
  const auto t = uniform_grid(0.0, horizon, steps);
  const auto paths = positive(c, "paths");
  const auto seed = static_cast<std::uint64_t>(integer(c, "seed"));
  const auto levels = static_cast<std::size_t>(halvings) + 1;
  std::vector<std::vector<double>> res1(levels, std::vector<double>(paths)),
      res2(levels, std::vector<double>(paths));
  parallel_for(paths, [&](std::size_t i) {
    RandomStream rng(seed, {i});
    const auto z = sample_martingale(t, d, num(c, "sigma"), "constant", rng);
    for (std::size_t h = 0; h < levels; ++h) {
      // h = 0 is the coarsest grid, h = halvings the finest.
      const std::size_t stride = std::size_t{1} << (levels - 1 - h);
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k <= steps; k += stride) idx.push_back(k);
      const auto rep = verify_ito_lemma(f, restrict_to(z, idx));
      res1[h][i] = rep.level1;
      res2[h][i] = rep.level2;
    }
  });
  CsvTable out({"mesh", "level", "median", "mean", "se", "paths"});
  for (std::size_t h = 0; h < levels; ++h) {
    const double mesh = horizon / static_cast<double>(steps >> (levels - 1 - h));
    for (int lv = 1; lv <= 2; ++lv) {
      const auto& v = lv == 1 ? res1[h] : res2[h];
      const auto ms = mean_se(v);
      out.add_row({fmt(mesh), std::to_string(lv), fmt(median(v)), fmt(ms.mean), fmt(ms.se),
                   std::to_string(paths)});
    }
    r.report.push_back("mesh " + fmt(mesh) + " median level-1 residual " + fmt(median(res1[h])));
  }
  r.files["residuals.csv"] = out.to_string();
  r.grids["path"] = uniform_grid_spec(horizon, steps);
  return r;
}

RunResult cmd_bdg(const json& c) {
  RunResult r;
  BdgConfig cfg;
  cfg.p = num(c, "p");
  cfg.q = num(c, "q");
  cfg.n = static_cast<int>(positive(c, "n"));
  cfg.paths = positive(c, "paths");
  cfg.min_paths = static_cast<std::size_t>(integer(c, "min_paths"));
  const auto steps = positive(c, "steps");
  const int d = static_cast<int>(positive(c, "dim"));
  const auto seed = static_cast<std::uint64_t>(integer(c, "seed"));
  CsvTable out({"horizon", "scale", "n", "p", "q", "paths", "sig_mean", "sig_se", "bracket_mean",
                "bracket_se", "endpoint_mean", "endpoint_se", "ratio", "ratio_se", "endpoint_ratio",
                "endpoint_ratio_se"});
  for (double h : number_list(str(c, "horizons"))) {
    for (double s : number_list(str(c, "scales"))) {
      cfg.horizon = h;
      const auto rep = bdg_ratio_check(brownian_generator(d, steps, s, seed), cfg);
      out.add_row({fmt(h), fmt(s), std::to_string(rep.n), fmt(rep.p), fmt(rep.q), std::to_string(rep.paths),
                   fmt(rep.signature_pvar.mean), fmt(rep.signature_pvar.se), fmt(rep.bracket.mean),
                   fmt(rep.bracket.se), fmt(rep.endpoint.mean), fmt(rep.endpoint.se), fmt(rep.ratio),
                   fmt(rep.ratio_se), fmt(rep.endpoint_ratio), fmt(rep.endpoint_ratio_se)});
      r.report.push_back("T=" + fmt(h) + " scale=" + fmt(s) + " ratio " + fmt(rep.ratio) + " +- " +
                         fmt(rep.ratio_se) + ", endpoint ratio " + fmt(rep.endpoint_ratio) + " +- " +
                         fmt(rep.endpoint_ratio_se));
    }
  }
  r.files["bdg.csv"] = out.to_string();
  r.grids["steps_per_path"] = steps;
  return r;
}

using Runner = RunResult (*)(const json&);

struct Command {
  json defaults;
  Runner run;
  const char* help;
};

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"signature",
       {json{{"input", ""}, {"depth", 3}, {"dim", 2}, {"steps", 100}, {"T", 1.0}, {"seed", 1}},
        cmd_signature, "signature of a piecewise-linear path (csv input or sampled Brownian)"}},
      {"pvar", {json{{"input", ""}, {"p", 2.5}, {"compare", ""}}, cmd_pvar,
                "p-variation of a stored path, d_p against --compare"}},
      {"lift",
       {json{{"dim", 1}, {"steps", 1024}, {"T", 1.0}, {"sigma", 1.0}, {"vol", "constant"},
             {"partition_level", -1}, {"p", 2.5}, {"seed", 1}},
        cmd_lift, "sample a martingale and write its Ito/Stratonovich lifts and bracket"}},
      {"rde",
       {json{{"field", "gbm"}, {"scale", 1.0}, {"dim", 1}, {"driver", "ito"}, {"mesh", 1e-4}, {"T", 1.0},
             {"paths", 100}, {"y0", 1.0}, {"scheme", "increment_euler"}, {"seed", 1}},
        cmd_rde, "solve RDEs over lifted Brownian paths and compare with closed forms / Euler-Maruyama"}},
      {"avg",
       {json{{"field", "linear1d"}, {"scale", 1.0}, {"dim", 1}, {"driver", "trivial"}, {"noise", "bm"},
             {"noise_scale", 1.0}, {"mode", "closed-form"}, {"depth", 1}, {"T", 1.0}, {"steps", 256},
             {"m", 4}, {"study", ""}, {"mc", 1000}, {"min_mc", 100}, {"sigma", 1.0}, {"vol", "sine"},
             {"y0", 1.0}, {"scheme", "increment_euler"}, {"seed", 1}},
        cmd_avg, "averaging scheme and its convergence study"}},
      {"itolemma",
       {json{{"map", "square"}, {"dim", 1}, {"e", 1}, {"T", 1.0}, {"mesh", 1e-4}, {"halvings", 3},
             {"paths", 100}, {"sigma", 1.0}, {"seed", 1}},
        cmd_itolemma, "pathwise Ito lemma residuals under mesh refinement"}},
      {"bdg",
       {json{{"p", 2.5}, {"q", 2.0}, {"n", 2}, {"paths", 1000}, {"min_paths", 1000}, {"horizons", "0.5,1,2"},
             {"scales", "1"}, {"steps", 128}, {"dim", 1}, {"seed", 1}},
        cmd_bdg, "BDG moment ratios"}},
  };
  return table;
}

// ---------------------------------------------------------------- config

json convert_like(const json& like, const std::string& raw, const std::string& key) {
  try {
    if (like.is_boolean()) {
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      throw InvalidArgument("");
    }
    if (like.is_number_integer()) {
      std::size_t pos = 0;
      const long long v = std::stoll(raw, &pos);
      if (pos != raw.size()) throw InvalidArgument("");
      return v;
    }
    if (like.is_number()) return parse_double(raw);
    return raw;
  } catch (const std::exception&) {
    throw InvalidArgument("bad value for --" + key + ": '" + raw + "'");
  }
}

void check_type(const json& like, json& v, const std::string& key) {
  if (like.is_number_integer() && v.is_number_float()) {
    const double x = v.get<double>();
    require(x == std::floor(x), "config key '" + key + "' must be an integer");
    v = static_cast<long long>(x);
  }
  const bool ok = (like.is_number() && v.is_number()) || (like.is_string() && v.is_string()) ||
                  (like.is_boolean() && v.is_boolean());
  require(ok, "config key '" + key + "' has the wrong type");
  if (like.is_number_float()) v = v.get<double>();
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

void usage(std::ostream& os) {
  os << "usage: roughpath <command> [options]\n\ncommands:\n";
  for (const auto& [name, cmd] : commands()) os << "  " << name << "  " << cmd.help << '\n';
  os << "  reproduce  replay a run manifest (--manifest FILE)\n"
     << "\ncommon options: --config FILE (json), --out DIR; output defaults to $" << kOutputDirEnv
     << "/<command> or runs/<command>\n";
}

fs::path default_output(const std::string& command) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env) / command;
  return fs::path("runs") / command;
}

std::string first_difference(const std::string& expected, const std::string& actual) {
  std::istringstream a(expected), b(actual);
  std::string la, lb;
  for (std::size_t row = 0;; ++row) {
    const bool ga = static_cast<bool>(std::getline(a, la));
    const bool gb = static_cast<bool>(std::getline(b, lb));
    if (!ga && !gb) return "trailing bytes differ";
    if (ga != gb) return "row " + std::to_string(row) + ": line count differs";
    if (la == lb) continue;
    std::istringstream ca(la), cb(lb);
    std::string xa, xb;
    for (std::size_t col = 0;; ++col) {
      const bool ha = static_cast<bool>(std::getline(ca, xa, ','));
      const bool hb = static_cast<bool>(std::getline(cb, xb, ','));
      if (!ha && !hb) return "row " + std::to_string(row) + ": differs";
      if (ha != hb || xa != xb)
        return "row " + std::to_string(row) + ", column " + std::to_string(col) + ": expected '" +
               (ha ? xa : "") + "', got '" + (hb ? xb : "") + "'";
    }
  }
}

std::string inputs_hash(const json& config, const std::vector<std::string>& inputs, json& listing) {
  std::string acc = config.dump();
  listing = json::array();
  for (const auto& f : inputs) {
    const auto h = git_blob_hash(read_text(f));
    listing.push_back(json{{"path", f}, {"hash", h}});
    acc += '\n' + h;
  }
  return git_blob_hash(acc);
}

}  // namespace

const std::map<std::string, json>& command_defaults() {
  static const std::map<std::string, json> out = [] {
    std::map<std::string, json> m;
    for (const auto& [k, v] : commands()) m.emplace(k, v.defaults);
    return m;
  }();
  return out;
}

RunResult run_command(const std::string& command, const json& config) {
  const auto it = commands().find(command);
  if (it == commands().end()) throw InvalidArgument("unknown command: " + command);
  return it->second.run(config);
}

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

json write_run(const fs::path& dir, const std::string& command, const json& config,
               const json& provenance, const RunResult& result, double seconds) {
  fs::create_directories(dir);
  json outputs = json::array();
  for (const auto& [name, text] : result.files) {
    write_text(dir / name, text);
    outputs.push_back(json{{"file", name}, {"hash", git_blob_hash(text)}});
  }
  json inputs;
  const auto hash = inputs_hash(config, result.inputs, inputs);
  json manifest{{"command", command},
                {"config", config},
                {"provenance", provenance},
                {"seed", config.contains("seed") ? config["seed"] : json(nullptr)},
                {"grids", result.grids},
                {"input_hash", hash},
                {"inputs", inputs},
                {"outputs", outputs},
                {"duration_seconds", seconds}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

int run_reproduce(const fs::path& manifest_file, std::ostream& out, std::ostream& err) {
  json manifest;
  try {
    manifest = json::parse(read_text(manifest_file));
  } catch (const std::exception& e) {
    err << "cannot read manifest: " << e.what() << '\n';
    return kInvalidConfig;
  }
  if (!manifest.contains("command") || !manifest.contains("config") || !manifest.contains("outputs")) {
    err << "manifest lacks command/config/outputs\n";
    return kInvalidConfig;
  }
  const auto command = manifest["command"].get<std::string>();
  json config = manifest["config"];
  if (manifest.contains("seed") && !manifest["seed"].is_null()) config["seed"] = manifest["seed"];
  if (manifest.contains("inputs")) {
    for (const auto& in : manifest["inputs"]) {
      const auto path = in.at("path").get<std::string>();
      if (!fs::exists(path)) {
        err << "missing input file: " << path << '\n';
        return kInvalidConfig;
      }
    }
  }
  RunResult result;
  try {
    result = run_command(command, config);
  } catch (const Diverged& e) {
    err << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }
  const fs::path dir = manifest_file.parent_path();
  std::size_t checked = 0;
  for (const auto& o : manifest["outputs"]) {
    const auto name = o.at("file").get<std::string>();
    const auto it = result.files.find(name);
    if (it == result.files.end()) {
      err << "replay did not produce " << name << '\n';
      return kReplayMismatch;
    }
    std::string stored;
    try {
      stored = read_text(dir / name);
    } catch (const std::exception&) {
      err << "stored output missing: " << (dir / name).string() << '\n';
      return kReplayMismatch;
    }
    if (stored != it->second) {
      err << "mismatch in " << name << ", " << first_difference(stored, it->second) << '\n';
      return kReplayMismatch;
    }
    ++checked;
  }
  if (checked != result.files.size()) {
    err << "replay produced outputs not listed in the manifest\n";
    return kReplayMismatch;
  }
  out << "replay identical: " << checked << " file(s)\n";
  return kOk;
}

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    usage(err);
    return kUsage;
  }
  const std::string command = argv[1];
  if (command == "-h" || command == "--help" || command == "help") {
    usage(out);
    return kOk;
  }
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 2; --i) args.emplace_back(argv[i]);  // CLI11 wants reversed order

  if (command == "reproduce") {
    CLI::App app("replay a run manifest", "roughpath reproduce");
    std::string manifest;
    app.add_option("manifest,--manifest", manifest, "manifest.json of a previous run")->required();
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << e.what() << '\n';
      return kInvalidConfig;
    }
    return run_reproduce(manifest, out, err);
  }

  const auto it = commands().find(command);
  if (it == commands().end()) {
    err << "unknown command: " << command << "\n\n";
    usage(err);
    return kUsage;
  }
  const json& defaults = it->second.defaults;
  CLI::App app(it->second.help, "roughpath " + command);
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [key, value] : defaults.items()) {
    std::string desc = "default: " + (value.is_string() ? value.get<std::string>() : value.dump());
    opts[key] = app.add_option("--" + flag_name(key), raw[key], desc);
  }
  std::string config_file, out_dir;
  app.add_option("--config", config_file, "json config file (flags take precedence)");
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInvalidConfig;
  }

  json config = defaults;
  json provenance = json::object();
  for (const auto& [key, value] : defaults.items()) provenance[key] = "default";
  try {
    if (!config_file.empty()) {
      const auto file = json::parse(read_text(config_file));
      require(file.is_object(), "config file must hold a json object");
      for (auto [key, value] : file.items()) {
        require(defaults.contains(key), "unknown config key: " + key);
        json v = value;
        check_type(defaults[key], v, key);
        config[key] = v;
        provenance[key] = "config";
      }
    }
    for (const auto& [key, opt] : opts) {
      if (opt->count() == 0) continue;
      config[key] = convert_like(defaults[key], raw[key], key);
      provenance[key] = "cli";
    }
  } catch (const std::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  try {
    result = run_command(command, config);
  } catch (const Diverged& e) {
    err << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path dir = out_dir.empty() ? default_output(command) : fs::path(out_dir);
  try {
    write_run(dir, command, config, provenance, result, secs);
  } catch (const std::exception& e) {
    err << "cannot write outputs: " << e.what() << '\n';
    return kInvalidConfig;
  }
  for (const auto& line : result.report) out << line << '\n';
  out << "outputs written to " << dir.string() << '\n';
  return kOk;
}

}  // namespace rp::harness
