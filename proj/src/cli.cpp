#include "udsp/cli.hpp"

#include <charconv>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "udsp/acceptance.hpp"
#include "udsp/errors.hpp"
#include "udsp/filters.hpp"
#include "udsp/io.hpp"
#include "udsp/predictor.hpp"
#include "udsp/spectral.hpp"

namespace udsp::cli {

namespace {

using nlohmann::json;

// Options bound to variables, so that values missing on the command line can
// be filled from a JSON config and the resolved set echoed back.
class Bindings {
public:
  template <class T>
  auto add(CLI::App *app, const std::string &flag, T &var, const std::string &desc)
      -> CLI::Option * {
    CLI::Option *opt = nullptr;
    if constexpr (std::is_same_v<T, bool>)
      opt = app->add_flag(flag, var, desc);
    else
      opt = app->add_option(flag, var, desc)->capture_default_str();
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    entries_.push_back({opt, key, [&var](const json &j) { var = j.get<T>(); },
                        [&var] { return json(var); }});
    return opt;
  }

  void apply_config(const json &cfg) {
    for (auto &e : entries_) {
      if (e.opt->count() > 0 || !cfg.contains(e.key))
        continue;
      try {
        e.from(cfg.at(e.key));
      } catch (const json::exception &ex) {
        throw ConfigError("config value '" + e.key + "' has the wrong type: " + ex.what());
      }
    }
  }

  [[nodiscard]] auto resolved() const -> json {
    json j = json::object();
    for (const auto &e : entries_)
      j[e.key] = e.to();
    return j;
  }

private:
  struct Entry {
    CLI::Option *opt;
    std::string key;
    std::function<void(const json &)> from;
    std::function<json()> to;
  };
  std::vector<Entry> entries_;
};

auto parse_number(const std::string &s, const std::string &what) -> double {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("cannot parse '" + s + "' in " + what);
  return v;
}

auto split(const std::string &s, char sep) -> std::vector<std::string> {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    parts.push_back(cur);
  return parts;
}

struct Window {
  double lo, hi;
};

auto parse_window(const std::string &s) -> Window {
  const auto parts = split(s, ':');
  if (parts.size() != 2)
    throw ConfigError("window must be lo:hi, got '" + s + "'");
  Window w{parse_number(parts[0], "window"), parse_number(parts[1], "window")};
  if (!(w.lo < w.hi))
    throw ConfigError("window needs lo < hi, got '" + s + "'");
  return w;
}

struct GridSpec {
  double lo, hi;
  std::size_t n;
};

auto parse_grid(const std::string &s) -> GridSpec {
  const auto parts = split(s, ':');
  if (parts.size() != 3)
    throw ConfigError("grid must be lo:hi:n, got '" + s + "'");
  const double n = parse_number(parts[2], "grid");
  if (!(n >= 2.0) || n != std::floor(n))
    throw ConfigError("grid size must be an integer >= 2, got '" + parts[2] + "'");
  return {parse_number(parts[0], "grid"), parse_number(parts[1], "grid"),
          static_cast<std::size_t>(n)};
}

auto parse_list(const std::string &s) -> std::vector<double> {
  std::vector<double> v;
  for (const auto &p : split(s, ','))
    if (!p.empty())
      v.push_back(parse_number(p, "list"));
  return v;
}

auto envelope(const std::string &command, const json &config) -> json {
  return json{{"version", kVersion}, {"command", command}, {"config", config}};
}

void emit_json(const std::string &path, const json &j, std::ostream &out) {
  if (path.empty() || path == "-")
    out << j.dump(2) << "\n";
  else
    write_json(path, j);
}

auto require(const std::string &value, const std::string &flag) -> const std::string & {
  if (value.empty())
    throw ConfigError(flag + " is required");
  return value;
}

auto ends_with(const std::string &s, const std::string &suffix) -> bool {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Symbolic signal from JSON, or sampled signal from a t,re,im CSV.
struct LoadedSignal {
  std::optional<SymbolicSignal> symbolic;
  std::optional<SampledSignal> sampled;

  [[nodiscard]] auto as_view() const -> SignalView {
    return symbolic ? view(*symbolic) : view(*sampled);
  }
};

auto load_signal(const std::string &path) -> LoadedSignal {
  LoadedSignal s;
  if (ends_with(path, ".csv"))
    s.sampled = read_sampled_csv(path);
  else
    s.symbolic = read_signal(path);
  return s;
}

// Each subcommand registers its options and a runner executed after parsing.
struct Command {
  CLI::App *app = nullptr;
  Bindings bind;
  std::string config_path;
  std::function<int(const json &resolved)> body;
};

void add_config_flag(Command &c) {
  c.app->add_option("--config", c.config_path, "JSON config file; flags override its values");
}

auto load_config(const Command &c) -> json {
  if (c.config_path.empty())
    return json::object();
  auto cfg = read_json(c.config_path);
  const auto name = c.app->get_name();
  if (cfg.contains(name) && cfg[name].is_object())
    return cfg[name];
  if (!cfg.is_object())
    throw ConfigError("config file must hold a JSON object");
  return cfg;
}

} // namespace

auto run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) -> int {
  CLI::App app{"Filtering and prediction for polynomially growing signals", "udsp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // ---- design-filter
  auto design = std::make_unique<Command>();
  struct {
    std::string kind = "lowpass", out_path, meta;
    double p = 1.0, q = 2.0, alpha = 0.0, omega_max = 0.0;
    int d = 0;
    std::size_t n = 65536;
  } df;
  design->app = app.add_subcommand("design-filter", "synthesize a low/high-pass kernel to CSV");
  add_config_flag(*design);
  design->bind.add(design->app, "--kind", df.kind, "lowpass|highpass (lp|hp)");
  design->bind.add(design->app, "--p", df.p, "passband edge");
  design->bind.add(design->app, "--q", df.q, "stopband edge");
  design->bind.add(design->app, "--d", df.d, "transition smoothness 1|2 (0 = select from alpha)");
  design->bind.add(design->app, "--alpha", df.alpha, "weight exponent");
  design->bind.add(design->app, "--omega-max", df.omega_max, "frequency truncation (0 = 8q)");
  design->bind.add(design->app, "--n", df.n, "kernel size (power of two)");
  design->bind.add(design->app, "--out", df.out_path, "kernel CSV path");
  design->bind.add(design->app, "--meta", df.meta, "metadata JSON path (default <out>.json)");
  design->body = [&](const json &cfg) {
    FilterSpec spec{df.p, df.q, df.d == 0 ? select_smoothness(df.alpha).d : df.d,
                    filter_kind_from_string(df.kind), df.alpha};
    spec.validate();
    FilterOptions fo;
    fo.omega_max = df.omega_max;
    fo.kernel_n = df.n;
    const auto k = design_filter(spec, fo);
    const auto norm = rho_l1_norm(k, Weight::polynomial(spec.alpha));
    if (norm.diverging)
      throw DivergenceError("filter kernel weighted-L1 norm diverges for alpha = " +
                            std::to_string(spec.alpha));
    write_csv(require(df.out_path, "--out"), k);
    auto j = envelope("design-filter", cfg);
    j["p"] = spec.p;
    j["q"] = spec.q;
    j["d"] = spec.d;
    j["kind"] = to_string(spec.kind);
    j["alpha"] = spec.alpha;
    j["rho_l1"] = norm.norm;
    j["Omega_max"] = k.omega_max;
    j["n"] = k.size();
    j["delta"] = k.delta.real();
    j["leakage"] = k.leakage;
    j["warnings"] = k.warnings;
    write_json(df.meta.empty() ? df.out_path + ".json" : df.meta, j);
    return kExitOk;
  };

  // ---- apply-filter
  auto apply = std::make_unique<Command>();
  struct {
    std::string filter, signal, window = "-20:20", out_path, report, kind = "lowpass";
    double p = 1.0, q = 2.0, alpha = 0.0, omega_max = 0.0;
    int d = 2;
    std::size_t n = 4001, kernel_n = 65536;
    bool no_gap_test = false;
  } af;
  apply->app = app.add_subcommand("apply-filter", "filter a symbolic signal and verify the output gap");
  add_config_flag(*apply);
  apply->bind.add(apply->app, "--filter", af.filter, "FilterSpec JSON (overrides --kind/--p/--q/--d/--alpha)");
  apply->bind.add(apply->app, "--kind", af.kind, "lowpass|highpass");
  apply->bind.add(apply->app, "--p", af.p, "passband edge");
  apply->bind.add(apply->app, "--q", af.q, "stopband edge");
  apply->bind.add(apply->app, "--d", af.d, "transition smoothness 1|2");
  apply->bind.add(apply->app, "--alpha", af.alpha, "weight exponent");
  apply->bind.add(apply->app, "--signal", af.signal, "signal JSON");
  apply->bind.add(apply->app, "--window", af.window, "output window lo:hi");
  apply->bind.add(apply->app, "--n", af.n, "output samples");
  apply->bind.add(apply->app, "--omega-max", af.omega_max, "frequency truncation (0 = 8q)");
  apply->bind.add(apply->app, "--kernel-n", af.kernel_n, "kernel size");
  apply->bind.add(apply->app, "--out", af.out_path, "output CSV");
  apply->bind.add(apply->app, "--report", af.report, "report JSON (default <out>.json)");
  apply->bind.add(apply->app, "--no-gap-test", af.no_gap_test, "skip output gap verification");
  apply->body = [&](const json &cfg) {
    FilterSpec spec{af.p, af.q, af.d, filter_kind_from_string(af.kind), af.alpha};
    if (!af.filter.empty())
      spec = read_json(af.filter).get<FilterSpec>();
    const auto x = read_signal(require(af.signal, "--signal"));
    const auto w = parse_window(af.window);
    FilterOptions fo;
    fo.omega_max = af.omega_max;
    fo.kernel_n = af.kernel_n;
    fo.run_gap_test = !af.no_gap_test;
    const auto res = apply_filter(spec, x, w.lo, w.hi, af.n, fo);
    write_csv(require(af.out_path, "--out"), res.y);
    auto j = envelope("apply-filter", cfg);
    j["filter"] = spec;
    j["rho_l1"] = res.kernel_norm.norm;
    if (res.gap_report)
      j["gap_report"] = *res.gap_report;
    write_json(af.report.empty() ? af.out_path + ".json" : af.report, j);
    return kExitOk;
  };

  // ---- gap-test
  auto gap = std::make_unique<Command>();
  struct {
    std::string signal, kind = "exterior", out_path;
    double edge = 1.0, alpha = -1.0, T = 0.0, tol = kGapTolerance;
  } gt;
  gap->app = app.add_subcommand("gap-test", "test a claimed spectrum gap with a probe bank");
  add_config_flag(*gap);
  gap->bind.add(gap->app, "--signal", gt.signal, "signal JSON or t,re,im CSV");
  gap->bind.add(gap->app, "--gap-kind", gt.kind, "exterior (R minus [-edge,edge]) | interior ((-edge,edge))");
  gap->bind.add(gap->app, "--edge", gt.edge, "gap edge");
  gap->bind.add(gap->app, "--alpha", gt.alpha, "weight exponent for the norm (negative = growth order)");
  gap->bind.add(gap->app, "--T", gt.T, "time truncation (0 = automatic)");
  gap->bind.add(gap->app, "--tol", gt.tol, "gap tolerance");
  gap->bind.add(gap->app, "--out", gt.out_path, "report JSON (stdout if omitted)");
  gap->body = [&](const json &cfg) {
    const auto x = load_signal(require(gt.signal, "--signal"));
    SpectralGap g;
    if (gt.kind == "exterior")
      g.kind = SpectralGap::Kind::exterior;
    else if (gt.kind == "interior")
      g.kind = SpectralGap::Kind::interior;
    else
      throw ConfigError("--gap-kind must be exterior or interior");
    g.edge = gt.edge;
    GapTestOptions go;
    go.pairing.T = gt.T;
    go.tol = gt.tol;
    if (gt.alpha >= 0.0)
      go.alpha = gt.alpha;
    const auto rep = gap_test(x.as_view(), g, default_probe_bank(g), go);
    auto j = envelope("gap-test", cfg);
    const json body = rep;
    j.update(body);
    emit_json(gt.out_path, j, out);
    return kExitOk;
  };

  // ---- parseval-check
  auto pars = std::make_unique<Command>();
  struct {
    std::string signal, out_path;
    double center = 0.0, half_width = 1.0, plateau = 0.5, T = 0.0;
    int d = 2;
  } pc;
  pars->app = app.add_subcommand("parseval-check", "compare both sides of the Parseval analog");
  add_config_flag(*pars);
  pars->bind.add(pars->app, "--signal", pc.signal, "signal JSON or t,re,im CSV");
  pars->bind.add(pars->app, "--center", pc.center, "probe center");
  pars->bind.add(pars->app, "--half-width", pc.half_width, "probe half-width");
  pars->bind.add(pars->app, "--d", pc.d, "probe smoothness 1|2");
  pars->bind.add(pars->app, "--plateau", pc.plateau, "plateau fraction in (0,1)");
  pars->bind.add(pars->app, "--T", pc.T, "time truncation (0 = automatic)");
  pars->bind.add(pars->app, "--out", pc.out_path, "report JSON (stdout if omitted)");
  pars->body = [&](const json &cfg) {
    const auto x = load_signal(require(pc.signal, "--signal"));
    const auto f = make_bump(pc.center, pc.half_width, pc.d, pc.plateau);
    PairingOptions po;
    po.T = pc.T;
    const auto rep = parseval_check(x.as_view(), f, po);
    auto j = envelope("parseval-check", cfg);
    j["lhs"] = {{"re", rep.lhs.real()}, {"im", rep.lhs.imag()}};
    j["rhs"] = {{"re", rep.rhs.real()}, {"im", rep.rhs.imag()}};
    j["abs_err"] = rep.abs_err;
    j["tail_estimate"] = rep.tail_estimate;
    j["converged"] = rep.converged;
    emit_json(pc.out_path, j, out);
    return kExitOk;
  };

  // ---- predict
  auto pred = std::make_unique<Command>();
  struct {
    std::string signal, window = "-10:10", convention = "as_printed", route = "auto", out_path,
                        report;
    double a = 1.0, omega_hat = 0.0, gamma = 8.0, r = 0.5, c = 1.0, alpha = 0.25,
           omega_max = 2048.0;
    std::size_t n = 2001;
  } pr;
  pred->app = app.add_subcommand("predict", "causal prediction of the anticausal target");
  add_config_flag(*pred);
  pred->bind.add(pred->app, "--a", pr.a, "anticausal base rate");
  pred->bind.add(pred->app, "--omega-hat", pr.omega_hat, "degeneracy frequency");
  pred->bind.add(pred->app, "--gamma", pr.gamma, "sharpness");
  pred->bind.add(pred->app, "--r", pr.r, "regularization exponent");
  pred->bind.add(pred->app, "--c", pr.c, "compensator strength");
  pred->bind.add(pred->app, "--alpha", pr.alpha, "weight exponent in [0, 1/2)");
  pred->bind.add(pred->app, "--signal", pr.signal, "signal JSON");
  pred->bind.add(pred->app, "--window", pr.window, "output window lo:hi");
  pred->bind.add(pred->app, "--n", pr.n, "output samples");
  pred->bind.add(pred->app, "--convention", pr.convention, "printed|proof");
  pred->bind.add(pred->app, "--route", pr.route, "auto|time_domain|spectral");
  pred->bind.add(pred->app, "--omega-max", pr.omega_max, "kernel frequency truncation");
  pred->bind.add(pred->app, "--out", pr.out_path, "prediction CSV");
  pred->bind.add(pred->app, "--report", pr.report, "report JSON (default <out>.json)");
  pred->body = [&](const json &cfg) {
    const PredictorSpec spec{pr.a, pr.omega_hat, pr.gamma, pr.r, pr.c,
                             convention_from_string(pr.convention)};
    const auto x = read_signal(require(pr.signal, "--signal"));
    const auto w = parse_window(pr.window);
    PredictOptions po;
    po.route = predict_route_from_string(pr.route);
    po.omega_max = pr.omega_max;
    const auto res = predict(spec, x, w.lo, w.hi, pr.n, pr.alpha, po);
    write_csv(require(pr.out_path, "--out"), res.y_hat);
    auto j = envelope("predict", cfg);
    j["predictor"] = spec;
    j["sup_err"] = res.sup_err;
    j["route"] = to_string(res.route);
    j["peak_transfer"] = res.peak_transfer;
    if (res.route == PredictRoute::time_domain) {
      j["kernel_n"] = res.kernel_n;
      j["anticausal_mass_fraction"] = res.anticausal_mass_fraction;
    }
    std::vector<json> truth;
    for (std::size_t k = 0; k < res.y_true.values.size(); ++k)
      truth.push_back({res.y_true.values[k].real(), res.y_true.values[k].imag()});
    j["y_true"] = truth;
    write_json(pr.report.empty() ? pr.out_path + ".json" : pr.report, j);
    return kExitOk;
  };

  // ---- vgamma-study
  auto vg = std::make_unique<Command>();
  struct {
    std::string gammas = "1,2,4,8,16,32", grid = "-8:8:4096", out_path;
    double a = 1.0, omega_hat = 0.0, r = 0.5, c = 1.0, alpha = 0.25;
  } vs;
  vg->app = app.add_subcommand("vgamma-study", "damped V_gamma profile over gamma, both conventions");
  add_config_flag(*vg);
  vg->bind.add(vg->app, "--gammas", vs.gammas, "comma-separated gamma values");
  vg->bind.add(vg->app, "--grid", vs.grid, "frequency grid lo:hi:n");
  vg->bind.add(vg->app, "--a", vs.a, "anticausal base rate");
  vg->bind.add(vg->app, "--omega-hat", vs.omega_hat, "degeneracy frequency");
  vg->bind.add(vg->app, "--r", vs.r, "regularization exponent");
  vg->bind.add(vg->app, "--c", vs.c, "compensator strength");
  vg->bind.add(vg->app, "--alpha", vs.alpha, "weight exponent for the norm");
  vg->bind.add(vg->app, "--out", vs.out_path, "study JSON (stdout if omitted)");
  vg->body = [&](const json &cfg) {
    const auto g = parse_grid(vs.grid);
    const PredictorSpec base{vs.a, vs.omega_hat, 1.0, vs.r, vs.c, Convention::as_printed};
    const auto study = vgamma_study(base, parse_list(vs.gammas), g.lo, g.hi, g.n, vs.alpha);
    auto j = envelope("vgamma-study", cfg);
    j["entries"] = study;
    emit_json(vs.out_path, j, out);
    return kExitOk;
  };

  // ---- selftest
  auto self = std::make_unique<Command>();
  std::string only;
  self->app = app.add_subcommand("selftest", "run the acceptance suite");
  add_config_flag(*self);
  self->bind.add(self->app, "--only", only, "comma-separated criterion ids");
  self->body = [&](const json &) {
    const auto results = run_acceptance(only.empty() ? std::vector<std::string>{} : split(only, ','));
    out << format_results(results);
    std::size_t passed = 0;
    for (const auto &r : results)
      passed += r.passed ? 1 : 0;
    out << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? kExitOk : kExitConfig;
  };

  std::vector<Command *> commands{design.get(), apply.get(), gap.get(), pars.get(),
                                  pred.get(),   vg.get(),    self.get()};

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    const CLI::App *shown = &app;
    for (auto *c : commands)
      if (c->app->parsed())
        shown = c->app;
    out << shown->help();
    return kExitOk;
  } catch (const CLI::CallForVersion &) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    const CLI::App *shown = &app;
    for (auto *c : commands)
      if (c->app->parsed())
        shown = c->app;
    err << shown->help();
    return kExitConfig;
  }

  try {
    for (auto *c : commands) {
      if (!c->app->parsed())
        continue;
      c->bind.apply_config(load_config(*c));
      return c->body(c->bind.resolved());
    }
  } catch (const DivergenceError &e) {
    err << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const ConfigError &e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception &e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

auto run(int argc, char **argv) -> int {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

} // namespace udsp::cli
