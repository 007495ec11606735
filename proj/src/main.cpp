// Batch front end. Reads a JSON run config, evaluates the requested
// command against the analytic engines or the path sampler, and writes
// one table artifact in CSV or JSON. Exit codes: 0 success, 1 config or
// domain error, 2 numerical failure, 3 validation-suite failure.

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "levyfluct/errors.hpp"
#include "levyfluct/fluctuation_laws.hpp"
#include "levyfluct/risk_analytics.hpp"
#include "levyfluct/run_config.hpp"
#include "levyfluct/scale_functions.hpp"
#include "levyfluct/simulator.hpp"
#include "levyfluct/table_io.hpp"
#include "levyfluct/validation.hpp"

namespace {

using namespace levyfluct;

std::vector<double> make_grid(double lo, double hi, double step) {
  int n = static_cast<int>((hi - lo) / step + 0.5);
  if (lo + n * step > hi + step * 1e-9) --n;
  std::vector<double> xs;
  xs.reserve(n + 1);
  for (int i = 0; i <= n; ++i) xs.push_back(lo + i * step);
  return xs;
}

ScaleEvaluator::Backend backend_from(const std::string& name) {
  if (name == "closed_form") return ScaleEvaluator::Backend::ClosedForm;
  if (name == "inversion") return ScaleEvaluator::Backend::Inversion;
  return ScaleEvaluator::Backend::Auto;
}

OutTable run_scale(const RunConfig& cfg) {
  const ScaleCmd& c = cfg.scale;
  ScaleEvaluator ev(cfg.model, c.q, backend_from(c.backend));
  OutTable t;
  t.columns = {"x", "W", "W_prime", "Z"};
  for (double x : make_grid(c.x_lo, c.x_hi, c.x_step))
    t.rows.push_back({x, ev.W(x), ev.W_prime(x), ev.Z(x)});
  return t;
}

OutTable run_law(const RunConfig& cfg) {
  const LawCmd& c = cfg.law;
  LawEngine eng(cfg.model);
  OutTable t;
  t.columns = {"law_name", "x", "q", "beta", "y", "z", "a", "b", "value"};
  for (double x : make_grid(c.x_lo, c.x_hi, c.x_step)) {
    double v;
    if (c.name == "first_passage")
      v = eng.first_passage_transform(x, 0.0, c.q, 0.0);
    else if (c.name == "recovery")
      v = eng.recovery_transform(c.q, c.beta, x);
    else if (c.name == "last_passage")
      v = eng.last_passage_transform(c.q, c.beta, x);
    else if (c.name == "duration")
      v = eng.negative_duration_transform(c.beta, x);
    else if (c.name == "ruin_extrema")
      v = eng.ruin_joint_extrema_density(c.q, x, c.y, c.z, c.a, c.b);
    else if (c.name == "recovery_joint")
      v = eng.recovery_joint_density(c.q, c.beta, x, c.y, c.z, c.a, c.b);
    else
      v = eng.last_passage_joint_density(c.q, c.beta, x, c.y, c.z, c.a,
                                         c.b);
    t.rows.push_back({c.name, x, c.q, c.beta, c.y, c.z, c.a, c.b, v});
  }
  return t;
}

PenaltySpec penalty_from(const PenaltyCfg& p) {
  if (p.kind == "deficit_power") return deficit_power_penalty(p.k);
  if (p.kind == "exp_deficit") return exp_deficit_penalty(p.s);
  if (p.kind == "band")
    return band_penalty(p.y_lo, p.y_hi, p.z_lo, p.z_hi);
  return unit_penalty();
}

OutTable run_gs(const RunConfig& cfg) {
  const GsCmd& c = cfg.gs;
  RiskEngine eng(cfg.model);
  PenaltySpec spec = penalty_from(c.penalty);
  spec.rel_tol = c.rel_tol;
  OutTable t;
  t.columns = {"x", "value", "jump_part", "creeping_part",
               "error_estimate"};
  for (double x : c.x) {
    const GSResult r = eng.gerber_shiu(c.q, x, spec);
    t.rows.push_back(
        {x, r.value, r.jump_part, r.creeping_part, r.error_estimate});
  }
  return t;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

OutTable run_simulate(const RunConfig& cfg) {
  const SimulateCmd& c = cfg.simulate;
  Simulator sim(cfg.model);
  SimPlan plan;
  plan.n_paths = c.n_paths;
  plan.seed = cfg.seed;
  plan.t_max = c.t_max;
  plan.level_bound = c.level_bound;
  plan.step = c.step;
  plan.threads = cfg.threads;
  WeightSpec w;
  w.kind = c.weight == "recovery" ? WeightKind::DiscountedRecovery
           : c.weight == "last_passage" ? WeightKind::DiscountedLastPassage
           : c.weight == "duration" ? WeightKind::DurationTransform
                                    : WeightKind::DiscountedRuin;
  w.q = c.q;
  w.beta = c.beta;
  // zero means the side is unconstrained
  w.box.y_lo = c.y_lo;
  w.box.y_hi = c.y_hi > 0.0 ? c.y_hi : kInf;
  w.box.z_lo = c.z_lo;
  w.box.z_hi = c.z_hi > 0.0 ? c.z_hi : kInf;
  w.box.sup_cap = c.sup_cap > 0.0 ? c.sup_cap : kInf;
  w.box.inf_floor = c.inf_floor != 0.0 ? c.inf_floor : -kInf;
  const EstimateResult r = sim.estimate(c.x, plan, w);
  OutTable t;
  t.columns = {"weight", "x", "q", "beta", "n_paths", "mean", "std_error",
               "n_effective", "censored_fraction", "bias_bound"};
  t.rows.push_back({c.weight, c.x, c.q, c.beta, c.n_paths, r.mean,
                    r.std_error, r.n_effective, r.censored_fraction,
                    r.bias_bound});
  return t;
}

OutTable run_validate(const RunConfig& cfg, bool* all_pass) {
  Validator v(cfg.model);
  CheckBudget bg;
  bg.n_paths = cfg.validate.n_paths;
  bg.step = cfg.validate.step;
  bg.seed = cfg.seed;
  bg.threads = cfg.threads;
  const std::vector<CheckRow> rows = v.suite(bg);
  OutTable t;
  t.columns = {"check_name", "analytic", "mc_mean", "mc_se", "z_score",
               "pass"};
  *all_pass = true;
  std::size_t n_pass = 0;
  for (const CheckRow& r : rows) {
    t.rows.push_back(
        {r.name, r.analytic, r.mc_mean, r.mc_se, r.z_score, r.pass});
    *all_pass = *all_pass && r.pass;
    n_pass += r.pass ? 1 : 0;
  }
  std::fprintf(stderr, "validate: %zu/%zu checks passed\n", n_pass,
               rows.size());
  for (const CheckRow& r : rows)
    if (!r.pass)
      std::fprintf(stderr,
                   "  FAIL %s: analytic %.6g vs mc %.6g (se %.2g)\n",
                   r.name.c_str(), r.analytic, r.mc_mean, r.mc_se);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Fluctuation identities of spectrally negative Levy processes: "
      "scale functions, passage laws, penalty integrals, and their "
      "Monte Carlo validation"};
  std::string config_path, out, format;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--config", config_path, "run config JSON file")
      ->required();
  app.add_option("--out", out, "output path (default from config)");
  app.add_option("--format", format, "csv or json (default from config)");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "override the config thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (app.count("--out")) cfg.out = out;
    if (app.count("--format")) {
      if (format == "csv")
        cfg.format = OutFormat::Csv;
      else if (format == "json")
        cfg.format = OutFormat::Json;
      else
        throw std::runtime_error("config: format must be csv or json");
    }
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--threads")) cfg.threads = threads;

    OutTable table;
    bool all_pass = true;
    switch (cfg.command) {
      case Command::Scale:
        table = run_scale(cfg);
        break;
      case Command::Law:
        table = run_law(cfg);
        break;
      case Command::Gs:
        table = run_gs(cfg);
        break;
      case Command::Simulate:
        table = run_simulate(cfg);
        break;
      case Command::Validate:
        table = run_validate(cfg, &all_pass);
        break;
    }
    write_text(cfg.format == OutFormat::Csv ? to_csv(table)
                                            : to_json(table),
               cfg.out);
    return all_pass ? 0 : 3;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
