#include "levyfluct/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace levyfluct {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("config: " + msg);
}

// every object is checked against the full key list for its block
void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail(std::string("unknown key '") + item.key() + "' in " +
                     where);
  }
}

double num(const json& j, const char* where) {
  if (!j.is_number()) fail(std::string(where) + " must be a number");
  return j.get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
  return j.contains(key) ? num(j.at(key), key) : dflt;
}

std::vector<double> num_list(const json& j, const char* where) {
  if (!j.is_array()) fail(std::string(where) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(num(v, where));
  return out;
}

ClaimDist parse_claims(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    fail("claims block needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exponential") {
    check_keys(j, "claims", {"kind", "eta"});
    if (!j.contains("eta")) fail("exponential claims need 'eta'");
    return ExpClaims{num(j.at("eta"), "eta")};
  }
  if (kind == "mixed_exponential") {
    check_keys(j, "claims", {"kind", "weights", "rates"});
    if (!j.contains("weights") || !j.contains("rates"))
      fail("mixed_exponential claims need 'weights' and 'rates'");
    return MixedExpClaims{num_list(j.at("weights"), "weights"),
                          num_list(j.at("rates"), "rates")};
  }
  if (kind == "table") {
    check_keys(j, "claims", {"kind", "knots", "density"});
    if (!j.contains("knots") || !j.contains("density"))
      fail("table claims need 'knots' and 'density'");
    TableClaims t;
    t.knots = num_list(j.at("knots"), "knots");
    t.density = num_list(j.at("density"), "density");
    return t;
  }
  fail("unknown claims kind '" + kind + "'");
}

LevyModel parse_model(const json& j) {
  if (!j.is_object()) fail("'model' must be an object");
  check_keys(j, "model", {"drift", "sigma", "jumps"});
  if (!j.contains("drift")) fail("model needs 'drift'");
  LevyModel m;
  m.drift = num(j.at("drift"), "drift");
  m.sigma = num_or(j, "sigma", 0.0);
  if (j.contains("jumps") && !j.at("jumps").is_null()) {
    const json& jj = j.at("jumps");
    check_keys(jj, "jumps", {"rate", "claims"});
    if (!jj.contains("rate") || !jj.contains("claims"))
      fail("jumps block needs 'rate' and 'claims'");
    m.jumps = CompoundPoisson{num(jj.at("rate"), "rate"),
                              parse_claims(jj.at("claims"))};
  } else {
    m.jumps = NoJumps{};
  }
  m.validate();
  return m;
}

ScaleCmd parse_scale(const json& j) {
  check_keys(j, "scale", {"q", "x_lo", "x_hi", "x_step", "backend"});
  ScaleCmd c;
  c.q = num_or(j, "q", c.q);
  c.x_lo = num_or(j, "x_lo", c.x_lo);
  c.x_hi = num_or(j, "x_hi", c.x_hi);
  c.x_step = num_or(j, "x_step", c.x_step);
  if (j.contains("backend")) c.backend = j.at("backend").get<std::string>();
  if (c.backend != "auto" && c.backend != "closed_form" &&
      c.backend != "inversion")
    fail("scale.backend must be auto, closed_form, or inversion");
  if (!(c.x_step > 0.0) || c.x_hi < c.x_lo)
    fail("scale grid needs x_hi >= x_lo and x_step > 0");
  return c;
}

LawCmd parse_law(const json& j) {
  check_keys(j, "law",
             {"name", "q", "beta", "x_lo", "x_hi", "x_step", "y", "z", "a",
              "b"});
  if (!j.contains("name")) fail("law block needs 'name'");
  LawCmd c;
  c.name = j.at("name").get<std::string>();
  const bool transform = c.name == "first_passage" || c.name == "recovery" ||
                         c.name == "last_passage" || c.name == "duration";
  const bool density = c.name == "ruin_extrema" ||
                       c.name == "recovery_joint" ||
                       c.name == "last_passage_joint";
  if (!transform && !density)
    fail("law.name must be first_passage, recovery, last_passage, "
         "duration, ruin_extrema, recovery_joint, or last_passage_joint");
  c.q = num_or(j, "q", c.q);
  c.beta = num_or(j, "beta", c.beta);
  c.x_lo = num_or(j, "x_lo", c.x_lo);
  c.x_hi = num_or(j, "x_hi", c.x_hi);
  c.x_step = num_or(j, "x_step", c.x_step);
  c.y = num_or(j, "y", c.y);
  c.z = num_or(j, "z", c.z);
  c.a = num_or(j, "a", c.a);
  c.b = num_or(j, "b", c.b);
  if (transform && (j.contains("y") || j.contains("z") || j.contains("a") ||
                    j.contains("b")))
    fail("law point coordinates y, z, a, b apply only to the joint "
         "densities");
  if (!(c.x_step > 0.0) || c.x_hi < c.x_lo)
    fail("law grid needs x_hi >= x_lo and x_step > 0");
  return c;
}

PenaltyCfg parse_penalty(const json& j) {
  check_keys(j, "penalty",
             {"kind", "k", "s", "y_lo", "y_hi", "z_lo", "z_hi"});
  PenaltyCfg p;
  if (j.contains("kind")) p.kind = j.at("kind").get<std::string>();
  if (p.kind != "unit" && p.kind != "deficit_power" && p.kind != "band" &&
      p.kind != "exp_deficit")
    fail("penalty.kind must be unit, deficit_power, band, or exp_deficit");
  p.k = num_or(j, "k", p.k);
  p.s = num_or(j, "s", p.s);
  p.y_lo = num_or(j, "y_lo", p.y_lo);
  p.y_hi = num_or(j, "y_hi", p.y_hi);
  p.z_lo = num_or(j, "z_lo", p.z_lo);
  p.z_hi = num_or(j, "z_hi", p.z_hi);
  return p;
}

GsCmd parse_gs(const json& j) {
  check_keys(j, "gs", {"q", "x", "penalty", "rel_tol"});
  GsCmd c;
  c.q = num_or(j, "q", c.q);
  if (!j.contains("x")) fail("gs block needs 'x'");
  c.x = num_list(j.at("x"), "gs.x");
  if (c.x.empty()) fail("gs.x must not be empty");
  if (j.contains("penalty")) c.penalty = parse_penalty(j.at("penalty"));
  c.rel_tol = num_or(j, "rel_tol", c.rel_tol);
  return c;
}

SimulateCmd parse_simulate(const json& j) {
  check_keys(j, "simulate",
             {"weight", "q", "beta", "x", "n_paths", "step", "t_max",
              "level_bound", "y_lo", "y_hi", "z_lo", "z_hi", "sup_cap",
              "inf_floor"});
  SimulateCmd c;
  if (j.contains("weight")) c.weight = j.at("weight").get<std::string>();
  if (c.weight != "ruin" && c.weight != "recovery" &&
      c.weight != "last_passage" && c.weight != "duration")
    fail("simulate.weight must be ruin, recovery, last_passage, or "
         "duration");
  c.q = num_or(j, "q", c.q);
  c.beta = num_or(j, "beta", c.beta);
  c.x = num_or(j, "x", c.x);
  if (j.contains("n_paths")) {
    if (!j.at("n_paths").is_number_unsigned())
      fail("simulate.n_paths must be a nonnegative integer");
    c.n_paths = j.at("n_paths").get<std::size_t>();
  }
  c.step = num_or(j, "step", c.step);
  c.t_max = num_or(j, "t_max", c.t_max);
  c.level_bound = num_or(j, "level_bound", c.level_bound);
  c.y_lo = num_or(j, "y_lo", c.y_lo);
  c.y_hi = num_or(j, "y_hi", c.y_hi);
  c.z_lo = num_or(j, "z_lo", c.z_lo);
  c.z_hi = num_or(j, "z_hi", c.z_hi);
  c.sup_cap = num_or(j, "sup_cap", c.sup_cap);
  c.inf_floor = num_or(j, "inf_floor", c.inf_floor);
  return c;
}

ValidateCmd parse_validate(const json& j) {
  check_keys(j, "validate", {"n_paths", "step"});
  ValidateCmd c;
  if (j.contains("n_paths")) {
    if (!j.at("n_paths").is_number_unsigned())
      fail("validate.n_paths must be a nonnegative integer");
    c.n_paths = j.at("n_paths").get<std::size_t>();
  }
  c.step = num_or(j, "step", c.step);
  return c;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j, "top level",
             {"schema_version", "model", "command", "format", "out", "seed",
              "threads", "scale", "law", "gs", "simulate", "validate"});
  if (!j.contains("schema_version") ||
      !j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != 1)
    fail("schema_version must be present and equal to 1");
  if (!j.contains("model")) fail("missing 'model'");
  if (!j.contains("command")) fail("missing 'command'");

  RunConfig cfg;
  cfg.model = parse_model(j.at("model"));

  const std::string cmd = j.at("command").get<std::string>();
  if (cmd == "scale")
    cfg.command = Command::Scale;
  else if (cmd == "law")
    cfg.command = Command::Law;
  else if (cmd == "gs")
    cfg.command = Command::Gs;
  else if (cmd == "simulate")
    cfg.command = Command::Simulate;
  else if (cmd == "validate")
    cfg.command = Command::Validate;
  else
    fail("unknown command '" + cmd + "'");

  if (j.contains("format")) {
    const std::string f = j.at("format").get<std::string>();
    if (f == "csv")
      cfg.format = OutFormat::Csv;
    else if (f == "json")
      cfg.format = OutFormat::Json;
    else
      fail("format must be csv or json");
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      fail("seed must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j.at("threads").is_number_unsigned())
      fail("threads must be a nonnegative integer");
    cfg.threads = j.at("threads").get<unsigned>();
  }

  // only the block for the selected command may appear
  const char* blocks[] = {"scale", "law", "gs", "simulate", "validate"};
  const Command cmds[] = {Command::Scale, Command::Law, Command::Gs,
                          Command::Simulate, Command::Validate};
  for (int i = 0; i < 5; ++i)
    if (j.contains(blocks[i]) && cfg.command != cmds[i])
      fail(std::string("block '") + blocks[i] +
           "' does not belong to command '" + cmd + "'");

  switch (cfg.command) {
    case Command::Scale:
      if (j.contains("scale")) cfg.scale = parse_scale(j.at("scale"));
      break;
    case Command::Law:
      if (!j.contains("law")) fail("command 'law' needs a 'law' block");
      cfg.law = parse_law(j.at("law"));
      break;
    case Command::Gs:
      if (!j.contains("gs")) fail("command 'gs' needs a 'gs' block");
      cfg.gs = parse_gs(j.at("gs"));
      break;
    case Command::Simulate:
      if (j.contains("simulate"))
        cfg.simulate = parse_simulate(j.at("simulate"));
      break;
    case Command::Validate:
      if (j.contains("validate"))
        cfg.validate = parse_validate(j.at("validate"));
      break;
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace levyfluct
