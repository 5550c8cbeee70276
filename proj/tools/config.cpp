#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace scg::cli {

namespace {

std::vector<KeySpec> background_keys() {
  return {
      {"background", "", "static | powerlaw | desitter | tabulated", true},
      {"m", "0", "field mass [1/length]", false},
      {"tau0", "", "initial conformal time of the adiabatic state", true},
      {"a0", "1", "scale factor (static)", false},
      {"c", "1", "amplitude of a = c tau^p (powerlaw)", false},
      {"p", "1", "exponent of a = c tau^p (powerlaw)", false},
      {"hubble", "1", "Hubble rate H of a = -1/(H tau) (desitter) [1/length]", false},
      {"file", "", "CSV rows tau,a,a' (tabulated)", false},
  };
}

std::vector<CommandSpec> build_commands() {
  std::vector<CommandSpec> c;
  c.push_back({"runpoly", "exact run-structure polynomials", "json",
               {{"kind", "atomic", "atomic | circular | linear | valley | wick", false},
                {"n", "", "permutation size (wick: number of moments)", true}}});
  c.push_back({"worldfun", "world-function expansion against closed forms", "csv",
               {{"metric", "", "minkowski | flrw-cosmological | flrw-conformal | desitter", true},
                {"order", "6", "truncation order in the separation", false},
                {"a", "1", "scale factor at the base point (flrw)", false},
                {"derivs", "0,0,0,0", "H, H', H'', H''' at the base point (flrw) [1/length^k]", false},
                {"hubble", "1", "de Sitter Hubble rate [1/length]", false},
                {"tau", "-1", "conformal time of the base point (desitter)", false},
                {"samples", "10", "number of random separations", false},
                {"scale", "0.01", "separation component magnitude [length]", false},
                {"seed", "1", "random seed", false}}});
  auto modes_keys = background_keys();
  modes_keys.push_back({"tau-list", "", "output times, sorted, >= tau0", true});
  modes_keys.push_back({"k-list", "", "comoving wave numbers [1/length]", true});
  modes_keys.push_back({"tol", "1e-12", "partial-mode remainder target (relative)", false});
  c.push_back({"modes", "order-zero adiabatic modes", "csv", modes_keys});
  auto wick_keys = background_keys();
  wick_keys.push_back({"tau-list", "", "output times, sorted, >= tau0", true});
  wick_keys.push_back({"renorm-length", "0", "renormalization length lambda, 0 = sqrt(2) e^-gamma / m [length]", false});
  wick_keys.push_back({"k-max", "0", "k-integral cutoff, 0 = automatic [1/length]", false});
  wick_keys.push_back({"tol", "1e-12", "partial-mode remainder target (relative)", false});
  c.push_back({"wick", "renormalized Wick square", "json", wick_keys});
  c.push_back({"solve", "semiclassical Friedmann fixed point", "csv",
               {{"m", "", "field mass [1/length]", true},
                {"lambda", "", "cosmological constant Lambda [1/length^2]", true},
                {"tau0", "", "initial conformal time", true},
                {"a0", "", "initial scale factor", true},
                {"h0", "", "initial Hubble rate [1/length]", true},
                {"tau-max", "", "final conformal time", true},
                {"grid-n", "256", "intervals per window", false},
                {"tol", "1e-6", "fixed-point residual tolerance", false},
                {"tol-delta", "1e-8", "iteration step tolerance, times max(1, |h0|)", false},
                {"hc2", "0", "critical H_c^2, 0 = 1440 pi^2 [1/length^2]", false},
                {"renorm-length", "0", "renormalization length, 0 = default for m [length]", false},
                {"radiation", "0", "classical radiation density in the constraint", false},
                {"window", "0", "first window length, 0 = whole interval", false},
                {"max-iterations", "200", "Picard iterations per window", false},
                {"report", "", "write the JSON report to this path", false}}});
  c.push_back({"spectrum", "induced power spectrum P0 on de Sitter", "csv",
               {{"m", "1", "field mass [1/length]", false},
                {"hubble", "1", "Hubble rate [1/length]", false},
                {"tau-list", "", "conformal times (< 0), used with k-list", false},
                {"k-list", "", "wave numbers (> 0), used with tau-list", false},
                {"ktau-list", "", "values of k tau (< 0) for the rescaled profile", false},
                {"tol", "1e-9", "relative quadrature tolerance", false},
                {"tail-scale", "200", "numeric p-range reaches tail-scale / |tau|", false}}});
  c.push_back({"bispectrum", "induced bispectrum B0 on de Sitter", "csv",
               {{"m", "1", "field mass [1/length]", false},
                {"hubble", "1", "Hubble rate [1/length]", false},
                {"tau-list", "", "conformal times (< 0)", true},
                {"k1", "", "wave vector x,y,z", true},
                {"k2", "", "wave vector x,y,z", true},
                {"k3", "", "wave vector x,y,z, default -k1-k2", false},
                {"radial", "32", "radial nodes per centre", false},
                {"polar", "16", "polar nodes per hemisphere", false},
                {"azimuthal", "48", "azimuthal nodes", false},
                {"tol", "1e-2", "relative error target of the coarse-fine estimate", false}}});
  return c;
}

bool is_common(const std::string& key) {
  return key == "output" || key == "format" || key == "threads" || key == "emit-fig";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "output") cfg.output = value;
  else if (key == "format") cfg.format = value;
  else if (key == "threads") cfg.threads = static_cast<int>(parse_number(value, key));
  else if (key == "emit-fig") cfg.emit_fig = value == "1" || value == "true" || value == "yes";
  else cfg.params[key] = value;
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> c = build_commands();
  return c;
}

const CommandSpec& command(std::string_view name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw UsageError("unknown subcommand: " + std::string(name));
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : UsageError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

bool RunConfig::has(const std::string& key) const { return params.count(key) && !params.at(key).empty(); }

const std::string& RunConfig::str(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw UsageError("missing key --" + key);
  return it->second;
}

double RunConfig::num(const std::string& key) const { return parse_number(str(key), key); }

int RunConfig::integer(const std::string& key) const {
  const double v = num(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("--" + key + " must be an integer");
  return static_cast<int>(v);
}

std::vector<double> RunConfig::list(const std::string& key) const { return parse_list(str(key), key); }

double parse_number(std::string_view text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw UsageError("invalid number for --" + key + ": '" + t + "'");
  return v;
}

std::vector<double> parse_list(std::string_view text, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_number(piece, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<ConfigEntry> read_config(std::istream& in, const std::string& source) {
  std::vector<ConfigEntry> entries;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source, no, "expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) throw ConfigError(source, no, "malformed key");
    if (value.empty()) throw ConfigError(source, no, "missing value for '" + key + "'");
    entries.push_back({key, value, no});
  }
  return entries;
}

std::map<std::string, std::string> parse_config_text(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> kv;
  for (auto& e : read_config(in, source)) kv[e.key] = e.value;
  return kv;
}

bool parse_config(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out) {
  CLI::App app{"scg: semiclassical gravity workbench"};
  app.require_subcommand(1, 1);
  struct Slot {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
  };
  std::map<std::string, Slot> slots;
  for (const auto& spec : commands()) {
    auto* sub = app.add_subcommand(spec.name, spec.summary);
    Slot& slot = slots[spec.name];
    for (const auto& k : spec.keys) {
      std::string help = k.help;
      if (k.required) help += " (required)";
      else if (!k.fallback.empty()) help += " (default: " + k.fallback + ")";
      slot.options[k.name] = sub->add_option("--" + k.name, slot.values[k.name], help)->type_name("VALUE");
    }
    sub->add_option("--config", slot.config_path, "line-oriented 'key = value' file; flags override it");
    slot.options["output"] = sub->add_option("-o,--output", slot.values["output"], "output path (default: stdout)");
    slot.options["format"] = sub->add_option("--format", slot.values["format"], "csv | json (default: " + spec.format + ")");
    slot.options["threads"] =
        sub->add_option("--threads", slot.values["threads"], "worker threads, 0 = SCG_THREADS or all cores (default: 0)");
    if (spec.name == "spectrum")
      slot.options["emit-fig"] = sub->add_flag("--emit-fig", "write (|k tau|, log10|k tau|, P0/C) figure data");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return false;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return false;
  } catch (const CLI::ParseError& e) {
    std::string usage = app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help();
    throw UsageError(std::string(e.what()) + "\n" + usage);
  }

  const auto* sub = app.get_subcommands().front();
  const CommandSpec& spec = command(sub->get_name());
  Slot& slot = slots[spec.name];
  cfg = RunConfig{};
  cfg.subcommand = spec.name;
  cfg.format = spec.format;
  for (const auto& k : spec.keys)
    if (!k.fallback.empty()) cfg.params[k.name] = k.fallback;

  if (!slot.config_path.empty()) {
    std::ifstream f(slot.config_path);
    if (!f) throw UsageError("cannot read config file " + slot.config_path);
    for (const auto& e : read_config(f, slot.config_path)) {
      if (!is_common(e.key) && !slot.options.count(e.key))
        throw ConfigError(slot.config_path, e.line, "unknown key '" + e.key + "'");
      apply(cfg, e.key, e.value);
    }
  }
  for (const auto& [key, opt] : slot.options)
    if (opt->count() > 0) apply(cfg, key, key == "emit-fig" ? "true" : slot.values[key]);

  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json\n" + sub->help());
  for (const auto& k : spec.keys)
    if (k.required && !cfg.has(k.name)) throw UsageError("missing required key --" + k.name + "\n" + sub->help());
  return true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace scg::cli
