#include "cli.hpp"

#include "scg/fluct.hpp"
#include "scg/geodesy.hpp"
#include "scg/modes.hpp"
#include "scg/parallel.hpp"
#include "scg/runcomb.hpp"
#include "scg/sceq.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace scg::cli {

namespace {

using nlohmann::json;

// Raised for results that exist but did not meet their accuracy target.
struct NumericalFailure {
  std::string message;
  json diagnostics;
};

class Csv {
 public:
  Csv(std::ostream& out, const std::vector<std::string>& header) : out_(out) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << format_double(v[i]);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

std::vector<double> read_table_row(const std::string& line, const std::string& source, int no) {
  try {
    return parse_list(line, "file");
  } catch (const UsageError&) {
    throw ConfigError(source, no, "expected numeric row tau,a,a'");
  }
}

modes::CosmoBackground background(const RunConfig& cfg) {
  const std::string& kind = cfg.str("background");
  const double m = cfg.num("m"), tau0 = cfg.num("tau0");
  if (kind == "static") return modes::CosmoBackground::static_universe(cfg.num("a0"), m, tau0);
  if (kind == "powerlaw") return modes::CosmoBackground::power_law(cfg.num("c"), cfg.num("p"), m, tau0);
  if (kind == "desitter") return modes::CosmoBackground::de_sitter(cfg.num("hubble"), m, tau0);
  if (kind == "tabulated") {
    if (!cfg.has("file")) throw UsageError("--background tabulated needs --file");
    std::ifstream in(cfg.str("file"));
    if (!in) throw UsageError("cannot read " + cfg.str("file"));
    std::vector<double> tau, a, da;
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (tau.empty() && line.find_first_of("abcdfghijklmnopqrstuvwxyz") != std::string::npos) continue;  // header
      auto v = read_table_row(line, cfg.str("file"), no);
      if (v.size() != 3) throw ConfigError(cfg.str("file"), no, "expected three columns tau,a,a'");
      tau.push_back(v[0]);
      a.push_back(v[1]);
      da.push_back(v[2]);
    }
    return modes::CosmoBackground::tabulated(tau, a, da, m, tau0);
  }
  throw UsageError("unknown background '" + kind + "'");
}

json poly_json(const runcomb::RunPolynomial& p) {
  json arr = json::array();
  for (const auto& [part, coeff] : p.terms())
    arr.push_back({{"partition", part.parts()}, {"coeff", runcomb::to_string(coeff)}});
  return arr;
}

int cmd_runpoly(const RunConfig& cfg, std::ostream& out) {
  const std::string& kind = cfg.str("kind");
  const int n = cfg.integer("n");
  if (n < 0 || n > 40) throw UsageError("--n out of range [0, 40]");
  json result;
  if (kind == "atomic" || kind == "circular" || kind == "linear") {
    runcomb::RunPolynomial p = kind == "atomic" ? runcomb::atomic_poly(n)
                               : kind == "circular" ? runcomb::circular_poly(n)
                                                    : runcomb::linear_poly(n);
    if (cfg.format == "csv") {
      out << "partition,coeff\n";
      for (const auto& [part, coeff] : p.terms()) {
        std::string parts;
        for (int x : part.parts()) parts += (parts.empty() ? "" : " ") + std::to_string(x);
        out << parts << ',' << runcomb::to_string(coeff) << '\n';
      }
      return kOk;
    }
    result = poly_json(p);
  } else if (kind == "valley") {
    result = json::array();
    const auto v = runcomb::valley_poly(n);
    for (std::size_t j = 0; j < v.size(); ++j) result.push_back({{"kappa_power", j}, {"coeff", runcomb::to_string(v[j])}});
  } else if (kind == "wick") {
    result = json::array();
    for (const auto& g : runcomb::wick_moment_graphs(n))
      result.push_back({{"lambda", g.lambda},
                        {"multiplicity", runcomb::to_string(g.multiplicity)},
                        {"pairing_weight", runcomb::to_string(g.pairing_weight)}});
  } else {
    throw UsageError("unknown --kind '" + kind + "'");
  }
  out << result.dump(1) << '\n';
  return kOk;
}

// Uniform in [-1, 1) from the top 53 bits; identical on every platform.
double unit(std::uint64_t bits) { return 2.0 * static_cast<double>(bits >> 11) * 0x1.0p-53 - 1.0; }

int cmd_worldfun(const RunConfig& cfg, std::ostream& out) {
  const std::string& metric = cfg.str("metric");
  const int order = cfg.integer("order");
  if (order < 2 || order > 12) throw UsageError("--order must be in [2, 12]");
  const double a = cfg.num("a"), scale = cfg.num("scale");
  const auto derivs = cfg.list("derivs");
  const double H = cfg.num("hubble"), tau = cfg.num("tau");
  geodesy::MetricJet jet;
  if (metric == "minkowski") jet = geodesy::MetricJet::minkowski(4, order);
  else if (metric == "flrw-conformal") jet = geodesy::MetricJet::flrw_conformal(a, derivs, order);
  else if (metric == "flrw-cosmological") jet = geodesy::MetricJet::flrw_cosmological(a, derivs, order);
  else if (metric == "desitter") jet = geodesy::MetricJet::desitter_conformal(H, tau, order);
  else throw UsageError("unknown --metric '" + metric + "'");
  const auto coeffs = geodesy::sigma_coeffs(jet, order);

  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed")));
  const int samples = cfg.integer("samples");
  Csv csv(out, {"dx0", "dx1", "dx2", "dx3", "sigma_truncated", "sigma_reference"});
  for (int s = 0; s < samples; ++s) {
    std::vector<double> dx(4);
    for (double& x : dx) x = scale * unit(rng());
    const double r2 = dx[1] * dx[1] + dx[2] * dx[2] + dx[3] * dx[3];
    double ref;
    if (metric == "minkowski") ref = 0.5 * (-dx[0] * dx[0] + r2);
    else if (metric == "desitter") ref = geodesy::desitter_sigma({tau, tau + dx[0], {0, 0, 0}, {dx[1], dx[2], dx[3]}, H});
    else
      ref = geodesy::flrw_sigma_reference(metric == "flrw-conformal" ? geodesy::FlrwChart::conformal
                                                                      : geodesy::FlrwChart::cosmological,
                                          derivs, a, dx[0], r2, std::min(order, 6));
    csv.row({dx[0], dx[1], dx[2], dx[3], coeffs.eval(dx), ref});
  }
  return kOk;
}

int cmd_modes(const RunConfig& cfg, std::ostream& out) {
  const auto bg = background(cfg);
  const auto taus = cfg.list("tau-list");
  modes::ModeOptions opt;
  opt.tol = cfg.num("tol");
  std::vector<modes::ModeResult> results;
  for (double k : cfg.list("k-list")) results.push_back(modes::mode(bg, k, taus, opt));
  json diag = json::array();
  for (const auto& r : results)
    if (!r.converged) diag.push_back({{"k", r.k}, {"remainder_bound", r.remainder_bound}, {"order", r.order}});
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : results)
      for (std::size_t i = 0; i < r.tau.size(); ++i)
        arr.push_back({{"k", r.k}, {"tau", r.tau[i]}, {"chi", {r.chi[i].real(), r.chi[i].imag()}},
                       {"dchi", {r.dchi[i].real(), r.dchi[i].imag()}},
                       {"wronskian_residual", modes::wronskian_residual(r.chi[i], r.dchi[i])}});
    out << arr.dump(1) << '\n';
  } else {
    Csv csv(out, {"k", "tau", "re_chi", "im_chi", "re_dchi", "im_dchi", "wronskian_residual"});
    for (const auto& r : results)
      for (std::size_t i = 0; i < r.tau.size(); ++i)
        csv.row({r.k, r.tau[i], r.chi[i].real(), r.chi[i].imag(), r.dchi[i].real(), r.dchi[i].imag(),
                 modes::wronskian_residual(r.chi[i], r.dchi[i])});
  }
  if (!diag.empty()) throw NumericalFailure{"partial-mode series did not reach the tolerance", diag};
  return kOk;
}

int cmd_wick(const RunConfig& cfg, std::ostream& out) {
  const auto bg = background(cfg);
  modes::WickOptions opt;
  opt.lambda = cfg.num("renorm-length");
  opt.k_max = cfg.num("k-max");
  opt.modes.tol = cfg.num("tol");
  opt.threads = cfg.threads;
  const auto rep = modes::wick_square(bg, cfg.list("tau-list"), opt);
  if (cfg.format == "json") {
    json j = {{"tau", rep.tau},     {"wick_square", rep.value}, {"integral", rep.integral},
              {"local", rep.local}, {"tail", rep.tail},         {"error", rep.error},
              {"k_max", rep.k_max}, {"k_nodes", rep.k_nodes},   {"converged", rep.converged}};
    out << j.dump(1) << '\n';
  } else {
    Csv csv(out, {"tau", "wick_square", "integral", "local", "tail", "error"});
    for (std::size_t i = 0; i < rep.tau.size(); ++i)
      csv.row({rep.tau[i], rep.value[i], rep.integral[i], rep.local[i], rep.tail[i], rep.error[i]});
  }
  if (!rep.converged) throw NumericalFailure{"Wick square k-integral did not converge", {{"k_max", rep.k_max}}};
  return kOk;
}

json solve_report_json(const sceq::SolveReport& r) {
  const auto& t = r.trajectory;
  return {{"reason", sceq::to_string(r.reason)},
          {"ok", r.ok()},
          {"iterations", r.iterations},
          {"retries", r.retries},
          {"windows", r.windows},
          {"lipschitz", r.lipschitz},
          {"residual", r.residual_norm},
          {"wick_error", r.wick_error},
          {"state_tau0", r.state_tau0},
          {"tau_end", t.tau.empty() ? t.tau0 : t.tau.back()},
          {"regularity",
           {{"ok", r.regularity.ok()},
            {"below_Hc", r.regularity.below_Hc},
            {"a_finite", r.regularity.a_finite},
            {"a_positive", r.regularity.a_positive},
            {"max_H_over_Hc", r.regularity.max_H_over_Hc},
            {"min_denominator", r.regularity.min_denominator}}},
          {"deltas", r.deltas}};
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  sceq::SolverParams p;
  p.m = cfg.num("m");
  p.Lambda = cfg.num("lambda");
  if (const double hc2 = cfg.num("hc2"); hc2 > 0) p.Hc2 = hc2;
  p.lambda = cfg.num("renorm-length");
  p.radiation = cfg.num("radiation");
  p.grid_n = cfg.integer("grid-n");
  p.tol_residual = cfg.num("tol");
  p.tol_delta = cfg.num("tol-delta");
  p.max_iterations = cfg.integer("max-iterations");
  p.wick.threads = cfg.threads;
  const double tau0 = cfg.num("tau0"), a0 = cfg.num("a0"), h0 = cfg.num("h0"), tau_max = cfg.num("tau-max");
  if (!(tau_max > tau0)) throw UsageError("--tau-max must exceed --tau0");
  if (p.grid_n < 4) throw UsageError("--grid-n must be at least 4");
  const double window = cfg.num("window") > 0 ? cfg.num("window") : tau_max - tau0;
  const double tau1 = std::min(tau0 + window, tau_max);

  sceq::SolveReport r = sceq::solve_local(tau0, a0, h0, tau1, p);
  if (r.ok() && tau1 < tau_max) r = sceq::extend_maximal(r, tau_max, p);

  json report = solve_report_json(r);
  report["constraint"] = sceq::constraint_check(tau0, a0, h0, p);
  report["config"] = cfg.params;
  if (cfg.has("report")) {
    std::ofstream f(cfg.str("report"), std::ios::binary);
    if (!f) throw UsageError("cannot write " + cfg.str("report"));
    f << report.dump(1) << '\n';
  }
  const auto& t = r.trajectory;
  if (cfg.format == "json") {
    report["tau"] = t.tau;
    report["H"] = t.H;
    report["a"] = r.a;
    report["wick_square"] = r.wick;
    report["pointwise_residual"] = r.residual;
    out << report.dump(1) << '\n';
  } else {
    Csv csv(out, {"tau", "H", "a", "wick_square", "residual"});
    for (std::size_t i = 0; i < t.tau.size(); ++i)
      csv.row({t.tau[i], t.H[i], i < r.a.size() ? r.a[i] : NAN, i < r.wick.size() ? r.wick[i] : NAN,
               i < r.residual.size() ? r.residual[i] : NAN});
  }
  // reaching H_c or a -> infinity ends the maximal solution; that is a result, not a failure
  if (r.reason == sceq::Termination::iteration_cap || r.reason == sceq::Termination::not_closed)
    throw NumericalFailure{"fixed-point iteration did not close", report};
  return kOk;
}

fluct::FluctParams fluct_params(const RunConfig& cfg) {
  fluct::FluctParams p;
  p.m = cfg.num("m");
  p.H = cfg.num("hubble");
  p.threads = cfg.threads;
  return p;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  auto p = fluct_params(cfg);
  p.rel_tol = cfg.num("tol");
  p.tail_scale = cfg.num("tail-scale");
  const double C = fluct::harrison_zeldovich_C(p.m);
  const bool grid = cfg.has("tau-list") || cfg.has("k-list");
  if (grid && cfg.has("ktau-list")) throw UsageError("give either --ktau-list or --tau-list with --k-list");
  if (grid && cfg.emit_fig) throw UsageError("--emit-fig uses --ktau-list");

  if (grid) {
    if (!cfg.has("tau-list") || !cfg.has("k-list")) throw UsageError("--tau-list and --k-list go together");
    const auto g = fluct::spectrum_grid(cfg.list("tau-list"), cfg.list("k-list"), p);
    json bad = json::array();
    Csv csv(out, {"tau", "k", "P0", "k3P0"});
    for (std::size_t i = 0; i < g.tau.size(); ++i)
      for (std::size_t j = 0; j < g.k.size(); ++j) {
        csv.row({g.tau[i], g.k[j], g.P0[i][j].value, g.k3P0[i][j]});
        if (!g.P0[i][j].converged) bad.push_back({{"tau", g.tau[i]}, {"k", g.k[j]}, {"error", g.P0[i][j].error}});
      }
    if (!bad.empty()) throw NumericalFailure{"P0 quadrature did not converge", bad};
    return kOk;
  }

  std::vector<double> kt;
  if (cfg.has("ktau-list")) kt = cfg.list("ktau-list");
  else if (cfg.emit_fig)
    for (int i = 0; i <= 120; ++i) kt.push_back(-std::pow(10.0, -3.0 + 0.05 * i));
  else throw UsageError("spectrum needs --ktau-list or --tau-list with --k-list");
  for (double& x : kt)
    if (!(x < 0)) throw UsageError("--ktau-list values must be negative");
  const auto prof = fluct::rescaled_profile(kt, p);
  if (cfg.emit_fig) {
    Csv csv(out, {"abs_ktau", "log10_abs_ktau", "P0_over_C"});
    for (std::size_t i = 0; i < kt.size(); ++i) csv.row({-kt[i], std::log10(-kt[i]), prof[i] / C});
  } else {
    Csv csv(out, {"ktau", "k3P0", "k3P0_over_C"});
    for (std::size_t i = 0; i < kt.size(); ++i) csv.row({kt[i], prof[i], prof[i] / C});
  }
  return kOk;
}

fluct::Vec3 vec3(const RunConfig& cfg, const std::string& key) {
  const auto v = cfg.list(key);
  if (v.size() != 3) throw UsageError("--" + key + " needs three components x,y,z");
  return {v[0], v[1], v[2]};
}

int cmd_bispectrum(const RunConfig& cfg, std::ostream& out) {
  auto p = fluct_params(cfg);
  p.grid = {cfg.integer("radial"), cfg.integer("polar"), cfg.integer("azimuthal")};
  p.bispectrum_rel_tol = cfg.num("tol");
  const auto k1 = vec3(cfg, "k1"), k2 = vec3(cfg, "k2");
  const auto k3 = cfg.has("k3") ? vec3(cfg, "k3") : fluct::Vec3{-k1[0] - k2[0], -k1[1] - k2[1], -k1[2] - k2[2]};
  auto norm = [](const fluct::Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); };
  json degraded = json::array();
  Csv csv(out, {"k1", "k2", "k3", "tau", "B0", "err_est"});
  for (double tau : cfg.list("tau-list")) {
    const auto b = fluct::bispectrum_B0(tau, k1, k2, k3, p);
    csv.row({norm(k1), norm(k2), norm(k3), tau, b.value, b.error});
    if (b.degraded) degraded.push_back({{"tau", tau}, {"B0", b.value}, {"error", b.error}, {"imag", b.imag}});
  }
  if (!degraded.empty()) throw NumericalFailure{"bispectrum error estimate above --tol", degraded};
  return kOk;
}

void emit_diagnostic(std::ostream& err, const std::string& kind, const std::string& sub, const std::string& message,
                     const json& extra = nullptr) {
  json j = {{"error", kind}, {"subcommand", sub}, {"message", message}};
  if (!extra.is_null()) j["diagnostics"] = extra;
  err << j.dump() << '\n';
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.threads > 0) set_default_threads(cfg.threads);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::binary);
    if (!file) throw UsageError("cannot write " + cfg.output);
    sink = &file;
  }
  try {
    const std::string& s = cfg.subcommand;
    if (s == "runpoly") return cmd_runpoly(cfg, *sink);
    if (s == "worldfun") return cmd_worldfun(cfg, *sink);
    if (s == "modes") return cmd_modes(cfg, *sink);
    if (s == "wick") return cmd_wick(cfg, *sink);
    if (s == "solve") return cmd_solve(cfg, *sink);
    if (s == "spectrum") return cmd_spectrum(cfg, *sink);
    if (s == "bispectrum") return cmd_bispectrum(cfg, *sink);
    throw UsageError("unknown subcommand " + s);
  } catch (const NumericalFailure& f) {
    emit_diagnostic(err, "numerical", cfg.subcommand, f.message, f.diagnostics);
    return kNumericalFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (argc > 1)
    for (const auto& c : commands())
      if (c.name == argv[1]) cfg.subcommand = c.name;
  try {
    if (!parse_config(argc, argv, cfg, out)) return kOk;
    return dispatch(cfg, out, err);
  } catch (const UsageError& e) {
    // first line is the message, the rest is the usage text
    const std::string what = e.what();
    const auto nl = what.find('\n');
    emit_diagnostic(err, "usage", cfg.subcommand, what.substr(0, nl));
    if (nl != std::string::npos) err << what.substr(nl + 1);
    return kUsage;
  } catch (const std::invalid_argument& e) {
    emit_diagnostic(err, "usage", cfg.subcommand, e.what());
    return kUsage;
  } catch (const std::domain_error& e) {
    emit_diagnostic(err, "usage", cfg.subcommand, e.what());
    return kUsage;
  } catch (const std::exception& e) {
    emit_diagnostic(err, "numerical", cfg.subcommand, e.what());
    return kNumericalFailure;
  }
}

}  // namespace scg::cli
