// blmix: generalized two-urn Bernoulli-Laplace chains from the command line.
// Subcommands: mix (one instance), sweep (ratio x n tables), figure (t_mix
// versus n as TSV + SVG), verify (property suites).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <blmix/blmix.hpp>
#include <blmix/verify_suites.hpp>

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_bad_params = 2;
constexpr int exit_inconclusive = 3;

// "0.01" -> 1/100 exactly; the rational backend must not inherit the binary
// rounding of a double epsilon.
blmix::Rat rat_from_decimal(const std::string& text) {
  std::string digits;
  std::int64_t frac = 0;
  bool seen_dot = false, neg = false;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  for (; i < text.size(); ++i) {
    if (text[i] == '.') {
      if (seen_dot) throw blmix::param_error("bad decimal: " + text);
      seen_dot = true;
    } else if (text[i] >= '0' && text[i] <= '9') {
      digits += text[i];
      if (seen_dot) ++frac;
    } else {
      throw blmix::param_error("bad decimal: " + text);
    }
  }
  if (digits.empty()) throw blmix::param_error("bad decimal: " + text);
  blmix::Int num(digits);
  blmix::Int den(1);
  for (std::int64_t d = 0; d < frac; ++d) den *= 10;
  blmix::Rat q(neg ? blmix::Int(-num) : num, den);
  q.canonicalize();
  return q;
}

// "50,100,150" or "50:1000:50" (inclusive range)
std::vector<std::int64_t> parse_n_list(const std::string& text) {
  std::vector<std::int64_t> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::int64_t lo = 0, hi = 0, step = 0;
    if (std::sscanf(text.c_str(), "%ld:%ld:%ld", &lo, &hi, &step) != 3 || step <= 0)
      throw blmix::param_error("bad n range: " + text + " (want lo:hi:step)");
    for (std::int64_t n = lo; n <= hi; n += step) out.push_back(n);
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stoll(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw blmix::param_error("empty n list");
  return out;
}

std::vector<double> parse_ratio_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw blmix::param_error("empty ratio list");
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << content;
}

int cmd_mix(std::int64_t n, std::int64_t m, std::int64_t r, std::int64_t k,
            const std::string& eps_text, const std::string& backend, bool extremes,
            std::int64_t cap, int threads) {
  const blmix::ChainParams p{n, m, r, k};
  p.validate();
  const blmix::Rat eps_exact = rat_from_decimal(eps_text);
  const double eps = std::stod(eps_text);
  if (!(eps > 0.0 && eps < 1.0)) throw blmix::param_error("epsilon must be in (0,1)");

  blmix::MixingCurve curve;
  if (backend == "rational") {
    if (extremes) throw blmix::param_error("--extremes is float-only");
    curve = blmix::worst_case_curve_exact(p, eps_exact, cap, threads);
  } else if (extremes) {
    const auto K = blmix::build_kernel<double>(p, threads);
    const std::int64_t c = cap > 0 ? cap : blmix::default_step_cap(p);
    std::cerr << "note: --extremes restricts the sup to the extreme starts; "
                 "the result is approximate\n";
    curve = blmix::worst_case_curve(K, eps, c, threads, blmix::StartSet::extremes);
  } else if (cap > 0) {
    const auto K = blmix::build_kernel<double>(p, threads);
    curve = blmix::worst_case_curve(K, eps, cap, threads);
  } else {
    curve = blmix::worst_case_curve(p, eps, threads);
  }

  json out;
  out["params"] = {{"n", n}, {"m", m}, {"r", r}, {"k", k}};
  out["epsilon"] = eps;
  out["non_mixing"] = curve.status == blmix::MixStatus::non_mixing;
  if (curve.status == blmix::MixStatus::mixed)
    out["t_mix"] = *curve.t_mix;
  else
    out["t_mix"] = nullptr;
  const auto sd = blmix::eigen_data(p);
  out["lambda1"] = sd.lambda1;
  out["lambda2"] = sd.lambda2 ? json(*sd.lambda2) : json(nullptr);
  out["t_n"] = sd.t_n ? json(*sd.t_n) : json(nullptr);
  out["q_n"] = sd.q_n ? json(*sd.q_n) : json(nullptr);
  out["regime"] = blmix::regime_name(sd.regime);
  out["backend"] = backend;
  std::cout << out.dump(2) << "\n";

  if (curve.status == blmix::MixStatus::inconclusive) {
    std::cerr << "inconclusive: cap " << curve.cap << " reached with d = "
              << curve.d.back() << "; raise --cap\n";
    return exit_inconclusive;
  }
  return exit_ok;
}

int cmd_sweep(const blmix::SweepGrid& grid, const std::string& backend, int threads,
              const std::string& out_path) {
  const blmix::Backend be =
      backend == "rational" ? blmix::Backend::rational : blmix::Backend::float64;
  const auto result = blmix::sweep(grid, threads, be);
  write_output(out_path, blmix::to_csv(result));

  std::string errors;
  for (std::size_t ri = 0; ri < grid.ratios.size(); ++ri)
    for (std::size_t ni = 0; ni < grid.ns.size(); ++ni) {
      const auto& c = result.cell(ri, ni);
      if (c.kind == blmix::SweepCell::Kind::error)
        errors += "ratio " + blmix::detail::format_ratio(grid.ratios[ri]) + ", n " +
                  std::to_string(grid.ns[ni]) + ": " + c.error + "\n";
    }
  if (!errors.empty()) {
    if (out_path.empty() || out_path == "-") {
      std::cerr << "cells with errors:\n" << errors;
    } else {
      std::ofstream log(out_path + ".errors.log", std::ios::binary);
      log << errors;
      std::cerr << "some cells failed; see " << out_path << ".errors.log\n";
    }
  }
  return exit_ok;
}

int cmd_figure(int preset, double kn, double rn, double mn, std::vector<std::int64_t> ns,
               const std::string& eps_text, int threads, std::string out_base) {
  blmix::RatioTriple ratios;
  if (preset == 1) {
    ratios = {0.05, 0.40, 0.40};
    if (ns.empty()) ns = blmix::n_range(40, 1000, 20);
  } else if (preset == 2) {
    ratios = {0.10, 0.40, 0.40};
    if (ns.empty()) ns = blmix::n_range(40, 1000, 20);
  } else if (preset == 3) {
    ratios = {0.25, 0.50, 0.50};
    if (ns.empty()) ns = blmix::n_range(52, 1000, 4);
  } else {
    if (kn <= 0 || rn <= 0) throw blmix::param_error("figure: need --kn and --rn (or --preset)");
    ratios = {kn, rn, mn > 0 ? mn : rn};
    if (ns.empty()) throw blmix::param_error("figure: need --ns for custom ratios");
  }
  rat_from_decimal(eps_text);  // syntax check
  const double eps = std::stod(eps_text);

  std::vector<blmix::FigurePoint> pts(ns.size());
  blmix::parallel_for(static_cast<std::int64_t>(ns.size()), threads,
                      [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i) {
                          const std::int64_t n = ns[static_cast<std::size_t>(i)];
                          blmix::FigurePoint fp;
                          fp.n = n;
                          try {
                            const auto p = blmix::params_from_ratios(ratios, n);
                            const auto curve = blmix::worst_case_curve(p, eps, 1);
                            fp.cell = curve.status == blmix::MixStatus::mixed
                                          ? blmix::SweepCell::value(*curve.t_mix)
                                          : (curve.status == blmix::MixStatus::non_mixing
                                                 ? blmix::SweepCell::inf()
                                                 : blmix::SweepCell::err("cap reached"));
                          } catch (const std::exception& e2) {
                            fp.cell = blmix::SweepCell::err(e2.what());
                          }
                          pts[static_cast<std::size_t>(i)] = fp;
                        }
                      });

  // drop cells whose parameters were not integral, with a notice
  std::vector<blmix::FigurePoint> kept;
  for (const auto& fp : pts) {
    if (fp.cell.kind == blmix::SweepCell::Kind::error &&
        fp.cell.error.find("non-integral") != std::string::npos) {
      std::cerr << "skipping n = " << fp.n << ": " << fp.cell.error << "\n";
      continue;
    }
    kept.push_back(fp);
  }

  if (out_base.empty()) out_base = "figure";
  char title[128];
  std::snprintf(title, sizeof title, "t_mix(%s) at k/n=%g, r/n=%g, m/n=%g",
                eps_text.c_str(), ratios.k, ratios.r, ratios.m);
  write_output(out_base + ".tsv", blmix::to_tsv(kept));
  write_output(out_base + ".svg", blmix::figure_svg(kept, title));
  std::cerr << "wrote " << out_base << ".tsv and " << out_base << ".svg\n";
  return exit_ok;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int threads) {
  std::vector<std::pair<std::string, std::vector<blmix::CheckResult>>> suites;
  if (suite == "spectral" || suite == "all")
    suites.emplace_back("spectral", blmix::verify_spectral(threads));
  if (suite == "coupling" || suite == "all")
    suites.emplace_back("coupling", blmix::verify_coupling(seed));
  if (suite == "llt" || suite == "all")
    suites.emplace_back("llt", blmix::verify_llt());
  if (suites.empty()) throw blmix::param_error("unknown suite: " + suite);

  bool pass = true;
  json out;
  out["seed"] = seed;
  json jsuites = json::array();
  for (const auto& [name, checks] : suites) {
    json jchecks = json::array();
    for (const auto& c : checks) {
      jchecks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      pass &= c.pass;
    }
    jsuites.push_back({{"suite", name}, {"checks", jchecks}, {"pass", blmix::all_pass(checks)}});
  }
  out["suites"] = jsuites;
  out["pass"] = pass;
  std::cout << out.dump(2) << "\n";
  return pass ? exit_ok : exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Bernoulli-Laplace urn chains: mixing times, sweeps, diagnostics"};
  app.require_subcommand(1);

  // mix
  auto* mix = app.add_subcommand("mix", "mixing time of one chain instance");
  std::int64_t n = 0, m = 0, r = 0, k = 0, cap = 0;
  std::string eps_text = "0.01", backend = "float";
  bool extremes = false, all_starts = false;
  int threads_flag = 0;
  mix->add_option("--n", n, "total balls")->required();
  mix->add_option("--m", m, "left urn size")->required();
  mix->add_option("--r", r, "red balls")->required();
  mix->add_option("--k", k, "swap size")->required();
  mix->add_option("--epsilon", eps_text, "TV threshold (default 0.01)");
  mix->add_option("--backend", backend, "float | rational")
      ->check(CLI::IsMember({"float", "rational"}));
  mix->add_flag("--extremes", extremes, "sup over the extreme starts only (approximate)");
  mix->add_flag("--all-starts", all_starts, "sup over all starts (default)");
  mix->add_option("--cap", cap, "iteration cap override");
  mix->add_option("--threads", threads_flag, "parallelism degree");

  // sweep
  auto* sw = app.add_subcommand("sweep", "mixing-time table over a (ratio, n) grid");
  int table = 0;
  std::string axis = "k", ratios_text, ns_text, out_path;
  double k_ratio = 0.02, r_ratio = 0.5;
  std::string sweep_backend = "float", sweep_eps = "0.01";
  sw->add_option("--table", table, "built-in grid 1, 2 or 3")->check(CLI::Range(1, 3));
  sw->add_option("--axis", axis, "varying ratio: k, r or m")
      ->check(CLI::IsMember({"k", "r", "m"}));
  sw->add_option("--ratios", ratios_text, "comma list of ratios for the axis");
  sw->add_option("--ns", ns_text, "comma list or lo:hi:step of n values");
  sw->add_option("--k-ratio", k_ratio, "fixed k/n for axes r and m (default 0.02)");
  sw->add_option("--r-ratio", r_ratio, "fixed r/n for axes k and m (default 0.5)");
  sw->add_option("--epsilon", sweep_eps, "TV threshold (default 0.01)");
  sw->add_option("--backend", sweep_backend, "float | rational")
      ->check(CLI::IsMember({"float", "rational"}));
  sw->add_option("--out", out_path, "CSV path (default stdout)");
  sw->add_option("--threads", threads_flag, "parallelism degree");

  // figure
  auto* fig = app.add_subcommand("figure", "t_mix versus n as TSV and SVG");
  int preset = 0;
  double kn = 0, rn = 0, mn = 0;
  std::string fig_ns, fig_out = "figure", fig_eps = "0.01";
  fig->add_option("--preset", preset, "1: k/n=0.05 r/n=0.40 m=r; 2: k/n=0.10 r/n=0.40 m=r; "
                                      "3: k/n=0.25 r/n=0.50 m=r")
      ->check(CLI::Range(1, 3));
  fig->add_option("--kn", kn, "custom k/n");
  fig->add_option("--rn", rn, "custom r/n");
  fig->add_option("--mn", mn, "custom m/n (default: m = r)");
  fig->add_option("--ns", fig_ns, "comma list or lo:hi:step of n values");
  fig->add_option("--epsilon", fig_eps, "TV threshold (default 0.01)");
  fig->add_option("--out", fig_out, "output base path (default 'figure')");
  fig->add_option("--threads", threads_flag, "parallelism degree");

  // verify
  auto* ver = app.add_subcommand("verify", "run the property-check suites");
  std::string suite = "all";
  std::uint64_t seed = 42;
  ver->add_option("--suite", suite, "spectral | coupling | llt | all")
      ->check(CLI::IsMember({"spectral", "coupling", "llt", "all"}));
  ver->add_option("--seed", seed, "Monte-Carlo seed (default 42)");
  ver->add_option("--threads", threads_flag, "parallelism degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_bad_params;
  }

  const int threads = blmix::resolve_threads(threads_flag);

  try {
    if (*mix) return cmd_mix(n, m, r, k, eps_text, backend, extremes, cap, threads);
    if (*sw) {
      blmix::SweepGrid grid;
      if (table > 0) {
        grid = blmix::table_grid(table);
      } else {
        if (ratios_text.empty() || ns_text.empty())
          throw blmix::param_error("sweep: need --table or both --ratios and --ns");
        grid.axis = axis == "k" ? blmix::SweepAxis::k
                                : (axis == "r" ? blmix::SweepAxis::r : blmix::SweepAxis::m);
        grid.ratios = parse_ratio_list(ratios_text);
        grid.ns = parse_n_list(ns_text);
        grid.k_ratio = k_ratio;
        grid.r_ratio = r_ratio;
      }
      grid.epsilon_exact = rat_from_decimal(sweep_eps);
      grid.epsilon = std::stod(sweep_eps);
      return cmd_sweep(grid, sweep_backend, threads, out_path);
    }
    if (*fig)
      return cmd_figure(preset, kn, rn, mn, fig_ns.empty() ? std::vector<std::int64_t>{}
                                                           : parse_n_list(fig_ns),
                        fig_eps, threads, fig_out);
    if (*ver) return cmd_verify(suite, seed, threads);
  } catch (const blmix::param_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_params;
  } catch (const blmix::regime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_params;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_ok;
}
