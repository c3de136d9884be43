// linfty: numerical laboratory for L-infinity eigenvalue geometry on grids.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "linfty/eigensolve.hpp"
#include "linfty/lipcalc.hpp"
#include "linfty/measures.hpp"
#include "linfty/metric.hpp"
#include "linfty/transport.hpp"

using namespace linfty;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string shape_path;
  double h = 1.0 / 64;
  double tol = 0.05;
  std::vector<double> radii_factors = {8, 4, 2};
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::string outdir = ".";
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t x = 1469598103934665603ull;
  for (unsigned char c : s) {
    x ^= c;
    x *= 1099511628211ull;
  }
  return x;
}

// the output directory is not semantic configuration, so identical runs hash
// identically wherever they write
json config_json(const RunConfig& cfg) {
  return json{{"shape", cfg.shape_path},    {"h", cfg.h},         {"tol", cfg.tol},
              {"radii", cfg.radii_factors}, {"delta", cfg.delta}, {"seed", cfg.seed}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// every run leaves a manifest and a schema-conforming summary
void emit(const RunConfig& cfg, const std::string& command, const json& data) {
  fs::create_directories(cfg.outdir);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(config_json(cfg).dump() + command)));
  json envelope{{"command", command},
                {"version", kVersion},
                {"config_hash", hash},
                {"seed", cfg.seed},
                {"data", data}};
  write_json(fs::path(cfg.outdir) / "summary.json", envelope);
  write_json(fs::path(cfg.outdir) / "manifest.json",
             json{{"version", kVersion},
                  {"config_hash", hash},
                  {"command", command},
                  {"config", config_json(cfg)}});
}

DomainPtr make_domain(const RunConfig& cfg) {
  if (cfg.shape_path.empty())
    throw Error(ErrorCode::InvalidArgument, "--shape is required for this command");
  return rasterize(load_shape(cfg.shape_path), cfg.h);
}

MollifierSchedule schedule_for(const RunConfig& cfg, double h) {
  MollifierSchedule s;
  for (double f : cfg.radii_factors) s.radii.push_back(f * h);
  s.kernel = KernelKind::Box;
  s.validate(h);
  return s;
}

json check_to_json(const CheckReport& rep) {
  json items = json::array();
  for (const auto& it : rep.items)
    items.push_back(
        {{"name", it.name}, {"passed", it.passed}, {"worst", it.worst}, {"detail", it.detail}});
  return json{{"passed", rep.passed()}, {"items", items}};
}

ScalarField load_or_default_field(const DomainPtr& dom, const std::string& upath) {
  if (upath.empty()) return distance_to_boundary(dom);
  return load_field_csv(dom, upath);
}

// ---- figure gallery -------------------------------------------------------

struct FigureSpec {
  std::string name;
  DomainPtr dom;
  ScalarField u;
  std::function<bool(Vec2)> caption_member;
  std::function<double(Vec2)> exceptional_dist;
};

std::vector<FigureSpec> figure_gallery(double h) {
  std::vector<FigureSpec> out;
  {
    auto dom = rasterize(Interval{-1, 1}, h);
    out.push_back({"interval_distance", dom, distance_to_boundary(dom),
                   [](Vec2 p) { return p.x != 0.0; }, [](Vec2 p) { return std::abs(p.x); }});
  }
  {
    auto dom = rasterize(Interval{-1, 1}, h);
    ScalarField u(dom);
    for (int i : dom->active_nodes) {
      double x = dom->pos(i).x;
      u[i] = 1 - 2 * std::abs(x) + x * x;
    }
    out.push_back({"smooth_peak", dom, u, [](Vec2) { return false; },
                   [](Vec2 p) { return std::abs(p.x); }});
  }
  {
    auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
    auto diag = [](Vec2 p) {
      return std::min(std::abs(p.x - p.y), std::abs(p.x + p.y)) / std::sqrt(2.0);
    };
    out.push_back({"square_distance", dom, distance_to_boundary(dom),
                   [diag](Vec2 p) { return diag(p) > 1e-12; }, diag});
  }
  {
    auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
    ScalarField u(dom);
    for (int i : dom->active_nodes) {
      auto [x, y] = dom->pos(i);
      double phi = 1 - 2 * std::abs(x) + x * x;
      double psi = y < -0.5 ? 2 * (y + 1) : (y > 0.5 ? 2 * (1 - y) : 1.0);
      u[i] = phi * psi;
    }
    out.push_back(
        {"mountain_ridge", dom, u,
         [](Vec2 p) { return p.x == 0.0 && std::abs(p.y) > 0.5 && std::abs(p.y) < 1; },
         [](Vec2 p) { return std::min(std::abs(p.x), std::abs(std::abs(p.y) - 0.5)); }});
  }
  return out;
}

json run_figures(const RunConfig& cfg) {
  double h = cfg.h;
  json data = json::array();
  for (auto& fig : figure_gallery(h)) {
    auto sched = schedule_for(cfg, h);
    auto rep = omega_max_grad(fig.u, sched, cfg.delta);
    save_indicator_pgm(fig.dom, rep.nodes,
                       (fs::path(cfg.outdir) / ("omega_max_" + fig.name + ".pgm")).string());
    long agree = 0, total = 0;
    for (int i : fig.dom->interior_nodes) {
      Vec2 p = fig.dom->pos(i);
      if (fig.exceptional_dist(p) <= 4 * h + 1e-12) continue;
      ++total;
      if (static_cast<bool>(rep.member[i]) == fig.caption_member(p)) ++agree;
    }
    data.push_back({{"figure", fig.name},
                    {"members", rep.nodes.size()},
                    {"agreement", total ? static_cast<double>(agree) / total : 1.0},
                    {"scored_nodes", total}});
  }
  return data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L-infinity eigenvalue laboratory"};
  app.set_help_flag("--help", "print help");  // keep --h free for the spacing
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--shape", cfg.shape_path, "shape JSON file");
  app.add_option("--h", cfg.h, "grid spacing");
  app.add_option("--tol", cfg.tol, "diagnostic tolerance");
  app.add_option("--delta", cfg.delta, "omega_max slope threshold margin");
  app.add_option("--radii", cfg.radii_factors, "mollifier radii in units of h")->delimiter(',');
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--out", cfg.outdir, "output directory");

  // pre-read the config file so explicit flags can override it
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
      std::cerr << "error: invalid config JSON: " << config_path << "\n";
      return 1;
    }
    if (j.contains("shape")) cfg.shape_path = j["shape"].get<std::string>();
    if (j.contains("h")) cfg.h = j["h"].get<double>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("radii")) cfg.radii_factors = j["radii"].get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("outdir")) cfg.outdir = j["outdir"].get<std::string>();
  }

  auto* c_domain = app.add_subcommand("domain", "rasterize a shape and report node classes");
  auto* c_dist = app.add_subcommand("dist", "boundary distance transform");
  auto* c_ridge = app.add_subcommand("ridge", "high ridge extraction");
  double ridge_tol = -1;
  c_ridge->add_option("--ridge-tol", ridge_tol, "ridge tolerance (default h)");
  auto* c_inball = app.add_subcommand("inball", "generalized inball of the high ridge");
  auto* c_inner = app.add_subcommand("inner-dist", "inner distance function");
  auto* c_rayleigh = app.add_subcommand("rayleigh", "Rayleigh quotient of a field");
  std::string upath;
  c_rayleigh->add_option("--u", upath, "field CSV (default: distance transform)");
  auto* c_omega = app.add_subcommand("omegamax", "mollified maximal-gradient set");
  std::string omega_u;
  c_omega->add_option("--u", omega_u, "field CSV (default: distance transform)");
  auto* c_eig = app.add_subcommand("eig", "finite-p Rayleigh sweep");
  std::vector<double> ps{2};
  c_eig->add_option("--p", ps, "p values, increasing")->delimiter(',');
  int max_iters = 1500;
  c_eig->add_option("--max-iters", max_iters, "solver iteration cap");
  auto* c_inf = app.add_subcommand("infharm", "infinity-harmonic solve");
  std::string fixed_spec = "ridge=max";
  c_inf->add_option("--fixed", fixed_spec, "ridge=VAL|max (plus boundary at 0)");
  auto* c_sign = app.add_subcommand("sign-changing", "sign-changing minimizer construction");
  auto* c_env = app.add_subcommand("envelope", "distance-envelope diagnostics");
  std::string env_u;
  c_env->add_option("--u", env_u, "field CSV (default: distance transform)");

  auto* c_calib = app.add_subcommand("calib", "calibration diagnostics");
  c_calib->require_subcommand(1);
  auto* c_calib_check = c_calib->add_subcommand("check", "check a flux against a field");
  std::string cal_u, cal_flux;
  c_calib_check->add_option("--u", cal_u, "field CSV (default: distance transform)");
  c_calib_check->add_option("--flux", cal_flux, "flux CSV")->required();
  auto* c_calib_ball = c_calib->add_subcommand("ball", "fundamental-solution flux on a disk");

  auto* c_eigcheck = app.add_subcommand("eigen-check", "measure-form eigen-system diagnostics");
  std::string ec_u, ec_nu, ec_flux;
  double ec_lambda = 1.0;
  c_eigcheck->add_option("--u", ec_u, "field CSV (default: distance transform)");
  c_eigcheck->add_option("--nu", ec_nu, "measure CSV")->required();
  c_eigcheck->add_option("--flux", ec_flux, "flux CSV")->required();
  c_eigcheck->add_option("--lambda", ec_lambda, "eigenvalue");

  auto* c_ot = app.add_subcommand("ot", "optimal transport quantities");
  c_ot->require_subcommand(1);
  auto* c_jstar = c_ot->add_subcommand("jstar", "J* of a measure");
  std::string mu_path, rho_path, method = "flow";
  c_jstar->add_option("--mu", mu_path, "measure CSV")->required();
  c_jstar->add_option("--method", method, "closed|flow");
  auto* c_w1 = c_ot->add_subcommand("w1", "Wasserstein-1 distance");
  c_w1->add_option("--mu", mu_path, "measure CSV")->required();
  c_w1->add_option("--rho", rho_path, "measure CSV")->required();
  auto* c_kr = c_ot->add_subcommand("kr", "Kantorovich-Rubinstein norm");
  bool kr_partial = false;
  c_kr->add_option("--mu", mu_path, "measure CSV")->required();
  c_kr->add_flag("--partial", kr_partial, "boundary-quotient variant");
  auto* c_dual = c_ot->add_subcommand("dualcheck", "dual minimizer diagnostics");
  int samples = 200;
  c_dual->add_option("--samples", samples, "sampled Diracs/measures");

  auto* c_fig = app.add_subcommand("figures", "mollified-gradient set gallery");

  // global options may trail the subcommand
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
    for (auto* s : a->get_subcommands([](const CLI::App*) { return true; })) {
      s->fallthrough();
      enable_fallthrough(s);
    }
  };
  enable_fallthrough(&app);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_domain->parsed()) {
      auto dom = make_domain(cfg);
      fs::create_directories(cfg.outdir);
      save_indicator_pgm(dom, dom->interior_nodes, (fs::path(cfg.outdir) / "domain.pgm").string());
      emit(cfg, "domain",
           {{"nx", dom->nx},
            {"ny", dom->ny},
            {"h", dom->h},
            {"interior", dom->interior_nodes.size()},
            {"boundary", dom->boundary_nodes.size()}});
    } else if (c_dist->parsed()) {
      auto dom = make_domain(cfg);
      auto d = distance_to_boundary(dom);
      fs::create_directories(cfg.outdir);
      save_field_csv(d, (fs::path(cfg.outdir) / "d.csv").string());
      save_field_pgm(d, (fs::path(cfg.outdir) / "d.pgm").string());
      emit(cfg, "dist", {{"r", inradius(d)}});
    } else if (c_ridge->parsed()) {
      auto dom = make_domain(cfg);
      auto d = distance_to_boundary(dom);
      auto ridge = high_ridge(d, ridge_tol < 0 ? dom->h : ridge_tol);
      fs::create_directories(cfg.outdir);
      save_indicator_pgm(dom, ridge.nodes, (fs::path(cfg.outdir) / "ridge.pgm").string());
      emit(cfg, "ridge", {{"r", inradius(d)}, {"ridge_size", ridge.nodes.size()}});
    } else if (c_inball->parsed()) {
      auto dom = make_domain(cfg);
      auto d = distance_to_boundary(dom);
      auto ridge = high_ridge(d, dom->h);
      auto ball = generalized_inball(dom, ridge, inradius(d));
      fs::create_directories(cfg.outdir);
      save_indicator_pgm(dom, ball, (fs::path(cfg.outdir) / "inball.pgm").string());
      emit(cfg, "inball",
           {{"r", inradius(d)},
            {"ridge_size", ridge.nodes.size()},
            {"ball_size", ball.size()},
            {"covers_interior", ball.size() >= dom->interior_nodes.size()}});
    } else if (c_inner->parsed()) {
      auto dom = make_domain(cfg);
      auto d = distance_to_boundary(dom);
      auto ridge = high_ridge(d, dom->h);
      auto din = inner_distance(dom, ridge, inradius(d));
      fs::create_directories(cfg.outdir);
      save_field_csv(din, (fs::path(cfg.outdir) / "din.csv").string());
      save_field_pgm(din, (fs::path(cfg.outdir) / "din.pgm").string());
      double gap = 0;
      for (int i : dom->active_nodes) gap = std::max(gap, std::abs(din[i] - d[i]));
      emit(cfg, "inner-dist", {{"r", inradius(d)}, {"sup_gap_to_d", gap}});
    } else if (c_rayleigh->parsed()) {
      auto dom = make_domain(cfg);
      auto u = load_or_default_field(dom, upath);
      emit(cfg, "rayleigh",
           {{"lip", lip_constant(u)}, {"sup", u.max_abs()}, {"rayleigh", rayleigh(u)}});
    } else if (c_omega->parsed()) {
      auto dom = make_domain(cfg);
      auto u = load_or_default_field(dom, omega_u);
      auto rep = omega_max_grad(u, schedule_for(cfg, dom->h), cfg.delta);
      fs::create_directories(cfg.outdir);
      save_indicator_pgm(dom, rep.nodes, (fs::path(cfg.outdir) / "omega_max.pgm").string());
      emit(cfg, "omegamax",
           {{"lip", rep.lip},
            {"sup", u.max_abs()},
            {"rayleigh", rayleigh(u)},
            {"threshold", rep.threshold},
            {"set_size", rep.nodes.size()}});
    } else if (c_eig->parsed()) {
      auto dom = make_domain(cfg);
      PSolveOptions opts;
      opts.max_iters = max_iters;
      opts.tol = 1e-4;
      auto sw = p_sweep(dom, ps, opts);
      json table = json::array();
      for (auto& e : sw.entries)
        table.push_back({{"p", e.p},
                         {"lambda", e.lambda},
                         {"iterations", e.iterations},
                         {"converged", e.converged}});
      emit(cfg, "eig", {{"table", table}, {"r", sw.inradius}, {"limit_gap", sw.limit_gap}});
    } else if (c_inf->parsed()) {
      auto dom = make_domain(cfg);
      auto d = distance_to_boundary(dom);
      double r = inradius(d);
      double value = r;
      auto eq = fixed_spec.find('=');
      if (eq != std::string::npos && fixed_spec.substr(eq + 1) != "max")
        value = std::stod(fixed_spec.substr(eq + 1));
      auto ridge = high_ridge(d, 0.0);
      std::vector<int> fixed = dom->boundary_nodes;
      std::vector<double> vals(fixed.size(), 0.0);
      for (int i : ridge.nodes) {
        fixed.push_back(i);
        vals.push_back(value);
      }
      auto res = infinity_harmonic(dom, fixed, vals);
      fs::create_directories(cfg.outdir);
      save_field_csv(res.u, (fs::path(cfg.outdir) / "u.csv").string());
      save_field_pgm(res.u, (fs::path(cfg.outdir) / "u.pgm").string());
      emit(cfg, "infharm",
           {{"sweeps", res.sweeps},
            {"rayleigh", rayleigh(res.u)},
            {"data_consistent", res.data_consistent},
            {"data_violation", res.data_violation}});
      if (!res.data_consistent)
        std::cerr << "warning: fixed data exceeds Lipschitz feasibility by " << res.data_violation
                  << "\n";
    } else if (c_sign->parsed()) {
      auto dom = make_domain(cfg);
      auto d = distance_to_boundary(dom);
      auto ridge = high_ridge(d, dom->h);
      auto u = construct_sign_changing(dom, ridge, inradius(d));
      fs::create_directories(cfg.outdir);
      save_field_csv(u, (fs::path(cfg.outdir) / "u.csv").string());
      save_field_pgm(u, (fs::path(cfg.outdir) / "u.pgm").string());
      double mn = 0;
      for (int i : dom->active_nodes) mn = std::min(mn, u[i]);
      emit(cfg, "sign-changing",
           {{"min", mn},
            {"max", u.max_value()},
            {"lip", lip_constant(u)},
            {"rayleigh", rayleigh(u)}});
    } else if (c_env->parsed()) {
      auto dom = make_domain(cfg);
      auto u = load_or_default_field(dom, env_u);
      double lip = lip_constant(u);
      ScalarField un(dom);
      for (int i : dom->active_nodes) un[i] = u[i] / lip;
      auto rep = check_envelope(un);
      emit(cfg, "envelope",
           {{"below_dmax", rep.below_dmax},
            {"argmax_on_ridge", rep.argmax_on_ridge},
            {"above_din", rep.above_din},
            {"above_din_evaluated", rep.above_din_evaluated}});
      return rep.below_dmax ? 0 : 2;
    } else if (c_calib_check->parsed()) {
      auto dom = make_domain(cfg);
      auto u = load_or_default_field(dom, cal_u);
      auto flux = load_flux_csv(dom, cal_flux);
      auto rep = calibration_check(u, flux, cfg.tol);
      emit(cfg, "calib-check", check_to_json(rep));
      return rep.passed() ? 0 : 2;
    } else if (c_calib_ball->parsed()) {
      auto dom = make_domain(cfg);
      auto bc = ball_calibration(dom);
      fs::create_directories(cfg.outdir);
      save_measure_csv(bc.nu, (fs::path(cfg.outdir) / "nu.csv").string());
      save_flux_csv(bc.flux, (fs::path(cfg.outdir) / "flux.csv").string());
      emit(cfg, "calib-ball",
           {{"total_variation", bc.flux.total_variation()}, {"center_node", bc.center_node}});
    } else if (c_eigcheck->parsed()) {
      auto dom = make_domain(cfg);
      auto u = load_or_default_field(dom, ec_u);
      auto nu = load_measure_csv(dom, ec_nu);
      auto flux = load_flux_csv(dom, ec_flux);
      auto rep = eigen_system_check(u, ec_lambda, nu, flux, cfg.tol);
      emit(cfg, "eigen-check", check_to_json(rep));
      return rep.passed() ? 0 : 2;
    } else if (c_jstar->parsed()) {
      auto dom = make_domain(cfg);
      auto mu = load_measure_csv(dom, mu_path);
      json data;
      if (method == "closed") {
        data = {{"value", j_star_closed(mu)}, {"method", "closed"}};
      } else {
        auto flow = j_star_flow(mu);
        data = {{"value", flow.value}, {"method", "flow"}, {"augmentations", flow.augmentations}};
      }
      emit(cfg, "ot-jstar", data);
    } else if (c_w1->parsed()) {
      auto dom = make_domain(cfg);
      auto mu = load_measure_csv(dom, mu_path);
      auto rho = load_measure_csv(dom, rho_path);
      emit(cfg, "ot-w1", {{"value", w1(mu, rho)}});
    } else if (c_kr->parsed()) {
      auto dom = make_domain(cfg);
      auto mu = load_measure_csv(dom, mu_path);
      emit(cfg, "ot-kr",
           {{"value", kr_partial ? kr_partial_norm(mu) : kr_norm(mu)}, {"partial", kr_partial}});
    } else if (c_dual->parsed()) {
      auto dom = make_domain(cfg);
      auto rep = dual_minimizer_check(dom, samples, cfg.tol, cfg.seed);
      auto rep2 = graph_duality_check(dom, samples, 1e-9, cfg.seed);
      json data = check_to_json(rep);
      data["graph_duality"] = check_to_json(rep2);
      emit(cfg, "ot-dualcheck", data);
      return rep.passed() && rep2.passed() ? 0 : 2;
    } else if (c_fig->parsed()) {
      fs::create_directories(cfg.outdir);
      emit(cfg, "figures", run_figures(cfg));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
