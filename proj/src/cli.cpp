#include "ftcy/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>

#include "ftcy/construction.hpp"
#include "ftcy/errors.hpp"
#include "ftcy/fdf.hpp"
#include "ftcy/reference.hpp"
#include "ftcy/solver.hpp"
#include "ftcy/spectral.hpp"

namespace fs = std::filesystem;

namespace ftcy {
namespace cli {

namespace {

constexpr const char* kCrlf = "\r\n";  // RFC-4180 line ending

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw io_error("cannot write " + p.string());
  return os;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create directory " + dir + ": " + ec.message());
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return exit_ok;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  }
}

std::map<std::string, std::string> parse_kv_file(const fs::path& p) {
  std::ifstream is(p);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace

int run_construct(const ConstructOptions& opt) {
  return guarded([&] {
    ConstructionParams params;
    params.n = opt.n;
    params.delta = opt.delta;
    params.grid = opt.grid;
    params.tol = opt.tol;
    ConstructionResult res = construct(params);

    ensure_dir(opt.out_dir);
    fs::path dir(opt.out_dir);
    write_fdf((dir / "u.fdf").string(), res.u);
    write_fdf((dir / "v.fdf").string(), res.v);
    write_fdf((dir / "omega.fdf").string(), res.omega.g, "metric");

    double c0_expected = std::pow(params.delta, -1.0 / (2.0 * (params.n - 1)));
    {
      auto os = open_out(dir / "report.txt");
      os << std::setprecision(17);
      os << "command = construct\n";
      os << "delta = " << params.delta << "\n";
      os << "n = " << params.n << "\n";
      os << "grid = " << params.grid << "\n";
      os << "k = " << res.k << "\n";
      os << "C0 = " << res.C0 << "\n";
      os << "C0_expected = " << c0_expected << "\n";
      os << "residual.det_identity = " << res.residuals.det_identity << "\n";
      os << "residual.ricci_sup = " << res.residuals.ricci_sup << "\n";
      os << "residual.c0_constancy = " << res.residuals.c0_constancy << "\n";
      os << "margin.one_plus_lap_u = " << res.min_one_plus_lap_u << "\n";
      os << "margin.one_plus_lap_v = " << res.min_one_plus_lap_v << "\n";
    }
    {
      auto os = open_out(dir / "plot.csv");
      os << std::setprecision(17);
      os << "x1,one_plus_lap_u,one_plus_lap_v,omega_norm" << kCrlf;
      Eigen::ArrayXd lu = dzdzbar(res.u, 1).values.real() + 1.0;
      Eigen::ArrayXd lv = dzdzbar(res.v, 1).values.real() + 1.0;
      HolomorphicVolume Omega;
      Eigen::ArrayXd nm = omega_norm_sq(res.omega, Omega).values.real().sqrt();
      for (std::int64_t i = 0; i < res.u.geom.total_points(); ++i) {
        double x1 = res.u.geom.coords(i)[res.u.geom.active_axes[0] - 1];
        os << x1 << "," << lu[i] << "," << lv[i] << "," << nm[i] << kCrlf;
      }
    }

    bool ok = res.residuals.det_identity < opt.tol &&
              res.residuals.c0_constancy < opt.tol &&
              res.residuals.ricci_sup < 1e-9;
    std::cout << "construct: delta=" << params.delta << " n=" << params.n
              << " k=" << res.k << " C0=" << res.C0
              << " det_residual=" << res.residuals.det_identity
              << (ok ? " [ok]" : " [residual failure]") << "\n";
    if (!ok) throw numeric_error("construction residuals exceed tolerance");
  });
}

int run_solve(const SolveOptions& opt) {
  return guarded([&] {
    if (opt.f_path.has_value() == opt.gen_amplitude.has_value())
      throw usage_error("pass exactly one of --f or --gen-amplitude");

    TorusGeometry geom = TorusGeometry::make(opt.n, opt.axes, opt.grid);
    Background bg = make_background(geom);

    ScalarField f_raw = constant_field(geom, 0.0);
    if (opt.f_path) {
      f_raw = read_fdf_scalar(*opt.f_path);
      if (!(f_raw.geom == geom))
        throw usage_error("source term grid does not match --n/--axes/--grid");
    } else {
      std::mt19937_64 rng(opt.gen_seed);
      f_raw = ref::random_band_limited(geom, opt.gen_max_mode, *opt.gen_amplitude,
                                       true, rng);
    }
    SourceTerm f = make_source(f_raw, bg);

    ensure_dir(opt.out_dir);
    fs::path dir(opt.out_dir);
    write_fdf((dir / "f.fdf").string(), f.f);

    NewtonConfig ncfg;
    ncfg.newton_tol = opt.tol;
    ncfg.continuation_steps = opt.continuation_steps;
    ncfg.max_iters = opt.max_iters;
    NewtonResult res = newton_solve(f, bg, ncfg);

    write_fdf((dir / "u.fdf").string(), res.state.u);
    write_fdf((dir / "omega.fdf").string(), res.state.omega.g, "metric");
    {
      auto os = open_out(dir / "residual_history.csv");
      os << std::setprecision(17);
      os << "t,iteration,residual,damping" << kCrlf;
      for (const auto& row : res.history)
        os << row.t << "," << row.iteration << "," << row.residual << ","
           << row.damping << kCrlf;
    }
    double margin = 0.0;
    if (opt.margin) margin = kernel_margin(res.state, bg);
    {
      auto os = open_out(dir / "report.txt");
      os << std::setprecision(17);
      os << "command = solve\n";
      os << "n = " << opt.n << "\n";
      os << "axes =";
      for (std::size_t d = 0; d < opt.axes.size(); ++d)
        os << (d ? "," : " ") << opt.axes[d];
      os << "\n";
      os << "grid =";
      for (std::size_t d = 0; d < opt.grid.size(); ++d)
        os << (d ? "," : " ") << opt.grid[d];
      os << "\n";
      os << "newton.iterations = " << res.iterations << "\n";
      os << "newton.residual = " << res.residual << "\n";
      os << "newton.tol = " << opt.tol << "\n";
      os << "kernel_margin = " << margin << "\n";
      os << "u.sup = " << max_abs(res.state.u) << "\n";
    }
    std::cout << "solve: converged in " << res.iterations
              << " iterations, residual " << res.residual << ", kernel margin "
              << margin << "\n";
  });
}

int run_verify(const VerifyOptions& opt) {
  int rc = guarded([&] {
    SuiteReport rep = run_suite(opt.suite);
    write_report(rep, std::cout);
    if (!opt.suite.out_dir.empty()) {
      ensure_dir(opt.suite.out_dir);
      auto os = open_out(fs::path(opt.suite.out_dir) / "verify_report.txt");
      write_report(rep, os);
    }
    if (!rep.all_pass()) throw numeric_error("verification suite failed");
  });
  return rc;
}

int run_ricci(const RicciOptions& opt) {
  return guarded([&] {
    HermitianField g = read_fdf_matrix(opt.metric_path);
    MetricField metric = make_metric(std::move(g));
    HermitianField ric = ricci_hermitian(metric);
    double sup = field_max_abs(ric);

    ensure_dir(opt.out_dir);
    fs::path dir(opt.out_dir);
    write_fdf((dir / "ricci.fdf").string(), ric, "hermitian");
    {
      auto os = open_out(dir / "report.txt");
      os << std::setprecision(17);
      os << "command = ricci\n";
      os << "metric = " << opt.metric_path << "\n";
      os << "ricci.sup = " << sup << "\n";
    }
    std::cout << "ricci: sup-norm " << sup << "\n";
  });
}

int run_report(const ReportOptions& opt) {
  return guarded([&] {
    fs::path root(opt.dir);
    if (!fs::exists(root)) throw io_error("no such directory: " + opt.dir);

    std::vector<fs::path> reports;
    auto consider = [&](const fs::path& p) {
      if (p.filename() == "report.txt") reports.push_back(p);
    };
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_regular_file()) consider(e.path());
      if (e.is_directory())
        for (const auto& sub : fs::directory_iterator(e.path()))
          if (sub.is_regular_file()) consider(sub.path());
    }
    std::sort(reports.begin(), reports.end());
    if (reports.empty())
      throw io_error("no report.txt files under " + opt.dir);

    struct Row {
      double delta, k, c0, det_res, ricci;
    };
    std::vector<Row> constructs;
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> solves;
    for (const auto& p : reports) {
      try {
        auto kv = parse_kv_file(p);
        if (kv.count("delta")) {
          constructs.push_back({std::stod(kv.at("delta")), std::stod(kv.at("k")),
                                std::stod(kv.at("C0")),
                                std::stod(kv.at("residual.det_identity")),
                                std::stod(kv.at("residual.ricci_sup"))});
        } else if (kv.count("newton.iterations")) {
          solves.emplace_back(p.parent_path().filename().string(), kv);
        }
      } catch (const std::exception&) {
        std::cerr << "report: skipping malformed " << p << "\n";
      }
    }
    std::sort(constructs.begin(), constructs.end(),
              [](const Row& a, const Row& b) { return a.delta < b.delta; });
    if (constructs.empty() && solves.empty())
      throw io_error("no readable run reports under " + opt.dir);

    bool monotone = true;
    for (std::size_t i = 1; i < constructs.size(); ++i)
      if (constructs[i].c0 >= constructs[i - 1].c0) monotone = false;

    if (!constructs.empty()) {
      auto os = open_out(root / "c0_table.csv");
      os << std::setprecision(17);
      os << "delta,k,C0,det_residual,ricci_sup" << kCrlf;
      for (const auto& r : constructs)
        os << r.delta << "," << r.k << "," << r.c0 << "," << r.det_res << ","
           << r.ricci << kCrlf;
    }
    {
      auto os = open_out(root / "summary.txt");
      os << std::setprecision(17);
      os << "command = report\n";
      os << "construct_runs = " << constructs.size() << "\n";
      os << "solve_runs = " << solves.size() << "\n";
      if (!constructs.empty())
        os << "c0_monotone_decreasing_in_delta = " << (monotone ? "yes" : "no")
           << "\n";
      for (const auto& [name, kv] : solves) {
        os << "solve." << name << ".iterations = "
           << kv.at("newton.iterations") << "\n";
        os << "solve." << name << ".residual = " << kv.at("newton.residual")
           << "\n";
      }
    }
    std::cout << "report: " << constructs.size() << " construct run(s), "
              << solves.size() << " solve run(s)\n";
  });
}

int main_entry(int argc, const char* const* argv) {
  CLI::App app{
      "Pseudospectral toolkit for form-type Calabi-Yau equations on complex "
      "tori: explicit balanced Ricci-flat metrics, identity verification, "
      "and a Newton continuation solver for the nonlinear equation."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "plain key=value option file with one [subcommand] section; "
                 "flags win");

  ConstructOptions copt;
  auto* c = app.add_subcommand("construct",
                               "build the explicit solution for a given delta");
  c->configurable();
  c->add_option("--delta", copt.delta, "target determinant factor in (0,1)")->required();
  c->add_option("--n", copt.n, "complex dimension (>= 3)");
  c->add_option("--grid", copt.grid, "grid size on the active axis");
  c->add_option("--tol", copt.tol, "residual tolerance");
  c->add_option("--out", copt.out_dir, "output directory")->required();

  SolveOptions sopt;
  auto* s = app.add_subcommand("solve", "Newton continuation for M(u) = f");
  s->configurable();
  s->add_option("--f", sopt.f_path, "source term (FDF/1 scalar)");
  s->add_option("--gen-amplitude", sopt.gen_amplitude,
                "generate a band-limited random source with this amplitude");
  s->add_option("--gen-seed", sopt.gen_seed, "generator seed");
  s->add_option("--gen-max-mode", sopt.gen_max_mode, "generator bandwidth");
  s->add_option("--n", sopt.n, "complex dimension (>= 3)");
  s->add_option("--axes", sopt.axes, "active real axes (1-based)")->delimiter(',');
  s->add_option("--grid", sopt.grid, "grid sizes, one per active axis")->delimiter(',');
  s->add_option("--tol", sopt.tol, "Newton residual tolerance");
  s->add_option("--continuation-steps", sopt.continuation_steps, "continuation steps");
  s->add_option("--max-iters", sopt.max_iters, "Newton iteration cap");
  s->add_flag("!--no-margin", sopt.margin, "skip the kernel-margin estimate");
  s->add_option("--out", sopt.out_dir, "output directory")->required();

  VerifyOptions vopt;
  vopt.suite.axes = {1, 3};
  vopt.suite.grid = {16, 16};
  auto* v = app.add_subcommand("verify", "run the identity/property suite");
  v->configurable();
  v->add_option("--n", vopt.suite.n, "complex dimension (>= 3)");
  v->add_option("--axes", vopt.suite.axes, "active real axes")->delimiter(',');
  v->add_option("--grid", vopt.suite.grid, "grid sizes")->delimiter(',');
  v->add_option("--seed", vopt.suite.seed, "seed for randomized checks");
  v->add_option("--tol", vopt.suite.tol, "default tolerance");
  v->add_option("--checks", vopt.suite.checks, "subset of checks to run")->delimiter(',');
  v->add_option("--out", vopt.suite.out_dir, "also write the report here");

  RicciOptions ropt;
  auto* r = app.add_subcommand("ricci", "hermitian Ricci curvature of a metric dump");
  r->configurable();
  r->add_option("--metric", ropt.metric_path, "metric field (FDF/1)")->required();
  r->add_option("--out", ropt.out_dir, "output directory")->required();

  ReportOptions popt;
  auto* p = app.add_subcommand("report", "merge prior outputs into one summary");
  p->configurable();
  p->add_option("--dir", popt.dir, "directory holding run outputs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return exit_usage;
  }

  if (c->parsed()) return run_construct(copt);
  if (s->parsed()) return run_solve(sopt);
  if (v->parsed()) return run_verify(vopt);
  if (r->parsed()) return run_ricci(ropt);
  if (p->parsed()) return run_report(popt);
  return exit_usage;
}

}  // namespace cli
}  // namespace ftcy
