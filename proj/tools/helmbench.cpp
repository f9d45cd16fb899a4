// Test bench CLI for the exterior Helmholtz Dirichlet solver.
//
// Subcommands: farfield, nearfield, fieldmap, eta-study, selftest.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <helmnys/helmnys.hpp>

using namespace helmnys;

namespace {

struct CliOptions {
  std::string scheme = "D";
  int npt = 16;
  std::vector<int> npan;
  double k = 28.0;
  std::string eta = "k/2";
  double tol = 1e-14;
  std::string out;
  std::string config_file;
};

// key=value lines, '#' comments; mirrors the command-line flags
void load_config_file(const std::string& path, CliOptions& opt,
                      const std::set<std::string>& cli_given) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("config", "cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw CLI::ValidationError(
          "config", path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (cli_given.count(key)) continue;  // explicit flags win
    if (key == "scheme") {
      opt.scheme = val;
    } else if (key == "npt") {
      opt.npt = std::stoi(val);
    } else if (key == "npan") {
      opt.npan.clear();
      std::stringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) opt.npan.push_back(std::stoi(tok));
    } else if (key == "k") {
      opt.k = std::stod(val);
    } else if (key == "eta") {
      opt.eta = val;
    } else if (key == "tol") {
      opt.tol = std::stod(val);
    } else if (key == "out") {
      opt.out = val;
    } else {
      throw CLI::ValidationError("config", "unknown key: " + key);
    }
  }
}

ExperimentConfig to_experiment(const CliOptions& opt) {
  ExperimentConfig cfg;
  cfg.scheme = scheme_from_name(opt.scheme);
  cfg.n_pt = opt.npt;
  cfg.n_pan_sweep = opt.npan;
  cfg.k = opt.k;
  cfg.eta_rule = opt.eta;
  cfg.gmres_tol = opt.tol;
  cfg.out_path = opt.out;
  cfg.validate();
  return cfg;
}

int check(const char* name, bool ok) {
  std::printf("%-50s %s\n", name, ok ? "pass" : "FAIL");
  return ok ? 0 : 1;
}

int run_selftest() {
  int failures = 0;

  {  // Gauss-Legendre exactness at the rule's degree
    const CanonicalRule r = gauss_legendre(16);
    double q = 0.0;
    for (int i = 0; i < 16; ++i) q += r.weights[i] * std::pow(r.nodes[i], 30);
    failures += check("quadrature: degree-30 moment", std::abs(q - 2.0 / 31.0) < 1e-15);
  }
  {  // interpolation round trip
    const CanonicalRule c = gauss_legendre(16), f = gauss_legendre(32);
    const InterpOperator P = build_P(c, f, 1), Q = build_Q(c, f, 1);
    const Eigen::MatrixXd qp = Q.block(0) * P.block(0);
    const double err =
        (qp - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff();
    failures += check("interpolation: QP = I", err < 1e-12);
  }
  {  // product weights against the closed-form log moment at x = 0
    const CanonicalRule r = gauss_legendre(16);
    const Eigen::MatrixXd w = wfrakL_init({0.0}, r);
    double q0 = 0.0, q2 = 0.0;
    for (int j = 0; j < 16; ++j) {
      q0 += w(0, j);
      q2 += w(0, j) * r.nodes[j] * r.nodes[j];
    }
    // int_{-1}^{1} log|x| dx = -2;  int x^2 log|x| dx = -2/9
    failures += check("product weights: log moments at 0",
                      std::abs(q0 + 2.0) < 1e-13 && std::abs(q2 + 2.0 / 9.0) < 1e-13);
  }
  {  // straight-panel Cauchy compensation: int_{-1}^{1} -dx/(x^2+1) = -pi/2
    Curve line;
    line.position = [](double t) { return Vec2{t, 0.0}; };
    line.derivative = [](double) { return Vec2{1.0, 0.0}; };
    line.second_derivative = [](double) { return Vec2{0.0, 0.0}; };
    const CanonicalRule r = gauss_legendre(16);
    std::vector<Vec2> nodes(16), normals(16);
    std::vector<double> sw(16);
    for (int i = 0; i < 16; ++i) {
      nodes[i] = Vec2{r.nodes[i], 0.0};
      normals[i] = Vec2{0.0, -1.0};
      sw[i] = r.weights[i];
    }
    const Vec2 target{0.0, -1.0};
    const CloseEvalCorrections cc =
        close_eval_corrections(line, -1.0, 1.0, target, nodes, normals, sw, r);
    double q = 0.0;
    for (int i = 0; i < 16; ++i)
      q += cauchy_kernel(target, nodes[i], normals[i]) * sw[i] +
           cc.cauchy_corr[i];
    failures += check("close eval: straight-panel Cauchy integral",
                      std::abs(q + 0.5 * pi) < 1e-12);
  }
  {  // kernel-split reassembly at random-ish points
    const double k = 17.0;
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
      const double t1 = 0.13 + 0.05 * i, t2 = t1 + 0.6 + 0.01 * i;
      const Curve c = starfish_curve();
      const Vec2 r = c.position(t1), rp = c.position(t2);
      const Vec2 nup = c.outward_normal(t2);
      const Complex direct = kernel_combined(k, 0.5 * k, r, rp, nup);
      const Complex re =
          reassemble(split_combined_boundary(k, 0.5 * k, r, rp, nup), r, rp, nup);
      ok = ok && std::abs(direct - re) <= 1e-11 * std::max(1.0, std::abs(direct));
    }
    failures += check("kernel split: reassembly identity", ok);
  }
  {  // end to end at small k
    const Curve curve = starfish_curve();
    const auto srcs = default_sources();
    const SystemOperator sys = make_system(curve, 40, 16, 5.0, 2.5, Scheme::D);
    Eigen::VectorXcd rhs(sys.n());
    for (int i = 0; i < sys.n(); ++i)
      rhs(i) = 2.0 * exact_field(srcs, 5.0, sys.coarse.point[i]);
    const auto gm = solve_density(sys, rhs, 1e-14, 200);
    const auto targets = farfield_targets();
    const Eigen::VectorXcd u = evaluate_field(sys, gm.x, targets);
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
      const Complex ref = exact_field(srcs, 5.0, targets[i]);
      worst = std::max(worst, std::abs(u(i) - ref) / std::abs(ref));
    }
    failures += check("end to end: far field at k=5", gm.converged && worst < 1e-12);
  }

  std::printf("selftest: %d failure(s)\n", failures);
  return failures == 0 ? 0 : 3;
}

template <typename Fn>
int guarded(const Fn& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

bool all_converged(const std::vector<ErrorReport>& series) {
  for (const auto& r : series)
    if (!r.converged || !std::isfinite(r.max_rel_err + r.avg_norm_err))
      return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panel-based test bench for exterior Helmholtz scattering"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string mode;
  std::set<std::string> given;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scheme", opt.scheme, "discretization scheme A|B|C|D");
    sub->add_option("--npt", opt.npt, "nodes per coarse panel (16 or 32)");
    sub->add_option("--npan", opt.npan, "panel counts (sweep list)")
        ->delimiter(',');
    sub->add_option("--k", opt.k, "wavenumber");
    sub->add_option("--eta", opt.eta, "coupling: k/2, k, -k or a number");
    sub->add_option("--tol", opt.tol, "GMRES relative tolerance");
    sub->add_option("--out", opt.out, "output path");
    sub->add_option("--config", opt.config_file, "key=value config file");
    sub->callback([&, sub] {
      mode = sub->get_name();
      for (const char* f :
           {"--scheme", "--npt", "--npan", "--k", "--eta", "--tol", "--out"})
        if (sub->count(f)) given.insert(f + 2);
    });
  };

  add_common(app.add_subcommand("farfield", "far-field convergence study"));
  add_common(app.add_subcommand("nearfield", "near-field convergence study"));
  add_common(app.add_subcommand("fieldmap", "700x700 field and error map"));
  add_common(app.add_subcommand("eta-study", "GMRES iterations vs eta"));
  app.add_subcommand("selftest", "quick numerical property checks")
      ->callback([&] { mode = "selftest"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (mode == "selftest") return run_selftest();

  return guarded([&]() -> int {
    if (!opt.config_file.empty()) load_config_file(opt.config_file, opt, given);
    if (opt.npan.empty())
      throw std::invalid_argument("no panel counts given (--npan)");
    const ExperimentConfig cfg = to_experiment(opt);

    if (mode == "farfield") {
      const auto series = run_far_field(cfg);
      for (const auto& r : series)
        std::printf("n_pan=%4d n=%6d max_rel_err=%.3e iters=%d\n", r.n_pan,
                    r.n_unknowns, r.max_rel_err, r.gmres_iters);
      return all_converged(series) ? 0 : 3;
    }
    if (mode == "nearfield") {
      const auto series = run_near_field(cfg);
      for (const auto& r : series)
        std::printf("n_pan=%4d n=%6d pts=%d avg=%.3e max=%.3e iters=%d\n",
                    r.n_pan, r.n_unknowns, r.n_points, r.avg_norm_err,
                    r.max_norm_err, r.gmres_iters);
      return all_converged(series) ? 0 : 3;
    }
    if (mode == "fieldmap") {
      const ErrorReport r = run_field_map(cfg);
      std::printf("n_pan=%4d n=%6d pts=%d avg=%.3e max=%.3e iters=%d\n",
                  r.n_pan, r.n_unknowns, r.n_points, r.avg_norm_err,
                  r.max_norm_err, r.gmres_iters);
      return all_converged({r}) ? 0 : 3;
    }
    // eta-study
    const auto rows = run_eta_study(cfg);
    bool ok = true;
    for (const auto& r : rows) {
      std::printf("eta=%-4s (%8.2f)  iterations=%4d  converged=%d  res=%.3e\n",
                  r.rule.c_str(), r.eta, r.iterations, r.converged,
                  r.final_residual);
      ok = ok && r.converged;
    }
    return ok ? 0 : 3;
  });
}
