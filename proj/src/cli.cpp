#include "symcurv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "symcurv/concave.hpp"
#include "symcurv/cones.hpp"
#include "symcurv/errors.hpp"
#include "symcurv/geomsolve.hpp"
#include "symcurv/hypcheck.hpp"

namespace symcurv {
namespace {

struct Row {
  std::string property;
  long trials = 0;
  double worst_value = 0.0;
  bool passed = true;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string join(const std::vector<Rational>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return s;
}

Row row_of(const VerificationReport& r) { return {r.property, r.trials, r.worst_value, r.passed}; }

class Run {
 public:
  Run(const RunConfig& cfg, std::ostream& out)
      : cfg_(cfg), out_(out), dir_(cfg.output_dir),
        op_(OperatorSpec::make(cfg.op->n, cfg.op->k, cfg.op->alphas)) {
    std::filesystem::create_directories(dir_);
  }

  int dispatch() {
    out_ << "command   " << command_name(cfg_.command) << "\n";
    out_ << "operator  " << op_.describe() << "\n";
    for (const auto& [k, v] : cfg_.echo()) out_ << "  " << std::left << std::setw(24) << k << v << "\n";
    out_ << "\n";
    switch (cfg_.command) {
      case Command::CheckConditionC: return condition_c();
      case Command::CheckConditionQ: return condition_q();
      case Command::CheckCone: return cone();
      case Command::VerifyConcavity: return concavity();
      case Command::VerifyGuan: return guan();
      case Command::Solve: return solve();
      case Command::Homotopy: return homotopy();
      case Command::BarrierCheck: return barrier();
    }
    return kExitError;
  }

 private:
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void add(const Row& r) { rows_.push_back(r); }
  void add(const VerificationReport& r) { add(row_of(r)); }

  int finish(const std::vector<std::pair<std::string, std::string>>& witness = {}) {
    std::ofstream csv(path("report.csv"));
    csv << "property,trials,worst_value,passed\n";
    bool all = true;
    out_ << std::left << std::setw(64) << "property" << std::right << std::setw(10) << "trials"
         << std::setw(26) << "worst_value" << std::setw(8) << "passed" << "\n";
    for (const auto& r : rows_) {
      csv << csv_field(r.property) << ',' << r.trials << ',' << format_double(r.worst_value) << ','
          << (r.passed ? "true" : "false") << '\n';
      out_ << std::left << std::setw(64) << r.property << std::right << std::setw(10) << r.trials
           << std::setw(26) << format_double(r.worst_value) << std::setw(8) << (r.passed ? "PASS" : "FAIL")
           << "\n";
      all = all && r.passed;
    }
    if (!csv) throw std::runtime_error("cannot write " + path("report.csv"));
    if (all) {
      out_ << "\nresult: VERIFIED\n";
      return kExitVerified;
    }
    std::ofstream w(path("witness.txt"));
    w << "# replay: rerun the config below, or feed the point to the named library check\n";
    for (const auto& [k, v] : cfg_.echo()) w << "config." << k << '=' << v << '\n';
    for (const auto& [k, v] : witness) w << k << '=' << v << '\n';
    if (!w) throw std::runtime_error("cannot write " + path("witness.txt"));
    out_ << "\nresult: REFUTED (witness in " << path("witness.txt") << ")\n";
    for (const auto& [k, v] : witness) out_ << "  " << k << " = " << v << "\n";
    return kExitRefuted;
  }

  static void append_report(std::vector<std::pair<std::string, std::string>>& w, const VerificationReport& r) {
    if (r.passed) return;
    const auto index = std::count_if(w.begin(), w.end(), [](const auto& kv) {
      return kv.first.size() > 9 && kv.first.compare(kv.first.size() - 9, 9, ".property") == 0;
    });
    const std::string p = "failed." + std::to_string(index) + ".";
    w.emplace_back(p + "property", r.property);
    w.emplace_back(p + "seed", std::to_string(r.seed));
    w.emplace_back(p + "worst_value", format_double(r.worst_value));
    w.emplace_back(p + "tol", format_double(r.tol));
    if (r.witness) w.emplace_back(p + "point", join(r.witness->values()));
    if (r.witness_aux) w.emplace_back(p + "aux", join(r.witness_aux->values()));
  }

  int condition_c() {
    const auto rep = check_condition_c(op_);
    out_ << "alpha'    " << join(rep.alphas_prime) << "\n";
    std::ofstream f(path("condition_c.csv"));
    f << "quantity,values\n";
    f << "alpha_prime," << csv_field(join(rep.alphas_prime)) << '\n';
    f << "roots," << csv_field(join(rep.roots)) << '\n';
    if (rep.all_real) {
      const std::string b = rep.witness_exact ? join(rep.exact_witness_b) : join(rep.witness_b);
      out_ << "roots     " << join(rep.roots) << "\n";
      out_ << "witness b " << b << (rep.witness_exact ? "  (exact)" : "  (checked to 1e-9)") << "\n\n";
      f << "witness_b," << csv_field(b) << '\n';
      add(Row{"condition C: alpha' polynomial real-rooted", 1, 0.0, true});
      return finish();
    }
    const auto z = *rep.failure_witness;
    out_ << "non-real root " << format_double(z.real()) << (z.imag() < 0 ? " - " : " + ")
         << format_double(std::abs(z.imag())) << "i\n\n";
    f << "complex_root," << csv_field(format_double(z.real()) + "," + format_double(z.imag())) << '\n';
    add(Row{"condition C: alpha' polynomial real-rooted", 1, -std::abs(z.imag()), false});
    return finish({{"alpha_prime", join(rep.alphas_prime)},
                   {"complex_root", format_double(z.real()) + "," + format_double(z.imag())}});
  }

  ScanOptions scan_options() const {
    ScanOptions o;
    o.midpoint_trials = cfg_.effective_trials();
    o.hessian_trials = cfg_.effective_hessian_trials();
    o.midpoint_tol = cfg_.tol;
    o.hessian_tol = cfg_.hessian_tol;
    return o;
  }

  int concavity_report(const ConcavityReport& r) {
    add(r.midpoint);
    add(r.hessian);
    std::vector<std::pair<std::string, std::string>> w;
    append_report(w, r.midpoint);
    append_report(w, r.hessian);
    return finish(w);
  }

  int condition_q() { return concavity_report(check_condition_q(op_, scan_options(), cfg_.seed)); }

  int concavity() {
    const int n = op_.n();
    const int k = op_.k();
    const int l = cfg_.effective_l();
    auto sum_alpha = [&]() {
      if (!op_.is_sum_type()) throw DomainError("field '" + cfg_.field + "' needs a sum-type operator");
      return op_.sum_alpha();
    };
    ScalarField field;
    if (cfg_.field == "root-q") {
      field = root_q_field(op_, op_.admissible_cone());
    } else if (cfg_.field == "quotient-qk") {
      field = quotient_qk_field(n, k, sum_alpha(), k);
    } else if (cfg_.field == "sigma-over-q") {
      field = sigma_over_q_field(n, k, sum_alpha());
    } else if (cfg_.field == "sum-quotient") {
      field = sum_quotient_root_field(n, k, l, sum_alpha());
    } else if (cfg_.field == "lower-quotient") {
      if (l < 1) throw DomainError("lower-quotient needs l >= 1");
      const auto cc = check_condition_c(op_);
      if (!cc.all_real) throw DomainError(op_.describe() + " has no real-rooted witness");
      field = lower_quotient_field(op_, lower_operator(op_, cc.witness_b, l, static_cast<int>(cc.witness_b.size())));
    } else {
      field = sigma_field(n, k);
    }
    out_ << "field     " << field.name << "\n\n";
    return concavity_report(concavity_scan(field, scan_options(), cfg_.seed));
  }

  int cone() {
    const ConeSpec spec = op_.admissible_cone();
    const auto seg = segment_convexity_check(spec, cfg_.effective_trials(), cfg_.seed);
    const auto ell = ellipticity_scan(op_, cfg_.effective_trials(), cfg_.seed + 1);
    add(seg);
    add(ell);
    std::vector<std::pair<std::string, std::string>> w;
    append_report(w, seg);
    append_report(w, ell);
    return finish(w);
  }

  int guan() {
    const auto [first, second] = guan_scan(op_, cfg_.effective_l(), cfg_.effective_trials(), cfg_.seed,
                                           cfg_.delta, cfg_.tol);
    add(first);
    // The delta-weighted form is reported but not part of the verdict.
    add(Row{second.property + " (informational)", second.trials, second.worst_value, true});
    std::vector<std::pair<std::string, std::string>> w;
    append_report(w, first);
    return finish(w);
  }

  PsiSpec psi_spec() const {
    const auto& p = *cfg_.psi;
    if (p.family == "constant") return PsiSpec::constant(p.c);
    if (p.family == "radial") return PsiSpec::radial_power(p.c, p.p);
    if (p.family == "anisotropic") return PsiSpec::anisotropic(p.c, p.p, p.eps, p.axis);
    return PsiSpec::manufactured_ellipsoid(op_, p.axes, p.p);
  }

  NewtonOptions newton_options() const {
    NewtonOptions o;
    o.max_iter = cfg_.max_iter;
    o.tol = cfg_.newton_tol;
    return o;
  }

  std::vector<std::pair<std::string, std::string>> failure(const std::exception& e) const {
    std::vector<std::pair<std::string, std::string>> w = {{"error", e.what()}};
    if (const auto* c = dynamic_cast<const ConeExitError*>(&e)) {
      std::string nodes;
      for (std::size_t i = 0; i < c->nodes().size(); ++i) nodes += (i ? "," : "") + std::to_string(c->nodes()[i]);
      w.emplace_back("nodes", nodes);
    }
    return w;
  }

  void write_surface(const std::string& name, const RadialSurfaceField& s, const PsiFunction& f) {
    const auto geometry = surface_geometry(s);
    std::vector<double> res(geometry.size());
    for (std::size_t i = 0; i < geometry.size(); ++i) {
      res[i] = q_of_geometry(op_, geometry[i]) - f(geometry[i].X, geometry[i].nu);
    }
    write_solution_csv(path(name), s, res);
  }

  int solve() {
    const PsiSpec psi = psi_spec();
    out_ << "psi       " << psi.describe() << "\n\n";
    const SphereGrid grid(cfg_.n_lon, cfg_.n_lat);
    std::optional<NewtonResult> solved;
    try {
      solved = newton_solve(RadialSurfaceField::sphere(grid, cfg_.initial_radius), op_, psi, newton_options());
    } catch (const ConvergenceError& e) {
      add(Row{"newton convergence", cfg_.max_iter, 0.0, false});
      return finish(failure(e));
    } catch (const ConeExitError& e) {
      add(Row{"initial surface admissible", 0, 0.0, false});
      return finish(failure(e));
    }
    const NewtonResult& result = *solved;
    const auto& d = result.diagnostics;
    for (std::size_t i = 0; i < d.residual_inf.size(); ++i) {
      out_ << "  iter " << std::setw(3) << i << "  max|F| " << format_double(d.residual_inf[i]) << "\n";
    }
    out_ << "convex    " << (d.convex ? "yes" : "no") << "\n\n";
    write_surface("solution.csv", result.surface, PsiFunction(std::cref(psi)));
    add(Row{"newton residual_inf <= " + format_double(d.tol), d.iterations, d.residual_inf.back(), true});
    if (psi.family == PsiFamily::Manufactured) {
      const auto exact = ellipsoid_surface(grid, cfg_.psi->axes);
      double err = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(result.surface[i] - exact[i]));
      add(Row{"max |rho - ellipsoid| (informational)", 1, err, true});
    }
    return finish();
  }

  BarrierReport barrier_report(const PsiSpec& psi) const {
    BarrierOptions b;
    b.r_inner = cfg_.psi->r_inner;
    b.r_outer = cfg_.psi->r_outer;
    b.directions = cfg_.effective_trials();
    b.tol = cfg_.tol;
    b.seed = cfg_.seed;
    return barrier_check(psi, op_, b);
  }

  std::vector<std::pair<std::string, std::string>> barrier_rows(const BarrierReport& r) {
    std::vector<std::pair<std::string, std::string>> w;
    add(r.outer);
    append_report(w, r.outer);
    if (!r.single_radius) {
      add(r.inner);
      add(r.monotone);
      append_report(w, r.inner);
      append_report(w, r.monotone);
    }
    return w;
  }

  int barrier() {
    const PsiSpec psi = psi_spec();
    out_ << "psi       " << psi.describe() << "\n\n";
    return finish(barrier_rows(barrier_report(psi)));
  }

  int homotopy() {
    const PsiSpec psi = psi_spec();
    out_ << "psi       " << psi.describe() << "\n\n";
    const auto bar = barrier_report(psi);
    if (!bar.passed()) {
      out_ << "refused: psi fails the barrier conditions\n\n";
      return finish(barrier_rows(bar));
    }
    HomotopyOptions o;
    o.steps = cfg_.steps;
    o.eps = cfg_.homotopy_eps;
    o.min_step = cfg_.min_step;
    o.r_inner = cfg_.psi->r_inner;
    o.r_outer = cfg_.psi->r_outer;
    o.monitor_z = cfg_.monitor_z;
    o.newton = newton_options();
    const SphereGrid grid(cfg_.n_lon, cfg_.n_lat);
    std::optional<HomotopyResult> solved;
    try {
      solved = homotopy_solve(op_, psi, grid, o);
    } catch (const ConvergenceError& e) {
      add(Row{"continuation reached t = 1", 0, 0.0, false});
      return finish(failure(e));
    }
    const HomotopyResult& result = *solved;
    out_ << std::right << std::setw(8) << "t" << std::setw(6) << "iter" << std::setw(26) << "max_kappa1"
         << std::setw(26) << "min_support" << std::setw(26) << "residual" << "\n";
    for (std::size_t i = 0; i < result.path.size(); ++i) {
      const auto& s = result.path[i];
      out_ << std::setw(8) << format_double(s.t) << std::setw(6) << s.newton_iterations << std::setw(26)
           << format_double(s.monitor.max_kappa1) << std::setw(26) << format_double(s.monitor.min_support)
           << std::setw(26) << format_double(s.residual_norm) << "\n";
      std::ostringstream name;
      name << "surface_t" << std::setw(3) << std::setfill('0') << i << ".csv";
      write_surface(name.str(), s.surface, homotopy_psi(op_, psi, s.t, o.eps));
    }
    const auto& m = result.path_monitor;
    out_ << "\npath max kappa1 " << format_double(m.max_kappa1) << ", min support "
         << format_double(m.min_support) << ", convex throughout " << (m.convex ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < kMonitorPowers.size(); ++i) {
      out_ << "  P_" << kMonitorPowers[i] << " max " << format_double(m.max_power_sum[i])
           << ", log P - mZ log u max " << format_double(m.max_test[i]) << "\n";
    }
    out_ << "\n";
    write_path_csv(path("path.csv"), result);
    write_surface("solution.csv", result.path.back().surface, PsiFunction(std::cref(psi)));
    barrier_rows(bar);
    const auto& last = result.path.back();
    add(Row{"continuation reached t = 1", static_cast<long>(result.path.size()), last.residual_norm, true});
    add(Row{"path max kappa1 finite", static_cast<long>(result.path.size()), m.max_kappa1,
            std::isfinite(m.max_kappa1)});
    return finish();
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  std::filesystem::path dir_;
  OperatorSpec op_;
  std::vector<Row> rows_;
};

}  // namespace

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    Run run(config, out);
    return run.dispatch();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace symcurv
