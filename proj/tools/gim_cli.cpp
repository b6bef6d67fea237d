// Command-line front end. Every subcommand reads a JSON config and writes CSV
// to stdout or --out.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "gim/gim.hpp"

namespace {

using namespace gim;
namespace cfgns = gim::config;

struct CommonOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string mode;
};

cfgns::Config load_config(const CommonOptions& o) {
  auto c = cfgns::load(o.config);
  if (o.seed_set) cfgns::set_seed(c, o.seed);
  c.sweep.threads = std::max(1, o.threads);
  if (!o.mode.empty()) c.gamma.mode = gamma_mode_from_string(o.mode);
  return c;
}

/// stdout unless --out names a file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      require(file_->good(), "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool threads = false) {
  cmd->add_option("--config", o.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "CSV output path (default stdout)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "master seed override");
  cmd->add_option("--mode", o.mode, "gamma estimation mode: auto|exact|sandwich|full");
  if (threads) cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

std::vector<std::string> gamma_header() {
  return {"structure", "support", "g", "t_size", "mu", "gamma_lower", "gamma_upper", "gamma_exact",
          "gamma_method", "argmax_group", "degraded"};
}

int cmd_gamma(const CommonOptions& o) {
  const auto c = load_config(o);
  const auto e = cfgns::build_ensemble(c);
  const auto structures = cfgns::build_structures(c);
  const auto supports = cfgns::build_supports(c);
  Output out(o.out);
  io::write_csv_row(out.stream(), gamma_header());
  for (const auto& sc : supports)
    for (const auto& gs : structures) {
      const auto est = penalty_gamma(e, sc.t, gs, c.gamma);
      io::write_csv_row(out.stream(),
                        {gs.name(), sc.descriptor, std::to_string(gs.g()), std::to_string(sc.t.size()), io::fmt(e.mu()),
                         io::fmt(est.lower), io::fmt(est.upper), est.exact ? io::fmt(*est.exact) : "",
                         to_string(est.method), std::to_string(est.argmax_group), est.degraded ? "1" : "0"});
    }
  return 0;
}

int cmd_sweep(const CommonOptions& o) {
  const auto c = load_config(o);
  const auto e = cfgns::build_ensemble(c);
  const auto records = scatter_gamma_vs_m(e, cfgns::build_structures(c), cfgns::build_supports(c), c.sweep, c.gamma);
  Output out(o.out);
  io::write_sweep_csv(out.stream(), records);
  return 0;
}

int cmd_bounds(const CommonOptions& o) {
  const auto c = load_config(o);
  const auto e = cfgns::build_ensemble(c);
  Output out(o.out);
  io::write_csv_row(out.stream(), {"structure", "support", "n", "t_size", "mu", "gamma", "delta", "const",
                                   "bound_candes", "bound_grouped", "bound_gram"});
  for (const auto& sc : cfgns::build_supports(c))
    for (const auto& gs : cfgns::build_structures(c)) {
      const auto est = penalty_gamma(e, sc.t, gs, c.gamma);
      const BoundQuery q{static_cast<double>(e.n()), static_cast<double>(sc.t.size()), e.mu(), est.value(),
                         c.bounds.delta, c.bounds.constant};
      io::write_csv_row(out.stream(),
                        {gs.name(), sc.descriptor, std::to_string(e.n()), std::to_string(sc.t.size()), io::fmt(e.mu()),
                         io::fmt(q.gamma), io::fmt(q.delta), io::fmt(q.constant), io::fmt(bound_candes(q)),
                         io::fmt(bound_grouped(q)), io::fmt(bound_gram(q))});
    }
  return 0;
}

Index default_t0(const SupportSet& t, Index n) {
  const auto comp = t.complement(n);
  require(!comp.empty(), "validate: support covers every index");
  return comp.front();
}

int cmd_validate(const CommonOptions& o, const std::string& which) {
  const auto c = load_config(o);
  const auto e = cfgns::build_ensemble(c);
  const auto structures = cfgns::build_structures(c);
  const auto supports = cfgns::build_supports(c);
  require(!c.validate.m.empty(), "config: validate.m is required");
  Output out(o.out);
  if (which == "gram") {
    io::write_csv_row(out.stream(), {"structure", "support", "m", "trials", "fail_rate", "sigma", "mean_deviation",
                                     "max_deviation", "gamma", "bound_gram"});
  } else {
    io::write_csv_row(out.stream(), {"structure", "support", "m", "t0", "trials", "empirical_mean", "bound", "gamma"});
  }
  for (std::size_t si = 0; si < supports.size(); ++si)
    for (const auto& gs : structures)
      for (double m : c.validate.m) {
        const auto& sc = supports[si];
        Rng rng(trial_seed(combine_seed(c.master_seed, si), gs.name(), static_cast<Index>(m), 0));
        if (which == "gram") {
          const auto st = validate_gram_concentration(e, sc.t, gs, m, c.validate.trials, rng);
          double mean = 0.0, mx = 0.0;
          for (double d : st.deviations) mean += d, mx = std::max(mx, d);
          mean /= st.trials;
          const auto est = penalty_gamma(e, sc.t, gs, c.gamma);
          const BoundQuery q{static_cast<double>(e.n()), static_cast<double>(sc.t.size()), e.mu(), est.value(),
                             c.bounds.delta, 1.0};
          io::write_csv_row(out.stream(), {gs.name(), sc.descriptor, io::fmt(m), std::to_string(st.trials),
                                           io::fmt(st.fail_rate), io::fmt(st.sigma()), io::fmt(mean), io::fmt(mx),
                                           io::fmt(est.value()), io::fmt(bound_gram(q))});
        } else {
          const Index t0 = c.validate.t0 >= 0 ? c.validate.t0 : default_t0(sc.t, e.n());
          const auto r = validate_lemma1(e, sc.t, gs, m, t0, c.validate.trials, rng, 0.0, c.gamma);
          io::write_csv_row(out.stream(), {gs.name(), sc.descriptor, io::fmt(m), std::to_string(t0),
                                           std::to_string(r.trials), io::fmt(r.empirical_mean), io::fmt(r.bound),
                                           io::fmt(r.gamma)});
        }
      }
  return 0;
}

int cmd_gen_groups(const CommonOptions& o) {
  const auto c = load_config(o);
  Output out(o.out);
  const bool two_d = c.ensemble.two_d();
  io::write_csv_row(out.stream(), two_d ? std::vector<std::string>{"structure", "group", "position", "index", "row", "col"}
                                        : std::vector<std::string>{"structure", "group", "position", "index"});
  for (const auto& gs : cfgns::build_structures(c))
    for (std::size_t gi = 0; gi < gs.count(); ++gi)
      for (std::size_t p = 0; p < gs.group(gi).size(); ++p) {
        const Index idx = gs.group(gi)[p];
        std::vector<std::string> row{gs.name(), std::to_string(gi), std::to_string(p), std::to_string(idx)};
        if (two_d) {
          row.push_back(std::to_string(idx / c.ensemble.cols));
          row.push_back(std::to_string(idx % c.ensemble.cols));
        }
        io::write_csv_row(out.stream(), row);
      }
  return 0;
}

int cmd_recover(const CommonOptions& o) {
  const auto c = load_config(o);
  const auto e = cfgns::build_ensemble(c);
  const auto structures = cfgns::build_structures(c);
  const auto supports = cfgns::build_supports(c);
  Output out(o.out);
  io::write_csv_row(out.stream(), {"structure", "support", "m", "nre", "objective", "feas_residual", "iterations",
                                   "converged", "success"});
  for (std::size_t si = 0; si < supports.size(); ++si)
    for (const auto& gs : structures) {
      const auto& sc = supports[si];
      const Index m = c.recover.m > 0 ? c.recover.m : gs.n();
      Rng rng(trial_seed(combine_seed(c.master_seed, si), gs.name(), m, 0));
      const SampleSet s = draw_uniform(gs, m, rng);
      RecoveryProblem p = make_problem(e, s.omega, sc.c0);
      p.tol_feas = c.sweep.solver.tol_feas;
      p.tol_obj = c.sweep.solver.tol_obj;
      p.max_iters = c.sweep.solver.max_iters;
      const auto r = basis_pursuit(p);
      const double err = sc.c0.norm() > 0 ? nre(sc.c0, r.c_hat) : r.c_hat.norm();
      io::write_csv_row(out.stream(), {gs.name(), sc.descriptor, std::to_string(m), io::fmt(err), io::fmt(r.objective),
                                       io::fmt(r.feas_residual), std::to_string(r.iterations), r.converged ? "1" : "0",
                                       err < c.sweep.success_nre ? "1" : "0"});
      if (!c.recover.dump.empty() && c.ensemble.two_d() && c.ensemble.sparsity == "haar2d") {
        const int levels = c.ensemble.levels < 0 ? haar::max_levels(c.ensemble.rows, c.ensemble.cols) : c.ensemble.levels;
        const RMatrix img =
            haar::inverse(haar::unflatten(r.c_hat.real(), c.ensemble.rows, c.ensemble.cols), levels);
        io::write_pgm(c.recover.dump, img);
      }
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grouped incoherent measurements: penalty factors, recovery sweeps and bound checks"};
  app.require_subcommand(1);
  CommonOptions o;
  std::string which;

  auto* gamma = app.add_subcommand("gamma", "penalty factor for each structure and support");
  add_common(gamma, o);
  auto* sweep = app.add_subcommand("sweep", "penalty factor vs minimal measurement count");
  add_common(sweep, o, true);
  auto* bounds = app.add_subcommand("bounds", "measurement-count bounds");
  add_common(bounds, o);
  auto* validate = app.add_subcommand("validate", "Monte-Carlo checks: gram | lemma1");
  validate->add_option("which", which, "gram or lemma1")->required()->check(CLI::IsMember({"gram", "lemma1"}));
  add_common(validate, o);
  auto* gen = app.add_subcommand("gen-groups", "emit group structures");
  add_common(gen, o);
  auto* recover = app.add_subcommand("recover", "single grouped recovery");
  add_common(recover, o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gamma) return cmd_gamma(o);
    if (*sweep) return cmd_sweep(o);
    if (*bounds) return cmd_bounds(o);
    if (*validate) return cmd_validate(o, which);
    if (*gen) return cmd_gen_groups(o);
    if (*recover) return cmd_recover(o);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 1;
}
