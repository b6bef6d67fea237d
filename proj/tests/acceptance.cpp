// Acceptance suite: one PASS/FAIL line per criterion.
// usage: gim_acceptance <path-to-gim-cli> <configs-dir> [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "gim/gim.hpp"
#include "oracles.hpp"

using namespace gim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

RMatrix gaussian(Index r, Index c, Rng& rng) {
  RMatrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

RMatrix normalized(const RMatrix& m) {
  RMatrix out = m;
  for (Index i = 0; i < m.rows(); ++i) out.row(i) /= m.row(i).norm();
  return out;
}

MeasurementEnsemble dft_ensemble(Index n) {
  return make_ensemble(make_basis(BasisKind::Identity, n), make_basis(BasisKind::Dft1D, n));
}

MeasurementEnsemble hadamard_ensemble(Index n) {
  RMatrix h = RMatrix::Ones(1, 1);
  while (h.rows() < n) {
    RMatrix next(2 * h.rows(), 2 * h.rows());
    next << h, h, h, -h;
    h = next;
  }
  h /= std::sqrt(static_cast<double>(n));
  return make_ensemble(make_basis(BasisKind::Identity, n), OrthonormalBasis::custom(h.cast<Complex>()));
}

// 1. Rows all equal give g; mutually orthonormal rows give sqrt(g).
Outcome endpoints() {
  double worst_equal = 0.0, worst_orth = 0.0;
  const SupportSet equal_t({0, 4, 8, 12}, 16);
  const SupportSet orth_t({0, 1, 2, 3}, 16);
  auto check = [&](const MeasurementEnsemble& e, const GroupStructure& gs, const SupportSet& t, double target,
                   double& worst) {
    for (GammaMode mode : {GammaMode::Auto, GammaMode::Sandwich}) {
      GammaOptions opt;
      opt.mode = mode;
      const auto est = penalty_gamma(e, t, gs, opt);
      worst = std::max({worst, std::abs(est.value() - target), std::abs(est.lower - target)});
    }
  };
  // Hadamard: contiguous groups of 4 see identical rows on {0,4,8,12} and a
  // 4x4 Hadamard block on {0,1,2,3}. DFT: strided groups see identical rows
  // on multiples of 4; contiguous groups see a 4-point DFT there.
  check(hadamard_ensemble(16), contiguous_1d(16, 4), equal_t, 4.0, worst_equal);
  check(hadamard_ensemble(16), contiguous_1d(16, 4), orth_t, 2.0, worst_orth);
  check(dft_ensemble(16), strided_1d(16, 4), equal_t, 4.0, worst_equal);
  check(dft_ensemble(16), contiguous_1d(16, 4), equal_t, 2.0, worst_orth);
  check(dft_ensemble(64), strided_1d(64, 8), SupportSet({0, 8, 16}, 64), 8.0, worst_equal);
  check(dft_ensemble(64), contiguous_1d(64, 8), SupportSet({0, 8, 16, 24, 32, 40, 48, 56}, 64), std::sqrt(8.0),
        worst_orth);
  return {worst_equal <= 1e-12 && worst_orth <= 1e-9,
          "max |gamma-g| " + fmt("%.2e", worst_equal) + ", max |gamma-sqrt(g)| " + fmt("%.2e", worst_orth)};
}

// 2. lower <= exact <= upper <= sqrt(pi/2) exact on random real instances.
Outcome sandwich() {
  Rng rng(20240501);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index g = 2 + static_cast<Index>(rng.below(7));
    const Index t = 2 + static_cast<Index>(rng.below(15));
    const RMatrix m = normalized(gaussian(g, t, rng));
    const CMatrix mc = m.cast<Complex>();
    const double exact = norm_2to1_exact_real(m);
    Rng lr(combine_seed(1, k)), ur(combine_seed(2, k));
    const double lower = norm_2to1_lower(mc, 64, lr);
    const double upper = norm_2to1_upper_sdp(mc, ur);
    if (lower > exact + 1e-12 || exact > upper + 1e-9) ++violations;
    worst_ratio = std::max(worst_ratio, upper / exact);
  }
  return {violations == 0 && worst_ratio <= kPietschReal + 1e-9,
          std::to_string(violations) + " order violations, max upper/exact " + fmt("%.6f", worst_ratio) +
              " (limit " + fmt("%.6f", kPietschReal) + ")"};
}

// 3. Sign enumeration against a sphere search.
Outcome exact_oracle() {
  Rng rng(303);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const RMatrix m = gaussian(3, 5, rng);
    worst = std::max(worst, std::abs(norm_2to1_exact_real(m) - oracle::norm_2to1_sphere_search(m, 500 + k)));
  }
  return {worst <= 1e-3, "max deviation " + fmt("%.2e", worst)};
}

// 4. Basis pursuit against vertex enumeration.
Outcome lp_oracle() {
  Rng rng(404);
  double worst = 0.0, worst_feas = 0.0;
  for (int k = 0; k < 25; ++k) {
    const RMatrix q = Eigen::HouseholderQR<RMatrix>(gaussian(12, 12, rng)).householderQ();
    const auto e = make_ensemble(make_basis(BasisKind::Identity, 12), OrthonormalBasis::custom(q.cast<Complex>()));
    std::vector<Index> rows(12);
    std::iota(rows.begin(), rows.end(), 0);
    rows = sample_subset(rows, 6, rng);
    std::sort(rows.begin(), rows.end());
    const SupportSet t = SupportSet::from_unsorted(sample_subset(SupportSet::all(12).indices(), 2, rng), 12);
    const CVector c0 = draw_coefficients(t, 12, rng);
    const RecoveryProblem p = make_problem(e, rows, c0);
    const RecoveryResult r = basis_pursuit(p);
    const double truth = oracle::bp_vertex_enumeration(p.a_omega.real(), p.y.real());
    worst = std::max(worst, std::abs(r.objective - truth));
    worst_feas = std::max(worst_feas, r.feas_residual);
  }
  return {worst <= 1e-6 && worst_feas <= 1e-8,
          "max |objective - LP| " + fmt("%.2e", worst) + ", max feasibility residual " + fmt("%.2e", worst_feas)};
}

// 5. A holding dual certificate implies recovery.
Outcome certificate() {
  const auto e = dft_ensemble(64);
  const std::vector<GroupStructure> structures{singletons(64), strided_1d(64, 4), contiguous_1d(64, 4)};
  Rng rng(505);
  int held = 0, bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const auto& gs = structures[k % 3];
    const Index size = 1 + static_cast<Index>(rng.below(8));
    const SupportSet t = draw_support({64, size, SupportModel::Unrestricted}, rng);
    const Index lo = std::max<Index>(gs.g(), (size + gs.g() - 1) / gs.g() * gs.g());
    const Index steps = (48 - lo) / gs.g() + 1;
    const Index m = lo + gs.g() * static_cast<Index>(rng.below(static_cast<std::uint64_t>(steps)));
    const SampleSet s = draw_uniform(gs, m, rng);
    CVector c0 = draw_coefficients(t, 64, rng);
    if (k % 2 == 1)
      for (Index i : t.indices()) c0(i) *= rng.unit_phase();
    const auto rep = dual_certificate(e, s, t, support_signs(c0, t));
    if (!rep.holds) continue;
    ++held;
    const double err = nre(c0, basis_pursuit(make_problem(e, s.omega, c0)).c_hat);
    worst = std::max(worst, err);
    if (err > 1e-4) ++bad;
  }
  return {bad == 0 && held >= 50, std::to_string(held) + "/500 certificates held, " + std::to_string(bad) +
                                      " failed recoveries, max NRE " + fmt("%.2e", worst)};
}

// 6. Gram deviation fail rate under Bernoulli group selection.
Outcome concentration() {
  const auto e = dft_ensemble(256);
  Rng trng(606);
  const SupportSet t = draw_support({256, 8, SupportModel::Unrestricted}, trng);
  const auto gs = strided_1d(256, 4);
  std::vector<ConcentrationStats> st;
  std::string rates;
  for (double m : {32.0, 64.0, 128.0, 256.0}) {
    Rng rng(combine_seed(606, static_cast<std::uint64_t>(m)));
    st.push_back(validate_gram_concentration(e, t, gs, m, 500, rng));
    rates += (rates.empty() ? "" : " ") + fmt("%.3f", st.back().fail_rate);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < st.size(); ++i) {
    const double slack = 2.0 * std::hypot(st[i].sigma(), st[i - 1].sigma());
    if (st[i].fail_rate > st[i - 1].fail_rate + slack) monotone = false;
  }
  return {monotone && st.back().fail_rate == 0.0, "fail rates at m=32,64,128,256: " + rates};
}

// 7. Second moment of v0 against its bound.
Outcome v0_moment() {
  const auto e = dft_ensemble(64);
  const std::vector<GroupStructure> structures{strided_1d(64, 4), contiguous_1d(64, 4), random_groups(64, 4, 77)};
  double worst_ratio = 0.0;
  for (int d = 0; d < 5; ++d) {
    Rng trng(combine_seed(707, d));
    const SupportSet t = draw_support({64, 4, SupportModel::Unrestricted}, trng);
    const Index t0 = t.complement(64)[static_cast<std::size_t>(trng.below(60))];
    for (std::size_t si = 0; si < structures.size(); ++si) {
      Rng rng(combine_seed(combine_seed(707, d), si));
      const auto r = validate_lemma1(e, t, structures[si], 16.0, t0, 2000, rng);
      worst_ratio = std::max(worst_ratio, r.empirical_mean / r.bound);
    }
  }
  return {worst_ratio <= 1.0, "max empirical/bound over 15 cases " + fmt("%.3f", worst_ratio)};
}

// 8. Desk-scale narrowband Fourier comparison of contiguous and strided groups.
Outcome narrowband() {
  const Index n = 220, g = 11;
  const auto e = dft_ensemble(n);
  const auto strided = strided_1d(n, g);
  const auto contiguous = contiguous_1d(n, g);
  SweepConfig cfg;
  cfg.step = g;
  cfg.trials_per_m = 100;
  cfg.success_quota = 0.99;
  cfg.threads = hardware_threads();
  int gamma_wins = 0, m_wins = 0;
  std::string pairs;
  for (int d = 0; d < 10; ++d) {
    Rng rng(combine_seed(808, d));
    const SupportSet t = draw_support({n, 11, SupportModel::Subband, 2, 0.05}, rng);
    const CVector c0 = draw_coefficients(t, n, rng);
    cfg.master_seed = combine_seed(809, d);
    const double gc = penalty_gamma(e, t, contiguous).value();
    const double gs = penalty_gamma(e, t, strided).value();
    const auto mc = find_min_m(e, contiguous, t, c0, cfg).m_min;
    const auto ms = find_min_m(e, strided, t, c0, cfg).m_min;
    gamma_wins += gc > gs ? 1 : 0;
    const bool m_ok = !mc || (ms && *mc >= *ms);
    m_wins += m_ok ? 1 : 0;
    auto show = [](const std::optional<Index>& m) { return m ? std::to_string(*m) : std::string("sat"); };
    pairs += " " + show(mc) + "/" + show(ms);
  }
  return {gamma_wins >= 8 && m_wins >= 7, "gamma contiguous>strided " + std::to_string(gamma_wins) +
                                              "/10, m_min contiguous>=strided " + std::to_string(m_wins) +
                                              "/10 (m_min c/s:" + pairs + ")"};
}

// 9. Singleton groups behave like plain uniform row sampling.
Outcome singleton_equivalence() {
  double worst = 0.0;
  for (Index n : {16, 64}) {
    const auto e = dft_ensemble(n);
    for (int d = 0; d < 5; ++d) {
      Rng rng(combine_seed(900, d));
      const SupportSet t = draw_support({n, 1 + static_cast<Index>(rng.below(8)), SupportModel::Unrestricted}, rng);
      worst = std::max(worst, std::abs(penalty_gamma(e, t, singletons(n)).value() - 1.0));
    }
  }
  const auto real_e = make_ensemble(make_basis(BasisKind::Identity, 64), make_basis(BasisKind::Haar2D, 8, 8));
  const auto real_est = penalty_gamma(real_e, SupportSet({0, 1, 9, 30}, 64), singletons(64));
  worst = std::max(worst, std::abs(real_est.value() - 1.0));

  const Index n = 64, m = 16;
  const auto e = dft_ensemble(n);
  Rng trng(909);
  const SupportSet t = draw_support({n, 6, SupportModel::Unrestricted}, trng);
  const CVector c0 = draw_coefficients(t, n, trng);
  const int trials = 200;
  SweepConfig cfg;
  std::vector<int> grouped(trials), plain(trials);
  parallel_for(trials, hardware_threads(), [&](int k) {
    grouped[k] = run_trial(e, singletons(n), t, c0, m, true, cfg, trial_seed(910, "singletons", m, k)).success;
    std::mt19937_64 gen(combine_seed(911, static_cast<std::uint64_t>(k)));
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), gen);
    rows.resize(static_cast<std::size_t>(m));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    CVector c = CVector::Zero(n);
    for (Index i : t.indices()) c(i) = unif(gen);
    const auto r = basis_pursuit(make_problem(e, rows, c));
    plain[k] = nre(c, r.c_hat) < cfg.success_nre;
  });
  const int sg = std::accumulate(grouped.begin(), grouped.end(), 0);
  const int sp = std::accumulate(plain.begin(), plain.end(), 0);
  const double z = oracle::two_proportion_z(sg, trials, sp, trials);
  return {worst <= 1e-12 && std::abs(z) < 1.959963984540054,
          "max |gamma-1| " + fmt("%.1e", worst) + ", success at m=16: singletons " + std::to_string(sg) +
              "/200, uniform " + std::to_string(sp) + "/200, z=" + fmt("%.3f", z)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Repeated CLI invocations give identical bytes.
Outcome determinism(const std::string& cli, const std::filesystem::path& configs) {
  const auto dir = std::filesystem::temp_directory_path() / ("gim_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"gamma", "small_sweep.json"},         {"sweep", "small_sweep.json"},
      {"bounds", "bounds.json"},             {"validate gram", "validate_gram.json"},
      {"validate lemma1", "validate_lemma1.json"}, {"gen-groups", "gen_groups.json"},
      {"recover", "small_sweep.json"}};
  int checked = 0, mismatched = 0, failed = 0;
  auto run = [&](const std::string& cmd, const std::string& cfg, const std::string& extra, const std::string& out) {
    const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + (configs / cfg).string() + "\" --seed 17 " +
                             extra + " --out \"" + (dir / out).string() + "\"";
    if (std::system(line.c_str()) != 0) ++failed;
    return slurp(dir / out);
  };
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& [cmd, cfg] = runs[i];
    const std::string a = run(cmd, cfg, "", "a" + std::to_string(i) + ".csv");
    const std::string b = run(cmd, cfg, "", "b" + std::to_string(i) + ".csv");
    ++checked;
    if (a.empty() || a != b) ++mismatched;
  }
  const std::string one = run("sweep", "small_sweep.json", "--threads 1", "t1.csv");
  const std::string four = run("sweep", "small_sweep.json", "--threads 4", "t4.csv");
  ++checked;
  if (one.empty() || one != four) ++mismatched;
  std::filesystem::remove_all(dir);
  return {mismatched == 0 && failed == 0, std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
                                               " outputs byte-identical, " + std::to_string(failed) +
                                               " non-zero exits"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: gim_acceptance <gim-cli> <configs-dir> [criterion numbers...]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path configs = argv[2];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gamma endpoint identities", endpoints},
      {"Pietsch sandwich", sandwich},
      {"exact-norm oracle agreement", exact_oracle},
      {"basis-pursuit LP oracle", lp_oracle},
      {"certificate sufficiency", certificate},
      {"Gram concentration", concentration},
      {"v0 second-moment bound", v0_moment},
      {"narrowband Fourier replication", narrowband},
      {"g=1 equivalence", singleton_equivalence},
      {"CLI determinism", [&] { return determinism(cli, configs); }},
  };
  std::vector<bool> selected(criteria.size(), argc == 3);
  for (int a = 3; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion: " << argv[a] << "\n";
      return 2;
    }
    selected[static_cast<std::size_t>(k - 1)] = true;
  }
  int failures = 0, run = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    ++run;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << " (" << fmt("%.1f", secs) << " s)" << std::endl;
  }
  std::cout << (run - failures) << "/" << run << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
