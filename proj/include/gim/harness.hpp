#pragma once

// Experiment orchestration: sparse signal generation, minimal-measurement
// searches and penalty-factor scatter records.

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gim/gamma.hpp"
#include "gim/grouping.hpp"
#include "gim/haar.hpp"
#include "gim/operators.hpp"
#include "gim/recovery.hpp"

namespace gim {

enum class SupportModel { Unrestricted, Subband };

struct FourierSignalSpec {
  Index n = 0;
  Index k = 0;
  SupportModel model = SupportModel::Unrestricted;
  int channel_count = 2;
  double channel_width_frac = 0.05;
};

struct SparseSignal {
  CVector x;   // U c0
  CVector c0;
  SupportSet t;
};

inline Index channel_width(const FourierSignalSpec& s) {
  return static_cast<Index>(std::ceil(s.channel_width_frac * static_cast<double>(s.n) - 1e-9));
}

/// k distinct indices chosen uniformly from `pool`, returned sorted.
inline std::vector<Index> sample_subset(std::vector<Index> pool, Index k, Rng& rng) {
  require(k >= 0 && k <= static_cast<Index>(pool.size()), "sample_subset: k exceeds pool size");
  for (Index i = 0; i < k; ++i)
    std::swap(pool[i], pool[i + static_cast<Index>(rng.below(pool.size() - static_cast<std::size_t>(i)))]);
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Channel start offsets: non-overlapping, uniform over all placements.
inline std::vector<Index> place_channels(Index n, int count, Index width, Rng& rng) {
  const Index free = n - count * width;
  require(count >= 1 && width >= 1 && free >= 0, "channels do not fit in the band");
  std::vector<Index> slots(static_cast<std::size_t>(free + count));
  std::iota(slots.begin(), slots.end(), Index{0});
  auto pick = sample_subset(std::move(slots), count, rng);
  for (int i = 0; i < count; ++i) pick[i] = pick[i] - i + i * width;
  return pick;
}

inline SupportSet draw_support(const FourierSignalSpec& s, Rng& rng) {
  require(s.k >= 0 && s.k <= s.n, "signal spec: k must lie in [0, n]");
  std::vector<Index> pool;
  if (s.model == SupportModel::Unrestricted) {
    pool.resize(static_cast<std::size_t>(s.n));
    std::iota(pool.begin(), pool.end(), Index{0});
  } else {
    const Index w = channel_width(s);
    require(w * s.channel_count >= s.k, "signal spec: channel union smaller than k");
    for (Index start : place_channels(s.n, s.channel_count, w, rng))
      for (Index j = 0; j < w; ++j) pool.push_back(start + j);
  }
  return {sample_subset(std::move(pool), s.k, rng), s.n};
}

/// Real coefficients uniform on [-1, 1] over t.
inline CVector draw_coefficients(const SupportSet& t, Index n, Rng& rng) {
  CVector c = CVector::Zero(n);
  for (Index i : t.indices()) c(i) = rng.uniform(-1.0, 1.0);
  return c;
}

inline SparseSignal gen_signal(const FourierSignalSpec& spec, const OrthonormalBasis& u, Rng& rng) {
  require(u.n() == spec.n, "gen_signal: basis size mismatch");
  SparseSignal s;
  s.t = draw_support(spec, rng);
  s.c0 = draw_coefficients(s.t, spec.n, rng);
  s.x = u.synthesize(s.c0);
  return s;
}

struct ImageSparse {
  SupportSet t;
  CVector c0;  // thresholded Haar coefficients, row-major
};

/// Keeps the k largest-magnitude Haar coefficients (ties to the lower index).
inline ImageSparse image_to_sparse(const RMatrix& img, Index k, int levels = -1) {
  require(is_power_of_two(img.rows()) && is_power_of_two(img.cols()), "image_to_sparse: dimensions must be powers of two");
  require(k >= 0 && k <= img.size(), "image_to_sparse: k exceeds pixel count");
  if (levels < 0) levels = haar::max_levels(img.rows(), img.cols());
  const RVector coef = haar::flatten(haar::forward(img, levels));
  const double cmax = coef.size() ? coef.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Index> order;
  for (Index i = 0; i < coef.size(); ++i)
    if (std::abs(coef(i)) > 1e-12 * cmax) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(coef(a)) > std::abs(coef(b)); });
  if (static_cast<Index>(order.size()) > k) order.resize(static_cast<std::size_t>(k));
  ImageSparse out{SupportSet::from_unsorted(order, coef.size()), CVector::Zero(coef.size())};
  for (Index i : out.t.indices()) out.c0(i) = coef(i);
  return out;
}

/// Piecewise-constant test image: a background plus random axis-aligned blocks.
inline RMatrix synthetic_image(Index rows, Index cols, Rng& rng, int blocks = 6) {
  RMatrix img = RMatrix::Constant(rows, cols, rng.uniform(0.2, 0.8));
  for (int b = 0; b < blocks; ++b) {
    const Index h = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(rows / 2)));
    const Index w = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(cols / 2)));
    const Index r0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(rows - h + 1)));
    const Index c0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(cols - w + 1)));
    img.block(r0, c0, h, w).array() += rng.uniform(-0.4, 0.4);
  }
  return img;
}

struct SolverConfig {
  double tol_feas = 1e-8;
  double tol_obj = 1e-6;
  int max_iters = 20000;
};

struct SweepConfig {
  std::vector<Index> m_grid;  // empty: multiples of step up to n
  Index step = 0;             // 0: 4 g
  int trials_per_m = 100;
  double success_nre = 1e-3;
  double success_quota = 0.99;
  bool fresh_coefficients = true;
  bool early_stop = true;
  std::uint64_t master_seed = 0;
  int threads = 1;
  SolverConfig solver;
};

inline std::vector<Index> resolve_grid(const SweepConfig& cfg, Index n, Index g) {
  if (!cfg.m_grid.empty()) {
    for (std::size_t i = 0; i < cfg.m_grid.size(); ++i) {
      require(cfg.m_grid[i] >= g && cfg.m_grid[i] <= n, "sweep grid value outside [g, n]");
      require(cfg.m_grid[i] % g == 0, "sweep grid value not a multiple of the group size");
      require(i == 0 || cfg.m_grid[i] > cfg.m_grid[i - 1], "sweep grid must be strictly ascending");
    }
    return cfg.m_grid;
  }
  const Index step = cfg.step > 0 ? cfg.step : 4 * g;
  require(step % g == 0, "sweep step must be a multiple of the group size");
  std::vector<Index> grid;
  for (Index m = step; m <= n; m += step) grid.push_back(m);
  if (grid.empty() || grid.back() != n) grid.push_back(n);
  return grid;
}

/// Seed of one recovery trial.
inline std::uint64_t trial_seed(std::uint64_t master, const std::string& label, Index m, int trial) {
  std::uint64_t s = combine_seed(master, hash_string(label));
  s = combine_seed(s, static_cast<std::uint64_t>(m));
  return combine_seed(s, static_cast<std::uint64_t>(trial));
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct TrialOutcome {
  double nre = 0.0;
  bool success = false;
  bool converged = false;
};

/// One grouped recovery: draw m/g groups, re-draw coefficient values on t
/// when `fresh`, solve and score.
inline TrialOutcome run_trial(const MeasurementEnsemble& e, const GroupStructure& gs, const SupportSet& t,
                              const CVector& c0, Index m, bool fresh, const SweepConfig& cfg,
                              std::uint64_t seed) {
  Rng rng(seed);
  const SampleSet s = draw_uniform(gs, m, rng);
  CVector c = fresh ? draw_coefficients(t, e.n(), rng) : c0;
  TrialOutcome out;
  if (c.norm() == 0.0) {
    out.success = out.converged = true;
    return out;
  }
  RecoveryProblem p = make_problem(e, s.omega, c);
  p.tol_feas = cfg.solver.tol_feas;
  p.tol_obj = cfg.solver.tol_obj;
  p.max_iters = cfg.solver.max_iters;
  const RecoveryResult r = basis_pursuit(p);
  out.nre = nre(c, r.c_hat);
  out.success = out.nre < cfg.success_nre;
  out.converged = r.converged;
  return out;
}

struct PerMResult {
  Index m = 0;
  int trials_run = 0;
  int successes = 0;
  bool success = false;
};

struct MinMResult {
  std::optional<Index> m_min;  // empty: saturated, no grid value met the quota
  std::vector<PerMResult> per_m;
};

inline constexpr int kTrialBlock = 8;

/// Ascending scan of the grid; the first m meeting the success quota is m_min.
/// With early_stop, an m is abandoned once the quota is out of reach; blocks
/// of kTrialBlock trials keep the reported counts independent of threads.
inline MinMResult find_min_m(const MeasurementEnsemble& e, const GroupStructure& gs, const SupportSet& t,
                             const CVector& c0, const SweepConfig& cfg) {
  require(gs.n() == e.n(), "find_min_m: size mismatch");
  require(cfg.trials_per_m > 0, "find_min_m: trials_per_m must be positive");
  require(cfg.success_quota > 0 && cfg.success_quota <= 1, "find_min_m: quota must lie in (0, 1]");
  const auto grid = resolve_grid(cfg, e.n(), gs.g());
  const int needed = static_cast<int>(std::ceil(cfg.success_quota * cfg.trials_per_m - 1e-9));
  const int allowed_failures = cfg.trials_per_m - needed;
  MinMResult out;
  for (Index m : grid) {
    PerMResult pm{m, 0, 0, false};
    std::vector<TrialOutcome> results(static_cast<std::size_t>(cfg.trials_per_m));
    for (int start = 0; start < cfg.trials_per_m; start += kTrialBlock) {
      const int len = std::min(kTrialBlock, cfg.trials_per_m - start);
      parallel_for(len, cfg.threads, [&](int i) {
        results[start + i] = run_trial(e, gs, t, c0, m, cfg.fresh_coefficients, cfg,
                                       trial_seed(cfg.master_seed, gs.name(), m, start + i));
      });
      for (int i = 0; i < len; ++i) pm.successes += results[start + i].success ? 1 : 0;
      pm.trials_run += len;
      if (cfg.early_stop && pm.trials_run - pm.successes > allowed_failures) break;
      if (cfg.early_stop && pm.successes >= needed) break;
    }
    pm.success = pm.successes >= needed;
    out.per_m.push_back(pm);
    if (pm.success) {
      out.m_min = m;
      break;
    }
  }
  return out;
}

struct SupportCase {
  std::string descriptor;
  SupportSet t;
  CVector c0;
};

struct SweepRecord {
  std::string structure;
  std::string support;
  Index g = 1;
  GammaEstimate gamma;
  std::optional<Index> m_min;  // empty: saturated
  std::optional<Index> m0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// One record per (structure, support): penalty factor, minimal M and the
/// singleton baseline M0 under the same protocol.
inline std::vector<SweepRecord> scatter_gamma_vs_m(const MeasurementEnsemble& e,
                                                   const std::vector<GroupStructure>& structures,
                                                   const std::vector<SupportCase>& supports, const SweepConfig& cfg,
                                                   const GammaOptions& gopt = {}) {
  std::vector<SweepRecord> records;
  const GroupStructure base = singletons(e.n());
  for (std::size_t si = 0; si < supports.size(); ++si) {
    const auto& sc = supports[si];
    SweepConfig scfg = cfg;
    scfg.master_seed = combine_seed(cfg.master_seed, si);
    const auto m0 = find_min_m(e, base, sc.t, sc.c0, scfg).m_min;
    for (const auto& gs : structures) {
      SweepRecord r;
      r.structure = gs.name();
      r.support = sc.descriptor;
      r.g = gs.g();
      r.gamma = penalty_gamma(e, sc.t, gs, gopt);
      r.m_min = gs.label() == GroupLabel::Singletons ? m0 : find_min_m(e, gs, sc.t, sc.c0, scfg).m_min;
      r.m0 = m0;
      r.trials = cfg.trials_per_m;
      r.seed = scfg.master_seed;
      records.push_back(std::move(r));
    }
  }
  return records;
}

}  // namespace gim
