#pragma once

// JSON experiment configuration. Sections: ensemble, structure, support,
// sweep, solver, seeds, and the subcommand-specific bounds, validate and
// recover. Unknown keys anywhere are rejected.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gim/harness.hpp"
#include "gim/io.hpp"

namespace gim::config {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require(j.is_object(), "config: '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    require(ok.count(key) != 0, "config: unknown key '" + key + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("config: bad value for '") + key + "': " + ex.what());
  }
}

struct EnsembleConfig {
  std::string measurement = "identity";
  std::string sparsity = "dft1d";
  Index n = 0;
  Index rows = 0;
  Index cols = 0;
  int levels = -1;
  bool two_d() const { return rows > 0; }
};

struct StructureConfig {
  std::string kind = "singletons";
  Index g = 1;
  std::uint64_t seed = 0;
};

struct SupportConfig {
  std::string model = "unrestricted";  // unrestricted | subband | explicit | image | synthetic_image
  Index k = 0;
  int channels = 2;
  double channel_width_frac = 0.05;
  std::vector<Index> indices;
  std::string image;
  int draws = 1;
};

struct BoundsConfig {
  double delta = 0.05;
  double constant = 1.0;
};

struct ValidateConfig {
  std::vector<double> m;
  int trials = 500;
  Index t0 = -1;  // -1: first index outside the support
};

struct RecoverConfig {
  Index m = 0;
  std::string dump;
};

struct Config {
  EnsembleConfig ensemble;
  std::vector<StructureConfig> structures;
  SupportConfig support;
  SweepConfig sweep;
  GammaOptions gamma;
  std::uint64_t master_seed = 0;
  BoundsConfig bounds;
  ValidateConfig validate;
  RecoverConfig recover;
};

/// The master seed drives support draws, sweep trials and gamma restarts.
inline void set_seed(Config& c, std::uint64_t seed) {
  c.master_seed = seed;
  c.sweep.master_seed = seed;
  c.gamma.seed = seed;
}

inline StructureConfig parse_structure(const json& j) {
  check_keys(j, "structure", {"kind", "g", "seed"});
  StructureConfig s;
  s.kind = get_or<std::string>(j, "kind", s.kind);
  s.g = get_or<Index>(j, "g", s.g);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  return s;
}

inline Config parse(const json& root) {
  check_keys(root, "config",
             {"ensemble", "structure", "support", "sweep", "solver", "seeds", "bounds", "validate", "recover"});
  Config c;
  if (root.contains("ensemble")) {
    const auto& j = root.at("ensemble");
    check_keys(j, "ensemble", {"measurement", "sparsity", "n", "rows", "cols", "levels"});
    auto& e = c.ensemble;
    e.measurement = get_or<std::string>(j, "measurement", e.measurement);
    e.sparsity = get_or<std::string>(j, "sparsity", e.sparsity);
    e.n = get_or<Index>(j, "n", e.n);
    e.rows = get_or<Index>(j, "rows", e.rows);
    e.cols = get_or<Index>(j, "cols", e.cols);
    e.levels = get_or<int>(j, "levels", e.levels);
    require(e.two_d() == (e.cols > 0), "config: ensemble rows and cols must be given together");
    if (e.two_d()) {
      require(e.n == 0 || e.n == e.rows * e.cols, "config: ensemble n disagrees with rows*cols");
      e.n = e.rows * e.cols;
    }
    require(e.n > 0, "config: ensemble size missing");
  } else {
    throw Error("config: missing 'ensemble' section");
  }
  if (root.contains("structure")) {
    const auto& j = root.at("structure");
    if (j.is_array())
      for (const auto& s : j) c.structures.push_back(parse_structure(s));
    else
      c.structures.push_back(parse_structure(j));
  }
  if (root.contains("support")) {
    const auto& j = root.at("support");
    check_keys(j, "support", {"model", "k", "channels", "channel_width_frac", "indices", "image", "draws"});
    auto& s = c.support;
    s.model = get_or<std::string>(j, "model", s.model);
    s.k = get_or<Index>(j, "k", s.k);
    s.channels = get_or<int>(j, "channels", s.channels);
    s.channel_width_frac = get_or<double>(j, "channel_width_frac", s.channel_width_frac);
    s.indices = get_or<std::vector<Index>>(j, "indices", s.indices);
    s.image = get_or<std::string>(j, "image", s.image);
    s.draws = get_or<int>(j, "draws", s.draws);
    require(s.draws >= 1, "config: support.draws must be positive");
  }
  if (root.contains("sweep")) {
    const auto& j = root.at("sweep");
    check_keys(j, "sweep",
               {"m_grid", "step", "trials_per_m", "success_nre", "success_quota", "fresh_coefficients", "early_stop"});
    auto& s = c.sweep;
    s.m_grid = get_or<std::vector<Index>>(j, "m_grid", s.m_grid);
    s.step = get_or<Index>(j, "step", s.step);
    s.trials_per_m = get_or<int>(j, "trials_per_m", s.trials_per_m);
    s.success_nre = get_or<double>(j, "success_nre", s.success_nre);
    s.success_quota = get_or<double>(j, "success_quota", s.success_quota);
    s.fresh_coefficients = get_or<bool>(j, "fresh_coefficients", s.fresh_coefficients);
    s.early_stop = get_or<bool>(j, "early_stop", s.early_stop);
    require(s.success_quota > 0 && s.success_quota <= 1, "config: success_quota must lie in (0, 1]");
  }
  if (root.contains("solver")) {
    const auto& j = root.at("solver");
    check_keys(j, "solver",
               {"tol_feas", "tol_obj", "max_iters", "gamma_mode", "phase_restarts", "enum_limit", "sdp_restarts"});
    auto& s = c.sweep.solver;
    s.tol_feas = get_or<double>(j, "tol_feas", s.tol_feas);
    s.tol_obj = get_or<double>(j, "tol_obj", s.tol_obj);
    s.max_iters = get_or<int>(j, "max_iters", s.max_iters);
    c.gamma.mode = gamma_mode_from_string(get_or<std::string>(j, "gamma_mode", "auto"));
    c.gamma.restarts = get_or<int>(j, "phase_restarts", c.gamma.restarts);
    c.gamma.enum_limit = get_or<int>(j, "enum_limit", c.gamma.enum_limit);
    c.gamma.sdp_restarts = get_or<int>(j, "sdp_restarts", c.gamma.sdp_restarts);
  }
  if (root.contains("seeds")) {
    const auto& j = root.at("seeds");
    check_keys(j, "seeds", {"master"});
    c.master_seed = get_or<std::uint64_t>(j, "master", c.master_seed);
  }
  if (root.contains("bounds")) {
    const auto& j = root.at("bounds");
    check_keys(j, "bounds", {"delta", "const"});
    c.bounds.delta = get_or<double>(j, "delta", c.bounds.delta);
    c.bounds.constant = get_or<double>(j, "const", c.bounds.constant);
  }
  if (root.contains("validate")) {
    const auto& j = root.at("validate");
    check_keys(j, "validate", {"m", "trials", "t0"});
    if (j.contains("m") && j.at("m").is_number())
      c.validate.m = {j.at("m").get<double>()};
    else
      c.validate.m = get_or<std::vector<double>>(j, "m", c.validate.m);
    c.validate.trials = get_or<int>(j, "trials", c.validate.trials);
    c.validate.t0 = get_or<Index>(j, "t0", c.validate.t0);
  }
  if (root.contains("recover")) {
    const auto& j = root.at("recover");
    check_keys(j, "recover", {"m", "dump"});
    c.recover.m = get_or<Index>(j, "m", c.recover.m);
    c.recover.dump = get_or<std::string>(j, "dump", c.recover.dump);
  }
  set_seed(c, c.master_seed);
  return c;
}

inline Config parse_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(std::string("config: invalid JSON: ") + ex.what());
  }
  return parse(j);
}

inline Config load(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_text(ss.str());
}

inline BasisKind basis_kind_from_string(const std::string& s) {
  for (auto k : {BasisKind::Identity, BasisKind::Dft1D, BasisKind::Dft2D, BasisKind::Haar2D})
    if (to_string(k) == s) return k;
  throw Error("config: unknown basis '" + s + "'");
}

inline OrthonormalBasis build_basis(const EnsembleConfig& e, const std::string& name) {
  const BasisKind kind = basis_kind_from_string(name);
  if (e.two_d()) return make_basis(kind, e.rows, e.cols, e.levels);
  return make_basis(kind, e.n);
}

inline MeasurementEnsemble build_ensemble(const Config& c) {
  return make_ensemble(build_basis(c.ensemble, c.ensemble.measurement), build_basis(c.ensemble, c.ensemble.sparsity));
}

inline GroupStructure build_structure(const Config& c, const StructureConfig& s) {
  const auto& e = c.ensemble;
  const GroupLabel label = group_label_from_string(s.kind);
  auto need_2d = [&] { require(e.two_d(), "config: structure '" + s.kind + "' needs ensemble rows and cols"); };
  switch (label) {
    case GroupLabel::Strided1D: return strided_1d(e.n, s.g);
    case GroupLabel::Contiguous1D: return contiguous_1d(e.n, s.g);
    case GroupLabel::Singletons: return singletons(e.n);
    case GroupLabel::RandomGroups: return random_groups(e.n, s.g, s.seed);
    case GroupLabel::VLines2D: need_2d(); return lines_2d(e.rows, e.cols, s.g, Orientation::Vertical);
    case GroupLabel::HLines2D: need_2d(); return lines_2d(e.rows, e.cols, s.g, Orientation::Horizontal);
    case GroupLabel::Rect2D: need_2d(); return rect_2d(e.rows, e.cols, s.g);
    case GroupLabel::Spiral2D: need_2d(); return spiral_2d(e.rows, e.cols, s.g, false);
    case GroupLabel::CyclicSpiral2D: need_2d(); return spiral_2d(e.rows, e.cols, s.g, true);
    case GroupLabel::MaxManhattan2D: need_2d(); return max_manhattan_2d(e.rows, e.cols, s.g);
  }
  throw Error("config: unknown structure");
}

inline std::vector<GroupStructure> build_structures(const Config& c) {
  require(!c.structures.empty(), "config: missing 'structure' section");
  std::vector<GroupStructure> out;
  for (const auto& s : c.structures) out.push_back(build_structure(c, s));
  return out;
}

/// Support draws; each gets its own stream of the master seed.
inline std::vector<SupportCase> build_supports(const Config& c) {
  const auto& s = c.support;
  const Index n = c.ensemble.n;
  std::vector<SupportCase> out;
  for (int d = 0; d < s.draws; ++d) {
    Rng rng(combine_seed(combine_seed(c.master_seed, hash_string("support")), static_cast<std::uint64_t>(d)));
    SupportCase sc;
    const std::string tag = "#" + std::to_string(d);
    if (s.model == "unrestricted" || s.model == "subband") {
      FourierSignalSpec spec{n, s.k, s.model == "subband" ? SupportModel::Subband : SupportModel::Unrestricted,
                             s.channels, s.channel_width_frac};
      sc.t = draw_support(spec, rng);
      sc.c0 = draw_coefficients(sc.t, n, rng);
      sc.descriptor = s.model == "subband" ? "subband" + std::to_string(s.channels) + tag : "unrestricted" + tag;
    } else if (s.model == "explicit") {
      sc.t = SupportSet::from_unsorted(s.indices, n);
      sc.c0 = draw_coefficients(sc.t, n, rng);
      sc.descriptor = "explicit" + tag;
    } else if (s.model == "image" || s.model == "synthetic_image") {
      const auto& e = c.ensemble;
      require(e.two_d() && e.sparsity == "haar2d", "config: image supports need a 2-D haar2d sparsity basis");
      const RMatrix img = s.model == "image" ? io::read_pgm(s.image) : synthetic_image(e.rows, e.cols, rng);
      require(img.rows() == e.rows && img.cols() == e.cols, "config: image size does not match the ensemble");
      auto sp = image_to_sparse(img, s.k, e.levels);
      sc.t = std::move(sp.t);
      sc.c0 = std::move(sp.c0);
      sc.descriptor = (s.model == "image" ? "image" : "synthetic") + tag;
    } else {
      throw Error("config: unknown support model '" + s.model + "'");
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace gim::config
