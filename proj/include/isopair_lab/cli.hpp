#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "isopair_lab/colligation.hpp"
#include "isopair_lab/cyclic_defect.hpp"
#include "isopair_lab/ideal.hpp"
#include "isopair_lab/isopair.hpp"
#include "isopair_lab/json_io.hpp"
#include "isopair_lab/kernel.hpp"
#include "isopair_lab/poly2.hpp"

namespace isopair_lab::cli {

using json_io::Json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

inline const std::vector<std::string> &commands() {
  static const std::vector<std::string> names{"check-inner-toral", "realize", "rank", "kernel",
                                              "ideal",             "defect",  "report"};
  return names;
}

struct RunConfig {
  std::string command;
  std::vector<std::string> polys;
  std::string colligation;
  std::string factors;
  std::string bundle;
  std::optional<double> tol; ///< replaces the command's main tolerance
  std::uint64_t seed = 0;
  int truncation = 6;
  int samples = 20;
  std::string order = "lex_zw";
  bool exterior = false;
  std::optional<int> generators; ///< defect: use only the first k generators
};

/// Everything a pipeline run needs, read from files or a bundle.
struct Inputs {
  std::optional<poly2::BiPoly> poly;
  std::optional<colligation::Colligation> colligation;
  std::vector<poly2::BiPoly> factors;
  std::optional<Json> triple;
};

struct Stage {
  std::string status = "skipped"; ///< pass, fail, error or skipped
  Json report = Json::object();
  bool ok() const { return status == "pass"; }
};

namespace detail {

inline double tol_or(const RunConfig &cfg, double fallback) {
  const double t = cfg.tol.value_or(fallback);
  if (!(t > 0)) throw InputError("--tol must be positive");
  return t;
}

inline Stage finish(Json report, bool pass) {
  Stage s;
  s.status = pass ? "pass" : "fail";
  s.report = std::move(report);
  return s;
}

inline Stage failed_with(const std::exception &e) {
  Stage s;
  s.status = "error";
  s.report["error"] = e.what();
  return s;
}

inline Json point_json(const poly2::VarietyPoint &p) {
  Json out;
  out["z"] = json_io::to_json(p.z);
  out["w"] = json_io::to_json(p.w);
  return out;
}

inline poly2::BiPoly curve(const Inputs &in) {
  if (in.poly) return *in.poly;
  if (in.factors.empty()) throw InputError("no polynomial or factors given");
  poly2::BiPoly p = in.factors.front();
  for (std::size_t k = 1; k < in.factors.size(); ++k) p = p * in.factors[k];
  return p;
}

inline const colligation::Colligation &need_colligation(const Inputs &in) {
  if (!in.colligation) throw InputError("a colligation is required");
  return *in.colligation;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

inline Stage inner_toral_stage(const poly2::BiPoly &p, const RunConfig &cfg) {
  const double tol = detail::tol_or(cfg, poly2::Tolerances{}.inner_toral);
  const auto rep = poly2::check_inner_toral(p, 256, 64, tol, cfg.exterior);
  Json j;
  j["polynomial"] = json_io::to_json(p);
  j["pass"] = rep.pass;
  j["boundary_max_deviation"] = rep.boundary_max_deviation;
  j["interior_max_modulus"] = rep.interior_max_modulus;
  if (cfg.exterior) j["exterior_min_modulus"] = rep.exterior_min_modulus;
  j["tolerance"] = rep.tolerance;
  Json wits = Json::array();
  for (const auto &w : rep.witnesses) {
    Json x;
    x["z"] = json_io::to_json(w.z);
    x["w"] = w.w ? json_io::to_json(*w.w) : Json(nullptr);
    x["reason"] = w.reason;
    wits.push_back(x);
  }
  j["witnesses"] = wits;
  return detail::finish(std::move(j), rep.pass);
}

inline Stage realize_stage(const colligation::Colligation &c, const RunConfig &cfg) {
  const double tol = detail::tol_or(cfg, 1e-7);
  const auto r = colligation::realize(colligation::evaluator(c));
  const double dist = colligation::transfer_distance(colligation::evaluator(c),
                                                     colligation::evaluator(r.colligation),
                                                     colligation::held_out_points(10));
  const double inner = colligation::verify_inner(r.colligation, 64);
  Json j;
  j["N_input"] = c.N();
  j["N_recovered"] = r.factor.N;
  j["samples_used"] = r.samples_used;
  j["min_gram_eigenvalue"] = r.factor.min_eigenvalue;
  j["held_out_transfer_error"] = dist;
  j["boundary_unitarity_defect"] = inner;
  j["tolerance"] = tol;
  j["realized"] = json_io::to_json(r.colligation);
  return detail::finish(std::move(j), dist <= tol && inner <= tol);
}

struct RankOutcome {
  Stage stage;
  std::optional<isopair::RankResult> rank;
  std::optional<isopair::Factorization> factorization;
};

inline RankOutcome rank_stage(const colligation::Colligation &c, const Inputs &in, const RunConfig &cfg) {
  if (in.factors.empty()) throw InputError("rank: factors are required");
  if (cfg.samples < 1) throw InputError("--samples must be positive");
  if (cfg.truncation < 2) throw InputError("--truncation must be at least 2");
  const double tol = detail::tol_or(cfg, 1e-8);
  const auto fac = isopair::make_factorization(in.factors, in.poly);
  std::vector<std::pair<int, int>> bideg;
  for (const auto &f : fac.factors) bideg.push_back(f.bidegree());
  const auto candidates = isopair::alpha_candidates(c.M(), c.N(), bideg);
  if (candidates.empty()) {
    throw InputError("M = " + std::to_string(c.M()) + " and N = " + std::to_string(c.N()) +
                     " are not a nonnegative combination of the factor bidegrees");
  }
  const isopair::ShiftModel model(c, cfg.truncation);
  const auto rank = isopair::compute_rank(model, fac, cfg.samples, cfg.seed);
  const double annihilation = isopair::annihilation_residual(model, fac.p, isopair::closed_disk_samples());
  std::vector<Complex> lambdas;
  for (int k = 0; k < 10; ++k) lambdas.push_back(std::polar(0.85 * (k + 1) / 10.0, 2.1 * k));
  const auto cp = isopair::char_poly_check(model, fac, rank.alpha, lambdas);
  const auto stab = isopair::rank_stability_check(model, rank, isopair::Blaschke::power_of_z(1));

  Json j;
  j["alpha"] = rank.alpha;
  j["M"] = rank.M;
  j["N"] = rank.N;
  Json bd = Json::array();
  for (const auto &[n, m] : rank.bidegrees) bd.push_back(Json::array({n, m}));
  j["bidegrees"] = bd;
  Json checks;
  checks["annihilation"] = annihilation;
  checks["charpoly"] = cp.max_residual;
  checks["stability"] = stab.stable;
  j["checks"] = checks;
  j["M_identity"] = rank.M_check;
  j["N_identity"] = rank.N_check;
  j["samples_per_component"] = cfg.samples;
  j["truncation"] = cfg.truncation;
  j["tolerance"] = tol;
  const bool pass = rank.M_check && rank.N_check && annihilation <= tol && cp.max_residual <= tol && stab.stable;
  return {detail::finish(std::move(j), pass), rank, fac};
}

struct KernelOutcome {
  Stage stage;
  std::vector<std::vector<kernel::MatrixBiPoly>> generators; ///< per component
};

inline KernelOutcome kernel_stage(const colligation::Colligation &c, const isopair::Factorization &fac,
                                  const std::vector<int> &alpha, const Inputs &in, const RunConfig &cfg) {
  const double tol = detail::tol_or(cfg, 1e-8);
  if (in.triple && fac.factors.size() != 1) throw InputError("a supplied triple needs a single factor");
  KernelOutcome out;
  Json comps = Json::array();
  bool pass = true;
  for (std::size_t j = 0; j < fac.factors.size(); ++j) {
    const poly2::BiPoly &f = fac.factors[j];
    const auto base = kernel::choose_base_point(c, fac.p, f, alpha[j], cfg.seed);
    kernel::AdmissibleTriple t;
    if (in.triple) {
      const Json &tj = *in.triple;
      if (!tj.contains("Q") || !tj.contains("P")) throw InputError("triple: Q and P are required");
      t.Q = json_io::matrix_bipoly_from_json(tj.at("Q"));
      t.P = json_io::matrix_bipoly_from_json(tj.at("P"));
      t.alpha = tj.value("alpha", alpha[j]);
      if (t.Q.cols() != c.M() || t.Q.rows() != t.alpha || t.P.rows() != t.alpha || t.P.cols() != c.N()) {
        throw InputError("triple: shapes do not match alpha, M and N");
      }
      t.p = f;
      t.witness = base;
    } else {
      t = kernel::make_admissible_triple(c, f, base, alpha[j]);
    }
    const auto on_component = poly2::sample_variety(f, 50, cfg.seed + 17);
    const double q_res = kernel::q_residual(t.Q, c, on_component);
    const double inter = kernel::intertwining_residual(t, c, on_component);
    const auto adm = kernel::verify_admissible(t, 50, cfg.seed, tol);
    const auto gram_pts = poly2::sample_variety(f, 6, cfg.seed + 29, {}, {}, 0.6);
    const double gram = kernel::gram_unitarity_check(t, gram_pts);
    const bool comp_pass = q_res <= tol && adm.pass && gram <= 1e-10;
    pass = pass && comp_pass;

    Json cj;
    cj["component"] = static_cast<int>(j);
    cj["alpha"] = t.alpha;
    cj["base"] = detail::point_json(base);
    cj["q_residual"] = q_res;
    cj["intertwining_residual"] = inter;
    cj["kernel_identity_residual"] = adm.max_residual;
    cj["kernel_pairs"] = adm.pairs;
    cj["ranks"] = Json{{"Q", adm.Q_rank}, {"P", adm.P_rank}, {"K", adm.K_rank}};
    cj["gram_unitarity_residual"] = gram;
    cj["pass"] = comp_pass;
    cj["Q"] = json_io::to_json(t.Q);
    cj["P"] = json_io::to_json(t.P);
    comps.push_back(cj);
    out.generators.push_back(ideal::defect_generators(t, base));
  }
  Json j;
  j["tolerance"] = tol;
  j["gram_tolerance"] = 1e-10;
  j["components"] = comps;
  out.stage = detail::finish(std::move(j), pass);
  return out;
}

inline Stage defect_stage(const colligation::Colligation &c,
                          const std::vector<std::vector<kernel::MatrixBiPoly>> &per_component,
                          const RunConfig &cfg) {
  auto gens = ideal::summed_generators(per_component);
  if (cfg.generators) {
    if (*cfg.generators < 1 || *cfg.generators > static_cast<int>(gens.size())) {
      throw InputError("--generators out of range");
    }
    gens.resize(static_cast<std::size_t>(*cfg.generators));
  }
  const auto seq = ideal::cyclic_defect(c, gens);
  Json j;
  j["degrees"] = seq.degrees;
  j["codimensions"] = seq.codimensions;
  j["generators"] = seq.generators;
  j["generator_degree"] = seq.generator_degree;
  j["stabilized"] = seq.stabilized;
  j["defect"] = seq.value ? Json(*seq.value) : Json(nullptr);
  j["rank_threshold"] = isopair::kRankTol;
  return detail::finish(std::move(j), seq.stabilized);
}

inline Stage ideal_stage(const Json &pj, const Json &qj, const RunConfig &cfg) {
  const auto order = ideal::parse_order(cfg.order);
  const auto p = json_io::any_exact_from_json(pj, order);
  const auto q = json_io::any_exact_from_json(qj, order);
  if (p.is_zero() || q.is_zero()) throw InputError("ideal: polynomials must be nonzero");
  const auto gb = ideal::buchberger(p, q, order);
  const auto cop = ideal::relatively_prime(p, q, ideal::TermOrder::degrevlex, cfg.seed);
  Json j;
  j["order"] = ideal::to_string(order);
  Json basis = Json::array();
  for (const auto &g : gb.generators()) basis.push_back(json_io::to_json(g));
  j["basis"] = basis;
  const auto qd = ideal::quotient_dim(gb);
  j["quotient_dim"] = qd ? Json(*qd) : Json("INFINITE");
  if (const auto ns = ideal::normal_set(gb)) {
    Json n = Json::array();
    for (const auto &[a, b] : *ns) n.push_back(Json::array({a, b}));
    j["normal_set"] = n;
  }
  j["relatively_prime"] = cop.relatively_prime;
  j["resultant_cross_check"] = cop.cross_check_agrees;
  bool certificates = true;
  for (const auto &e : gb.elements) certificates = certificates && (e.a * gb.p + e.b * gb.q - e.g).is_zero();
  j["cofactor_certificates_exact"] = certificates;
  const bool consistent = cop.relatively_prime == qd.has_value();
  return detail::finish(std::move(j), cop.cross_check_agrees && certificates && consistent);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

inline Inputs load_inputs(const RunConfig &cfg) {
  Inputs in;
  if (!cfg.bundle.empty()) {
    const Json b = json_io::read_file(cfg.bundle);
    if (!b.is_object() || b.empty()) throw InputError("bundle is empty");
    if (b.contains("poly")) in.poly = json_io::bipoly_from_json(b.at("poly"));
    if (b.contains("colligation")) in.colligation = json_io::colligation_from_json(b.at("colligation"));
    if (b.contains("factors")) in.factors = json_io::factors_from_json(b.at("factors"));
    if (b.contains("triple")) in.triple = b.at("triple");
    if (!in.poly && !in.colligation && in.factors.empty()) throw InputError("bundle has no usable inputs");
    return in;
  }
  if (!cfg.polys.empty()) in.poly = json_io::bipoly_from_json(json_io::read_file(cfg.polys.front()));
  if (!cfg.colligation.empty()) in.colligation = json_io::colligation_from_json(json_io::read_file(cfg.colligation));
  if (!cfg.factors.empty()) in.factors = json_io::factors_from_json(json_io::read_file(cfg.factors));
  return in;
}

/// Runs the full pipeline; a stage whose prerequisites failed is skipped.
inline Json report(const Inputs &in, const RunConfig &cfg, bool &pass) {
  Json stages = Json::object();
  pass = true;
  const auto record = [&](const std::string &name, const Stage &s) {
    Json r = s.report;
    r["status"] = s.status;
    stages[name] = r;
    if (s.status == "fail" || s.status == "error") pass = false;
  };
  const auto guarded = [](auto &&fn) -> Stage {
    try {
      return fn();
    } catch (const DomainError &e) {
      return detail::failed_with(e);
    }
  };

  const bool have_curve = in.poly || !in.factors.empty();
  record("inner_toral", have_curve ? guarded([&] { return inner_toral_stage(detail::curve(in), cfg); }) : Stage{});
  record("realize", in.colligation ? guarded([&] { return realize_stage(*in.colligation, cfg); }) : Stage{});

  RankOutcome rank{Stage{}, std::nullopt, std::nullopt};
  if (in.colligation && !in.factors.empty()) {
    try {
      rank = rank_stage(*in.colligation, in, cfg);
    } catch (const DomainError &e) {
      rank.stage = detail::failed_with(e);
    }
  }
  record("rank", rank.stage);

  KernelOutcome ker{Stage{}, {}};
  if (rank.stage.ok()) {
    try {
      ker = kernel_stage(*in.colligation, *rank.factorization, rank.rank->alpha, in, cfg);
    } catch (const DomainError &e) {
      ker.stage = detail::failed_with(e);
    }
  }
  record("kernel", ker.stage);
  record("defect", ker.stage.ok() ? guarded([&] { return defect_stage(*in.colligation, ker.generators, cfg); })
                                  : Stage{});
  return stages;
}

inline void summarize(std::ostream &err, const std::string &command, const Json &body) {
  if (body.contains("stages")) {
    for (const auto &[name, s] : body.at("stages").items()) {
      err << command << ": " << name << " " << s.at("status").get<std::string>() << '\n';
    }
  }
  err << command << ": " << (body.at("pass").get<bool>() ? "PASS" : "FAIL") << '\n';
}

/// Executes one command. Machine-readable JSON goes to `out`, a short human
/// summary to `err`. Returns the process exit code.
inline int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Json body;
  body["command"] = cfg.command;
  body["seed"] = cfg.seed;
  try {
    if (std::find(commands().begin(), commands().end(), cfg.command) == commands().end()) {
      throw InputError("unknown command '" + cfg.command + "'");
    }
    const auto single = [&](const std::string &name, auto &&fn) {
      Stage s;
      try {
        s = fn();
      } catch (const DomainError &e) {
        s = detail::failed_with(e);
      }
      body[name] = s.report;
      body[name]["status"] = s.status;
      body["pass"] = s.ok();
    };

    if (cfg.command == "ideal") {
      if (cfg.polys.size() != 2) throw InputError("ideal needs exactly two --poly inputs");
      const Json pj = json_io::read_file(cfg.polys[0]);
      const Json qj = json_io::read_file(cfg.polys[1]);
      single("ideal", [&] { return ideal_stage(pj, qj, cfg); });
    } else if (cfg.command == "report") {
      if (cfg.bundle.empty() && cfg.colligation.empty() && cfg.polys.empty()) {
        throw InputError("report needs --bundle or inputs");
      }
      const Inputs in = load_inputs(cfg);
      bool pass = true;
      body["stages"] = report(in, cfg, pass);
      body["pass"] = pass;
    } else {
      const Inputs in = load_inputs(cfg);
      if (cfg.command == "check-inner-toral") {
        if (!in.poly) throw InputError("check-inner-toral needs --poly");
        single("inner_toral", [&] { return inner_toral_stage(*in.poly, cfg); });
      } else if (cfg.command == "realize") {
        single("realize", [&] { return realize_stage(detail::need_colligation(in), cfg); });
      } else if (cfg.command == "rank") {
        single("rank", [&] { return rank_stage(detail::need_colligation(in), in, cfg).stage; });
      } else {
        const auto &c = detail::need_colligation(in);
        RankOutcome rank{Stage{}, std::nullopt, std::nullopt};
        try {
          rank = rank_stage(c, in, cfg);
        } catch (const DomainError &e) {
          rank.stage = detail::failed_with(e);
        }
        if (!rank.rank) {
          body["rank"] = rank.stage.report;
          body["rank"]["status"] = rank.stage.status;
          body["pass"] = false;
        } else if (cfg.command == "kernel") {
          body["alpha"] = rank.rank->alpha;
          single("kernel", [&] { return kernel_stage(c, *rank.factorization, rank.rank->alpha, in, cfg).stage; });
        } else {
          body["alpha"] = rank.rank->alpha;
          KernelOutcome ker{Stage{}, {}};
          try {
            ker = kernel_stage(c, *rank.factorization, rank.rank->alpha, in, cfg);
          } catch (const DomainError &e) {
            ker.stage = detail::failed_with(e);
          }
          if (ker.generators.empty()) {
            body["kernel"] = ker.stage.report;
            body["kernel"]["status"] = ker.stage.status;
            body["pass"] = false;
          } else {
            single("defect", [&] { return defect_stage(c, ker.generators, cfg); });
          }
        }
      }
    }
  } catch (const InputError &e) {
    Json e_body;
    e_body["command"] = cfg.command;
    e_body["error"] = e.what();
    e_body["exit"] = kExitInputError;
    out << e_body.dump(2) << '\n';
    err << cfg.command << ": input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const Json::exception &e) {
    Json e_body;
    e_body["command"] = cfg.command;
    e_body["error"] = e.what();
    e_body["exit"] = kExitInputError;
    out << e_body.dump(2) << '\n';
    err << cfg.command << ": input error: " << e.what() << '\n';
    return kExitInputError;
  }
  const int code = body.at("pass").get<bool>() ? kExitPass : kExitCheckFailed;
  body["exit"] = code;
  out << body.dump(2) << '\n';
  summarize(err, cfg.command, body);
  return code;
}

} // namespace isopair_lab::cli
