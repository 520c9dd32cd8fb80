#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "steinerlab/moustache.hpp"

namespace steinerlab {

struct SampleVerdict {
  bool target_present = false;
  bool unambiguous = false;
  bool fragile = false;
  bool ok = false;  // the certification requirement at this sample
  double min_length = 0.0;
  TypeSignature type;
};

struct PathParams {
  int samples = 200;          // minimum sample count of the returned path
  double safety_factor = 0.5; // fraction of the sampled R1 infimum used as radius
  int r1_probes = 10;         // R1 estimates along the lower path
  double r1_gap = 0.05;       // bracket gap for those estimates
  double rel_tol = 1e-9;
  double step_bound = std::numeric_limits<double>::infinity();
  int budget = default_topology_budget();
  double solver_tol = 1e-10;
};

// A sampled path in configuration space with per-sample solver verdicts.
// Paths are polylines: the samples define the path, and every claim about it
// is backed by the per-sample certification rather than asserted symbolically.
struct CertifiedPath {
  std::vector<double> t;
  std::vector<Configuration> samples;
  std::vector<SampleVerdict> verdicts;
  TypeSignature target_type;
  PathParams params;
  double step_bound = 0.0;  // largest inter-sample displacement observed
  bool passed = false;
  int fragile_count = 0;
  std::string failure;
};

namespace detail {

enum class CertifyMode { Unambiguous, CellOnly };

inline SmtOptions smt_options(const PathParams& p) {
  return SmtOptions{p.rel_tol, p.budget, p.solver_tol};
}

inline SampleVerdict certify_sample(const Configuration& c, const TypeSignature& target,
                                    CertifyMode mode, const SmtOptions& opts) {
  SampleVerdict v;
  SmtResult res;
  try {
    res = steiner_minimal_trees(c, opts);
  } catch (const std::exception& e) {
    // an unsolvable or invalid sample is an honest certification failure
    v.type = std::string("unsolved: ") + e.what();
    return v;
  }
  v.min_length = res.min_length;
  v.fragile = res.fragile;
  v.unambiguous = res.minima.size() == 1;
  for (const SmtMinimum& m : res.minima)
    if (m.signature == target) v.target_present = true;
  v.type = v.unambiguous ? res.minima[0].signature
                         : (v.target_present ? target : res.minima.front().signature);
  v.ok = mode == CertifyMode::Unambiguous ? (v.unambiguous && v.target_present)
                                          : v.target_present;
  return v;
}

inline double max_step(const std::vector<Configuration>& samples) {
  double worst = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    worst = std::max(worst, config_distance(samples[i - 1], samples[i]));
  return worst;
}

// Builds the certified path from polyline nodes: dedupes, refines to the step
// bound and the requested sample count, certifies every node, and refines x4
// once around fragile or failing verdicts.
inline CertifiedPath certify_polyline(std::vector<Configuration> samples,
                                      std::vector<CertifyMode> modes,
                                      const TypeSignature& target,
                                      const PathParams& params) {
  const double scale = std::max(diameter(samples.front()), 1e-300);
  // drop exact duplicates at segment junctions
  {
    std::vector<Configuration> s;
    std::vector<CertifyMode> m;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!s.empty() && config_distance(s.back(), samples[i]) <= 1e-15 * scale &&
          samples.size() > 2)
        continue;
      s.push_back(std::move(samples[i]));
      m.push_back(modes[i]);
    }
    samples = std::move(s);
    modes = std::move(m);
  }
  if (samples.size() < 2) {
    samples.push_back(samples.front());
    modes.push_back(modes.front());
  }

  auto insert_midpoints = [&](auto pred) {
    std::vector<Configuration> s;
    std::vector<CertifyMode> m;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i > 0 && pred(i)) {
        Configuration mid;
        mid.dim = samples[i].dim;
        for (std::size_t p = 0; p < samples[i].points.size(); ++p)
          mid.points.push_back(lerp(samples[i - 1].points[p], samples[i].points[p], 0.5));
        s.push_back(std::move(mid));
        m.push_back(modes[i - 1] == CertifyMode::CellOnly ? modes[i - 1] : modes[i]);
      }
      s.push_back(samples[i]);
      m.push_back(modes[i]);
    }
    samples = std::move(s);
    modes = std::move(m);
  };

  for (int round = 0; round < 8 && max_step(samples) > params.step_bound; ++round)
    insert_midpoints([&](std::size_t i) {
      return config_distance(samples[i - 1], samples[i]) > params.step_bound;
    });
  while (static_cast<int>(samples.size()) < params.samples) {
    const std::size_t before = samples.size();
    insert_midpoints([&](std::size_t i) {
      return config_distance(samples[i - 1], samples[i]) > 1e-15 * scale;
    });
    if (samples.size() == before) break;
  }

  CertifiedPath path;
  path.target_type = target;
  const SmtOptions opts{params.rel_tol, params.budget, params.solver_tol};
  std::vector<SampleVerdict> verdicts;
  verdicts.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    verdicts.push_back(certify_sample(samples[i], target, modes[i], opts));

  // one adaptive refinement pass around fragile or failing samples
  {
    std::vector<Configuration> refined;
    std::vector<CertifyMode> refined_modes;
    std::vector<SampleVerdict> refined_verdicts;
    auto needs_attention = [&](std::size_t i) {
      return verdicts[i].fragile || !verdicts[i].ok;
    };
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i > 0 && (needs_attention(i - 1) || needs_attention(i))) {
        for (int sub = 1; sub < 4; ++sub) {
          Configuration mid;
          mid.dim = samples[i].dim;
          for (std::size_t p = 0; p < samples[i].points.size(); ++p)
            mid.points.push_back(
                lerp(samples[i - 1].points[p], samples[i].points[p], sub / 4.0));
          if (config_distance(mid, samples[i - 1]) <= 1e-15 * scale) continue;
          const CertifyMode mode =
              modes[i - 1] == CertifyMode::CellOnly ? modes[i - 1] : modes[i];
          refined_verdicts.push_back(certify_sample(mid, target, mode, opts));
          refined.push_back(std::move(mid));
          refined_modes.push_back(mode);
        }
      }
      refined.push_back(samples[i]);
      refined_modes.push_back(modes[i]);
      refined_verdicts.push_back(verdicts[i]);
    }
    samples = std::move(refined);
    modes = std::move(refined_modes);
    verdicts = std::move(refined_verdicts);
  }

  // parameter values by cumulative arc length, uniform fallback for constant paths
  std::vector<double> cum(samples.size(), 0.0);
  for (std::size_t i = 1; i < samples.size(); ++i)
    cum[i] = cum[i - 1] + config_distance(samples[i - 1], samples[i]);
  const double total = cum.back();
  path.t.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    path.t[i] = total > 0.0 ? cum[i] / total
                            : static_cast<double>(i) / (samples.size() - 1);
  for (std::size_t i = 1; i < path.t.size(); ++i)
    if (path.t[i] <= path.t[i - 1])
      path.t[i] = path.t[i - 1] + 1e-12;  // keep t strictly increasing

  path.step_bound = max_step(samples);
  path.samples = std::move(samples);
  path.verdicts = std::move(verdicts);
  path.passed = true;
  for (std::size_t i = 0; i < path.verdicts.size(); ++i) {
    path.fragile_count += path.verdicts[i].fragile ? 1 : 0;
    if (!path.verdicts[i].ok && path.passed) {
      path.passed = false;
      path.failure = "certification failed at t=" + std::to_string(path.t[i]);
    }
  }
  return path;
}

inline CertifiedPath failed_path(const Configuration& s0, const Configuration& s1,
                                 const TypeSignature& target, std::string why) {
  CertifiedPath path;
  path.target_type = target;
  path.t = {0.0, 1.0};
  path.samples = {s0, s1};
  path.passed = false;
  path.failure = std::move(why);
  return path;
}

inline std::vector<Configuration> straight_samples(const Configuration& a,
                                                   const Configuration& b, int count) {
  std::vector<Configuration> out;
  count = std::max(count, 2);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    Configuration c;
    c.dim = a.dim;
    for (std::size_t p = 0; p < a.points.size(); ++p)
      c.points.push_back(lerp(a.points[p], b.points[p], t));
    out.push_back(std::move(c));
  }
  return out;
}

// --- shave/grow plumbing between configuration spaces -----------------------

inline Configuration shave_config(const Network& net, const ShaveResult& sh) {
  Configuration c;
  c.dim = net.config.dim;
  c.points.resize(sh.topology.n);
  for (int v = 0; v < net.topology.vertex_count(); ++v) {
    const int nv = sh.vertex_map[v];
    if (nv >= 0 && nv < sh.topology.n) c.points[nv] = net.position(v);
  }
  return c;
}

inline std::vector<Vec> shave_interior(const Network& net, const ShaveResult& sh) {
  std::vector<Vec> interior(sh.topology.interior);
  for (int v = 0; v < net.topology.vertex_count(); ++v) {
    const int nv = sh.vertex_map[v];
    if (nv >= sh.topology.n) interior[nv - sh.topology.n] = net.position(v);
  }
  return interior;
}

// Exact inverse of shave_config on the labels: leaves return to their original
// slots, everything else maps back through the terminal map.
inline Configuration grow_config(const ShaveResult& sh, const Configuration& lower,
                                 const Vec& p_pos, const Vec* q_pos, int old_n) {
  Configuration c;
  c.dim = lower.dim;
  c.points.resize(old_n);
  for (int old_t = 0; old_t < old_n; ++old_t) {
    if (old_t == sh.moustache.leaf_p) {
      c.points[old_t] = p_pos;
    } else if (sh.moustache.kind == MoustacheSpec::Kind::TwoSided &&
               old_t == sh.moustache.leaf_q) {
      c.points[old_t] = *q_pos;
    } else {
      c.points[old_t] = lower.points[sh.terminal_map[old_t]];
    }
  }
  return c;
}

struct TypeContext {
  SteinerTopology type;  // contracted type of the target
  TypeSignature sig;
};

CertifiedPath connect_rec(const Configuration& s0, const Network& net0,
                          const Configuration& s1, const Network& net1,
                          const TypeContext& ctx, const PathParams& params, int depth);

}  // namespace detail

// --- certified paths inside an unambiguous cell ------------------------------

inline CertifiedPath connect_unambiguous(const Configuration& s0, const Configuration& s1,
                                         const TypeSignature& target,
                                         const PathParams& params = {}) {
  if (auto r = validate_configuration(s0)) throw std::invalid_argument(*r);
  if (auto r = validate_configuration(s1)) throw std::invalid_argument(*r);
  if (s0.size() != s1.size() || s0.dim != s1.dim)
    throw std::invalid_argument("endpoint configurations disagree in n or d");
  const SmtOptions opts = detail::smt_options(params);
  SmtResult r0 = steiner_minimal_trees(s0, opts);
  if (r0.minima.size() != 1 || r0.minima[0].signature != target)
    throw std::invalid_argument("endpoint s0 is not in ucell of the target type");
  SmtResult r1 = steiner_minimal_trees(s1, opts);
  if (r1.minima.size() != 1 || r1.minima[0].signature != target)
    throw std::invalid_argument("endpoint s1 is not in ucell of the target type");
  detail::TypeContext ctx{r0.minima[0].network.topology, target};
  CertifiedPath path;
  try {
    path = detail::connect_rec(s0, r0.minima[0].network, s1, r1.minima[0].network, ctx,
                               params, 0);
  } catch (const std::exception& e) {
    // construction trouble is a failed path, not an exception: the endpoints
    // were verified, so report what broke in between
    path = detail::failed_path(s0, s1, target,
                               std::string("path construction failed: ") + e.what());
  }
  path.params = params;
  return path;
}

namespace detail {

inline CertifiedPath connect_rec(const Configuration& s0, const Network& net0,
                                 const Configuration& s1, const Network& net1,
                                 const TypeContext& ctx, const PathParams& params,
                                 int depth) {
  const int n = s0.size();
  const double scale = std::max(diameter(s0), 1e-300);

  // constant path: certify once, replicate the verdict
  if (config_distance(s0, s1) <= 1e-15 * scale) {
    const int count = std::max(params.samples, 2);
    CertifiedPath path;
    path.target_type = ctx.sig;
    const SampleVerdict v =
        certify_sample(s0, ctx.sig, CertifyMode::Unambiguous, smt_options(params));
    for (int i = 0; i < count; ++i) {
      path.t.push_back(static_cast<double>(i) / (count - 1));
      path.samples.push_back(s0);
      path.verdicts.push_back(v);
      path.fragile_count += v.fragile ? 1 : 0;
    }
    path.passed = v.ok;
    if (!v.ok) path.failure = "certification failed on the constant path";
    return path;
  }

  // base cases: single points and segments move freely off the diagonal
  if (n <= 2) {
    double clearance = 1.0;
    if (n == 2)
      clearance = 0.5 * std::min(diagonal_distance(s0), diagonal_distance(s1));
    std::vector<Configuration> samples =
        interpolate_off_diagonal(s0, s1, clearance, std::max(params.samples, 2));
    std::vector<CertifyMode> modes(samples.size(), CertifyMode::Unambiguous);
    return certify_polyline(std::move(samples), std::move(modes), ctx.sig, params);
  }

  // 1. moustache choice: deterministic, smallest leaf label first
  std::vector<MoustacheSpec> moustaches = find_moustaches(ctx.type);
  if (moustaches.empty())
    return failed_path(s0, s1, ctx.sig, "type has no moustache to shave");
  const MoustacheSpec m = moustaches.front();
  const bool two_sided = m.kind == MoustacheSpec::Kind::TwoSided;

  // 2. shave both endpoint networks
  const ShaveResult sh = shave(ctx.type, m);
  const Configuration s0p = shave_config(net0, sh);
  const Configuration s1p = shave_config(net1, sh);
  Network low0{sh.topology, s0p, shave_interior(net0, sh), 0.0};
  low0.length = network_length(low0);
  Network low1{sh.topology, s1p, shave_interior(net1, sh), 0.0};
  low1.length = network_length(low1);

  TypeContext sub_ctx;
  sub_ctx.type = sh.topology;
  if (s0.dim == 2) {
    std::vector<Vec> pos0;
    for (int v = 0; v < sh.topology.vertex_count(); ++v) pos0.push_back(low0.position(v));
    sub_ctx.sig = canonicalize(sh.topology, planar_orders_from_positions(sh.topology, pos0));
    std::vector<Vec> pos1;
    for (int v = 0; v < sh.topology.vertex_count(); ++v) pos1.push_back(low1.position(v));
    if (canonicalize(sh.topology, planar_orders_from_positions(sh.topology, pos1)) != sub_ctx.sig)
      return failed_path(s0, s1, ctx.sig, "shaved endpoint types disagree");
  } else {
    sub_ctx.sig = canonicalize(sh.topology);
  }

  // 3. recurse
  PathParams sub_params = params;
  sub_params.samples = std::max(48, params.samples / 2);
  CertifiedPath lower = connect_rec(s0p, low0, s1p, low1, sub_ctx, sub_params, depth + 1);
  if (!lower.passed)
    return failed_path(s0, s1, ctx.sig, "lower level failed: " + lower.failure);

  // 4. realize the lower path and build the continuous direction field
  const int anchor = sh.anchor_new_label;
  auto sub_adj = adjacency(sh.topology);
  if (sub_adj[anchor].size() != 1)
    return failed_path(s0, s1, ctx.sig, "anchor is not degree-1 after shaving");
  const int w = sub_adj[anchor][0];
  const int m_count = static_cast<int>(lower.samples.size());

  // realize the shaved type along the lower path: the R1 probes need full
  // networks, and the anchor's neighbor position gives the field direction
  std::vector<std::vector<Vec>> low_interior(m_count);
  std::vector<Vec> omega(m_count);
  {
    SolveOptions solve_opts;
    solve_opts.tol = params.solver_tol;
    for (int j = 0; j < m_count; ++j) {
      Vec w_pos;
      if (sh.topology.interior == 0) {
        w_pos = lower.samples[j].points[w];
      } else {
        if (j > 0) solve_opts.init = low_interior[j - 1];
        Network realized = minimize_fixed_topology(lower.samples[j], sh.topology, solve_opts);
        low_interior[j] = realized.interior_positions;
        w_pos = realized.position(w);
      }
      const Vec x = lower.samples[j].points[anchor];
      omega[j] = unit(sub(w_pos, x));
    }
  }

  // endpoint directions read off the realized networks of s0 and s1
  const Vec phi_true0 = unit(sub(net0.position(m.leaf_p), net0.position(m.anchor)));
  const Vec phi_true1 = unit(sub(net1.position(m.leaf_p), net1.position(m.anchor)));

  std::vector<Vec> phi(m_count), psi;
  std::vector<Vec> u_field;  // d >= 3 only
  if (s0.dim == 2) {
    if (two_sided) {
      const double side0 = cross2(omega.front(), phi_true0);
      const double side1 = cross2(omega.back(), phi_true1);
      if (side0 * side1 <= 0.0)
        return failed_path(s0, s1, ctx.sig, "incompatible planar sides at the endpoints");
      const double sigma = side0 > 0.0 ? 1.0 : -1.0;
      for (int j = 0; j < m_count; ++j)
        phi[j] = rotate2(omega[j], sigma * 2.0 * M_PI / 3.0);
    } else {
      auto beta_of = [](const Vec& om, const Vec& ph) {
        const Vec back = scaled(om, -1.0);
        return std::atan2(cross2(back, ph), dot(back, ph));
      };
      const double b0 = beta_of(omega.front(), phi_true0);
      const double b1 = beta_of(omega.back(), phi_true1);
      for (int j = 0; j < m_count; ++j) {
        const double tau = lower.t[j];
        phi[j] = rotate2(scaled(omega[j], -1.0), (1.0 - tau) * b0 + tau * b1);
      }
    }
  } else {
    // transport the off-axis component along the path and blend the endpoints
    auto component = [](const Vec& ph, const Vec& om) {
      Vec u = project_out(ph, om);
      return norm(u) > 1e-9 ? unit(u) : any_unit_orthogonal(om);
    };
    std::vector<Vec> fwd(m_count), bwd(m_count);
    fwd[0] = component(phi_true0, omega[0]);
    for (int j = 1; j < m_count; ++j) {
      Vec u = project_out(fwd[j - 1], omega[j]);
      fwd[j] = norm(u) > 1e-9 ? unit(u) : any_unit_orthogonal(omega[j]);
    }
    bwd[m_count - 1] = component(phi_true1, omega[m_count - 1]);
    for (int j = m_count - 2; j >= 0; --j) {
      Vec u = project_out(bwd[j + 1], omega[j]);
      bwd[j] = norm(u) > 1e-9 ? unit(u) : any_unit_orthogonal(omega[j]);
    }
    u_field.resize(m_count);
    const double beta0 = angle_between(phi_true0, scaled(omega.front(), -1.0));
    const double beta1 = angle_between(phi_true1, scaled(omega.back(), -1.0));
    for (int j = 0; j < m_count; ++j) {
      const double tau = lower.t[j];
      Vec blend = add(scaled(fwd[j], 1.0 - tau), scaled(bwd[j], tau));
      Vec u = project_out(std::move(blend), omega[j]);
      u_field[j] = norm(u) > 1e-9 ? unit(u) : fwd[j];
      if (two_sided) {
        phi[j] = add(scaled(omega[j], -0.5), scaled(u_field[j], std::sqrt(3.0) / 2.0));
      } else {
        const double beta = (1.0 - tau) * beta0 + tau * beta1;
        phi[j] = add(scaled(omega[j], -std::cos(beta)), scaled(u_field[j], std::sin(beta)));
      }
    }
  }
  if (two_sided) {
    psi.resize(m_count);
    for (int j = 0; j < m_count; ++j) psi[j] = scaled(add(phi[j], omega[j]), -1.0);
  }
  // continuity of the field: a large jump of phi without a matching jump of
  // omega would mean the lifting side flipped between samples
  for (int j = 1; j < m_count; ++j)
    if (dist(phi[j], phi[j - 1]) > 0.5 && dist(omega[j], omega[j - 1]) < 0.25)
      return failed_path(s0, s1, ctx.sig, "direction field discontinuity at sample " +
                                              std::to_string(j));

  // 5. uniform moustache radius from sampled admissibility brackets along the
  // lower path; each probe grows the exact lift (original labels, anchor kept
  // terminal when it was one), so a passing radius certifies the move stage
  double r_inf = std::numeric_limits<double>::infinity();
  const SmtOptions smt_opts = smt_options(params);
  const int probes = std::max(2, std::min(params.r1_probes, m_count));
  try {
    for (int i = 0; i < probes; ++i) {
      const int j = static_cast<int>(
          std::llround(static_cast<double>(i) * (m_count - 1) / (probes - 1)));
      Network low{sh.topology, lower.samples[j], low_interior[j], 0.0};
      low.length = network_length(low);
      const Vec x = lower.samples[j].points[anchor];
      auto oracle = [&](double r) -> bool {
        const Vec p_pos = add(x, scaled(phi[j], r));
        Vec q_pos;
        if (two_sided) q_pos = add(x, scaled(psi[j], r));
        Configuration grown =
            grow_config(sh, lower.samples[j], p_pos, two_sided ? &q_pos : nullptr, n);
        if (validate_configuration(grown)) return false;  // collision at this radius
        const double candidate = low.length + (two_sided ? 2.0 * r : r);
        SmtResult res = steiner_minimal_trees(grown, smt_opts);
        return res.minima.size() == 1 && !res.fragile &&
               res.minima[0].signature == ctx.sig &&
               candidate <= res.min_length * (1.0 + params.rel_tol);
      };
      R1Estimate est = bisect_admissible(oracle, 1.0,
                                         1e-9 * diameter(lower.samples[j]),
                                         params.r1_gap);
      r_inf = std::min(r_inf, est.lower);
    }
  } catch (const SolverError& e) {
    return failed_path(s0, s1, ctx.sig, std::string("R1 estimation failed: ") + e.what());
  }
  const double radius = params.safety_factor * r_inf;
  if (!(radius > 0.0))
    return failed_path(s0, s1, ctx.sig, "no positive uniform radius found");

  // 6. assemble trim / move / grow and certify the polyline
  std::vector<Configuration> nodes;
  const int end_count = std::max(6, params.samples / 5);
  std::vector<Configuration> move_nodes(m_count);
  for (int j = 0; j < m_count; ++j) {
    const Vec x = lower.samples[j].points[anchor];
    const Vec p_pos = add(x, scaled(phi[j], radius));
    Vec q_pos;
    if (two_sided) q_pos = add(x, scaled(psi[j], radius));
    move_nodes[j] = grow_config(sh, lower.samples[j], p_pos,
                                two_sided ? &q_pos : nullptr, n);
  }
  std::vector<Configuration> trim_nodes = straight_samples(s0, move_nodes.front(), end_count);
  std::vector<Configuration> grow_nodes = straight_samples(move_nodes.back(), s1, end_count);
  nodes.insert(nodes.end(), trim_nodes.begin(), trim_nodes.end());
  nodes.insert(nodes.end(), move_nodes.begin() + 1, move_nodes.end());
  nodes.insert(nodes.end(), grow_nodes.begin() + 1, grow_nodes.end());

  std::vector<CertifyMode> modes(nodes.size(), CertifyMode::Unambiguous);
  return certify_polyline(std::move(nodes), std::move(modes), ctx.sig, params);
}

}  // namespace detail

// --- escaping ambiguity inside a planar cell ---------------------------------

struct EscapeMove {
  double r = 0.0;
  std::vector<Vec> motions;  // m(u) = d_Gamma(u) per terminal
  Configuration moved;
  SmtResult before;
  SmtResult after;
  double margin = 0.0;  // runner-up length minus type length after the move
};

// Moves every terminal along the direction vector of the chosen full minimum.
// The length derivative of that network is n while every competitor's is at
// most n, so a small move makes it the strict minimum; the radius is halved
// until the verdict confirms it.
inline EscapeMove escape_ambiguity(const Configuration& config,
                                   const TypeSignature& target,
                                   const SmtOptions& opts = {}) {
  if (auto r = validate_configuration(config)) throw std::invalid_argument(*r);
  if (config.dim != 2)
    throw std::domain_error("out of theorem scope: escape needs d=2");
  SmtResult before = steiner_minimal_trees(config, opts);
  const SmtMinimum* entry = nullptr;
  for (const SmtMinimum& m : before.minima)
    if (m.signature == target) entry = &m;
  if (!entry)
    throw std::invalid_argument("configuration is not in the cell of the target type");
  if (!before.ambiguous)
    throw std::invalid_argument("configuration is already unambiguous");
  if (!is_full_topology(entry->network.topology))
    throw std::domain_error("out of theorem scope: target type is not full");

  EscapeMove out;
  out.before = before;
  out.motions.reserve(config.size());
  for (int t = 0; t < config.size(); ++t)
    out.motions.push_back(direction_vector(entry->network, t));

  double r = 0.5 * shortest_edge(entry->network);
  for (int attempt = 0; attempt < 60; ++attempt) {
    Configuration moved;
    moved.dim = config.dim;
    for (int t = 0; t < config.size(); ++t)
      moved.points.push_back(add(config.points[t], scaled(out.motions[t], r)));
    if (!validate_configuration(moved)) {
      SmtResult after = steiner_minimal_trees(moved, opts);
      if (after.minima.size() == 1 && !after.fragile &&
          after.minima[0].signature == target) {
        out.r = r;
        out.moved = std::move(moved);
        out.margin = after.runner_up_length - after.min_length;
        out.after = std::move(after);
        return out;
      }
    }
    r *= 0.5;
  }
  throw SolverError("verification failed: no radius landed in the unambiguous cell");
}

// --- connecting a full planar cell through its ambiguous locus ---------------

inline CertifiedPath connect_cell(const Configuration& s0, const Configuration& s1,
                                  const TypeSignature& target,
                                  const PathParams& params = {}) {
  if (auto r = validate_configuration(s0)) throw std::invalid_argument(*r);
  if (auto r = validate_configuration(s1)) throw std::invalid_argument(*r);
  if (s0.size() != s1.size() || s0.dim != s1.dim)
    throw std::invalid_argument("endpoint configurations disagree in n or d");
  if (s0.dim != 2) throw std::domain_error("out of theorem scope: cells need d=2");
  const SmtOptions opts = detail::smt_options(params);

  auto resolve = [&](const Configuration& s) {
    SmtResult res = steiner_minimal_trees(s, opts);
    const SmtMinimum* entry = nullptr;
    for (const SmtMinimum& m : res.minima)
      if (m.signature == target) entry = &m;
    if (!entry) throw std::invalid_argument("endpoint is not in the cell of the target");
    if (!is_full_topology(entry->network.topology))
      throw std::domain_error("out of theorem scope: target type is not full");
    return res;
  };
  SmtResult r0 = resolve(s0);
  SmtResult r1 = resolve(s1);

  Configuration e0 = s0, e1 = s1;
  if (r0.ambiguous) e0 = escape_ambiguity(s0, target, opts).moved;
  if (r1.ambiguous) e1 = escape_ambiguity(s1, target, opts).moved;

  CertifiedPath middle = connect_unambiguous(e0, e1, target, params);
  if (r0.ambiguous || r1.ambiguous) {
    std::vector<Configuration> nodes;
    std::vector<detail::CertifyMode> modes;
    const int end_count = std::max(6, params.samples / 8);
    if (r0.ambiguous) {
      for (const Configuration& c : detail::straight_samples(s0, e0, end_count)) {
        nodes.push_back(c);
        modes.push_back(detail::CertifyMode::CellOnly);
      }
    }
    for (std::size_t i = 0; i < middle.samples.size(); ++i) {
      nodes.push_back(middle.samples[i]);
      modes.push_back(detail::CertifyMode::Unambiguous);
    }
    if (r1.ambiguous) {
      for (const Configuration& c : detail::straight_samples(e1, s1, end_count)) {
        nodes.push_back(c);
        modes.push_back(detail::CertifyMode::CellOnly);
      }
    }
    if (!middle.passed) {
      CertifiedPath out = detail::failed_path(s0, s1, target, middle.failure);
      out.params = params;
      return out;
    }
    CertifiedPath path =
        detail::certify_polyline(std::move(nodes), std::move(modes), target, params);
    path.params = params;
    return path;
  }
  middle.params = params;
  return middle;
}

// --- the four-point obstruction ----------------------------------------------

// Counterclockwise angle at the image of terminal C (index 2) from the edge
// toward terminal D (index 3) to the other edge incident on C.
inline double angle_alpha(const Network& net) {
  if (net.topology.n != 4 || net.config.dim != 2)
    throw std::invalid_argument("angle_alpha needs n=4, d=2");
  auto adj = adjacency(net.topology);
  const int c = 2, d = 3;
  if (adj[c].size() != 2)
    throw std::invalid_argument("terminal C does not have degree 2");
  int other = -1;
  bool adjacent_to_d = false;
  for (int wv : adj[c]) {
    if (wv == d)
      adjacent_to_d = true;
    else
      other = wv;
  }
  if (!adjacent_to_d || other < 0)
    throw std::invalid_argument("terminal C is not adjacent to terminal D");
  const double min_len = 1e-12 * std::max(diameter(net.config), 1e-300);
  const Vec to_d = sub(net.position(d), net.position(c));
  const Vec to_other = sub(net.position(other), net.position(c));
  if (norm(to_d) <= min_len || norm(to_other) <= min_len)
    throw std::domain_error("degenerate edges at terminal C");
  return ccw_angle(to_d, to_other);
}

struct Ambiguous4Demo {
  Configuration config;  // the searched non-strictly-convex four-point set
  SmtResult smt;         // exactly two tied types
  std::array<std::vector<int>, 2> orderings;
  std::array<Configuration, 2> ordered;
  TypeSignature shared_type;
  double alpha0 = 0.0;  // > pi for the first ordering
  double alpha1 = 0.0;  // < pi for the second
};

// Searches a mirror-symmetric family of non-strictly-convex quadrilaterals
// (isoceles outer triangle with an interior point on the axis) for a
// configuration whose minimum is achieved by an asymmetric tree; the mirror
// image then ties it exactly, giving a two-type ambiguity.  Two orderings of
// the same four points share one type signature with angles alpha on either
// side of pi, exhibiting why the ambiguous part of the cell is disconnected.
inline Ambiguous4Demo ambiguous4_demo(const SmtOptions& opts = {}) {
  const double h = std::sqrt(3.0);
  Ambiguous4Demo best;
  double best_margin = -1.0;
  for (int i = 0; i <= 80; ++i) {
    const double a = 0.30 + 0.005 * i;
    Configuration c = make_configuration(
        2, {Vec{0.0, a}, Vec{-1.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, h}});
    SmtResult res = steiner_minimal_trees(c, opts);
    if (res.minima.size() != 2 || res.fragile) continue;
    const double margin = res.runner_up_length / res.min_length - 1.0;
    if (margin > best_margin) {
      best_margin = margin;
      best.config = std::move(c);
      best.smt = std::move(res);
    }
  }
  if (best_margin < 0.0)
    throw SolverError("search failure: no two-type tie found in the demo family");

  // scan the orderings for a shared type whose alphas straddle pi
  struct Candidate {
    std::vector<int> perm;
    Configuration config;
    TypeSignature sig;
    double alpha;
  };
  std::vector<Candidate> candidates;
  std::vector<int> perm{0, 1, 2, 3};
  std::sort(perm.begin(), perm.end());
  do {
    Configuration pc;
    pc.dim = 2;
    for (int i = 0; i < 4; ++i) pc.points.push_back(best.config.points[perm[i]]);
    SmtResult res = steiner_minimal_trees(pc, opts);
    for (const SmtMinimum& m : res.minima) {
      try {
        const double alpha = angle_alpha(m.network);
        candidates.push_back({perm, pc, m.signature, alpha});
      } catch (const std::invalid_argument&) {
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (const Candidate& hi : candidates) {
    if (!(hi.alpha > M_PI + 1e-9)) continue;
    for (const Candidate& lo : candidates) {
      if (lo.sig != hi.sig || !(lo.alpha < M_PI - 1e-9)) continue;
      best.orderings = {hi.perm, lo.perm};
      best.ordered = {hi.config, lo.config};
      best.shared_type = hi.sig;
      best.alpha0 = hi.alpha;
      best.alpha1 = lo.alpha;
      return best;
    }
  }
  throw SolverError("search failure: no ordering pair with alphas straddling pi");
}

}  // namespace steinerlab
