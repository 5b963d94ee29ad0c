#include "homopart/gowers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "homopart/parallel.hpp"
#include "homopart/rng.hpp"

namespace homopart::gowers {

namespace {

constexpr double kTol = 1e-9;
constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) noexcept {
  if (a != 0 && b > kSat / a) return kSat;
  return a * b;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

VertexSet intersect(std::size_t part, const Bitset& a, const Bitset& b) {
  Bitset out = a;
  out &= b;
  return {part, std::move(out)};
}

}  // namespace

const char* to_string(Mode mode) noexcept { return mode == Mode::paper ? "paper" : "toy"; }

std::uint64_t phi(std::uint64_t m) noexcept {
  const double e = std::floor(std::exp(static_cast<double>(m) / 16.0));
  if (!(e < 1.8e19)) return kSat;
  return std::max<std::uint64_t>(static_cast<std::uint64_t>(e), 2);
}

long paper_layer_count(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
  return static_cast<long>(std::floor(0.25 * std::log(1.0 / eps) / std::log(7.0) - 3.0 + kTol));
}

double paper_threshold(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in (0,1]");
  const double x = 4.0 / std::pow(delta, 4.0);
  return std::ceil(x - kTol * x);
}

std::uint64_t GowersParams::growth(std::uint64_t m_prev) const noexcept {
  const std::uint64_t g = phi(m_prev);
  return growth_cap ? std::min(g, *growth_cap) : g;
}

GowersParams build_sequence(double eps, double delta, Mode mode, const SequenceOverrides& overrides) {
  if (!(delta > 0.0 && delta <= eps && eps < 1.0)) throw InvalidArgument("need 0 < delta <= eps < 1");
  GowersParams p;
  p.eps = eps;
  p.delta = delta;
  p.mode = mode;
  p.s0 = paper_threshold(delta);
  const long paper_t = paper_layer_count(eps);
  if (mode == Mode::paper) {
    if (overrides.t || overrides.growth_cap || overrides.s0)
      throw InvalidArgument("t, growth and s0 overrides are only available in toy mode");
    if (paper_t < 1)
      throw Infeasible("eps = " + fmt(eps) + " gives t = " + std::to_string(paper_t) +
                       " < 1; paper mode needs eps <= 7^-16, use toy mode");
    p.t = static_cast<std::size_t>(paper_t);
  } else {
    if (!overrides.t || !overrides.growth_cap) throw InvalidArgument("toy mode requires explicit t and growth cap");
    if (*overrides.t < 1) throw InvalidArgument("t must be at least 1");
    if (*overrides.growth_cap < 2) throw InvalidArgument("growth cap must be at least 2");
    p.t = *overrides.t;
    p.growth_cap = overrides.growth_cap;
    p.relaxations.push_back("t = " + std::to_string(p.t) + " (formula gives " + std::to_string(paper_t) + ")");
    p.relaxations.push_back("growth capped at " + std::to_string(*p.growth_cap) + " (phi uncapped)");
    if (overrides.s0) {
      if (!(*overrides.s0 >= 1.0)) throw InvalidArgument("s0 must be at least 1");
      p.relaxations.push_back("s0 = " + fmt(*overrides.s0) + " (formula gives " + fmt(p.s0) + ")");
      p.s0 = *overrides.s0;
    }
    p.relaxations.push_back("orthogonal families may violate M <= e^(m/16)");
    p.relaxations.push_back("n treated as free; n0(delta) unchecked");
  }
  p.m.push_back(1);
  const std::uint64_t s0 = p.s0 >= 1.8e19 ? kSat : static_cast<std::uint64_t>(p.s0);
  for (std::size_t r = 1; r <= p.t; ++r) {
    const std::uint64_t prev = p.m.back();
    const std::uint64_t g = p.growth(prev);
    const std::uint64_t next =
        static_cast<double>(prev) < p.s0 && static_cast<double>(g) >= p.s0 ? mul_sat(prev, s0) : mul_sat(prev, g);
    if (next == kSat) p.saturated = true;
    p.m.push_back(next);
  }
  return p;
}

GowersParams toy_params(double eps, double delta, std::size_t t, std::uint64_t seed) {
  SequenceOverrides o;
  o.t = t;
  o.growth_cap = 2;
  o.s0 = 2.0;
  GowersParams p = build_sequence(eps, delta, Mode::toy, o);
  p.seed = seed;
  return p;
}

FamilyCheck check_family(std::size_t m, std::size_t M, const std::vector<Bitset>& x) {
  if (x.size() != m) throw InvalidArgument("family must have m partitions");
  FamilyCheck c;
  const double md = static_cast<double>(m), Md = static_cast<double>(M);
  c.within_hypothesis = Md <= std::max(std::exp(md / 16.0), 2.0);
  const double lg = std::log(4.0 * md * md);
  c.item1_applicable = Md >= lg * lg * lg;
  const double band = std::pow(Md, 2.0 / 3.0);
  std::vector<double> sizes(m);
  for (std::size_t i = 0; i < m; ++i) {
    sizes[i] = static_cast<double>(x[i].count());
    c.max_size_deviation = std::max(c.max_size_deviation, std::abs(sizes[i] - Md / 2.0));
  }
  std::vector<double> worst(m, 0.0);
  parallel_for(0, m, [&](std::size_t i) {
    double w = 0.0;
    for (std::size_t k = i + 1; k < m; ++k) {
      const double xx = static_cast<double>(x[i].count_and(x[k]));
      const double xy = sizes[i] - xx, yx = sizes[k] - xx, yy = Md - sizes[i] - sizes[k] + xx;
      for (double v : {xx, xy, yx, yy}) w = std::max(w, std::abs(v - Md / 4.0));
    }
    worst[i] = w;
  });
  for (double w : worst) c.max_intersection_deviation = std::max(c.max_intersection_deviation, w);
  if (c.item1_applicable)
    c.item1_pass = c.max_size_deviation <= band + kTol && c.max_intersection_deviation <= band + kTol;

  // Column j records which X_i contain j; z(j, j') = m - |col_j xor col_j'|.
  std::vector<Bitset> cols(M, Bitset(m));
  for (std::size_t i = 0; i < m; ++i) x[i].for_each_set([&](std::size_t j) { cols[j].set(i); });
  std::vector<std::size_t> max_z(M, 0);
  std::vector<std::uint64_t> bad(M, 0);
  parallel_for(0, M, [&](std::size_t j) {
    std::size_t mz = 0;
    std::uint64_t b = 0;
    for (std::size_t k = j + 1; k < M; ++k) {
      const std::size_t z = m - cols[j].count_xor(cols[k]);
      mz = std::max(mz, z);
      if (4 * z > 3 * m) ++b;
    }
    max_z[j] = mz;
    bad[j] = b;
  });
  for (std::size_t j = 0; j < M; ++j) {
    c.max_agreement = std::max(c.max_agreement, max_z[j]);
    c.agreement_violations += bad[j];
  }
  c.event_pass = c.agreement_violations == 0;
  return c;
}

GenerationError::GenerationError(std::size_t m_, std::size_t M_, std::size_t attempts_, FamilyCheck last_)
    : Infeasible("no orthogonal family for m = " + std::to_string(m_) + ", M = " + std::to_string(M_) + " after " +
                 std::to_string(attempts_) + " attempts; last attempt: item 1 " +
                 (last_.item1_applicable ? (last_.item1_pass ? "pass" : "fail") : "not applicable") +
                 " (size deviation " + fmt(last_.max_size_deviation) + ", intersection deviation " +
                 fmt(last_.max_intersection_deviation) + "), event A " + (last_.event_pass ? "pass" : "fail") + " (" +
                 std::to_string(last_.agreement_violations) + " pairs above 3m/4, max agreement " +
                 std::to_string(last_.max_agreement) + ")"),
      m(m_),
      M(M_),
      attempts(attempts_),
      last(last_) {}

OrthogonalFamily orthogonal_family(std::size_t m, std::size_t M, std::uint64_t seed, std::size_t max_attempts) {
  if (M < 2) throw InvalidArgument("M must be at least 2");
  if (m < 1) throw InvalidArgument("m must be at least 1");
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be at least 1");
  const rng::Stream root(rng::derive(seed, "orthogonal-family"));
  const std::size_t words = (M + 63) / 64;
  FamilyCheck last;
  for (std::size_t a = 0; a < max_attempts; ++a) {
    const rng::Stream s = root.child(a);
    std::vector<Bitset> x(m, Bitset(M));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < M; ++j)
        if ((s.at(i * words + j / 64) >> (j % 64)) & 1) x[i].set(j);
    last = check_family(m, M, x);
    if (last.pass()) return OrthogonalFamily{m, M, std::move(x), last, a + 1};
  }
  throw GenerationError(m, M, max_attempts, last);
}

MarginReport item2_margin(const OrthogonalFamily& family, const std::vector<double>& lambda, double eps, double zeta,
                          double eta) {
  if (lambda.size() != family.M) throw InvalidArgument("weight vector must have length M");
  MarginReport rep;
  double sum = 0.0, mx = 0.0;
  bool negative = false;
  for (double l : lambda) {
    if (l < 0.0) negative = true;
    sum += l;
    mx = std::max(mx, l);
  }
  if (negative) rep.violations.push_back("negative weight");
  if (std::abs(sum - 1.0) > kTol) rep.violations.push_back("weights sum to " + fmt(sum));
  if (mx > 1.0 - zeta + kTol) rep.violations.push_back("max weight " + fmt(mx) + " exceeds 1 - zeta");
  if (!(zeta <= 0.5)) rep.violations.push_back("zeta exceeds 1/2");
  if (!(eta > 0.0 && eps > 0.0)) rep.violations.push_back("eta and eps must be positive");
  if ((1.0 - eta) * (1.0 - 4.0 * eps) < 1.0 - zeta + zeta * zeta - kTol)
    rep.violations.push_back("(1 - eta)(1 - 4 eps) < 1 - zeta + zeta^2");
  rep.hypothesis = rep.violations.empty();
  for (std::size_t i = 0; i < family.m; ++i) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < family.M; ++j) (family.in_x(i, j) ? sx : sy) += lambda[j];
    if (std::min(sx, sy) > eps) ++rep.count;
  }
  rep.bound = eta * static_cast<double>(family.m);
  rep.guaranteed = rep.hypothesis && family.check.event_pass;
  rep.bound_met = static_cast<double>(rep.count) >= rep.bound - kTol;
  return rep;
}

PartPartition IntervalLayering::partition(std::size_t part, std::size_t r) const {
  return PartPartition::intervals(part, n, static_cast<std::size_t>(m.at(r)));
}

bool IntervalLayering::refines(std::size_t r) const {
  if (r == 0) return true;
  std::vector<std::size_t> parent(m.at(r), SIZE_MAX);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t& p = parent[interval(r, v)];
    const std::size_t coarse = interval(r - 1, v);
    if (p == SIZE_MAX) p = coarse;
    else if (p != coarse) return false;
  }
  return true;
}

Bitset GowersInstance::layer(std::size_t r) const {
  Bitset out(n());
  for (std::size_t c = 0; c < n(); ++c)
    if (layer_of_c[c] == r) out.set(c);
  return out;
}

PartPartition GowersInstance::c_layers() const {
  return PartPartition(2, std::vector<PartPartition::Label>(layer_of_c.begin(), layer_of_c.end()));
}

EdgeBoxes GowersInstance::boxes(std::size_t r, std::size_t i, std::size_t j) const {
  const OrthogonalFamily& f = families.at(r - 1);
  const std::size_t coarse = layering.length(r - 1), fine = layering.length(r);
  EdgeBoxes e{Bitset(n()), Bitset(n()), Bitset(n()), Bitset(n())};
  for (std::size_t k = 0; k < f.M; ++k) {
    for (std::size_t v = 0; v < fine; ++v) {
      const std::size_t a = i * coarse + k * fine + v, b = j * coarse + k * fine + v;
      (f.in_x(j, k) ? e.a1 : e.a2).set(a);
      (f.in_x(i, k) ? e.b1 : e.b2).set(b);
    }
  }
  return e;
}

GowersInstance build_weighted(GowersParams params, std::size_t n, std::size_t max_attempts) {
  if (params.saturated) throw Infeasible("m_t overflows 64 bits; the construction cannot be materialized");
  if (n == 0 || n % params.m.back() != 0 || n % params.t != 0)
    throw InvalidArgument("n = " + std::to_string(n) + " must be divisible by m_t = " +
                          std::to_string(params.m.back()) + " and by t = " + std::to_string(params.t));
  params.n = n;
  GowersInstance g;
  g.params = params;
  g.layering = IntervalLayering{n, params.m};
  const std::size_t t = params.t;
  for (std::size_t r = 1; r <= t; ++r) {
    const std::size_t m = params.m[r - 1], M = params.ratio(r);
    g.families.push_back(
        orthogonal_family(m, M, rng::derive(params.seed, "family/level-" + std::to_string(r)), max_attempts));
    const OrthogonalFamily& f = g.families.back();
    const std::size_t coarse = g.layering.length(r - 1), fine = g.layering.length(r);
    BipartiteGraph gr(n, n);
    std::vector<Bitset> rows(n, Bitset(n));
    parallel_for(0, n, [&](std::size_t a) {
      const std::size_t i = a / coarse, ka = (a % coarse) / fine;
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t j = b / coarse, kb = (b % coarse) / fine;
        if (f.in_x(j, ka) == f.in_x(i, kb)) rows[a].set(b);
      }
    });
    for (std::size_t a = 0; a < n; ++a) gr.set_row(a, std::move(rows[a]));
    g.graphs.push_back(std::move(gr));
  }
  g.layer_of_c.resize(n);
  for (std::size_t c = 0; c < n; ++c) g.layer_of_c[c] = static_cast<std::uint32_t>(c / (n / t) + 1);
  g.weighted = WeightedTripartite(n, n, n);
  parallel_for(0, n, [&](std::size_t a) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t r = g.layer_of_c[c];
      const double w = std::ldexp(1.0, -static_cast<int>(r));
      const Bitset& row = g.graphs[r - 1].row(a);
      row.for_each_set([&](std::size_t b) { g.weighted.set_weight(a, b, c, w); });
    }
  });
  return g;
}

const char* to_string(CertificateKind kind) noexcept {
  switch (kind) {
    case CertificateKind::quasirandom: return "quasirandom";
    case CertificateKind::constant_boxes: return "constant-boxes";
    case CertificateKind::layer_constant: return "layer-constant";
  }
  return "?";
}

namespace {

std::uint64_t inconsistent_pairs(const WeightedBipartite& l, const PartPartition& left, const PartPartition& right) {
  const std::size_t lc = left.regular_count() + 1, rc = right.regular_count() + 1;
  std::vector<double> first(lc * rc, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> bad(lc * rc, 0);
  for (std::size_t x = 0; x < l.left_size(); ++x)
    for (std::size_t y = 0; y < l.right_size(); ++y) {
      const std::size_t cell = left.label(x) * rc + right.label(y);
      const double w = l.weight(x, y);
      if (std::isnan(first[cell])) first[cell] = w;
      else if (first[cell] != w) bad[cell] = 1;
    }
  return static_cast<std::uint64_t>(std::count(bad.begin(), bad.end(), 1));
}

LinkCertificate make_certificate(const GowersInstance& g, Pin v, const CertificateOptions& options,
                                 const std::optional<RegularityWitness>* shared) {
  const std::size_t n = g.n(), t = g.t();
  if (v.part > 2 || v.vertex >= n) throw InvalidArgument("vertex out of range");
  LinkCertificate cert;
  cert.vertex = v;
  const WeightedBipartite l = g.weighted.link(v);
  if (v.part == 2) {
    const std::size_t r = g.layer_of_c[v.vertex];
    cert.level = r;
    if (g.params.quasirandom_level(r)) {
      cert.kind = CertificateKind::quasirandom;
      cert.left = PartPartition::trivial(0, n);
      cert.right = PartPartition::trivial(1, n);
      cert.size_bound = 1;
      cert.size_ok = true;
      if (shared && shared->has_value()) {
        cert.witness = **shared;
      } else {
        WitnessOptions wo;
        wo.mode = SearchMode::sampled;
        wo.budget = options.budget;
        wo.seed = rng::derive(options.seed, "link/layer-" + std::to_string(r));
        cert.witness = bipartite_regularity_witness(l, Bitset(n, true), Bitset(n, true),
                                                    options.delta.value_or(g.params.delta), wo);
      }
      cert.verified = !cert.witness->found;
      return cert;
    }
    cert.kind = CertificateKind::constant_boxes;
    cert.left = g.layering.partition(0, r);
    cert.right = g.layering.partition(1, r);
    const double bound = g.params.s0 * g.params.s0;
    cert.size_bound = bound >= 1.8e19 ? SIZE_MAX : static_cast<std::size_t>(bound);
    cert.size_ok = static_cast<double>(g.params.m[r]) <= bound;
  } else {
    cert.kind = CertificateKind::layer_constant;
    std::vector<Bitset> neighborhoods;
    for (std::size_t r = 1; r <= t; ++r) {
      const BipartiteGraph& gr = g.graphs[r - 1];
      if (v.part == 0) {
        neighborhoods.push_back(gr.row(v.vertex));
      } else {
        Bitset col(n);
        for (std::size_t a = 0; a < n; ++a)
          if (gr.has_edge(a, v.vertex)) col.set(a);
        neighborhoods.push_back(std::move(col));
      }
    }
    cert.left = common_refinement(v.part == 0 ? 1 : 0, n, neighborhoods);
    cert.right = g.c_layers();
    cert.size_bound = t < 63 ? std::size_t{1} << t : SIZE_MAX;
    cert.size_ok = cert.left.block_count() <= cert.size_bound;
  }
  cert.exact = true;
  cert.violating_pairs = inconsistent_pairs(l, cert.left, cert.right);
  cert.verified = cert.size_ok && cert.violating_pairs == 0;
  return cert;
}

}  // namespace

LinkCertificate link_certificate(const GowersInstance& g, Pin v, const CertificateOptions& options) {
  return make_certificate(g, v, options, nullptr);
}

std::vector<LinkCertificate> all_link_certificates(const GowersInstance& g, const CertificateOptions& options) {
  const std::size_t n = g.n();
  // Links of C vertices depend only on their layer.
  std::vector<std::optional<RegularityWitness>> shared(g.t() + 1);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t r = g.layer_of_c[c];
    if (g.params.quasirandom_level(r) && !shared[r])
      shared[r] = make_certificate(g, {2, c}, options, nullptr).witness;
  }
  std::vector<LinkCertificate> out(3 * n);
  parallel_for(0, 3 * n, [&](std::size_t idx) {
    const Pin v{idx / n, idx % n};
    const std::optional<RegularityWitness>* s = v.part == 2 ? &shared[g.layer_of_c[v.vertex]] : nullptr;
    out[idx] = make_certificate(g, v, options, s);
  });
  return out;
}

QuasirandomTolerances QuasirandomTolerances::paper(double delta) {
  const double d3 = delta * delta * delta, d4 = d3 * delta;
  return {"paper", d4, d4 / 8.0, d3 / 4.0, d4 / 4.0, d4 / 2.0, d4 / 2.0};
}

QuasirandomTolerances QuasirandomTolerances::toy(double delta, std::size_t M) {
  const double mu = std::pow(static_cast<double>(M), -1.0 / 3.0);
  const double d4 = std::pow(delta, 4.0);
  const double codegree = (0.25 + mu) - (0.5 - mu) * (0.5 - mu);
  return {"toy (M^-1/3 = " + fmt(mu) + ")", 2.0 * mu, d4 / 8.0, codegree, d4 / 4.0, mu, mu};
}

QuasirandomReport quasirandomness_audit(const BipartiteGraph& g, double delta, const QuasirandomTolerances& tol,
                                        const PartPartition* coarse_a, const PartPartition* coarse_b) {
  const std::size_t na = g.left_size(), nb = g.right_size();
  if (na == 0 || nb == 0) throw InvalidArgument("empty bipartite graph");
  QuasirandomReport rep;
  rep.tolerances = tol.label;
  const double nad = static_cast<double>(na), nbd = static_cast<double>(nb);
  rep.density = static_cast<double>(g.edge_count()) / (nad * nbd);
  const BipartiteGraph tr = g.transposed();
  for (std::size_t x = 0; x < nb; ++x) {
    const double dev = std::abs(static_cast<double>(tr.row(x).count()) - rep.density * nad);
    if (dev > rep.worst_degree_deviation) {
      rep.worst_degree_deviation = dev;
      rep.worst_degree_vertex = x;
    }
    if (dev > tol.degree_band * nad + kTol) ++rep.degree_violators;
  }
  rep.condition1 = static_cast<double>(rep.degree_violators) <= tol.degree_exceptions * nbd + kTol;

  const double d2n = rep.density * rep.density * nad;
  if (nb <= kExactBlockCap) {
    // Gray-code walk over all B' keeping sum_{x,y in B'} |N(x) ∩ N(y)| as an integer.
    rep.exact_condition2 = true;
    std::vector<std::vector<std::int64_t>> cod(nb, std::vector<std::int64_t>(nb));
    for (std::size_t x = 0; x < nb; ++x)
      for (std::size_t y = 0; y < nb; ++y) cod[x][y] = static_cast<std::int64_t>(tr.row(x).count_and(tr.row(y)));
    const std::size_t min_size = static_cast<std::size_t>(std::ceil(delta * nbd - kTol));
    std::vector<std::int64_t> acc(nb, 0);
    std::vector<bool> in(nb, false);
    std::int64_t total = 0;
    std::size_t size = 0;
    rep.condition2 = true;
    rep.worst_ratio = -std::numeric_limits<double>::infinity();
    for (std::uint64_t step = 1; step < (std::uint64_t{1} << nb); ++step) {
      const std::size_t z = static_cast<std::size_t>(std::countr_zero(step));
      if (!in[z]) {
        total += 2 * acc[z] + cod[z][z];
        for (std::size_t x = 0; x < nb; ++x) acc[x] += cod[x][z];
        in[z] = true;
        ++size;
      } else {
        for (std::size_t x = 0; x < nb; ++x) acc[x] -= cod[x][z];
        total -= 2 * acc[z] + cod[z][z];
        in[z] = false;
        --size;
      }
      if (size == 0 || size < min_size) continue;
      const double s2 = static_cast<double>(size) * static_cast<double>(size);
      const double ratio = (static_cast<double>(total) - s2 * d2n) / (nad * s2);
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    }
    const double limit = delta * delta * delta / 2.0;
    rep.condition2 = !(rep.worst_ratio >= limit);
  } else {
    std::vector<double> worst(nb, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> partner(nb, 0);
    parallel_for(0, nb, [&](std::size_t x) {
      for (std::size_t y = x + 1; y < nb; ++y) {
        if (coarse_b && coarse_b->label(x) == coarse_b->label(y)) continue;
        const double f = static_cast<double>(tr.row(x).count_and(tr.row(y))) - d2n;
        if (f > worst[x]) {
          worst[x] = f;
          partner[x] = y;
        }
      }
    });
    rep.worst_codegree = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < nb; ++x)
      if (worst[x] / nad > rep.worst_codegree) {
        rep.worst_codegree = worst[x] / nad;
        rep.worst_pair = {x, partner[x]};
      }
    rep.condition2 = rep.worst_codegree <= tol.codegree_band + kTol;
    if (coarse_b) {
      std::size_t largest = 0;
      for (auto l : coarse_b->nonempty_labels()) largest = std::max(largest, coarse_b->block_size(l));
      rep.same_interval = static_cast<double>(largest) <= tol.same_interval * nbd + kTol;
    }
  }

  if (coarse_a && coarse_b) {
    rep.interval_bands_checked = true;
    const auto labels = coarse_a->nonempty_labels();
    std::vector<Bitset> blocks;
    for (auto l : labels) blocks.push_back(coarse_a->members(l));
    std::vector<double> deg_worst(nb, 0.0), cod_worst(nb, 0.0);
    parallel_for(0, nb, [&](std::size_t x) {
      double dw = 0.0, cw = 0.0;
      for (const Bitset& ai : blocks) {
        const double size = static_cast<double>(ai.count());
        Bitset nx = tr.row(x);
        nx &= ai;
        dw = std::max(dw, std::abs(static_cast<double>(nx.count()) / size - 0.5));
        for (std::size_t y = x + 1; y < nb; ++y) {
          if (coarse_b->label(x) == coarse_b->label(y)) continue;
          cw = std::max(cw, std::abs(static_cast<double>(nx.count_and(tr.row(y))) / size - 0.25));
        }
      }
      deg_worst[x] = dw;
      cod_worst[x] = cw;
    });
    for (std::size_t x = 0; x < nb; ++x) {
      rep.worst_interval_degree = std::max(rep.worst_interval_degree, deg_worst[x]);
      rep.worst_interval_codegree = std::max(rep.worst_interval_codegree, cod_worst[x]);
    }
    rep.interval_bands = rep.worst_interval_degree <= tol.interval_degree_band + kTol &&
                         rep.worst_interval_codegree <= tol.interval_codegree_band + kTol;
  }
  return rep;
}

QuasirandomReport quasirandomness_audit(const GowersInstance& g, std::size_t r, const QuasirandomTolerances& tol) {
  if (r < 1 || r > g.t()) throw InvalidArgument("level out of range");
  const PartPartition a = g.layering.partition(0, r - 1), b = g.layering.partition(1, r - 1);
  return quasirandomness_audit(g.graphs[r - 1], g.params.delta, tol, &a, &b);
}

CascadeOptions CascadeOptions::paper(double eps) { return {eps, std::pow(eps, 0.25), 7.0, 16}; }

CascadeOptions CascadeOptions::toy(double eps, std::size_t t) {
  return {eps, 1.0 / (72.0 * std::pow(7.0, static_cast<double>(t))), 7.0, 16};
}

std::size_t CascadeReport::witness_count() const noexcept {
  std::size_t c = 0;
  for (const auto& l : levels) c += l.witnesses.size();
  return c;
}

bool CascadeReport::all_verified() const noexcept {
  for (const auto& l : levels)
    for (const auto& w : l.witnesses)
      if (!w.verified) return false;
  return true;
}

double CascadeReport::max_gap() const noexcept {
  double g = 0.0;
  for (const auto& l : levels)
    for (const auto& w : l.witnesses) g = std::max(g, std::abs(w.gap));
  return g;
}

bool reverify(const WeightedTripartite& h, const CascadeWitness& w, double eps) {
  for (std::size_t p = 0; p < 3; ++p) {
    const VertexSet* sets[] = {&w.first[p], &w.second[p]};
    for (const VertexSet* s : sets) {
      if (s->part != p || w.blocks[p].part != p) return false;
      Bitset outside = s->members;
      outside &= ~w.blocks[p].members;
      if (outside.any()) return false;
      if (s->size() < min_subset_size(eps, w.blocks[p].size())) return false;
    }
  }
  const double d1 = density(h, w.first), d2 = density(h, w.second), db = density(h, w.blocks);
  return d1 == w.first_density && d2 == w.second_density && db == w.block_density && d1 - d2 == w.gap &&
         std::max(std::abs(d1 - db), std::abs(d2 - db)) == w.deviation;
}

CascadeReport refinement_cascade(const GowersInstance& g, const LayeredPartition& candidate,
                                 const CascadeOptions& options) {
  if (candidate.k() != 3) throw InvalidArgument("candidate must partition the three parts");
  const std::size_t n = g.n(), t = g.t();
  for (std::size_t p = 0; p < 3; ++p)
    if (candidate[p].universe() != n) throw InvalidArgument("candidate does not match the construction");
  const double eps = options.eps;
  auto beta = [&](std::size_t r) { return options.beta_base * std::pow(options.beta_growth, static_cast<double>(r)); };
  const PartPartition& cp = candidate[0];
  const PartPartition& cq = candidate[1];
  const PartPartition& cr = candidate[2];
  const auto c_labels = cr.nonempty_labels();

  CascadeReport report;
  for (std::size_t r = 1; r <= t; ++r) {
    CascadeLevel level;
    level.level = r;
    level.beta = beta(r);
    level.valid = level.beta < 0.5 && beta(r - 1) < 0.5;
    if (!level.valid) {
      report.levels.push_back(std::move(level));
      continue;
    }
    const PartPartition ar = g.layering.partition(0, r), br = g.layering.partition(1, r);
    level.a = beta_refines(cp, ar, level.beta);
    level.b = beta_refines(cq, br, level.beta);
    if (level.a->refines && level.b->refines) {
      report.levels.push_back(std::move(level));
      continue;
    }
    const RefinementReport pa = beta_refines(cp, g.layering.partition(0, r - 1), beta(r - 1));
    const RefinementReport pb = beta_refines(cq, g.layering.partition(1, r - 1), beta(r - 1));
    const Bitset layer = g.layer(r);

    // Blocks matched at level r-1 but with no level-r child, per side.
    auto failing = [](const RefinementReport& prev, const RefinementReport& cur) {
      std::vector<std::pair<PartPartition::Label, std::size_t>> out;
      for (std::size_t i = 0; i < prev.fine_labels.size(); ++i)
        if (prev.parent[i] && !cur.parent[i]) out.push_back({prev.fine_labels[i], *prev.parent[i] - 1});
      return out;
    };
    auto matched = [](const RefinementReport& prev) {
      std::vector<std::pair<PartPartition::Label, std::size_t>> out;
      for (std::size_t i = 0; i < prev.fine_labels.size(); ++i)
        if (prev.parent[i]) out.push_back({prev.fine_labels[i], *prev.parent[i] - 1});
      return out;
    };

    auto extract = [&](char side) {
      const auto split = side == 'A' ? failing(pa, *level.a) : failing(pb, *level.b);
      const auto other = side == 'A' ? matched(pb) : matched(pa);
      for (const auto& [sl, sparent] : split) {
        for (const auto& [ol, oparent] : other) {
          if (level.witnesses.size() >= options.max_witnesses) return;
          const PartPartition::Label pl = side == 'A' ? sl : ol, ql = side == 'A' ? ol : sl;
          const std::size_t i = side == 'A' ? sparent : oparent, h = side == 'A' ? oparent : sparent;
          const VertexSet P = cp.block(pl), Q = cq.block(ql);
          const EdgeBoxes e = g.boxes(r, i, h);
          VertexSet s1 = intersect(0, P.members, e.a1), s2 = intersect(0, P.members, e.a2);
          VertexSet t1 = intersect(1, Q.members, e.b1), t2 = intersect(1, Q.members, e.b2);
          const std::size_t pmin = min_subset_size(eps, P.size()), qmin = min_subset_size(eps, Q.size());
          std::array<VertexSet, 2> first, second;  // (A, B) sets; first spans a complete box
          if (side == 'A') {
            if (s1.size() < pmin || s2.size() < pmin) continue;
            if (t1.size() >= qmin) first = {s1, t1}, second = {s2, t1};
            else if (t2.size() >= qmin) first = {s2, t2}, second = {s1, t2};
            else continue;
          } else {
            if (t1.size() < qmin || t2.size() < qmin) continue;
            if (s1.size() >= pmin) first = {s1, t1}, second = {s1, t2};
            else if (s2.size() >= pmin) first = {s2, t2}, second = {s2, t1};
            else continue;
          }
          for (auto cl : c_labels) {
            if (level.witnesses.size() >= options.max_witnesses) return;
            const VertexSet R = cr.block(cl);
            VertexSet z = intersect(2, R.members, layer);
            if (z.size() == 0 || z.size() < min_subset_size(eps, R.size())) continue;
            CascadeWitness w;
            w.level = r;
            w.side = side;
            w.labels = {pl, ql, cl};
            w.blocks = {P, Q, R};
            w.first = {first[0], first[1], z};
            w.second = {second[0], second[1], z};
            w.first_density = density(g.weighted, w.first);
            w.second_density = density(g.weighted, w.second);
            w.block_density = density(g.weighted, w.blocks);
            w.gap = w.first_density - w.second_density;
            w.deviation = std::max(std::abs(w.first_density - w.block_density),
                                   std::abs(w.second_density - w.block_density));
            w.verified = reverify(g.weighted, w, eps);
            level.witnesses.push_back(std::move(w));
          }
        }
      }
    };
    if (!level.a->refines) extract('A');
    if (!level.b->refines) extract('B');
    report.levels.push_back(std::move(level));
  }
  return report;
}

KPartiteHypergraph sample_unweighted(const WeightedTripartite& h, std::uint64_t seed) {
  const auto sizes = h.part_sizes();
  KPartiteHypergraph out({sizes[0], sizes[1], sizes[2]});
  const rng::Stream coins(rng::derive(seed, "sample-unweighted"));
  parallel_for(0, sizes[0], [&](std::size_t a) {
    std::array<std::size_t, 3> e{a, 0, 0};
    for (std::size_t b = 0; b < sizes[1]; ++b)
      for (std::size_t c = 0; c < sizes[2]; ++c) {
        const double w = h.weight(a, b, c);
        const std::uint64_t cell = (a * sizes[1] + b) * sizes[2] + c;
        if (w > 0.0 && coins.unit_at(cell) < w) {
          e[1] = b;
          e[2] = c;
          out.add_edge(e);
        }
      }
  });
  return out;
}

namespace {

BoxCheck check_box(const WeightedTripartite& h, const KPartiteHypergraph& s, const std::array<VertexSet, 3>& box) {
  BoxCheck bc;
  for (std::size_t p = 0; p < 3; ++p) bc.sizes[p] = box[p].size();
  const double cells = static_cast<double>(bc.sizes[0]) * static_cast<double>(bc.sizes[1]) * static_cast<double>(bc.sizes[2]);
  bc.weighted = density(h, box);
  bc.sampled = density(s, box);
  double var = 0.0;
  const auto cs = box[2].members.indices();
  box[0].members.for_each_set([&](std::size_t a) {
    box[1].members.for_each_set([&](std::size_t b) {
      for (std::size_t c : cs) {
        const double w = h.weight(a, b, c);
        var += w * (1.0 - w);
      }
    });
  });
  bc.sigma = std::sqrt(var) / cells;
  bc.band = 1.5 / std::sqrt(cells);
  bc.within = std::abs(bc.sampled - bc.weighted) <= bc.band;
  return bc;
}

}  // namespace

ConcentrationReport concentration_report(const WeightedTripartite& h, const KPartiteHypergraph& sample,
                                         std::size_t boxes, std::uint64_t seed) {
  const auto sizes = h.part_sizes();
  if (sample.k() != 3 || sample.part_size(0) != sizes[0] || sample.part_size(1) != sizes[1] ||
      sample.part_size(2) != sizes[2])
    throw InvalidArgument("sample does not match the weighted graph");
  ConcentrationReport rep;
  rep.full = check_box(h, sample,
                       {VertexSet::full(0, sizes[0]), VertexSet::full(1, sizes[1]), VertexSet::full(2, sizes[2])});
  rep.boxes.resize(boxes);
  const rng::Stream root(rng::derive(seed, "concentration-boxes"));
  parallel_for(0, boxes, [&](std::size_t k) {
    const rng::Stream s = root.child(k);
    std::array<VertexSet, 3> box;
    std::uint64_t offset = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      box[p] = VertexSet::empty(p, sizes[p]);
      for (std::size_t v = 0; v < sizes[p]; ++v)
        if (s.unit_at(offset + v) < 0.5) box[p].members.set(v);
      if (box[p].members.none()) box[p].members.set(s.below_at(offset + sizes[p], sizes[p]));
      offset += sizes[p] + 1;
    }
    rep.boxes[k] = check_box(h, sample, box);
  });
  for (const auto& b : rep.boxes)
    if (b.within) ++rep.within;
  return rep;
}

}  // namespace homopart::gowers
