#include "homopart/homogenizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "homopart/auditor.hpp"
#include "homopart/error.hpp"
#include "homopart/parallel.hpp"
#include "homopart/rng.hpp"

namespace homopart {

namespace {

using Label = PartPartition::Label;
constexpr double kTol = 1e-9;
constexpr std::size_t kExactParticipation = 512;

std::size_t floor_tol(double x) { return x <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(x + kTol)); }
std::size_t ceil_tol(double x) { return x <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(x - kTol)); }

void check_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0,1)");
}

}  // namespace

const char* to_string(Mode mode) noexcept { return mode == Mode::paper ? "paper" : "practical"; }

ToleranceParams ToleranceParams::paper(double eps, std::size_t k, std::size_t r) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  if (k < 2) throw InvalidArgument("k must be at least 2");
  ToleranceParams p;
  p.eps = eps;
  p.k = k;
  p.r = r;
  p.mode = Mode::paper;
  p.gamma = eps / (6.0 * static_cast<double>(k));
  p.link_eps = p.gamma_prime();
  return p;
}

ToleranceParams ToleranceParams::practical(double eps, std::size_t k, std::size_t r, std::optional<double> gamma,
                                           std::optional<double> link_eps) {
  ToleranceParams p = paper(eps, k, r);
  p.mode = Mode::practical;
  if (gamma) {
    check_open_unit(*gamma, "gamma");
    p.gamma = *gamma;
  }
  if (link_eps) {
    if (!(*link_eps >= 0.0 && *link_eps < 0.5)) throw InvalidArgument("link eps must lie in [0, 1/2)");
    p.link_eps = *link_eps;
  }
  return p;
}

std::size_t similarity_block_count(double gamma, std::size_t r) {
  check_open_unit(gamma, "gamma");
  return ceil_tol((1.0 - gamma) * 3.0 * static_cast<double>(r) / gamma);
}

double similarity_input_eps(double gamma) noexcept { return gamma * gamma * gamma / 48.0; }

double paper_anchor_count(double eps, std::size_t k, std::size_t r) {
  const double gamma = eps / (6.0 * static_cast<double>(k));
  const double q = static_cast<double>(similarity_block_count(gamma, r));
  return std::pow(q / gamma, static_cast<double>(k - 1)) * std::log(2.0 / eps);
}

SimilarityResult similarity_partition(const BipartiteGraph& g, const PartPartition& left, const PartPartition& right,
                                      double gamma, std::size_t r, std::uint64_t seed) {
  check_open_unit(gamma, "gamma");
  const std::size_t nx = g.left_size(), ny = g.right_size();
  if (left.universe() != nx || right.universe() != ny)
    throw InvalidArgument("given partition does not match the bipartite graph");
  if (r == 0 || left.block_count() > r)
    throw InvalidArgument("given left partition has " + std::to_string(left.block_count()) + " blocks, more than r = " +
                          std::to_string(r));
  SimilarityResult res;
  res.paper_q = similarity_block_count(gamma, r);
  res.m = floor_tol(gamma * static_cast<double>(nx) / (3.0 * static_cast<double>(r)));
  if (res.m == 0)
    throw Infeasible("block size gamma n / 3r = " + std::to_string(gamma * static_cast<double>(nx) / (3.0 * r)) +
                     " is below 1; increase gamma or n");
  res.target_q = ceil_tol((1.0 - gamma) * static_cast<double>(nx) / static_cast<double>(res.m));

  const HomogeneityReport audit = homogeneity_audit(g, left, right, similarity_input_eps(gamma));
  res.input_homogeneous = audit.pass;
  res.input_mass = audit.normalized_mass;

  std::vector<Label> labels(nx, 0);
  std::vector<std::vector<std::size_t>> kept;
  const double bad_limit = gamma * gamma / 16.0 * static_cast<double>(ny);
  const rng::Stream sampler(rng::derive(seed, "similarity/participation"));
  const auto left_labels = audit.labels[0];
  const std::size_t right_blocks = audit.labels[1].size();
  for (std::size_t bi = 0; bi < left_labels.size(); ++bi) {
    const Label block = left_labels[bi];
    double failing = 0.0;
    for (std::size_t bj = 0; bj < right_blocks; ++bj)
      if (!audit.homogeneous[bi * right_blocks + bj]) failing += static_cast<double>(audit.sizes[1][bj]);
    const std::vector<std::size_t> members = left.members(block).indices();
    if (failing > bad_limit + kTol) {
      res.bad_blocks.push_back(block);
      continue;
    }
    // Representative: fewest triples (x, x', y) with y in N(x) Δ N(x').
    const std::size_t size = members.size();
    std::vector<std::uint64_t> participation(size, 0);
    parallel_for(0, size, [&](std::size_t a) {
      const Bitset& row = g.row(members[a]);
      std::uint64_t total = 0;
      if (size <= kExactParticipation) {
        for (std::size_t b = 0; b < size; ++b) total += row.count_xor(g.row(members[b]));
      } else {
        const rng::Stream s = sampler.child(block).child(a);
        for (std::size_t j = 0; j < kExactParticipation; ++j) total += row.count_xor(g.row(members[s.below_at(j, size)]));
      }
      participation[a] = total;
    });
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(participation.begin(), participation.end()) - participation.begin());
    const std::size_t rep = members[best];
    res.representatives.push_back(rep);
    std::vector<std::size_t> keep;
    for (std::size_t x : members) {
      if (static_cast<double>(g.row(x).count_xor(g.row(rep))) >= gamma * static_cast<double>(ny) / 2.0 - kTol)
        ++res.evicted;
      else
        keep.push_back(x);
    }
    kept.push_back(std::move(keep));
  }

  Label next = 1;
  for (const auto& keep : kept) {
    const std::size_t full = keep.size() / res.m * res.m;
    for (std::size_t i = 0; i < full; i += res.m) {
      if (next > res.target_q) break;
      for (std::size_t j = i; j < i + res.m; ++j) labels[keep[j]] = next;
      ++next;
    }
  }
  res.q = next - 1;
  res.partition = PartPartition(left.part(), std::move(labels));
  res.exceptional_size = res.partition.exceptional_size();

  std::vector<std::vector<std::size_t>> blocks(res.q + 1);
  for (std::size_t x = 0; x < nx; ++x) blocks[res.partition.label(x)].push_back(x);
  std::vector<std::size_t> worst(res.q + 1, 0);
  parallel_for(1, res.q + 1, [&](std::size_t l) {
    std::size_t w = 0;
    const auto& b = blocks[l];
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) w = std::max(w, g.row(b[i]).count_xor(g.row(b[j])));
    worst[l] = w;
  });
  res.max_intra_distance = *std::max_element(worst.begin(), worst.end());
  res.contract_met = res.q == res.target_q &&
                     static_cast<double>(res.exceptional_size) <= gamma * static_cast<double>(nx) + kTol &&
                     static_cast<double>(res.max_intra_distance) <= gamma * static_cast<double>(ny) + kTol;
  return res;
}

CoverageError::CoverageError(std::size_t uncovered_, std::size_t tuples_, std::size_t anchors_)
    : Infeasible("tuple coverage failed: " + std::to_string(uncovered_) + " of " + std::to_string(tuples_) +
                 " tuples uncovered after " + std::to_string(anchors_) + " anchors"),
      uncovered(uncovered_),
      tuples(tuples_),
      anchors(anchors_) {}

std::vector<std::size_t> TuplePartition::tuple(std::size_t index) const {
  std::vector<std::size_t> out(source_sizes.size());
  for (std::size_t i = source_sizes.size(); i-- > 0;) {
    out[i] = index % source_sizes[i];
    index /= source_sizes[i];
  }
  return out;
}

TuplePartition tuple_partition(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle,
                               const ToleranceParams& params, const TuplePartitionOptions& options) {
  const std::size_t k = h.k();
  const std::size_t target = options.target_part == SIZE_MAX ? k - 1 : options.target_part;
  if (target >= k) throw InvalidArgument("target part out of range");
  if (!(params.eps > 0.0 && params.eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
  const KPartiteHypergraph g = h.with_part_last(target);
  TuplePartition tp;
  tp.target = target;
  for (std::size_t i = 0; i < k; ++i)
    if (i != target) {
      tp.source_parts.push_back(i);
      tp.source_sizes.push_back(h.part_size(i));
    }
  tp.eps = params.eps;
  tp.mode = params.mode;
  tp.threshold = floor_tol(params.eps * static_cast<double>(h.part_size(target)) / 2.0);
  tp.paper_anchor_count = paper_anchor_count(params.eps, k, oracle.r());
  const std::size_t n_tuples = g.prefix_count();
  tp.classes.assign(n_tuples, 0);
  const rng::Stream anchors(rng::derive(options.seed, "anchors"));

  if (params.mode == Mode::paper) {
    if (!(tp.paper_anchor_count <= static_cast<double>(options.max_anchors)))
      throw Infeasible("anchor count t = " + std::to_string(tp.paper_anchor_count) + " exceeds the cap of " +
                       std::to_string(options.max_anchors) + "; use practical mode");
    const std::size_t t = ceil_tol(tp.paper_anchor_count);
    for (std::size_t i = 0; i < t; ++i) {
      tp.anchors.push_back(anchors.below_at(i, n_tuples));
      tp.anchor_neighborhoods.push_back(g.fiber(tp.anchors.back()));
    }
    parallel_for(0, n_tuples, [&](std::size_t e) {
      const Bitset& row = g.fiber(e);
      for (std::size_t i = 0; i < t; ++i)
        if (row.count_xor(tp.anchor_neighborhoods[i]) <= tp.threshold) {
          tp.classes[e] = static_cast<std::uint32_t>(i + 1);
          break;
        }
    });
  } else {
    std::vector<std::size_t> uncovered(n_tuples);
    for (std::size_t e = 0; e < n_tuples; ++e) uncovered[e] = e;
    const double limit = params.eps * static_cast<double>(n_tuples) + kTol;
    std::vector<std::uint8_t> hit;
    for (std::size_t i = 0; !uncovered.empty() && static_cast<double>(uncovered.size()) > limit; ++i) {
      if (i == options.max_anchors) throw CoverageError(uncovered.size(), n_tuples, i);
      const std::size_t anchor = uncovered[anchors.below_at(i, uncovered.size())];
      tp.anchors.push_back(anchor);
      tp.anchor_neighborhoods.push_back(g.fiber(anchor));
      const Bitset& center = tp.anchor_neighborhoods.back();
      hit.assign(uncovered.size(), 0);
      parallel_for(0, uncovered.size(), [&](std::size_t j) {
        hit[j] = g.fiber(uncovered[j]).count_xor(center) <= tp.threshold ? 1 : 0;
      });
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < uncovered.size(); ++j) {
        if (hit[j]) tp.classes[uncovered[j]] = static_cast<std::uint32_t>(i + 1);
        else rest.push_back(uncovered[j]);
      }
      uncovered = std::move(rest);
    }
  }
  tp.class_sizes.assign(tp.anchors.size() + 1, 0);
  for (std::uint32_t c : tp.classes) ++tp.class_sizes[c];
  return tp;
}

ClassScan scan_classes(const KPartiteHypergraph& h, const TuplePartition& tp, bool exhaustive, std::uint64_t samples,
                       std::uint64_t seed) {
  const KPartiteHypergraph g = h.with_part_last(tp.target);
  if (g.prefix_count() != tp.tuple_count()) throw InvalidArgument("tuple partition does not match the hypergraph");
  std::vector<std::vector<std::size_t>> members(tp.class_count() + 1);
  for (std::size_t e = 0; e < tp.tuple_count(); ++e) members[tp.classes[e]].push_back(e);
  ClassScan scan;
  scan.exhaustive = exhaustive;
  const rng::Stream pairs(rng::derive(seed, "class-scan"));
  for (std::size_t c = 1; c < members.size(); ++c) {
    const auto& m = members[c];
    const Bitset& anchor = tp.anchor_neighborhoods[c - 1];
    for (std::size_t e : m) scan.max_anchor_distance = std::max(scan.max_anchor_distance, g.fiber(e).count_xor(anchor));
    if (m.size() < 2) continue;
    if (exhaustive) {
      std::vector<std::size_t> worst(m.size(), 0);
      parallel_for(0, m.size(), [&](std::size_t i) {
        std::size_t w = 0;
        const Bitset& row = g.fiber(m[i]);
        for (std::size_t j = i + 1; j < m.size(); ++j) w = std::max(w, row.count_xor(g.fiber(m[j])));
        worst[i] = w;
      });
      scan.max_pairwise_distance = std::max(scan.max_pairwise_distance, *std::max_element(worst.begin(), worst.end()));
      scan.pairs_checked += m.size() * (m.size() - 1) / 2;
    } else {
      const rng::Stream s = pairs.child(c);
      for (std::uint64_t j = 0; j < samples; ++j) {
        const std::size_t a = m[s.below_at(2 * j, m.size())], b = m[s.below_at(2 * j + 1, m.size())];
        scan.max_pairwise_distance = std::max(scan.max_pairwise_distance, g.fiber(a).count_xor(g.fiber(b)));
      }
      scan.pairs_checked += samples;
    }
  }
  return scan;
}

TwinReport twin_diagnostics(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle,
                            const ToleranceParams& params, std::size_t target_part, std::size_t samples,
                            std::uint64_t seed) {
  const std::size_t k = h.k();
  const std::size_t target = target_part == SIZE_MAX ? k - 1 : target_part;
  if (target >= k) throw InvalidArgument("target part out of range");
  std::vector<std::size_t> sp, sizes;
  for (std::size_t i = 0; i < k; ++i)
    if (i != target) {
      sp.push_back(i);
      sizes.push_back(h.part_size(i));
    }
  const std::size_t d = sp.size();
  std::size_t n_tuples = 1;
  for (std::size_t s : sizes) n_tuples *= s;

  std::map<std::pair<std::size_t, std::vector<std::size_t>>, SimilarityResult> cache;
  // Similarity partition of part sp[i] in the link of the pins `others` (one value per other coordinate).
  auto similarity = [&](std::size_t i, const std::vector<std::size_t>& others) -> const SimilarityResult& {
    auto key = std::pair{i, others};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<Pin> pins;
    for (std::size_t j = 0, o = 0; j < d; ++j)
      if (j != i) pins.push_back({sp[j], others[o++]});
    BipartiteGraph l = link(h, pins);
    const LinkPartition given = oracle.partition(pins);
    const bool flipped = sp[i] > target;
    if (flipped) l = l.transposed();
    const PartPartition& xp = flipped ? given.right : given.left;
    const PartPartition& yp = flipped ? given.left : given.right;
    auto res = similarity_partition(l, xp, yp, params.gamma, params.r,
                                    rng::combine(rng::derive(seed, "twins"), cache.size()));
    return cache.emplace(std::move(key), std::move(res)).first->second;
  };
  auto others_of = [&](const std::vector<std::size_t>& e, std::size_t i) {
    std::vector<std::size_t> o;
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) o.push_back(e[j]);
    return o;
  };

  TwinReport report;
  report.gamma = params.gamma;
  if (samples == 0 || samples >= n_tuples) {
    for (std::size_t e = 0; e < n_tuples; ++e) report.sampled.push_back(e);
  } else {
    const rng::Stream s(rng::derive(seed, "twin-sample"));
    for (std::size_t j = 0; j < samples; ++j) report.sampled.push_back(s.below_at(j, n_tuples));
  }
  std::vector<std::size_t> good(d, 0);
  std::size_t q_seen = 0;
  for (std::size_t idx : report.sampled) {
    std::vector<std::size_t> e(d);
    for (std::size_t i = d, rest = idx; i-- > 0;) {
      e[i] = rest % sizes[i];
      rest /= sizes[i];
    }
    std::vector<std::size_t> counts(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
      const SimilarityResult& sim = similarity(i, others_of(e, i));
      q_seen = std::max(q_seen, sim.target_q);
      const Label l = sim.partition.label(e[i]);
      if (l != 0) {
        ++good[i];
        counts[i] = sim.partition.block_size(l);
      }
    }
    report.twin_counts.push_back(counts);
    // Chain twins: choose e1 from the last coordinate down; coordinate i uses pins made of
    // e's coordinates before i and e1's coordinates after i.
    std::vector<std::size_t> e1 = e;
    auto chain = [&](auto&& self, std::size_t i) -> double {
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) others.push_back(j < i ? e[j] : e1[j]);
      const SimilarityResult& sim = similarity(i, others);
      const Label l = sim.partition.label(e[i]);
      if (l == 0) return 0.0;
      if (i == 0) return static_cast<double>(sim.partition.block_size(l));
      double total = 0.0;
      for (std::size_t x : sim.partition.members(l).indices()) {
        e1[i] = x;
        total += self(self, i - 1);
      }
      e1[i] = e[i];
      return total;
    };
    report.chain_twins.push_back(chain(chain, d - 1));
  }
  report.q = q_seen;
  const double n = static_cast<double>(h.part_size(sp.front()));
  report.excellence_threshold =
      q_seen == 0 ? 0.0 : std::pow(params.gamma * n / static_cast<double>(q_seen), static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    report.good_fraction.push_back(static_cast<double>(good[i]) / static_cast<double>(report.sampled.size()));
  std::size_t excellent = 0;
  for (double c : report.chain_twins)
    if (c >= report.excellence_threshold - kTol) ++excellent;
  report.excellent_fraction = static_cast<double>(excellent) / static_cast<double>(report.sampled.size());
  return report;
}

LayeredPartition HomogenizeResult::refinement() const {
  std::vector<PartPartition> out;
  for (const auto& p : parts) out.push_back(p.refinement);
  return LayeredPartition(std::move(out));
}

HomogenizeResult homogeneous_partition(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle, double eps,
                                       std::uint64_t seed, const HomogenizeOptions& options) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  const std::size_t k = h.k();
  HomogenizeResult result;
  result.eps = eps;
  result.mode = options.mode;
  result.inner_eps = eps * eps / (8.0 * static_cast<double>(k));
  ToleranceParams inner = ToleranceParams::paper(result.inner_eps, k, oracle.r());
  inner.mode = options.mode;
  std::vector<PartPartition> parts;
  for (std::size_t i = 0; i < k; ++i) {
    TuplePartitionOptions topt;
    topt.target_part = i;
    topt.max_anchors = options.max_anchors;
    topt.seed = rng::derive(seed, "tuple-partition/part-" + std::to_string(i));
    const TuplePartition tp = tuple_partition(h, oracle, inner, topt);
    const KPartiteHypergraph g = h.with_part_last(i);
    // Lowest-index member of each nonempty class stands for the class.
    std::vector<std::size_t> rep(tp.class_count() + 1, SIZE_MAX);
    for (std::size_t e = tp.tuple_count(); e-- > 0;) rep[tp.classes[e]] = e;
    std::vector<Bitset> neighborhoods;
    std::size_t classes = 0;
    for (std::size_t c = 1; c < rep.size(); ++c)
      if (rep[c] != SIZE_MAX) {
        neighborhoods.push_back(g.fiber(rep[c]));
        ++classes;
      }
    PartOutcome out;
    out.part = i;
    out.classes = classes;
    out.exceptional_tuples = tp.exceptional_count();
    out.refinement = common_refinement(i, h.part_size(i), neighborhoods);
    out.atoms = out.refinement.block_count();
    out.p = options.mode == Mode::paper ? std::pow(2.0, static_cast<double>(classes)) : static_cast<double>(out.atoms);
    const double n = static_cast<double>(h.part_size(i));
    out.formula_block_size = eps * eps * n / (8.0 * static_cast<double>(k) * out.p);
    out.block_size = options.block_size ? *options.block_size : std::max<std::size_t>(1, floor_tol(out.formula_block_size));
    const EqualizeResult eq = equalize(out.refinement, out.block_size);
    out.remainder = eq.remainder;
    out.budget = 8.0 * static_cast<double>(k) * out.p / (eps * eps);
    parts.push_back(eq.partition);
    result.parts.push_back(std::move(out));
  }
  result.partition = LayeredPartition(std::move(parts));
  return result;
}

}  // namespace homopart
