#include "homopart/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>

#include "homopart/auditor.hpp"
#include "homopart/error.hpp"
#include "homopart/generator.hpp"
#include "homopart/gowers.hpp"
#include "homopart/homogenizer.hpp"
#include "homopart/io.hpp"
#include "homopart/manifest.hpp"
#include "homopart/oracle.hpp"
#include "homopart/parallel.hpp"

namespace homopart {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string mode = "practical";
  double eps = 0.2;
  double delta = 0.1;
  std::string out = ".";
  std::size_t threads = 0;
};

/// One command invocation: registers inputs, stamps and writes artifacts, then the manifest.
class Run {
 public:
  Run(std::string command, const Globals& g) : dir_(g.out), start_(std::chrono::steady_clock::now()) {
    man_.command = std::move(command);
    man_.mode = g.mode;
    man_.seed = g.seed;
    man_.parameters["eps"] = g.eps;
    man_.parameters["delta"] = g.delta;
    if (g.threads > 0) set_thread_count(g.threads);
  }

  json& parameters() { return man_.parameters; }
  json& results() { return man_.results; }
  void set_mode(std::string mode) { man_.mode = std::move(mode); }

  std::string input(const fs::path& path) {
    std::string text = read_file(path);
    man_.inputs[path.filename().string()] = sha256_hex(text);
    return text;
  }

  fs::path emit(const std::string& name, std::string content) {
    const std::string stamped = stamp(std::move(content), man_.digest());
    return write(name, stamped);
  }

  fs::path emit_json(const std::string& name, json body) {
    body["manifest"] = man_.digest();
    return write(name, body.dump(2) + "\n");
  }

  void finish() {
    man_.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    std::string name = man_.command;
    std::replace(name.begin(), name.end(), ' ', '-');
    write_atomic(dir_ / (name + ".manifest.json"), man_.to_json().dump(2) + "\n");
  }

 private:
  fs::path write(const std::string& name, const std::string& bytes) {
    const fs::path path = dir_ / name;
    write_atomic(path, bytes);
    man_.outputs[name] = sha256_hex(bytes);
    return path;
  }

  RunManifest man_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
};

Mode homogenizer_mode(const std::string& mode) {
  if (mode == "paper") return Mode::paper;
  if (mode == "practical") return Mode::practical;
  throw InvalidArgument("homogenize supports --mode paper or practical, not " + mode);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::size_t max_blocks(const LinkTable& t) {
  std::size_t r = 1;
  for (const auto& [pins, lp] : t.entries) r = std::max({r, lp.left.block_count(), lp.right.block_count()});
  return r;
}

json report_json(const HomogeneityReport& rep) {
  return {{"pass", rep.pass},
          {"normalized_mass", rep.normalized_mass},
          {"failing_tuples", rep.failing},
          {"weighted_extension", rep.weighted}};
}

// ---- gowers helpers ----

json params_json(const gowers::GowersParams& p, std::size_t max_attempts) {
  json j = {{"eps", p.eps},   {"delta", p.delta}, {"n", p.n},       {"t", p.t},
            {"s0", p.s0},     {"mode", gowers::to_string(p.mode)}, {"seed", p.seed},
            {"m", p.m},       {"relaxations", p.relaxations},       {"max_attempts", max_attempts}};
  j["growth_cap"] = p.growth_cap ? json(*p.growth_cap) : json(nullptr);
  return j;
}

gowers::GowersParams sequence_from(double eps, double delta, bool toy, std::optional<std::size_t> t,
                                   std::optional<std::uint64_t> growth, std::optional<double> s0, std::uint64_t seed) {
  gowers::SequenceOverrides o;
  if (toy) {
    o.t = t.value_or(3);
    o.growth_cap = growth.value_or(2);
    o.s0 = s0.value_or(2.0);
  } else if (t || growth || s0) {
    throw InvalidArgument("--t, --growth and --s0 require --toy");
  }
  gowers::GowersParams p = gowers::build_sequence(eps, delta, toy ? gowers::Mode::toy : gowers::Mode::paper, o);
  p.seed = seed;
  return p;
}

gowers::GowersInstance instance_from_json(const json& meta) {
  try {
    const bool toy = meta.at("mode").get<std::string>() == "toy";
    std::optional<std::uint64_t> growth;
    if (!meta.at("growth_cap").is_null()) growth = meta.at("growth_cap").get<std::uint64_t>();
    auto p = sequence_from(meta.at("eps"), meta.at("delta"), toy, toy ? std::optional<std::size_t>(meta.at("t").get<std::size_t>()) : std::nullopt,
                           growth, toy ? std::optional<double>(meta.at("s0").get<double>()) : std::nullopt,
                           meta.at("seed").get<std::uint64_t>());
    return gowers::build_weighted(p, meta.at("n").get<std::size_t>(), meta.at("max_attempts").get<std::size_t>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed construction metadata: ") + e.what());
  }
}

json family_json(const gowers::OrthogonalFamily& f) {
  json xs = json::array();
  for (const Bitset& x : f.x) {
    std::string s(f.M, '0');
    x.for_each_set([&](std::size_t j) { s[j] = '1'; });
    xs.push_back(s);
  }
  return {{"m", f.m},
          {"M", f.M},
          {"attempts", f.attempts},
          {"within_hypothesis", f.check.within_hypothesis},
          {"item1_applicable", f.check.item1_applicable},
          {"item1_pass", f.check.item1_pass},
          {"event_pass", f.check.event_pass},
          {"max_agreement", f.check.max_agreement},
          {"x", xs}};
}

json set_json(const VertexSet& s) { return s.members.indices(); }

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"homopart: homogeneous partitions and regularity audits for partite hypergraphs"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--mode", g.mode, "paper | practical | toy")->check(CLI::IsMember({"paper", "practical", "toy"}));
  app.add_option("--eps", g.eps, "tolerance eps");
  app.add_option("--delta", g.delta, "link regularity delta");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads (default HOMOPART_THREADS or all cores)");

  int status = kExitOk;

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  std::string family = "planted-boxes", name = "instance";
  std::size_t k = 3, r = 2;
  std::vector<std::size_t> ns{60};
  double density = 0.5, eps_prime = 0.0;
  gen->add_option("--family", family, "planted-boxes | product | interval-threshold | uniform-random");
  gen->add_option("--k", k);
  gen->add_option("--n", ns, "part size, or one size per part")->expected(1, -1);
  gen->add_option("--r", r, "blocks per part for planted families");
  gen->add_option("--density", density, "edge probability for uniform-random");
  gen->add_option("--eps-prime", eps_prime);
  gen->add_option("--name", name, "output file stem");
  gen->callback([&] {
    Run run("gen", g);
    InstanceSpec spec{k, ns, parse_family(family), r, eps_prime, density, g.seed};
    run.parameters()["family"] = family;
    run.parameters()["k"] = k;
    run.parameters()["n"] = ns;
    run.parameters()["r"] = r;
    run.parameters()["density"] = density;
    run.parameters()["eps_prime"] = eps_prime;
    const GeneratedInstance inst = generate(spec);
    run.emit(name + ".khg", io::write_khg(inst.hypergraph));
    if (inst.links) run.emit(name + ".links", io::write_links(*inst.links));
    run.results() = {{"edges", inst.hypergraph.edge_count()}, {"r", inst.r}, {"planted", inst.links != nullptr}};
    run.finish();
    out << "generated " << to_string(spec.family) << " instance with " << inst.hypergraph.edge_count() << " edges\n";
  });

  // homogenize
  auto* hom = app.add_subcommand("homogenize", "build an eps-homogeneous equipartition");
  std::string in, links_path, oracle_kind;
  std::optional<std::size_t> oracle_r, block_size;
  std::size_t max_anchors = 4096;
  hom->add_option("--in", in, ".khg instance")->required();
  hom->add_option("--links", links_path, ".links oracle table (default: beside the instance)");
  hom->add_option("--oracle", oracle_kind, "planted | greedy | exhaustive");
  hom->add_option("--r", oracle_r, "link partition size bound");
  hom->add_option("--max-anchors", max_anchors);
  hom->add_option("--block-size", block_size, "override the equalized block size");
  hom->callback([&] {
    Run run("homogenize", g);
    const Mode mode = homogenizer_mode(g.mode);
    const KPartiteHypergraph h = io::read_khg(run.input(in));
    if (links_path.empty()) {
      const fs::path guess = fs::path(in).replace_extension(".links");
      if (fs::exists(guess)) links_path = guess.string();
    }
    if (oracle_kind.empty()) oracle_kind = links_path.empty() ? "greedy" : "planted";
    std::optional<LinkPartitionOracle> oracle;
    if (oracle_kind == "planted") {
      if (links_path.empty()) throw InvalidArgument("planted oracle needs a .links file");
      auto table = std::make_shared<const LinkTable>(io::read_links(run.input(links_path)));
      if (table->part_sizes != h.part_sizes()) throw InvalidArgument("links table does not match the instance");
      oracle = table_oracle(table, oracle_r.value_or(max_blocks(*table)));
    } else if (oracle_kind == "greedy" || oracle_kind == "exhaustive") {
      if (!oracle_r) throw InvalidArgument("--r is required for the " + oracle_kind + " oracle");
      const double link_eps = ToleranceParams::paper(g.eps, h.k(), *oracle_r).link_eps;
      oracle = oracle_kind == "greedy" ? greedy_oracle(h, *oracle_r, link_eps)
                                       : exhaustive_oracle(h, *oracle_r, link_eps);
    } else {
      throw InvalidArgument("unknown oracle '" + oracle_kind + "'");
    }
    run.parameters()["oracle"] = oracle_kind;
    run.parameters()["r"] = oracle->r();
    run.parameters()["max_anchors"] = max_anchors;
    run.parameters()["block_size"] = block_size ? json(*block_size) : json(nullptr);
    HomogenizeOptions opts{mode, max_anchors, block_size};
    HomogenizeResult res;
    try {
      res = homogeneous_partition(h, *oracle, g.eps, g.seed, opts);
    } catch (const CoverageError& e) {
      const double mass = static_cast<double>(e.uncovered) / static_cast<double>(e.tuples);
      run.results() = {{"coverage", "failed"},
                       {"uncovered", e.uncovered},
                       {"tuples", e.tuples},
                       {"anchors", e.anchors},
                       {"uncovered_mass", mass}};
      run.finish();
      err << e.what() << " (uncovered mass " << mass << ")\n";
      status = kExitVerification;
      return;
    }
    const HomogeneityReport rep = homogeneity_audit(h, res.partition, g.eps);
    const std::string stem = stem_of(in);
    run.emit(stem + ".part", io::write_part(res.partition));
    run.emit(stem + ".audit", io::write_audit(io::audit_file(rep)));
    json parts = json::array();
    bool within_budget = true;
    for (std::size_t i = 0; i < res.parts.size(); ++i) {
      const PartOutcome& po = res.parts[i];
      const std::size_t blocks = res.partition[i].block_count();
      within_budget = within_budget && static_cast<double>(blocks) <= po.budget;
      parts.push_back({{"classes", po.classes},
                       {"exceptional_tuples", po.exceptional_tuples},
                       {"atoms", po.atoms},
                       {"p", po.p},
                       {"block_size", po.block_size},
                       {"formula_block_size", po.formula_block_size},
                       {"blocks", blocks},
                       {"budget", po.budget}});
    }
    run.results() = report_json(rep);
    run.results()["parts"] = parts;
    run.results()["within_budget"] = within_budget;
    run.finish();
    out << "homogenize: mass " << rep.normalized_mass << (rep.pass ? " pass" : " FAIL")
        << (within_budget ? "" : ", block budget exceeded") << "\n";
    if (!rep.pass || !within_budget) status = kExitVerification;
  });

  // audit
  auto* aud = app.add_subcommand("audit", "homogeneity audit of a partition");
  std::string part_path;
  aud->add_option("--in", in, ".khg or .w3g instance")->required();
  aud->add_option("--part", part_path, ".part partition")->required();
  aud->callback([&] {
    Run run("audit", g);
    const std::string text = run.input(in);
    const LayeredPartition p = io::read_part(run.input(part_path));
    HomogeneityReport rep;
    if (fs::path(in).extension() == ".w3g") rep = homogeneity_audit(io::read_w3g(text), p, g.eps);
    else rep = homogeneity_audit(io::read_khg(text), p, g.eps);
    run.emit(stem_of(in) + ".audit", io::write_audit(io::audit_file(rep)));
    run.results() = report_json(rep);
    run.finish();
    out << "audit: mass " << rep.normalized_mass << (rep.pass ? " pass" : " FAIL")
        << (rep.weighted ? " (weighted homogeneity is an extension)" : "") << "\n";
    if (!rep.pass) status = kExitVerification;
  });

  // vc
  auto* vc = app.add_subcommand("vc", "slicewise VC-dimension");
  std::size_t cap = 6;
  vc->add_option("--in", in, ".khg instance")->required();
  vc->add_option("--cap", cap, "largest dimension searched");
  vc->callback([&] {
    Run run("vc", g);
    const KPartiteHypergraph h = io::read_khg(run.input(in));
    run.parameters()["cap"] = cap;
    const VcResult v = slicewise_vc(h, cap);
    run.results() = {{"dimension", v.dimension}, {"at_least", v.at_least}};
    run.finish();
    out << "slicewise VC-dimension " << (v.at_least ? ">= " : "") << v.dimension << "\n";
  });

  // gowers
  auto* gw = app.add_subcommand("gowers", "lower-bound construction");
  gw->require_subcommand(1);
  bool toy = false;
  std::optional<std::size_t> layers;
  std::optional<std::uint64_t> growth;
  std::optional<double> s0;
  std::size_t gn = 120, attempts = 64;
  auto* gb = gw->add_subcommand("build", "build the weighted 3-graph");
  gb->add_flag("--toy", toy, "toy mode (same as --mode toy)");
  gb->add_option("--t", layers, "toy: number of C layers");
  gb->add_option("--n", gn, "part size");
  gb->add_option("--growth", growth, "toy: growth cap");
  gb->add_option("--s0", s0, "toy: threshold s0");
  gb->add_option("--max-attempts", attempts, "rejection-sampling attempts per family");
  gb->callback([&] {
    toy = toy || g.mode == "toy";
    Run run("gowers build", g);
    run.set_mode(toy ? "toy" : "paper");
    auto p = sequence_from(g.eps, g.delta, toy, layers, growth, s0, g.seed);
    const gowers::GowersInstance inst = gowers::build_weighted(p, gn, attempts);
    json meta = params_json(inst.params, attempts);
    run.parameters() = meta;
    json fams = json::array();
    for (const auto& f : inst.families) fams.push_back(family_json(f));
    meta["families"] = fams;
    run.emit("gowers.w3g", io::write_w3g(inst.weighted));
    run.emit_json("gowers.json", meta);
    run.finish();
    out << "built construction: t = " << inst.t() << ", n = " << inst.n() << ", m = " << json(inst.params.m).dump()
        << "\n";
  });

  std::string meta_path;
  std::uint64_t budget = 10000;
  auto* gl = gw->add_subcommand("links", "certify every link partition");
  gl->add_option("--in", meta_path, "construction metadata (default <out>/gowers.json)");
  gl->add_option("--budget", budget, "sampled witness draws for quasirandom links");
  std::size_t boxes = 100;
  auto* gs = gw->add_subcommand("sample", "sample an unweighted 3-graph");
  gs->add_option("--in", meta_path, "construction metadata (default <out>/gowers.json)");
  gs->add_option("--boxes", boxes, "random sub-boxes in the concentration report");
  auto* gc = gw->add_subcommand("cascade", "refinement cascade of a candidate partition");
  gc->add_option("--in", meta_path, "construction metadata (default <out>/gowers.json)");
  gc->add_option("--part", part_path, "candidate .part (default: one block per part)");

  auto load = [&](Run& run) {
    if (meta_path.empty()) meta_path = (fs::path(g.out) / "gowers.json").string();
    json meta;
    try {
      meta = json::parse(run.input(meta_path));
    } catch (const json::parse_error& e) {
      throw io::ParseError("json", e.what(), e.byte);
    }
    run.parameters() = meta;
    run.parameters().erase("manifest");
    run.set_mode(meta.value("mode", "paper"));
    return instance_from_json(meta);
  };

  gl->callback([&] {
    Run run("gowers links", g);
    const auto inst = load(run);
    run.parameters()["budget"] = budget;
    gowers::CertificateOptions co{budget, g.seed, std::nullopt};
    const auto certs = gowers::all_link_certificates(inst, co);
    std::string text = "certs " + std::to_string(inst.n()) + ' ' + std::to_string(inst.t()) + '\n';
    std::size_t exact_fail = 0, witnesses = 0, exact = 0;
    for (const auto& c : certs) {
      text += std::to_string(c.vertex.part) + ' ' + std::to_string(c.vertex.vertex) + ' ' + to_string(c.kind) + ' ' +
              std::to_string(c.level) + ' ' + std::to_string(c.left.block_count()) + ' ' +
              std::to_string(c.right.block_count()) + ' ' + std::to_string(c.violating_pairs) + ' ' +
              (c.witness ? (c.witness->found ? "witness" : "none-in-budget") : "exact") + ' ' +
              (c.verified ? "verified" : "FAILED") + '\n';
      if (c.exact) {
        ++exact;
        if (!c.verified) ++exact_fail;
      } else if (c.witness && c.witness->found) {
        ++witnesses;
      }
    }
    run.emit("gowers.certs", text);
    run.results() = {{"certificates", certs.size()}, {"exact", exact}, {"exact_failures", exact_fail},
                     {"sampled_witnesses", witnesses}};
    run.finish();
    out << certs.size() << " certificates, " << exact << " exact (" << exact_fail << " failed), " << witnesses
        << " sampled irregularity witnesses\n";
    if (exact_fail || witnesses) status = kExitVerification;
  });

  gs->callback([&] {
    Run run("gowers sample", g);
    const auto inst = load(run);
    run.parameters()["boxes"] = boxes;
    const KPartiteHypergraph s = gowers::sample_unweighted(inst.weighted, g.seed);
    const auto rep = gowers::concentration_report(inst.weighted, s, boxes, g.seed);
    json bx = json::array();
    for (const auto& b : rep.boxes)
      bx.push_back({{"sizes", b.sizes}, {"weighted", b.weighted}, {"sampled", b.sampled}, {"band", b.band},
                    {"sigma", b.sigma}, {"within", b.within}});
    json body = {{"full", {{"weighted", rep.full.weighted}, {"sampled", rep.full.sampled}, {"band", rep.full.band},
                           {"sigma", rep.full.sigma}, {"within", rep.full.within}}},
                 {"within", rep.within},
                 {"boxes", bx}};
    run.emit("sample.khg", io::write_khg(s));
    run.emit_json("sample.json", body);
    const bool ok = rep.full.within && static_cast<double>(rep.within) >= 0.97 * static_cast<double>(boxes);
    run.results() = {{"within", rep.within}, {"boxes", boxes}, {"full_within", rep.full.within}, {"pass", ok}};
    run.finish();
    out << "sample: " << s.edge_count() << " edges, " << rep.within << "/" << boxes << " boxes within band\n";
    if (!ok) status = kExitVerification;
  });

  gc->callback([&] {
    Run run("gowers cascade", g);
    const auto inst = load(run);
    const std::size_t n = inst.n();
    LayeredPartition cand = part_path.empty()
                                ? LayeredPartition({PartPartition::trivial(0, n), PartPartition::trivial(1, n),
                                                    PartPartition::trivial(2, n)})
                                : io::read_part(run.input(part_path));
    const auto opts = inst.params.mode == gowers::Mode::toy ? gowers::CascadeOptions::toy(g.eps, inst.t())
                                                            : gowers::CascadeOptions::paper(g.eps);
    run.parameters()["beta_base"] = opts.beta_base;
    const auto rep = gowers::refinement_cascade(inst, cand, opts);
    json levels = json::array();
    for (const auto& l : rep.levels) {
      json ws = json::array();
      for (const auto& w : l.witnesses)
        ws.push_back({{"side", std::string(1, w.side)},
                      {"labels", w.labels},
                      {"first", {set_json(w.first[0]), set_json(w.first[1]), set_json(w.first[2])}},
                      {"second", {set_json(w.second[0]), set_json(w.second[1]), set_json(w.second[2])}},
                      {"first_density", w.first_density},
                      {"second_density", w.second_density},
                      {"block_density", w.block_density},
                      {"gap", w.gap},
                      {"verified", w.verified}});
      json lj = {{"level", l.level}, {"beta", l.beta}, {"valid", l.valid}, {"witnesses", ws}};
      lj["refines_a"] = l.a ? json(l.a->refines) : json(nullptr);
      lj["refines_b"] = l.b ? json(l.b->refines) : json(nullptr);
      levels.push_back(lj);
    }
    run.emit_json("cascade.json", {{"levels", levels}});
    run.results() = {{"witnesses", rep.witness_count()}, {"all_verified", rep.all_verified()},
                     {"max_gap", rep.max_gap()}};
    run.finish();
    out << "cascade: " << rep.witness_count() << " witnesses, max gap " << rep.max_gap()
        << (rep.all_verified() ? ", all verified" : ", VERIFICATION FAILED") << "\n";
    if (!rep.all_verified()) status = kExitVerification;
  });

  // bench
  auto* bench = app.add_subcommand("bench", "time the homogenize pipeline on planted instances");
  std::vector<std::size_t> sizes{60, 120};
  bench->add_option("--n", sizes, "part sizes")->expected(1, -1);
  bench->add_option("--r", r);
  bench->callback([&] {
    Run run("bench", g);
    run.parameters()["n"] = sizes;
    run.parameters()["r"] = r;
    json rows = json::array();
    for (std::size_t n : sizes) {
      const auto t0 = std::chrono::steady_clock::now();
      const GeneratedInstance inst = generate({3, {n}, Family::planted_boxes, r, 0.0, 0.5, g.seed});
      const auto res = homogeneous_partition(inst.hypergraph, inst.oracle(), g.eps, g.seed,
                                             HomogenizeOptions{homogenizer_mode(g.mode), 4096, std::nullopt});
      const auto rep = homogeneity_audit(inst.hypergraph, res.partition, g.eps);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rows.push_back({{"n", n}, {"ms", ms}, {"pass", rep.pass}, {"mass", rep.normalized_mass}});
      out << "n = " << n << ": " << ms << " ms, mass " << rep.normalized_mass << "\n";
    }
    run.results() = {{"runs", rows}};
    run.finish();
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitVerification;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return status;
}

}  // namespace homopart
