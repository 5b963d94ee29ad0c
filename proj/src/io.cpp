#include "homopart/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>

namespace homopart::io {

ParseError::ParseError(std::string_view format, const std::string& what, std::size_t offset_)
    : InvalidArgument(std::string(format) + ": " + what + " at byte " + std::to_string(offset_)), offset(offset_) {}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

class Reader {
 public:
  Reader(std::string_view format, std::string_view text) : format_(format), text_(text) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(format_, what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(format_, what, at); }
  /// Start of the next field on the current line.
  std::size_t pos() {
    skip_blanks();
    return pos_;
  }

  /// Moves to the start of the next data line; false at end of input.
  bool next_line() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '#') {
        skip_rest();
        continue;
      }
      return true;
    }
    return false;
  }

  bool at_eol() {
    skip_blanks();
    return pos_ >= text_.size() || text_[pos_] == '\n';
  }

  void end_line() {
    if (!at_eol()) fail("unexpected token");
    if (pos_ >= text_.size()) fail("missing line feed");
    ++pos_;
  }

  std::string_view token() {
    skip_blanks();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\n') ++pos_;
    if (start == pos_) fail("missing field");
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    const std::size_t at = (skip_blanks(), pos_);
    if (token() != word) fail_at("expected '" + std::string(word) + "'", at);
  }

  std::size_t integer() {
    const std::size_t at = (skip_blanks(), pos_);
    const std::string_view t = token();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail_at("expected a non-negative integer", at);
    return v;
  }

  double real() {
    const std::size_t at = (skip_blanks(), pos_);
    const std::string_view t = token();
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail_at("expected a number", at);
    return v;
  }

 private:
  void skip_blanks() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }
  void skip_rest() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    if (pos_ < text_.size()) ++pos_;
  }

  std::string_view format_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string join_labels(std::span<const PartPartition::Label> labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(labels[i]);
  }
  return out;
}

std::vector<PartPartition::Label> read_labels(Reader& r, std::string_view stop = {}) {
  std::vector<PartPartition::Label> labels;
  while (!r.at_eol()) {
    const std::size_t at = r.pos();
    const std::string_view t = r.token();
    if (!stop.empty() && t == stop) break;
    PartPartition::Label v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) r.fail_at("expected a block label", at);
    labels.push_back(v);
  }
  return labels;
}

PartPartition make_partition(Reader& r, std::size_t part, std::vector<PartPartition::Label> labels, std::size_t at) {
  try {
    return PartPartition(part, std::move(labels));
  } catch (const InvalidArgument& e) {
    r.fail_at(e.what(), at);
  }
}

}  // namespace

std::string write_khg(const KPartiteHypergraph& h) {
  std::string out = "khg " + std::to_string(h.k());
  for (std::size_t i = 0; i < h.k(); ++i) out += ' ' + std::to_string(h.part_size(i));
  out += '\n';
  h.for_each_edge([&](std::span<const std::size_t> e) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(e[i]);
    }
    out += '\n';
  });
  return out;
}

KPartiteHypergraph read_khg(std::string_view text) {
  Reader r("khg", text);
  if (!r.next_line()) r.fail("empty input");
  r.expect("khg");
  const std::size_t k = r.integer();
  if (k < 2) r.fail("k must be at least 2");
  std::vector<std::size_t> sizes(k);
  for (auto& s : sizes) {
    s = r.integer();
    if (s == 0) r.fail("part sizes must be positive");
  }
  r.end_line();
  KPartiteHypergraph h(sizes);
  std::vector<std::size_t> e(k);
  while (r.next_line()) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t at = r.pos();
      e[i] = r.integer();
      if (e[i] >= sizes[i]) r.fail_at("vertex out of range", at);
    }
    r.end_line();
    h.add_edge(e);
  }
  return h;
}

std::string write_w3g(const WeightedTripartite& h) {
  const auto s = h.part_sizes();
  std::string out = "w3g " + std::to_string(s[0]) + ' ' + std::to_string(s[1]) + ' ' + std::to_string(s[2]) + '\n';
  for (std::size_t a = 0; a < s[0]; ++a)
    for (std::size_t b = 0; b < s[1]; ++b)
      for (std::size_t c = 0; c < s[2]; ++c)
        if (const double w = h.weight(a, b, c); w != 0.0)
          out += std::to_string(a) + ' ' + std::to_string(b) + ' ' + std::to_string(c) + ' ' + format_double(w) + '\n';
  return out;
}

WeightedTripartite read_w3g(std::string_view text) {
  Reader r("w3g", text);
  if (!r.next_line()) r.fail("empty input");
  r.expect("w3g");
  std::array<std::size_t, 3> s{};
  for (auto& v : s) {
    v = r.integer();
    if (v == 0) r.fail("part sizes must be positive");
  }
  r.end_line();
  WeightedTripartite h(s[0], s[1], s[2]);
  while (r.next_line()) {
    std::array<std::size_t, 3> cell{};
    for (std::size_t i = 0; i < 3; ++i) {
      const std::size_t at = r.pos();
      cell[i] = r.integer();
      if (cell[i] >= s[i]) r.fail_at("vertex out of range", at);
    }
    const std::size_t at = r.pos();
    const double w = r.real();
    if (!(w >= 0.0 && w <= 1.0)) r.fail_at("weight outside [0,1]", at);
    r.end_line();
    h.set_weight(cell[0], cell[1], cell[2], w);
  }
  return h;
}

std::string write_part(const LayeredPartition& p) {
  std::string out = "part " + std::to_string(p.k()) + '\n';
  for (std::size_t i = 0; i < p.k(); ++i) out += join_labels(p[i].labels()) + '\n';
  return out;
}

LayeredPartition read_part(std::string_view text) {
  Reader r("part", text);
  if (!r.next_line()) r.fail("empty input");
  r.expect("part");
  const std::size_t k = r.integer();
  r.end_line();
  std::vector<PartPartition> parts;
  for (std::size_t i = 0; i < k; ++i) {
    if (!r.next_line()) r.fail("missing partition line " + std::to_string(i + 1));
    const std::size_t at = r.pos();
    auto labels = read_labels(r);
    if (labels.empty()) r.fail_at("empty partition line", at);
    r.end_line();
    parts.push_back(make_partition(r, i, std::move(labels), at));
  }
  if (r.next_line()) r.fail("trailing data");
  return LayeredPartition(std::move(parts));
}

std::string write_links(const LinkTable& table) {
  std::string out = "links " + std::to_string(table.part_sizes.size());
  for (std::size_t s : table.part_sizes) out += ' ' + std::to_string(s);
  out += '\n';
  for (const auto& [pins, lp] : table.entries) {
    for (const Pin& p : pins) out += std::to_string(p.part) + ':' + std::to_string(p.vertex) + ' ';
    out += "| " + join_labels(lp.left.labels()) + " | " + join_labels(lp.right.labels()) + '\n';
  }
  return out;
}

LinkTable read_links(std::string_view text) {
  Reader r("links", text);
  if (!r.next_line()) r.fail("empty input");
  r.expect("links");
  LinkTable table;
  const std::size_t k = r.integer();
  if (k < 3) r.fail("k must be at least 3");
  table.part_sizes.resize(k);
  for (auto& s : table.part_sizes) s = r.integer();
  r.end_line();
  while (r.next_line()) {
    std::vector<Pin> pins;
    std::vector<bool> pinned(k, false);
    for (std::size_t i = 0; i + 2 < k; ++i) {
      const std::size_t at = r.pos();
      const std::string_view t = r.token();
      const auto colon = t.find(':');
      Pin p{};
      if (colon == std::string_view::npos ||
          std::from_chars(t.data(), t.data() + colon, p.part).ptr != t.data() + colon ||
          std::from_chars(t.data() + colon + 1, t.data() + t.size(), p.vertex).ptr != t.data() + t.size())
        r.fail_at("expected part:vertex", at);
      if (p.part >= k || pinned[p.part] || p.vertex >= table.part_sizes[p.part]) r.fail_at("invalid pin", at);
      pinned[p.part] = true;
      pins.push_back(p);
    }
    std::sort(pins.begin(), pins.end());
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < k; ++i)
      if (!pinned[i]) free.push_back(i);
    r.expect("|");
    const std::size_t left_at = r.pos();
    auto left = read_labels(r, "|");
    const std::size_t right_at = r.pos();
    auto right = read_labels(r);
    if (left.size() != table.part_sizes[free[0]]) r.fail_at("left labels do not match the part size", left_at);
    if (right.size() != table.part_sizes[free[1]]) r.fail_at("right labels do not match the part size", right_at);
    r.end_line();
    LinkPartition lp{make_partition(r, free[0], std::move(left), left_at),
                     make_partition(r, free[1], std::move(right), right_at)};
    if (!table.entries.emplace(std::move(pins), std::move(lp)).second) r.fail_at("duplicate pin tuple", left_at);
  }
  return table;
}

AuditFile audit_file(const HomogeneityReport& report) {
  AuditFile a;
  a.kind = report.weighted ? "weighted-extension" : "unweighted";
  a.eps = report.eps;
  a.pass = report.pass;
  a.mass = report.normalized_mass;
  for (std::size_t i = 0; i < report.homogeneous.size(); ++i)
    a.records.push_back({report.tuple_labels(i), report.tuple_density(i), report.homogeneous[i] != 0});
  return a;
}

std::string write_audit(const AuditFile& audit) {
  std::string out = "audit " + audit.kind + ' ' + format_double(audit.eps) + ' ' + (audit.pass ? "pass" : "fail") +
                    ' ' + format_double(audit.mass) + '\n';
  for (const auto& rec : audit.records)
    out += join_labels(rec.labels) + ' ' + format_double(rec.density) + ' ' + (rec.homogeneous ? "ok" : "bad") + '\n';
  return out;
}

AuditFile read_audit(std::string_view text) {
  Reader r("audit", text);
  if (!r.next_line()) r.fail("empty input");
  r.expect("audit");
  AuditFile a;
  a.kind = std::string(r.token());
  a.eps = r.real();
  const std::size_t at = r.pos();
  const std::string_view verdict = r.token();
  if (verdict != "pass" && verdict != "fail") r.fail_at("expected pass or fail", at);
  a.pass = verdict == "pass";
  a.mass = r.real();
  r.end_line();
  while (r.next_line()) {
    std::vector<std::string_view> fields;
    std::vector<std::size_t> offsets;
    while (!r.at_eol()) {
      offsets.push_back(r.pos());
      fields.push_back(r.token());
    }
    if (fields.size() < 3) r.fail("audit record needs labels, density and verdict");
    r.end_line();
    AuditRecord rec;
    for (std::size_t i = 0; i + 2 < fields.size(); ++i) {
      PartPartition::Label v = 0;
      auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc() || ptr != fields[i].data() + fields[i].size()) r.fail_at("expected a block label", offsets[i]);
      rec.labels.push_back(v);
    }
    const auto& d = fields[fields.size() - 2];
    auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), rec.density);
    if (ec != std::errc() || ptr != d.data() + d.size()) r.fail_at("expected a density", offsets[fields.size() - 2]);
    const auto& v = fields.back();
    if (v != "ok" && v != "bad") r.fail_at("expected ok or bad", offsets.back());
    rec.homogeneous = v == "ok";
    a.records.push_back(std::move(rec));
  }
  return a;
}

}  // namespace homopart::io
