#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "homopart/auditor.hpp"
#include "homopart/error.hpp"
#include "homopart/hypergraph.hpp"
#include "homopart/oracle.hpp"
#include "homopart/partition.hpp"

namespace homopart::io {

/// Malformed input; `offset` is the byte where parsing stopped.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::string_view format, const std::string& what, std::size_t offset);
  std::size_t offset;
};

// Text formats, one record per LF-terminated line. Readers skip lines starting with '#'.
std::string write_khg(const KPartiteHypergraph& h);
KPartiteHypergraph read_khg(std::string_view text);

std::string write_w3g(const WeightedTripartite& h);
WeightedTripartite read_w3g(std::string_view text);

std::string write_part(const LayeredPartition& p);
LayeredPartition read_part(std::string_view text);

std::string write_links(const LinkTable& table);
LinkTable read_links(std::string_view text);

struct AuditRecord {
  std::vector<PartPartition::Label> labels;
  double density = 0.0;
  bool homogeneous = false;
  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

struct AuditFile {
  std::string kind;  // "unweighted" or "weighted-extension"
  double eps = 0.0;
  bool pass = false;
  double mass = 0.0;  // normalized non-homogeneous mass
  std::vector<AuditRecord> records;
  friend bool operator==(const AuditFile&, const AuditFile&) = default;
};

AuditFile audit_file(const HomogeneityReport& report);
std::string write_audit(const AuditFile& audit);
AuditFile read_audit(std::string_view text);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace homopart::io
