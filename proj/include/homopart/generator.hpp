#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homopart/hypergraph.hpp"
#include "homopart/oracle.hpp"
#include "homopart/partition.hpp"

namespace homopart {

enum class Family { planted_boxes, product, interval_threshold, uniform_random };
const char* to_string(Family family) noexcept;
Family parse_family(const std::string& name);

struct InstanceSpec {
  std::size_t k = 3;
  std::vector<std::size_t> n;  // one size per part
  Family family = Family::planted_boxes;
  std::size_t r = 2;
  double eps_prime = 0.0;  // recorded; planted links are 0-homogeneous
  double density = 0.5;    // uniform-random only
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  KPartiteHypergraph hypergraph;
  /// Ground-truth link partitions; absent for uniform-random.
  std::shared_ptr<const LinkTable> links;
  std::size_t r = 0;
  LinkPartitionOracle oracle() const;
};

GeneratedInstance generate(const InstanceSpec& spec);

/// Each part split into r near-equal blocks after a seeded shuffle.
PartPartition random_blocks(std::size_t part, std::size_t n, std::size_t r, std::uint64_t seed);

struct PlantedBipartite {
  BipartiteGraph graph;
  PartPartition left, right;
};

/// Union of complete boxes over random r-block partitions of both sides (0-homogeneous).
PlantedBipartite planted_bipartite(std::size_t n_left, std::size_t n_right, std::size_t r, std::uint64_t seed);

}  // namespace homopart
