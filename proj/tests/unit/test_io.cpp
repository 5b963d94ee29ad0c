#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <memory>
#include <vector>

#include "homopart/generator.hpp"
#include "homopart/io.hpp"
#include "homopart/manifest.hpp"
#include "homopart/rng.hpp"

using namespace homopart;

TEST(Io, KhgRoundTrip) {
  auto inst = generate({3, {5, 6, 7}, Family::uniform_random, 2, 0.0, 0.3, 1});
  const std::string text = io::write_khg(inst.hypergraph);
  EXPECT_EQ(io::read_khg(text), inst.hypergraph);
  EXPECT_EQ(io::write_khg(io::read_khg(text)), text);
}

TEST(Io, W3gRoundTripIsExact) {
  WeightedTripartite w(3, 2, 2);
  rng::Stream st(3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c) w.set_weight(a, b, c, st.next_below(3) ? st.next_unit() : 0.0);
  w.set_weight(0, 0, 0, 1.0 / 3.0);
  EXPECT_EQ(io::read_w3g(io::write_w3g(w)), w);
}

TEST(Io, PartAndLinksRoundTrip) {
  LayeredPartition p({PartPartition(0, {0, 1, 1, 2}), PartPartition::intervals(1, 4, 2),
                      PartPartition::singletons(2, 3)});
  EXPECT_EQ(io::read_part(io::write_part(p)), p);
  auto inst = generate({3, {6, 6, 6}, Family::planted_boxes, 2, 0.0, 0.5, 2});
  EXPECT_EQ(io::read_links(io::write_links(*inst.links)), *inst.links);
}

TEST(Io, AuditRoundTrip) {
  io::AuditFile a{"unweighted", 0.2, false, 0.125, {{{1, 2, 1}, 0.5, false}, {{2, 2, 2}, 1.0, true}}};
  EXPECT_EQ(io::read_audit(io::write_audit(a)), a);
}

TEST(Io, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(io::format_double(0.1), "0.1");
  for (double x : {1.0 / 3.0, 1e-300, std::numeric_limits<double>::min(), 0.1 + 0.2})
    EXPECT_EQ(std::stod(io::format_double(x)), x);
}

TEST(Io, CommentLinesAreSkipped) {
  auto h = io::read_khg("# header\nkhg 3 2 2 2\n0 1 1\n# manifest abc\n");
  EXPECT_EQ(h.edge_count(), 1u);
  EXPECT_EQ(io::read_khg(stamp("khg 3 2 2 2\n0 1 1\n", "deadbeef")), h);
}

TEST(Io, ParseErrorsReportByteOffsets) {
  try {
    io::read_khg("khg 3 2 2 2\n0 1 x\n");
    FAIL();
  } catch (const io::ParseError& e) {
    EXPECT_EQ(e.offset, 16u);
    EXPECT_NE(std::string(e.what()).find("at byte 16"), std::string::npos);
  }
  EXPECT_THROW(io::read_khg("khg 3 2 2 2\n0 1 2\n"), io::ParseError);
  EXPECT_THROW(io::read_khg("khg 3 2 2 2\n0 1 1"), io::ParseError);
  EXPECT_THROW(io::read_khg(""), io::ParseError);
  EXPECT_THROW(io::read_w3g("w3g 1 1 1\n0 0 0 1.5\n"), io::ParseError);
  EXPECT_THROW(io::read_part("part 2\n1 1\n"), io::ParseError);
  EXPECT_THROW(io::read_audit("audit unweighted 0.2 maybe 0\n"), io::ParseError);
}

TEST(Manifest, DigestCoversInputsNotTiming) {
  RunManifest a;
  a.command = "gen";
  a.parameters = {{"n", 60}};
  a.mode = "practical";
  a.seed = 3;
  RunManifest b = a;
  b.timing_ms = 123.0;
  b.results = {{"edges", 5}};
  b.outputs["x.khg"] = "ff";
  EXPECT_EQ(a.digest(), b.digest());
  b.seed = 4;
  EXPECT_NE(a.digest(), b.digest());
  RunManifest c = a;
  c.inputs["in.khg"] = sha256_hex("abc");
  EXPECT_NE(a.digest(), c.digest());
  EXPECT_EQ(a.to_json()["digest"], a.digest());
  EXPECT_EQ(a.to_json()["version"], kToolkitVersion);
}

TEST(Manifest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, AtomicWriteReplacesFile) {
  const auto dir = std::filesystem::temp_directory_path() / "homopart_io_test";
  std::filesystem::create_directories(dir);
  write_atomic(dir / "f.txt", "one");
  write_atomic(dir / "f.txt", "two");
  EXPECT_EQ(read_file(dir / "f.txt"), "two");
  EXPECT_THROW(read_file(dir / "missing.txt"), std::exception);
  std::filesystem::remove_all(dir);
}
