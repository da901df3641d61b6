#include <doctest.h>

#include <algorithm>

#include "eovsim/chaincode.hpp"

using namespace eovsim;

TEST_CASE("key formatting keeps lexicographic and numeric order aligned") {
  CHECK(make_key("prof", 17) == "prof-000017");
  for (size_t i = 1; i < 2000; i += 37)
    CHECK(make_key("s", i - 1) < make_key("s", i));

  // fresh keys must sort before every base key of the same space
  CHECK(fresh_key("gen", 0) < make_key("gen", 0));
  CHECK(fresh_key("gen", 999999) < make_key("gen", 0));
  for (uint64_t c = 1; c < 100; ++c) CHECK(fresh_key("gen", c - 1) < fresh_key("gen", c));
}

TEST_CASE("application profiles expose their documented shapes") {
  auto ehr = builtin_chaincode("EHR");
  CHECK(ehr.spaces.size() == 2);
  CHECK(ehr.space("prof")->count == 100);
  CHECK(ehr.space("ehr")->count == 100);
  CHECK(ehr.invocable_functions().size() == 9);  // initLedger excluded
  const auto* add = ehr.find("addEhr");
  REQUIRE(add);
  CHECK(add->ops.size() == 4);  // 2 reads + 2 writes
  CHECK_FALSE(add->has_range());
  CHECK(ehr.find("initLedger")->invocable == false);
  CHECK(ehr.find("readProfile")->ops.size() == 1);

  auto dv = builtin_chaincode("DV");
  CHECK(dv.space("voter")->count == 1000);
  CHECK(dv.space("party")->count == 12);
  const auto* vote = dv.find("vote");
  REQUIRE(vote);
  CHECK(vote->has_range());
  int ranges = 0;
  for (const auto& op : vote->ops) ranges += op.kind == OpKind::kRange ? 1 : 0;
  CHECK(ranges == 2);

  auto scm = builtin_chaincode("SCM");
  CHECK(scm.space("asn")->count == 0);  // populated only by fresh inserts
  REQUIRE(scm.find("pushASN"));
  CHECK(scm.find("pushASN")->slots[0].mode == SlotMode::kFresh);
  CHECK(scm.find("queryStock")->ops[0].range.phantom_detected == false);
  CHECK(scm.find("queryASN")->ops[0].range.phantom_detected == true);
  CHECK(scm.find("Ship")->slots[0].spaces.size() == 5);  // any LSP unit space

  auto drm = builtin_chaincode("DRM");
  CHECK(drm.find("calcRevenue")->ops[0].range.phantom_detected == false);
  CHECK(drm.find("create")->slots[1].mode == SlotMode::kFresh);

  CHECK_THROWS_AS(builtin_chaincode("nope"), std::invalid_argument);
}

TEST_CASE("synthetic profile covers every op kind over one space") {
  auto p = genchain_profile(1000);
  CHECK(p.space("gen")->count == 1000);
  CHECK(p.space("del")->count == 500);
  for (const char* name : {"read", "insert", "update", "delete", "range"})
    CHECK(p.find(name) != nullptr);
  CHECK(p.find("insert")->slots[0].mode == SlotMode::kFresh);
  CHECK(p.find("delete")->slots[0].mode == SlotMode::kDeletePool);
  CHECK(p.find("delete")->ops[0].kind == OpKind::kDelete);
  CHECK(p.find("range")->ops[0].range.widths == std::vector<uint32_t>{2, 4, 8});
  CHECK_THROWS_AS(genchain_profile(0), std::invalid_argument);
}

TEST_CASE("custom profiles reject empty specs") {
  CHECK_THROWS_WITH_AS(gen_chaincode({}, 100), doctest::Contains("EMPTY_SPEC"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(gen_chaincode({{"noop", FunctionSpec{}}}, 100),
                       doctest::Contains("EMPTY_SPEC"), std::invalid_argument);

  auto p = gen_chaincode({{"rmw", FunctionSpec{2, 2, 0, 0, 0}},
                          {"scan", FunctionSpec{0, 0, 0, 0, 1}}},
                         100);
  CHECK(p.find("rmw")->ops.size() == 4);
  CHECK(p.find("rmw")->slots.size() == 2);  // reads and writes share slots
  CHECK(p.find("scan")->has_range());
}

TEST_CASE("byte size model counts header, reads, writes and range rows") {
  SizeModel m;
  Transaction tx;
  Endorsement e;
  e.read_set = {{"a", 1}};
  e.write_set = {{"a", "v", false}};
  tx.endorsements = {e};
  CHECK(tx_byte_size(tx, m) == 448);  // 256 + 64 + 128

  e.read_set = {{"a", 1}, {"b", 1}};
  e.write_set = {{"a", "v", false}, {"b", "v", false}};
  tx.endorsements = {e};
  CHECK(tx_byte_size(tx, m) == 640);

  Endorsement scan;
  RangeRead rr;
  rr.observed = {{"a", 1}, {"b", 1}, {"c", 1}};
  scan.range_reads = {rr};
  tx.endorsements = {scan};
  CHECK(tx_byte_size(tx, m) == 448);  // 256 + 3 * 64

  // only the first endorsement counts
  tx.endorsements = {scan, e};
  CHECK(tx_byte_size(tx, m) == 448);

  tx.endorsements.clear();
  CHECK_THROWS_AS(tx_byte_size(tx, m), std::invalid_argument);
}
