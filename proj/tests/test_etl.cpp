#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "semcloud/errors.hpp"
#include "semcloud/etl.hpp"
#include "semcloud/pipeline_kg/graph.hpp"

using namespace semcloud;
using namespace semcloud::etl;

namespace {

WorkloadSpec small_spec() {
  WorkloadSpec s;
  s.machines = 6;
  s.production_lines = 2;
  s.duration = 12;
  s.attributes = 8;
  return s;
}

UnifiedRecord record(const std::string& machine, double t, std::size_t attrs = 2) {
  UnifiedRecord r;
  r.machine_id = machine;
  r.program_id = "P1";
  r.timestamp = t;
  r.record_bytes = 100;
  for (std::size_t i = 0; i < attrs; ++i) r.values.push_back(t + static_cast<double>(i));
  return r;
}

std::vector<UnifiedRecord> sorted(std::vector<UnifiedRecord> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(EtlGenerator, RecordCountArithmetic) {
  WorkloadSpec s;
  s.machines = 1;
  s.production_lines = 1;
  s.rate = 1;
  s.duration = 10;
  const Workload w = generate_workload(s);
  EXPECT_EQ(w.records.size(), 10u);
  EXPECT_EQ(w.sources.size(), 3u);
}

TEST(EtlGenerator, DeskDefaultsReplicateFactoryShape) {
  WorkloadSpec s;
  s.duration = 2;
  const Workload w = generate_workload(s);
  std::vector<std::string> machines;
  for (const auto& r : w.records) machines.push_back(r.machine_id);
  std::sort(machines.begin(), machines.end());
  machines.erase(std::unique(machines.begin(), machines.end()), machines.end());
  EXPECT_EQ(machines.size(), 45u);
  EXPECT_EQ(w.schema.attributes.size(), 26u);
  EXPECT_EQ(w.records.front().record_bytes, 1250.0);
  EXPECT_EQ(w.reference.size(), 45u * 3);
}

TEST(EtlGenerator, SameSeedSameBytes) {
  const Workload a = generate_workload(small_spec());
  const Workload b = generate_workload(small_spec());
  ASSERT_EQ(a.sources.size(), b.sources.size());
  for (std::size_t k = 0; k < a.sources.size(); ++k) EXPECT_EQ(a.sources[k].content, b.sources[k].content);
  WorkloadSpec other = small_spec();
  other.seed = 2;
  EXPECT_NE(generate_workload(other).sources[0].content, a.sources[0].content);
}

TEST(EtlGenerator, SourcesAreHeterogeneous) {
  const Workload w = generate_workload(small_spec());
  std::set<std::string> machine_fields;
  for (const auto& s : w.sources) {
    s.descriptor.check(w.schema);
    EXPECT_EQ(s.descriptor.absent.size(), 2u);
    for (const auto& [field, property] : s.descriptor.field_mapping) {
      if (property == "machine_id") machine_fields.insert(field);
    }
  }
  EXPECT_EQ(machine_fields.size(), 3u);
  EXPECT_NE(w.sources[0].descriptor.absent, w.sources[1].descriptor.absent);
}

TEST(EtlGenerator, RejectsInvalidSpec) {
  WorkloadSpec s;
  s.machines = 2;
  s.production_lines = 3;
  EXPECT_THROW(generate_workload(s), ConfigError);
}

TEST(EtlIngest, BlankSourcesAreEmpty) {
  for (auto f : {SourceFormat::CSV, SourceFormat::JSON, SourceFormat::XML}) {
    const IngestResult r = ingest(f, "  \n");
    EXPECT_TRUE(r.records.empty());
    EXPECT_TRUE(r.rejects.empty());
  }
}

TEST(EtlIngest, GeneratedSourcesYieldEveryRecord) {
  const Workload w = generate_workload(small_spec());
  for (const auto& s : w.sources) {
    const IngestResult r = ingest(s.descriptor.format, s.content);
    EXPECT_EQ(r.records.size(), w.records.size()) << s.descriptor.name;
    EXPECT_TRUE(r.rejects.empty());
  }
}

TEST(EtlIngest, TruncatedXmlRecordIsRejected) {
  const std::string xml =
      "<records>\n<record><m>M01</m><x>1</x></record>\n<record><m>M02</m><x>2</x></record>\n<record><m>M03</m><x>3";
  const IngestResult r = ingest(SourceFormat::XML, xml);
  EXPECT_EQ(r.records.size(), 2u);
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].index, 2u);
  EXPECT_EQ(r.records[1].at("x"), "2");
}

TEST(EtlIngest, MalformedRecordsGoToRejectChannel) {
  const IngestResult c = ingest(SourceFormat::CSV, "a,b\n1,2\n3\n4,5\n");
  EXPECT_EQ(c.records.size(), 2u);
  ASSERT_EQ(c.rejects.size(), 1u);
  EXPECT_EQ(c.rejects[0].index, 1u);
  const IngestResult j = ingest(SourceFormat::JSON, R"([{"a":1}, 7, {"a":{"b":2}}, {"a":null,"b":"x"}])");
  EXPECT_EQ(j.records.size(), 2u);
  EXPECT_EQ(j.rejects.size(), 2u);
  EXPECT_EQ(j.records[1].count("a"), 0u);
  EXPECT_THROW(ingest(SourceFormat::JSON, "[{"), UnreadableSource);
  EXPECT_THROW(ingest(SourceFormat::JSON, R"({"a":1})"), UnreadableSource);
  EXPECT_THROW(ingest(SourceFormat::XML, "not xml"), UnreadableSource);
}

TEST(EtlMapping, SourcesAgreeModuloDeclaredAbsent) {
  const Workload w = generate_workload(small_spec());
  std::vector<std::string> all_absent;
  std::vector<std::vector<UnifiedRecord>> mapped;
  for (const auto& s : w.sources) {
    const auto raw = ingest(s.descriptor.format, s.content);
    const auto m = map_to_unified(raw.records, s.descriptor, w.schema);
    EXPECT_TRUE(m.rejects.empty());
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      EXPECT_EQ(m.records[i], without(w.records[i], w.schema, s.descriptor.absent));
    }
    all_absent.insert(all_absent.end(), s.descriptor.absent.begin(), s.descriptor.absent.end());
    mapped.push_back(m.records);
  }
  for (auto& records : mapped) {
    for (auto& r : records) r = without(r, w.schema, all_absent);
  }
  EXPECT_EQ(sorted(mapped[0]), sorted(mapped[1]));
  EXPECT_EQ(sorted(mapped[0]), sorted(mapped[2]));
}

TEST(EtlMapping, IdentityMappingKeepsValues) {
  const UnifiedSchema schema{{"current", "voltage"}};
  SourceDescriptor d;
  d.name = "id";
  for (const auto& p : schema.properties()) d.field_mapping[p] = p;
  const std::vector<RawRecord> raw{{{"machine_id", "M1"}, {"program_id", "P1"}, {"timestamp", "2.5"},
                                    {"record_bytes", "10"}, {"current", "7.25"}, {"voltage", "-1e-3"}}};
  const auto m = map_to_unified(raw, d, schema);
  ASSERT_EQ(m.records.size(), 1u);
  EXPECT_EQ(m.records[0].timestamp, 2.5);
  EXPECT_EQ(*m.records[0].values[0], 7.25);
  EXPECT_EQ(*m.records[0].values[1], -1e-3);
}

TEST(EtlMapping, GapsAndRejects) {
  const UnifiedSchema schema{{"current"}};
  SourceDescriptor d;
  d.name = "s";
  for (const auto& p : schema.properties()) d.field_mapping["f_" + p] = p;
  const std::vector<RawRecord> extra{{{"f_machine_id", "M1"}, {"bonus", "1"}}};
  EXPECT_THROW(map_to_unified(extra, d, schema), MappingGap);
  EXPECT_EQ(map_to_unified(extra, d, schema, false).records.size(), 1u);

  const std::vector<RawRecord> bad{{{"f_current", "1"}}, {{"f_machine_id", "M1"}, {"f_current", "abc"}}};
  const auto m = map_to_unified(bad, d, schema);
  EXPECT_TRUE(m.records.empty());
  EXPECT_EQ(m.rejects.size(), 2u);

  SourceDescriptor twice = d;
  twice.field_mapping["g_current"] = "current";
  EXPECT_THROW(twice.check(schema), MappingGap);
  SourceDescriptor uncovered = d;
  uncovered.field_mapping.erase("f_current");
  EXPECT_THROW(uncovered.check(schema), MappingGap);
  uncovered.absent = {"current"};
  EXPECT_NO_THROW(uncovered.check(schema));
  SourceDescriptor keyless = d;
  keyless.field_mapping.erase("f_machine_id");
  keyless.absent = {"machine_id"};
  EXPECT_THROW(keyless.check(schema), MappingGap);
  EXPECT_EQ(parse_descriptor(serialize_descriptor(uncovered)), uncovered);
}

TEST(EtlSlicing, HandPartition) {
  std::vector<UnifiedRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(record(i % 5 < 3 ? "A" : "B", i));  // A: 6, B: 4
  const auto slices = slice_records(rs, 10, 3);
  std::vector<std::size_t> a, b;
  for (const auto& s : slices) (s.machine_id == "A" ? a : b).push_back(s.records.size());
  EXPECT_EQ(a, (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(b, (std::vector<std::size_t>{3, 1}));
}

TEST(EtlSlicing, SingleMachineSingleSlice) {
  std::vector<UnifiedRecord> rs;
  for (int i = 0; i < 7; ++i) rs.push_back(record("A", i));
  const auto slices = slice_records(rs, 7, 7);
  ASSERT_EQ(slices.size(), 1u);
  EXPECT_EQ(slices[0].records, rs);
  EXPECT_THROW(slice_records(rs, 3, 4), InvalidInput);
  EXPECT_THROW(slice_records(rs, 3, 0), InvalidInput);
}

TEST(EtlSlicing, ConservationAndPurity) {
  const Workload w = generate_workload(small_spec());
  for (auto [nc, ns] : {std::pair<std::size_t, std::size_t>{7, 2}, {20, 20}, {100, 3}, {1, 1}}) {
    const auto slices = slice_records(w.records, nc, ns);
    std::vector<UnifiedRecord> all;
    for (const auto& s : slices) {
      EXPECT_LE(s.records.size(), ns);
      for (const auto& r : s.records) {
        EXPECT_EQ(r.machine_id, s.machine_id);
        all.push_back(r);
      }
    }
    EXPECT_EQ(sorted(all), sorted(w.records));
  }
}

TEST(EtlPrepare, KeyedJoin) {
  ReferenceSnapshot snap;
  snap[{"A", "P1"}] = ReferenceRow{2, "type-B", {0.0, 1.0}};
  const ReferenceStore store(snap);
  Slice s{"A", 4, {record("A", 3), record("A", 4)}};
  const PreparedSlice p = prepare_slice(s, store);
  ASSERT_EQ(p.records.size(), 2u);
  EXPECT_EQ(p.seq, 4u);
  EXPECT_EQ(p.records[0].production_line, 2);
  EXPECT_EQ(p.records[0].machine_type, "type-B");
  EXPECT_DOUBLE_EQ(p.records[0].curve_distance, std::sqrt(9.0 + 9.0));
  EXPECT_TRUE(prepare_slice(Slice{"A", 0, {}}, store).records.empty());
  EXPECT_THROW(prepare_slice(Slice{"B", 0, {record("B", 1)}}, store), MissingReference);
  EXPECT_FALSE(store.has_machine("B"));
}

TEST(EtlPrepare, RefreshSwapsWholeSnapshot) {
  ReferenceStore store(ReferenceSnapshot{{{"A", "P1"}, ReferenceRow{1, "old", {}}}});
  const auto before = store.snapshot();
  store.refresh(ReferenceSnapshot{{{"B", "P1"}, ReferenceRow{1, "new", {}}}});
  EXPECT_EQ(before->begin()->second.machine_type, "old");
  EXPECT_TRUE(store.has_machine("B"));
  EXPECT_FALSE(store.has_machine("A"));
  const Workload w = generate_workload(small_spec());
  EXPECT_EQ(parse_reference_csv(format_reference_csv(w.reference)), w.reference);
}

TEST(EtlStore, ReceiptsRoundTripAndCapacity) {
  const Workload w = generate_workload(small_spec());
  const ReferenceStore ref(w.reference);
  const auto slices = slice_records(w.records, 12, 4);
  kg::CloudAttributes cloud;
  cloud.nst = 0.01;  // 10 kB of fast storage at c2 = 0.667
  DataStore store(w.schema, cloud.c2 * cloud.nst);
  EXPECT_EQ(store.capacity_bytes(), 6670u);

  const StoreReceipt empty = store.store(PreparedSlice{"A", 99, {}}, StorageMode::Fast);
  EXPECT_EQ(empty.bytes, 0u);
  EXPECT_EQ(store.read(empty.location).machine_id, "A");

  const PreparedSlice p = prepare_slice(slices[0], ref);
  const StoreReceipt r = store.store(p, StorageMode::Fast);
  EXPECT_EQ(r.bytes, serialize_prepared(p, w.schema).size());
  EXPECT_EQ(r.records, p.records.size());
  EXPECT_EQ(store.read(r.location), p);

  std::size_t stored = r.bytes;
  bool exceeded = false;
  for (std::size_t k = 1; k < slices.size() && !exceeded; ++k) {
    const PreparedSlice q = prepare_slice(slices[k], ref);
    const std::size_t size = serialize_prepared(q, w.schema).size();
    try {
      store.store(q, StorageMode::Fast);
      stored += size;
    } catch (const CapacityExceeded&) {
      exceeded = true;
      EXPECT_GT(stored + size, store.capacity_bytes());
      EXPECT_NO_THROW(store.store(q, StorageMode::Cloud));
    }
  }
  EXPECT_TRUE(exceeded);
  EXPECT_EQ(store.used_bytes(StorageMode::Fast), stored);
}

TEST(EtlSchema, UnifiedCsvRoundTrip) {
  const Workload w = generate_workload(small_spec());
  auto records = w.records;
  records[3].values[1].reset();
  EXPECT_EQ(parse_unified_csv(format_unified_csv(records, w.schema), w.schema), records);
  EXPECT_THROW(parse_unified_csv("a,b\n1,2\n", w.schema), UnreadableSource);
}
