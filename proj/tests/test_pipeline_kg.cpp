#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "semcloud/datalog.hpp"
#include "semcloud/errors.hpp"
#include "semcloud/pipeline_kg.hpp"

using namespace semcloud;
using namespace semcloud::kg;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PipelineGraph two_prepare_pipeline() { return load_pipeline(SEMCLOUD_DATA_DIR "/pipelines/p1.json"); }

PipelineGraph minimal_infrequent() {
  return parse_pipeline(R"({
    "format": "semcloud-pipeline/1",
    "ETLPipeline": {"id": "q", "hasFrequency": "infrequent", "hasStartTask": "a", "hasInputData": ["x"]},
    "Task": [
      {"id": "a", "type": "Retrieve", "hasIO": "ia", "hasNextTask": ["b"]},
      {"id": "b", "type": "Prepare", "hasNextTask": ["c"]},
      {"id": "c", "type": "Store"}
    ],
    "IOHandler": [{"id": "ia", "hasOutput": ["x"]}],
    "DataEntity": [{"id": "x", "hasVolume": 1, "hasNoRecords": 10}]
  })");
}

PilotRunRecord pilot_for(const std::string& p) {
  PilotRunRecord r;
  r.p = p;
  r.n = 1000;
  r.v = 2;
  r.nc = 1000;
  r.ns = 1000;
  r.ts = 3;
  r.tp = 5;
  r.ms = 100;
  r.mp = 80;
  r.ssl = 10;
  r.spr = 12;
  r.sst = 14;
  r.mrs = 120;
  r.mrp = 90;
  r.total_time = 9;
  return r;
}

}  // namespace

TEST(PipelineParse, TwoPrepareDocument) {
  const PipelineGraph g = two_prepare_pipeline();
  EXPECT_EQ(g.id, "p1");
  EXPECT_EQ(g.tasks.size(), 5u);
  EXPECT_GE(g.data_entities.size(), 3u);
  EXPECT_EQ(g.layers.size(), 4u);
  EXPECT_EQ(g.frequency, FrequencyClass::Frequent);
  EXPECT_EQ(g.depends_on, "p0");
  EXPECT_TRUE(validate(g).ok());
}

TEST(PipelineParse, NodeEdgeMultisetMatchesDocument) {
  const std::string text = read_text(SEMCLOUD_DATA_DIR "/pipelines/p1.json");
  auto doc = parse_document_triples(text);
  auto built = to_triples(two_prepare_pipeline());
  // hasFrequency is declared in the document, so both sides carry it.
  std::sort(doc.begin(), doc.end());
  std::sort(built.begin(), built.end());
  EXPECT_EQ(doc, built);
}

TEST(PipelineParse, MinimalInfrequent) {
  const PipelineGraph g = minimal_infrequent();
  EXPECT_EQ(g.tasks.size(), 3u);
  EXPECT_EQ(g.frequency, FrequencyClass::Infrequent);
}

TEST(PipelineParse, StoreBeforePrepareIsStructureError) {
  EXPECT_THROW(parse_pipeline(R"({
    "format": "semcloud-pipeline/1",
    "ETLPipeline": {"id": "q", "hasFrequency": "infrequent", "hasStartTask": "a", "hasInputData": ["x"]},
    "Task": [
      {"id": "a", "type": "Retrieve", "hasIO": "ia", "hasNextTask": ["c"]},
      {"id": "c", "type": "Store", "hasNextTask": ["b"]},
      {"id": "b", "type": "Prepare"}
    ],
    "IOHandler": [{"id": "ia", "hasOutput": ["x"]}],
    "DataEntity": [{"id": "x"}]
  })"),
               StructureError);
}

TEST(PipelineParse, SliceInInfrequentIsStructureError) {
  EXPECT_THROW(parse_pipeline(R"({
    "format": "semcloud-pipeline/1",
    "ETLPipeline": {"id": "q", "hasFrequency": "infrequent", "hasStartTask": "a", "hasInputData": ["x"]},
    "Task": [
      {"id": "a", "type": "Retrieve", "hasIO": "ia", "hasNextTask": ["s"]},
      {"id": "s", "type": "Slice", "hasNextTask": ["b"]},
      {"id": "b", "type": "Prepare", "hasNextTask": ["c"]},
      {"id": "c", "type": "Store"}
    ],
    "IOHandler": [{"id": "ia", "hasOutput": ["x"]}],
    "DataEntity": [{"id": "x"}]
  })"),
               StructureError);
}

TEST(PipelineParse, CycleIsCycleError) {
  EXPECT_THROW(parse_pipeline(R"({
    "format": "semcloud-pipeline/1",
    "ETLPipeline": {"id": "q", "hasFrequency": "infrequent", "hasStartTask": "a", "hasInputData": ["x"]},
    "Task": [
      {"id": "a", "type": "Retrieve", "hasIO": "ia", "hasNextTask": ["b"]},
      {"id": "b", "type": "Prepare", "hasNextTask": ["b2"]},
      {"id": "b2", "type": "Prepare", "hasNextTask": ["b", "c"]},
      {"id": "c", "type": "Store"}
    ],
    "IOHandler": [{"id": "ia", "hasOutput": ["x"]}],
    "DataEntity": [{"id": "x"}]
  })"),
               CycleError);
}

TEST(PipelineParse, UnknownVocabularyIsSchemaError) {
  EXPECT_THROW(parse_pipeline(R"({"format": "semcloud-pipeline/1", "Widget": []})"), SchemaError);
  EXPECT_THROW(parse_pipeline(R"({"format": "semcloud-pipeline/1",
    "ETLPipeline": {"id": "q", "hasColour": "red"}})"),
               SchemaError);
  EXPECT_THROW(parse_pipeline(R"({"format": "semcloud-pipeline/9", "ETLPipeline": {"id": "q"}})"), SchemaError);
  EXPECT_THROW(parse_pipeline("not json"), SchemaError);
}

TEST(PipelineParse, TripleFormEquivalent) {
  const PipelineGraph g = two_prepare_pipeline();
  EXPECT_EQ(parse_pipeline(serialize_pipeline_triples(g)), g);
}

TEST(PipelineParse, SerializeParseIdentity) {
  const PipelineGraph g = two_prepare_pipeline();
  EXPECT_EQ(parse_pipeline(serialize_pipeline(g)), g);
  EXPECT_EQ(parse_pipeline(serialize_pipeline(minimal_infrequent())), minimal_infrequent());
  const auto configured = apply_configuration(g, {"p1", 1000, 100, StorageMode::Fast, 512, 256});
  EXPECT_EQ(parse_pipeline(serialize_pipeline(configured)), configured);
}

TEST(PipelineValidate, ValidGraphHasEmptyReport) { EXPECT_TRUE(validate(two_prepare_pipeline()).violations.empty()); }

TEST(PipelineValidate, TwoRetrieveRoots) {
  PipelineGraph g = two_prepare_pipeline();
  TaskNode extra;
  extra.id = "t0";
  extra.kind = TaskKind::Retrieve;
  extra.next = {"t2"};
  g.tasks.push_back(extra);
  const auto report = validate(g);
  ASSERT_EQ(report.violations.size(), 1u) << report.to_string();
  EXPECT_EQ(report.violations[0].rule, "single-root");
  EXPECT_EQ(report.violations[0].nodes, (std::vector<std::string>{"t1", "t0"}));
}

TEST(PipelineValidate, RecordsWithoutVolume) {
  PipelineGraph g = two_prepare_pipeline();
  g.data_entities[0].volume = 0.0;
  const auto report = validate(g);
  ASSERT_EQ(report.violations.size(), 1u) << report.to_string();
  EXPECT_EQ(report.violations[0].rule, "volume");
  EXPECT_EQ(report.violations[0].nodes, (std::vector<std::string>{"d1"}));
}

TEST(PipelineValidate, KindFieldsAndValues) {
  PipelineGraph g = two_prepare_pipeline();
  g.task("t5")->chunk_size = 10;
  g.task("t2")->chunk_size = 10;
  g.task("t2")->slice_size = 20;
  g.task("t3")->memory_reservation = 0;
  const auto report = validate(g);
  EXPECT_TRUE(report.has("kind-fields"));
  EXPECT_TRUE(report.has("slice-size"));
  EXPECT_TRUE(report.has("reservation"));
  EXPECT_EQ(report.violations.size(), 3u) << report.to_string();
}

TEST(PipelineValidate, ConsumerMustFollowProducer) {
  PipelineGraph g = two_prepare_pipeline();
  for (auto& h : g.io_handlers) {
    if (h.id == "io5") h.inputs.push_back("d1");
  }
  const auto report = validate(g);
  ASSERT_EQ(report.violations.size(), 1u) << report.to_string();
  EXPECT_EQ(report.violations[0].rule, "consumer");
}

TEST(PipelineFacts, TwoPreparePipelineContainsRuleAtoms) {
  const auto facts = to_facts(two_prepare_pipeline(), CloudAttributes{});
  using datalog::Value;
  EXPECT_TRUE(facts.contains("ETLPipeline", {Value::symbol("p1")}));
  EXPECT_TRUE(facts.contains("hasInputData", {Value::symbol("p1"), Value::symbol("d1")}));
  EXPECT_TRUE(facts.contains("hasNoRecords", {Value::symbol("d1"), Value::number(116640)}));
  EXPECT_TRUE(facts.contains("Slice", {Value::symbol("t2")}));
  EXPECT_TRUE(facts.contains("Cloud", {Value::symbol("c")}));
  EXPECT_TRUE(facts.contains("hasNodeStorage", {Value::symbol("c"), Value::number(20480)}));
}

TEST(PipelineFacts, EmptyOptionalFieldsEmitNothing) {
  const auto facts = to_facts(two_prepare_pipeline(), CloudAttributes{});
  EXPECT_TRUE(datalog::query(facts, "hasChunkSize", 2).empty());
  EXPECT_TRUE(datalog::query(facts, "hasStorageMode", 2).empty());
  EXPECT_TRUE(datalog::query(facts, "hasEstSliceMemory", 2).empty());
  // d2..d5 carry no volume.
  EXPECT_EQ(datalog::query(facts, "hasVolume", 2).size(), 1u);
}

TEST(PipelineFacts, PilotFillsOnlyGaps) {
  PipelineGraph g = two_prepare_pipeline();
  g.task("t2")->chunk_size = 5000;
  const auto facts = to_facts(g, CloudAttributes{}, pilot_for("p1"));
  using datalog::Value;
  EXPECT_EQ(datalog::query(facts, "hasChunkSize", 2),
            (std::vector<datalog::Tuple>{{Value::symbol("t2"), Value::number(5000)}}));
  EXPECT_TRUE(facts.contains("hasSliceSize", {Value::symbol("t2"), Value::number(1000)}));
  EXPECT_TRUE(facts.contains("hasEstSliceMemory", {Value::symbol("p1"), Value::number(100)}));
  EXPECT_TRUE(facts.contains("hasNoRecords", {Value::symbol("d1"), Value::number(116640)}));
}

TEST(PipelineFacts, RoundTripOnConfiguredFields) {
  const auto g = apply_configuration(two_prepare_pipeline(), {"p1", 1000, 100, StorageMode::Cloud, 512, 256});
  const auto facts = to_facts(g, CloudAttributes{});
  EXPECT_EQ(from_facts(facts, "p1"), canonical(g));
  EXPECT_EQ(from_facts(to_facts(minimal_infrequent(), CloudAttributes{}), "q"), canonical(minimal_infrequent()));
  EXPECT_EQ(pipelines_in(facts), (std::vector<std::string>{"p1"}));
}

TEST(PipelineFacts, DistinctGraphsGiveDistinctFacts) {
  const PipelineGraph a = two_prepare_pipeline();
  PipelineGraph b = a;
  b.data_entities[0].volume = 146.0;
  PipelineGraph c = a;
  c.task("t3")->next.clear();
  c.task("t3")->next = {"t5"};
  c.layers[2].tasks = {"t4", "t3"};  // same sets, different order
  EXPECT_NE(to_facts(a, {}), to_facts(b, {}));
  EXPECT_EQ(to_facts(a, {}), to_facts(c, {}));
}

TEST(PipelineFacts, InvalidGraphRejected) {
  PipelineGraph g = two_prepare_pipeline();
  g.data_entities[0].volume = 0.0;
  EXPECT_THROW(to_facts(g, {}), InvalidGraph);
}

TEST(PipelineConfigure, WritesFields) {
  const auto g = apply_configuration(two_prepare_pipeline(), {"p1", 1000, 100, StorageMode::Fast, 512, 256});
  EXPECT_EQ(g.task("t2")->chunk_size, 1000);
  EXPECT_EQ(g.task("t2")->slice_size, 100);
  EXPECT_EQ(g.task("t2")->memory_reservation, 512);
  EXPECT_EQ(g.task("t3")->memory_reservation, 256);
  EXPECT_EQ(g.task("t4")->memory_reservation, 256);
  EXPECT_EQ(g.task("t5")->storage_mode, StorageMode::Fast);
  EXPECT_TRUE(validate(g).ok());
}

TEST(PipelineConfigure, Idempotent) {
  const ResourceConfiguration cfg{"p1", 1000, 100, StorageMode::Fast, 512, 256};
  const auto once = apply_configuration(two_prepare_pipeline(), cfg);
  EXPECT_EQ(apply_configuration(once, cfg), once);
}

TEST(PipelineConfigure, Errors) {
  EXPECT_THROW(apply_configuration(two_prepare_pipeline(), {"p9", 1, 1, StorageMode::Fast, 1, 1}), InvalidGraph);
  PipelineGraph g = two_prepare_pipeline();
  std::erase_if(g.tasks, [](const TaskNode& t) { return t.kind == TaskKind::Slice; });
  EXPECT_THROW(apply_configuration(g, {"p1", 1, 1, StorageMode::Fast, 1, 1}), MissingTask);
}
