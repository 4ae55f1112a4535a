#include "semcloud/rules/corpus.hpp"

#include "semcloud/errors.hpp"

namespace semcloud::rules {

namespace {

// Values already on the graph (pilot estimates, the previous slicing
// configuration) are bound under a 0 suffix so that they never have to
// agree with the freshly computed ones.
const char* const kCorpus = R"(% graph extraction
rule_0: subgraph1(p,n,v,ms,mp,ssl,spr,sst) <-
    ETLPipeline(p), hasInputData(p,d), hasVolume(d,v), hasNoRecords(d,n),
    hasEstSliceMemory(p,ms), hasEstPrepareMemory(p,mp),
    hasEstSliceStorage(p,ssl), hasEstPrepareStorage(p,spr), hasEstStoreStorage(p,sst).

rule_1: subgraph2(p,n,v,ms,mp,ts,tp,nc,ns,mrs,mrp,mode) <-
    ETLPipeline(p), hasInputData(p,d), hasVolume(d,v), hasNoRecords(d,n),
    hasEstSliceMemory(p,ms), hasEstPrepareMemory(p,mp),
    hasStartTask(p,t0), Retrieve(t0),
    hasNextTask(t0,t1), Slice(t1),
    hasNextTask(t1,t2), Prepare(t2),
    hasNextTask(t2,t3), Store(t3),
    hasChunkSize(t1,nc), hasSliceSize(t1,ns),
    hasRequiredTime(t1,ts), hasRequiredTime(t2,tp),
    hasMemoryReservation(t1,mrs), hasMemoryReservation(t2,mrp),
    hasStorageMode(t3,mode).

cloud: CloudAttributes(c,c1,c2,c3,nm,nst,fs,cs) <-
    Cloud(c), hasMemoryBufferCoefficient(c,c1), hasStorageBufferCoefficient(c,c2),
    hasMaxMemoryBufferCoefficient(c,c3), hasNodeMemory(c,nm), hasNodeStorage(c,nst),
    hasFastStorage(c,fs), hasCloudStorage(c,cs).

% resource estimation
rule_2: estimated_resource(p,ms,mp,ssl,spr,sst) <-
    subgraph1(p,n,v,ms0,mp0,ssl0,spr0,sst0),
    ms = @func_ms(n,v),
    mp = #avg{@func_mp(n,v,ms,i) : range(i)},
    ssl = @func_ssl(n,v),
    spr = #avg{@func_spr(n,v,ssl,i) : range(i)},
    sst = @func_sst(n,v,ssl,spr).

% resource configuration
rule_3_fast_unsliced: configured_resource(p,n,n,fs,mrs,mrp) <-
    subgraph2(p,n,v,ms0,mp0,ts,tp,nc0,ns0,mrs0,mrp0,mode0),
    estimated_resource(p,ms,mp,ssl,spr,sst),
    CloudAttributes(c,c1,c2,c3,nm,nst,fs,cs),
    #max{ms,mp} <= (c1 * nm), #max{ssl,spr,sst} <= (c2 * nst),
    mrs = #min{ms, #max{@func_ss(n,v,n,n), c3*ms}},
    mrp = #min{mp, #max{@func_pn(n,v,n,n), c3*mp}}.

rule_3_fast_sliced: configured_resource(p,nc,ns,fs,mrs,mrp) <-
    subgraph2(p,n,v,ms0,mp0,ts,tp,nc0,ns0,mrs0,mrp0,mode0),
    estimated_resource(p,ms,mp,ssl,spr,sst),
    CloudAttributes(c,c1,c2,c3,nm,nst,fs,cs),
    #max{ms,mp} > (c1 * nm), #max{ssl,spr,sst} <= (c2 * nst),
    nc = @func_fs_1(n,v,ts,tp), ns = @func_fs_2(n,v,ts,tp),
    mrs = #min{ms, #max{@func_ss(n,v,nc,ns), c3*ms}},
    mrp = #min{mp, #max{@func_pn(n,v,nc,ns), c3*mp}}.

rule_3_cloud_unsliced: configured_resource(p,n,n,cs,mrs,mrp) <-
    subgraph2(p,n,v,ms0,mp0,ts,tp,nc0,ns0,mrs0,mrp0,mode0),
    estimated_resource(p,ms,mp,ssl,spr,sst),
    CloudAttributes(c,c1,c2,c3,nm,nst,fs,cs),
    #max{ms,mp} <= (c1 * nm), #max{ssl,spr,sst} > (c2 * nst),
    mrs = #min{ms, #max{@func_ss(n,v,n,n), c3*ms}},
    mrp = #min{mp, #max{@func_pn(n,v,n,n), c3*mp}}.

rule_3_cloud_sliced: configured_resource(p,nc,ns,cs,mrs,mrp) <-
    subgraph2(p,n,v,ms0,mp0,ts,tp,nc0,ns0,mrs0,mrp0,mode0),
    estimated_resource(p,ms,mp,ssl,spr,sst),
    CloudAttributes(c,c1,c2,c3,nm,nst,fs,cs),
    #max{ms,mp} > (c1 * nm), #max{ssl,spr,sst} > (c2 * nst),
    nc = @func_cs_1(n,v,ts,tp), ns = @func_cs_2(n,v,ts,tp),
    mrs = #min{ms, #max{@func_ss(n,v,nc,ns), c3*ms}},
    mrp = #min{mp, #max{@func_pn(n,v,nc,ns), c3*mp}}.
)";

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::FastUnsliced: return "fast_unsliced";
    case Strategy::FastSliced: return "fast_sliced";
    case Strategy::CloudUnsliced: return "cloud_unsliced";
    case Strategy::CloudSliced: return "cloud_sliced";
  }
  return "?";
}

std::string_view rule_label(Strategy s) {
  switch (s) {
    case Strategy::FastUnsliced: return "rule_3_fast_unsliced";
    case Strategy::FastSliced: return "rule_3_fast_sliced";
    case Strategy::CloudUnsliced: return "rule_3_cloud_unsliced";
    case Strategy::CloudSliced: return "rule_3_cloud_sliced";
  }
  return "?";
}

std::optional<Strategy> strategy_of_label(std::string_view label) {
  for (Strategy s : kStrategies) {
    if (rule_label(s) == label) return s;
  }
  return std::nullopt;
}

const std::string& corpus_text() {
  static const std::string text(kCorpus);
  return text;
}

const datalog::Program& corpus() {
  static const datalog::Program program = datalog::parse_program(corpus_text());
  return program;
}

datalog::FactSet range_facts(int count) {
  if (count < 1) throw InvalidInput("range needs at least one element, got " + std::to_string(count));
  datalog::FactSet facts;
  for (int i = 1; i <= count; ++i) facts.insert("range", {datalog::Value::number(i)});
  return facts;
}

}  // namespace semcloud::rules
