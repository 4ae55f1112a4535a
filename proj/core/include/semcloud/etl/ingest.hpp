#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "semcloud/etl/schema.hpp"

namespace semcloud::etl {

/// Field name -> text value; null or empty fields are omitted.
using RawRecord = std::map<std::string, std::string>;

struct Reject {
  std::size_t index = 0;  // position of the record in its source
  std::string reason;

  friend bool operator==(const Reject&, const Reject&) = default;
};

struct IngestResult {
  std::vector<RawRecord> records;
  std::vector<Reject> rejects;
};

/// CSV with header row; JSON array of flat objects; XML
/// <records><record><field>value</field>...</record></records>.
/// Malformed records are rejected; a source whose outer structure cannot be
/// read throws UnreadableSource. Blank input yields nothing.
IngestResult ingest(SourceFormat format, std::string_view text);
IngestResult ingest_file(const SourceDescriptor& source);

/// Writers used by the generator; numbers in shortest round-trip form.
std::string write_source(SourceFormat format, const std::vector<std::string>& fields,
                         const std::vector<RawRecord>& records);

}  // namespace semcloud::etl
