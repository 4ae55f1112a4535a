#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semcloud::etl {

enum class SourceFormat { CSV, JSON, XML };

std::string_view to_string(SourceFormat format);
/// "csv", "json", "xml" (case-insensitive); throws ConfigError.
SourceFormat parse_source_format(std::string_view text);

/// Key properties every unified record carries, in canonical order.
inline const std::vector<std::string>& key_properties() {
  static const std::vector<std::string> keys{"machine_id", "program_id", "timestamp", "record_bytes"};
  return keys;
}

/// Payload attribute names of the unified model.
struct UnifiedSchema {
  std::vector<std::string> attributes;

  /// The first `count` names of a fixed welding vocabulary (26 by default).
  static UnifiedSchema desk(std::size_t count = 26);

  std::optional<std::size_t> index(std::string_view attribute) const;
  bool has_property(std::string_view name) const;
  /// Keys followed by attributes.
  std::vector<std::string> properties() const;

  friend bool operator==(const UnifiedSchema&, const UnifiedSchema&) = default;
};

struct UnifiedRecord {
  std::string machine_id;
  std::string program_id;
  double timestamp = 0;
  double record_bytes = 0;
  std::vector<std::optional<double>> values;  // aligned with UnifiedSchema::attributes

  friend bool operator==(const UnifiedRecord&, const UnifiedRecord&) = default;
  friend auto operator<=>(const UnifiedRecord&, const UnifiedRecord&) = default;
};

/// Copy with the listed attributes set to null.
UnifiedRecord without(const UnifiedRecord& record, const UnifiedSchema& schema, const std::vector<std::string>& attributes);

struct SourceDescriptor {
  std::string name;
  SourceFormat format = SourceFormat::CSV;
  std::map<std::string, std::string> field_mapping;  // source field -> unified property
  std::vector<std::string> absent;                  // unified properties the source lacks
  std::string location;

  /// Throws MappingGap unless the mapping is injective, targets only schema
  /// properties, and covers every property not declared absent. Keys may
  /// not be declared absent.
  void check(const UnifiedSchema& schema) const;

  friend bool operator==(const SourceDescriptor&, const SourceDescriptor&) = default;
};

std::string serialize_descriptor(const SourceDescriptor& descriptor);
/// Throws SchemaError.
SourceDescriptor parse_descriptor(std::string_view text);

/// Canonical delimited form (header = UnifiedSchema::properties(), nulls
/// empty) and back. Throws UnreadableSource.
std::string format_unified_csv(const std::vector<UnifiedRecord>& records, const UnifiedSchema& schema);
std::vector<UnifiedRecord> parse_unified_csv(std::string_view text, const UnifiedSchema& schema);

}  // namespace semcloud::etl
