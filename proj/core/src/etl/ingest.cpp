#include "semcloud/etl/ingest.hpp"

#include <expat.h>

#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::etl {

namespace {

bool blank(std::string_view text) { return text.find_first_not_of(" \t\r\n") == std::string_view::npos; }

IngestResult ingest_csv(std::string_view text) {
  IngestResult out;
  const csv::Table t = csv::parse(text);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.size() != t.header.size()) {
      out.rejects.push_back({i, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                    std::to_string(row.size())});
      continue;
    }
    RawRecord r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].empty()) r[t.header[c]] = row[c];
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

IngestResult ingest_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw UnreadableSource(std::string("JSON source: ") + e.what());
  }
  if (!doc.is_array()) throw UnreadableSource("JSON source must be an array of records");
  IngestResult out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    if (!item.is_object()) {
      out.rejects.push_back({i, "record is not an object"});
      continue;
    }
    RawRecord r;
    std::string problem;
    for (const auto& [key, value] : item.items()) {
      if (value.is_null()) continue;
      if (value.is_string()) r[key] = value.get<std::string>();
      else if (value.is_number()) r[key] = csv::number(value.get<double>());
      else if (value.is_boolean()) r[key] = value.get<bool>() ? "true" : "false";
      else problem = "field '" + key + "' is not a scalar";
    }
    if (!problem.empty()) {
      out.rejects.push_back({i, problem});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

struct XmlState {
  int depth = 0;
  bool in_record = false;
  bool record_bad = false;
  std::string bad_reason;
  std::size_t index = 0;  // records started so far
  RawRecord current;
  std::string field;
  std::string text;
  IngestResult out;
};

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char**) {
  auto& s = *static_cast<XmlState*>(data);
  ++s.depth;
  if (s.depth == 2) {
    s.in_record = true;
    s.record_bad = false;
    s.current.clear();
  } else if (s.depth == 3) {
    s.field = name;
    s.text.clear();
  } else if (s.depth > 3 && !s.record_bad) {
    s.record_bad = true;
    s.bad_reason = "field '" + s.field + "' has nested elements";
  }
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto& s = *static_cast<XmlState*>(data);
  if (s.depth == 3) {
    std::string value = s.text;
    const auto first = value.find_first_not_of(" \t\r\n");
    const auto last = value.find_last_not_of(" \t\r\n");
    value = first == std::string::npos ? std::string{} : value.substr(first, last - first + 1);
    if (!value.empty()) s.current[s.field] = value;
  } else if (s.depth == 2) {
    if (s.record_bad) s.out.rejects.push_back({s.index, s.bad_reason});
    else s.out.records.push_back(std::move(s.current));
    s.current.clear();
    s.in_record = false;
    ++s.index;
  }
  --s.depth;
}

void XMLCALL on_text(void* data, const XML_Char* text, int len) {
  auto& s = *static_cast<XmlState*>(data);
  if (s.depth == 3) s.text.append(text, static_cast<std::size_t>(len));
}

IngestResult ingest_xml(std::string_view text) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw UnreadableSource("cannot create XML parser");
  XmlState state;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  const auto status = XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), 1);
  if (status == XML_STATUS_ERROR) {
    const std::string where = std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
                              std::to_string(XML_GetCurrentLineNumber(parser.get()));
    if (state.in_record) {
      state.out.rejects.push_back({state.index, "malformed record: " + where});
    } else if (state.depth > 0 || state.index > 0) {
      // Error between records or at the closing root tag: keep what was read.
    } else {
      throw UnreadableSource("XML source: " + where);
    }
  }
  return std::move(state.out);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

IngestResult ingest(SourceFormat format, std::string_view text) {
  if (blank(text)) return {};
  switch (format) {
    case SourceFormat::CSV: return ingest_csv(text);
    case SourceFormat::JSON: return ingest_json(text);
    case SourceFormat::XML: return ingest_xml(text);
  }
  throw UnreadableSource("unknown format");
}

IngestResult ingest_file(const SourceDescriptor& source) {
  std::ifstream in(source.location, std::ios::binary);
  if (!in) throw UnreadableSource("cannot open source " + source.location);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ingest(source.format, buffer.str());
}

std::string write_source(SourceFormat format, const std::vector<std::string>& fields,
                         const std::vector<RawRecord>& records) {
  switch (format) {
    case SourceFormat::CSV: {
      csv::Table t;
      t.header = fields;
      for (const auto& r : records) {
        csv::Row row;
        for (const auto& f : fields) {
          auto it = r.find(f);
          row.push_back(it == r.end() ? std::string{} : it->second);
        }
        t.rows.push_back(std::move(row));
      }
      return csv::format(t);
    }
    case SourceFormat::JSON: {
      nlohmann::ordered_json doc = nlohmann::ordered_json::array();
      for (const auto& r : records) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& f : fields) {
          auto it = r.find(f);
          if (it == r.end()) continue;
          // Numbers stay numbers; everything else is a string.
          try {
            j[f] = csv::to_number(it->second);
          } catch (const UnreadableSource&) {
            j[f] = it->second;
          }
        }
        doc.push_back(std::move(j));
      }
      return doc.dump(1) + "\n";
    }
    case SourceFormat::XML: {
      std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<records>\n";
      for (const auto& r : records) {
        out += "  <record>\n";
        for (const auto& f : fields) {
          auto it = r.find(f);
          if (it == r.end()) continue;
          out += "    <" + f + ">" + xml_escape(it->second) + "</" + f + ">\n";
        }
        out += "  </record>\n";
      }
      out += "</records>\n";
      return out;
    }
  }
  return {};
}

}  // namespace semcloud::etl
