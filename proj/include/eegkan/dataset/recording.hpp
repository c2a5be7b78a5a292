#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eegkan/error.hpp"
#include "eegkan/text.hpp"

namespace eegkan::dataset {

enum class Label { AD, HC };
enum class Gender { M, F, unknown };

inline const char* to_string(Label l) { return l == Label::AD ? "AD" : "HC"; }

inline const char* to_string(Gender g) {
  switch (g) {
    case Gender::M: return "M";
    case Gender::F: return "F";
    default: return "unknown";
  }
}

/// Parses a subject label. FTD subjects are not part of the AD-vs-healthy
/// study and are rejected with a pointer to the manifest exclusion flag.
inline Label parse_label(std::string_view s) {
  if (s == "AD") return Label::AD;
  if (s == "HC") return Label::HC;
  if (s == "FTD")
    throw ParseError("label FTD is not accepted; exclude frontotemporal dementia subjects "
                     "(set excluded=true in the manifest)");
  throw ParseError("unknown label '" + std::string(s) + "' (expected AD or HC)");
}

inline Gender parse_gender(std::string_view s) {
  if (s == "M") return Gender::M;
  if (s == "F") return Gender::F;
  if (s == "unknown" || s.empty()) return Gender::unknown;
  throw ParseError("unknown gender '" + std::string(s) + "' (expected M, F or unknown)");
}

struct Channel {
  std::string name;
  std::vector<double> samples;  // microvolts

  bool operator==(const Channel&) const = default;
};

/// One subject's multichannel recording.
struct Recording {
  std::string subject_id;
  Label label = Label::HC;
  Gender gender = Gender::unknown;
  std::optional<double> age;
  double sample_rate_hz = 0;
  std::vector<Channel> channels;

  std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().samples.size(); }

  std::vector<std::string> channel_names() const {
    std::vector<std::string> names;
    for (const auto& c : channels) names.push_back(c.name);
    return names;
  }

  void validate() const {
    if (!(sample_rate_hz > 0)) throw ParseError(subject_id + ": sample_rate_hz must be positive");
    std::set<std::string> seen;
    for (const auto& c : channels) {
      if (!seen.insert(c.name).second)
        throw ParseError(subject_id + ": duplicate channel name '" + c.name + "'");
      if (c.samples.size() != n_samples())
        throw ParseError(subject_id + ": channel '" + c.name + "' has " +
                         std::to_string(c.samples.size()) + " samples, expected " +
                         std::to_string(n_samples()));
    }
  }

  bool operator==(const Recording&) const = default;
};

/// Canonical on-disk form: the first line is a JSON object with keys
/// subject_id, label, gender, age, sample_rate_hz, channel_names; every
/// following non-empty line is one time step of comma-separated samples,
/// one column per channel.
inline Recording parse_recording(std::string_view content, const std::string& context = "") {
  const std::string where = context.empty() ? std::string("recording") : context;
  const auto eol = content.find('\n');
  const auto header_text = content.substr(0, eol);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": malformed header: " + e.what());
  }
  if (!header.is_object()) throw ParseError(where + ": header must be a JSON object");

  Recording rec;
  std::vector<std::string> names;
  try {
    rec.subject_id = header.at("subject_id").get<std::string>();
    rec.label = parse_label(header.at("label").get<std::string>());
    const auto& g = header.at("gender");
    rec.gender = g.is_null() ? Gender::unknown : parse_gender(g.get<std::string>());
    if (header.contains("age") && !header.at("age").is_null())
      rec.age = header.at("age").get<double>();
    rec.sample_rate_hz = header.at("sample_rate_hz").get<double>();
    names = header.at("channel_names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": bad header field: " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  if (names.empty()) throw ParseError(where + ": channel_names is empty");

  rec.channels.resize(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) rec.channels[c].name = names[c];

  std::size_t line_no = 1;
  std::size_t pos = eol == std::string_view::npos ? content.size() : eol + 1;
  while (pos < content.size()) {
    const auto next = content.find('\n', pos);
    const auto line = text::trim(content.substr(pos, next == std::string_view::npos ? next : next - pos));
    pos = next == std::string_view::npos ? content.size() : next + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    if (fields.size() != names.size())
      throw ParseError(where + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " values, expected " +
                       std::to_string(names.size()) + " (channels of unequal length?)");
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0;
      if (!text::parse_double(fields[c], v) || !std::isfinite(v))
        throw ParseError(where + ": line " + std::to_string(line_no) + ": bad sample '" +
                         std::string(fields[c]) + "'");
      rec.channels[c].samples.push_back(v);
    }
  }
  try {
    rec.validate();
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  return rec;
}

inline std::string serialize_recording(const Recording& rec) {
  nlohmann::json header;
  header["subject_id"] = rec.subject_id;
  header["label"] = to_string(rec.label);
  header["gender"] = to_string(rec.gender);
  header["age"] = rec.age ? nlohmann::json(*rec.age) : nlohmann::json(nullptr);
  header["sample_rate_hz"] = rec.sample_rate_hz;
  header["channel_names"] = rec.channel_names();

  std::string out = header.dump();
  out += '\n';
  for (std::size_t t = 0; t < rec.n_samples(); ++t) {
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      if (c) out += ',';
      out += text::format_double(rec.channels[c].samples[t]);
    }
    out += '\n';
  }
  return out;
}

inline Recording load_recording(const std::filesystem::path& path) {
  return parse_recording(text::read_file(path), path.string());
}

inline void save_recording(const Recording& rec, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_recording(rec));
}

/// Restricts a recording to the named channels, in the order given.
inline Recording select_channels(const Recording& rec, const std::vector<std::string>& names) {
  std::vector<std::string> missing;
  Recording out = rec;
  out.channels.clear();
  for (const auto& n : names) {
    auto it = std::find_if(rec.channels.begin(), rec.channels.end(),
                           [&](const Channel& c) { return c.name == n; });
    if (it == rec.channels.end())
      missing.push_back(n);
    else
      out.channels.push_back(*it);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw UnknownChannel(rec.subject_id + ": " + list);
  }
  return out;
}

}  // namespace eegkan::dataset
