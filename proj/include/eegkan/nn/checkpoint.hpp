#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "eegkan/error.hpp"
#include "eegkan/nn/model.hpp"
#include "eegkan/nn/spec.hpp"
#include "eegkan/text.hpp"

namespace eegkan::nn {

struct Checkpoint {
  ModelSpec spec;
  ModelParams params;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;

  bool operator==(const Checkpoint&) const = default;
};

inline constexpr int checkpoint_version = 1;

/// A single-line JSON header terminated by '\n', followed by
/// param_count little-endian IEEE-754 binary64 values in ModelParams order.
inline std::string serialize_checkpoint(const Checkpoint& ck) {
  if (ck.params.values.size() != ck.spec.param_count())
    throw ShapeMismatch("checkpoint parameters do not match spec");
  nlohmann::json header;
  header["format"] = "eegkan-checkpoint";
  header["version"] = checkpoint_version;
  header["spec"] = to_json(ck.spec);
  header["seed"] = ck.seed;
  header["epoch"] = ck.epoch;
  header["param_count"] = ck.params.values.size();
  header["encoding"] = "f64le";

  std::string out = header.dump();
  out += '\n';
  const std::size_t start = out.size();
  out.resize(start + 8 * ck.params.values.size());
  for (std::size_t i = 0; i < ck.params.values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(ck.params.values[i]);
    for (int b = 0; b < 8; ++b)
      out[start + 8 * i + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return out;
}

inline Checkpoint parse_checkpoint(std::string_view blob) {
  const auto eol = blob.find('\n');
  if (eol == std::string_view::npos) throw ParseError("checkpoint: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(0, eol));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: malformed header: ") + e.what());
  }
  Checkpoint ck;
  std::size_t count = 0;
  try {
    if (header.at("format").get<std::string>() != "eegkan-checkpoint")
      throw ParseError("checkpoint: unexpected format tag");
    if (header.at("version").get<int>() != checkpoint_version)
      throw ParseError("checkpoint: unsupported version");
    ck.spec = model_spec_from_json(header.at("spec"));
    ck.seed = header.at("seed").get<std::uint64_t>();
    ck.epoch = header.at("epoch").get<std::uint64_t>();
    count = header.at("param_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (count != ck.spec.param_count()) throw ParseError("checkpoint: param_count disagrees with spec");
  const auto body = blob.substr(eol + 1);
  if (body.size() != 8 * count)
    throw ParseError("checkpoint: expected " + std::to_string(8 * count) + " parameter bytes, found " +
                     std::to_string(body.size()));
  ck.params.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(body[8 * i + static_cast<std::size_t>(b)]))
              << (8 * b);
    ck.params.values[i] = std::bit_cast<double>(bits);
  }
  return ck;
}

inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_checkpoint(ck));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(text::read_file(path));
}

}  // namespace eegkan::nn
