#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "narkoop/dmd.hpp"
#include "narkoop/errors.hpp"

namespace narkoop {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "narkoop-model";

namespace detail {

// C99 hex floats round-trip doubles bit-exactly through text.
inline std::string double_to_hex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return std::string(buf);
}

inline double hex_to_double(const std::string& s, const char* field) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty()) {
    throw ParseError(std::string("model file: bad numeric literal in ") + field + ": '" + s + "'");
  }
  return v;
}

}  // namespace detail

/// Writes a model as versioned JSON. Dictionary exponents are stored as
/// integer arrays and every floating-point value as a C99 hex-float string,
/// so load(save(m)) reproduces the operator bit for bit.
inline void save_model(const KoopmanModel& model, const std::filesystem::path& path) {
  detail::validate_model(model);
  nlohmann::ordered_json j;
  j["format"] = kModelFormatName;
  j["version"] = kModelFormatVersion;
  j["variant"] = variant_name(model.variant);
  j["tau"] = model.tau;
  j["output_dim"] = model.output_dim;
  j["rank_used"] = model.rank_used;
  j["training_residual"] = detail::double_to_hex(model.training_residual);
  j["amplitude_scale"] = detail::double_to_hex(model.amplitude_scale);

  nlohmann::ordered_json dict;
  dict["window_dim"] = model.dictionary.window_dim();
  dict["max_order"] = model.dictionary.max_order();
  dict["exponents"] = model.dictionary.exponent_table();
  j["dictionary"] = std::move(dict);

  nlohmann::ordered_json op;
  op["rows"] = static_cast<int>(model.koopman.rows());
  op["cols"] = static_cast<int>(model.koopman.cols());
  std::vector<std::string> entries;
  entries.reserve(static_cast<std::size_t>(model.koopman.size()));
  for (Eigen::Index r = 0; r < model.koopman.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.koopman.cols(); ++c) {
      entries.push_back(detail::double_to_hex(model.koopman(r, c)));
    }
  }
  op["data"] = std::move(entries);
  j["operator"] = std::move(op);

  std::ofstream out(path);
  if (!out) throw DataError("save_model: cannot open '" + path.string() + "' for writing");
  out << j.dump(1) << '\n';
  if (!out) throw DataError("save_model: write to '" + path.string() + "' failed");
}

inline KoopmanModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_model: cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("load_model: '" + path.string() + "': " + e.what(), 0, e.byte);
  }

  try {
    if (!j.contains("format") || j.at("format").get<std::string>() != kModelFormatName) {
      throw ParseError("load_model: '" + path.string() + "' is not a " + std::string(kModelFormatName) + " file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw VersionError("load_model: unsupported format version " + std::to_string(version) +
                         ", expected " + std::to_string(kModelFormatVersion));
    }

    KoopmanModel model;
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == variant_name(ModelVariant::kCausalJump)) {
      model.variant = ModelVariant::kCausalJump;
    } else if (variant == variant_name(ModelVariant::kHankelShift1)) {
      model.variant = ModelVariant::kHankelShift1;
    } else {
      throw ParseError("load_model: unknown variant '" + variant + "'");
    }
    model.tau = j.at("tau").get<int>();
    model.output_dim = j.at("output_dim").get<int>();
    model.rank_used = j.at("rank_used").get<int>();
    model.training_residual = detail::hex_to_double(j.at("training_residual").get<std::string>(), "training_residual");
    model.amplitude_scale = detail::hex_to_double(j.at("amplitude_scale").get<std::string>(), "amplitude_scale");

    const auto& dict = j.at("dictionary");
    model.dictionary = ObservableDictionary(
        dict.at("window_dim").get<int>(), dict.at("max_order").get<int>(),
        dict.at("exponents").get<std::vector<std::vector<int>>>());

    const auto& op = j.at("operator");
    const int rows = op.at("rows").get<int>();
    const int cols = op.at("cols").get<int>();
    const auto& data = op.at("data");
    if (rows < 1 || cols < 1 || data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
      throw ParseError("load_model: operator entry count does not match rows * cols");
    }
    model.koopman.resize(rows, cols);
    std::size_t k = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c, ++k) {
        model.koopman(r, c) = detail::hex_to_double(data.at(k).get<std::string>(), "operator.data");
      }
    }

    try {
      detail::validate_model(model);
    } catch (const ContractError& e) {
      throw DataError("load_model: '" + path.string() + "' fails validation: " + e.what());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_model: '" + path.string() + "': " + e.what());
  }
}

}  // namespace narkoop
