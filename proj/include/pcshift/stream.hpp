#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "pcshift/piecewise.hpp"

namespace pcshift {

using json = nlohmann::json;

/// A finite sequence of utilities u_1..u_T plus where it came from.
struct UtilityStream {
  std::vector<PiecewiseConstant> functions;
  double H = 1.0;
  std::optional<double> declared_beta;
  json provenance = json::object();

  std::size_t horizon() const noexcept { return functions.size(); }
  std::span<const PiecewiseConstant> view() const noexcept { return functions; }

  /// First T functions; T must not exceed the horizon.
  UtilityStream truncated(std::size_t T) const;

  /// Throws ValidationError if any function leaves [0, H].
  void validate() const;
};

void to_json(json& j, const PiecewiseConstant& f);
void from_json(const json& j, PiecewiseConstant& f);
void to_json(json& j, const UtilityStream& s);
void from_json(const json& j, UtilityStream& s);

UtilityStream load_stream(const std::filesystem::path& path);
void save_stream(const UtilityStream& stream, const std::filesystem::path& path);

}  // namespace pcshift
