#include "pcshift/stream.hpp"

#include <fstream>

namespace pcshift {

UtilityStream UtilityStream::truncated(std::size_t T) const {
  if (T > functions.size()) {
    throw ParameterError("cannot truncate a stream of " + std::to_string(functions.size()) +
                         " functions to " + std::to_string(T));
  }
  UtilityStream out = *this;
  out.functions.resize(T);
  return out;
}

void UtilityStream::validate() const {
  if (!(H > 0.0)) throw ValidationError("stream payoff bound H must be positive");
  for (const auto& f : functions) validate_utility(f, H);
}

void to_json(json& j, const PiecewiseConstant& f) {
  j = json{{"breakpoints", f.breakpoints()}, {"values", f.values()}};
}

void from_json(const json& j, PiecewiseConstant& f) {
  try {
    f = PiecewiseConstant(j.at("breakpoints").get<std::vector<double>>(),
                          j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed piecewise function: ") + e.what());
  }
}

void to_json(json& j, const UtilityStream& s) {
  j = json{{"provenance", s.provenance},
           {"H", s.H},
           {"declared_beta", s.declared_beta ? json(*s.declared_beta) : json(nullptr)},
           {"functions", s.functions}};
}

void from_json(const json& j, UtilityStream& s) {
  try {
    s.provenance = j.value("provenance", json::object());
    s.H = j.value("H", 1.0);
    s.declared_beta.reset();
    if (j.contains("declared_beta") && !j.at("declared_beta").is_null()) {
      s.declared_beta = j.at("declared_beta").get<double>();
    }
    s.functions = j.at("functions").get<std::vector<PiecewiseConstant>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed stream file: ") + e.what());
  }
  s.validate();
}

UtilityStream load_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stream file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("stream file " + path.string() + " is not JSON: " + e.what());
  }
  return j.get<UtilityStream>();
}

void save_stream(const UtilityStream& stream, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write stream file " + path.string());
  out << json(stream).dump() << '\n';
}

}  // namespace pcshift
