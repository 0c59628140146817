#include "carousel/noise.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "carousel/rng.hpp"
#include "json.hpp"

namespace carousel {

std::vector<double> NoiseRecord::cumulative1() const {
  std::vector<double> out(db1.size() + 1, 0.0);
  for (size_t i = 0; i < db1.size(); ++i) out[i + 1] = out[i] + db1[i];
  return out;
}

std::vector<double> NoiseRecord::cumulative2() const {
  std::vector<double> out(db2.size() + 1, 0.0);
  for (size_t i = 0; i < db2.size(); ++i) out[i + 1] = out[i] + db2[i];
  return out;
}

NoiseRecord NoiseRecord::refined() const {
  NoiseRecord out;
  out.seed = seed;
  out.dt = 0.5 * dt;
  out.db1.reserve(2 * db1.size());
  out.db2.reserve(2 * db2.size());
  Rng rng = Rng::derive(seed, 0xb71d6e);
  double half_sd = 0.5 * std::sqrt(dt);
  auto split = [&](const std::vector<double>& src, std::vector<double>& dst) {
    for (double inc : src) {
      double first = 0.5 * inc + half_sd * rng.normal();
      dst.push_back(first);
      dst.push_back(inc - first);
    }
  };
  split(db1, out.db1);
  split(db2, out.db2);
  return out;
}

NoiseRecord make_noise_record(uint64_t seed, double dt, size_t steps, bool two_component) {
  NoiseRecord rec;
  rec.seed = seed;
  rec.dt = dt;
  rec.db1.resize(steps);
  if (two_component) rec.db2.resize(steps);
  Rng rng(seed);
  double sd = std::sqrt(dt);
  for (size_t i = 0; i < steps; ++i) {
    rec.db1[i] = sd * rng.normal();
    if (two_component) rec.db2[i] = sd * rng.normal();
  }
  return rec;
}

std::string noise_record_to_json(const NoiseRecord& rec) {
  nlohmann::json j;
  j["kind"] = "noise-record";
  j["seed"] = rec.seed;
  j["dt"] = rec.dt;
  j["db1"] = rec.db1;
  j["db2"] = rec.db2;
  return j.dump();
}

NoiseRecord noise_record_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NoiseRecord rec;
  rec.seed = j.at("seed").get<uint64_t>();
  rec.dt = j.at("dt").get<double>();
  rec.db1 = j.at("db1").get<std::vector<double>>();
  rec.db2 = j.at("db2").get<std::vector<double>>();
  return rec;
}

void save_noise_record(const NoiseRecord& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << noise_record_to_json(rec) << "\n";
}

NoiseRecord load_noise_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return noise_record_from_json(ss.str());
}

}  // namespace carousel
