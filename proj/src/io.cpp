#include "carousel/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace carousel {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string spectrum_to_csv(const PointSample& sample) {
  std::string out = "lambda\n";
  for (double p : sample.points) {
    out += format_double(p);
    out += '\n';
  }
  return out;
}

std::string pooled_spectrum_to_csv(const std::vector<PointSample>& samples) {
  std::string out = "path,lambda\n";
  for (size_t i = 0; i < samples.size(); ++i)
    for (double p : samples[i].points) {
      out += std::to_string(i);
      out += ',';
      out += format_double(p);
      out += '\n';
    }
  return out;
}

std::string spectrum_to_json(const PointSample& sample) {
  json j;
  j["window"] = {sample.window_lo, sample.window_hi};
  j["model"] = sample.provenance.model;
  j["seed"] = sample.provenance.seed;
  j["grid_cells"] = sample.provenance.grid_cells;
  j["eps"] = sample.provenance.eps;
  j["lambda"] = sample.points;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json complex_array(const std::vector<std::complex<double>>& v) {
  json arr = json::array();
  for (const auto& z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

std::vector<std::complex<double>> complex_vector(const json& arr) {
  std::vector<std::complex<double>> out;
  for (const auto& e : arr) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return out;
}

}  // namespace

std::string coeffs_to_json(const VerblunskyCoefficients& c) {
  json j;
  j["n"] = c.n();
  j["alpha"] = complex_array(c.alpha);
  return j.dump(2);
}

std::string coeffs_to_json(const DeformedVerblunsky& c) {
  json j;
  j["n"] = c.n();
  j["gamma"] = complex_array(c.gamma);
  return j.dump(2);
}

VerblunskyCoefficients verblunsky_from_json(const std::string& text) {
  json j = json::parse(text);
  VerblunskyCoefficients c;
  c.alpha = complex_vector(j.at("alpha"));
  if (j.contains("n") && j.at("n").get<size_t>() != c.n())
    throw std::runtime_error("coefficient file: n does not match the array length");
  c.validate();
  return c;
}

DeformedVerblunsky deformed_from_json(const std::string& text) {
  json j = json::parse(text);
  DeformedVerblunsky c;
  c.gamma = complex_vector(j.at("gamma"));
  if (j.contains("n") && j.at("n").get<size_t>() != c.n())
    throw std::runtime_error("coefficient file: n does not match the array length");
  c.validate();
  return c;
}

bool coeff_json_is_deformed(const std::string& text) {
  return json::parse(text).contains("gamma");
}

namespace {

json boundary_to_json(const BoundaryPoint& p) {
  if (p.is_infinity()) return json("infinity");
  return json(p.value());
}

BoundaryPoint boundary_from_jsonval(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "infinity") return BoundaryPoint::infinity();
    throw std::runtime_error("operator file: bad boundary point");
  }
  return BoundaryPoint::real(v.get<double>());
}

}  // namespace

std::string operator_to_json(const DiracOperator& op) {
  const DrivingPath& p = op.path();
  json j;
  j["grid"] = p.grid;
  json xs = json::array(), ys = json::array();
  for (const auto& v : p.values) {
    xs.push_back(v.x);
    ys.push_back(v.y);
  }
  j["x"] = xs;
  j["y"] = ys;
  j["f"] = p.weight;
  j["interpolation"] =
      p.interpolation == Interpolation::PiecewiseConstant ? "piecewise-constant" : "linear-log-y";
  j["horizon"] = p.horizon;
  if (p.boundary_limit) j["boundary_limit"] = boundary_to_json(*p.boundary_limit);
  if (p.tail_rule)
    j["tail_rule"] = (*p.tail_rule == EndpointClass::LimitCircle) ? "limit-circle" : "limit-point";
  j["eta0"] = boundary_to_json(op.bc0().point());
  j["eta1"] = boundary_to_json(op.bc1().point());
  return j.dump(2);
}

DiracOperator operator_from_json(const std::string& text) {
  json j = json::parse(text);
  DrivingPath p;
  p.grid = j.at("grid").get<std::vector<double>>();
  auto xs = j.at("x").get<std::vector<double>>();
  auto ys = j.at("y").get<std::vector<double>>();
  if (xs.size() != ys.size()) throw std::runtime_error("operator file: x/y size mismatch");
  for (size_t i = 0; i < xs.size(); ++i) p.values.push_back({xs[i], ys[i]});
  p.weight = j.at("f").get<std::vector<double>>();
  if (j.contains("interpolation") && j.at("interpolation") == "linear-log-y")
    p.interpolation = Interpolation::LinearInLogY;
  p.horizon = j.contains("horizon") ? j.at("horizon").get<double>() : p.grid.back();
  if (j.contains("boundary_limit"))
    p.boundary_limit = boundary_from_jsonval(j.at("boundary_limit"));
  if (j.contains("tail_rule"))
    p.tail_rule = (j.at("tail_rule") == "limit-circle") ? EndpointClass::LimitCircle
                                                        : EndpointClass::LimitPoint;
  BoundaryCondition bc0 = BoundaryCondition::from_point(boundary_from_jsonval(j.at("eta0")));
  BoundaryCondition bc1 = BoundaryCondition::from_point(boundary_from_jsonval(j.at("eta1")));
  return DiracOperator::make(std::move(p), bc0, bc1);
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["subcommand"] = m.subcommand;
  j["flags"] = m.flags;
  j["seed"] = m.seed;
  j["library_version"] = kLibraryVersion;
  j["outputs"] = m.outputs;
  return j.dump(2);
}

}  // namespace carousel
