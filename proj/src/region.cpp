#include "gausscap/region.hpp"

#include <cmath>
#include <sstream>

#include "gausscap/error.hpp"

namespace gausscap {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

RegionSpec RegionSpec::ball(std::vector<double> center, double radius) {
  RegionSpec r;
  r.kind = Kind::ball;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

RegionSpec RegionSpec::slab(std::vector<double> normal, double offset, double halfwidth) {
  RegionSpec r;
  r.kind = Kind::slab;
  r.normal = std::move(normal);
  r.offset = offset;
  r.halfwidth = halfwidth;
  return r;
}

RegionSpec RegionSpec::unite(std::vector<RegionSpec> parts) {
  RegionSpec r;
  r.kind = Kind::union_of;
  r.parts = std::move(parts);
  return r;
}

RegionSpec RegionSpec::complement_of(RegionSpec inner) {
  RegionSpec r;
  r.kind = Kind::complement;
  r.parts.push_back(std::move(inner));
  return r;
}

RegionSpec RegionSpec::empty() { return unite({}); }
RegionSpec RegionSpec::full() { return complement_of(empty()); }

void RegionSpec::validate(int n) const {
  if (margin) require(*margin >= 0.0 && std::isfinite(*margin), "region: margin must be >= 0");
  switch (kind) {
    case Kind::ball:
      require(center.size() == static_cast<size_t>(n), "region: ball center has the wrong dimension");
      require(radius >= 0.0 && std::isfinite(radius), "region: ball radius must be >= 0");
      for (double c : center) require(std::isfinite(c), "region: non-finite ball center");
      break;
    case Kind::slab: {
      require(normal.size() == static_cast<size_t>(n), "region: slab normal has the wrong dimension");
      require(std::abs(std::sqrt(dot(normal, normal)) - 1.0) < 1e-9, "region: slab normal must be unit length");
      require(halfwidth >= 0.0 && std::isfinite(halfwidth) && std::isfinite(offset),
              "region: slab halfwidth must be >= 0");
      break;
    }
    case Kind::union_of:
      for (const auto& p : parts) p.validate(n);
      break;
    case Kind::complement:
      require(parts.size() == 1, "region: complement takes exactly one inner region");
      parts[0].validate(n);
      break;
  }
}

bool RegionSpec::is_empty() const {
  if (kind == Kind::union_of) {
    for (const auto& p : parts)
      if (!p.is_empty()) return false;
    return true;
  }
  if (kind == Kind::complement) return parts[0].is_full();
  return false;
}

bool RegionSpec::is_full() const {
  if (kind == Kind::complement) return parts[0].is_empty();
  if (kind == Kind::union_of) {
    for (const auto& p : parts)
      if (p.is_full()) return true;
  }
  return false;
}

bool RegionSpec::fattened(std::span<const double> x, double m) const {
  switch (kind) {
    case Kind::ball: {
      double d2 = 0.0;
      for (size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
      return std::sqrt(d2) <= radius + m;
    }
    case Kind::slab:
      return std::abs(dot(normal, x) - offset) <= halfwidth + m;
    case Kind::union_of:
      for (const auto& p : parts)
        if (p.fattened(x, m)) return true;
      return false;
    case Kind::complement:
      return !parts[0].eroded(x, m);
  }
  return false;
}

bool RegionSpec::eroded(std::span<const double> x, double m) const {
  switch (kind) {
    case Kind::ball: {
      double d2 = 0.0;
      for (size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
      return std::sqrt(d2) < radius - m;
    }
    case Kind::slab:
      return std::abs(dot(normal, x) - offset) < halfwidth - m;
    case Kind::union_of:
      for (const auto& p : parts)
        if (p.eroded(x, m)) return true;
      return false;
    case Kind::complement:
      return !parts[0].fattened(x, m);
  }
  return false;
}

RegionSpec RegionSpec::section(const Eigen::MatrixXd& EF, const Eigen::MatrixXd& EC,
                               std::span<const double> x) const {
  const auto m = EF.cols();
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  switch (kind) {
    case Kind::ball: {
      Eigen::Map<const Eigen::VectorXd> c(center.data(), static_cast<Eigen::Index>(center.size()));
      const Eigen::VectorXd cf = EF.transpose() * c;
      const double d2 = EC.cols() > 0 ? (EC.transpose() * c - xv).squaredNorm() : 0.0;
      if (d2 > radius * radius) return empty();
      return ball(std::vector<double>(cf.data(), cf.data() + m), std::sqrt(radius * radius - d2));
    }
    case Kind::slab: {
      Eigen::Map<const Eigen::VectorXd> nu(normal.data(), static_cast<Eigen::Index>(normal.size()));
      const Eigen::VectorXd nf = EF.transpose() * nu;
      const double shift = EC.cols() > 0 ? (EC.transpose() * nu).dot(xv) : 0.0;
      const double len = nf.norm();
      if (len < 1e-12) return std::abs(shift - offset) <= halfwidth ? full() : empty();
      const Eigen::VectorXd unit = nf / len;
      return slab(std::vector<double>(unit.data(), unit.data() + m), (offset - shift) / len, halfwidth / len);
    }
    case Kind::union_of: {
      std::vector<RegionSpec> out;
      for (const auto& p : parts) {
        auto s = p.section(EF, EC, x);
        if (!s.is_empty()) out.push_back(std::move(s));
      }
      return unite(std::move(out));
    }
    case Kind::complement:
      return complement_of(parts[0].section(EF, EC, x));
  }
  return empty();
}

std::string RegionSpec::describe() const {
  return region_to_json(*this).dump();
}

std::vector<char> node_mask(const RegionSpec& U, const QuadGrid& grid, double margin) {
  U.validate(grid.n);
  std::vector<char> mask(grid.size(), 0);
  for (size_t j = 0; j < grid.size(); ++j) mask[j] = U.fattened(grid.node(j), margin) ? 1 : 0;
  return mask;
}

nlohmann::ordered_json region_to_json(const RegionSpec& U) {
  nlohmann::ordered_json j;
  switch (U.kind) {
    case RegionSpec::Kind::ball:
      j["ball"] = {{"center", U.center}, {"radius", U.radius}};
      break;
    case RegionSpec::Kind::slab:
      j["slab"] = {{"normal", U.normal}, {"offset", U.offset}, {"halfwidth", U.halfwidth}};
      break;
    case RegionSpec::Kind::union_of: {
      if (U.parts.empty() && !U.margin) return "empty";
      auto arr = nlohmann::ordered_json::array();
      for (const auto& p : U.parts) arr.push_back(region_to_json(p));
      j["union"] = std::move(arr);
      break;
    }
    case RegionSpec::Kind::complement:
      if (U.parts[0].kind == RegionSpec::Kind::union_of && U.parts[0].parts.empty() && !U.margin) return "full";
      j["complement"] = region_to_json(U.parts[0]);
      break;
  }
  if (U.margin) j["margin"] = *U.margin;
  return j;
}

RegionSpec region_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j == "empty") return RegionSpec::empty();
    if (j == "full") return RegionSpec::full();
    throw ValidationError("region: unknown region name '" + j.get<std::string>() + "'");
  }
  require(j.is_object(), "region: expected an object or \"empty\"/\"full\"");
  RegionSpec out;
  int shapes = 0;
  for (const auto& [key, val] : j.items()) {
    if (key == "margin") {
      require(val.is_number(), "region: margin must be a number");
      continue;
    }
    ++shapes;
    if (key == "ball") {
      for (const auto& [k, v] : val.items())
        require(k == "center" || k == "radius", "region: unknown ball field '" + k + "'");
      require(val.contains("center") && val.contains("radius"), "region: ball needs center and radius");
      out = RegionSpec::ball(val["center"].get<std::vector<double>>(), val["radius"].get<double>());
    } else if (key == "slab") {
      for (const auto& [k, v] : val.items())
        require(k == "normal" || k == "offset" || k == "halfwidth", "region: unknown slab field '" + k + "'");
      require(val.contains("normal") && val.contains("halfwidth"), "region: slab needs normal and halfwidth");
      out = RegionSpec::slab(val["normal"].get<std::vector<double>>(), val.value("offset", 0.0),
                             val["halfwidth"].get<double>());
    } else if (key == "union") {
      require(val.is_array(), "region: union takes an array");
      std::vector<RegionSpec> parts;
      for (const auto& p : val) parts.push_back(region_from_json(p));
      out = RegionSpec::unite(std::move(parts));
    } else if (key == "complement") {
      out = RegionSpec::complement_of(region_from_json(val));
    } else {
      throw ValidationError("region: unknown key '" + key + "'");
    }
  }
  require(shapes == 1, "region: exactly one of ball/slab/union/complement is required");
  if (j.contains("margin")) out.margin = j["margin"].get<double>();
  return out;
}

}  // namespace gausscap
