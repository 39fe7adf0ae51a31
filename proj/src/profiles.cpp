#include "psl/profiles.hpp"

#include <cmath>
#include <numbers>

#include "psl/errors.hpp"

namespace psl {

namespace {

void check_bump(const GaussianBump& b, const std::string& path) {
  if (!std::isfinite(b.a)) throw ValidationError(path + ".a", "must be finite");
  if (!std::isfinite(b.c)) throw ValidationError(path + ".c", "must be finite");
  if (!std::isfinite(b.w) || !(b.w > 0.0)) throw ValidationError(path + ".w", "must be > 0");
}

double number_field(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ValidationError(path + "." + key, "missing");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ValidationError(path + "." + key, "must be a number");
  return v.get<double>();
}

} // namespace

Profile::Profile(std::vector<GaussianBump> bumps) : bumps_(std::move(bumps)) {
  for (std::size_t k = 0; k < bumps_.size(); ++k)
    check_bump(bumps_[k], "bumps[" + std::to_string(k) + "]");
}

double Profile::max_abs_rho() const noexcept {
  double s = 0.0;
  for (const auto& b : bumps_) s += std::abs(b.a);
  return s;
}

Profile Profile::shifted(double shift) const {
  Profile out = *this;
  for (auto& b : out.bumps_) b.c += shift;
  return out;
}

double eval_rho(const Profile& profile, double xi) {
  double s = 0.0;
  for (const auto& b : profile.bumps()) {
    const double z = (xi - b.c) / b.w;
    s += b.a * std::exp(-0.5 * z * z);
  }
  return s;
}

double eval_rho_prime(const Profile& profile, double xi) {
  double s = 0.0;
  for (const auto& b : profile.bumps()) {
    const double z = (xi - b.c) / b.w;
    s -= b.a * (z / b.w) * std::exp(-0.5 * z * z);
  }
  return s;
}

double eval_I(const Profile& profile, double xi) {
  constexpr double kHalfRootPi2 = 1.2533141373155002512; // sqrt(pi/2)
  double s = 0.0;
  for (const auto& b : profile.bumps()) {
    const double z = (xi - b.c) / (std::numbers::sqrt2 * b.w);
    // erfc of the negated argument keeps full relative accuracy far left.
    s += b.a * b.w * kHalfRootPi2 * std::erfc(-z);
  }
  return s;
}

double l2_norm_sq(const Profile& profile) {
  const auto& bs = profile.bumps();
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  double s = 0.0;
  for (const auto& bk : bs) {
    for (const auto& bl : bs) {
      const double v = bk.w * bk.w + bl.w * bl.w;
      const double d = bk.c - bl.c;
      s += bk.a * bl.a * root2pi * bk.w * bl.w / std::sqrt(v) * std::exp(-d * d / (2.0 * v));
    }
  }
  return s;
}

double envelope_half_width(double p, double eps) {
  if (!(p > 0.0)) throw ValidationError("p", "must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("truncation_eps", "must lie in (0,1)");
  return std::sqrt(-std::log(eps) / p);
}

double support_radius(const Profile& profile, double p, double q, double eps) {
  double r = std::abs(q) + envelope_half_width(p, eps);
  const double bump_scale = std::sqrt(-2.0 * std::log(eps));
  for (const auto& b : profile.bumps()) r = std::max(r, std::abs(b.c) + b.w * bump_scale);
  return r;
}

Profile profile_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "must be an object");
  std::vector<GaussianBump> bumps;
  if (j.contains("bumps")) {
    const auto& arr = j.at("bumps");
    if (!arr.is_array()) throw ValidationError(path + ".bumps", "must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string bp = path + ".bumps[" + std::to_string(k) + "]";
      if (!arr[k].is_object()) throw ValidationError(bp, "must be an object");
      GaussianBump b{number_field(arr[k], "a", bp), number_field(arr[k], "c", bp),
                     number_field(arr[k], "w", bp)};
      check_bump(b, bp);
      bumps.push_back(b);
    }
  }
  return Profile(std::move(bumps));
}

nlohmann::ordered_json profile_to_json(const Profile& profile) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& b : profile.bumps()) {
    nlohmann::ordered_json jb;
    jb["a"] = b.a;
    jb["c"] = b.c;
    jb["w"] = b.w;
    arr.push_back(jb);
  }
  nlohmann::ordered_json out;
  out["bumps"] = arr;
  return out;
}

} // namespace psl
