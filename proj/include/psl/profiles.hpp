#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace psl {

/// One Gaussian term a * exp(-(xi - c)^2 / (2 w^2)) of the curvature profile.
struct GaussianBump {
  double a = 0.0;
  double c = 0.0;
  double w = 1.0;
};

/// Curvature profile rho(xi) as a finite Gaussian mixture.
///
/// The mixture keeps rho in the Schwartz class and gives closed forms for the
/// running integral I(xi) = int_{-inf}^{xi} rho and for int rho^2. An empty
/// mixture encodes rho == 0.
class Profile {
public:
  Profile() = default;
  /// Throws ValidationError if any width is not strictly positive or a field is non-finite.
  explicit Profile(std::vector<GaussianBump> bumps);

  const std::vector<GaussianBump>& bumps() const noexcept { return bumps_; }
  bool empty() const noexcept { return bumps_.empty(); }

  /// Upper bound on |rho| (sum of |a_k|).
  double max_abs_rho() const noexcept;

  /// Copy with every centre moved by `shift` (c_k -> c_k + shift).
  Profile shifted(double shift) const;

private:
  std::vector<GaussianBump> bumps_;
};

double eval_rho(const Profile& profile, double xi);

/// Derivative rho'(xi), closed form.
double eval_rho_prime(const Profile& profile, double xi);

/// I(xi) = int_{-inf}^{xi} rho. Uses std::erf, which is accurate to about one ulp
/// on glibc, so the result is limited by the sum, not the special function.
double eval_I(const Profile& profile, double xi);

/// int rho^2 over the real line, from pairwise Gaussian products.
double l2_norm_sq(const Profile& profile);

/// Radius R such that both the envelope exp(-p (xi+q)^2) and every bump's own
/// Gaussian factor drop below eps for |xi| > R.
double support_radius(const Profile& profile, double p, double q, double eps);

/// Half-width r of the envelope alone: exp(-p r^2) = eps.
double envelope_half_width(double p, double eps);

// {"bumps":[{"a":..,"c":..,"w":..},...]}. `path` prefixes field names in errors.
Profile profile_from_json(const nlohmann::json& j, const std::string& path = "rho");
nlohmann::ordered_json profile_to_json(const Profile& profile);

} // namespace psl
