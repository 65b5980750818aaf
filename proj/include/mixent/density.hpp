#ifndef MIXENT_DENSITY_HPP
#define MIXENT_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mixent/mc.hpp"
#include "mixent/quadrature.hpp"
#include "mixent/special_functions.hpp"

// Density models: isotropic Gaussians, affine pushforwards of spherically
// symmetric log-concave bases, and finite mixtures of them.

namespace mixent {

using Vec = std::vector<double>;

class unsupported_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double sq_norm(const Vec &v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

inline double norm(const Vec &v) { return std::sqrt(sq_norm(v)); }

inline Vec sub(const Vec &a, const Vec &b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double dist(const Vec &a, const Vec &b) { return norm(sub(a, b)); }

} // namespace detail

/// Small dense d x d matrix, row major.
struct Matrix {
  int d = 0;
  Vec m; // d*d entries

  double &at(int i, int j) { return m[i * d + j]; }
  double at(int i, int j) const { return m[i * d + j]; }

  static Matrix identity(int dim, double scale = 1.0) {
    Matrix a;
    a.d = dim;
    a.m.assign(dim * dim, 0.0);
    for (int i = 0; i < dim; ++i) a.at(i, i) = scale;
    return a;
  }

  Vec apply(const Vec &x) const {
    Vec y(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) y[i] += at(i, j) * x[j];
    return y;
  }
};

namespace detail {

// Eigenvalues of the symmetric matrix A^T A by cyclic Jacobi; returns
// singular values of A in decreasing order.
inline Vec singular_values(const Matrix &a) {
  const int d = a.d;
  Matrix s;
  s.d = d;
  s.m.assign(d * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += a.at(k, i) * a.at(k, j);
      s.at(i, j) = acc;
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += s.at(i, j) * s.at(i, j);
    if (off < 1e-28) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        if (std::fabs(s.at(p, q)) < 1e-300) continue;
        const double theta = (s.at(q, q) - s.at(p, p)) / (2.0 * s.at(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < d; ++k) {
          const double skp = s.at(k, p), skq = s.at(k, q);
          s.at(k, p) = c * skp - sn * skq;
          s.at(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < d; ++k) {
          const double spk = s.at(p, k), sqk = s.at(q, k);
          s.at(p, k) = c * spk - sn * sqk;
          s.at(q, k) = sn * spk + c * sqk;
        }
      }
  }
  Vec sv(d);
  for (int i = 0; i < d; ++i) sv[i] = std::sqrt(std::max(0.0, s.at(i, i)));
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// Gaussian elimination with partial pivoting.
inline Matrix inverse(const Matrix &a) {
  const int d = a.d;
  Matrix aug = a;
  Matrix inv = Matrix::identity(d);
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::fabs(aug.at(r, col)) > std::fabs(aug.at(piv, col))) piv = r;
    if (std::fabs(aug.at(piv, col)) < 1e-300)
      throw input_error("AffineMap: singular matrix");
    if (piv != col)
      for (int k = 0; k < d; ++k) {
        std::swap(aug.m[piv * d + k], aug.m[col * d + k]);
        std::swap(inv.m[piv * d + k], inv.m[col * d + k]);
      }
    const double scale = 1.0 / aug.at(col, col);
    for (int k = 0; k < d; ++k) {
      aug.at(col, k) *= scale;
      inv.at(col, k) *= scale;
    }
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = aug.at(r, col);
      if (f == 0.0) continue;
      for (int k = 0; k < d; ++k) {
        aug.at(r, k) -= f * aug.at(col, k);
        inv.at(r, k) -= f * inv.at(col, k);
      }
    }
  }
  return inv;
}

} // namespace detail

/// Invertible affine map x -> A x + b with cached inverse, log|det A| and
/// the bi-Lipschitz constant tau = max(s_max^2, 1/s_min^2).
struct AffineMap {
  Matrix a;
  Vec b;
  Matrix a_inv;
  double s_min = 0.0, s_max = 0.0;
  double log_abs_det = 0.0;

  AffineMap(Matrix matrix, Vec offset) : a(std::move(matrix)), b(std::move(offset)) {
    if (static_cast<int>(b.size()) != a.d)
      throw input_error("AffineMap: offset length mismatch");
    const Vec sv = detail::singular_values(a);
    s_max = sv.front();
    s_min = sv.back();
    if (!(s_min > 0.0)) throw input_error("AffineMap: matrix not invertible");
    a_inv = detail::inverse(a);
    log_abs_det = 0.0;
    for (double s : sv) log_abs_det += std::log(s);
  }

  static AffineMap translation(const Vec &offset, double scale = 1.0) {
    return AffineMap(Matrix::identity(static_cast<int>(offset.size()), scale),
                     offset);
  }

  int dim() const { return a.d; }

  double tau() const {
    return std::max(s_max * s_max, 1.0 / (s_min * s_min));
  }

  Vec apply(const Vec &x) const {
    Vec y = a.apply(x);
    for (int i = 0; i < a.d; ++i) y[i] += b[i];
    return y;
  }

  Vec apply_inverse(const Vec &y) const {
    return a_inv.apply(detail::sub(y, b));
  }
};

/// Spherically symmetric base profile psi(|w|) in R^d, radially
/// non-increasing and normalized.  The standard Gaussian base is built in;
/// custom profiles supply log psi plus whatever statistics they know.
struct RadialProfile {
  int dim = 1;
  std::function<double(double)> log_psi; // log density at radius r
  double sup = 0.0;                      // ||phi||_inf
  std::optional<double> entropy;         // h(W) if known
  std::optional<double> coord_variance;  // E W_1^2 if known
  bool gaussian = false;
  double sigma = 1.0; // meaningful when gaussian
  std::string name = "custom";

  static RadialProfile std_gaussian(int d, double s = 1.0) {
    RadialProfile p;
    p.dim = d;
    p.sigma = s;
    p.gaussian = true;
    p.name = "gaussian";
    const double log_norm = -0.5 * d * std::log(2.0 * M_PI * s * s);
    p.log_psi = [log_norm, s](double r) {
      return log_norm - 0.5 * r * r / (s * s);
    };
    p.sup = std::exp(log_norm);
    p.entropy = 0.5 * d * std::log(2.0 * M_PI * M_E * s * s);
    p.coord_variance = s * s;
    return p;
  }

  double tail(double t) const {
    if (gaussian) return gaussian_tail(dim, t / sigma);
    // generic radial tail by quadrature of the shell integral
    const double surf = dim * unit_ball_volume(dim);
    auto integrand = [this, surf](double r) {
      return surf * std::pow(r, dim - 1) * std::exp(log_psi(r));
    };
    Estimate e = integrate_1d(integrand, t,
                              std::numeric_limits<double>::infinity());
    return std::clamp(e.value, 0.0, 1.0);
  }

  /// Quadrature check that the profile integrates to 1.
  double normalization() const {
    const double surf = dim * unit_ball_volume(dim);
    auto integrand = [this, surf](double r) {
      return surf * std::pow(r, dim - 1) * std::exp(log_psi(r));
    };
    return integrate_1d(integrand, 0.0,
                        std::numeric_limits<double>::infinity())
        .value;
  }
};

struct IsotropicGaussian {
  int dim;
  Vec mean;
  double sigma;

  IsotropicGaussian(int d, Vec mu, double s)
      : dim(d), mean(std::move(mu)), sigma(s) {
    if (dim < 1) throw input_error("IsotropicGaussian: dim must be >= 1");
    if (!(sigma > 0.0))
      throw input_error("IsotropicGaussian: sigma must be positive");
    if (static_cast<int>(mean.size()) != dim)
      throw input_error("IsotropicGaussian: mean length mismatch");
  }

  double log_pdf(const Vec &z) const {
    return -0.5 * dim * std::log(2.0 * M_PI * sigma * sigma) -
           0.5 * detail::sq_norm(detail::sub(z, mean)) / (sigma * sigma);
  }

  double entropy() const {
    return 0.5 * dim * std::log(2.0 * M_PI * M_E * sigma * sigma);
  }

  Vec sample(CounterRng &rng) const {
    Vec z = rng.next_normal_vec(dim);
    for (int i = 0; i < dim; ++i) z[i] = mean[i] + sigma * z[i];
    return z;
  }
};

/// T(W): affine pushforward of a spherically symmetric base.
struct Pushforward {
  RadialProfile base;
  AffineMap map;

  Pushforward(RadialProfile profile, AffineMap affine)
      : base(std::move(profile)), map(std::move(affine)) {
    if (base.dim != map.dim())
      throw input_error("Pushforward: base/map dimension mismatch");
  }

  double log_pdf(const Vec &z) const {
    const Vec w = map.apply_inverse(z);
    return base.log_psi(detail::norm(w)) - map.log_abs_det;
  }
};

class ComponentDensity {
public:
  ComponentDensity(IsotropicGaussian g) : v_(std::move(g)) {}
  ComponentDensity(Pushforward p) : v_(std::move(p)) {}

  bool is_gaussian() const {
    return std::holds_alternative<IsotropicGaussian>(v_);
  }
  const IsotropicGaussian &gaussian() const {
    return std::get<IsotropicGaussian>(v_);
  }
  const Pushforward &pushforward() const { return std::get<Pushforward>(v_); }

  int dim() const {
    return is_gaussian() ? gaussian().dim : pushforward().map.dim();
  }

  double log_pdf(const Vec &z) const {
    if (static_cast<int>(z.size()) != dim())
      throw input_error("ComponentDensity: point dimension mismatch");
    if (is_gaussian()) return gaussian().log_pdf(z);
    return pushforward().log_pdf(z);
  }

  double pdf(const Vec &z) const { return std::exp(log_pdf(z)); }

  /// Differential entropy in nats.  For a pushforward T(W) with affine T,
  /// h = h(W) + log|det A|; requires the base entropy to be known.
  double entropy() const {
    if (is_gaussian()) return gaussian().entropy();
    const Pushforward &p = pushforward();
    if (!p.base.entropy)
      throw unsupported_error(
          "ComponentDensity: pushforward base entropy unknown");
    return *p.base.entropy + p.map.log_abs_det;
  }

  /// A point the mass is centered at, for quadrature domain selection.
  Vec center() const {
    if (is_gaussian()) return gaussian().mean;
    return pushforward().map.b;
  }

  /// A radius beyond which the density is negligible (12 sigma-equivalents).
  double extent() const {
    if (is_gaussian()) return 12.0 * gaussian().sigma;
    const Pushforward &p = pushforward();
    const double base_scale =
        p.base.coord_variance ? std::sqrt(*p.base.coord_variance) : 1.0;
    return 12.0 * base_scale * p.map.s_max * std::sqrt(p.base.dim);
  }

  Vec sample(CounterRng &rng) const {
    if (is_gaussian()) return gaussian().sample(rng);
    const Pushforward &p = pushforward();
    if (!p.base.gaussian)
      throw unsupported_error(
          "ComponentDensity: sampling needs a Gaussian base");
    Vec w = rng.next_normal_vec(p.base.dim);
    for (double &x : w) x *= p.base.sigma;
    return p.map.apply(w);
  }

private:
  std::variant<IsotropicGaussian, Pushforward> v_;
};

/// Finite mixture sum p_i f_i.  Weights must be strictly positive and sum
/// to 1; components must share a dimension.
class MixtureModel {
public:
  MixtureModel(Vec weights, std::vector<ComponentDensity> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty())
      throw input_error("MixtureModel: needs at least one component");
    if (weights_.size() != components_.size())
      throw input_error("MixtureModel: weights/components length mismatch");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w > 0.0))
        throw input_error("MixtureModel: weights must be strictly positive");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw input_error("MixtureModel: weights must sum to 1");
    const int d = components_.front().dim();
    for (const auto &c : components_)
      if (c.dim() != d)
        throw input_error("MixtureModel: components must share a dimension");
  }

  int dim() const { return components_.front().dim(); }
  int size() const { return static_cast<int>(components_.size()); }
  const Vec &weights() const { return weights_; }
  const std::vector<ComponentDensity> &components() const {
    return components_;
  }
  const ComponentDensity &component(int i) const { return components_.at(i); }

  /// log f(z) by log-sum-exp over component log densities.
  double log_pdf(const Vec &z) const {
    if (static_cast<int>(z.size()) != dim())
      throw input_error("MixtureModel: point dimension mismatch");
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) {
      terms[i] = std::log(weights_[i]) + components_[i].log_pdf(z);
      max_term = std::max(max_term, terms[i]);
    }
    if (!std::isfinite(max_term)) return max_term;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - max_term);
    return max_term + std::log(s);
  }

  double pdf(const Vec &z) const { return std::exp(log_pdf(z)); }

  /// H(p) of the weight vector, nats.
  double weight_entropy() const {
    double h = 0.0;
    for (double w : weights_) h -= w * std::log(w);
    return h;
  }

  /// The mixture with component j removed and weights renormalized.
  MixtureModel mixture_complement(int j) const {
    if (size() < 2)
      throw input_error("mixture_complement: undefined for n = 1");
    if (j < 0 || j >= size())
      throw input_error("mixture_complement: index out of range");
    Vec w;
    std::vector<ComponentDensity> cs;
    const double rest = 1.0 - weights_[j];
    for (int i = 0; i < size(); ++i) {
      if (i == j) continue;
      w.push_back(weights_[i] / rest);
      cs.push_back(components_[i]);
    }
    // renormalize exactly
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double &x : w) x /= total;
    return MixtureModel(std::move(w), std::move(cs));
  }

  /// Hierarchical draw: i ~ p, then z ~ f_i.
  Vec sample(CounterRng &rng) const {
    const double u = rng.next_double();
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) {
      acc += weights_[i];
      if (u < acc || i == size() - 1) return components_[i].sample(rng);
    }
    return components_.back().sample(rng);
  }

  /// Per-axis quadrature box: union of component centers +- extent.
  void bounding_box(Vec &lo, Vec &hi) const {
    const int d = dim();
    lo.assign(d, std::numeric_limits<double>::infinity());
    hi.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto &c : components_) {
      const Vec ctr = c.center();
      const double r = c.extent();
      for (int k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], ctr[k] - r);
        hi[k] = std::max(hi[k], ctr[k] + r);
      }
    }
  }

private:
  Vec weights_;
  std::vector<ComponentDensity> components_;
};

/// Geometry data (lambda, M, tau) for the separation-based lower bounds.
struct SeparationCertificate {
  double lambda;
  int m;
  double tau;

  SeparationCertificate(double l, int count, double t)
      : lambda(l), m(count), tau(t) {
    if (!(lambda > 0.0))
      throw input_error("SeparationCertificate: lambda must be positive");
    if (m < 1) throw input_error("SeparationCertificate: M must be >= 1");
    if (!(tau >= 1.0))
      throw input_error("SeparationCertificate: tau must be >= 1");
  }
};

namespace detail {

// The affine map realizing component i as T_i(W).  A Gaussian N(mu, s^2 I)
// is the pure translation by mu of the base phi_s, so lambda stays in data
// units and translation families get tau = 1.
inline AffineMap component_map(const ComponentDensity &c) {
  if (c.is_gaussian()) {
    const auto &g = c.gaussian();
    return AffineMap::translation(g.mean);
  }
  return c.pushforward().map;
}

// All components must be pushforwards of one common base.
inline void require_common_base(const MixtureModel &model) {
  std::string name;
  double sigma = -1.0;
  for (const auto &c : model.components()) {
    std::string n;
    double s;
    if (c.is_gaussian()) {
      n = "gaussian";
      s = c.gaussian().sigma;
    } else {
      n = c.pushforward().base.name;
      s = c.pushforward().base.gaussian ? c.pushforward().base.sigma : 1.0;
    }
    if (name.empty()) {
      name = n;
      sigma = s;
    } else if (n != name || std::fabs(s - sigma) > 0.0) {
      throw unsupported_error(
          "verify_separation: components must share a common base");
    }
  }
}

} // namespace detail

/// Exact pairwise ball test for the (lambda, M, tau) criterion.  Images
/// T_kj(B_lambda) and T_ij(B_lambda) are certainly disjoint when the image
/// centers are at distance >= 2 lambda tau; the potentially-intersecting
/// count (including self) must be dominated by M in every frame j.
inline bool verify_separation(const MixtureModel &model,
                              const SeparationCertificate &cert) {
  detail::require_common_base(model);
  const int n = model.size();
  std::vector<AffineMap> maps;
  maps.reserve(n);
  double max_tau = 1.0;
  for (const auto &c : model.components()) {
    maps.push_back(detail::component_map(c));
    max_tau = std::max(max_tau, maps.back().tau());
  }
  if (cert.tau < max_tau) return false;
  const double sep = 2.0 * cert.lambda * cert.tau;
  for (int j = 0; j < n; ++j) {
    std::vector<Vec> centers(n); // T_ij(0) = A_i^{-1}(b_j - b_i)
    for (int i = 0; i < n; ++i)
      centers[i] = maps[i].apply_inverse(maps[j].apply(Vec(model.dim(), 0.0)));
    for (int i = 0; i < n; ++i) {
      int count = 0;
      for (int k = 0; k < n; ++k)
        if (detail::dist(centers[i], centers[k]) < sep) ++count;
      if (count > cert.m) return false;
    }
  }
  return true;
}

} // namespace mixent

#endif
