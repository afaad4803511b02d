#include "gdgap/vector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace gdgap {

namespace {

void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

}  // namespace

Vector::Vector(std::size_t d, double fill) : values_(d, fill) {
  if (d > kMaxDimension) {
    throw std::length_error("dimension " + std::to_string(d) + " exceeds limit 2^23");
  }
}

Vector::Vector(std::initializer_list<double> values) : values_(values) {}

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() > kMaxDimension) {
    throw std::length_error("dimension exceeds limit 2^23");
  }
}

Vector Vector::basis(std::size_t d, std::size_t i, double scale) {
  if (i >= d) throw std::out_of_range("basis index out of range");
  Vector e(d);
  e[i] = scale;
  return e;
}

double Vector::norm() const noexcept {
  // Scaled accumulation: the regularized constructions mix O(1) entries with
  // entries near 1e-80, and squaring the latter would underflow.
  double scale = norm_inf();
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double acc = 0.0;
  for (double v : values_) {
    const double r = v / scale;
    acc += r * r;
  }
  return scale * std::sqrt(acc);
}

double Vector::norm_inf() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Vector::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Vector::in_unit_ball(double tol) const noexcept { return norm() <= 1.0 + tol; }

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(*this, other, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(*this, other, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Vector& Vector::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Vector& Vector::axpy(double a, const Vector& x) {
  require_same_size(*this, x, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector v) { return v *= s; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b, "dot");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double distance(const Vector& a, const Vector& b) { return (a - b).norm(); }

double sup_distance(const Vector& a, const Vector& b) { return (a - b).norm_inf(); }

Vector project_unit_ball(const Vector& w) {
  Vector out = w;
  project_unit_ball_inplace(out);
  return out;
}

bool project_unit_ball_inplace(Vector& w) {
  if (!w.is_finite()) throw std::domain_error("non-finite vector");
  const double r = w.norm();
  if (r <= 1.0) return false;
  w *= 1.0 / r;
  // 1/r can round so that the result sits one ulp outside the ball.
  for (int k = 0; k < 8 && w.norm() > 1.0; ++k) w *= std::nextafter(1.0, 0.0);
  return true;
}

Weights Weights::uniform(std::size_t T) {
  if (T == 0) throw std::invalid_argument("weights need T >= 1");
  return Weights(std::vector<double>(T, 1.0 / static_cast<double>(T)));
}

Weights Weights::triangular(std::size_t T) {
  if (T == 0) throw std::invalid_argument("weights need T >= 1");
  std::vector<double> w(T);
  const double denom = static_cast<double>(T) * static_cast<double>(T + 1);
  for (std::size_t t = 1; t <= T; ++t) w[t - 1] = 2.0 * static_cast<double>(t) / denom;
  return Weights(std::move(w));
}

Weights Weights::of(Scheme scheme, std::size_t T) {
  return scheme == Scheme::Uniform ? uniform(T) : triangular(T);
}

Weights Weights::from(std::vector<double> entries) {
  if (entries.empty()) throw std::invalid_argument("weights need T >= 1");
  double sum = 0.0;
  for (double e : entries) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("weights must be nonnegative");
    sum += e;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
  return Weights(std::move(entries));
}

const char* to_string(Weights::Scheme scheme) {
  return scheme == Weights::Scheme::Uniform ? "uniform" : "triangular";
}

Vector weighted_average(std::span<const Vector> iterates, const Weights& weights) {
  if (iterates.size() != weights.size()) {
    throw std::invalid_argument("weighted_average: " + std::to_string(iterates.size()) +
                                " iterates but " + std::to_string(weights.size()) + " weights");
  }
  Vector out(iterates.front().size());
  for (std::size_t t = 0; t < iterates.size(); ++t) out.axpy(weights[t], iterates[t]);
  return out;
}

}  // namespace gdgap
