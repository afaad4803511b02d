#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace gdgap {

/// Largest dimension any construction may request (2^23).
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 23;

/// Dense real vector. Every iterate, subgradient and schedule in the
/// library is one of these; the dimension is fixed at construction.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t d, double fill = 0.0);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::vector<double> values);

  static Vector basis(std::size_t d, std::size_t i, double scale = 1.0);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  double norm() const noexcept;
  double norm_inf() const noexcept;
  bool is_finite() const noexcept;
  bool in_unit_ball(double tol = 1e-12) const noexcept;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s) noexcept;

  /// this += a * x
  Vector& axpy(double a, const Vector& x);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector v);

double dot(const Vector& a, const Vector& b);
double distance(const Vector& a, const Vector& b);
double sup_distance(const Vector& a, const Vector& b);

/// Euclidean projection onto the closed unit ball. Throws
/// std::domain_error("non-finite vector") on NaN/Inf input.
Vector project_unit_ball(const Vector& w);

/// In-place variant; returns true when the input was outside the ball.
bool project_unit_ball_inplace(Vector& w);

/// Averaging weights over T iterates: nonnegative, sum to one.
class Weights {
 public:
  enum class Scheme { Uniform, Triangular };

  static Weights uniform(std::size_t T);
  /// 2t / (T(T+1)) for t = 1..T.
  static Weights triangular(std::size_t T);
  static Weights of(Scheme scheme, std::size_t T);
  /// Validates nonnegativity and unit sum (1e-12).
  static Weights from(std::vector<double> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t t) const noexcept { return entries_[t]; }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  explicit Weights(std::vector<double> entries) : entries_(std::move(entries)) {}
  std::vector<double> entries_;
};

const char* to_string(Weights::Scheme scheme);

/// Σ weights[t] · iterates[t].
Vector weighted_average(std::span<const Vector> iterates, const Weights& weights);

}  // namespace gdgap
