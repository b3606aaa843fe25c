#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "drlcp/errors.hpp"

namespace drlcp {

/// Sparse affine expression over decision-variable ids: sum_i c_i * x_i + c0.
/// Terms are kept sorted by id with no explicit zeros, so two expressions
/// representing the same function compare equal.
class AffineExpr {
 public:
  AffineExpr() = default;

  static AffineExpr constant(double c) {
    AffineExpr e;
    e.constant_ = c;
    return e;
  }

  static AffineExpr variable(int id, double coeff = 1.0) {
    AffineExpr e;
    if (coeff != 0.0) e.terms_.emplace_back(id, coeff);
    return e;
  }

  double constant_term() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  AffineExpr& operator+=(const AffineExpr& other) {
    constant_ += other.constant_;
    if (other.terms_.empty()) return *this;
    std::vector<std::pair<int, double>> merged;
    merged.reserve(terms_.size() + other.terms_.size());
    std::size_t a = 0, b = 0;
    while (a < terms_.size() || b < other.terms_.size()) {
      if (b == other.terms_.size() ||
          (a < terms_.size() && terms_[a].first < other.terms_[b].first)) {
        merged.push_back(terms_[a++]);
      } else if (a == terms_.size() || other.terms_[b].first < terms_[a].first) {
        merged.push_back(other.terms_[b++]);
      } else {
        double c = terms_[a].second + other.terms_[b].second;
        if (c != 0.0) merged.emplace_back(terms_[a].first, c);
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  AffineExpr& operator-=(const AffineExpr& other) { return *this += other * -1.0; }

  AffineExpr& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      constant_ = 0.0;
      return *this;
    }
    constant_ *= s;
    for (auto& [id, c] : terms_) c *= s;
    return *this;
  }

  AffineExpr& operator+=(double c) {
    constant_ += c;
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator+(AffineExpr a, double c) { return a += c; }
  friend AffineExpr operator-(AffineExpr a, double c) { return a += -c; }

  /// Product of two expressions is only defined when at least one side is
  /// constant; anything else would leave the affine class.
  friend AffineExpr operator*(const AffineExpr& a, const AffineExpr& b) {
    if (a.is_constant()) return b * a.constant_;
    if (b.is_constant()) return a * b.constant_;
    throw Error("AffineExpr: product of two non-constant expressions");
  }

  bool operator==(const AffineExpr& other) const {
    return constant_ == other.constant_ && terms_ == other.terms_;
  }

  /// Substitute numeric values, indexed by variable id.
  double eval(const std::vector<double>& values) const {
    double r = constant_;
    for (const auto& [id, c] : terms_) {
      if (id < 0 || static_cast<std::size_t>(id) >= values.size())
        throw ShapeMismatch("AffineExpr::eval: variable id out of range");
      r += c * values[static_cast<std::size_t>(id)];
    }
    return r;
  }

  bool all_finite() const {
    if (!std::isfinite(constant_)) return false;
    for (const auto& [id, c] : terms_)
      if (!std::isfinite(c)) return false;
    return true;
  }

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

using AffineVec = std::vector<AffineExpr>;

}  // namespace drlcp
