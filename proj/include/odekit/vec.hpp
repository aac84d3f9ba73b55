#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace odekit {

// State vector with inline storage. System dimension is at most 3 (plus one
// spare slot), so trajectories of millions of steps never touch the heap.
class Vec {
 public:
  static constexpr std::size_t kCapacity = 4;

  Vec() : n_(0) { data_.fill(0.0); }
  explicit Vec(std::size_t n) : n_(n) {
    if (n > kCapacity) throw std::length_error("Vec: dimension exceeds capacity");
    data_.fill(0.0);
  }
  Vec(std::initializer_list<double> xs) : n_(xs.size()) {
    if (n_ > kCapacity) throw std::length_error("Vec: dimension exceeds capacity");
    data_.fill(0.0);
    std::size_t i = 0;
    for (double x : xs) data_[i++] = x;
  }

  std::size_t size() const { return n_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }

  bool finite() const {
    for (std::size_t i = 0; i < n_; ++i)
      if (!std::isfinite(data_[i])) return false;
    return true;
  }

  double norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += data_[i] * data_[i];
    return std::sqrt(s);
  }

  Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (std::size_t i = 0; i < n_; ++i) data_[i] *= a;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double a, Vec v) { return v *= a; }
  friend Vec operator*(Vec v, double a) { return v *= a; }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.n_; ++i)
      if (a.data_[i] != b.data_[i]) return false;
    return true;
  }

 private:
  std::array<double, kCapacity> data_;
  std::size_t n_;
};

}  // namespace odekit
