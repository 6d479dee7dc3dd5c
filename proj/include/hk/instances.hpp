#pragma once

// Instance generators and the analytic regular n-gon recurrence.

#include "hk/analysis.hpp"
#include "hk/noisy.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hk {

// Agents at 0, 1, ..., n-1.
template <Scalar S>
Configuration<S> unit_line(std::size_t n) {
  if (n == 0) throw std::invalid_argument("unit_line needs n >= 1");
  std::vector<S> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(S(static_cast<long>(i)));
  return Configuration<S>::line(xs);
}

inline double ngon_circumradius(std::size_t n) {
  return 1.0 / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n)));
}

namespace detail {

// r * (cos, sin)(2 pi i / n), reducing the angle to [0, pi/4] with exact
// integer arithmetic first so large angles lose no accuracy.
inline std::vector<double> circle_point(std::size_t i, std::size_t n, double r) {
  const std::size_t quarter = (4 * i) / n;
  std::size_t rem = 4 * i - quarter * n;  // angle within quadrant = (pi/2) rem / n
  const bool complement = 2 * rem > n;
  if (complement) rem = n - rem;
  const double phi = std::numbers::pi * static_cast<double>(rem) / (2.0 * static_cast<double>(n));
  double c = std::cos(phi), s = std::sin(phi);
  if (complement) std::swap(c, s);
  switch (quarter % 4) {
    case 0: return {r * c, r * s};
    case 1: return {-r * s, r * c};
    case 2: return {-r * c, -r * s};
    default: return {r * s, -r * c};
  }
}

}  // namespace detail

// Regular n-gon with unit side centred at the origin; agent i at angle 2 pi i / n.
template <Scalar S>
Configuration<S> ngon(std::size_t n) {
  if constexpr (is_exact_v<S>) {
    throw std::invalid_argument("ngon has irrational vertices and is float-mode only");
  } else {
    if (n < 4) throw std::invalid_argument("ngon needs n >= 4");
    const double r = ngon_circumradius(n);
    std::vector<Point<S>> pos;
    for (std::size_t i = 0; i < n; ++i) pos.push_back(detail::circle_point(i, n, r));
    return Configuration<S>(std::move(pos), 2);
  }
}

namespace detail {

// Uniform draw in [0, span]: u / 2^32 * span in exact mode (denominator
// <= 2^32 times that of span), a 53-bit fraction of span in float mode.
template <Scalar S>
S uniform_coordinate(std::mt19937_64& rng, const S& span) {
  if constexpr (is_exact_v<S>) {
    const std::uint64_t u = rng() >> 32;
    Rational frac(mpz_class(static_cast<unsigned long>(u)), mpz_class(1) << 32);
    frac.canonicalize();
    return Rational(frac * span);
  } else {
    return uniform01(rng) * span;
  }
}

}  // namespace detail

template <Scalar S>
Configuration<S> random_box(std::size_t n, std::size_t d, double side, std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("random_box needs n >= 1 and d >= 1");
  if (!(side > 0)) throw std::invalid_argument("side length must be positive");
  std::mt19937_64 rng(seed);
  const S span = ScalarTraits<S>::from_double(side);
  std::vector<Point<S>> pos(n, Point<S>(d));
  for (auto& p : pos)
    for (auto& v : p) v = detail::uniform_coordinate(rng, span);
  return Configuration<S>(std::move(pos), d);
}

template <Scalar S>
Configuration<S> random_interval(std::size_t n, double span, std::uint64_t seed) {
  return random_box<S>(n, 1, span, seed);
}

// eta_i = eta * u / 2^16 with u uniform in [1, 2^16 - 1], so 0 < eta_i < eta.
template <Scalar S>
NoisyParams<S> random_etas(std::size_t n, const S& eta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NoisyParams<S> out{eta, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const long u = 1 + static_cast<long>(rng() % 65535);
    out.etas.push_back(S(eta * ScalarTraits<S>::from_ratio(u, 65536)));
  }
  out.validate(n);
  return out;
}

// --- regular n-gon recurrence ----------------------------------------------

struct NGonOracleState {
  std::size_t n = 0;
  double side = 1.0;
  std::size_t t = 0;
  bool valid = true;
};

// Next-nearest vertices of a regular n-gon with this side are more than 1 apart,
// so each vertex averages only itself and its two adjacent vertices.
inline bool ngon_rule_applies(std::size_t n, double side) {
  return 2.0 * side * std::cos(std::numbers::pi / static_cast<double>(n)) > 1.0;
}

// OA'/OA = 1 - 2 sin(pi/n) sin(2 pi/n) / (3 sin(pi (n-2) / (2n))).
inline double ngon_shrink_factor(std::size_t n) {
  const double pi = std::numbers::pi;
  const double nn = static_cast<double>(n);
  return 1.0 - 2.0 * std::sin(pi / nn) * std::sin(2.0 * pi / nn) /
                   (3.0 * std::sin(pi * (nn - 2.0) / (2.0 * nn)));
}

inline NGonOracleState ngon_oracle_start(std::size_t n) {
  if (n < 4) throw std::invalid_argument("ngon oracle needs n >= 4");
  return NGonOracleState{n, 1.0, 0, ngon_rule_applies(n, 1.0)};
}

inline NGonOracleState ngon_oracle_step(const NGonOracleState& s) {
  if (!s.valid) throw std::logic_error("ngon oracle stepped past its validity horizon");
  NGonOracleState next = s;
  next.side = s.side * ngon_shrink_factor(s.n);
  next.t = s.t + 1;
  next.valid = ngon_rule_applies(s.n, next.side);
  return next;
}

// ceil(n^2 / 28).
inline std::size_t ngon_lower_bound(std::size_t n) {
  if (n < 8) throw std::invalid_argument("ngon lower bound is stated for n >= 8");
  return (n * n + 27) / 28;
}

struct PolygonShape {
  double min_side = 0.0;
  double max_side = 0.0;
  double mean_side = 0.0;
  double center_drift = 0.0;  // distance of the vertex centroid from the origin
  double mean_radius = 0.0;

  double spread() const { return max_side - min_side; }
};

// Side lengths between agents i and i+1 (mod n) of a planar configuration.
template <Scalar S>
PolygonShape polygon_shape(const Configuration<S>& c) {
  if (c.dim != 2) throw std::invalid_argument("polygon_shape needs d = 2");
  PolygonShape s;
  const std::size_t n = c.size();
  s.min_side = std::numeric_limits<double>::infinity();
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = c.positions[i];
    const auto& b = c.positions[(i + 1) % n];
    const double dx = to_double(a[0]) - to_double(b[0]);
    const double dy = to_double(a[1]) - to_double(b[1]);
    const double side = std::hypot(dx, dy);
    s.min_side = std::min(s.min_side, side);
    s.max_side = std::max(s.max_side, side);
    s.mean_side += side / static_cast<double>(n);
    cx += to_double(a[0]) / static_cast<double>(n);
    cy += to_double(a[1]) / static_cast<double>(n);
    s.mean_radius += std::hypot(to_double(a[0]), to_double(a[1])) / static_cast<double>(n);
  }
  s.center_drift = std::hypot(cx, cy);
  return s;
}

// Re-projects onto the exact regular polygon with the measured mean radius,
// keeping agent i at angle 2 pi i / n.
inline Configuration<double> symmetrize_ngon(const Configuration<double>& c) {
  const std::size_t n = c.size();
  const double r = polygon_shape(c).mean_radius;
  Configuration<double> out = c;
  for (std::size_t i = 0; i < n; ++i) {
    out.positions[i] = detail::circle_point(i, n, r);
  }
  return out;
}

// HK steps on the n-gon, re-symmetrized after every step.
inline Trajectory<double> simulate_ngon_symmetrized(std::size_t n, const SimParams& p,
                                                    MonitorList<double>* monitors = nullptr) {
  return simulate_with(
      ngon<double>(n), p,
      [](const Configuration<double>& c, const SimParams& q) {
        auto next = symmetrize_ngon(detail::mean_update(c, neighbor_graph(c, q)));
        auto report = describe_step(c, next, q);
        return std::pair{std::move(next), std::move(report)};
      },
      monitors);
}

}  // namespace hk
