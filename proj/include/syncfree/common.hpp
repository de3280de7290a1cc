#pragma once

#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace syncfree {

inline constexpr const char* kToolVersion = "syncfree 0.1.0";

using Complex = std::complex<double>;

enum class TimeDomain { continuous, discrete };

inline std::string to_string(TimeDomain d) {
  return d == TimeDomain::continuous ? "continuous" : "discrete";
}

// Tolerance policy: rank decisions are relative (1e-8 of the largest
// singular value of the assembled matrix); membership on the stability
// boundary (Re s = 0, |z| = 1) uses absolute 1e-7.
inline constexpr double kRankRelTol = 1e-8;
inline constexpr double kBoundaryTol = 1e-7;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class EigensolverFailure : public Error {
 public:
  explicit EigensolverFailure(const std::string& what) : Error(what) {}
};

class BoundViolation : public Error {
 public:
  BoundViolation(int agent, double q, double din)
      : Error("local bound q[" + std::to_string(agent) + "] = " + std::to_string(q) +
              " does not exceed in-degree " + std::to_string(din)),
        agent_index(agent) {}
  int agent_index;
};

class NotNeutrallyStable : public Error {
 public:
  NotNeutrallyStable() : Error("matrix is not neutrally stable") {}
};

class IllConditionedBasis : public Error {
 public:
  explicit IllConditionedBasis(double cond)
      : Error("diagonalizing transform condition number " + std::to_string(cond) +
              " exceeds 1e8"),
        condition_number(cond) {}
  double condition_number;
};

class NotDetectable : public Error {
 public:
  NotDetectable() : Error("pair (A, C) is not detectable") {}
};

class NotHurwitz : public Error {
 public:
  explicit NotHurwitz(double abscissa)
      : Error("matrix is not Hurwitz (spectral abscissa " + std::to_string(abscissa) + ")") {}
};

class NotSchur : public Error {
 public:
  explicit NotSchur(double radius)
      : Error("matrix is not Schur (spectral radius " + std::to_string(radius) + ")") {}
};

class RiccatiFailure : public Error {
 public:
  explicit RiccatiFailure(const std::string& what) : Error("Riccati solve failed: " + what) {}
};

class DeltaUnderflow : public Error {
 public:
  DeltaUnderflow() : Error("no dyadic delta >= 2^-60 satisfies the gain inequalities") {}
};

class GridSearchFailure : public Error {
 public:
  GridSearchFailure() : Error("no dyadic delta >= 2^-60 passes the unit-disc grid") {}
};

class ConditionsNotMet : public Error {
 public:
  explicit ConditionsNotMet(const std::string& condition)
      : Error("synthesis precondition not met: " + condition), condition_name(condition) {}
  std::string condition_name;
};

class NotScalarChannel : public Error {
 public:
  NotScalarChannel() : Error("operation requires a scalar input or output channel") {}
};

class PoleAt : public Error {
 public:
  explicit PoleAt(Complex s)
      : Error("evaluation point is a pole (s = " + std::to_string(s.real()) + " + " +
              std::to_string(s.imag()) + "i)"),
        location(s) {}
  Complex location;
};

class DegeneratePencil : public Error {
 public:
  DegeneratePencil() : Error("system pencil is identically rank-deficient") {}
};

class VariantMismatch : public Error {
 public:
  explicit VariantMismatch(const std::string& what) : Error(what) {}
};

class NoSpanningTree : public Error {
 public:
  NoSpanningTree() : Error("graph has no directed spanning tree") {}
};

class StepGuardViolation : public Error {
 public:
  StepGuardViolation(double h, double norm)
      : Error("step size " + std::to_string(h) + " violates h*||M|| <= 0.1 (||M|| ~ " +
              std::to_string(norm) + ")") {}
};

class StepSizeTooLarge : public Error {
 public:
  StepSizeTooLarge() : Error("integrator energy check diverged; reduce the step size") {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Deterministic RNG used everywhere randomness is needed. Draws are derived
// from the raw 64-bit stream so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  double normal() {
    // Box-Muller; discard the second variate for simplicity.
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Complex in_unit_disc() {
    while (true) {
      double re = uniform(-1.0, 1.0), im = uniform(-1.0, 1.0);
      if (re * re + im * im < 1.0) return {re, im};
    }
  }

 private:
  std::uint64_t state_;
};

// Fixed 17-significant-digit formatting used by every CSV emitter.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace syncfree
