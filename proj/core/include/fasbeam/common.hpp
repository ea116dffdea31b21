// Shared aliases, error type and deterministic RNG used across the library.
#ifndef FASBEAM_COMMON_HPP
#define FASBEAM_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fasbeam {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Arr = Eigen::ArrayXXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Thrown for contract violations (bad shapes, bad arguments, bad files).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

// mt19937_64 with hand-rolled draw helpers so that streams are identical
// across standard library implementations (std distributions are not
// portable). All randomness in the library flows through this type.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}

  // in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // in [0, n)
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double normal() {  // Box-Muller
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Child generator with a decorrelated seed; lets scenes/params own
  // independent streams derived from one master seed.
  Rng fork(std::uint64_t salt) {
    std::uint64_t s = eng_() ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
    return Rng(s);
  }

  std::string state() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }
  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> eng_;
    if (is.fail()) throw InvalidInput("Rng::set_state: malformed state string");
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace fasbeam

#endif  // FASBEAM_COMMON_HPP
