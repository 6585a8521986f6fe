#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace tgqpt {

using Complex = std::complex<double>;

/// Invalid input or violated precondition. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an optimization or fitting routine. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File-system or parse failure. CLI exit code 4.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Single-exciton basis label: outer-wall |O> or inner-wall |I>.
/// The ground state and the doubly-excited states never appear as
/// density-matrix indices; they enter only through energies and dipoles.
enum class Exciton : int { O = 0, I = 1 };

constexpr int index_of(Exciton e) noexcept { return static_cast<int>(e); }
constexpr Exciton other(Exciton e) noexcept {
  return e == Exciton::O ? Exciton::I : Exciton::O;
}
constexpr char to_char(Exciton e) noexcept {
  return e == Exciton::O ? 'O' : 'I';
}
Exciton exciton_from_char(char c);

/// Runs fn(i) for i in [0, n), spread over at most `jobs` threads.
/// Results must be written to index-addressed storage; iteration order
/// within a thread is ascending, so single-job runs are fully ordered.
void parallel_for_index(std::size_t n, int jobs,
                        const std::function<void(std::size_t)>& fn);

/// Hardware thread count, at least 1.
int default_jobs();

}  // namespace tgqpt
