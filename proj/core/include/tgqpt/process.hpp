#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "tgqpt/common.hpp"

namespace tgqpt {

/// The 16 independent real parameters of a process matrix, ordered as the
/// inversion unknown vector [X_OO | X_II | X_OI]:
///   0  chi_OOOO        4  chi_OOII        8  Re chi_OOOI   12  Im chi_OOOI
///   1  chi_IIOO        5  chi_IIII        9  Re chi_IIOI   13  Im chi_IIOI
///   2  Re chi_OIOO     6  Re chi_OIII    10  Re chi_OIOI   14  Im chi_OIOI
///   3  Im chi_OIOO     7  Im chi_OIII    11  Re chi_IOOI   15  Im chi_IOOI
using ProcessVector = Eigen::Matrix<double, 16, 1>;

/// Human-readable name of each ProcessVector component.
const std::array<std::string, 16>& process_vector_names();

class ChoiMatrix;

/// Propagator of density-matrix elements over the waiting time on the
/// two-state basis {|O>, |I>}: chi_{ijqp} is the amplitude for
/// |q><p| -> |i><j|. Final-state indices come first, initial-state
/// indices last, as in the supplementary-material convention; the
/// main-text ordering chi_{qpij} is not used anywhere in this codebase.
///
/// Construction goes through the 16 real parameters, so the Hermiticity
/// symmetry chi_{ijqp} = conj(chi_{jipq}) holds by representation and a
/// violating instance is unrepresentable.
class ProcessMatrix {
public:
  /// The zero map (everything decayed out of the SEM).
  ProcessMatrix();

  static ProcessMatrix from_vector(const ProcessVector& x);

  /// chi_{ijqp}(0) = delta_iq delta_jp.
  static ProcessMatrix identity();

  const ProcessVector& to_vector() const { return x_; }

  /// chi_{ijqp}.
  Complex operator()(Exciton i, Exciton j, Exciton q, Exciton p) const;

  /// chi_OOqq + chi_IIqq, the surviving exciton population for the
  /// initial population |q><q|. In [0, 1] for a physical map; the
  /// remainder is ground-state recovery.
  double population_sum(Exciton q) const;

  /// chi_{gg,qp} = delta_qp - chi_OOqp - chi_IIqp as a Hermitian 2x2
  /// matrix (rows q, columns p). PSD of this block together with PSD of
  /// the Choi matrix is the trace-nonincreasing physicality condition.
  Eigen::Matrix2cd leakage_block() const;

  bool is_trace_nonincreasing(double tol = 1e-9) const;

  bool operator==(const ProcessMatrix& rhs) const { return x_ == rhs.x_; }

private:
  ProcessVector x_;
};

/// 4x4 Hermitian reshaping of a process matrix with row index (i, q) and
/// column index (j, p), both pairs enumerated O-before-I, so
/// C[(i,q),(j,p)] = chi_{ijqp}. The map is completely positive iff this
/// matrix is positive semidefinite. This class is the single owner of the
/// index convention; nothing else reimplements the reshape.
class ChoiMatrix {
public:
  /// Validates Hermiticity within `hermiticity_tol` (absolute, entrywise)
  /// and throws ValidationError on corrupted input.
  explicit ChoiMatrix(const Eigen::Matrix4cd& m,
                      double hermiticity_tol = 1e-12);

  const Eigen::Matrix4cd& matrix() const { return m_; }

  /// Eigenvalues in ascending order.
  Eigen::Vector4d eigenvalues() const;
  double min_eigenvalue() const;

  /// Row/column index of the pair (first, second).
  static int pair_index(Exciton first, Exciton second) {
    return 2 * index_of(first) + index_of(second);
  }

private:
  Eigen::Matrix4cd m_;
};

ChoiMatrix choi_from_process(const ProcessMatrix& chi);

/// Exact inverse of choi_from_process (index permutation only).
ProcessMatrix process_from_choi(const ChoiMatrix& c);

/// Complete positivity check: min Choi eigenvalue >= -tol.
bool is_completely_positive(const ProcessMatrix& chi, double tol = 1e-9);

}  // namespace tgqpt
