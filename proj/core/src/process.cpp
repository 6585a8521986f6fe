#include "tgqpt/process.hpp"

#include <Eigen/Eigenvalues>

namespace tgqpt {

namespace {

Complex conj(const Complex& z) { return std::conj(z); }

}  // namespace

const std::array<std::string, 16>& process_vector_names() {
  static const std::array<std::string, 16> names = {
      "chi_OOOO",    "chi_IIOO",    "Re_chi_OIOO", "Im_chi_OIOO",
      "chi_OOII",    "chi_IIII",    "Re_chi_OIII", "Im_chi_OIII",
      "Re_chi_OOOI", "Re_chi_IIOI", "Re_chi_OIOI", "Re_chi_IOOI",
      "Im_chi_OOOI", "Im_chi_IIOI", "Im_chi_OIOI", "Im_chi_IOOI"};
  return names;
}

ProcessMatrix::ProcessMatrix() : x_(ProcessVector::Zero()) {}

ProcessMatrix ProcessMatrix::from_vector(const ProcessVector& x) {
  for (int k = 0; k < 16; ++k) {
    if (!std::isfinite(x[k])) {
      throw ValidationError("process parameters must be finite");
    }
  }
  ProcessMatrix m;
  m.x_ = x;
  return m;
}

ProcessMatrix ProcessMatrix::identity() {
  ProcessVector x = ProcessVector::Zero();
  x[0] = 1.0;   // chi_OOOO
  x[5] = 1.0;   // chi_IIII
  x[10] = 1.0;  // Re chi_OIOI
  return from_vector(x);
}

Complex ProcessMatrix::operator()(Exciton i, Exciton j, Exciton q,
                                  Exciton p) const {
  const Complex oi_oo{x_[2], x_[3]};
  const Complex oi_ii{x_[6], x_[7]};
  const Complex oo_oi{x_[8], x_[12]};
  const Complex ii_oi{x_[9], x_[13]};
  const Complex oi_oi{x_[10], x_[14]};
  const Complex io_oi{x_[11], x_[15]};
  const int key = index_of(i) * 8 + index_of(j) * 4 + index_of(q) * 2 + index_of(p);
  switch (key) {
    case 0b0000: return Complex{x_[0], 0.0};  // chi_OOOO
    case 0b0001: return oo_oi;                // chi_OOOI
    case 0b0010: return conj(oo_oi);          // chi_OOIO
    case 0b0011: return Complex{x_[4], 0.0};  // chi_OOII
    case 0b0100: return oi_oo;                // chi_OIOO
    case 0b0101: return oi_oi;                // chi_OIOI
    case 0b0110: return conj(io_oi);          // chi_OIIO
    case 0b0111: return oi_ii;                // chi_OIII
    case 0b1000: return conj(oi_oo);          // chi_IOOO
    case 0b1001: return io_oi;                // chi_IOOI
    case 0b1010: return conj(oi_oi);          // chi_IOIO
    case 0b1011: return conj(oi_ii);          // chi_IOII
    case 0b1100: return Complex{x_[1], 0.0};  // chi_IIOO
    case 0b1101: return ii_oi;                // chi_IIOI
    case 0b1110: return conj(ii_oi);          // chi_IIIO
    default:     return Complex{x_[5], 0.0};  // chi_IIII
  }
}

double ProcessMatrix::population_sum(Exciton q) const {
  return q == Exciton::O ? x_[0] + x_[1] : x_[4] + x_[5];
}

Eigen::Matrix2cd ProcessMatrix::leakage_block() const {
  const Complex transfer_oi = Complex{x_[8], x_[12]} + Complex{x_[9], x_[13]};
  Eigen::Matrix2cd leak;
  leak(0, 0) = 1.0 - (x_[0] + x_[1]);
  leak(1, 1) = 1.0 - (x_[4] + x_[5]);
  leak(0, 1) = -transfer_oi;
  leak(1, 0) = -std::conj(transfer_oi);
  return leak;
}

bool ProcessMatrix::is_trace_nonincreasing(double tol) const {
  for (Exciton q : {Exciton::O, Exciton::I}) {
    const double s = population_sum(q);
    if (s < -tol || s > 1.0 + tol) return false;
  }
  return true;
}

ChoiMatrix::ChoiMatrix(const Eigen::Matrix4cd& m, double hermiticity_tol)
    : m_(m) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) {
        throw ValidationError("Choi matrix entries must be finite");
      }
      if (std::abs(m(r, c) - std::conj(m(c, r))) > hermiticity_tol) {
        throw ValidationError("Choi matrix is not Hermitian within tolerance");
      }
    }
  }
}

Eigen::Vector4d ChoiMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m_,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double ChoiMatrix::min_eigenvalue() const { return eigenvalues()(0); }

ChoiMatrix choi_from_process(const ProcessMatrix& chi) {
  Eigen::Matrix4cd m;
  for (Exciton i : {Exciton::O, Exciton::I}) {
    for (Exciton q : {Exciton::O, Exciton::I}) {
      for (Exciton j : {Exciton::O, Exciton::I}) {
        for (Exciton p : {Exciton::O, Exciton::I}) {
          m(ChoiMatrix::pair_index(i, q), ChoiMatrix::pair_index(j, p)) =
              chi(i, j, q, p);
        }
      }
    }
  }
  return ChoiMatrix(m);
}

ProcessMatrix process_from_choi(const ChoiMatrix& c) {
  const Eigen::Matrix4cd& m = c.matrix();
  ProcessVector x;
  x[0] = m(0, 0).real();   // chi_OOOO   (rows/cols: 0=(O,O) 1=(O,I) 2=(I,O) 3=(I,I))
  x[1] = m(2, 2).real();   // chi_IIOO
  x[2] = m(0, 2).real();   // chi_OIOO
  x[3] = m(0, 2).imag();
  x[4] = m(1, 1).real();   // chi_OOII
  x[5] = m(3, 3).real();   // chi_IIII
  x[6] = m(1, 3).real();   // chi_OIII
  x[7] = m(1, 3).imag();
  x[8] = m(0, 1).real();   // chi_OOOI
  x[12] = m(0, 1).imag();
  x[9] = m(2, 3).real();   // chi_IIOI
  x[13] = m(2, 3).imag();
  x[10] = m(0, 3).real();  // chi_OIOI
  x[14] = m(0, 3).imag();
  x[11] = m(2, 1).real();  // chi_IOOI
  x[15] = m(2, 1).imag();
  return ProcessMatrix::from_vector(x);
}

bool is_completely_positive(const ProcessMatrix& chi, double tol) {
  return choi_from_process(chi).min_eigenvalue() >= -tol;
}

}  // namespace tgqpt
