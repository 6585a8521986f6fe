#include "tgqpt/inversion.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tgqpt {

Complex CoefficientSet::by_letter(char letter) const {
  switch (letter) {
    case 'A': return a;
    case 'B': return b;
    case 'C': return c;
    case 'D': return d;
    case 'E': return e;
    case 'F': return f;
    case 'G': return g;
    case 'H': return h;
    default:
      throw ValidationError(std::string("unknown coefficient '") + letter + "'");
  }
}

CoefficientSet CoefficientSet::with_scaled(char letter, double factor) const {
  CoefficientSet out = *this;
  switch (letter) {
    case 'A': out.a *= factor; break;
    case 'B': out.b *= factor; break;
    case 'C': out.c *= factor; break;
    case 'D': out.d *= factor; break;
    case 'E': out.e *= factor; break;
    case 'F': out.f *= factor; break;
    case 'G': out.g *= factor; break;
    case 'H': out.h *= factor; break;
    default:
      throw ValidationError(std::string("unknown coefficient '") + letter + "'");
  }
  return out;
}

SignalSet normalize_signals(const SignalSet& raw, const PulsePair& pulses,
                            const DipoleSet& dipoles) {
  dipoles.validate();
  SignalSet out = raw;
  for (const PulseTriad& triad : PulseTriad::all()) {
    const double denom = pulses[index_of(triad.p)].peak_amplitude *
                         pulses[index_of(triad.q)].peak_amplitude *
                         pulses[index_of(triad.r)].peak_amplitude *
                         dipoles.mu_g(triad.p) * dipoles.mu_g(triad.q);
    if (denom == 0.0 || !std::isfinite(denom)) {
      throw ValidationError("zero normalization denominator for triad " +
                            triad.name());
    }
    for (DetectionSlot slot : kDetectionSlots) {
      auto& series =
          out.at(triad.canonical_index() * 3 + static_cast<int>(slot)).series;
      for (Complex& v : series) v /= denom;
    }
  }
  return out;
}

double dipole_ratio_from_absorption(std::span<const double> frequency,
                                    std::span<const double> absorbance,
                                    const EnergyLevelScheme& scheme) {
  if (frequency.size() != absorbance.size() || frequency.size() < 2) {
    throw ValidationError("absorption spectrum needs matching axes");
  }
  auto value_at = [&](double w) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frequency.size(); ++i) {
      const double d = std::abs(frequency[i] - w);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return absorbance[best];
  };
  const double a_O = value_at(scheme.w_Og());
  const double a_I = value_at(scheme.w_Ig());
  if (!(a_O > 0) || !(a_I > 0)) {
    throw ValidationError("absorption must be positive at both SEM lines");
  }
  return std::sqrt(a_O / a_I);
}

ExtractionResult extract_coefficients(const SignalSet& normalized) {
  auto at_t0 = [&](const char* triad, DetectionSlot slot) {
    return normalized.at(PulseTriad::from_name(triad), slot).series[0];
  };
  CoefficientSet c;
  c.a = at_t0("OOO", DetectionSlot::Population);
  c.b = at_t0("IIO", DetectionSlot::Population);
  c.c = at_t0("OOI", DetectionSlot::Population);
  c.d = at_t0("III", DetectionSlot::Population);
  c.e = at_t0("IOI", DetectionSlot::FinalOI);
  c.f = at_t0("IOO", DetectionSlot::FinalOI);
  c.g = at_t0("OIO", DetectionSlot::FinalIO);
  c.h = at_t0("OII", DetectionSlot::FinalIO);

  double max_mag = 0.0;
  for (char letter : {'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H'}) {
    const Complex v = c.by_letter(letter);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ValidationError(std::string("coefficient ") + letter +
                            " is not finite");
    }
    max_mag = std::max(max_mag, std::abs(v));
  }
  const double floor = 1e-10 * max_mag;
  if (std::abs(c.a) <= floor || std::abs(c.d) <= floor) {
    throw ValidationError(
        "population rows are degenerate: |A| or |D| vanishes at T = 0");
  }
  ExtractionResult out{c, {}};
  for (char letter : {'B', 'C', 'E', 'F', 'G', 'H'}) {
    if (std::abs(c.by_letter(letter)) <= floor) {
      out.warnings.push_back(std::string("coefficient ") + letter +
                             " vanishes at T = 0; its rows carry no signal");
    }
  }
  return out;
}

Eigen::Matrix<Complex, 6, 4> population_block(const CoefficientSet& c) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix<Complex, 6, 4> m = Eigen::Matrix<Complex, 6, 4>::Zero();
  m(0, 2) = c.g;  m(0, 3) = -i * c.g;
  m(1, 0) = c.a;  m(1, 1) = c.b;
  m(2, 2) = c.f;  m(2, 3) = i * c.f;
  m(3, 2) = c.h;  m(3, 3) = -i * c.h;
  m(4, 0) = c.c;  m(4, 1) = c.d;
  m(5, 2) = c.e;  m(5, 3) = i * c.e;
  return m;
}

Eigen::Matrix<Complex, 12, 8> coherence_block(const CoefficientSet& c) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix<Complex, 12, 8> m = Eigen::Matrix<Complex, 12, 8>::Zero();
  // OIO rows: prepared |I><O|, detected via conjugate coherence elements.
  m(0, 2) = c.g;  m(0, 6) = -i * c.g;
  m(1, 0) = c.a;  m(1, 1) = c.b;  m(1, 4) = -i * c.a;  m(1, 5) = -i * c.b;
  m(2, 3) = c.f;  m(2, 7) = -i * c.f;
  // OII rows.
  m(3, 2) = c.h;  m(3, 6) = -i * c.h;
  m(4, 0) = c.c;  m(4, 1) = c.d;  m(4, 4) = -i * c.c;  m(4, 5) = -i * c.d;
  m(5, 3) = c.e;  m(5, 7) = -i * c.e;
  // IOO rows: prepared |O><I|, direct coherence elements.
  m(6, 3) = c.g;  m(6, 7) = i * c.g;
  m(7, 0) = c.a;  m(7, 1) = c.b;  m(7, 4) = i * c.a;  m(7, 5) = i * c.b;
  m(8, 2) = c.f;  m(8, 6) = i * c.f;
  // IOI rows.
  m(9, 3) = c.h;  m(9, 7) = i * c.h;
  m(10, 0) = c.c; m(10, 1) = c.d; m(10, 4) = i * c.c; m(10, 5) = i * c.d;
  m(11, 2) = c.e; m(11, 6) = i * c.e;
  return m;
}

InversionSystem build_system(const CoefficientSet& c) {
  SystemMatrix m = SystemMatrix::Zero();
  const auto pop = population_block(c);
  m.block<6, 4>(0, 0) = pop;
  m.block<6, 4>(6, 4) = pop;
  m.block<12, 8>(12, 8) = coherence_block(c);
  return {m, c};
}

int signal_row(const PulseTriad& triad, DetectionSlot slot) {
  static const std::array<const char*, 8> row_order = {
      "OOO", "OOI", "IIO", "III", "OIO", "OII", "IOO", "IOI"};
  for (int i = 0; i < 8; ++i) {
    if (triad.name() == row_order[i]) return i * 3 + static_cast<int>(slot);
  }
  throw ValidationError("unreachable: unknown triad");
}

SignalVector assemble_signal_vector(const SignalSet& normalized,
                                    std::size_t t_index) {
  if (t_index >= normalized.grid().size()) {
    throw ValidationError("waiting-time index outside the grid");
  }
  SignalVector s;
  for (const PulseTriad& triad : PulseTriad::all()) {
    for (DetectionSlot slot : kDetectionSlots) {
      s[signal_row(triad, slot)] = normalized.at(triad, slot).series[t_index];
    }
  }
  return s;
}

double condition_number(const Eigen::MatrixXcd& m) {
  if (m.size() == 0 || m.isZero(0.0)) {
    throw ValidationError("condition number of an empty or zero matrix");
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double s_max = sv(0);
  const double s_min = sv(sv.size() - 1);
  if (s_min == 0.0) return std::numeric_limits<double>::infinity();
  return s_max / s_min;
}

namespace {

// Images of the 16 parameter directions in the two constraint spaces,
// plus their Gram matrices. The leakage map is affine:
// L(x) = I - sum_k x_k leak_basis[k].
struct ConeGeometry {
  std::array<Eigen::Matrix4cd, 16> choi_basis;
  std::array<Eigen::Matrix2cd, 16> leak_basis;
  Eigen::Matrix<double, 16, 16> gram_choi;
  Eigen::Matrix<double, 16, 16> gram_leak;

  static const ConeGeometry& instance() {
    static const ConeGeometry geom;
    return geom;
  }

 private:
  ConeGeometry() {
    for (int k = 0; k < 16; ++k) {
      ProcessVector e = ProcessVector::Zero();
      e[k] = 1.0;
      const ProcessMatrix unit = ProcessMatrix::from_vector(e);
      choi_basis[k] = choi_from_process(unit).matrix();
      leak_basis[k] = Eigen::Matrix2cd::Identity() - unit.leakage_block();
    }
    for (int k = 0; k < 16; ++k) {
      for (int l = 0; l < 16; ++l) {
        gram_choi(k, l) = frob(choi_basis[k], choi_basis[l]);
        gram_leak(k, l) = frob(leak_basis[k], leak_basis[l]);
      }
    }
  }

 public:
  template <typename M>
  static double frob(const M& a, const M& b) {
    return a.cwiseProduct(b.conjugate()).sum().real();
  }

  Eigen::Matrix4cd choi_of(const ProcessVector& x) const {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 16; ++k) m += x[k] * choi_basis[k];
    return m;
  }

  Eigen::Matrix2cd leakage_of(const ProcessVector& x) const {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    for (int k = 0; k < 16; ++k) m -= x[k] * leak_basis[k];
    return m;
  }

  ProcessVector choi_adjoint(const Eigen::Matrix4cd& v) const {
    ProcessVector out;
    for (int k = 0; k < 16; ++k) out[k] = frob(choi_basis[k], v);
    return out;
  }

  ProcessVector leak_adjoint(const Eigen::Matrix2cd& v) const {
    ProcessVector out;
    for (int k = 0; k < 16; ++k) out[k] = frob(leak_basis[k], v);
    return out;
  }
};

template <int N>
Eigen::Matrix<Complex, N, N> psd_project(
    const Eigen::Matrix<Complex, N, N>& m,
    Eigen::Matrix<double, N, 1>* eigenvalues = nullptr) {
  const Eigen::Matrix<Complex, N, N> sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, N, N>> es(sym);
  if (eigenvalues != nullptr) *eigenvalues = es.eigenvalues();
  const auto clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() *
         es.eigenvectors().adjoint();
}

template <int N>
double min_eig(const Eigen::Matrix<Complex, N, N>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, N, N>> es(
      0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

SolveResult solve_constrained(const SystemMatrix& M, const SignalVector& S,
                              const SolveOptions& options) {
  using RealDesign = Eigen::Matrix<double, 48, 16>;
  using RealData = Eigen::Matrix<double, 48, 1>;
  RealDesign A;
  A.topRows<24>() = M.real();
  A.bottomRows<24>() = M.imag();
  RealData b;
  b.head<24>() = S.real();
  b.tail<24>() = S.imag();

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0) || sv(sv.size() - 1) < 1e-12 * sv(0)) {
      throw SolverError("system matrix is rank-deficient; cannot invert");
    }
  }

  const ConeGeometry& geom = ConeGeometry::instance();
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  const double stop_tol = options.tolerance * scale;
  const double feasibility_margin = 5e-10;

  auto finish = [&](const ProcessVector& x, int iterations, bool converged,
                    double primal, double dual) {
    SolveResult r;
    r.x = x;
    r.chi = ProcessMatrix::from_vector(x);
    r.objective = (A * x - b).squaredNorm();
    r.iterations = iterations;
    r.converged = converged;
    r.primal_residual = primal;
    r.dual_residual = dual;
    Eigen::Vector4d eigs;
    psd_project<4>(geom.choi_of(x), &eigs);
    r.choi_eigenvalues = eigs;
    r.min_leakage_eigenvalue = min_eig<2>(geom.leakage_of(x));
    return r;
  };

  // Unconstrained solution first; when it is already physical the
  // projections are inactive and it is the exact optimum.
  const ProcessVector x_ls =
      A.colPivHouseholderQr().solve(b).eval();
  {
    const double choi_min = min_eig<4>(geom.choi_of(x_ls));
    const double leak_min =
        options.trace_constraint ? min_eig<2>(geom.leakage_of(x_ls)) : 0.0;
    const double margin = -1e-10 * scale;
    if (choi_min >= margin && leak_min >= margin) {
      return finish(x_ls, 0, true, 0.0, 0.0);
    }
  }

  // Operator splitting: least squares plus one consensus copy per cone.
  const bool trace = options.trace_constraint;
  double rho = 1.0;
  const double alpha = options.over_relaxation;

  const Eigen::Matrix<double, 16, 16> ata2 = 2.0 * A.transpose() * A;
  const ProcessVector atb2 = 2.0 * A.transpose() * b;
  Eigen::Matrix<double, 16, 16> gram = geom.gram_choi;
  if (trace) gram += geom.gram_leak;

  Eigen::LDLT<Eigen::Matrix<double, 16, 16>> solver(ata2 + rho * gram);
  auto refactor = [&] { solver.compute(ata2 + rho * gram); };

  ProcessVector x = x_ls;
  Eigen::Matrix4cd z1 = psd_project<4>(geom.choi_of(x));
  Eigen::Matrix4cd u1 = Eigen::Matrix4cd::Zero();
  Eigen::Matrix2cd z2 = trace ? psd_project<2>(geom.leakage_of(x))
                              : Eigen::Matrix2cd::Zero();
  Eigen::Matrix2cd u2 = Eigen::Matrix2cd::Zero();

  double primal = 0.0, dual = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    ProcessVector rhs = atb2 + rho * geom.choi_adjoint(z1 - u1);
    if (trace) {
      rhs += rho * geom.leak_adjoint(Eigen::Matrix2cd::Identity() - (z2 - u2));
    }
    x = solver.solve(rhs);

    const Eigen::Matrix4cd cx = geom.choi_of(x);
    const Eigen::Matrix4cd c_relaxed = alpha * cx + (1.0 - alpha) * z1;
    const Eigen::Matrix4cd z1_prev = z1;
    z1 = psd_project<4>(c_relaxed + u1);
    u1 += c_relaxed - z1;

    Eigen::Matrix2cd lx = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd z2_prev = z2;
    if (trace) {
      lx = geom.leakage_of(x);
      const Eigen::Matrix2cd l_relaxed = alpha * lx + (1.0 - alpha) * z2;
      z2 = psd_project<2>(l_relaxed + u2);
      u2 += l_relaxed - z2;
    }

    primal = std::sqrt((cx - z1).squaredNorm() +
                       (trace ? (lx - z2).squaredNorm() : 0.0));
    ProcessVector dual_vec = geom.choi_adjoint(z1 - z1_prev);
    if (trace) dual_vec -= geom.leak_adjoint(z2 - z2_prev);
    dual = rho * dual_vec.norm();

    if (primal < stop_tol && dual < stop_tol) {
      const double choi_min = min_eig<4>(cx);
      const double leak_min = trace ? min_eig<2>(lx) : 0.0;
      if (choi_min >= -feasibility_margin && leak_min >= -feasibility_margin) {
        return finish(x, it, true, primal, dual);
      }
    }

    if (it % 100 == 0) {
      if (primal > 10.0 * dual && rho < 1e6) {
        rho *= 2.0;
        u1 *= 0.5;
        u2 *= 0.5;
        refactor();
      } else if (dual > 10.0 * primal && rho > 1e-6) {
        rho *= 0.5;
        u1 *= 2.0;
        u2 *= 2.0;
        refactor();
      }
    }
  }
  return finish(x, options.max_iterations, false, primal, dual);
}

std::vector<SolveResult> solve_trajectory(const InversionSystem& system,
                                          const SignalSet& normalized,
                                          const SolveOptions& options,
                                          int jobs) {
  const std::size_t n = normalized.grid().size();
  std::vector<SolveResult> results(n);
  parallel_for_index(n, jobs, [&](std::size_t t) {
    results[t] = solve_constrained(
        system.M, assemble_signal_vector(normalized, t), options);
  });
  return results;
}

}  // namespace tgqpt
