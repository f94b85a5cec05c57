#pragma once

// Independent reference constructions for the tests: dense Hamiltonians from
// Kronecker products of spin-1/2 matrices, and small helpers.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/hamiltonian.hpp"
#include "spinbath/rng.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline MatrixXcd single(char axis) {
  MatrixXcd s(2, 2);
  const cplx i(0, 1);
  if (axis == 'x') s << 0, 0.5, 0.5, 0;
  if (axis == 'y') s << 0, -0.5 * i, 0.5 * i, 0;
  if (axis == 'z') s << 0.5, 0, 0, -0.5;
  if (axis == '1') s = MatrixXcd::Identity(2, 2);
  return s;
}

// Kronecker product of single-spin factors; factor[b] acts on spin b, and
// bit b of the index is spin b, so the last spin is the leftmost factor.
inline MatrixXcd kron_chain(const std::vector<MatrixXcd>& factor) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (auto f = factor.rbegin(); f != factor.rend(); ++f) {
    MatrixXcd k(out.rows() * 2, out.cols() * 2);
    for (int r = 0; r < out.rows(); ++r) {
      for (int c = 0; c < out.cols(); ++c) k.block(2 * r, 2 * c, 2, 2) = out(r, c) * *f;
    }
    out = std::move(k);
  }
  return out;
}

// S^a on spin `site` of an n-spin register.
inline MatrixXcd spin_op(int n, int site, char axis) {
  std::vector<MatrixXcd> f(n, single('1'));
  f[site] = single(axis);
  return kron_chain(f);
}

inline MatrixXcd bond_matrix(int n, int a, int b, const spinbath::Bond& bond) {
  MatrixXcd h = MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  const double c[3] = {bond.x, bond.y, bond.z};
  const char axes[3] = {'x', 'y', 'z'};
  for (int k = 0; k < 3; ++k) {
    if (c[k] == 0.0) continue;
    std::vector<MatrixXcd> f(n, single('1'));
    f[a] = single(axes[k]);
    f[b] = single(axes[k]);
    h -= c[k] * kron_chain(f);
  }
  return h;
}

// Rotation by pi about `axis` on the first `n_rot` spins, 2 S^a per spin up
// to a global phase.
inline MatrixXcd pi_rotation(int n, int n_rot, char axis) {
  std::vector<MatrixXcd> f(n, single('1'));
  for (int i = 0; i < n_rot; ++i) f[i] = 2.0 * single(axis);
  return kron_chain(f);
}

// Dense H_part over the whole entirety.
inline MatrixXcd dense(const spinbath::SpinModel& m, spinbath::Part part) {
  using spinbath::Part;
  const int n = m.n_total();
  MatrixXcd h = MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  if (part == Part::System || part == Part::Full) {
    for (const auto& b : m.system_bonds) h += bond_matrix(n, b.i, b.j, b);
  }
  if (part == Part::Environment || part == Part::Full) {
    for (const auto& b : m.env_bonds) h += bond_matrix(n, m.n_system + b.i, m.n_system + b.j, b);
  }
  if (part == Part::Coupling || part == Part::Full) {
    const double scale = part == Part::Full ? m.lambda : 1.0;
    MatrixXcd se = MatrixXcd::Zero(h.rows(), h.cols());
    for (const auto& b : m.coupling_bonds) se += bond_matrix(n, b.i, m.n_system + b.j, b);
    se += m.coupling_offset * MatrixXcd::Identity(h.rows(), h.cols());
    h += scale * se;
  }
  return h;
}

inline Eigen::VectorXcd random_vector(std::uint64_t dim, std::uint64_t seed) {
  spinbath::CounterRng rng(seed);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return v;
}

inline spinbath::CVector to_cvector(const Eigen::VectorXcd& v) {
  return spinbath::CVector(v.data(), v.data() + v.size());
}

inline double max_diff(const spinbath::CVector& a, const Eigen::VectorXcd& b) {
  double d = 0;
  for (Eigen::Index k = 0; k < b.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

// e^{-beta H / 2} psi through Eigen's Hermitian eigensolver.
inline Eigen::VectorXcd dense_thermal(const MatrixXcd& h, const Eigen::VectorXcd& psi,
                                      double beta) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  const Eigen::VectorXd w = (-0.5 * beta * (es.eigenvalues().array() - es.eigenvalues()(0))).exp();
  return es.eigenvectors() * (w.cast<cplx>().asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

inline Eigen::VectorXcd dense_evolve(const MatrixXcd& h, const Eigen::VectorXcd& psi, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  Eigen::VectorXcd phase(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phase.size(); ++k) phase(k) = std::exp(cplx(0, -t * es.eigenvalues()(k)));
  return es.eigenvectors() * (phase.asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

}  // namespace oracle
