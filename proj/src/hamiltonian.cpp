#include "spinbath/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "spinbath/rng.hpp"

namespace spinbath {
namespace {

void check_bonds(const std::vector<Bond>& bonds, int n_first, int n_second, bool same_set,
                 const char* what) {
  std::set<std::pair<int, int>> seen;
  for (const Bond& b : bonds) {
    if (b.i < 0 || b.i >= n_first || b.j < 0 || b.j >= n_second) {
      throw ConfigError(std::string(what) + " bond (" + std::to_string(b.i) + ", " +
                        std::to_string(b.j) + ") has a site index out of range");
    }
    if (same_set && b.i == b.j) {
      throw ConfigError(std::string(what) + " bond joins site " + std::to_string(b.i) +
                        " to itself");
    }
    const std::pair<int, int> key =
        same_set ? std::pair<int, int>{std::min(b.i, b.j), std::max(b.i, b.j)}
                 : std::pair<int, int>{b.i, b.j};
    if (!seen.insert(key).second) {
      throw ConfigError(std::string(what) + " bond (" + std::to_string(b.i) + ", " +
                        std::to_string(b.j) + ") appears twice");
    }
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.z)) {
      throw ConfigError(std::string(what) + " bond has a non-finite coupling");
    }
  }
}

BondOperator::Term make_term(int bit_i, int bit_j, const Bond& b, double scale) {
  const double x = scale * b.x;
  const double y = scale * b.y;
  const double z = scale * b.z;
  BondOperator::Term t;
  t.mask_i = std::uint64_t{1} << bit_i;
  t.mask_j = std::uint64_t{1} << bit_j;
  t.coefficients = {-0.25 * z, -0.25 * (x - y), 0.25 * z, -0.25 * (x + y)};
  t.norm_bound = 0.25 * (std::abs(x) + std::abs(y) + std::abs(z));
  return t;
}

}  // namespace

void SpinModel::validate(int max_spins) const {
  if (n_system < 1) throw ConfigError("n_system must be at least 1");
  if (n_env < 0) throw ConfigError("n_env must be non-negative");
  if (n_total() > max_spins) {
    throw SizeError("model has " + std::to_string(n_total()) + " spins; the cap is " +
                    std::to_string(max_spins));
  }
  if (!std::isfinite(lambda) || !std::isfinite(coupling_offset)) {
    throw ConfigError("lambda and coupling_offset must be finite");
  }
  check_bonds(system_bonds, n_system, n_system, true, "system");
  check_bonds(env_bonds, n_env, n_env, true, "environment");
  check_bonds(coupling_bonds, n_system, n_env, false, "coupling");
}

std::string to_string(Part part) {
  switch (part) {
    case Part::System: return "S";
    case Part::Environment: return "E";
    case Part::Coupling: return "SE";
    case Part::Full: return "FULL";
  }
  return "?";
}

Part parse_part(const std::string& text) {
  if (text == "S") return Part::System;
  if (text == "E") return Part::Environment;
  if (text == "SE") return Part::Coupling;
  if (text == "FULL") return Part::Full;
  throw ConfigError("unknown Hamiltonian part '" + text + "'");
}

SpinModel build_ring_model(int n_system, int n_env, double j_system,
                           std::uint64_t coupling_seed, std::uint64_t env_seed,
                           double lambda) {
  if (n_system < 2 || n_env < 2) {
    throw ConfigError("ring model needs at least two system and two environment spins");
  }
  constexpr double kRange = 4.0 / 3.0;
  SpinModel m;
  m.n_system = n_system;
  m.n_env = n_env;
  m.lambda = lambda;
  for (int i = 0; i + 1 < n_system; ++i) {
    m.system_bonds.push_back({i, i + 1, j_system, j_system, j_system});
  }
  CounterRng env_rng(env_seed);
  for (int i = 0; i < n_env; ++i) {
    for (int j = i + 1; j < n_env; ++j) {
      const double x = env_rng.uniform(-kRange, kRange);
      const double y = env_rng.uniform(-kRange, kRange);
      const double z = env_rng.uniform(-kRange, kRange);
      m.env_bonds.push_back({i, j, x, y, z});
    }
  }
  CounterRng coupling_rng(coupling_seed);
  const std::pair<int, int> ends[2] = {{n_system - 1, 0}, {0, n_env - 1}};
  for (auto [s, e] : ends) {
    const double x = coupling_rng.uniform(-kRange, kRange);
    const double y = coupling_rng.uniform(-kRange, kRange);
    const double z = coupling_rng.uniform(-kRange, kRange);
    m.coupling_bonds.push_back({s, e, x, y, z});
  }
  m.validate();
  return m;
}

SpinModel build_chain_model(int n_system, int n_env, double j_iso, double omega_iso,
                            double delta_iso, double lambda) {
  if (n_system < 1 || n_env < 1) {
    throw ConfigError("chain model needs at least one system and one environment spin");
  }
  SpinModel m;
  m.n_system = n_system;
  m.n_env = n_env;
  m.lambda = lambda;
  for (int i = 0; i + 1 < n_system; ++i) {
    m.system_bonds.push_back({i, i + 1, j_iso, j_iso, j_iso});
  }
  for (int i = 0; i + 1 < n_env; ++i) {
    m.env_bonds.push_back({i, i + 1, omega_iso, omega_iso, omega_iso});
  }
  m.coupling_bonds.push_back({n_system - 1, 0, delta_iso, delta_iso, delta_iso});
  m.validate();
  return m;
}

BondOperator BondOperator::compile(const SpinModel& model, Part part, Space space) {
  model.validate();
  BondOperator op;
  const bool local = space == Space::Local;
  if (local && (part == Part::Coupling || part == Part::Full)) {
    throw ConfigError("only the S and E parts have a local space");
  }
  const int s_off = 0;
  const int e_off = local ? 0 : model.n_system;
  if (local) {
    op.n_bits_ = part == Part::System ? model.n_system : model.n_env;
  } else {
    op.n_bits_ = model.n_total();
  }

  auto add = [&](const std::vector<Bond>& bonds, int off_i, int off_j, double scale) {
    if (scale == 0.0) return;
    for (const Bond& b : bonds) {
      if (b.is_zero()) continue;
      op.terms_.push_back(make_term(b.i + off_i, b.j + off_j, b, scale));
    }
  };
  const bool s = part == Part::System || part == Part::Full;
  const bool e = part == Part::Environment || part == Part::Full;
  const bool se = part == Part::Coupling || part == Part::Full;
  const double se_scale = part == Part::Full ? model.lambda : 1.0;
  if (s) add(model.system_bonds, s_off, s_off, 1.0);
  if (e) add(model.env_bonds, e_off, e_off, 1.0);
  if (se) {
    add(model.coupling_bonds, s_off, e_off, se_scale);
    op.offset_ = se_scale * model.coupling_offset;
  }
  return op;
}

void BondOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != dim() || out.size() != dim()) {
    throw DimensionError("operator on " + std::to_string(n_bits_) +
                         " spins applied to a vector of size " + std::to_string(in.size()));
  }
  const auto& k = kernels::active();
  std::fill(out.begin(), out.end(), cplx{});
  for (const Term& t : terms_) {
    k.bond_apply(in.data(), out.data(), dim(), t.mask_i, t.mask_j, t.coefficients);
  }
  if (offset_ != 0.0) k.axpy(cplx{offset_, 0.0}, in.data(), out.data(), dim());
}

EnergyBounds BondOperator::gershgorin_bounds() const {
  double r = 0.0;
  for (const Term& t : terms_) r += t.norm_bound;
  return {offset_ - r, offset_ + r};
}

Eigen::MatrixXd BondOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto u = static_cast<std::uint64_t>(k);
    h(k, k) += offset_;
    for (const Term& t : terms_) {
      const bool equal = ((u & t.mask_i) != 0) == ((u & t.mask_j) != 0);
      const auto& c = t.coefficients;
      h(k, k) += equal ? c.equal_diag : c.differ_diag;
      h(static_cast<Eigen::Index>(u ^ (t.mask_i | t.mask_j)), k) +=
          equal ? c.equal_flip : c.differ_flip;
    }
  }
  return h;
}

CVector apply_hamiltonian(const SpinModel& model, Part part, std::span<const cplx> state) {
  const BondOperator op = BondOperator::compile(model, part);
  CVector out(op.dim());
  op.apply(state, out);
  return out;
}

EnergyBounds energy_bounds(const SpinModel& model, Part part) {
  return BondOperator::compile(model, part).gershgorin_bounds();
}

EnergyBounds tightened_energy_bounds(const BondOperator& op, std::uint64_t seed,
                                     int max_iterations, double margin) {
  const EnergyBounds outer = op.gershgorin_bounds();
  if (outer.width() == 0.0) return outer;
  const std::uint64_t n = op.dim();
  const auto& k = kernels::active();

  CVector v(n), w(n), prev(n);
  CounterRng rng(seed);
  for (auto& a : v) {
    auto [re, im] = rng.gaussian_pair();
    a = {re, im};
  }
  k.scale(1.0 / std::sqrt(k.norm2(v.data(), n)), v.data(), n);

  std::vector<double> alpha, beta;
  const int max_m = static_cast<int>(std::min<std::uint64_t>(max_iterations, n));
  double lo = outer.lower, hi = outer.upper;
  for (int m = 0; m < max_m; ++m) {
    op.apply(v, w);
    const double a = k.dot(v.data(), w.data(), n).real();
    alpha.push_back(a);
    k.axpy(-a, v.data(), w.data(), n);
    if (m > 0) k.axpy(-beta.back(), prev.data(), w.data(), n);
    const double b = std::sqrt(k.norm2(w.data(), n));

    const bool last = m + 1 == max_m || b < 1e-12 * outer.width();
    if (last || (m >= 8 && m % 8 == 0)) {
      const auto sz = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), sz);
      Eigen::VectorXd sub(std::max<Eigen::Index>(sz - 1, 0));
      for (Eigen::Index i = 0; i + 1 < sz; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double r_lo = b * std::abs(tri.eigenvectors()(sz - 1, 0));
      const double r_hi = b * std::abs(tri.eigenvectors()(sz - 1, sz - 1));
      const double theta_lo = tri.eigenvalues()(0);
      const double theta_hi = tri.eigenvalues()(sz - 1);
      const double pad = margin * std::max(theta_hi - theta_lo, 1e-300);
      lo = std::max(outer.lower, theta_lo - r_lo - pad);
      hi = std::min(outer.upper, theta_hi + r_hi + pad);
      const double tol = 1e-10 * outer.width();
      if (last || (r_lo < tol && r_hi < tol)) break;
    }
    beta.push_back(b);
    std::swap(prev, v);
    // v <- w / b
    std::swap(v, w);
    k.scale(1.0 / b, v.data(), n);
  }
  if (hi <= lo) hi = lo + 1e-12 * outer.width();
  return {lo, hi};
}

}  // namespace spinbath
