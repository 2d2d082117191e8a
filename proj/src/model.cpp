#include "qdl/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

namespace qdl {

std::string to_string(PumpScheme scheme) { return scheme == PumpScheme::incoherent ? "incoherent" : "coherent"; }
std::string to_string(ModelForm form) { return form == ModelForm::full ? "full" : "effective"; }

const IncoherentPump& SystemParams::incoherent() const {
  const auto* p = std::get_if<IncoherentPump>(&pump);
  if (!p) throw InvalidArgument("parameter set uses coherent pumping");
  return *p;
}

const CoherentPump& SystemParams::coherent() const {
  const auto* p = std::get_if<CoherentPump>(&pump);
  if (!p) throw InvalidArgument("parameter set uses incoherent pumping");
  return *p;
}

void SystemParams::validate() const {
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite");
  };
  auto rate = [&](double v, const char* name) {
    finite(v, name);
    if (v < 0.0) throw InvalidArgument(std::string(name) + " must be >= 0");
  };
  finite(g1, "g1");
  finite(g2, "g2");
  finite(delta_x, "delta_x");
  finite(Delta_xx, "Delta_xx");
  finite(Delta_1, "Delta_1");
  finite(Delta_2, "Delta_2");
  rate(kappa_1, "kappa_1");
  rate(kappa_2, "kappa_2");
  rate(gamma_1, "gamma_1");
  rate(gamma_2, "gamma_2");
  rate(gamma_d, "gamma_d");
  if (scheme() == PumpScheme::incoherent) {
    rate(incoherent().eta_1, "eta_1");
    rate(incoherent().eta_2, "eta_2");
  } else {
    finite(coherent().omega_1, "Omega_1");
    finite(coherent().omega_2, "Omega_2");
    finite(coherent().delta_p, "Delta_p");
  }
  bath.validate();
  if (bath.temperature > 0.0 && !bath.calibrated()) throw InvalidArgument("bath scale is not calibrated");
}

// ---------------------------------------------------------------------------

namespace {

struct Ops {
  explicit Ops(const SpaceLayout& l)
      : layout(l), a1(annihilator(1, l)), a2(annihilator(2, l)), a1d(a1.adjoint()), a2d(a2.adjoint()) {}
  ComplexOperator s(Level i, Level j) const { return qd_projector(i, j, layout); }
  SpaceLayout layout;
  ComplexOperator a1, a2, a1d, a2d;
};

using Piece = std::pair<std::string, ComplexOperator>;

ComplexOperator hermitian_pair(const ComplexOperator& op, cplx c) {
  ComplexOperator a = op;
  a *= c;
  return a + a.adjoint();
}

// Diagonal part of H_s for the scheme.
ComplexOperator bare_hamiltonian(const SystemParams& p, const Ops& o) {
  const auto n1 = o.a1d * o.a1;
  const auto n2 = o.a2d * o.a2;
  auto scaled = [](ComplexOperator op, double c) {
    op *= c;
    return op;
  };
  if (p.scheme() == PumpScheme::incoherent) {
    return scaled(o.s(Level::x, Level::x), p.delta_x) + scaled(o.s(Level::u, Level::u), -(p.Delta_xx - p.delta_x)) +
           scaled(n1, -p.Delta_1) + scaled(n2, -(p.Delta_xx - p.delta_x + p.Delta_2));
  }
  const double dp = p.coherent().delta_p;
  return scaled(o.s(Level::x, Level::x), dp) + scaled(o.s(Level::u, Level::u), 2 * dp - p.delta_x - p.Delta_xx) +
         scaled(o.s(Level::y, Level::y), dp - p.delta_x) + scaled(n1, dp - p.delta_x - p.Delta_1) +
         scaled(n2, dp - p.Delta_xx - p.Delta_2);
}

// H_s split into labeled pieces: bare energies, the two cavity couplings and
// (coherent scheme) the pump drive, all couplings scaled by <B>.
std::vector<Piece> hamiltonian_pieces(const SystemParams& p, double b_avg, const Ops& o) {
  std::vector<Piece> pieces;
  pieces.emplace_back("hamiltonian_bare", bare_hamiltonian(p, o));
  pieces.emplace_back("coupling_1", hermitian_pair(o.s(Level::y, Level::g) * o.a1, b_avg * p.g1));
  pieces.emplace_back("coupling_2", hermitian_pair(o.s(Level::u, Level::y) * o.a2, b_avg * p.g2));
  if (p.scheme() == PumpScheme::coherent) {
    const auto& c = p.coherent();
    ComplexOperator drive = o.s(Level::x, Level::g);
    drive *= c.omega_1;
    ComplexOperator drive2 = o.s(Level::u, Level::x);
    drive2 *= c.omega_2;
    pieces.emplace_back("pump_drive", hermitian_pair(drive + drive2, b_avg));
  }
  return pieces;
}

ComplexOperator sum_pieces(const std::vector<Piece>& pieces, const SpaceLayout& layout) {
  auto h = ComplexOperator::zero(layout);
  for (const auto& [label, op] : pieces) h += op;
  return h;
}

ComplexOperator scaled(ComplexOperator op, cplx c) {
  op *= c;
  return op;
}

double checked_rate(double r, const char* name) {
  if (r < 0.0) {
    if (r > -1e-9) return 0.0;
    throw InvalidArgument(std::string("negative phonon-induced rate ") + name + " = " + std::to_string(r));
  }
  return r;
}

SandwichList tilde_terms(const ComplexOperator& xg, const ComplexOperator& xu, const SparseMat& tg,
                         const SparseMat& tu) {
  // -sum_j (X Xt rho - Xt rho X + rho Xt^dag X - X rho Xt^dag)
  const SparseMat& g = xg.matrix();
  const SparseMat& u = xu.matrix();
  SparseMat left = g * tg + u * tu;
  SparseMat right = SparseMat(tg.adjoint()) * g + SparseMat(tu.adjoint()) * u;
  const OpPtr pg = share(g), pu = share(u);
  return {{-1.0, share(std::move(left)), nullptr},
          {-1.0, nullptr, share(std::move(right))},
          {1.0, share(tg), pg},
          {1.0, pg, share(SparseMat(tg.adjoint()))},
          {1.0, share(tu), pu},
          {1.0, pu, share(SparseMat(tu.adjoint()))}};
}

}  // namespace

ComplexOperator hamiltonian_incoherent(const SystemParams& p, double b_avg) {
  if (p.scheme() != PumpScheme::incoherent) throw InvalidArgument("hamiltonian_incoherent needs the incoherent scheme");
  const Ops o(p.layout);
  return sum_pieces(hamiltonian_pieces(p, b_avg, o), p.layout);
}

ComplexOperator hamiltonian_incoherent(const SystemParams& p) {
  return hamiltonian_incoherent(p, displacement_average(p.bath));
}

ComplexOperator hamiltonian_coherent(const SystemParams& p, double b_avg) {
  if (p.scheme() != PumpScheme::coherent) throw InvalidArgument("hamiltonian_coherent needs the coherent scheme");
  const Ops o(p.layout);
  return sum_pieces(hamiltonian_pieces(p, b_avg, o), p.layout);
}

ComplexOperator hamiltonian_coherent(const SystemParams& p) {
  return hamiltonian_coherent(p, displacement_average(p.bath));
}

PhononCouplings phonon_couplings(const SystemParams& p) {
  const Ops o(p.layout);
  ComplexOperator y = scaled(o.s(Level::y, Level::g) * o.a1, p.g1) + scaled(o.s(Level::u, Level::y) * o.a2, p.g2);
  if (p.scheme() == PumpScheme::coherent) {
    y += scaled(o.s(Level::x, Level::g), p.coherent().omega_1);
    y += scaled(o.s(Level::u, Level::x), p.coherent().omega_2);
  }
  const ComplexOperator yd = y.adjoint();
  return {y + yd, scaled(y, kI) - scaled(yd, kI)};
}

std::vector<long> symmetry_labels(const SystemParams& p) {
  const SpaceLayout& l = p.layout;
  std::vector<long> labels(static_cast<std::size_t>(l.dim()));
  for (int i = 0; i < l.dim(); ++i) {
    const BasisState s = l.state(i);
    const long q = s.n1 - s.n2 + (s.level == Level::y ? 1 : 0);
    if (p.scheme() == PumpScheme::incoherent) {
      const long n = s.n1 + s.n2 + excitation_count(s.level);
      labels[i] = q * 1000 + n;
    } else {
      labels[i] = q;
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------

SandwichList polaron_terms(const ComplexOperator& h_s, const ComplexOperator& x_g, const ComplexOperator& x_u,
                           const PhononKernels& kernels, const std::vector<long>& labels, Execution exec) {
  const int d = h_s.dim();
  if (!(h_s.layout() == x_g.layout()) || !(h_s.layout() == x_u.layout())) {
    throw InvalidArgument("phonon term operators must share one layout");
  }
  if (h_s.hermiticity_defect() > 1e-10 || x_g.hermiticity_defect() > 1e-10 || x_u.hermiticity_defect() > 1e-10) {
    throw InvalidArgument("phonon term needs Hermitian H_s, X_g and X_u");
  }
  std::vector<long> lab = labels.empty() ? std::vector<long>(static_cast<std::size_t>(d), 0) : labels;
  if (static_cast<int>(lab.size()) != d) throw InvalidArgument("one label per basis state required");
  for (const ComplexOperator* op : {&h_s, &x_g, &x_u}) {
    const SparseMat& m = op->matrix();
    for (int c = 0; c < m.outerSize(); ++c) {
      for (SparseMat::InnerIterator it(m, c); it; ++it) {
        if (lab[it.row()] != lab[c] && it.value() != cplx(0.0)) {
          throw InvalidArgument("operator couples different symmetry blocks");
        }
      }
    }
  }

  std::map<long, std::vector<int>> blocks;
  for (int i = 0; i < d; ++i) blocks[lab[i]].push_back(i);

  struct Block {
    std::vector<int> idx;
    Eigen::VectorXd e;
    DenseMat v, xg, xu;
    std::size_t offset;
  };
  std::vector<Block> bl;
  bl.reserve(blocks.size());
  std::size_t nfreq = 0;
  const DenseMat hd = h_s.dense();
  const DenseMat gd = x_g.dense();
  const DenseMat ud = x_u.dense();
  for (auto& [key, idx] : blocks) {
    const int n = static_cast<int>(idx.size());
    DenseMat hb(n, n), gb(n, n), ub(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        hb(r, c) = hd(idx[r], idx[c]);
        gb(r, c) = gd(idx[r], idx[c]);
        ub(r, c) = ud(idx[r], idx[c]);
      }
    }
    Eigensystem es = hermitian_eigendecomposition(hb);
    Block b{idx, es.values, es.vectors, es.vectors.adjoint() * gb * es.vectors,
            es.vectors.adjoint() * ub * es.vectors, nfreq};
    nfreq += static_cast<std::size_t>(n) * n;
    bl.push_back(std::move(b));
  }

  // (Xt)_ab = X_ab K(E_b - E_a) in the eigenbasis.
  std::vector<double> omegas(nfreq);
  for (const auto& b : bl) {
    const int n = static_cast<int>(b.idx.size());
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) omegas[b.offset + r + std::size_t(n) * c] = b.e[c] - b.e[r];
    }
  }
  std::vector<cplx> kg(nfreq), ku(nfreq);
  kernels.half_fourier(omegas, kg, ku, exec);

  std::vector<Eigen::Triplet<cplx>> tg, tu;
  for (const auto& b : bl) {
    const int n = static_cast<int>(b.idx.size());
    DenseMat wg(n, n), wu(n, n);
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) {
        const std::size_t k = b.offset + r + std::size_t(n) * c;
        wg(r, c) = b.xg(r, c) * kg[k];
        wu(r, c) = b.xu(r, c) * ku[k];
      }
    }
    const DenseMat bg = b.v * wg * b.v.adjoint();
    const DenseMat bu = b.v * wu * b.v.adjoint();
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) {
        if (bg(r, c) != cplx(0.0)) tg.emplace_back(b.idx[r], b.idx[c], bg(r, c));
        if (bu(r, c) != cplx(0.0)) tu.emplace_back(b.idx[r], b.idx[c], bu(r, c));
      }
    }
  }
  SparseMat mg(d, d), mu(d, d);
  mg.setFromTriplets(tg.begin(), tg.end());
  mu.setFromTriplets(tu.begin(), tu.end());
  return tilde_terms(x_g, x_u, mg, mu);
}

Superoperator polaron_dissipator(const ComplexOperator& h_s, const ComplexOperator& x_g, const ComplexOperator& x_u,
                                 const PhononKernels& kernels, BasisPtr basis, Execution exec) {
  if (!basis) basis = LiouvilleBasis::full(h_s.layout());
  return assemble(basis, polaron_terms(h_s, x_g, x_u, kernels, basis->labels(), exec), exec);
}

Superoperator polaron_dissipator_time_domain(const ComplexOperator& h_s, const ComplexOperator& x_g,
                                             const ComplexOperator& x_u, const PhononKernels& kernels,
                                             double tau_max, int steps) {
  if (steps < 2 || steps % 2 != 0 || !(tau_max > 0.0)) {
    throw InvalidArgument("time-domain phonon term needs an even step count and tau_max > 0");
  }
  const int d = h_s.dim();
  if (d > 64) throw InvalidArgument("time-domain phonon term is a small-dimension reference");
  const double h = tau_max / steps;
  const DenseMat hd = h_s.dense();
  const DenseMat step = (DenseMat(-kI * h * hd)).exp();
  const DenseMat xg = x_g.dense(), xu = x_u.dense();
  DenseMat u = DenseMat::Identity(d, d);
  DenseMat tg = DenseMat::Zero(d, d), tu = DenseMat::Zero(d, d);
  // Composite Simpson over X_j(tau) = e^{-iH tau} X_j e^{iH tau}.
  for (int k = 0; k <= steps; ++k) {
    const double tau = k * h;
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const DenseMat ud = u.adjoint();
    tg += (w * h / 3.0) * kernels.green(Kernel::g, tau) * (u * xg * ud);
    tu += (w * h / 3.0) * kernels.green(Kernel::u, tau) * (u * xu * ud);
    u = step * u;
  }
  const auto layout = h_s.layout();
  return assemble(LiouvilleBasis::full(layout),
                  tilde_terms(x_g, x_u, ComplexOperator::from_dense(layout, tg).matrix(),
                              ComplexOperator::from_dense(layout, tu).matrix()),
                  Execution::serial);
}

// ---------------------------------------------------------------------------

std::vector<Channel> lindblad_channels(const SystemParams& p) {
  p.validate();
  const Ops o(p.layout);
  std::vector<Channel> ch;
  ch.push_back({"kappa_1", o.a1, p.kappa_1});
  ch.push_back({"kappa_2", o.a2, p.kappa_2});
  ch.push_back({"gamma_1_x", o.s(Level::g, Level::x), p.gamma_1});
  ch.push_back({"gamma_1_y", o.s(Level::g, Level::y), p.gamma_1});
  ch.push_back({"gamma_2_x", o.s(Level::x, Level::u), p.gamma_2});
  ch.push_back({"gamma_2_y", o.s(Level::y, Level::u), p.gamma_2});
  ch.push_back({"gamma_d_x", o.s(Level::x, Level::x), p.gamma_d});
  ch.push_back({"gamma_d_y", o.s(Level::y, Level::y), p.gamma_d});
  ch.push_back({"gamma_d_u", o.s(Level::u, Level::u), p.gamma_d});
  if (p.scheme() == PumpScheme::incoherent) {
    ch.push_back({"eta_1", o.s(Level::x, Level::g), p.incoherent().eta_1});
    ch.push_back({"eta_2", o.s(Level::u, Level::x), p.incoherent().eta_2});
  }
  return ch;
}

namespace {

LiouvillianBundle finish_bundle(const SystemParams& p, ModelForm form, double b_avg, std::vector<Piece> pieces,
                                std::vector<Channel> channels, std::vector<GeneratorTerm> extra,
                                std::vector<std::string> warnings, const BuildOptions& options) {
  const BasisPtr basis =
      options.full_space ? LiouvilleBasis::full(p.layout) : LiouvilleBasis::sector(p.layout, symmetry_labels(p));
  std::vector<GeneratorTerm> terms;
  SandwichList all;
  for (const auto& [label, op] : pieces) terms.push_back({label, commutator_terms(op)});
  for (const auto& c : channels) terms.push_back({c.label, dissipator_terms(c.op, c.rate)});
  for (auto& t : extra) terms.push_back(std::move(t));
  for (const auto& t : terms) all.insert(all.end(), t.terms.begin(), t.terms.end());

  ComplexOperator h = sum_pieces(pieces, p.layout);
  if (h.hermiticity_defect() > 1e-10) throw InvalidArgument("assembled Hamiltonian is not Hermitian");
  Superoperator gen = assemble(basis, all, options.exec);
  const double defect = gen.trace_defect();
  if (defect > 1e-10) {
    throw InvalidArgument("generator is not trace-annihilating (defect " + std::to_string(defect) + ")");
  }
  return LiouvillianBundle{std::move(gen), std::move(h),   std::move(channels), std::move(terms), form,
                           p.scheme(),     p,              b_avg,               std::move(warnings)};
}

void check_kernels(const SystemParams& p, const PhononKernels& kernels) {
  const auto& a = p.bath;
  const auto& b = kernels.params();
  if (a.alpha_p != b.alpha_p || a.omega_b != b.omega_b || a.temperature != b.temperature ||
      (a.temperature > 0.0 && a.g1_absolute != b.g1_absolute)) {
    throw InvalidArgument("phonon kernels were computed for a different bath");
  }
}

std::vector<std::string> regime_warnings(const SystemParams& p) {
  std::vector<std::string> w;
  if (std::abs(p.Delta_1) < 5.0 * std::abs(p.g1)) {
    w.push_back("effective model used with |Delta_1| < 5 g1; large-detuning reduction may be inaccurate");
  }
  if (std::abs(p.Delta_2) < 5.0 * std::abs(p.g2)) {
    w.push_back("effective model used with |Delta_2| < 5 g2; large-detuning reduction may be inaccurate");
  }
  return w;
}

// Shared cavity-transition part of both effective forms.
void add_cavity_effective(const EffectiveRates& r, const Ops& o, ComplexOperator& shifts,
                          std::vector<Piece>& pieces, std::vector<Channel>& channels,
                          std::vector<GeneratorTerm>& extra) {
  const auto s_uu = o.s(Level::u, Level::u), s_yy = o.s(Level::y, Level::y), s_gg = o.s(Level::g, Level::g);
  shifts += scaled(s_uu * o.a2 * o.a2d, r.delta_plus_2);
  shifts += scaled(s_yy * o.a2d * o.a2, r.delta_minus_2);
  shifts += scaled(s_yy * o.a1 * o.a1d, r.delta_plus_1);
  shifts += scaled(s_gg * o.a1d * o.a1, r.delta_minus_1);

  const auto s_ug_a1a2 = o.s(Level::u, Level::g) * o.a1 * o.a2;
  pieces.emplace_back("omega_12", hermitian_pair(s_ug_a1a2, r.omega_12));

  channels.push_back({"Gamma_plus_2", o.s(Level::y, Level::u) * o.a2d, checked_rate(r.gamma_plus_2, "Gamma_plus_2")});
  channels.push_back({"Gamma_minus_2", o.s(Level::u, Level::y) * o.a2, checked_rate(r.gamma_minus_2, "Gamma_minus_2")});
  channels.push_back({"Gamma_plus_1", o.s(Level::g, Level::y) * o.a1d, checked_rate(r.gamma_plus_1, "Gamma_plus_1")});
  channels.push_back({"Gamma_minus_1", o.s(Level::y, Level::g) * o.a1, checked_rate(r.gamma_minus_1, "Gamma_minus_1")});

  // -(G/2)(A rho - 2 B rho C + rho A), printed operator strings.
  auto cross = [](const std::string& label, cplx rate, const ComplexOperator& a, const ComplexOperator& b,
                  const ComplexOperator& c) {
    const OpPtr pa = share(a);
    return GeneratorTerm{label, {{-0.5 * rate, pa, nullptr}, {rate, share(b), share(c)}, {-0.5 * rate, nullptr, pa}}};
  };
  extra.push_back(cross("Gamma_ug", r.gamma_ug, s_ug_a1a2, o.s(Level::y, Level::g) * o.a1,
                        o.a2 * o.s(Level::u, Level::y)));
  extra.push_back(cross("Gamma_gu", r.gamma_gu, o.s(Level::g, Level::u) * o.a1d * o.a2d,
                        o.s(Level::y, Level::u) * o.a2d, o.a1d * o.s(Level::g, Level::y)));
}

}  // namespace

LiouvillianBundle build_full_liouvillian(const SystemParams& p, const PhononKernels& kernels,
                                         const BuildOptions& options) {
  p.validate();
  check_kernels(p, kernels);
  const Ops o(p.layout);
  const double b = kernels.displacement_average();
  auto pieces = hamiltonian_pieces(p, b, o);
  const ComplexOperator h = sum_pieces(pieces, p.layout);
  const PhononCouplings x = phonon_couplings(p);
  std::vector<GeneratorTerm> extra;
  extra.push_back({"phonon_polaron", polaron_terms(h, x.x_g, x.x_u, kernels, symmetry_labels(p), options.exec)});
  return finish_bundle(p, ModelForm::full, b, std::move(pieces), lindblad_channels(p), std::move(extra), {}, options);
}

LiouvillianBundle build_effective_liouvillian_incoherent(const SystemParams& p, const EffectiveRates& r, double b_avg,
                                                         const BuildOptions& options) {
  p.validate();
  if (p.scheme() != PumpScheme::incoherent) throw InvalidArgument("incoherent effective model needs incoherent pumping");
  const Ops o(p.layout);
  auto pieces = hamiltonian_pieces(p, b_avg, o);
  auto channels = lindblad_channels(p);
  std::vector<GeneratorTerm> extra;
  auto shifts = ComplexOperator::zero(p.layout);
  add_cavity_effective(r, o, shifts, pieces, channels, extra);
  pieces.emplace_back("phonon_shifts", shifts);
  return finish_bundle(p, ModelForm::effective, b_avg, std::move(pieces), std::move(channels), std::move(extra),
                       regime_warnings(p), options);
}

LiouvillianBundle build_effective_liouvillian_coherent(const SystemParams& p, const EffectiveRatesCoherent& rp,
                                                       const EffectiveRates& r, double b_avg,
                                                       const BuildOptions& options) {
  p.validate();
  if (p.scheme() != PumpScheme::coherent) throw InvalidArgument("coherent effective model needs coherent pumping");
  const Ops o(p.layout);
  auto pieces = hamiltonian_pieces(p, b_avg, o);
  auto channels = lindblad_channels(p);
  std::vector<GeneratorTerm> extra;
  auto shifts = ComplexOperator::zero(p.layout);
  add_cavity_effective(r, o, shifts, pieces, channels, extra);

  shifts += scaled(o.s(Level::u, Level::u), rp.delta_p_plus_2);
  shifts += scaled(o.s(Level::x, Level::x), rp.delta_p_minus_2 + rp.delta_p_plus_1);
  shifts += scaled(o.s(Level::g, Level::g), rp.delta_p_minus_1);
  pieces.emplace_back("phonon_shifts", shifts);
  pieces.emplace_back("omega_p", hermitian_pair(o.s(Level::u, Level::g), rp.omega_p));

  channels.push_back({"Gamma_p_plus_2", o.s(Level::x, Level::u), checked_rate(rp.gamma_p_plus_2, "Gamma_p_plus_2")});
  channels.push_back({"Gamma_p_minus_2", o.s(Level::u, Level::x), checked_rate(rp.gamma_p_minus_2, "Gamma_p_minus_2")});
  channels.push_back({"Gamma_p_plus_1", o.s(Level::g, Level::x), checked_rate(rp.gamma_p_plus_1, "Gamma_p_plus_1")});
  channels.push_back({"Gamma_p_minus_1", o.s(Level::x, Level::g), checked_rate(rp.gamma_p_minus_1, "Gamma_p_minus_1")});

  auto cross = [](const std::string& label, cplx rate, const ComplexOperator& a, const ComplexOperator& b,
                  const ComplexOperator& c) {
    const OpPtr pa = share(a);
    return GeneratorTerm{label, {{-0.5 * rate, pa, nullptr}, {rate, share(b), share(c)}, {-0.5 * rate, nullptr, pa}}};
  };
  extra.push_back(cross("Gamma_p_ug", rp.gamma_p_ug, o.s(Level::u, Level::g), o.s(Level::x, Level::g),
                        o.s(Level::u, Level::x)));
  extra.push_back(cross("Gamma_p_gu", rp.gamma_p_gu, o.s(Level::g, Level::u), o.s(Level::x, Level::u),
                        o.s(Level::g, Level::x)));
  return finish_bundle(p, ModelForm::effective, b_avg, std::move(pieces), std::move(channels), std::move(extra),
                       regime_warnings(p), options);
}

LiouvillianBundle build_liouvillian(const SystemParams& p, ModelForm form, const PhononKernels& kernels,
                                    const BuildOptions& options) {
  if (form == ModelForm::full) return build_full_liouvillian(p, kernels, options);
  p.validate();
  check_kernels(p, kernels);
  const double b = kernels.displacement_average();
  const EffectiveRates r = effective_rates_incoherent(p.g1, p.g2, p.Delta_1, p.Delta_2, kernels);
  if (p.scheme() == PumpScheme::incoherent) return build_effective_liouvillian_incoherent(p, r, b, options);
  const auto& c = p.coherent();
  const double frame = (c.delta_p - p.delta_x - p.Delta_1) * (c.delta_p - p.Delta_xx - p.Delta_2);
  const EffectiveRatesCoherent rp = effective_rates_coherent(c.omega_1, c.omega_2, c.delta_p, p.Delta_xx, p.delta_x,
                                                             kernels, p.omega_p_prefactor, frame);
  return build_effective_liouvillian_coherent(p, rp, r, b, options);
}

}  // namespace qdl
