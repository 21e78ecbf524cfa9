#include "ellipsf/scalingfn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <utility>

#include "ellipsf/errors.hpp"

namespace ellipsf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

NumericJet cjet_one(int d) { return {{MIdx(d, 0), {1.0, 0.0}}}; }

NumericJet cjet_mul(const NumericJet& a, const NumericJet& b, int L) {
  NumericJet r;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      MIdx s = midx_add(ka, kb);
      if (total_degree(s) <= L) r[s] += ca * cb;
    }
  }
  return r;
}

// f(M eta) for a numeric jet of f: substitute xi_i -> sum_j M(i,j) eta_j.
NumericJet cjet_substitute(const NumericJet& jet, const Eigen::MatrixXd& M,
                           int L) {
  const int d = static_cast<int>(M.rows());
  NumericJet out;
  for (const auto& [a, c] : jet) {
    NumericJet mono = cjet_one(d);
    for (int i = 0; i < d; ++i) {
      for (int rep = 0; rep < a[i]; ++rep) {
        NumericJet next;
        for (const auto& [b, cb] : mono) {
          if (total_degree(b) >= L) continue;
          for (int j = 0; j < d; ++j) {
            if (M(i, j) == 0.0) continue;
            MIdx e = b;
            ++e[j];
            next[e] += cb * M(i, j);
          }
        }
        mono = std::move(next);
      }
    }
    for (const auto& [b, cb] : mono) out[b] += c * cb;
  }
  return out;
}

double deviation_from_one(const NumericJet& jet, int d) {
  double dev = 0.0;
  bool saw_const = false;
  const MIdx zero(d, 0);
  for (const auto& [a, c] : jet) {
    if (a == zero) {
      dev = std::max(dev, std::abs(c - std::complex<double>(1.0)));
      saw_const = true;
    } else {
      dev = std::max(dev, std::abs(c));
    }
  }
  if (!saw_const) dev = std::max(dev, 1.0);
  return dev;
}

MultiPoly poly_from_jet(int d, const std::map<MIdx, GaussRat>& jet) {
  MultiPoly P(d);
  for (const auto& [a, c] : jet) P.add_term(a, c);
  return P;
}

MultiPoly truncate_degree(const MultiPoly& P, int L) {
  MultiPoly r(P.d);
  for (const auto& [a, c] : P.terms)
    if (total_degree(a) <= L) r.add_term(a, c);
  return r;
}

std::vector<double> to_point(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd as_real_vector(const std::vector<long long>& n) {
  Eigen::VectorXd v(static_cast<int>(n.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = static_cast<double>(n[i]);
  return v;
}

// All integer points 0 < ||n||_inf <= N.
std::vector<std::vector<long long>> window_points(int d, int N) {
  std::vector<std::vector<long long>> out;
  std::vector<long long> n(d, -N);
  while (true) {
    if (std::any_of(n.begin(), n.end(), [](long long v) { return v != 0; }))
      out.push_back(n);
    int i = 0;
    for (; i < d; ++i) {
      if (n[i] < N) {
        ++n[i];
        break;
      }
      n[i] = -N;
    }
    if (i == d) break;
  }
  return out;
}

std::vector<int> mat_apply(const std::vector<std::vector<long long>>& M,
                           const std::vector<int>& v) {
  std::vector<int> r(v.size(), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    long long acc = 0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += M[i][j] * v[j];
    r[i] = static_cast<int>(acc);
  }
  return r;
}

std::vector<std::vector<long long>> int_power(const Eigen::MatrixXi& A,
                                              int p) {
  const int d = static_cast<int>(A.rows());
  std::vector<std::vector<long long>> M(d, std::vector<long long>(d, 0));
  for (int i = 0; i < d; ++i) M[i][i] = 1;
  for (int rep = 0; rep < p; ++rep) {
    std::vector<std::vector<long long>> N(d, std::vector<long long>(d, 0));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) N[i][j] += A(i, k) * M[k][j];
    M = std::move(N);
  }
  return M;
}

double eval_real_poly(const MultiPoly& P, const Eigen::VectorXd& x) {
  std::complex<double> acc = 0.0;
  for (const auto& [a, c] : P.terms) {
    double mono = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (int rep = 0; rep < a[i]; ++rep) mono *= x[static_cast<int>(i)];
    acc += to_complex(c) * mono;
  }
  if (std::abs(acc.imag()) > 1e-9)
    throw BadArguments("reproduction target must be real-valued");
  return acc.real();
}

}  // namespace

ScalingFunctionSpec scaling_spec(const MaskSpec& masks) {
  ScalingFunctionSpec out;
  out.A = DilationMatrix::create(masks.A);
  out.masks = masks;
  out.order = masks.order;
  const int probe = masks.nonstationary() ? 4 : 1;
  for (int j = 1; j <= probe; ++j) {
    if (masks.mask_at(j).value_at_zero() != GaussRat(1))
      throw BadArguments("mask at scale " + std::to_string(j) +
                         " does not equal 1 at the origin");
  }
  return out;
}

JetNumericResult phihat_jet_numeric(const ScalingFunctionSpec& spec,
                                    const std::vector<long long>& n, int L,
                                    int J) {
  const int d = spec.A.d;
  if (J < 1) throw BadArguments("factor count must be at least 1");
  if (static_cast<int>(n.size()) != d)
    throw BadArguments("lattice point has wrong dimension");
  if (std::all_of(n.begin(), n.end(), [](long long v) { return v == 0; }))
    throw BadArguments("jet point must be a nonzero lattice point");

  const Eigen::MatrixXd AiT = spec.A.real().transpose().inverse();
  const Eigen::VectorXd nv = as_real_vector(n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d);

  JetNumericResult out;
  out.factors = J;
  out.jet = cjet_one(d);
  NumericJet last = out.jet;
  for (int j = 1; j <= J; ++j) {
    M = AiT * M;
    const Eigen::VectorXd pt = kTwoPi * (M * nv);
    NumericJet jf = spec.masks.family_jet_numeric
                        ? spec.masks.family_jet_numeric(j, to_point(pt), L)
                        : spec.masks.mask_at(j).jet_at_numeric(to_point(pt), L);
    jf = cjet_substitute(jf, M, L);
    last = jf;
    out.jet = cjet_mul(out.jet, jf, L);
    for (const auto& [a, c] : out.jet)
      if (!std::isfinite(std::abs(c)))
        throw Divergence("truncated transform product overflowed at factor " +
                         std::to_string(j));
  }
  out.error_estimate = deviation_from_one(last, d);
  return out;
}

JetSymbolicResult phihat_jet_symbolic(const ScalingFunctionSpec& spec,
                                      const std::vector<long long>& n,
                                      int L) {
  const int d = spec.A.d;
  if (static_cast<int>(n.size()) != d)
    throw BadArguments("lattice point has wrong dimension");
  if (std::all_of(n.begin(), n.end(), [](long long v) { return v == 0; }))
    throw BadArguments("jet point must be a nonzero lattice point");

  const Eigen::MatrixXi AT = spec.A.A.transpose();
  const LatticeFactor lf = factor_lattice_point(AT, n);

  const auto AiT_opt = inverse(spec.A.rat_transpose());
  if (!AiT_opt) throw Error("dilation matrix is singular");
  const RatMat& AiT = *AiT_opt;

  JetSymbolicResult out;
  out.vanishing_index = lf.j;
  out.coset_shift = lf.s;

  MultiPoly jet = MultiPoly::constant(d, GaussRat(1));
  RatMat Mt = RatMat::identity(d);
  for (int t = 1; t < lf.j; ++t) {
    Mt = AiT * Mt;
    // (A^-T)^t n is an integer point for every shell before the vanishing
    // one, so the factor's jet reduces to its jet at the origin.
    std::vector<Rat> vt(d);
    for (int i = 0; i < d; ++i) {
      GaussRat acc;
      for (int j = 0; j < d; ++j) acc += Mt.at(i, j) * GaussRat(n[j]);
      vt[i] = acc.re;
    }
    const auto jt = spec.masks.mask_at(t).jet_at(vt, L);
    jet = truncate_degree(jet * poly_from_jet(d, jt).substitute_linear(Mt), L);
  }
  Mt = AiT * Mt;  // (A^-T)^{j0}
  std::vector<Rat> vanish_pt(d);
  for (int i = 0; i < d; ++i) vanish_pt[i] = Rat(lf.k[i]) + lf.s[i];
  const auto jv = spec.masks.mask_at(lf.j).jet_at(vanish_pt, L);
  jet = truncate_degree(jet * poly_from_jet(d, jv).substitute_linear(Mt), L);
  out.jet = std::move(jet);

  // The remaining factors never vanish; their product at 2*pi*n converges
  // geometrically and is reported as a scalar.
  const Eigen::MatrixXd AiTd = spec.A.real().transpose().inverse();
  const Eigen::VectorXd nv = as_real_vector(n);
  Eigen::MatrixXd Md = Eigen::MatrixXd::Identity(d, d);
  for (int t = 0; t < lf.j; ++t) Md = AiTd * Md;
  std::complex<double> tail = 1.0;
  const MIdx zero(d, 0);
  for (int t = lf.j + 1; t <= lf.j + 400; ++t) {
    Md = AiTd * Md;
    const Eigen::VectorXd pt = kTwoPi * (Md * nv);
    const std::complex<double> f =
        spec.masks.family_jet_numeric
            ? spec.masks.family_jet_numeric(t, to_point(pt), 0).at(zero)
            : spec.masks.mask_at(t).eval(to_point(pt));
    tail *= f;
    if (std::abs(f - 1.0) < 1e-16) break;
    // Families whose factors do not approach 1 give a scalar that grows
    // without bound; cap it rather than overflow (its direction against the
    // numeric product is meaningless past this point anyway).
    if (std::abs(tail) > 1e100) break;
  }
  out.tail_scale = tail;
  return out;
}

Eigen::VectorXd CascadeGrid::coords(const std::vector<int>& n) const {
  Eigen::VectorXd v(static_cast<int>(n.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = n[i];
  return to_x * v;
}

CascadeGrid cascade_eval(const ScalingFunctionSpec& spec, int J,
                         const Box& box) {
  const int d = spec.A.d;
  if (J < 1) throw BadArguments("cascade needs at least one level");
  if (spec.masks.nonstationary())
    throw BadArguments("cascade is defined for stationary masks only");
  if (!spec.masks.m0.is_real())
    throw BadArguments("cascade needs a real-coefficient mask");
  if (static_cast<int>(box.lo.size()) != d ||
      static_cast<int>(box.hi.size()) != d)
    throw BadArguments("box dimension mismatch");
  for (int i = 0; i < d; ++i)
    if (!(box.lo[i] < box.hi[i])) throw BadArguments("empty box");

  CascadeGrid grid;
  grid.level = J;
  grid.A = spec.A.A;
  grid.q = spec.A.q;
  grid.box = box;

  for (const auto& [K, c] : spec.masks.m0.coeffs()) {
    std::vector<int> k(d);
    for (int i = 0; i < d; ++i) {
      if (K[i] % 2 != 0)
        throw BadArguments("mask is not integer-periodic");
      k[i] = -K[i] / 2;
    }
    grid.weights.emplace_back(std::move(k),
                              static_cast<double>(spec.A.q) * to_double(c.re));
  }

  const auto Aint = int_power(spec.A.A, 1);
  std::map<std::vector<int>, double> C{{std::vector<int>(d, 0), 1.0}};
  double prev_diff = 0.0;
  int growing = 0;
  for (int t = 1; t <= J; ++t) {
    std::map<std::vector<int>, double> next;
    for (const auto& [m, v] : C) {
      const std::vector<int> Am = mat_apply(Aint, m);
      for (const auto& [k, a] : grid.weights) {
        std::vector<int> p(d);
        for (int i = 0; i < d; ++i) p[i] = Am[i] + k[i];
        next[p] += a * v;
      }
    }
    double diff = 0.0;
    for (const auto& [m, v] : C) {
      const auto it = next.find(mat_apply(Aint, m));
      const double nv = it == next.end() ? 0.0 : it->second;
      diff = std::max(diff, std::abs(nv - v));
    }
    if (t >= 2) {
      growing = (diff > prev_diff && diff > 1e-12) ? growing + 1 : 0;
      if (growing >= 3)
        throw Divergence("cascade level differences grew three times in a "
                         "row (last " +
                         std::to_string(diff) + ")");
    }
    prev_diff = diff;
    grid.level_diff = diff;
    C = std::move(next);
  }
  grid.support = std::move(C);

  const auto AJ = int_power(spec.A.A, J);
  Eigen::MatrixXd AJd(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) AJd(i, j) = static_cast<double>(AJ[i][j]);
  grid.to_x = AJd.inverse();

  double mass = 0.0;
  for (const auto& [m, v] : grid.support) {
    mass += v;
    if (std::abs(v) > 1e-9)
      grid.support_radius =
          std::max(grid.support_radius, grid.coords(m).lpNorm<Eigen::Infinity>());
  }
  for (int t = 0; t < J; ++t) mass /= static_cast<double>(spec.A.q);
  grid.mass = mass;

  // Defect of the two-scale relation phi(x) = sum_k q c_k phi(Ax - k),
  // evaluated with both sides read off the level-J grid.
  std::vector<std::vector<int>> shift_images;
  shift_images.reserve(grid.weights.size());
  for (const auto& [k, a] : grid.weights) shift_images.push_back(mat_apply(AJ, k));
  for (const auto& [m, v] : grid.support) {
    const std::vector<int> Am = mat_apply(Aint, m);
    double rhs = 0.0;
    for (std::size_t w = 0; w < grid.weights.size(); ++w) {
      std::vector<int> p(d);
      for (int i = 0; i < d; ++i) p[i] = Am[i] - shift_images[w][i];
      const auto it = grid.support.find(p);
      if (it != grid.support.end()) rhs += grid.weights[w].second * it->second;
    }
    grid.refinement_residual =
        std::max(grid.refinement_residual, std::abs(v - rhs));
  }

  for (const auto& [m, v] : grid.support) {
    const Eigen::VectorXd x = grid.coords(m);
    bool inside = true;
    for (int i = 0; i < d; ++i)
      inside = inside && box.lo[i] <= x[i] && x[i] <= box.hi[i];
    if (inside) {
      grid.points.push_back(m);
      grid.values.push_back(v);
    }
  }
  return grid;
}

ReproductionReport verify_reproduction(const CascadeGrid& grid,
                                       const MultiPoly& P, int window) {
  const int d = static_cast<int>(grid.A.rows());
  if (P.d != d) throw BadArguments("polynomial dimension mismatch");
  if (window < 1) throw BadArguments("window must be at least 1");

  ReproductionReport rep;
  rep.margin = grid.support_radius;
  const double interior_radius = window - grid.support_radius;
  if (interior_radius <= 0)
    throw BadArguments("window does not exceed the support radius");

  const auto AJ = int_power(grid.A, grid.level);
  // Interior evaluation points: every level-J lattice point within the
  // shrunken window, so all shifts touching them are part of the fit.
  double row_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += std::abs(static_cast<double>(AJ[i][j]));
    row_sum = std::max(row_sum, s);
  }
  const int bound = static_cast<int>(std::ceil(row_sum * interior_radius)) + 1;
  std::vector<std::vector<int>> interior;
  std::vector<int> cur(d, -bound);
  while (true) {
    Eigen::VectorXd x = grid.coords(cur);
    if (x.lpNorm<Eigen::Infinity>() <= interior_radius + 1e-12)
      interior.push_back(cur);
    int i = 0;
    for (; i < d; ++i) {
      if (cur[i] < bound) {
        ++cur[i];
        break;
      }
      cur[i] = -bound;
    }
    if (i == d) break;
  }

  for (const auto& k : window_points(d, window))
    rep.shift_list.emplace_back(k.begin(), k.end());
  rep.shift_list.push_back(std::vector<int>(d, 0));
  std::sort(rep.shift_list.begin(), rep.shift_list.end());
  rep.shifts = static_cast<int>(rep.shift_list.size());
  rep.interior_points = static_cast<int>(interior.size());
  if (interior.empty()) throw BadArguments("no interior points to fit on");

  std::vector<std::vector<int>> shift_images;
  shift_images.reserve(rep.shift_list.size());
  for (const auto& k : rep.shift_list) shift_images.push_back(mat_apply(AJ, k));

  Eigen::MatrixXd M(interior.size(), rep.shift_list.size());
  Eigen::VectorXd b(interior.size());
  for (std::size_t r = 0; r < interior.size(); ++r) {
    b[static_cast<int>(r)] = eval_real_poly(P, grid.coords(interior[r]));
    for (std::size_t c = 0; c < shift_images.size(); ++c) {
      std::vector<int> p(d);
      for (int i = 0; i < d; ++i) p[i] = interior[r][i] - shift_images[c][i];
      const auto it = grid.support.find(p);
      M(static_cast<int>(r), static_cast<int>(c)) =
          it == grid.support.end() ? 0.0 : it->second;
    }
  }
  const Eigen::VectorXd c = M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
  rep.coefficients.assign(c.data(), c.data() + c.size());
  rep.sup_residual = (M * c - b).lpNorm<Eigen::Infinity>();
  return rep;
}

AnnihilationReport verify_annihilation(const ScalingFunctionSpec& spec,
                                       const PolynomialSpace& space, int N,
                                       int J) {
  const int d = spec.A.d;
  if (space.d != d) throw BadArguments("space dimension mismatch");
  if (N < 1) throw BadArguments("window must be at least 1");

  AnnihilationReport rep;
  rep.window = N;
  rep.factors = J;
  const auto polys = space.polys();
  rep.per_poly.assign(polys.size(), 0.0);

  for (const auto& n : window_points(d, N)) {
    const auto jr = phihat_jet_numeric(spec, n, space.L, J);
    // The product's overall scalar depends on the truncation (and diverges
    // outright for scale-dependent families whose factors do not approach 1);
    // only the jet's direction carries the annihilation structure, so each
    // point's jet is normalized to unit max-abs before contracting.
    double scale = 0.0;
    for (const auto& [a, c] : jr.jet) scale = std::max(scale, std::abs(c));
    if (scale <= 0.0) scale = 1.0;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      std::complex<double> val = 0.0;
      for (const auto& [a, c] : polys[i].terms) {
        const auto it = jr.jet.find(a);
        if (it == jr.jet.end()) continue;
        val += to_complex(c) * to_complex(neg_i_pow(total_degree(a))) *
               static_cast<double>(mfact(a)) * (it->second / scale);
      }
      rep.per_poly[i] = std::max(rep.per_poly[i], std::abs(val));
      rep.max_abs = std::max(rep.max_abs, std::abs(val));
    }
  }
  return rep;
}

}  // namespace ellipsf
