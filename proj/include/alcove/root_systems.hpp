#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "alcove/base.hpp"

namespace alcove::root_systems {

// Finite irreducible root system in an orthonormal coordinate realization of
// dimension rank, normalized so that long roots have squared length 2.
// Roots double as covectors via the metric identification.
struct RootSystemData {
  char type = '?';
  int rank = 0;
  std::vector<Vec> roots;              // positives first, then negatives
  std::vector<Vec> coroots;            // 2 a / |a|^2
  std::vector<int> simple;             // indices of a_1..a_n
  std::vector<int> positive;           // indices 0..npos-1
  int highest = -1;                    // index of the highest root
  std::vector<Vec> fundamental_weights;
  Eigen::MatrixXi cartan;              // C(i,j) = a_i(a_j^vee)
  std::vector<int> neg_of;
  std::vector<double> len2;
  std::vector<int> length_class;       // 0 = long, 1 = short
  std::vector<Eigen::VectorXi> simple_coeffs;  // expansion in simple roots
  Vec rho;                             // sum of fundamental weights

  int num_roots() const { return static_cast<int>(roots.size()); }
  int num_positive() const { return static_cast<int>(positive.size()); }
  bool is_positive(int idx) const { return idx < num_positive(); }
  bool two_lengths() const {
    return *std::max_element(length_class.begin(), length_class.end()) == 1;
  }

  int root_index(const Vec& r, double tol = 1e-8) const {
    for (int i = 0; i < num_roots(); ++i)
      if ((roots[i] - r).lpNorm<Eigen::Infinity>() < tol) return i;
    return -1;
  }
};

// Coupling constants, one strictly nonnegative value per root length class.
class Multiplicity {
 public:
  explicit Multiplicity(double k) : vals_{k, k} { check(); }
  Multiplicity(double k_long, double k_short) : vals_{k_long, k_short} { check(); }

  double of_class(int cls) const { return vals_[cls]; }
  double of_root(const RootSystemData& rs, int idx) const {
    return vals_[rs.length_class[idx]];
  }
  double k_highest(const RootSystemData& rs) const { return of_root(rs, rs.highest); }
  double long_value() const { return vals_[0]; }
  double short_value() const { return vals_[1]; }
  bool strictly_positive() const { return vals_[0] > 0.0 && vals_[1] > 0.0; }

 private:
  void check() const {
    if (vals_[0] < 0.0 || vals_[1] < 0.0)
      throw std::invalid_argument("Multiplicity: coupling must be nonnegative");
  }
  double vals_[2];
};

// Affine root a = Da + m with gradient Da = roots[base] and constant m.
struct AffineRoot {
  int base = -1;
  int offset = 0;
};

namespace detail {

inline std::vector<Vec> simple_roots_ambient(char type, int rank, int& ambient) {
  auto e = [](int dim, int i) {
    Vec v = Vec::Zero(dim);
    v[i] = 1.0;
    return v;
  };
  std::vector<Vec> s;
  switch (type) {
    case 'A': {
      if (rank < 1) throw std::invalid_argument("type A requires rank >= 1");
      ambient = rank + 1;
      for (int i = 0; i < rank; ++i) s.push_back(e(ambient, i) - e(ambient, i + 1));
      break;
    }
    case 'B': {
      if (rank < 2) throw std::invalid_argument("type B requires rank >= 2");
      ambient = rank;
      for (int i = 0; i + 1 < rank; ++i) s.push_back(e(ambient, i) - e(ambient, i + 1));
      s.push_back(e(ambient, rank - 1));
      break;
    }
    case 'C': {
      if (rank < 2) throw std::invalid_argument("type C requires rank >= 2");
      ambient = rank;
      const double r = 1.0 / std::sqrt(2.0);
      for (int i = 0; i + 1 < rank; ++i)
        s.push_back(r * (e(ambient, i) - e(ambient, i + 1)));
      s.push_back(std::sqrt(2.0) * e(ambient, rank - 1));
      break;
    }
    case 'D': {
      if (rank < 3) throw std::invalid_argument("type D requires rank >= 3");
      ambient = rank;
      for (int i = 0; i + 1 < rank; ++i) s.push_back(e(ambient, i) - e(ambient, i + 1));
      s.push_back(e(ambient, rank - 2) + e(ambient, rank - 1));
      break;
    }
    case 'E': {
      if (rank < 6 || rank > 8) throw std::invalid_argument("type E requires rank 6, 7 or 8");
      ambient = 8;
      Vec a1 = Vec::Zero(8);
      a1[0] = 0.5;
      a1[7] = 0.5;
      for (int i = 1; i < 7; ++i) a1[i] = -0.5;
      s.push_back(a1);
      s.push_back(e(8, 0) + e(8, 1));
      for (int i = 0; i + 3 <= rank; ++i) s.push_back(e(8, i + 1) - e(8, i));
      break;
    }
    case 'F': {
      if (rank != 4) throw std::invalid_argument("type F requires rank 4");
      ambient = 4;
      s.push_back(e(4, 1) - e(4, 2));
      s.push_back(e(4, 2) - e(4, 3));
      s.push_back(e(4, 3));
      Vec a4(4);
      a4 << 0.5, -0.5, -0.5, -0.5;
      s.push_back(a4);
      break;
    }
    case 'G': {
      if (rank != 2) throw std::invalid_argument("type G requires rank 2");
      ambient = 2;
      const double c = std::sqrt(2.0 / 3.0);
      Vec a1(2), a2(2);
      a1 << c, 0.0;
      a2 << -1.5 * c, 0.5 * std::sqrt(3.0) * c;
      s.push_back(a1);
      s.push_back(a2);
      break;
    }
    default:
      throw std::invalid_argument(std::string("unknown root system type '") + type + "'");
  }
  return s;
}

inline std::uint64_t weyl_order(char type, int rank) {
  auto fact = [](int m) {
    std::uint64_t r = 1;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
  };
  switch (type) {
    case 'A': return fact(rank + 1);
    case 'B':
    case 'C': return fact(rank) << rank;
    case 'D': return fact(rank) << (rank - 1);
    case 'E':
      if (rank == 6) return 51840ull;
      if (rank == 7) return 2903040ull;
      return 696729600ull;
    case 'F': return 1152ull;
    case 'G': return 12ull;
  }
  throw std::invalid_argument("unknown type");
}

}  // namespace detail

// Build the standard coordinate realization.  Ranks of the classical families
// are limited by rank_cap (Weyl group enumeration is the intended access
// pattern); E7 and E8 can be built but enumerate_weyl refuses them.
inline RootSystemData build_root_system(char type, int rank, int rank_cap = 6) {
  if ((type == 'A' || type == 'B' || type == 'C' || type == 'D') && rank > rank_cap)
    throw std::invalid_argument("rank exceeds the configured cap for the classical families");

  int ambient = 0;
  std::vector<Vec> simples_amb = detail::simple_roots_ambient(type, rank, ambient);

  // close the simple roots under the simple reflections
  std::vector<Vec> all;
  auto find_in = [](const std::vector<Vec>& set, const Vec& r) {
    for (std::size_t i = 0; i < set.size(); ++i)
      if ((set[i] - r).lpNorm<Eigen::Infinity>() < 1e-8) return static_cast<int>(i);
    return -1;
  };
  for (const Vec& a : simples_amb)
    if (find_in(all, a) < 0) all.push_back(a);
  for (std::size_t head = 0; head < all.size(); ++head) {
    Vec r = all[head];
    for (const Vec& a : simples_amb) {
      Vec img = r - (2.0 * r.dot(a) / a.dot(a)) * a;
      if (find_in(all, img) < 0) all.push_back(img);
    }
    if (all.size() > 1000) throw std::runtime_error("root closure did not terminate");
  }
  // closure of the simples misses the negatives of the simples only when the
  // rank is 1; add them explicitly
  for (const Vec& a : simples_amb)
    if (find_in(all, Vec(-a)) < 0) all.push_back(-a);

  // project onto an orthonormal basis of the span when the ambient space is larger
  Mat U = Mat::Identity(ambient, ambient);
  if (ambient > rank) {
    Mat S(ambient, rank);
    for (int j = 0; j < rank; ++j) S.col(j) = simples_amb[j];
    Eigen::HouseholderQR<Mat> qr(S);
    Mat Q = qr.householderQ();
    U = Q.leftCols(rank);
    for (const Vec& r : all)
      if ((U * (U.transpose() * r) - r).lpNorm<Eigen::Infinity>() > 1e-9)
        throw std::runtime_error("realization inconsistency: root outside simple-root span");
  }
  std::vector<Vec> proj;
  proj.reserve(all.size());
  for (const Vec& r : all) proj.push_back(U.transpose() * r);
  std::vector<Vec> simples;
  for (const Vec& a : simples_amb) simples.push_back(U.transpose() * a);

  // expansion in the simple basis; positivity and heights
  Mat Smat(rank, rank);
  for (int j = 0; j < rank; ++j) Smat.col(j) = simples[j];
  Mat Sinv = Smat.inverse();
  struct Entry {
    Vec r;
    Eigen::VectorXi c;
    int height;
  };
  std::vector<Entry> pos;
  for (const Vec& r : proj) {
    Vec c = Sinv * r;
    Eigen::VectorXi ci(rank);
    bool nonneg = true;
    int height = 0;
    for (int i = 0; i < rank; ++i) {
      double rounded = std::round(c[i]);
      if (std::abs(c[i] - rounded) > 1e-7)
        throw std::runtime_error("realization inconsistency: non-integral simple-root expansion");
      ci[i] = static_cast<int>(rounded);
      nonneg = nonneg && ci[i] >= 0;
      height += ci[i];
    }
    if (nonneg) pos.push_back({r, ci, height});
  }
  if (2 * pos.size() != all.size())
    throw std::runtime_error("realization inconsistency: positive roots are not half of all roots");
  std::sort(pos.begin(), pos.end(), [](const Entry& a, const Entry& b) {
    if (a.height != b.height) return a.height < b.height;
    for (int i = 0; i < a.c.size(); ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  });

  RootSystemData rs;
  rs.type = type;
  rs.rank = rank;
  const int npos = static_cast<int>(pos.size());
  for (const Entry& en : pos) {
    rs.roots.push_back(en.r);
    rs.simple_coeffs.push_back(en.c);
  }
  for (const Entry& en : pos) {
    rs.roots.push_back(-en.r);
    rs.simple_coeffs.push_back(-en.c);
  }
  for (int i = 0; i < npos; ++i) rs.positive.push_back(i);
  rs.neg_of.resize(2 * npos);
  for (int i = 0; i < npos; ++i) {
    rs.neg_of[i] = i + npos;
    rs.neg_of[i + npos] = i;
  }
  for (const Vec& a : simples) {
    int idx = rs.root_index(a);
    if (idx < 0) throw std::runtime_error("realization inconsistency: simple root not found");
    rs.simple.push_back(idx);
  }
  rs.highest = npos - 1;
  if (npos >= 2 && pos[npos - 2].height == pos[npos - 1].height)
    throw std::runtime_error("realization inconsistency: highest root is not unique");

  for (const Vec& r : rs.roots) {
    double l2 = r.squaredNorm();
    rs.len2.push_back(l2);
    rs.coroots.push_back((2.0 / l2) * r);
  }
  double long2 = *std::max_element(rs.len2.begin(), rs.len2.end());
  if (std::abs(long2 - 2.0) > 1e-9)
    throw std::runtime_error("realization inconsistency: long roots must have squared length 2");
  for (double l2 : rs.len2) rs.length_class.push_back(std::abs(l2 - long2) < 1e-6 ? 0 : 1);

  rs.cartan.resize(rank, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) {
      double v = rs.roots[rs.simple[i]].dot(rs.coroots[rs.simple[j]]);
      double rounded = std::round(v);
      if (std::abs(v - rounded) > 1e-9)
        throw std::runtime_error("realization inconsistency: non-integral Cartan entry");
      rs.cartan(i, j) = static_cast<int>(rounded);
    }

  Mat Mc(rank, rank);
  for (int j = 0; j < rank; ++j) Mc.row(j) = rs.coroots[rs.simple[j]].transpose();
  Mat Om = Mc.inverse();
  for (int i = 0; i < rank; ++i) rs.fundamental_weights.push_back(Om.col(i));
  rs.rho = Vec::Zero(rank);
  for (const Vec& w : rs.fundamental_weights) rs.rho += w;
  Vec halfsum = Vec::Zero(rank);
  for (int i = 0; i < npos; ++i) halfsum += 0.5 * rs.roots[i];
  if ((halfsum - rs.rho).lpNorm<Eigen::Infinity>() > 1e-8)
    throw std::runtime_error("realization inconsistency: rho mismatch");

  // highest root pairings: 2 exactly once (the highest root itself)
  int twos = 0;
  for (int i = 0; i < npos; ++i) {
    double p = rs.roots[i].dot(rs.coroots[rs.highest]);
    double rounded = std::round(p);
    if (std::abs(p - rounded) > 1e-9 || rounded < 0.0 || rounded > 2.0)
      throw std::runtime_error("realization inconsistency: highest-root pairing out of range");
    if (rounded == 2.0) ++twos;
  }
  if (twos != 1) throw std::runtime_error("realization inconsistency: highest-root pairing count");

  // full reflection closure
  for (int i = 0; i < rs.num_roots(); ++i)
    for (int j = 0; j < rs.num_roots(); ++j) {
      Vec img = rs.roots[j] - rs.roots[j].dot(rs.coroots[i]) * rs.roots[i];
      if (rs.root_index(img) < 0)
        throw std::runtime_error("realization inconsistency: root set not reflection-closed");
    }

  return rs;
}

// ---------------------------------------------------------------------------
// Weyl group, stored by full enumeration.

struct WeylGroup {
  std::vector<std::vector<int>> perm;   // action on root indices
  std::vector<Mat> matrix;
  std::vector<int> length;
  std::vector<std::vector<int>> reduced_word;  // 1-based simple indices
  int longest = -1;
  std::map<std::vector<int>, int> index_of;

  int size() const { return static_cast<int>(perm.size()); }

  int mul(int i, int j) const {
    const auto& a = perm[i];
    const auto& b = perm[j];
    std::vector<int> c(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) c[r] = a[b[r]];
    auto it = index_of.find(c);
    if (it == index_of.end()) throw std::runtime_error("Weyl multiplication left the table");
    return it->second;
  }

  int inv(int i) const {
    const auto& a = perm[i];
    std::vector<int> c(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) c[a[r]] = static_cast<int>(r);
    auto it = index_of.find(c);
    if (it == index_of.end()) throw std::runtime_error("Weyl inverse left the table");
    return it->second;
  }

  CVec act(int i, const CVec& xi) const { return apply_real(matrix[i], xi); }
  Vec act(int i, const Vec& xi) const { return matrix[i] * xi; }
};

inline WeylGroup enumerate_weyl(const RootSystemData& rs, std::uint64_t order_cap = 1000000) {
  std::uint64_t predicted = detail::weyl_order(rs.type, rs.rank);
  if (predicted > order_cap)
    throw std::invalid_argument("Weyl group order " + std::to_string(predicted) +
                                " exceeds the enumeration cap");

  const int n = rs.rank;
  const int nr = rs.num_roots();
  std::vector<std::vector<int>> sperm(n);
  std::vector<Mat> smat(n);
  for (int j = 0; j < n; ++j) {
    const Vec& a = rs.roots[rs.simple[j]];
    const Vec& av = rs.coroots[rs.simple[j]];
    smat[j] = Mat::Identity(n, n) - av * a.transpose();
    sperm[j].resize(nr);
    for (int i = 0; i < nr; ++i) {
      Vec img = rs.roots[i] - rs.roots[i].dot(av) * a;
      int t = rs.root_index(img);
      if (t < 0) throw std::runtime_error("simple reflection left the root set");
      sperm[j][i] = t;
    }
  }

  WeylGroup wg;
  std::vector<int> id(nr);
  for (int i = 0; i < nr; ++i) id[i] = i;
  wg.perm.push_back(id);
  wg.matrix.push_back(Mat::Identity(n, n));
  wg.length.push_back(0);
  wg.reduced_word.push_back({});
  wg.index_of.emplace(id, 0);

  std::deque<int> queue{0};
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (int j = 0; j < n; ++j) {
      std::vector<int> c(nr);
      for (int r = 0; r < nr; ++r) c[r] = wg.perm[w][sperm[j][r]];
      if (wg.index_of.find(c) != wg.index_of.end()) continue;
      int idx = wg.size();
      wg.index_of.emplace(c, idx);
      wg.perm.push_back(std::move(c));
      wg.matrix.push_back(wg.matrix[w] * smat[j]);
      wg.length.push_back(wg.length[w] + 1);
      std::vector<int> word = wg.reduced_word[w];
      word.push_back(j + 1);
      wg.reduced_word.push_back(std::move(word));
      queue.push_back(idx);
    }
  }
  if (static_cast<std::uint64_t>(wg.size()) != predicted)
    throw std::runtime_error("Weyl enumeration produced the wrong order");

  int maxlen = *std::max_element(wg.length.begin(), wg.length.end());
  int count = 0;
  for (int i = 0; i < wg.size(); ++i)
    if (wg.length[i] == maxlen) {
      wg.longest = i;
      ++count;
    }
  if (count != 1) throw std::runtime_error("longest element is not unique");
  return wg;
}

// ---------------------------------------------------------------------------
// Affine roots and the alcove geometry.

inline AffineRoot simple_affine(const RootSystemData& rs, int j) {
  if (j == 0) return {rs.neg_of[rs.highest], 1};
  if (j < 1 || j > rs.rank) throw std::invalid_argument("simple affine index out of range");
  return {rs.simple[j - 1], 0};
}

inline double affine_value(const RootSystemData& rs, const AffineRoot& a, const Vec& v) {
  return rs.roots[a.base].dot(v) + a.offset;
}

inline bool affine_positive(const RootSystemData& rs, const AffineRoot& a) {
  return a.offset > 0 || (a.offset == 0 && rs.is_positive(a.base));
}

inline AffineMap affine_reflection(const RootSystemData& rs, const AffineRoot& a) {
  const Vec& g = rs.roots[a.base];
  const Vec& gv = rs.coroots[a.base];
  return {Mat(Mat::Identity(rs.rank, rs.rank) - gv * g.transpose()),
          Vec(-static_cast<double>(a.offset) * gv)};
}

// s_j acting on an affine root, j in 0..n
inline AffineRoot act_simple_on_affine(const RootSystemData& rs, int j, const AffineRoot& a) {
  AffineRoot sj = simple_affine(rs, j);
  const Vec& g = rs.roots[sj.base];
  const Vec& gv = rs.coroots[sj.base];
  double pair = rs.roots[a.base].dot(gv);
  double rounded = std::round(pair);
  if (std::abs(pair - rounded) > 1e-9)
    throw std::runtime_error("non-integral root pairing in affine action");
  Vec img = rs.roots[a.base] - pair * g;
  int idx = rs.root_index(img);
  if (idx < 0) throw std::runtime_error("affine action left the root set");
  return {idx, a.offset - sj.offset * static_cast<int>(rounded)};
}

struct FoldResult {
  std::vector<int> word;  // simple affine indices, applied left to right
  Vec image;
  AffineMap map;          // image = map(v)
};

// Reflect v into the closure of the fundamental alcove.  Wall values within
// tol of zero count as nonnegative and are not reflected.
inline FoldResult fold_to_alcove(const RootSystemData& rs, const Vec& v, double tol = 1e-12,
                                 int iteration_cap = 100000) {
  const int n = rs.rank;
  FoldResult fr{{}, v, AffineMap::identity(n)};
  const Vec& phi = rs.roots[rs.highest];
  for (int iter = 0;; ++iter) {
    if (iter > iteration_cap)
      throw std::runtime_error("alcove folding exceeded the iteration cap");
    int worst = -1;
    double worst_val = -tol;
    double a0 = 1.0 - phi.dot(fr.image);
    if (a0 < worst_val) {
      worst = 0;
      worst_val = a0;
    }
    for (int j = 1; j <= n; ++j) {
      double val = rs.roots[rs.simple[j - 1]].dot(fr.image);
      if (val < worst_val) {
        worst = j;
        worst_val = val;
      }
    }
    if (worst < 0) return fr;
    AffineMap g = affine_reflection(rs, simple_affine(rs, worst));
    fr.image = g(fr.image);
    fr.map = g.after(fr.map);
    fr.word.push_back(worst);
  }
}

// ---------------------------------------------------------------------------
// Pairings, regularity, dominance, weights.

inline bool is_regular(const RootSystemData& rs, const CVec& lambda, double tol = 1e-9) {
  for (int i : rs.positive)
    if (std::abs(pairing(lambda, rs.coroots[i])) <= tol) return false;
  return true;
}

inline double regularity_margin(const RootSystemData& rs, const CVec& lambda) {
  double m = std::numeric_limits<double>::infinity();
  for (int i : rs.positive) m = std::min(m, std::abs(pairing(lambda, rs.coroots[i])));
  return m;
}

inline bool is_dominant(const RootSystemData& rs, const Vec& mu, double tol = 1e-12) {
  for (int j : rs.simple)
    if (mu.dot(rs.coroots[j]) < -tol) return false;
  return true;
}

inline Vec weight_covector(const RootSystemData& rs, const std::vector<int>& coeffs) {
  if (static_cast<int>(coeffs.size()) != rs.rank)
    throw std::invalid_argument("weight coefficient vector has wrong length");
  Vec mu = Vec::Zero(rs.rank);
  for (int i = 0; i < rs.rank; ++i) mu += static_cast<double>(coeffs[i]) * rs.fundamental_weights[i];
  return mu;
}

// Coefficients against the simple coroots; rejects non-integral input.
inline std::vector<int> weight_coeffs(const RootSystemData& rs, const Vec& mu, double tol = 1e-9) {
  std::vector<int> c(rs.rank);
  for (int j = 0; j < rs.rank; ++j) {
    double v = mu.dot(rs.coroots[rs.simple[j]]);
    double rounded = std::round(v);
    if (std::abs(v - rounded) > tol)
      throw std::invalid_argument("covector is not an integral weight");
    c[j] = static_cast<int>(rounded);
  }
  return c;
}

inline std::vector<CVec> orbit(const WeylGroup& wg, const CVec& xi) {
  std::vector<CVec> out;
  out.reserve(wg.size());
  for (int w = 0; w < wg.size(); ++w) out.push_back(wg.act(w, xi));
  return out;
}

// Distance from v to the nearest affine root hyperplane, measured in the
// values of the root functionals.
inline double alcove_margin(const RootSystemData& rs, const Vec& v) {
  double m = std::numeric_limits<double>::infinity();
  for (int i : rs.positive) {
    double x = rs.roots[i].dot(v);
    m = std::min(m, std::abs(x - std::round(x)));
  }
  return m;
}

}  // namespace alcove::root_systems
