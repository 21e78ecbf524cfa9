#include "ellipsf/multiindex.hpp"

#include "ellipsf/errors.hpp"

namespace ellipsf {

int total_degree(const MIdx& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

long long factorial(int n) {
  if (n < 0) throw Error("factorial of negative integer");
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long long mfact(const MIdx& a) {
  long long f = 1;
  for (int v : a) f *= factorial(v);
  return f;
}

long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool midx_leq(const MIdx& b, const MIdx& a) {
  if (a.size() != b.size()) throw Error("multi-index dimension mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (b[i] > a[i]) return false;
  return true;
}

MIdx midx_add(const MIdx& a, const MIdx& b) {
  if (a.size() != b.size()) throw Error("multi-index dimension mismatch");
  MIdx r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

MIdx midx_sub(const MIdx& a, const MIdx& b) {
  if (!midx_leq(b, a)) throw Error("multi-index subtraction would go negative");
  MIdx r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

long long mbinom(const MIdx& a, const MIdx& b) {
  if (a.size() != b.size()) throw Error("multi-index dimension mismatch");
  long long r = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] > a[i]) return 0;
    r *= binom(a[i], b[i]);
  }
  return r;
}

std::vector<MIdx> homogeneous_layer(int d, int l) {
  if (d < 1 || l < 0) throw Error("homogeneous_layer needs d >= 1, l >= 0");
  if (d == 1) return {MIdx{l}};
  std::vector<MIdx> out;
  for (int first = l; first >= 0; --first)
    for (const auto& tail : homogeneous_layer(d - 1, l - first)) {
      MIdx idx;
      idx.reserve(d);
      idx.push_back(first);
      idx.insert(idx.end(), tail.begin(), tail.end());
      out.push_back(std::move(idx));
    }
  return out;
}

long long dim_h(int d, int l) { return binom(d + l - 1, l); }

long long dim_g(int d, int L) {
  if (L < 0) return 0;
  return binom(d + L, d);
}

bool graded_less(const MIdx& a, const MIdx& b) {
  int ta = total_degree(a), tb = total_degree(b);
  if (ta != tb) return ta < tb;
  // Within a layer: first component descending, recursively.
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

GradedBasis::GradedBasis(int d, int L) : d_(d), L_(L) {
  if (d < 1 || L < 0) throw Error("GradedBasis needs d >= 1, L >= 0");
  for (int l = 0; l <= L; ++l)
    for (auto& idx : homogeneous_layer(d, l)) {
      pos_[idx] = list_.size();
      list_.push_back(std::move(idx));
    }
}

std::size_t GradedBasis::position(const MIdx& a) const {
  auto it = pos_.find(a);
  if (it == pos_.end()) throw Error("multi-index outside graded basis");
  return it->second;
}

std::size_t GradedBasis::layer_offset(int l) const {
  return static_cast<std::size_t>(dim_g(d_, l - 1));
}

}  // namespace ellipsf
