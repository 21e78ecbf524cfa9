#pragma once

// Multi-index combinatorics: componentwise partial order, factorials and
// binomials, and the graded index sets that order every block matrix in this
// library.  Within one degree layer the first component is the primary sort
// key, strictly decreasing, so for d = 2 layer l reads
// (l,0), (l-1,1), ..., (0,l).

#include <cstddef>
#include <map>
#include <vector>

namespace ellipsf {

using MIdx = std::vector<int>;

int total_degree(const MIdx& a);
long long factorial(int n);
long long mfact(const MIdx& a);  // a! = prod a_i!
long long binom(long long n, long long k);

// Componentwise b <= a.
bool midx_leq(const MIdx& b, const MIdx& a);
MIdx midx_add(const MIdx& a, const MIdx& b);
MIdx midx_sub(const MIdx& a, const MIdx& b);  // requires b <= a

// prod binom(a_i, b_i); zero when b is not componentwise <= a.
long long mbinom(const MIdx& a, const MIdx& b);

// All indices with |a| = l, first component descending (recursively).
std::vector<MIdx> homogeneous_layer(int d, int l);

// Number of indices in one layer: binom(d+l-1, l).
long long dim_h(int d, int l);

// Number of indices of degree <= L: binom(d+L, d); dim_g(d, -1) = 0.
long long dim_g(int d, int L);

// Strict order consistent with the graded layout: lower total degree first,
// then the in-layer order above.
bool graded_less(const MIdx& a, const MIdx& b);

// The concatenated layers 0..L with O(1) index lookup.
class GradedBasis {
 public:
  GradedBasis(int d, int L);

  int dim() const { return d_; }
  int degree() const { return L_; }
  std::size_t size() const { return list_.size(); }
  const MIdx& operator[](std::size_t i) const { return list_[i]; }
  const std::vector<MIdx>& indices() const { return list_; }

  bool contains(const MIdx& a) const { return pos_.count(a) != 0; }
  std::size_t position(const MIdx& a) const;

  // Offset of layer l inside the concatenated list (= dim_g(d, l-1)).
  std::size_t layer_offset(int l) const;

 private:
  int d_;
  int L_;
  std::vector<MIdx> list_;
  std::map<MIdx, std::size_t> pos_;
};

}  // namespace ellipsf
