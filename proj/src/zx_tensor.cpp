#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fockforge/zx.hpp"

namespace fockforge {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Factor over a sorted set of binary variables; table indexed with vars[0]
// as the most significant bit.
struct Factor {
  std::vector<int> vars;
  std::vector<Complex> table;
};

int var_pos(const Factor& f, int v) {
  auto it = std::lower_bound(f.vars.begin(), f.vars.end(), v);
  return it != f.vars.end() && *it == v ? int(it - f.vars.begin()) : -1;
}

Factor edge_factor(int va, int vb, bool hadamard) {
  Factor f;
  if (va == vb) {
    f.vars = {va};
    f.table = hadamard ? std::vector<Complex>{kInvSqrt2, -kInvSqrt2}
                       : std::vector<Complex>{1.0, 1.0};
    return f;
  }
  if (va > vb) std::swap(va, vb);
  f.vars = {va, vb};
  if (hadamard)
    f.table = {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
  else
    f.table = {1.0, 0.0, 0.0, 1.0};
  return f;
}

Factor multiply(const Factor& a, const Factor& b, int max_cut) {
  Factor out;
  out.vars.resize(a.vars.size() + b.vars.size());
  out.vars.resize(std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(),
                                 b.vars.end(), out.vars.begin()) -
                  out.vars.begin());
  if ((int)out.vars.size() > max_cut)
    throw ResourceError("tensor contraction frontier exceeds " +
                        std::to_string(max_cut) + " variables");
  int k = (int)out.vars.size();
  std::vector<int> apos(k, -1), bpos(k, -1);
  for (int i = 0; i < k; ++i) {
    apos[i] = var_pos(a, out.vars[i]);
    bpos[i] = var_pos(b, out.vars[i]);
  }
  out.table.assign(size_t(1) << k, Complex(0));
  for (size_t idx = 0; idx < out.table.size(); ++idx) {
    size_t ia = 0, ib = 0;
    for (int i = 0; i < k; ++i) {
      int bit = (idx >> (k - 1 - i)) & 1;
      if (apos[i] >= 0) ia |= size_t(bit) << (a.vars.size() - 1 - apos[i]);
      if (bpos[i] >= 0) ib |= size_t(bit) << (b.vars.size() - 1 - bpos[i]);
    }
    out.table[idx] = a.table[ia] * b.table[ib];
  }
  return out;
}

Factor sum_out(const Factor& f, int v) {
  int p = var_pos(f, v);
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + p);
  int k = (int)out.vars.size();
  out.table.assign(size_t(1) << k, Complex(0));
  int shift = (int)f.vars.size() - 1 - p;
  for (size_t idx = 0; idx < f.table.size(); ++idx) {
    size_t low = idx & ((size_t(1) << shift) - 1);
    size_t high = (idx >> (shift + 1)) << shift;
    out.table[high | low] += f.table[idx];
  }
  return out;
}

}  // namespace

std::vector<Complex> canonical_form(std::vector<Complex> v) {
  double norm2 = 0;
  for (const Complex& c : v) norm2 += std::norm(c);
  if (norm2 <= 0) return v;
  double inv = 1.0 / std::sqrt(norm2);
  Complex rot = 1.0;
  for (const Complex& c : v)
    if (std::abs(c) * inv > 1e-12) {
      rot = std::abs(c) / c;
      break;
    }
  for (Complex& c : v) c *= inv * rot;
  return v;
}

bool tensor_equal(const std::vector<Complex>& a, const std::vector<Complex>& b,
                  double tol) {
  if (a.size() != b.size()) return false;
  std::vector<Complex> ca = canonical_form(a), cb = canonical_form(b);
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(ca[i] - cb[i]) > tol) return false;
  return true;
}

std::vector<Complex> to_tensor(const ZXDiagram& d, int max_cut) {
  d.validate();
  const int ns = (int)d.spiders.size();
  // Variable ids: spider i -> i, boundary j -> ns + j.
  auto var_of = [&](const ZXEndpoint& e) {
    return e.is_boundary() ? ns + e.port : e.spider;
  };
  std::vector<Factor> factors;
  std::vector<int> degree(ns, 0);
  for (const ZXEdge& e : d.edges) {
    factors.push_back(edge_factor(var_of(e.a), var_of(e.b), e.hadamard));
    if (!e.a.is_boundary()) ++degree[e.a.spider];
    if (!e.b.is_boundary()) ++degree[e.b.spider];
  }

  double isolated = 1.0;  // port-free spiders sum to 2 apiece
  for (int s = 0; s < ns; ++s)
    if (degree[s] == 0) isolated *= 2.0;

  // Greedy elimination: repeatedly sum out the spider variable whose merged
  // factor spans the fewest variables.
  std::vector<bool> eliminated(ns, false);
  for (int s = 0; s < ns; ++s)
    if (degree[s] == 0) eliminated[s] = true;
  for (;;) {
    int best = -1;
    size_t best_span = 0;
    for (int s = 0; s < ns; ++s) {
      if (eliminated[s]) continue;
      std::vector<int> span;
      for (const Factor& f : factors)
        if (var_pos(f, s) >= 0)
          for (int v : f.vars)
            if (v != s) span.push_back(v);
      std::sort(span.begin(), span.end());
      span.erase(std::unique(span.begin(), span.end()), span.end());
      if (best < 0 || span.size() < best_span) {
        best = s;
        best_span = span.size();
      }
    }
    if (best < 0) break;
    Factor merged;
    merged.vars = {best};
    merged.table = {1.0, 1.0};
    std::vector<Factor> rest;
    for (Factor& f : factors) {
      if (var_pos(f, best) >= 0)
        merged = multiply(merged, f, max_cut);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(merged, best));
    factors = std::move(rest);
    eliminated[best] = true;
  }

  Factor result;
  result.table = {Complex(isolated)};
  for (const Factor& f : factors) result = multiply(result, f, max_cut);

  // Expand to the full boundary tensor, boundary 0 most significant.
  const int nb = d.boundary_count;
  std::vector<int> pos(nb, -1);
  for (int j = 0; j < nb; ++j) pos[j] = var_pos(result, ns + j);
  std::vector<Complex> out(size_t(1) << nb);
  for (size_t idx = 0; idx < out.size(); ++idx) {
    size_t ridx = 0;
    for (int j = 0; j < nb; ++j) {
      if (pos[j] < 0) continue;
      int bit = (idx >> (nb - 1 - j)) & 1;
      ridx |= size_t(bit) << (result.vars.size() - 1 - pos[j]);
    }
    out[idx] = result.table[ridx];
  }
  return canonical_form(std::move(out));
}

}  // namespace fockforge
