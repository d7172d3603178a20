#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Table-based arithmetic for GF(p^k), q = p^k <= 512.
// Elements are table indices: index sum c_i p^i encodes the polynomial
// c_0 + c_1 x + ... + c_{k-1} x^{k-1}, so 0 is the zero and 1 the one.

namespace spreadforge::gf {

struct Fe {
  uint16_t v = 0;
  friend bool operator==(Fe a, Fe b) { return a.v == b.v; }
  friend bool operator!=(Fe a, Fe b) { return a.v != b.v; }
  friend bool operator<(Fe a, Fe b) { return a.v < b.v; }
};

namespace detail {

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// dense polynomials over Z_p, constant term first, no trailing zeros
using Poly = std::vector<int>;

inline void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b, int p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  poly_trim(c);
  return c;
}

inline Poly poly_mod(Poly a, const Poly& m, int p) {
  poly_trim(a);
  int dm = (int)m.size() - 1;
  int lead_inv = 0;
  for (int t = 1; t < p; ++t)
    if (m[dm] * t % p == 1) { lead_inv = t; break; }
  while ((int)a.size() - 1 >= dm) {
    int da = (int)a.size() - 1;
    int f = a[da] * lead_inv % p;
    for (int i = 0; i <= dm; ++i) {
      int& t = a[da - dm + i];
      t = ((t - f * m[i]) % p + p) % p;
    }
    poly_trim(a);
  }
  return a;
}

inline Poly poly_powmod_x(long long e, const Poly& m, int p) {
  // x^e mod m
  Poly r{1}, b{0, 1};
  b = poly_mod(b, m, p);
  while (e > 0) {
    if (e & 1) r = poly_mod(poly_mul(r, b, p), m, p);
    b = poly_mod(poly_mul(b, b, p), m, p);
    e >>= 1;
  }
  return r;
}

inline Poly poly_gcd(Poly a, Poly b, int p) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = b;
    b = r;
  }
  return a;
}

inline bool poly_irreducible(const Poly& f, int p) {
  int k = (int)f.size() - 1;
  if (k < 1) return false;
  if (k == 1) return true;
  if (k <= 3) {
    // no roots in GF(p) suffices for degrees 2 and 3
    for (int r = 0; r < p; ++r) {
      long long val = 0, xp = 1;
      for (int c : f) {
        val = (val + c * xp) % p;
        xp = xp * r % p;
      }
      if (val == 0) return false;
    }
    return true;
  }
  // gcd with Frobenius: x^(p^k) == x mod f, and for each prime d | k
  // gcd(x^(p^(k/d)) - x, f) = 1
  long long pk = 1;
  for (int i = 0; i < k; ++i) pk *= p;
  Poly xq = poly_powmod_x(pk, f, p);
  Poly x{0, 1};
  Poly diff = xq;
  diff.resize(std::max(diff.size(), x.size()), 0);
  for (size_t i = 0; i < x.size(); ++i)
    diff[i] = ((diff[i] - x[i]) % p + p) % p;
  poly_trim(diff);
  if (!diff.empty()) return false;
  for (int d = 2; d <= k; ++d) {
    if (k % d != 0 || !is_prime(d)) continue;
    long long e = 1;
    for (int i = 0; i < k / d; ++i) e *= p;
    Poly g = poly_powmod_x(e, f, p);
    g.resize(std::max(g.size(), x.size()), 0);
    for (size_t i = 0; i < x.size(); ++i)
      g[i] = ((g[i] - x[i]) % p + p) % p;
    if (poly_gcd(f, g, p).size() != 1) return false;
  }
  return true;
}

}  // namespace detail

// lexicographically least monic irreducible of degree k over GF(p),
// scanning coefficient vectors (c_{k-1},...,c_0) in ascending order
inline std::vector<int> find_irreducible(int p, int k) {
  if (!detail::is_prime(p) || k < 1) throw std::invalid_argument("find_irreducible: bad p or k");
  if (k == 1) return {0, 1};
  long long total = 1;
  for (int i = 0; i < k; ++i) total *= p;
  for (long long m = 0; m < total; ++m) {
    std::vector<int> f(k + 1, 0);
    long long t = m;
    for (int i = 0; i < k; ++i) {
      f[i] = (int)(t % p);
      t /= p;
    }
    f[k] = 1;
    if (detail::poly_irreducible(f, p)) return f;
  }
  throw std::logic_error("find_irreducible: none found");
}

class Field {
 public:
  Field(int p, int k, std::vector<int> modulus) { init(p, k, std::move(modulus)); }

  Field(int p, int k) {
    if (!detail::is_prime(p)) throw std::invalid_argument("Field: p not prime");
    init(p, k, k == 1 ? std::vector<int>{0, 1} : find_irreducible(p, k));
  }

  static Field of_order(int q) {
    if (q < 2) throw std::invalid_argument("Field: q < 2");
    int p = 2;
    while (q % p != 0) ++p;
    int k = 0, t = q;
    while (t % p == 0) { t /= p; ++k; }
    if (t != 1) throw std::invalid_argument("Field: q not a prime power");
    return Field(p, k);
  }

  int p() const { return p_; }
  int k() const { return k_; }
  int q() const { return q_; }
  const std::vector<int>& modulus() const { return mod_; }

  Fe zero() const { return {0}; }
  Fe one() const { return {1}; }

  Fe el(int idx) const {
    if (idx < 0 || idx >= q_) throw std::invalid_argument("Field::el: index out of range");
    return {(uint16_t)idx};
  }

  // prime-subfield embedding
  Fe from_int(long long m) const {
    long long r = m % p_;
    if (r < 0) r += p_;
    return {(uint16_t)r};
  }

  Fe add(Fe a, Fe b) const { return {add_[(size_t)a.v * q_ + b.v]}; }
  Fe sub(Fe a, Fe b) const { return add(a, neg(b)); }
  Fe mul(Fe a, Fe b) const { return {mul_[(size_t)a.v * q_ + b.v]}; }
  Fe neg(Fe a) const { return {neg_[a.v]}; }

  Fe inv(Fe a) const {
    if (a.v == 0) throw std::domain_error("Field::inv: zero");
    return {inv_[a.v]};
  }

  Fe div(Fe a, Fe b) const { return mul(a, inv(b)); }

  Fe pow(Fe a, long long e) const {
    if (e < 0) return pow(inv(a), -e);
    Fe r = one(), b = a;
    while (e > 0) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  Fe frobenius(Fe a) const { return pow(a, p_); }

  // 0 counts as a square
  bool is_square(Fe a) const { return sq_[a.v] != 0; }

  // least nonsquare by index; fields of even order have none
  Fe nonsquare() const {
    for (int i = 1; i < q_; ++i)
      if (!sq_[i]) return {(uint16_t)i};
    throw std::domain_error("Field::nonsquare: every element is a square");
  }

  // base-p digits of the index, constant coefficient first
  std::vector<int> coeffs(Fe a) const {
    std::vector<int> c(k_);
    int t = a.v;
    for (int i = 0; i < k_; ++i) {
      c[i] = t % p_;
      t /= p_;
    }
    return c;
  }

  Fe from_coeffs(const std::vector<int>& c) const {
    long long idx = 0, pw = 1;
    for (int i = 0; i < k_; ++i) {
      int d = i < (int)c.size() ? ((c[i] % p_) + p_) % p_ : 0;
      idx += d * pw;
      pw *= p_;
    }
    return {(uint16_t)idx};
  }

 private:
  void init(int p, int k, std::vector<int> modulus) {
    if (!detail::is_prime(p)) throw std::invalid_argument("Field: p not prime");
    if (k < 1) throw std::invalid_argument("Field: k < 1");
    long long q = 1;
    for (int i = 0; i < k; ++i) {
      q *= p;
      if (q > 512) throw std::invalid_argument("Field: q > 512 unsupported");
    }
    p_ = p;
    k_ = k;
    q_ = (int)q;
    if (k == 1) {
      mod_ = {0, 1};
    } else {
      if ((int)modulus.size() != k + 1 || modulus[k] != 1)
        throw std::invalid_argument("Field: modulus must be monic of degree k");
      for (int& c : modulus) c = ((c % p) + p) % p;
      if (!detail::poly_irreducible(modulus, p))
        throw std::invalid_argument("Field: modulus is reducible");
      mod_ = std::move(modulus);
    }
    build_tables();
  }

  void build_tables() {
    add_.assign((size_t)q_ * q_, 0);
    mul_.assign((size_t)q_ * q_, 0);
    neg_.assign(q_, 0);
    inv_.assign(q_, 0);
    sq_.assign(q_, 0);

    auto digits = [&](int idx) {
      std::vector<int> c(k_);
      for (int i = 0; i < k_; ++i) {
        c[i] = idx % p_;
        idx /= p_;
      }
      return c;
    };
    auto index_of = [&](const detail::Poly& c) {
      long long idx = 0, pw = 1;
      for (int i = 0; i < k_; ++i) {
        idx += (i < (int)c.size() ? c[i] : 0) * pw;
        pw *= p_;
      }
      return (uint16_t)idx;
    };

    for (int a = 0; a < q_; ++a) {
      std::vector<int> ca = digits(a);
      for (int b = 0; b < q_; ++b) {
        std::vector<int> cb = digits(b);
        detail::Poly s(k_);
        for (int i = 0; i < k_; ++i) s[i] = (ca[i] + cb[i]) % p_;
        add_[(size_t)a * q_ + b] = index_of(s);
        detail::Poly m = detail::poly_mul(ca, cb, p_);
        detail::poly_trim(m);
        if (k_ > 1) m = detail::poly_mod(m, mod_, p_);
        else if (!m.empty()) m = {m[0] % p_};
        mul_[(size_t)a * q_ + b] = index_of(m);
      }
    }
    for (int a = 0; a < q_; ++a) {
      std::vector<int> c = digits(a);
      detail::Poly n(k_);
      for (int i = 0; i < k_; ++i) n[i] = (p_ - c[i]) % p_;
      neg_[a] = index_of(n);
    }
    for (int a = 1; a < q_; ++a)
      for (int b = 1; b < q_; ++b)
        if (mul_[(size_t)a * q_ + b] == 1) { inv_[a] = (uint16_t)b; break; }
    sq_[0] = 1;
    for (int a = 1; a < q_; ++a) sq_[mul_[(size_t)a * q_ + a]] = 1;
  }

  int p_ = 0, k_ = 0, q_ = 0;
  std::vector<int> mod_;
  std::vector<uint16_t> add_, mul_, neg_, inv_;
  std::vector<uint8_t> sq_;
};

}  // namespace spreadforge::gf
