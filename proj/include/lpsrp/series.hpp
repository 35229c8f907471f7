#pragma once

// Truncated series in four amplitudes a1..a4 with trigonometric and
// exponential time dependence:
//
//   sum  e^{(i-j) th3} (c cos(p th1 + q th2) + s sin(p th1 + q th2)) a1^i a2^j a3^k a4^m
//
// with th1 = w t + phi1, th2 = nu t + phi2, th3 = lambda t. Terms are stored
// sorted by a packed key whose leading field is the order n = i+j+k+m.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lpsrp/errors.hpp"
#include "lpsrp/scalar.hpp"

namespace lpsrp {

struct TermIndex {
  int i = 0, j = 0, k = 0, m = 0, p = 0, q = 0;

  int order() const { return i + j + k + m; }

  /// Fold into p >= 0, and q >= 0 when p == 0. Returns the sign picked up by
  /// the sine coefficient.
  int canonicalize() {
    if (p < 0 || (p == 0 && q < 0)) {
      p = -p;
      q = -q;
      return -1;
    }
    return 1;
  }
  bool canonical() const { return p > 0 || (p == 0 && q >= 0); }

  std::uint64_t key() const {
    return (std::uint64_t(order()) << 48) | (std::uint64_t(i) << 40) | (std::uint64_t(j) << 32) |
           (std::uint64_t(k) << 24) | (std::uint64_t(m) << 16) | (std::uint64_t(p) << 8) |
           std::uint64_t(q + 128);
  }
  static TermIndex from_key(std::uint64_t key) {
    TermIndex t;
    t.i = int((key >> 40) & 0xff);
    t.j = int((key >> 32) & 0xff);
    t.k = int((key >> 24) & 0xff);
    t.m = int((key >> 16) & 0xff);
    t.p = int((key >> 8) & 0xff);
    t.q = int(key & 0xff) - 128;
    return t;
  }
  bool operator==(const TermIndex& o) const {
    return i == o.i && j == o.j && k == o.k && m == o.m && p == o.p && q == o.q;
  }
};

inline int key_order(std::uint64_t key) { return int(key >> 48); }

template <class Scalar> struct Coef {
  Scalar c{};
  Scalar s{};
};

/// Amplitudes, phases and time at which a series is evaluated.
template <class Scalar> struct EvalPoint {
  std::array<Scalar, 4> amp{};
  Scalar phi1{}, phi2{};
  Scalar t{};
};

// ---------------------------------------------------------------------------
// Frequency series: sum f_{ijkm} a1^i a2^j a3^k a4^m.

template <class Scalar> class FrequencySeries {
 public:
  static std::uint32_t pack(int i, int j, int k, int m) {
    return (std::uint32_t(i + j + k + m) << 24) | (std::uint32_t(i) << 18) |
           (std::uint32_t(j) << 12) | (std::uint32_t(k) << 6) | std::uint32_t(m);
  }
  static std::array<int, 4> unpack(std::uint32_t key) {
    return {int((key >> 18) & 63), int((key >> 12) & 63), int((key >> 6) & 63), int(key & 63)};
  }

  FrequencySeries() = default;
  explicit FrequencySeries(int max_order) : max_order_(max_order) {}

  int max_order() const { return max_order_; }
  void set_max_order(int n) { max_order_ = n; }

  Scalar get(int i, int j, int k, int m) const {
    const auto key = pack(i, j, k, m);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const auto& e, std::uint32_t k2) { return e.first < k2; });
    return (it != terms_.end() && it->first == key) ? it->second : Scalar(0);
  }

  void set(int i, int j, int k, int m, const Scalar& v) {
    if (i + j + k + m > max_order_) throw OrderMismatch("frequency index exceeds series order");
    const auto key = pack(i, j, k, m);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const auto& e, std::uint32_t k2) { return e.first < k2; });
    if (it != terms_.end() && it->first == key) it->second = v;
    else terms_.insert(it, {key, v});
  }

  const std::vector<std::pair<std::uint32_t, Scalar>>& terms() const { return terms_; }

  Scalar zeroth() const { return get(0, 0, 0, 0); }

  Scalar evaluate(const std::array<Scalar, 4>& a) const {
    Scalar v = 0;
    for (const auto& [key, c] : terms_) {
      const auto e = unpack(key);
      Scalar w = c;
      for (int d = 0; d < 4; ++d)
        for (int r = 0; r < e[d]; ++r) w *= a[d];
      v += w;
    }
    return v;
  }

  FrequencySeries truncated(int n) const {
    FrequencySeries out(std::min(n, max_order_));
    for (const auto& t : terms_)
      if (int(t.first >> 24) <= n) out.terms_.push_back(t);
    return out;
  }

  bool operator==(const FrequencySeries& o) const {
    return max_order_ == o.max_order_ && terms_ == o.terms_;
  }

 private:
  int max_order_ = 0;
  std::vector<std::pair<std::uint32_t, Scalar>> terms_;
};

template <class Scalar> struct Frequencies {
  FrequencySeries<Scalar> omega, nu, lambda;
};

// ---------------------------------------------------------------------------

template <class Scalar> class TrigSeries;

/// Scratch accumulator used while building a series.
template <class Scalar> class SeriesAccumulator {
 public:
  explicit SeriesAccumulator(int max_order, std::size_t reserve = 0) : max_order_(max_order) {
    if (reserve) map_.reserve(reserve);
  }

  /// Adds c cos + s sin at the index after canonicalization; terms above the
  /// truncation order are ignored.
  void add(TermIndex t, const Scalar& c, const Scalar& s) {
    if (t.order() > max_order_) return;
    const int sign = t.canonicalize();
    auto& slot = map_[t.key()];
    slot.c += c;
    if (t.p != 0 || t.q != 0) slot.s += sign > 0 ? s : Scalar(-s);
  }
  void add_key(std::uint64_t key, const Scalar& c, const Scalar& s) {
    auto& slot = map_[key];
    slot.c += c;
    slot.s += s;
  }

  int max_order() const { return max_order_; }

  TrigSeries<Scalar> finish(const Scalar& prune = default_prune_threshold<Scalar>()) &&;

 private:
  int max_order_;
  std::unordered_map<std::uint64_t, Coef<Scalar>> map_;
};

template <class Scalar> class TrigSeries {
 public:
  using Entry = std::pair<std::uint64_t, Coef<Scalar>>;

  TrigSeries() = default;
  explicit TrigSeries(int max_order) : max_order_(max_order) {
    if (max_order < 0) throw InvalidArgument("series order must be non-negative");
  }

  static TrigSeries constant(int max_order, const Scalar& c) {
    TrigSeries s(max_order);
    if (c != Scalar(0)) s.terms_.push_back({TermIndex{}.key(), {c, Scalar(0)}});
    return s;
  }
  static TrigSeries monomial(int max_order, TermIndex t, const Scalar& c, const Scalar& s = Scalar(0)) {
    SeriesAccumulator<Scalar> acc(max_order);
    acc.add(t, c, s);
    return std::move(acc).finish(Scalar(0));
  }

  int max_order() const { return max_order_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Entry>& terms() const { return terms_; }

  Coef<Scalar> get(TermIndex t) const {
    const int sign = t.canonicalize();
    const auto key = t.key();
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Entry& e, std::uint64_t k2) { return e.first < k2; });
    if (it == terms_.end() || it->first != key) return {};
    return {it->second.c, sign > 0 ? it->second.s : Scalar(-it->second.s)};
  }

  /// Highest order actually present (-1 when empty).
  int present_order() const { return terms_.empty() ? -1 : key_order(terms_.back().first); }

  /// Terms of order <= n, keeping the nominal truncation order.
  TrigSeries truncated(int n) const {
    TrigSeries out(std::min(n, max_order_));
    for (const auto& e : terms_)
      if (key_order(e.first) <= n) out.terms_.push_back(e);
    return out;
  }
  /// Only the terms of exactly order n.
  TrigSeries order_part(int n) const {
    TrigSeries out(max_order_);
    for (const auto& e : terms_)
      if (key_order(e.first) == n) out.terms_.push_back(e);
    return out;
  }
  /// Drop orders below n.
  TrigSeries orders_from(int n) const {
    TrigSeries out(max_order_);
    for (const auto& e : terms_)
      if (key_order(e.first) >= n) out.terms_.push_back(e);
    return out;
  }
  TrigSeries with_max_order(int n) const {
    TrigSeries out = truncated(n);
    out.max_order_ = n;
    return out;
  }

  /// Overwrite or insert a single coefficient (index is canonicalized).
  void set(TermIndex t, const Scalar& c, const Scalar& s) {
    if (t.order() > max_order_) throw OrderMismatch("term order exceeds series truncation");
    const int sign = t.canonicalize();
    const Scalar ss = (t.p == 0 && t.q == 0) ? Scalar(0) : (sign > 0 ? s : Scalar(-s));
    const auto key = t.key();
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Entry& e, std::uint64_t k2) { return e.first < k2; });
    if (it != terms_.end() && it->first == key) {
      it->second = {c, ss};
    } else {
      terms_.insert(it, {key, {c, ss}});
    }
  }

  TrigSeries scaled(const Scalar& f) const {
    TrigSeries out(max_order_);
    if (f == Scalar(0)) return out;
    out.terms_.reserve(terms_.size());
    for (const auto& e : terms_) out.terms_.push_back({e.first, {e.second.c * f, e.second.s * f}});
    return out;
  }

  bool operator==(const TrigSeries& o) const {
    if (max_order_ != o.max_order_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t n = 0; n < terms_.size(); ++n) {
      if (terms_[n].first != o.terms_[n].first || terms_[n].second.c != o.terms_[n].second.c ||
          terms_[n].second.s != o.terms_[n].second.s)
        return false;
    }
    return true;
  }

  Scalar max_abs_coefficient() const {
    using std::abs;
    Scalar v = 0;
    for (const auto& e : terms_) v = std::max(v, std::max(Scalar(abs(e.second.c)), Scalar(abs(e.second.s))));
    return v;
  }

 private:
  friend class SeriesAccumulator<Scalar>;
  template <class S> friend TrigSeries<S> add(const TrigSeries<S>&, const TrigSeries<S>&, const S&, const S&);

  int max_order_ = 0;
  std::vector<Entry> terms_;
};

template <class Scalar>
TrigSeries<Scalar> SeriesAccumulator<Scalar>::finish(const Scalar& prune) && {
  using std::abs;
  TrigSeries<Scalar> out(max_order_);
  out.terms_.reserve(map_.size());
  for (const auto& [key, v] : map_)
    if (abs(v.c) > prune || abs(v.s) > prune) out.terms_.push_back({key, v});
  std::sort(out.terms_.begin(), out.terms_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  map_.clear();
  return out;
}

namespace detail {
inline void check_same_order(int a, int b) {
  if (a != b)
    throw OrderMismatch("series truncation orders differ (" + std::to_string(a) + " vs " +
                        std::to_string(b) + ")");
}
}  // namespace detail

/// wa * a + wb * b by a sorted merge.
template <class Scalar>
TrigSeries<Scalar> add(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b, const Scalar& wa,
                       const Scalar& wb) {
  using std::abs;
  detail::check_same_order(a.max_order(), b.max_order());
  const Scalar prune = default_prune_threshold<Scalar>();
  TrigSeries<Scalar> out(a.max_order());
  out.terms_.reserve(a.size() + b.size());
  auto push = [&](std::uint64_t key, const Scalar& c, const Scalar& s) {
    if (abs(c) > prune || abs(s) > prune) out.terms_.push_back({key, {c, s}});
  };
  const auto& A = a.terms();
  const auto& B = b.terms();
  std::size_t ia = 0, ib = 0;
  while (ia < A.size() || ib < B.size()) {
    if (ib == B.size() || (ia < A.size() && A[ia].first < B[ib].first)) {
      push(A[ia].first, wa * A[ia].second.c, wa * A[ia].second.s);
      ++ia;
    } else if (ia == A.size() || B[ib].first < A[ia].first) {
      push(B[ib].first, wb * B[ib].second.c, wb * B[ib].second.s);
      ++ib;
    } else {
      push(A[ia].first, wa * A[ia].second.c + wb * B[ib].second.c,
           wa * A[ia].second.s + wb * B[ib].second.s);
      ++ia;
      ++ib;
    }
  }
  return out;
}

template <class Scalar>
TrigSeries<Scalar> add(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  return add(a, b, Scalar(1), Scalar(1));
}
template <class Scalar>
TrigSeries<Scalar> sub(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  return add(a, b, Scalar(1), Scalar(-1));
}
template <class Scalar> TrigSeries<Scalar> operator+(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  return add(a, b);
}
template <class Scalar> TrigSeries<Scalar> operator-(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  return sub(a, b);
}
template <class Scalar> TrigSeries<Scalar> operator*(const Scalar& f, const TrigSeries<Scalar>& a) {
  return a.scaled(f);
}

/// Add a constant to the (0,0,0,0,0,0) term.
template <class Scalar> TrigSeries<Scalar> add_constant(const TrigSeries<Scalar>& a, const Scalar& c) {
  return add(a, TrigSeries<Scalar>::constant(a.max_order(), c));
}

/// Product with product-to-sum identities; orders above the truncation are
/// never formed.
template <class Scalar> TrigSeries<Scalar> mul(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  detail::check_same_order(a.max_order(), b.max_order());
  const int N = a.max_order();
  const auto& A = a.terms();
  const auto& B = b.terms();
  SeriesAccumulator<Scalar> acc(N, 2 * (A.size() + B.size()));
  const Scalar half(0.5);
  // b terms are sorted by order; remember where each order block ends
  std::vector<std::size_t> end_of_order(N + 2, B.size());
  {
    std::size_t pos = 0;
    for (int n = 0; n <= N; ++n) {
      while (pos < B.size() && key_order(B[pos].first) <= n) ++pos;
      end_of_order[n] = pos;
    }
  }
  for (const auto& ea : A) {
    const int oa = key_order(ea.first);
    if (oa > N) break;
    const TermIndex ta = TermIndex::from_key(ea.first);
    const std::size_t stop = end_of_order[N - oa];
    for (std::size_t nb = 0; nb < stop; ++nb) {
      const auto& eb = B[nb];
      const TermIndex tb = TermIndex::from_key(eb.first);
      const Scalar& c1 = ea.second.c;
      const Scalar& s1 = ea.second.s;
      const Scalar& c2 = eb.second.c;
      const Scalar& s2 = eb.second.s;
      TermIndex sum{ta.i + tb.i, ta.j + tb.j, ta.k + tb.k, ta.m + tb.m, ta.p + tb.p, ta.q + tb.q};
      TermIndex dif{sum.i, sum.j, sum.k, sum.m, ta.p - tb.p, ta.q - tb.q};
      // (c1 cos A + s1 sin A)(c2 cos B + s2 sin B)
      acc.add(sum, half * (c1 * c2 - s1 * s2), half * (c1 * s2 + s1 * c2));
      acc.add(dif, half * (c1 * c2 + s1 * s2), half * (s1 * c2 - c1 * s2));
    }
  }
  return std::move(acc).finish();
}

template <class Scalar> TrigSeries<Scalar> operator*(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  return mul(a, b);
}

/// Time derivative with th1' = omega, th2' = nu, th3' = lambda, all three
/// given as amplitude series.
template <class Scalar>
TrigSeries<Scalar> ddt(const TrigSeries<Scalar>& a, const Frequencies<Scalar>& f) {
  const int N = a.max_order();
  // merge the three frequency series on their index
  struct FreqTerm {
    std::array<int, 4> e;
    Scalar w, nu, lam;
  };
  std::vector<FreqTerm> ft;
  {
    std::vector<std::uint32_t> keys;
    for (const auto* s : {&f.omega, &f.nu, &f.lambda})
      for (const auto& t : s->terms()) keys.push_back(t.first);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto key : keys) {
      const auto e = FrequencySeries<Scalar>::unpack(key);
      ft.push_back({e, f.omega.get(e[0], e[1], e[2], e[3]), f.nu.get(e[0], e[1], e[2], e[3]),
                    f.lambda.get(e[0], e[1], e[2], e[3])});
    }
  }
  SeriesAccumulator<Scalar> acc(N, 2 * a.size());
  for (const auto& ea : a.terms()) {
    const TermIndex t = TermIndex::from_key(ea.first);
    const Scalar& c = ea.second.c;
    const Scalar& s = ea.second.s;
    for (const auto& fr : ft) {
      const Scalar L = Scalar(t.i - t.j) * fr.lam;
      const Scalar W = Scalar(t.p) * fr.w + Scalar(t.q) * fr.nu;
      if (L == Scalar(0) && W == Scalar(0)) continue;
      TermIndex u{t.i + fr.e[0], t.j + fr.e[1], t.k + fr.e[2], t.m + fr.e[3], t.p, t.q};
      acc.add(u, L * c + W * s, L * s - W * c);
    }
  }
  return std::move(acc).finish();
}

/// Precomputed per-point quantities for repeated evaluation.
template <class Scalar> class SeriesEvaluator {
 public:
  SeriesEvaluator(int max_order, const Frequencies<Scalar>& f, const EvalPoint<Scalar>& x)
      : N_(max_order) {
    using std::cos;
    using std::exp;
    using std::sin;
    const Scalar w = f.omega.evaluate(x.amp);
    const Scalar nu = f.nu.evaluate(x.amp);
    const Scalar lam = f.lambda.evaluate(x.amp);
    const Scalar th1 = w * x.t + x.phi1, th2 = nu * x.t + x.phi2, th3 = lam * x.t;
    w_ = w;
    nu_ = nu;
    lam_ = lam;
    th1_ = th1;
    th2_ = th2;
    for (int d = 0; d < 4; ++d) {
      pw_[d].assign(N_ + 1, Scalar(1));
      for (int r = 1; r <= N_; ++r) pw_[d][r] = pw_[d][r - 1] * x.amp[d];
    }
    ex_.resize(2 * N_ + 1);
    for (int r = -N_; r <= N_; ++r) ex_[r + N_] = exp(Scalar(r) * th3);
    c1_.resize(2 * N_ + 1);
    s1_.resize(2 * N_ + 1);
    c2_.resize(2 * N_ + 1);
    s2_.resize(2 * N_ + 1);
    for (int r = -N_; r <= N_; ++r) {
      c1_[r + N_] = cos(Scalar(r) * th1);
      s1_[r + N_] = sin(Scalar(r) * th1);
      c2_[r + N_] = cos(Scalar(r) * th2);
      s2_[r + N_] = sin(Scalar(r) * th2);
    }
  }

  Scalar operator()(const TrigSeries<Scalar>& a) const {
    Scalar v = 0;
    for_terms(a, [&](const TermIndex&, const Scalar& e, const Scalar& g, const Scalar&) { v += e * g; });
    return v;
  }

  /// Value and first two time derivatives of the evaluated function, with
  /// the frequencies held at their values for these amplitudes. Unlike ddt,
  /// nothing is truncated.
  std::array<Scalar, 3> jet(const TrigSeries<Scalar>& a) const {
    std::array<Scalar, 3> out{Scalar(0), Scalar(0), Scalar(0)};
    for_terms(a, [&](const TermIndex& t, const Scalar& e, const Scalar& g, const Scalar& gp) {
      const Scalar r = Scalar(t.i - t.j) * lam_, ph = Scalar(t.p) * w_ + Scalar(t.q) * nu_;
      out[0] += e * g;
      out[1] += e * (r * g + ph * gp);
      out[2] += e * ((r * r - ph * ph) * g + Scalar(2) * r * ph * gp);
    });
    return out;
  }

 private:
  // f(t, e, g, g') per term: e = exponential times amplitude monomial,
  // g = c cos + s sin of the phase, g' = its derivative with respect to the phase
  template <class F> void for_terms(const TrigSeries<Scalar>& a, F&& f) const {
    for (const auto& e : a.terms()) {
      const TermIndex t = TermIndex::from_key(e.first);
      if (t.order() > N_) continue;
      const Scalar amp = pw_[0][t.i] * pw_[1][t.j] * pw_[2][t.k] * pw_[3][t.m];
      if (amp == Scalar(0)) continue;
      Scalar cs, sn;
      if (t.p <= N_ && t.q >= -N_ && t.q <= N_) {
        const Scalar ca = c1_[t.p + N_], sa = s1_[t.p + N_];
        const Scalar cb = c2_[t.q + N_], sb = s2_[t.q + N_];
        cs = ca * cb - sa * sb;
        sn = sa * cb + ca * sb;
      } else {
        using std::cos;
        using std::sin;
        const Scalar ph = Scalar(t.p) * th1_ + Scalar(t.q) * th2_;
        cs = cos(ph);
        sn = sin(ph);
      }
      f(t, ex_[t.i - t.j + N_] * amp, e.second.c * cs + e.second.s * sn, e.second.s * cs - e.second.c * sn);
    }
  }

  int N_;
  Scalar w_{}, nu_{}, lam_{};
  Scalar th1_{}, th2_{};
  std::array<std::vector<Scalar>, 4> pw_;
  std::vector<Scalar> ex_, c1_, s1_, c2_, s2_;
};

template <class Scalar>
Scalar evaluate(const TrigSeries<Scalar>& a, const Frequencies<Scalar>& f, const EvalPoint<Scalar>& x) {
  return SeriesEvaluator<Scalar>(a.max_order(), f, x)(a);
}

/// Cast coefficients to another scalar type.
template <class To, class From> TrigSeries<To> series_cast(const TrigSeries<From>& a) {
  SeriesAccumulator<To> acc(a.max_order(), a.size());
  for (const auto& e : a.terms()) acc.add_key(e.first, To(e.second.c), To(e.second.s));
  return std::move(acc).finish(To(0));
}
template <class To, class From> FrequencySeries<To> series_cast(const FrequencySeries<From>& a) {
  FrequencySeries<To> out(a.max_order());
  for (const auto& [key, v] : a.terms()) {
    const auto e = FrequencySeries<From>::unpack(key);
    out.set(e[0], e[1], e[2], e[3], To(v));
  }
  return out;
}

}  // namespace lpsrp
