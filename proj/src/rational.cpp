#include "sheafbm/rational.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

#include "sheafbm/error.hpp"

namespace sheafbm::linalg {
namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin = std::numeric_limits<std::int64_t>::min();

i128 abs128(i128 v) { return v < 0 ? -v : v; }

i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class to_mpz(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t p) {
  // a is nonzero mod p
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(a % p);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(t);
}

std::uint64_t mpz_mod(const mpz_class& z, std::uint64_t p) {
  mpz_class m;
  mpz_class pp(static_cast<unsigned long>(p));
  mpz_fdiv_r(m.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t());
  return m.get_ui();
}

std::uint64_t small_mod(std::int64_t v, std::uint64_t p) {
  i128 r = static_cast<i128>(v) % static_cast<i128>(p);
  if (r < 0) r += p;
  return static_cast<std::uint64_t>(r);
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error(ErrorCode::DomainError, "rational with zero denominator");
  *this = from_wide(n, d);
}

Rational::Rational(const mpq_class& q) { *this = from_big(q); }

Rational Rational::parse(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0) {
    throw Error(ErrorCode::InputError, "cannot parse rational '" + text + "'");
  }
  q.canonicalize();
  return Rational(q);
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0) return Rational();
  if (den != 1) {
    i128 g = gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  if (num >= kMin && num <= kMax && den <= kMax) {
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }
  mpq_class q(to_mpz(num), to_mpz(den));
  Rational r;
  r.big_ = std::make_shared<const mpq_class>(std::move(q));
  return r;
}

Rational Rational::from_big(mpq_class q) {
  q.canonicalize();
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  if (n.fits_slong_p() && d.fits_slong_p()) {
    Rational r;
    r.num_ = n.get_si();
    r.den_ = d.get_si();
    return r;
  }
  Rational r;
  r.big_ = std::make_shared<const mpq_class>(std::move(q));
  return r;
}

bool Rational::is_integer() const {
  if (big_) return big_->get_den() == 1;
  return den_ == 1;
}

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  mpq_class q(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
  return q;
}

std::string Rational::to_string() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::uint64_t Rational::mod(std::uint64_t p) const {
  std::uint64_t n, d;
  if (big_) {
    n = mpz_mod(big_->get_num(), p);
    d = mpz_mod(big_->get_den(), p);
  } else {
    n = small_mod(num_, p);
    d = small_mod(den_, p);
  }
  if (d == 0) {
    throw Error(ErrorCode::DomainError,
                "denominator of " + to_string() + " vanishes mod " + std::to_string(p));
  }
  if (d == 1) return n;
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(n) * inverse_mod(d, p)) % p);
}

Rational Rational::operator-() const {
  if (!big_ && num_ != std::numeric_limits<std::int64_t>::min()) {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  return from_big(-to_mpq());
}

Rational operator+(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t s;
      if (!__builtin_add_overflow(a.num_, b.num_, &s)) return Rational(s);
      return Rational::from_wide(static_cast<i128>(a.num_) + b.num_, 1);
    }
    if (a.num_ == 0) return b;
    if (b.num_ == 0) return a;
    std::uint64_t g = gcd64(static_cast<std::uint64_t>(a.den_), static_cast<std::uint64_t>(b.den_));
    i128 bd = b.den_ / static_cast<std::int64_t>(g);
    i128 ad = a.den_ / static_cast<std::int64_t>(g);
    i128 num = static_cast<i128>(a.num_) * bd + static_cast<i128>(b.num_) * ad;
    i128 den = static_cast<i128>(a.den_) * bd;
    if (abs128(num) < (static_cast<i128>(1) << 100) && den < (static_cast<i128>(1) << 100)) {
      return Rational::from_wide(num, den);
    }
  }
  return Rational::from_big(a.to_mpq() + b.to_mpq());
}

Rational operator-(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_ && a.den_ == 1 && b.den_ == 1) {
    std::int64_t s;
    if (!__builtin_sub_overflow(a.num_, b.num_, &s)) return Rational(s);
  }
  return a + (-b);
}

Rational operator*(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.num_ == 0 || b.num_ == 0) return Rational();
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t s;
      if (!__builtin_mul_overflow(a.num_, b.num_, &s)) return Rational(s);
    }
    // cross-cancel before multiplying
    std::uint64_t g1 = gcd64(static_cast<std::uint64_t>(a.num_ < 0 ? -static_cast<i128>(a.num_) : a.num_),
                             static_cast<std::uint64_t>(b.den_));
    std::uint64_t g2 = gcd64(static_cast<std::uint64_t>(b.num_ < 0 ? -static_cast<i128>(b.num_) : b.num_),
                             static_cast<std::uint64_t>(a.den_));
    i128 n1 = a.num_ / static_cast<i128>(g1), d2 = b.den_ / static_cast<i128>(g1);
    i128 n2 = b.num_ / static_cast<i128>(g2), d1 = a.den_ / static_cast<i128>(g2);
    i128 num = n1 * n2;
    i128 den = d1 * d2;
    if (num >= kMin && num <= kMax && den <= kMax) {
      Rational r;
      r.num_ = static_cast<std::int64_t>(num);
      r.den_ = static_cast<std::int64_t>(den);
      return r;
    }
    return Rational::from_wide(num, den);
  }
  return Rational::from_big(a.to_mpq() * b.to_mpq());
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw Error(ErrorCode::DomainError, "division by zero");
  if (!b.big_) {
    Rational inv;
    if (b.num_ == std::numeric_limits<std::int64_t>::min()) return Rational::from_big(a.to_mpq() / b.to_mpq());
    inv.num_ = b.num_ < 0 ? -b.den_ : b.den_;
    inv.den_ = b.num_ < 0 ? -b.num_ : b.num_;
    return a * inv;
  }
  return Rational::from_big(a.to_mpq() / b.to_mpq());
}

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // normalized: a value that fits is never stored big
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    i128 l = static_cast<i128>(a.num_) * b.den_;
    i128 r = static_cast<i128>(b.num_) * a.den_;
    return l <=> r;
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace sheafbm::linalg
