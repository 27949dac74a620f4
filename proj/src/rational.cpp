#include "tanlock/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace tanlock {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if(den == 0) throw std::invalid_argument("rational with zero denominator");
    if(den < 0) {
        num = -num;
        den = -den;
    }
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::string Rational::to_string() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    while(!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while(!text.empty() && text.back() == ' ') text.remove_suffix(1);
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if(ec != std::errc{} || ptr != end || text.empty())
        throw std::invalid_argument("malformed fraction '" + std::string(whole) + "'");
    return value;
}

} // namespace

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    if(slash == std::string_view::npos) return {parse_int(text, text), 1};
    return {parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text)};
}

Rational operator+(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator-(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
}

} // namespace tanlock
