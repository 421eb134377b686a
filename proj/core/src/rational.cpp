#include "harmonic/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace harmonic {

Rat pow_rat(const Rat& base, long long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw std::domain_error("pow_rat: 0 raised to a negative power");
        return Rat(0);
    }
    bool invert = e < 0;
    unsigned long long k = invert ? static_cast<unsigned long long>(-(e + 1)) + 1ull
                                  : static_cast<unsigned long long>(e);
    Rat acc(1);
    Rat sq = base;
    while (k > 0) {
        if (k & 1ull) acc *= sq;
        sq *= sq;
        k >>= 1;
    }
    return invert ? Rat(1) / acc : acc;
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rat parse_rat(const std::string& text) {
    std::string t = text;
    // trim surrounding whitespace
    size_t a = t.find_first_not_of(" \t");
    size_t b = t.find_last_not_of(" \t");
    if (a == std::string::npos) throw std::invalid_argument("parse_rat: empty string");
    t = t.substr(a, b - a + 1);

    bool neg = false;
    if (t[0] == '+' || t[0] == '-') {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    if (t.empty()) throw std::invalid_argument("parse_rat: sign with no digits");

    Rat value;
    size_t slash = t.find('/');
    size_t dot = t.find('.');
    if (slash != std::string::npos && dot != std::string::npos)
        throw std::invalid_argument("parse_rat: mixed '/' and '.' in " + text);
    if (slash != std::string::npos) {
        std::string num = t.substr(0, slash);
        std::string den = t.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("parse_rat: malformed fraction " + text);
        Int d(den);
        if (d == 0) throw std::invalid_argument("parse_rat: zero denominator in " + text);
        value = Rat(Int(num), d);
    } else if (dot != std::string::npos) {
        std::string whole = t.substr(0, dot);
        std::string frac = t.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || (!frac.empty() && !all_digits(frac)))
            throw std::invalid_argument("parse_rat: malformed decimal " + text);
        Int scale(1);
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Int digits = Int(whole) * scale + (frac.empty() ? Int(0) : Int(frac));
        value = Rat(digits, scale);
    } else {
        if (!all_digits(t)) throw std::invalid_argument("parse_rat: malformed integer " + text);
        value = Rat(Int(t));
    }
    return neg ? -value : value;
}

std::string format_rat(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

}  // namespace harmonic
