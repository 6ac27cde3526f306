#include "covar/test_functions.hpp"

#include "covar/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace covar {

Polynomial::Polynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.x_power < 0 || t.y_power < 0 || !std::isfinite(t.coef))
            throw DomainError("polynomial terms need finite coefficients and nonnegative powers");
    }
}

namespace {

std::string strip_spaces(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    return s;
}

Polynomial::Term parse_term(const std::string& src, bool negative) {
    Polynomial::Term term{1.0, 0, 0};
    std::size_t pos = 0;
    if (pos < src.size() && (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.')) {
        std::size_t used = 0;
        try {
            term.coef = std::stod(src.substr(pos), &used);
        } catch (const std::exception&) {
            throw DomainError("cannot parse coefficient in '" + src + "'");
        }
        pos += used;
    }
    while (pos < src.size()) {
        if (src[pos] == '*') {
            ++pos;
            continue;
        }
        const char var = static_cast<char>(std::tolower(static_cast<unsigned char>(src[pos])));
        if (var != 'x' && var != 'y') throw DomainError("unexpected symbol in polynomial '" + src + "'");
        ++pos;
        int power = 1;
        if (pos < src.size() && src[pos] == '^') {
            ++pos;
            const auto* begin = src.data() + pos;
            auto [end, ec] = std::from_chars(begin, src.data() + src.size(), power);
            if (ec != std::errc{} || power < 0) throw DomainError("bad exponent in '" + src + "'");
            pos += static_cast<std::size_t>(end - begin);
        }
        (var == 'x' ? term.x_power : term.y_power) += power;
    }
    if (negative) term.coef = -term.coef;
    return term;
}

}  // namespace

Polynomial Polynomial::parse(std::string_view text) {
    const std::string s = strip_spaces(text);
    if (s.empty()) throw DomainError("empty polynomial");
    std::vector<Term> terms;
    std::size_t start = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        start = 1;
    }
    for (std::size_t i = start; i <= s.size(); ++i) {
        const bool boundary = i == s.size() ||
                              ((s[i] == '+' || s[i] == '-') && i > 0 && s[i - 1] != 'e' &&
                               s[i - 1] != 'E' && s[i - 1] != '^');
        if (!boundary) continue;
        const std::string piece = s.substr(start, i - start);
        if (piece.empty()) throw DomainError("malformed polynomial '" + s + "'");
        terms.push_back(parse_term(piece, negative));
        if (i < s.size()) negative = s[i] == '-';
        start = i + 1;
    }
    return Polynomial(std::move(terms));
}

double Polynomial::operator()(double x, double y) const {
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.coef * std::pow(x, t.x_power) * std::pow(y, t.y_power);
    return sum;
}

double Polynomial::upper_rectangle_integral(double a, double b) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        const double ix = (1.0 - std::pow(a, t.x_power + 1)) / (t.x_power + 1);
        const double iy = (1.0 - std::pow(b, t.y_power + 1)) / (t.y_power + 1);
        sum += t.coef * ix * iy;
    }
    return sum;
}

double Polynomial::lower_triangle_weight(double t) const {
    double sum = 0.0;
    for (const auto& term : terms_)
        sum += term.coef * std::pow(t, term.y_power) / (term.x_power + term.y_power + 3);
    return sum;
}

double Polynomial::upper_triangle_weight(double t) const {
    double sum = 0.0;
    for (const auto& term : terms_)
        sum += term.coef * std::pow(t, term.x_power) / (term.x_power + term.y_power + 3);
    return sum;
}

std::string Polynomial::to_string() const {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(17);
    bool first = true;
    for (const auto& t : terms_) {
        double c = t.coef;
        if (!first) {
            out << (c < 0 ? "-" : "+");
            c = std::fabs(c);
        } else if (c < 0) {
            out << "-";
            c = -c;
        }
        first = false;
        const bool bare = t.x_power == 0 && t.y_power == 0;
        if (c != 1.0 || bare) out << c;
        if (t.x_power > 0) out << "x" << (t.x_power > 1 ? "^" + std::to_string(t.x_power) : "");
        if (t.y_power > 0) out << "y" << (t.y_power > 1 ? "^" + std::to_string(t.y_power) : "");
    }
    return out.str();
}

TestFunctionSet TestFunctionSet::parse(std::string_view text) {
    TestFunctionSet set;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
        set.funcs.push_back(Polynomial::parse(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return set;
}

std::string TestFunctionSet::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < funcs.size(); ++i) {
        if (i) s += ",";
        s += funcs[i].to_string();
    }
    return s;
}

TestFunctionSet default_test_functions(Family family) {
    switch (family) {
        case Family::Logistic: return TestFunctionSet::parse("1");
        case Family::HuslerReiss: return TestFunctionSet::parse("x");
        case Family::Bilogistic: return TestFunctionSet::parse("1,x");
        case Family::AsymLogistic: return TestFunctionSet::parse("1,x,2x+2y");
        case Family::StudentT: return TestFunctionSet::parse("x,x+y");
    }
    throw DomainError("unknown family");
}

}  // namespace covar
