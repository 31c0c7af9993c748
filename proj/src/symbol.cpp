#include "dsym/symbol.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dsym {

void DirichletSymbol::add_term(std::int64_t n, const RationalComplex& c) {
    auto it = terms.find(n);
    if (it == terms.end()) {
        if (!c.is_zero()) terms.emplace(n, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
}

void DirichletSymbol::normalize() {
    for (auto it = terms.begin(); it != terms.end();) {
        if (it->second.is_zero())
            it = terms.erase(it);
        else
            ++it;
    }
}

namespace {

struct Lexer {
    const std::string& s;
    size_t pos = 0;

    explicit Lexer(const std::string& str) : s(str) { skip(); }
    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            skip();
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c))
            throw std::invalid_argument(std::string("expected '") + c + "' " + what +
                                        " at position " + std::to_string(pos));
    }

    // number := digits [('/' digits) | ('.' digits)]
    std::string number() {
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("expected a number at position " + std::to_string(pos));
        if (peek() == '/' || peek() == '.') {
            ++pos;
            size_t tail = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == tail) throw std::invalid_argument("dangling '/' or '.' at position " + std::to_string(pos));
        }
        std::string out = s.substr(start, pos - start);
        skip();
        return out;
    }
};

}  // namespace

DirichletSymbol parse_symbol(const std::string& text) {
    DirichletSymbol sym;
    Lexer lex(text);
    if (lex.done()) throw std::invalid_argument("empty symbol expression");

    bool first = true;
    while (!lex.done()) {
        int sign = 1;
        if (lex.accept('+')) {
            sign = 1;
        } else if (lex.accept('-')) {
            sign = -1;
        } else if (!first) {
            throw std::invalid_argument("expected '+' or '-' between terms at position " +
                                        std::to_string(lex.pos));
        }
        first = false;

        // term := [coef '*'] base '^-s' | base '^-s' | coef | [c0 '*'] 's'
        auto read_frequency_tail = [&](const std::string& base, const RationalComplex& coef) {
            if (base.find('/') != std::string::npos || base.find('.') != std::string::npos)
                throw std::invalid_argument("frequency must be an integer, got '" + base + "'");
            lex.expect('^', "after frequency");
            lex.expect('-', "in exponent");
            lex.expect('s', "in exponent");
            std::int64_t n = std::stoll(base);
            if (n <= 1) throw std::invalid_argument("frequency must be >= 2, got " + base);
            sym.add_term(n, coef);
        };
        auto add_characteristic = [&](const RationalComplex& coef) {
            if (!coef.is_real() || denominator(coef.re) != 1)
                throw std::invalid_argument("characteristic must be an integer");
            BigInt c0 = numerator(coef.re);
            if (c0 < 0) throw std::invalid_argument("negative characteristic");
            sym.c0 += c0.convert_to<std::int64_t>();
        };

        if (lex.accept('s')) {  // bare "s"
            add_characteristic(RationalComplex(Rational(sign)));
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(lex.peek())))
            throw std::invalid_argument("malformed term at position " + std::to_string(lex.pos));

        std::string num = lex.number();
        if (lex.peek() == '^') {  // the number was a frequency with unit coefficient
            read_frequency_tail(num, RationalComplex(Rational(sign)));
            continue;
        }
        RationalComplex coef;
        if (lex.accept('i'))
            coef = RationalComplex(Rational(0), parse_rational(num));
        else
            coef = RationalComplex(parse_rational(num));
        if (sign < 0) coef = -coef;

        if (lex.accept('*')) {
            if (lex.accept('s')) {
                add_characteristic(coef);
                continue;
            }
            if (!std::isdigit(static_cast<unsigned char>(lex.peek())))
                throw std::invalid_argument("expected a frequency after '*' at position " +
                                            std::to_string(lex.pos));
            std::string base = lex.number();
            read_frequency_tail(base, coef);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(lex.peek())) || lex.peek() == 's')
            throw std::invalid_argument("missing operator before position " +
                                        std::to_string(lex.pos));
        sym.c1 += coef;  // constant term
    }
    sym.normalize();
    return sym;
}

std::string print_symbol(const DirichletSymbol& sym) {
    std::ostringstream out;
    bool wrote = false;
    auto emit = [&](const RationalComplex& c, const std::string& suffix) {
        // split into real and imaginary pieces, each its own signed term
        for (int part = 0; part < 2; ++part) {
            Rational q = part == 0 ? c.re : c.im;
            if (q == 0) continue;
            bool neg = q < 0;
            Rational a = neg ? Rational(-q) : q;
            if (wrote)
                out << (neg ? " - " : " + ");
            else if (neg)
                out << "-";
            std::string mag = rational_to_string(a);
            if (part == 1) mag += "i";
            if (suffix.empty()) {
                out << mag;
            } else if (mag == "1" && part == 0) {
                out << suffix;
            } else {
                out << mag << "*" << suffix;
            }
            wrote = true;
        }
    };
    if (sym.c0 > 0) {
        if (sym.c0 == 1)
            out << "s";
        else
            out << sym.c0 << "*s";
        wrote = true;
    }
    emit(sym.c1, "");
    for (auto& [n, c] : sym.terms) emit(c, std::to_string(n) + "^-s");
    if (!wrote) out << "0";
    return out.str();
}

std::string symbol_to_json(const DirichletSymbol& sym) {
    nlohmann::json j;
    j["c0"] = sym.c0;
    j["c1"] = {to_double(sym.c1.re), to_double(sym.c1.im)};
    j["terms"] = nlohmann::json::array();
    for (auto& [n, c] : sym.terms)
        j["terms"].push_back({{"n", n}, {"c", {to_double(c.re), to_double(c.im)}}});
    return j.dump();
}

DirichletSymbol symbol_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    DirichletSymbol sym;
    sym.c0 = j.value("c0", std::int64_t(0));
    if (sym.c0 < 0) throw std::invalid_argument("negative characteristic");
    if (j.contains("c1")) {
        sym.c1 = RationalComplex(rational_from_double(j["c1"][0].get<double>()),
                                 rational_from_double(j["c1"][1].get<double>()));
    }
    for (auto& t : j.value("terms", nlohmann::json::array())) {
        std::int64_t n = t.at("n").get<std::int64_t>();
        if (n <= 1) throw std::invalid_argument("frequency must be >= 2");
        RationalComplex c(rational_from_double(t.at("c")[0].get<double>()),
                          rational_from_double(t.at("c")[1].get<double>()));
        sym.add_term(n, c);
    }
    sym.normalize();
    return sym;
}

DirichletSymbol parse_symbol_any(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (ch == '{') return symbol_from_json(text);
        break;
    }
    return parse_symbol(text);
}

DirichletSymbol load_symbol_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open symbol file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_symbol_any(buf.str());
}

}  // namespace dsym
