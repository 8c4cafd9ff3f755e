#include "dcfwb/diffpoly.hpp"
#include "dcfwb/error.hpp"

#include <cctype>

namespace dcfwb {

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    DiffPoly run() {
        skip();
        if (at_end())
            throw ParseError("empty input", pos_);
        std::vector<Monomial> ms;
        bool negative = false;
        if (peek() == '-' || peek() == '+') {
            negative = peek() == '-';
            ++pos_;
        }
        ms.push_back(term(negative));
        skip();
        while (!at_end()) {
            char c = peek();
            if (c != '+' && c != '-')
                throw ParseError(std::string("unexpected '") + c + "'", pos_);
            ++pos_;
            ms.push_back(term(c == '-'));
            skip();
        }
        return DiffPoly::from_monomials(std::move(ms));
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    void skip() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())))
            ++pos_;
    }

    std::string digits() {
        skip();
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            ++pos_;
        if (start == pos_)
            throw ParseError("expected digits", pos_);
        return std::string(s_.substr(start, pos_ - start));
    }

    std::uint64_t small_nat(std::uint64_t limit, const char* what) {
        std::size_t at = pos_;
        std::string d = digits();
        if (d.size() > 12 || std::stoull(d) > limit)
            throw CapOverflow(std::string(what) + " " + d + " exceeds cap at position " + std::to_string(at));
        return std::stoull(d);
    }

    bool is_family(char c) const { return c == 'Y' || c == 'T' || c == 'X' || c == 'E'; }

    Monomial term(bool negative) {
        skip();
        if (at_end())
            throw ParseError("expected term", pos_);
        Monomial m{Rational(negative ? -1 : 1), {}};
        bool need_atom = true;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            mpz_class num(digits());
            mpz_class den(1);
            skip();
            if (!at_end() && peek() == '/') {
                ++pos_;
                std::size_t at = pos_;
                den = mpz_class(digits());
                if (den == 0)
                    throw ParseError("zero denominator", at);
            }
            Rational q(num, den);
            q.canonicalize();
            m.coeff *= q;
            need_atom = false;
            skip();
            if (at_end() || peek() != '*')
                return m;
            ++pos_;
            need_atom = true;
        }
        while (true) {
            skip();
            if (need_atom) {
                Factor f = atom();
                m.exps.push_back(f);
            }
            skip();
            if (at_end() || peek() != '*')
                break;
            ++pos_;
            need_atom = true;
        }
        DiffPoly p = DiffPoly(m.coeff);
        for (const auto& f : m.exps)
            p *= DiffPoly::indet(f.x, f.exp);
        return p.monomials().empty() ? Monomial{Rational(0), {}} : p.monomials()[0];
    }

    Factor atom() {
        skip();
        if (at_end() || !is_family(peek()))
            throw ParseError("expected variable", pos_);
        char fam = peek();
        ++pos_;
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
            throw ParseError("expected variable index", pos_);
        auto idx = small_nat(0x7fffffff, "variable index");
        Var v{fam == 'Y' ? Family::Y : fam == 'T' ? Family::T : fam == 'X' ? Family::X : Family::E,
              static_cast<std::uint32_t>(idx)};
        std::uint64_t deriv = 0;
        std::size_t save = pos_;
        skip();
        if (!at_end() && peek() == '\'') {
            while (!at_end() && peek() == '\'') {
                ++deriv;
                ++pos_;
            }
            if (deriv > caps().max_deriv)
                throw CapOverflow("derivative order exceeds cap at position " + std::to_string(pos_));
        } else if (pos_ + 1 < s_.size() && peek() == '^' && next_nonspace(pos_ + 1) == '(') {
            ++pos_;
            skip();
            ++pos_;
            deriv = small_nat(caps().max_deriv, "derivative order");
            skip();
            if (at_end() || peek() != ')')
                throw ParseError("expected ')'", pos_);
            ++pos_;
        } else {
            pos_ = save;
        }
        std::uint64_t exp = 1;
        save = pos_;
        skip();
        if (!at_end() && peek() == '^') {
            ++pos_;
            skip();
            if (!at_end() && peek() == '(')
                throw ParseError("derivative after power", pos_);
            exp = small_nat(caps().max_degree, "exponent");
            if (exp == 0)
                throw ParseError("zero exponent", pos_ - 1);
        } else {
            pos_ = save;
        }
        return {{v, static_cast<std::uint32_t>(deriv)}, static_cast<std::uint32_t>(exp)};
    }

    char next_nonspace(std::size_t i) const {
        while (i < s_.size() && std::isspace(static_cast<unsigned char>(s_[i])))
            ++i;
        return i < s_.size() ? s_[i] : '\0';
    }
};

} // namespace

DiffPoly parse(std::string_view text) { return Parser(text).run(); }

std::string render(Var v) { return family_letter(v.family) + std::to_string(v.index); }

std::string render(Indet x) {
    std::string s = render(x.var);
    if (x.deriv <= 3)
        s.append(x.deriv, '\'');
    else
        s += "^(" + std::to_string(x.deriv) + ")";
    return s;
}

std::string render(const DiffPoly& a) {
    if (a.is_zero())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& m : a.monomials()) {
        Rational c = m.coeff;
        bool neg = c < 0;
        if (neg)
            c = -c;
        if (first)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        first = false;
        std::string body;
        if (m.exps.empty() || c != 1)
            body = c.get_str();
        for (const auto& f : m.exps) {
            if (!body.empty())
                body += "*";
            body += render(f.x);
            if (f.exp > 1)
                body += "^" + std::to_string(f.exp);
        }
        out += body;
    }
    return out;
}

} // namespace dcfwb
