#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

namespace dsym {

using Midx = std::vector<int>;

inline int total_degree(const Midx& m) {
    int s = 0;
    for (int e : m) s += e;
    return s;
}

/// Multivariate power series truncated at a total-degree cap. Arithmetic
/// closes over the cap (higher terms are dropped); coefficients are exact
/// for rational T, binary64 otherwise. Zero coefficients are not stored.
template <class T>
class TruncatedSeries {
public:
    TruncatedSeries(int nvars, int cap) : nvars_(nvars), cap_(cap) {
        if (nvars < 0 || cap < 0) throw std::invalid_argument("bad series shape");
    }

    static TruncatedSeries constant(int nvars, int cap, const T& v) {
        TruncatedSeries s(nvars, cap);
        s.set(Midx(nvars, 0), v);
        return s;
    }
    static TruncatedSeries variable(int nvars, int cap, int j, const T& scale = T(1)) {
        TruncatedSeries s(nvars, cap);
        Midx m(nvars, 0);
        if (j < 0 || j >= nvars) throw std::invalid_argument("variable index out of range");
        m[j] = 1;
        if (cap >= 1) s.set(m, scale);
        return s;
    }

    int nvars() const { return nvars_; }
    int cap() const { return cap_; }
    const std::map<Midx, T>& coeffs() const { return c_; }

    T coeff(const Midx& m) const {
        auto it = c_.find(m);
        return it == c_.end() ? T(0) : it->second;
    }
    void set(const Midx& m, const T& v) {
        if (static_cast<int>(m.size()) != nvars_) throw std::invalid_argument("bad multi-index");
        if (total_degree(m) > cap_) return;
        if (v == T(0))
            c_.erase(m);
        else
            c_[m] = v;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        check_shape(o);
        for (auto& [m, v] : o.c_) {
            auto [it, fresh] = c_.try_emplace(m, v);
            if (!fresh) {
                it->second += v;
                if (it->second == T(0)) c_.erase(it);
            }
        }
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        check_shape(o);
        for (auto& [m, v] : o.c_) {
            auto [it, fresh] = c_.try_emplace(m, -v);
            if (!fresh) {
                it->second -= v;
                if (it->second == T(0)) c_.erase(it);
            }
        }
        return *this;
    }
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }

    TruncatedSeries operator*(const TruncatedSeries& o) const {
        check_shape(o);
        TruncatedSeries out(nvars_, cap_);
        for (auto& [ma, va] : c_) {
            int da = total_degree(ma);
            for (auto& [mb, vb] : o.c_) {
                if (da + total_degree(mb) > cap_) continue;
                Midx m(nvars_);
                for (int j = 0; j < nvars_; ++j) m[j] = ma[j] + mb[j];
                auto [it, fresh] = out.c_.try_emplace(m, va * vb);
                if (!fresh) it->second += va * vb;
            }
        }
        out.prune();
        return out;
    }

    TruncatedSeries& scale(const T& k) {
        if (k == T(0)) {
            c_.clear();
            return *this;
        }
        for (auto& [m, v] : c_) v = v * k;
        return *this;
    }
    friend TruncatedSeries operator*(TruncatedSeries a, const T& k) { return a.scale(k), a; }

    /// Substitute x_i <- sum_j M[i][j] y_j (a linear change of variables into
    /// `nvars_out` new variables). Exact on polynomials within the cap.
    TruncatedSeries substitute_linear(const std::vector<std::vector<T>>& M, int nvars_out) const {
        if (static_cast<int>(M.size()) != nvars_) throw std::invalid_argument("substitution shape");
        std::vector<TruncatedSeries> lin;
        lin.reserve(nvars_);
        for (int i = 0; i < nvars_; ++i) {
            if (static_cast<int>(M[i].size()) != nvars_out)
                throw std::invalid_argument("substitution shape");
            TruncatedSeries L(nvars_out, cap_);
            for (int j = 0; j < nvars_out; ++j) {
                Midx m(nvars_out, 0);
                m[j] = 1;
                if (M[i][j] != T(0)) L.set(m, M[i][j]);
            }
            lin.push_back(std::move(L));
        }
        // memoized powers per variable
        std::vector<std::vector<TruncatedSeries>> pw(nvars_);
        auto power = [&](int i, int e) -> const TruncatedSeries& {
            auto& v = pw[i];
            if (v.empty()) v.push_back(TruncatedSeries::constant(nvars_out, cap_, T(1)));
            while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * lin[i]);
            return v[e];
        };
        TruncatedSeries out(nvars_out, cap_);
        for (auto& [m, val] : c_) {
            TruncatedSeries term = TruncatedSeries::constant(nvars_out, cap_, val);
            for (int i = 0; i < nvars_; ++i)
                if (m[i] > 0) term = term * power(i, m[i]);
            out += term;
        }
        return out;
    }

    T eval(const std::vector<T>& x) const {
        if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("eval dimension");
        T acc(0);
        for (auto& [m, v] : c_) {
            T t = v;
            for (int j = 0; j < nvars_; ++j)
                for (int e = 0; e < m[j]; ++e) t = t * x[j];
            acc += t;
        }
        return acc;
    }

    /// Coefficient-wise conversion, e.g. rational -> double for numeric use.
    template <class U, class F>
    TruncatedSeries<U> map(F f) const {
        TruncatedSeries<U> out(nvars_, cap_);
        for (auto& [m, v] : c_) out.set(m, f(v));
        return out;
    }

    void prune() {
        for (auto it = c_.begin(); it != c_.end();) {
            if (it->second == T(0))
                it = c_.erase(it);
            else
                ++it;
        }
    }

    bool operator==(const TruncatedSeries& o) const {
        return nvars_ == o.nvars_ && cap_ == o.cap_ && c_ == o.c_;
    }

private:
    void check_shape(const TruncatedSeries& o) const {
        if (nvars_ != o.nvars_ || cap_ != o.cap_)
            throw std::invalid_argument("series shape mismatch");
    }

    int nvars_;
    int cap_;
    std::map<Midx, T> c_;
};

}  // namespace dsym
