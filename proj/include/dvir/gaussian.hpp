#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "dvir/errors.hpp"

namespace dvir {

/// Exact Gaussian rational a + b*I with I^2 = -1.  The imaginary unit is the
/// single adjoined branch constant; every half power of a negative base in the
/// engine is rewritten through it.
class GaussianRational {
  public:
    GaussianRational() : re_(0), im_(0) {}
    GaussianRational(long n) : re_(n), im_(0) {}
    GaussianRational(mpq_class re) : re_(std::move(re)), im_(0) {}
    GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return GaussianRational(0, 1); }
    /// I^k for any integer k.
    static GaussianRational unit(long k) {
        switch (((k % 4) + 4) % 4) {
            case 0: return GaussianRational(1);
            case 1: return GaussianRational(0, 1);
            case 2: return GaussianRational(-1);
            default: return GaussianRational(0, -1);
        }
    }
    static GaussianRational of(long num, long den) {
        mpq_class q(num, den);
        q.canonicalize();
        return GaussianRational(q);
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_one() const { return re_ == 1 && im_ == 0; }
    bool is_rational() const { return im_ == 0; }

    GaussianRational operator-() const { return {-re_, -im_}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }

    GaussianRational inverse() const {
        if (is_zero()) throw DivisionByZero();
        mpq_class n = re_ * re_ + im_ * im_;
        return {re_ / n, -im_ / n};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        return a * b.inverse();
    }

    GaussianRational pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        GaussianRational acc(1), base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    static GaussianRational sum(const std::vector<GaussianRational>& v) {
        GaussianRational r;
        for (const auto& x : v) r += x;
        return r;
    }

    bool operator==(const GaussianRational& o) const { return re_ == o.re_ && im_ == o.im_; }
    bool operator!=(const GaussianRational& o) const { return !(*this == o); }

    /// Lexicographic order on (re, im); used only for canonical tie-breaking.
    bool operator<(const GaussianRational& o) const {
        int c = cmp(re_, o.re_);
        if (c != 0) return c < 0;
        return cmp(im_, o.im_) < 0;
    }

    std::string str() const {
        if (im_ == 0) return re_.get_str();
        std::string s;
        if (re_ != 0) s = re_.get_str();
        std::string im = im_.get_str();
        if (im == "1") im = "I";
        else if (im == "-1") im = "-I";
        else im += "*I";
        if (!s.empty() && im[0] != '-') s += "+";
        return s + im;
    }

    friend std::ostream& operator<<(std::ostream& os, const GaussianRational& g) {
        return os << g.str();
    }

  private:
    mpq_class re_, im_;
};

} // namespace dvir
