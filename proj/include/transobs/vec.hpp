#ifndef TRANSOBS_VEC_HPP
#define TRANSOBS_VEC_HPP

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace transobs {

inline constexpr int kMaxDim = 3;

/// Small dense vector for spatial points and field values (dim <= 3).
/// Value type, no heap; dimension carried at runtime.
struct Vec {
    double c[kMaxDim]{0.0, 0.0, 0.0};
    int n{0};

    Vec() = default;
    explicit Vec(int dim) : n(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Vec: bad dimension " + std::to_string(dim));
    }

    static Vec of(double x) {
        Vec v(1);
        v.c[0] = x;
        return v;
    }
    static Vec of(double x, double y) {
        Vec v(2);
        v.c[0] = x;
        v.c[1] = y;
        return v;
    }
    static Vec of(double x, double y, double z) {
        Vec v(3);
        v.c[0] = x;
        v.c[1] = y;
        v.c[2] = z;
        return v;
    }
    static Vec zero(int dim) { return Vec(dim); }

    int dim() const { return n; }
    double operator[](int i) const { return c[i]; }
    double& operator[](int i) { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double a) {
        for (int i = 0; i < n; ++i) c[i] *= a;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double a, Vec v) { return v *= a; }
    friend Vec operator*(Vec v, double a) { return v *= a; }
    friend Vec operator-(Vec v) {
        for (int i = 0; i < v.n; ++i) v.c[i] = -v.c[i];
        return v;
    }

    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.n != b.n) return false;
        for (int i = 0; i < a.n; ++i)
            if (a.c[i] != b.c[i]) return false;
        return true;
    }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline void check_dim(const Vec& v, int expected, const char* what) {
    if (v.dim() != expected)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch, got " +
                                    std::to_string(v.dim()) + ", expected " + std::to_string(expected));
}

}  // namespace transobs

#endif
