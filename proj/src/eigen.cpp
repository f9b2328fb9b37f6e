#include "smoothrl/eigen.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace smoothrl {

namespace eigen_detail {

std::vector<double> balance(Matrix& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.rows();
    std::vector<double> scale(n, 1.0);
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                scale[i] *= f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
    return scale;
}

void reduce_to_hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<double> ort(n, 0.0);
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double scale = 0.0;
        for (std::size_t i = m; i < n; ++i) scale += std::abs(a(i, m - 1));
        if (scale == 0.0) continue;

        double h = 0.0;
        for (std::size_t i = n; i-- > m;) {
            ort[i] = a(i, m - 1) / scale;
            h += ort[i] * ort[i];
        }
        double g = std::sqrt(h);
        if (ort[m] > 0) g = -g;
        h -= ort[m] * g;
        ort[m] -= g;

        // H = I - u u^T / h applied as H A H.
        for (std::size_t j = m; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = n; i-- > m;) f += ort[i] * a(i, j);
            f /= h;
            for (std::size_t i = m; i < n; ++i) a(i, j) -= f * ort[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = n; j-- > m;) f += ort[j] * a(i, j);
            f /= h;
            for (std::size_t j = m; j < n; ++j) a(i, j) -= f * ort[j];
        }
        a(m, m - 1) = scale * g;
        for (std::size_t i = m + 1; i < n; ++i) a(i, m - 1) = 0.0;
    }
}

std::vector<std::complex<double>> hessenberg_qr(Matrix& H) {
    const int nn = static_cast<int>(H.rows());
    std::vector<double> wr(static_cast<std::size_t>(nn), 0.0), wi(static_cast<std::size_t>(nn), 0.0);
    auto at = [&H](int i, int j) -> double& { return H(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };
    constexpr double eps = std::numeric_limits<double>::epsilon();

    double norm = 0.0;
    for (int i = 0; i < nn; ++i) {
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(at(i, j));
    }
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(nn));
    if (norm == 0.0) {
        out.assign(static_cast<std::size_t>(nn), {0.0, 0.0});
        return out;
    }

    const int low = 0;
    int n = nn - 1;
    int iter = 0;
    long total_iter = 0;
    const long max_total = 30L * std::max(nn, 1);
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, w, x, y;

    while (n >= low) {
        // Single small subdiagonal element.
        int l = n;
        while (l > low) {
            s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(at(l, l - 1)) < eps * s) break;
            --l;
        }

        if (l == n) {
            at(n, n) += exshift;
            wr[static_cast<std::size_t>(n)] = at(n, n);
            wi[static_cast<std::size_t>(n)] = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = at(n, n - 1) * at(n - 1, n);
            p = (at(n - 1, n - 1) - at(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            at(n, n) += exshift;
            at(n - 1, n - 1) += exshift;
            x = at(n, n);
            const auto un = static_cast<std::size_t>(n);
            if (q >= 0) {
                z = (p >= 0) ? p + z : p - z;
                wr[un - 1] = x + z;
                wr[un] = wr[un - 1];
                if (z != 0.0) wr[un] = x - w / z;
                wi[un - 1] = 0.0;
                wi[un] = 0.0;
            } else {
                wr[un - 1] = x + p;
                wr[un] = x + p;
                wi[un - 1] = z;
                wi[un] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            if (++total_iter > max_total) {
                throw ConvergenceError("QR iteration did not converge after " + std::to_string(max_total) +
                                           " sweeps; " + std::to_string(nn - 1 - n) + " of " + std::to_string(nn) +
                                           " eigenvalues deflated",
                                       std::abs(at(n, n - 1)));
            }
            x = at(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = at(n - 1, n - 1);
                w = at(n, n - 1) * at(n - 1, n);
            }
            // Exceptional shifts.
            if (iter == 10) {
                exshift += x;
                for (int i = low; i <= n; ++i) at(i, i) -= x;
                s = std::abs(at(n, n - 1)) + std::abs(at(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = low; i <= n; ++i) at(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            // Two consecutive small subdiagonal elements.
            int m = n - 2;
            while (m >= l) {
                z = at(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at(m + 1, m) + at(m, m + 1);
                q = at(m + 1, m + 1) - z - r - s;
                r = at(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) * (std::abs(at(m - 1, m - 1)) + std::abs(z) + std::abs(at(m + 1, m + 1))))) {
                    break;
                }
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                at(i, i - 2) = 0.0;
                if (i > m + 2) at(i, i - 3) = 0.0;
            }

            // Double-shift QR sweep on rows l..n, columns m..n.
            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = (k != n - 1);
                if (k != m) {
                    p = at(k, k - 1);
                    q = at(k + 1, k - 1);
                    r = notlast ? at(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0.0) continue;
                if (k != m) {
                    at(k, k - 1) = -s * x;
                } else if (l != m) {
                    at(k, k - 1) = -at(k, k - 1);
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j < nn; ++j) {
                    p = at(k, j) + q * at(k + 1, j);
                    if (notlast) {
                        p += r * at(k + 2, j);
                        at(k + 2, j) -= p * z;
                    }
                    at(k, j) -= p * x;
                    at(k + 1, j) -= p * y;
                }
                for (int i = 0; i <= std::min(n, k + 3); ++i) {
                    p = x * at(i, k) + y * at(i, k + 1);
                    if (notlast) {
                        p += z * at(i, k + 2);
                        at(i, k + 2) -= p * r;
                    }
                    at(i, k) -= p;
                    at(i, k + 1) -= p * q;
                }
            }
        }
    }
    for (int i = 0; i < nn; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace eigen_detail

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    if (!a.square()) throw InvalidParameters("eigenvalues: matrix must be square");
    for (double v : a.data()) {
        if (!std::isfinite(v)) throw InvalidParameters("eigenvalues: matrix must be finite");
    }
    Matrix h = a;
    eigen_detail::balance(h);
    eigen_detail::reduce_to_hessenberg(h);
    auto ev = eigen_detail::hessenberg_qr(h);
    std::sort(ev.begin(), ev.end(), [](const std::complex<double>& l, const std::complex<double>& r) {
        if (l.real() != r.real()) return l.real() > r.real();
        return l.imag() > r.imag();
    });
    return ev;
}

} // namespace smoothrl
