#pragma once

// Independent reference implementations used to check the library.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "illusionpad/keypad.hpp"
#include "illusionpad/spectral.hpp"

namespace oracle {

using illusionpad::GrayImage;

inline GrayImage random_image(int w, int h, std::uint32_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    GrayImage img(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img(x, y) = u(gen);
    return img;
}

// SSIM with an explicit 2D window and per-window sums, no separability.
inline double brute_force_mssim(const GrayImage& a, const GrayImage& b, int win = 11, double sigma = 1.5,
                                double k1 = 0.01, double k2 = 0.03, double range = 1.0) {
    std::vector<double> w(static_cast<size_t>(win * win));
    double total = 0.0;
    const double c = (win - 1) / 2.0;
    for (int j = 0; j < win; ++j)
        for (int i = 0; i < win; ++i) {
            const double v = std::exp(-((i - c) * (i - c) + (j - c) * (j - c)) / (2 * sigma * sigma));
            w[static_cast<size_t>(j * win + i)] = v;
            total += v;
        }
    for (auto& v : w) v /= total;
    const double c1 = (k1 * range) * (k1 * range);
    const double c2 = (k2 * range) * (k2 * range);
    double sum = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + win <= a.height(); ++y0)
        for (int x0 = 0; x0 + win <= a.width(); ++x0) {
            double ma = 0, mb = 0;
            for (int j = 0; j < win; ++j)
                for (int i = 0; i < win; ++i) {
                    const double wt = w[static_cast<size_t>(j * win + i)];
                    ma += wt * a(x0 + i, y0 + j);
                    mb += wt * b(x0 + i, y0 + j);
                }
            double va = 0, vb = 0, cov = 0;
            for (int j = 0; j < win; ++j)
                for (int i = 0; i < win; ++i) {
                    const double wt = w[static_cast<size_t>(j * win + i)];
                    const double da = a(x0 + i, y0 + j) - ma;
                    const double db = b(x0 + i, y0 + j) - mb;
                    va += wt * da * da;
                    vb += wt * db * db;
                    cov += wt * da * db;
                }
            sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return sum / count;
}

// Full complex DFT filter: X = DFT(img); X *= gain(nx, ny) with signed cycles; inverse.
// Returns the real part and reports the largest imaginary residue.
template <typename Gain>
GrayImage naive_dft_filter(const GrayImage& img, Gain gain, double* max_imag = nullptr) {
    const int w = img.width(), h = img.height();
    const double two_pi = 2 * std::numbers::pi;
    std::vector<std::complex<double>> X(static_cast<size_t>(w * h));
    for (int ky = 0; ky < h; ++ky)
        for (int kx = 0; kx < w; ++kx) {
            std::complex<double> acc = 0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    acc += img(x, y) * std::polar(1.0, -two_pi * (double(kx) * x / w + double(ky) * y / h));
            const double nx = kx < (w + 1) / 2 ? kx : kx - w;
            const double ny = ky < (h + 1) / 2 ? ky : ky - h;
            X[static_cast<size_t>(ky * w + kx)] = acc * gain(nx, ny);
        }
    GrayImage out(w, h, 0.0);
    double imag = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::complex<double> acc = 0;
            for (int ky = 0; ky < h; ++ky)
                for (int kx = 0; kx < w; ++kx)
                    acc += X[static_cast<size_t>(ky * w + kx)] *
                           std::polar(1.0, two_pi * (double(kx) * x / w + double(ky) * y / h));
            acc /= double(w * h);
            out(x, y) = acc.real();
            imag = std::max(imag, std::abs(acc.imag()));
        }
    if (max_imag) *max_imag = imag;
    return out;
}

inline double correlation(const GrayImage& a, const GrayImage& b) {
    const double ma = a.array().mean(), mb = b.array().mean();
    const auto da = a.array() - ma;
    const auto db = b.array() - mb;
    const double denom = std::sqrt((da * da).sum() * (db * db).sum());
    return denom > 0 ? (da * db).sum() / denom : 0.0;
}

// Digit whose centered template correlates best with the crop.
inline int classify_digit(const GrayImage& crop, const illusionpad::RenderStyle& style) {
    int best = -1;
    double best_score = -2;
    for (int d = 0; d <= 9; ++d) {
        const double s = correlation(crop, illusionpad::render_glyph(d, style, crop.width(), crop.height()));
        if (s > best_score) {
            best_score = s;
            best = d;
        }
    }
    return best;
}

// Upper 1% point of chi-square with 9 degrees of freedom.
constexpr double kChiSquare9At99 = 21.666;

}  // namespace oracle
