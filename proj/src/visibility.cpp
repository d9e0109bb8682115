#include "illusionpad/visibility.hpp"

#include <cmath>
#include <vector>

#include "illusionpad/error.hpp"

namespace illusionpad {

void SsimParams::validate() const {
    if (window < 3 || window % 2 == 0) throw DomainError("SSIM window must be odd and at least 3");
    if (!(sigma > 0)) throw DomainError("SSIM window sigma must be positive");
    if (!(k1 > 0) || !(k2 > 0)) throw DomainError("SSIM constants must be positive");
    if (!(dynamic_range > 0)) throw DomainError("SSIM dynamic range must be positive");
}

namespace {

Eigen::VectorXd gaussian_window(int size, double sigma) {
    Eigen::VectorXd w(size);
    const int half = size / 2;
    for (int i = 0; i < size; ++i) w[i] = std::exp(-double((i - half) * (i - half)) / (2 * sigma * sigma));
    return w / w.sum();
}

// Separable 'valid' correlation with a symmetric kernel.
ImageArray filter_valid(const ImageArray& in, const Eigen::VectorXd& k) {
    const Eigen::Index n = k.size();
    const Eigen::Index rows = in.rows();
    const Eigen::Index cols = in.cols() - n + 1;
    ImageArray horizontal = ImageArray::Zero(rows, cols);
    for (Eigen::Index i = 0; i < n; ++i) horizontal += k[i] * in.middleCols(i, cols);
    const Eigen::Index out_rows = rows - n + 1;
    ImageArray out = ImageArray::Zero(out_rows, cols);
    for (Eigen::Index i = 0; i < n; ++i) out += k[i] * horizontal.middleRows(i, out_rows);
    return out;
}

}  // namespace

double mssim(const GrayImage& reference, const GrayImage& distorted, const SsimParams& params) {
    params.validate();
    if (reference.width() != distorted.width() || reference.height() != distorted.height())
        throw DomainError("MSSIM inputs must have identical dimensions");
    if (reference.width() < params.window || reference.height() < params.window)
        throw DomainError("MSSIM inputs must be at least as large as the window");
    const Eigen::VectorXd k = gaussian_window(params.window, params.sigma);
    const ImageArray& a = reference.array();
    const ImageArray& b = distorted.array();
    const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
    const double c2 = std::pow(params.k2 * params.dynamic_range, 2);

    const ImageArray mu_a = filter_valid(a, k);
    const ImageArray mu_b = filter_valid(b, k);
    const ImageArray aa = filter_valid(a * a, k) - mu_a * mu_a;
    const ImageArray bb = filter_valid(b * b, k) - mu_b * mu_b;
    const ImageArray ab = filter_valid(a * b, k) - mu_a * mu_b;
    const ImageArray map = ((2 * mu_a * mu_b + c1) * (2 * ab + c2)) /
                           ((mu_a * mu_a + mu_b * mu_b + c1) * (aa + bb + c2));
    return map.mean();
}

VisibilityVerdict verdict(double index_v, double v_th, const ViewingPosition& position, bool extrapolated_angles) {
    if (!(v_th > 0 && v_th <= 1)) throw DomainError("visibility threshold must lie in (0, 1]");
    VisibilityVerdict out;
    out.index_v = index_v;
    out.threshold_v_th = v_th;
    out.visible = !(index_v >= v_th);
    out.position = position;
    out.extrapolated_angles = extrapolated_angles;
    return out;
}

VisibilityEvaluator::VisibilityEvaluator(const HybridKeypad& keypad, const DafSpec& daf, const SsimParams& ssim)
    : display_(keypad.device.display), layout_(keypad.layout), daf_(daf), ssim_(ssim) {
    daf_.validate();
    ssim_.validate();
    const GrayImage& composed = keypad.hybrid.composed;
    if (composed.width() != display_.width_px || composed.height() != display_.height_px)
        throw DomainError("keypad raster does not match its device resolution");
    layout_.validate(composed.width(), composed.height());
    hybrid_ = forward_transform(composed);
    reference_ = forward_transform(keypad.hybrid.surfer_low);
}

VisibilityDetail VisibilityEvaluator::evaluate(const ViewingPosition& pos) const {
    VisibilityDetail out;
    out.perception = perception_params(display_, pos, daf_);
    const GrayImage reference = inverse_transform(simulate_perception(reference_, out.perception, daf_.ratio_r));
    const GrayImage distorted = inverse_transform(simulate_perception(hybrid_, out.perception, daf_.ratio_r));
    const auto rects = layout_.button_rects();
    double sum = 0.0;
    for (int k = 0; k < 10; ++k) {
        const auto& r = rects[k];
        out.per_button[k] = mssim(reference.crop(r.x, r.y, r.width, r.height),
                                  distorted.crop(r.x, r.y, r.width, r.height), ssim_);
        sum += out.per_button[k];
    }
    out.index_v = sum / 10.0;
    return out;
}

double visibility_index(const HybridKeypad& keypad, const ViewingPosition& pos, const DafSpec& daf,
                        const SsimParams& ssim) {
    return VisibilityEvaluator(keypad, daf, ssim).index(pos);
}

double mean_visibility_index(std::span<const VisibilityEvaluator> evaluators, const ViewingPosition& pos) {
    if (evaluators.empty()) throw DomainError("no keypads to evaluate");
    double sum = 0.0;
    for (const auto& e : evaluators) sum += e.index(pos);
    return sum / double(evaluators.size());
}

}  // namespace illusionpad
