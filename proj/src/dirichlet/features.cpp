#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

#include "edtr/dirichlet.hpp"
#include "edtr/error.hpp"
#include "edtr/numeric.hpp"

namespace edtr {
namespace {

void check_alpha(std::span<const double> alpha) {
    if (alpha.empty()) throw Error(Errc::NonPositiveAlpha, "empty alpha");
    for (double a : alpha) {
        if (!(a > 0.0) || !std::isfinite(a)) throw Error(Errc::NonPositiveAlpha, "alpha components must be positive");
    }
}

double total(std::span<const double> alpha) {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s;
}

}  // namespace

DirichletFeatures dirichlet_features(std::span<const double> alpha) {
    using boost::math::digamma;
    using boost::math::lgamma;
    check_alpha(alpha);
    const double a0 = total(alpha);
    const auto n = static_cast<double>(alpha.size());

    double log_beta = -lgamma(a0);
    double weighted_digamma = 0.0;
    for (double a : alpha) {
        log_beta += lgamma(a);
        weighted_digamma += (a - 1.0) * digamma(a);
    }

    // lowest index wins ties
    const auto top = static_cast<std::size_t>(std::max_element(alpha.begin(), alpha.end()) - alpha.begin());
    const double am = alpha[top];

    DirichletFeatures f;
    f.concentration = a0;
    f.diff_entropy = log_beta + (a0 - n) * digamma(a0) - weighted_digamma;
    f.expected_max = am / a0;
    f.top_class_variance = am * (a0 - am) / (a0 * a0 * (a0 + 1.0));
    return f;
}

double entropy_confidence(std::span<const double> alpha, EntropyConfidenceForm form) {
    using boost::math::digamma;
    check_alpha(alpha);
    const double psi0 = digamma(total(alpha));
    double mass = 0.0;
    for (double a : alpha) mass += psi0 - digamma(a);
    if (form == EntropyConfidenceForm::Raw) mass = -mass;
    return 1.0 / (1.0 + mass);
}

double dirichlet_confidence(std::span<const double> alpha, EntropyConfidenceForm form) {
    check_alpha(alpha);
    const double a0 = total(alpha);
    const double expected_max = *std::max_element(alpha.begin(), alpha.end()) / a0;
    const double precision = sigmoid(a0 - static_cast<double>(alpha.size()));
    const double raw = (expected_max + precision + entropy_confidence(alpha, form)) / 3.0;
    // The raw entropy form can yield NaN/inf; the clip maps those to the bounds.
    if (std::isnan(raw)) return 0.01;
    return std::clamp(raw, 0.01, 0.99);
}

DirichletProfile dirichlet_profile(std::span<const double> alpha, EntropyConfidenceForm form) {
    DirichletProfile p;
    p.alpha.assign(alpha.begin(), alpha.end());
    p.features = dirichlet_features(alpha);
    p.entropy_conf = entropy_confidence(alpha, form);
    p.conf_dir = dirichlet_confidence(alpha, form);
    return p;
}

std::size_t component_count(const ReasoningSample& sample, std::size_t max_components) {
    if (max_components < 1) throw Error(Errc::InvalidArgument, "max_components must be positive");
    return std::min(ranked_answers(sample.trajectories).size(), max_components);
}

}  // namespace edtr
