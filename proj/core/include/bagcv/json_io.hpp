#pragma once

#include <nlohmann/json.hpp>

#include "bagcv/amse.hpp"
#include "bagcv/density.hpp"
#include "bagcv/experiments.hpp"

namespace bagcv {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const GaussianMixture& f);
/// {"weights": [...], "means": [...], "sds": [...]}; validated.
GaussianMixture mixture_from_json(const nlohmann::json& j);

inline constexpr std::size_t amse_curve_samples = 50;

/// Constants, m_hat and the curve at 50 log-spaced m in [2, n].
ordered_json to_json(const AmseModel& model);

/// Keys: density (preset name or mixture object), n, reps, N, m_list (counts,
/// or the string "analytic"), seed, estimate_m0 {s, r}, threads. Missing keys
/// keep StudySpec defaults. Throws ConfigError on malformed input.
StudySpec study_spec_from_json(const nlohmann::json& j);
ordered_json to_json(const StudySpec& spec);

ordered_json to_json(const RvCalibration& cal);
ordered_json to_json(const IseSummary& s);

}  // namespace bagcv
