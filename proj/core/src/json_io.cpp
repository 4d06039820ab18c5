#include "bagcv/json_io.hpp"

#include <cmath>

#include "bagcv/error.hpp"

namespace bagcv {

ordered_json to_json(const GaussianMixture& f) {
  ordered_json j;
  j["weights"] = f.weights;
  j["means"] = f.means;
  j["sds"] = f.sds;
  return j;
}

GaussianMixture mixture_from_json(const nlohmann::json& j) {
  try {
    GaussianMixture f;
    f.weights = j.at("weights").get<std::vector<double>>();
    f.means = j.at("means").get<std::vector<double>>();
    f.sds = j.at("sds").get<std::vector<double>>();
    f.validate();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mixture: ") + e.what());
  }
}

ordered_json to_json(const AmseModel& model) {
  ordered_json j;
  j["A"] = model.A;
  j["C"] = model.C;
  j["mu_rescale"] = model.bias.mu_rescale;
  j["mu_cv"] = model.bias.mu_cv;
  j["n"] = model.n;
  j["N"] = model.N;
  j["m_hat"] = model.m_hat;
  j["boundary_warning"] = model.boundary_warning;
  if (model.s > 0) {
    j["s"] = model.s;
    j["r"] = model.r;
    j["pilot_failures"] = model.pilot_failures;
    j["pilot_components"] = model.pilot_components;
  }
  ordered_json curve = ordered_json::array();
  const double lo = std::log(2.0);
  const double hi = std::log(static_cast<double>(std::max<std::size_t>(model.n, 3)));
  for (std::size_t k = 0; k < amse_curve_samples; ++k) {
    const double m = std::exp(lo + (hi - lo) * static_cast<double>(k) /
                                       static_cast<double>(amse_curve_samples - 1));
    curve.push_back({{"m", m}, {"amse", model.curve(m)}});
  }
  j["curve"] = std::move(curve);
  return j;
}

StudySpec study_spec_from_json(const nlohmann::json& j) {
  StudySpec spec;
  try {
    if (!j.is_object()) throw ConfigError("study spec must be a JSON object");
    if (j.contains("density")) {
      const auto& d = j.at("density");
      if (d.is_string()) {
        spec.density_name = d.get<std::string>();
        spec.density = preset(spec.density_name);
      } else {
        spec.density_name = "custom";
        spec.density = mixture_from_json(d);
      }
    }
    spec.n = j.value("n", spec.n);
    spec.reps = j.value("reps", spec.reps);
    spec.N = j.value("N", spec.N);
    spec.seed = j.value("seed", spec.seed);
    spec.threads = j.value("threads", spec.threads);
    if (j.contains("m_list")) {
      for (const auto& m : j.at("m_list")) {
        if (m.is_string()) {
          if (m.get<std::string>() != "analytic") {
            throw ConfigError("m_list: only the string \"analytic\" is allowed");
          }
          spec.include_analytic_m = true;
        } else {
          spec.m_list.push_back(m.get<std::size_t>());
        }
      }
    }
    if (j.contains("estimate_m0") && !j.at("estimate_m0").is_null()) {
      const auto& e = j.at("estimate_m0");
      spec.estimate_m0_params = std::pair{e.at("s").get<std::size_t>(), e.at("r").get<std::size_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("study spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ordered_json to_json(const StudySpec& spec) {
  ordered_json j;
  if (spec.density_name == "custom") {
    j["density"] = to_json(spec.density);
  } else {
    j["density"] = spec.density_name;
  }
  j["n"] = spec.n;
  j["reps"] = spec.reps;
  j["N"] = spec.N;
  ordered_json ms = spec.m_list;
  if (spec.include_analytic_m) ms.push_back("analytic");
  j["m_list"] = std::move(ms);
  j["seed"] = spec.seed;
  if (spec.estimate_m0_params) {
    j["estimate_m0"] = {{"s", spec.estimate_m0_params->first}, {"r", spec.estimate_m0_params->second}};
  }
  return j;
}

ordered_json to_json(const RvCalibration& cal) {
  ordered_json j;
  j["r_v"] = cal.r_v;
  j["seed"] = cal.seed;
  j["replicates"] = cal.replicates;
  j["sizes"] = cal.sizes;
  j["a_hat"] = cal.a_hat;
  j["r_v_by_size"] = cal.r_v_by_size;
  j["disagreement"] = cal.disagreement;
  j["consistent"] = cal.consistent;
  j["d1_m0"] = cal.d1_m0;
  j["d1_within_10pct"] = cal.d1_within_10pct;
  j["claw_m0"] = cal.claw_m0;
  j["r_v_asymptotic"] = cal.r_v_asymptotic;
  return j;
}

ordered_json to_json(const IseSummary& s) {
  ordered_json j;
  j["m"] = s.m;
  j["count"] = s.count;
  j["mean_ratio"] = s.mean_ratio;
  j["prop_below_one"] = s.prop_below_one;
  return j;
}

}  // namespace bagcv
