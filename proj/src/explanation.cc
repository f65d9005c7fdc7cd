// Copyright 2026 The xsumx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xsumx/explanation.h"

namespace xsumx {
namespace {

Json DiagnosticsJson(const Diagnostics& d) {
  return Json{{"perturbations", d.perturbations}, {"exhaustive", d.exhaustive}};
}

Json R2Json(const Diagnostics& d) {
  return d.r2 ? Json(*d.r2) : Json(nullptr);
}

Json ConfigJson(const Diagnostics& d) {
  return d.config ? ToJson(*d.config) : Json(nullptr);
}

Diagnostics DiagnosticsFromJson(const Json& j) {
  Diagnostics d;
  const Json& diag = j.at("diagnostics");
  d.perturbations = diag.at("perturbations").get<std::size_t>();
  d.exhaustive = diag.at("exhaustive").get<bool>();
  if (!j.at("r2").is_null()) d.r2 = j.at("r2").get<double>();
  if (!j.at("config_echo").is_null()) {
    d.config = LimeConfigFromJson(j.at("config_echo"));
  }
  return d;
}

template <typename F>
auto Parse(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

const char* MethodName(ExplanationMethod method) {
  return method == ExplanationMethod::kLime ? "lime" : "attention";
}

ExplanationMethod ParseMethod(const std::string& name) {
  if (name == "lime") return ExplanationMethod::kLime;
  if (name == "attention") return ExplanationMethod::kAttention;
  throw ValidationError("unknown method \"" + name +
                        "\" (expected lime or attention)");
}

Json ToJson(const LimeConfig& cfg) {
  return Json{{"num_perturbations", cfg.num_perturbations},
              {"mask_probability", cfg.mask_probability},
              {"ridge_lambda", cfg.ridge_lambda},
              {"kernel", KernelName(cfg.kernel)},
              {"kernel_width", cfg.kernel_width},
              {"rng_seed", cfg.rng_seed},
              {"exhaustive_when_possible", cfg.exhaustive_when_possible}};
}

LimeConfig LimeConfigFromJson(const Json& j) {
  return Parse("lime config", [&] {
    LimeConfig cfg;
    cfg.num_perturbations = j.at("num_perturbations").get<std::size_t>();
    cfg.mask_probability = j.at("mask_probability").get<double>();
    cfg.ridge_lambda = j.at("ridge_lambda").get<double>();
    cfg.kernel = ParseKernel(j.at("kernel").get<std::string>());
    cfg.kernel_width = j.at("kernel_width").get<double>();
    cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    cfg.exhaustive_when_possible = j.at("exhaustive_when_possible").get<bool>();
    return cfg;
  });
}

Json ToJson(const FragmentExplanation& e) {
  return Json{{"video_id", e.video_id},
              {"method", MethodName(e.method)},
              {"weights", e.weights},
              {"ranking", e.ranking},
              {"top", e.top},
              {"bottom", e.bottom},
              {"config_echo", ConfigJson(e.diagnostics)},
              {"r2", R2Json(e.diagnostics)},
              {"diagnostics", DiagnosticsJson(e.diagnostics)}};
}

FragmentExplanation FragmentExplanationFromJson(const Json& j) {
  return Parse("fragment explanation", [&] {
    FragmentExplanation e;
    e.video_id = j.at("video_id").get<std::string>();
    e.method = ParseMethod(j.at("method").get<std::string>());
    e.weights = j.at("weights").get<std::vector<double>>();
    e.ranking = j.at("ranking").get<std::vector<std::size_t>>();
    e.top = j.at("top").get<std::vector<std::size_t>>();
    e.bottom = j.at("bottom").get<std::vector<std::size_t>>();
    e.diagnostics = DiagnosticsFromJson(j);
    if (e.ranking.size() != e.weights.size()) {
      throw ValidationError("fragment explanation: ranking/weights mismatch");
    }
    return e;
  });
}

Json ToJson(const ObjectExplanation& e) {
  Json weights = Json::object();
  for (const auto& [id, w] : e.object_weights) weights[std::to_string(id)] = w;
  return Json{{"video_id", e.video_id},
              {"fragment_index", e.fragment_index},
              {"keyframe_index", e.keyframe_index},
              {"object_weights", weights},
              {"ranking", e.ranking},
              {"top", e.top},
              {"bottom", e.bottom},
              {"config_echo", ConfigJson(e.diagnostics)},
              {"r2", R2Json(e.diagnostics)},
              {"diagnostics", DiagnosticsJson(e.diagnostics)}};
}

ObjectExplanation ObjectExplanationFromJson(const Json& j) {
  return Parse("object explanation", [&] {
    ObjectExplanation e;
    e.video_id = j.at("video_id").get<std::string>();
    e.fragment_index = j.at("fragment_index").get<std::size_t>();
    e.keyframe_index = j.at("keyframe_index").get<std::size_t>();
    for (const auto& [key, value] : j.at("object_weights").items()) {
      e.object_weights[static_cast<ObjectId>(std::stoul(key))] =
          value.get<double>();
    }
    e.ranking = j.at("ranking").get<std::vector<ObjectId>>();
    e.top = j.at("top").get<std::vector<ObjectId>>();
    e.bottom = j.at("bottom").get<std::vector<ObjectId>>();
    e.diagnostics = DiagnosticsFromJson(j);
    return e;
  });
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace xsumx
