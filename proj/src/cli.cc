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

#include "xsumx/cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xsumx/bundle.h"
#include "xsumx/evaluation.h"
#include "xsumx/explanation.h"
#include "xsumx/external_oracle.h"
#include "xsumx/fragment_explainer.h"
#include "xsumx/io.h"
#include "xsumx/object_explainer.h"
#include "xsumx/synth.h"
#include "xsumx/toy_oracles.h"

namespace xsumx {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ValidationError("oracle selector: bad " + what + " \"" + s + "\"");
  }
  return v;
}

struct CommonFlags {
  std::string oracle;
  std::string corpus;
  std::vector<std::string> videos;
  std::string out = ".";
  std::size_t workers = 1;
  FragmenterConfig fragmenter;
};

struct LimeFlags {
  std::size_t perturbations = 0;  // 0: level default
  std::string kernel = "uniform";
  double kernel_width = LimeConfig{}.kernel_width;
  double ridge_lambda = LimeConfig{}.ridge_lambda;
  std::uint64_t seed = 0;

  LimeConfig Apply(LimeConfig cfg) const {
    if (perturbations > 0) cfg.num_perturbations = perturbations;
    cfg.kernel = ParseKernel(kernel);
    cfg.kernel_width = kernel_width;
    cfg.ridge_lambda = ridge_lambda;
    cfg.rng_seed = seed;
    cfg.Validate();
    return cfg;
  }
};

void AddCommonFlags(CLI::App* cmd, CommonFlags* f, bool with_oracle) {
  if (with_oracle) {
    cmd->add_option("--oracle", f->oracle,
                    "Oracle selector (default: $XSUMX_ORACLE)");
  }
  cmd->add_option("--corpus", f->corpus,
                  "Directory with one sub-directory per video");
  cmd->add_option("--video", f->videos, "Single video directory (repeatable)");
  cmd->add_option("--out", f->out, "Output directory");
  cmd->add_option("--workers", f->workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--distance-threshold", f->fragmenter.distance_threshold,
                  "Shot boundary threshold when fragments.json is absent");
  cmd->add_option("--min-fragments", f->fragmenter.min_fragments,
                  "Subdivide videos with fewer shots than this");
  cmd->add_option("--fallback-fragments",
                  f->fragmenter.fallback_fragment_count,
                  "Uniform fragment count used when subdividing");
}

void AddLimeFlags(CLI::App* cmd, LimeFlags* f) {
  cmd->add_option("--perturbations", f->perturbations,
                  "Perturbed instances per explanation");
  cmd->add_option("--kernel", f->kernel, "uniform or exponential")
      ->check(CLI::IsMember({"uniform", "exponential"}));
  cmd->add_option("--kernel-width", f->kernel_width,
                  "Width of the exponential kernel");
  cmd->add_option("--ridge-lambda", f->ridge_lambda, "Ridge penalty");
  cmd->add_option("--seed", f->seed, "Mask sampling seed");
}

std::shared_ptr<const Oracle> ResolveOracle(const CommonFlags& f) {
  std::string selector = f.oracle;
  if (selector.empty()) {
    if (const char* env = std::getenv("XSUMX_ORACLE")) selector = env;
  }
  if (selector.empty()) {
    throw ValidationError("no oracle selected; pass --oracle or set XSUMX_ORACLE");
  }
  return MakeOracle(selector);
}

std::vector<VideoBundle> LoadInputs(const CommonFlags& f, Findings* findings) {
  f.fragmenter.Validate();
  std::vector<fs::path> dirs;
  if (!f.corpus.empty()) {
    if (!fs::is_directory(f.corpus)) {
      throw ValidationError("corpus directory " + f.corpus + " not found");
    }
    for (const std::string& name : ListCorpus(f.corpus)) {
      dirs.push_back(fs::path(f.corpus) / name);
    }
  }
  for (const std::string& v : f.videos) dirs.emplace_back(v);
  if (dirs.empty()) throw ValidationError("no input videos");
  std::vector<VideoBundle> bundles;
  for (const fs::path& d : dirs) {
    bundles.push_back(LoadBundle(d, f.fragmenter));
    for (const Finding& x : ValidateBundle(bundles.back())) {
      AddFinding(findings, bundles.back().video_id + "/" + x.component,
                 x.message);
    }
  }
  return bundles;
}

fs::path PrepareOut(const std::string& out) {
  fs::path p(out);
  fs::create_directories(p);
  if (!fs::is_directory(p)) {
    throw ValidationError("output directory " + out + " is not a directory");
  }
  return p;
}

void WriteFindings(const fs::path& out, const Findings& findings) {
  Json arr = Json::array();
  for (const Finding& f : findings) {
    arr.push_back(Json{{"component", f.component}, {"message", f.message}});
  }
  WriteTextFile(out / "findings.json", DumpJson(arr));
}

void Progress(std::size_t i, std::size_t n, const std::string& what) {
  std::cerr << "[" << i + 1 << "/" << n << "] " << what << "\n";
}

Json ReadJsonFile(const fs::path& path) {
  try {
    return Json::parse(ReadTextFile(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// Explanation files in `dir` whose name ends with `suffix`, sorted by name.
std::vector<fs::path> ListExplanationFiles(const fs::path& dir,
                                           const std::string& infix) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("explanations directory " + dir.string() +
                          " not found");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.find(infix) != std::string::npos &&
        name.size() > 5 && name.ends_with(".json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Commands.

int CmdSynth(const SynthConfig& cfg, const std::string& out) {
  SynthCorpus corpus = MakeSynthCorpus(cfg);
  const fs::path dir = PrepareOut(out);
  WriteSynthCorpus(&corpus, cfg, dir);
  for (const VideoBundle& b : corpus.bundles) {
    for (const Finding& f : ValidateBundle(b)) {
      throw ValidationError("synth produced an invalid bundle: " + f.message);
    }
  }
  std::cerr << "wrote " << corpus.bundles.size() << " videos to " << out
            << "\n";
  return kExitOk;
}

int CmdExplainFragments(const CommonFlags& common, const LimeFlags& lime,
                        const std::string& method_name) {
  const ExplanationMethod method = ParseMethod(method_name);
  const LimeConfig cfg = lime.Apply(LimeConfig::FragmentDefaults());
  Findings findings;
  const std::vector<VideoBundle> bundles = LoadInputs(common, &findings);
  const auto oracle = ResolveOracle(common);
  const fs::path out = PrepareOut(common.out);
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const VideoBundle& b = bundles[i];
    Progress(i, bundles.size(), b.video_id);
    const FragmentExplanation e =
        method == ExplanationMethod::kLime
            ? LimeFragmentExplain(*oracle, b, cfg, common.workers)
            : AttentionFragmentExplain(*oracle, b);
    WriteTextFile(out / (b.video_id + ".fragments.json"), DumpJson(ToJson(e)));
  }
  WriteFindings(out, findings);
  return kExitOk;
}

void WriteOverlay(const VideoBundle& b, const ObjectExplanation& e,
                  const fs::path& out, Findings* findings) {
  if (!b.frames || !b.segmentation) return;
  const RgbImage overlay =
      RenderOverlay(FrameImage(*b.frames, e.keyframe_index),
                    b.segmentation->frame(e.keyframe_index), e.top, e.bottom,
                    findings);
  WritePng(overlay, out / (b.video_id + ".objects." +
                           std::to_string(e.fragment_index) + ".png"));
}

int CmdExplainObjects(const CommonFlags& common, const LimeFlags& lime,
                      const std::string& source_name,
                      const std::string& explanations_dir,
                      double min_area_fraction) {
  ObjectExplainOptions options;
  options.lime = lime.Apply(LimeConfig::ObjectDefaults());
  options.min_area_fraction = min_area_fraction;
  options.workers = common.workers;
  const SelectionSource source = source_name == "explanation"
                                     ? SelectionSource::kFromExplanation
                                     : SelectionSource::kFromSummarizer;
  Findings findings;
  const std::vector<VideoBundle> bundles = LoadInputs(common, &findings);
  const fs::path out = PrepareOut(common.out);
  const fs::path expl_dir =
      explanations_dir.empty() ? out : fs::path(explanations_dir);

  // Fragment explanations are checked before any oracle work.
  std::map<std::string, FragmentExplanation> prior;
  if (source == SelectionSource::kFromExplanation) {
    for (const VideoBundle& b : bundles) {
      const fs::path p = expl_dir / (b.video_id + ".fragments.json");
      if (!fs::exists(p)) {
        throw ValidationError("--fragments-source explanation needs " +
                              p.string() + "; run explain-fragments first");
      }
      prior.emplace(b.video_id, FragmentExplanationFromJson(ReadJsonFile(p)));
    }
  }

  const auto oracle = ResolveOracle(common);
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const VideoBundle& b = bundles[i];
    Progress(i, bundles.size(), b.video_id);
    if (!b.segmentation) {
      AddFinding(&findings, b.video_id,
                 "no segmentation maps; object explanation skipped");
      continue;
    }
    const ScoreSequence baseline = oracle->Score(b, PerturbationSpec::None());
    const FragmentSelection sel =
        source == SelectionSource::kFromExplanation
            ? SelectFragmentsFromExplanation(prior.at(b.video_id))
            : SelectFragmentsBySummarizer(baseline, b.fragmentation);
    for (std::size_t k : sel.fragment_indices) {
      const auto e =
          LimeObjectExplain(*oracle, b, k, options, &findings, &baseline);
      if (!e) continue;
      WriteTextFile(out / (b.video_id + ".objects." + std::to_string(k) +
                           ".json"),
                    DumpJson(ToJson(*e)));
      WriteOverlay(b, *e, out, &findings);
    }
  }
  WriteFindings(out, findings);
  return kExitOk;
}

int CmdRender(const CommonFlags& common, const std::string& explanations_dir) {
  Findings findings;
  const std::vector<VideoBundle> bundles = LoadInputs(common, &findings);
  const fs::path out = PrepareOut(common.out);
  std::map<std::string, const VideoBundle*> by_id;
  for (const VideoBundle& b : bundles) by_id[b.video_id] = &b;
  const fs::path dir = explanations_dir.empty() ? out : fs::path(explanations_dir);
  for (const fs::path& p : ListExplanationFiles(dir, ".objects.")) {
    const ObjectExplanation e = ObjectExplanationFromJson(ReadJsonFile(p));
    const auto it = by_id.find(e.video_id);
    if (it == by_id.end()) {
      AddFinding(&findings, p.filename().string(),
                 "video " + e.video_id + " not in the corpus; not rendered");
      continue;
    }
    if (!it->second->frames || !it->second->segmentation) {
      AddFinding(&findings, p.filename().string(),
                 "no raw frames or segmentation; not rendered");
      continue;
    }
    WriteOverlay(*it->second, e, out, &findings);
  }
  WriteFindings(out, findings);
  return kExitOk;
}

int CmdEvaluate(const CommonFlags& common, const std::string& level,
                const std::vector<std::string>& explanation_dirs) {
  Findings findings;
  const std::vector<VideoBundle> bundles = LoadInputs(common, &findings);
  const fs::path out = PrepareOut(common.out);
  std::vector<std::string> dirs = explanation_dirs;
  if (dirs.empty()) dirs.push_back(out.string());

  std::vector<MethodExplanations> methods;
  auto method_slot = [&](const std::string& label) -> MethodExplanations& {
    for (auto& m : methods) {
      if (m.label == label) return m;
    }
    methods.push_back({label, {}});
    return methods.back();
  };
  for (const std::string& d : dirs) {
    const std::string prefix =
        dirs.size() > 1 ? fs::path(d).lexically_normal().filename().string() + ":"
                        : "";
    if (level == "fragments") {
      for (const fs::path& p : ListExplanationFiles(d, ".fragments.")) {
        const FragmentExplanation e =
            FragmentExplanationFromJson(ReadJsonFile(p));
        method_slot(prefix + MethodName(e.method))
            .explanations.push_back(RankedExplanation::FromFragments(e));
      }
    } else {
      for (const fs::path& p : ListExplanationFiles(d, ".objects.")) {
        const ObjectExplanation e = ObjectExplanationFromJson(ReadJsonFile(p));
        method_slot(prefix + "lime")
            .explanations.push_back(RankedExplanation::FromObjects(e));
      }
    }
  }
  if (methods.empty()) {
    throw ValidationError("no " + level + " explanations found");
  }

  const auto oracle = ResolveOracle(common);
  EvaluationConfig cfg;
  cfg.level = level;
  cfg.workers = common.workers;
  const EvaluationReport report =
      EvaluateCorpus(*oracle, bundles, methods, cfg, &findings);
  WriteTextFile(out / "report.json", DumpJson(ToJson(report)));
  const std::string table = FormatReportTable(report);
  WriteTextFile(out / "report.txt", table);
  WriteFindings(out, findings);
  std::cout << table;
  return kExitOk;
}

}  // namespace

std::shared_ptr<const Oracle> MakeOracle(const std::string& selector) {
  if (selector == "toy-attention") return MakeToyAttentionScorer();
  if (selector == "toy-norm") return MakeNormSmoothOracle();
  if (selector.starts_with("exec:")) {
    const std::string cmd = selector.substr(5);
    if (cmd.empty()) throw ValidationError("exec: oracle needs a command");
    return ExternalOracle::Spawn(cmd);
  }
  if (selector.starts_with("tcp:")) {
    return ExternalOracle::Connect(selector.substr(4));
  }
  if (selector == "pixel" || selector.starts_with("pixel:")) {
    const std::string inner =
        selector == "pixel" ? "mean" : selector.substr(6);
    std::shared_ptr<const Oracle> scorer;
    if (inner == "mean") {
      scorer = std::make_shared<MeanFeatureScorer>();
    } else if (inner == "norm") {
      scorer = MakeNormSmoothOracle();
    } else if (inner == "attention") {
      scorer = MakeToyAttentionScorer();
    } else {
      throw ValidationError("unknown pixel oracle scorer \"" + inner + "\"");
    }
    return MakePixelOracle(GridMeanExtractor(), scorer);
  }
  if (selector.starts_with("linear:")) {
    const std::vector<std::string> parts = Split(selector, ':');
    if (parts.size() != 3 && parts.size() != 4) {
      throw ValidationError(
          "linear oracle selector is linear:<base>:<w0,w1,...>[:<slope>]");
    }
    const double base = ParseDouble(parts[1], "base");
    std::vector<double> weights;
    for (const std::string& w : Split(parts[2], ',')) {
      weights.push_back(ParseDouble(w, "weight"));
    }
    const double slope = parts.size() == 4 ? ParseDouble(parts[3], "slope") : 0.0;
    return MakeLinearMaskOracle(base, std::move(weights), slope);
  }
  throw ValidationError("unknown oracle selector \"" + selector + "\"");
}

int RunCli(int argc, char** argv) {
  CLI::App app{"Multi-granular explanations for video summarizers"};
  app.name("xsumx");
  app.require_subcommand(1);

  SynthConfig synth;
  std::string synth_out = "corpus";
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->add_option("--videos", synth.videos, "Number of videos");
  synth_cmd->add_option("--fragments", synth.fragments, "Fragments per video");
  synth_cmd->add_option("--min-length", synth.min_fragment_length,
                        "Shortest fragment");
  synth_cmd->add_option("--max-length", synth.max_fragment_length,
                        "Longest fragment");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");

  CommonFlags frag_common;
  LimeFlags frag_lime;
  std::string method = "lime";
  CLI::App* frag_cmd = app.add_subcommand(
      "explain-fragments", "Fragment-level explanations per video");
  AddCommonFlags(frag_cmd, &frag_common, true);
  AddLimeFlags(frag_cmd, &frag_lime);
  frag_cmd->add_option("--method", method, "lime or attention")
      ->check(CLI::IsMember({"lime", "attention"}));

  CommonFlags obj_common;
  LimeFlags obj_lime;
  std::string source = "summarizer";
  std::string obj_expl;
  double min_area = 0.0;
  CLI::App* obj_cmd = app.add_subcommand(
      "explain-objects", "Object-level explanations for selected fragments");
  AddCommonFlags(obj_cmd, &obj_common, true);
  AddLimeFlags(obj_cmd, &obj_lime);
  obj_cmd->add_option("--fragments-source", source, "explanation or summarizer")
      ->check(CLI::IsMember({"explanation", "summarizer"}));
  obj_cmd->add_option("--explanations", obj_expl,
                      "Directory with fragment explanations (default: --out)");
  obj_cmd->add_option("--min-area", min_area,
                      "Ignore objects below this fraction of the keyframe")
      ->check(CLI::Range(0.0, 1.0));

  CommonFlags eval_common;
  std::string level = "fragments";
  std::vector<std::string> eval_dirs;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Discoverability and sanity violation");
  AddCommonFlags(eval_cmd, &eval_common, true);
  eval_cmd->add_option("--level", level, "fragments or objects")
      ->check(CLI::IsMember({"fragments", "objects"}));
  eval_cmd->add_option("--explanations", eval_dirs,
                       "Explanation directory (repeatable; default: --out)");

  CommonFlags render_common;
  std::string render_expl;
  CLI::App* render_cmd = app.add_subcommand(
      "render", "Overlay PNGs from object explanation files");
  AddCommonFlags(render_cmd, &render_common, false);
  render_cmd->add_option("--explanations", render_expl,
                         "Directory with object explanations (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth_cmd) return CmdSynth(synth, synth_out);
    if (*frag_cmd) return CmdExplainFragments(frag_common, frag_lime, method);
    if (*obj_cmd) {
      return CmdExplainObjects(obj_common, obj_lime, source, obj_expl,
                               min_area);
    }
    if (*eval_cmd) return CmdEvaluate(eval_common, level, eval_dirs);
    if (*render_cmd) return CmdRender(render_common, render_expl);
  } catch (const OracleError& e) {
    std::cerr << "xsumx: oracle error: " << e.what() << "\n";
    return kExitOracle;
  } catch (const FormatError& e) {
    std::cerr << "xsumx: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "xsumx: " << e.what() << "\n";
    return kExitInput;
  } catch (const FitError& e) {
    std::cerr << "xsumx: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "xsumx: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace xsumx
