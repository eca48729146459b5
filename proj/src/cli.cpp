/*
 * uhfsynth - synthetic training data and evaluation tools for brain MRI
 *
 * Copyright 2026 The uhfsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "uhfsynth/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uhfsynth/labelprep.hpp"
#include "uhfsynth/log.hpp"
#include "uhfsynth/metrics.hpp"
#include "uhfsynth/nifti.hpp"
#include "uhfsynth/parallel.hpp"
#include "uhfsynth/pipeline.hpp"
#include "uhfsynth/postproc.hpp"
#include "uhfsynth/volumetry.hpp"

namespace uhfsynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  int verbose = 0;
};

PipelineConfig effective_config(const GlobalOptions& g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : PipelineConfig::load(g.config_path);
  if (const char* env = std::getenv("UHFSYNTH_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("UHFSYNTH_THREADS is not an integer: ") + env);
    }
  }
  if (g.threads) cfg.threads = *g.threads;
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

std::vector<fs::path> nifti_files(const fs::path& p) {
  if (!fs::exists(p)) throw IoError("no such file or directory: " + p.string());
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p))
    if (e.is_regular_file() && nifti::is_nifti_path(e.path())) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no NIfTI files in " + p.string());
  return out;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path manifest_path_for(const fs::path& output) {
  if (fs::is_directory(output)) return output / "manifest.json";
  return fs::path(output.string() + ".manifest.json");
}

std::vector<std::uint16_t> parse_label_list(const std::string& text) {
  std::vector<std::uint16_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int v = 0;
    try {
      v = std::stoi(item);
    } catch (const std::exception&) {
      throw ConfigError("not a label index: '" + item + "'");
    }
    if (v < 0 || v > kMaxLabel) throw ConfigError("label index out of range: " + item);
    out.push_back(static_cast<std::uint16_t>(v));
  }
  if (out.empty()) throw ConfigError("empty label list");
  return out;
}

// Two-column CSV; a first row whose first cell is "subject" is a header.
std::vector<std::pair<std::string, std::string>> read_two_column_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("expected two columns in " + path.string() + ": " + line);
    std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (first && a == "subject") {
      first = false;
      continue;
    }
    first = false;
    rows.emplace_back(std::move(a), std::move(b));
  }
  return rows;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

json summary_json(const AggregateSummary& s) {
  return {{"median", s.median}, {"ci_low", s.ci_low}, {"ci_high", s.ci_high}, {"n", s.n}};
}

// --- subcommands -----------------------------------------------------------

int cmd_prep_labels(const GlobalOptions& g, const std::string& in, const std::string& image, const std::string& out_labels,
                    const std::string& out_image, std::optional<int> radius) {
  const PipelineConfig cfg = effective_config(g);
  const LabelVolume labels = nifti::read_labels(in);
  const PreparedLabels prepared = prepare_labels(labels, radius);
  ensure_parent(out_labels);
  nifti::write_volume(prepared.labels, out_labels);
  RunManifest m{"prep-labels", {in}, {out_labels}, cfg};
  if (!image.empty()) {
    if (out_image.empty()) throw ConfigError("--image requires --out-image");
    const ScalarVolume img = nifti::read_scalar(image);
    ensure_parent(out_image);
    nifti::write_volume(apply_mask(img, prepared.mask), out_image);
    m.inputs.push_back(image);
    m.outputs.push_back(out_image);
  }
  log::info("dilation radius " + std::to_string(prepared.radius) + " voxels");
  m.write(manifest_path_for(out_labels));
  return kExitOk;
}

int cmd_generate(const GlobalOptions& g, const std::string& labels_path, int n_per_subject, const std::string& out_dir,
                 bool training_layout) {
  const PipelineConfig cfg = effective_config(g);
  if (n_per_subject < 1) throw ConfigError("--n-per-subject must be at least 1");
  const auto files = nifti_files(labels_path);
  fs::create_directories(out_dir);
  if (training_layout) {
    fs::create_directories(fs::path(out_dir) / "imagesTr");
    fs::create_directories(fs::path(out_dir) / "labelsTr");
  }
  RunManifest manifest{"generate", {}, {}, cfg};
  for (const auto& file : files) {
    const std::string name = nifti::case_name(file);
    const LabelVolume labels = nifti::read_labels(file);
    manifest.inputs.push_back(file.string());
    const std::uint64_t subject = hash_tag(name);
    const int inner_threads = n_per_subject == 1 ? cfg.threads : 1;
    parallel_for(static_cast<std::size_t>(n_per_subject), cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const GeneratedSample s = generate_sample(labels, cfg.generative, {cfg.seed, subject, k}, inner_threads);
        const std::string stem = name + "_" + std::to_string(k);
        nifti::write_volume(s.pair.image, fs::path(out_dir) / (stem + "_img.nii.gz"));
        nifti::write_volume(s.pair.target, fs::path(out_dir) / (stem + "_lbl.nii.gz"));
        if (training_layout) {
          nifti::write_volume(s.pair.image, fs::path(out_dir) / "imagesTr" / (stem + "_0000.nii.gz"));
          nifti::write_volume(s.pair.target, fs::path(out_dir) / "labelsTr" / (stem + ".nii.gz"));
        }
      }
    });
    for (int k = 0; k < n_per_subject; ++k) {
      const std::string stem = name + "_" + std::to_string(k);
      manifest.outputs.push_back(stem + "_img.nii.gz");
      manifest.outputs.push_back(stem + "_lbl.nii.gz");
    }
    log::info("generated " + std::to_string(n_per_subject) + " samples for " + name);
  }
  manifest.write(fs::path(out_dir) / "manifest.json");
  return kExitOk;
}

int cmd_resample(const GlobalOptions& g, const std::string& in, std::optional<double> target, const std::string& kind,
                 const std::string& out) {
  PipelineConfig cfg = effective_config(g);
  if (target) cfg.resample = ResampleSpec::isotropic(*target);
  cfg.validate();
  ensure_parent(out);
  if (kind == "image") {
    nifti::write_volume(resample_image(nifti::read_scalar(in), cfg.resample), out);
  } else if (kind == "labels") {
    nifti::write_volume(resample_labelmap(nifti::read_labels(in), cfg.resample), out);
  } else {
    throw ConfigError("--kind must be 'image' or 'labels'");
  }
  RunManifest{"resample", {in}, {out}, cfg}.write(manifest_path_for(out));
  return kExitOk;
}

int cmd_reorient(const GlobalOptions& g, const std::string& in, const std::string& code, const std::string& out) {
  const PipelineConfig cfg = effective_config(g);
  const OrientationCode target(code);
  ensure_parent(out);
  auto vol = nifti::read_volume(in);
  std::visit([&](const auto& v) { nifti::write_volume(reorient(v, target), out); }, vol);
  RunManifest{"reorient", {in}, {out}, cfg}.write(manifest_path_for(out));
  return kExitOk;
}

int cmd_ensemble(const GlobalOptions& g, const std::string& probs, const std::string& out) {
  const PipelineConfig cfg = effective_config(g);
  std::vector<ProbabilityStack> stacks;
  RunManifest m{"ensemble", {}, {out}, cfg};
  for (const auto& f : nifti_files(probs)) {
    stacks.push_back({nifti::read_frames(f)});
    m.inputs.push_back(f.string());
  }
  ensure_parent(out);
  nifti::write_volume(ensemble(stacks, cfg.threads), out);
  m.write(manifest_path_for(out));
  return kExitOk;
}

PostprocPolicy read_policy(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read policy " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("malformed policy file " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw DataError("policy file must hold a JSON list of label indices");
  PostprocPolicy p;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 35)
      throw DataError("policy labels must be integers in 1..35");
    p.labels.insert(static_cast<std::uint16_t>(v.get<int>()));
  }
  return p;
}

int cmd_postproc(const GlobalOptions& g, const std::string& in, const std::string& policy_path, const std::string& out) {
  const PipelineConfig cfg = effective_config(g);
  const PostprocPolicy policy = read_policy(policy_path);
  ensure_parent(out);
  nifti::write_volume(apply_policy(nifti::read_labels(in), policy), out);
  RunManifest{"postproc", {in, policy_path}, {out}, cfg}.write(manifest_path_for(out));
  return kExitOk;
}

// Pairs files of two file-or-directory arguments by case name.
std::vector<std::tuple<std::string, fs::path, fs::path>> pair_cases(const fs::path& gt, const fs::path& pred) {
  std::vector<std::tuple<std::string, fs::path, fs::path>> out;
  if (!fs::is_directory(gt) && !fs::is_directory(pred)) {
    out.emplace_back(nifti::case_name(gt), gt, pred);
    return out;
  }
  if (!fs::is_directory(gt) || !fs::is_directory(pred))
    throw ConfigError("--gt and --pred must both be files or both be directories");
  std::map<std::string, fs::path> preds;
  for (const auto& f : nifti_files(pred)) preds[nifti::case_name(f)] = f;
  for (const auto& f : nifti_files(gt)) {
    const std::string name = nifti::case_name(f);
    const auto it = preds.find(name);
    if (it == preds.end()) throw DataError("no prediction for case " + name);
    out.emplace_back(name, f, it->second);
  }
  return out;
}

int cmd_select_policy(const GlobalOptions& g, const std::string& gt, const std::string& pred, const std::string& out) {
  const PipelineConfig cfg = effective_config(g);
  std::vector<std::pair<LabelVolume, LabelVolume>> pairs;
  RunManifest m{"select-policy", {}, {out}, cfg};
  for (const auto& [name, gf, pf] : pair_cases(gt, pred)) {
    pairs.emplace_back(nifti::read_labels(gf), nifti::read_labels(pf));
    m.inputs.push_back(gf.string());
    m.inputs.push_back(pf.string());
  }
  const PostprocPolicy policy = select_policy(pairs);
  ensure_parent(out);
  std::ofstream os(out);
  if (!os) throw IoError("cannot write " + out);
  os << json(std::vector<int>(policy.labels.begin(), policy.labels.end())).dump() << '\n';
  m.write(manifest_path_for(out));
  return kExitOk;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& gt, const std::string& pred, const std::string& labels_arg,
                 const std::string& out, std::string summary_path) {
  const PipelineConfig cfg = effective_config(g);
  const std::vector<std::uint16_t> labels = labels_arg == "default" ? default_eval_labels() : parse_label_list(labels_arg);
  const auto cases = pair_cases(gt, pred);

  std::vector<std::vector<MetricRecord>> per_case(cases.size());
  parallel_for(cases.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto& [name, gf, pf] = cases[c];
      per_case[c] = evaluate(nifti::read_labels(gf), nifti::read_labels(pf), labels);
    }
  });

  ensure_parent(out);
  std::ofstream csv(out);
  if (!csv) throw IoError("cannot write " + out);
  csv << "subject,label,dsc,asd_mm\n";
  std::map<std::uint16_t, std::pair<std::vector<double>, std::vector<double>>> by_label;
  std::vector<double> all_dsc, all_asd;
  RunManifest m{"evaluate", {}, {out}, cfg};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& [name, gf, pf] = cases[c];
    m.inputs.push_back(gf.string());
    m.inputs.push_back(pf.string());
    for (const auto& r : per_case[c]) {
      csv << name << ',' << r.label << ',' << fmt_double(r.dsc) << ',' << fmt_double(r.asd) << '\n';
      by_label[r.label].first.push_back(r.dsc);
      by_label[r.label].second.push_back(r.asd);
      all_dsc.push_back(r.dsc);
      all_asd.push_back(r.asd);
    }
  }
  if (!csv) throw IoError("failed writing " + out);

  auto safe_summary = [&](const std::vector<double>& v) -> json {
    if (std::none_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) return nullptr;
    return summary_json(aggregate(v, cfg.seed));
  };
  json summary;
  summary["overall"] = {{"dsc", safe_summary(all_dsc)}, {"asd_mm", safe_summary(all_asd)}};
  json per_label = json::object();
  for (const auto& [label, vals] : by_label)
    per_label[std::to_string(label)] = {{"dsc", safe_summary(vals.first)}, {"asd_mm", safe_summary(vals.second)}};
  summary["per_label"] = per_label;
  summary["bootstrap"] = {{"resamples", 10000}, {"seed", cfg.seed}, {"method", "percentile"}};
  if (summary_path.empty()) summary_path = (fs::path(out).replace_extension(".json")).string();
  ensure_parent(summary_path);
  std::ofstream js(summary_path);
  if (!js) throw IoError("cannot write " + summary_path);
  js << summary.dump(2) << '\n';
  m.outputs.push_back(summary_path);
  m.write(manifest_path_for(out));
  return kExitOk;
}

int cmd_volumetry(const GlobalOptions& g, const std::vector<std::string>& label_dirs, const std::string& groups_csv,
                  const std::string& tiv_csv, const std::string& rois_arg, double alpha, std::optional<int> tests,
                  const std::string& out) {
  const PipelineConfig cfg = effective_config(g);
  const std::vector<std::uint16_t> rois = parse_label_list(rois_arg);

  std::map<std::string, std::string> group_of;
  std::vector<std::string> group_names;
  for (const auto& [subject, group] : read_two_column_csv(groups_csv)) {
    group_of[subject] = group;
    if (std::find(group_names.begin(), group_names.end(), group) == group_names.end()) group_names.push_back(group);
  }
  if (group_names.size() != 2) throw DataError("groups file must define exactly two groups");
  std::map<std::string, double> tiv_of;
  for (const auto& [subject, tiv] : read_two_column_csv(tiv_csv)) {
    try {
      tiv_of[subject] = std::stod(tiv);
    } catch (const std::exception&) {
      throw DataError("invalid TIV for " + subject + ": " + tiv);
    }
  }

  const int m_tests = tests.value_or(static_cast<int>(rois.size() * label_dirs.size()));
  const double threshold = bonferroni(alpha, m_tests);
  json report;
  report["alpha"] = alpha;
  report["tests"] = m_tests;
  report["threshold"] = threshold;
  report["groups"] = group_names;
  report["rois"] = rois;
  json methods = json::array();
  RunManifest manifest{"volumetry", {groups_csv, tiv_csv}, {out}, cfg};

  for (const auto& dir : label_dirs) {
    std::vector<RoiVolumeRecord> records;
    for (const auto& f : nifti_files(dir)) {
      const std::string subject = nifti::case_name(f);
      if (!group_of.count(subject)) {
        log::warn("subject " + subject + " has no group; skipped");
        continue;
      }
      const auto tiv = tiv_of.find(subject);
      if (tiv == tiv_of.end()) throw DataError("no TIV for subject " + subject);
      const LabelVolume labels = nifti::read_labels(f);
      manifest.inputs.push_back(f.string());
      for (auto roi : rois) {
        RoiVolumeRecord r{subject, roi, roi_volume(labels, roi), tiv->second, 0};
        r.normalized = normalize_volume(r.raw_mm3, r.tiv_mm3);
        records.push_back(r);
      }
    }
    json method;
    method["labels_dir"] = dir;
    json recs = json::array();
    for (const auto& r : records)
      recs.push_back({{"subject", r.subject}, {"label", r.label}, {"raw_mm3", r.raw_mm3}, {"tiv_mm3", r.tiv_mm3},
                      {"normalized", r.normalized}});
    method["records"] = recs;
    json results = json::array();
    for (auto roi : rois) {
      std::array<std::vector<double>, 2> values;
      for (const auto& r : records)
        if (r.label == roi) values[group_of[r.subject] == group_names[0] ? 0 : 1].push_back(r.normalized);
      json entry{{"label", roi}, {"n", {values[0].size(), values[1].size()}}};
      if (values[0].empty() || values[1].empty()) {
        entry["error"] = "a group has no subjects";
      } else {
        const GroupTestResult t = mann_whitney_u(values[0], values[1], threshold);
        auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
        entry["mean_normalized"] = {mean(values[0]), mean(values[1])};
        entry["u"] = t.u;
        entry["p_value"] = t.p_value;
        entry["exact"] = t.exact;
        entry["significant"] = t.significant;
      }
      results.push_back(entry);
    }
    method["tests"] = results;
    methods.push_back(method);
  }
  report["methods"] = methods;
  ensure_parent(out);
  std::ofstream os(out);
  if (!os) throw IoError("cannot write " + out);
  os << report.dump(2) << '\n';
  manifest.write(manifest_path_for(out));
  return kExitOk;
}

int cmd_split_folds(const GlobalOptions& g, const std::string& subjects_arg, std::optional<int> folds,
                    const std::string& out) {
  PipelineConfig cfg = effective_config(g);
  if (folds) cfg.folds = *folds;
  cfg.validate();
  std::vector<std::string> subjects;
  if (fs::is_directory(subjects_arg)) {
    for (const auto& f : nifti_files(subjects_arg)) subjects.push_back(nifti::case_name(f));
  } else {
    std::ifstream in(subjects_arg);
    if (!in) throw IoError("cannot read " + subjects_arg);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) subjects.push_back(line);
    }
  }
  const FoldAssignment a = split_folds(subjects, cfg.folds, cfg.seed);
  if (a.degenerate) log::warn("single fold: every subject is used for both training and validation");
  ensure_parent(out);
  std::ofstream os(out);
  if (!os) throw IoError("cannot write " + out);
  os << a.to_json().dump(2) << '\n';
  RunManifest{"split-folds", {subjects_arg}, {out}, cfg}.write(manifest_path_for(out));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"uhfsynth: label preparation, synthetic image generation and segmentation evaluation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  int threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Master random seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", g.verbose, "More logging (repeat for debug)");

  std::function<int()> action;

  // prep-labels
  auto* prep = app.add_subcommand("prep-labels", "Add the extra-cerebral label and skull-strip the image");
  std::string prep_in, prep_image, prep_out_labels, prep_out_image;
  std::optional<int> prep_radius;
  prep->add_option("--in", prep_in, "Source label map")->required()->check(CLI::ExistingFile);
  prep->add_option("--image", prep_image, "Image to skull-strip")->check(CLI::ExistingFile);
  prep->add_option("--out-labels", prep_out_labels, "Output label map")->required();
  prep->add_option("--out-image", prep_out_image, "Output skull-stripped image");
  prep->add_option("--radius", prep_radius, "Dilation radius in voxels (default by resolution)");
  prep->callback([&] { action = [&] { return cmd_prep_labels(g, prep_in, prep_image, prep_out_labels, prep_out_image, prep_radius); }; });

  // generate
  auto* gen = app.add_subcommand("generate", "Generate synthetic image/label pairs");
  std::string gen_labels, gen_out;
  int gen_n = 1;
  bool gen_layout = false;
  gen->add_option("--labels", gen_labels, "Label map file or directory")->required();
  gen->add_option("--n-per-subject", gen_n, "Samples per label map")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_flag("--training-layout", gen_layout, "Also write imagesTr/ and labelsTr/");
  gen->callback([&] { action = [&] { return cmd_generate(g, gen_labels, gen_n, gen_out, gen_layout); }; });

  // resample
  auto* res = app.add_subcommand("resample", "Resample an image or label map");
  std::string res_in, res_kind = "image", res_out;
  std::optional<double> res_target;
  res->add_option("--in", res_in)->required()->check(CLI::ExistingFile);
  res->add_option("--target-res", res_target, "Isotropic target voxel size in mm");
  res->add_option("--kind", res_kind, "image or labels")->check(CLI::IsMember({"image", "labels"}));
  res->add_option("--out", res_out)->required();
  res->callback([&] { action = [&] { return cmd_resample(g, res_in, res_target, res_kind, res_out); }; });

  // reorient
  auto* reo = app.add_subcommand("reorient", "Permute/flip axes to an orientation code");
  std::string reo_in, reo_code = "LIA", reo_out;
  reo->add_option("--in", reo_in)->required()->check(CLI::ExistingFile);
  reo->add_option("--orientation", reo_code, "Target axis code");
  reo->add_option("--out", reo_out)->required();
  reo->callback([&] { action = [&] { return cmd_reorient(g, reo_in, reo_code, reo_out); }; });

  // ensemble
  auto* ens = app.add_subcommand("ensemble", "Average 4D probability maps and take the argmax");
  std::string ens_probs, ens_out;
  ens->add_option("--probs", ens_probs, "Directory (or file) of 4D probability maps")->required();
  ens->add_option("--out", ens_out)->required();
  ens->callback([&] { action = [&] { return cmd_ensemble(g, ens_probs, ens_out); }; });

  // postproc
  auto* post = app.add_subcommand("postproc", "Keep the largest component of the policy labels");
  std::string post_in, post_policy, post_out;
  post->add_option("--in", post_in)->required()->check(CLI::ExistingFile);
  post->add_option("--policy", post_policy, "JSON list of label indices")->required()->check(CLI::ExistingFile);
  post->add_option("--out", post_out)->required();
  post->callback([&] { action = [&] { return cmd_postproc(g, post_in, post_policy, post_out); }; });

  // select-policy
  auto* sel = app.add_subcommand("select-policy", "Choose post-processing labels on validation data");
  std::string sel_gt, sel_pred, sel_out;
  sel->add_option("--gt", sel_gt)->required()->check(CLI::ExistingPath);
  sel->add_option("--pred", sel_pred)->required()->check(CLI::ExistingPath);
  sel->add_option("--out", sel_out)->required();
  sel->callback([&] { action = [&] { return cmd_select_policy(g, sel_gt, sel_pred, sel_out); }; });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Dice and average surface distance per label");
  std::string ev_gt, ev_pred, ev_labels = "default", ev_out, ev_summary;
  ev->add_option("--gt", ev_gt)->required()->check(CLI::ExistingPath);
  ev->add_option("--pred", ev_pred)->required()->check(CLI::ExistingPath);
  ev->add_option("--labels", ev_labels, "'default' or a comma-separated list");
  ev->add_option("--out", ev_out, "Per-label CSV")->required();
  ev->add_option("--summary", ev_summary, "Summary JSON (default: next to --out)");
  ev->callback([&] { action = [&] { return cmd_evaluate(g, ev_gt, ev_pred, ev_labels, ev_out, ev_summary); }; });

  // volumetry
  auto* vol = app.add_subcommand("volumetry", "TIV-normalized ROI volumes and group tests");
  std::vector<std::string> vol_dirs;
  std::string vol_groups, vol_tiv, vol_rois = "9,14,15", vol_out;
  double vol_alpha = 0.05;
  std::optional<int> vol_tests;
  vol->add_option("--labels-dir", vol_dirs, "Label maps of one method (repeat per method)")->required();
  vol->add_option("--groups", vol_groups, "CSV: subject,group")->required()->check(CLI::ExistingFile);
  vol->add_option("--tiv", vol_tiv, "CSV: subject,tiv_mm3")->required()->check(CLI::ExistingFile);
  vol->add_option("--rois", vol_rois, "Comma-separated label indices");
  vol->add_option("--alpha", vol_alpha, "Family-wise significance level");
  vol->add_option("--tests", vol_tests, "Number of tests for the correction (default ROIs x methods)");
  vol->add_option("--out", vol_out)->required();
  vol->callback([&] {
    action = [&] { return cmd_volumetry(g, vol_dirs, vol_groups, vol_tiv, vol_rois, vol_alpha, vol_tests, vol_out); };
  });

  // split-folds
  auto* sf = app.add_subcommand("split-folds", "Seeded k-fold split of subjects");
  std::string sf_subjects, sf_out;
  std::optional<int> sf_folds;
  sf->add_option("--subjects", sf_subjects, "Text file with one subject per line, or a directory of label maps")
      ->required()
      ->check(CLI::ExistingPath);
  sf->add_option("--folds", sf_folds, "Number of folds");
  sf->add_option("--out", sf_out)->required();
  sf->callback([&] { action = [&] { return cmd_split_folds(g, sf_subjects, sf_folds, sf_out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;
  if (*threads_opt) g.threads = threads;
  log::set_level(g.verbose >= 2 ? log::Level::debug : g.verbose == 1 ? log::Level::info : log::Level::warn);

  try {
    return action ? action() : kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace uhfsynth
