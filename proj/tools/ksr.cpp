// Copyright (c) 2026 ksr authors. All Rights Reserved.
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
//
// ksr — batch front end for the library: feature extraction, silence
// trimming, masking augmentation, transcript preparation, corpus statistics,
// mock decoding, error-rate scoring, schedule tracing and a built-in
// self-test.
//
// Conventions shared by every subcommand:
//   * manifests are UTF-8 TSV: "utt_id<TAB>path[<TAB>transcript]";
//     blank lines and lines starting with '#' are skipped;
//   * all floating-point output uses 6 significant digits;
//   * summaries preserve manifest order regardless of worker scheduling;
//   * exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ksr/attention.hpp"
#include "ksr/audio.hpp"
#include "ksr/augment.hpp"
#include "ksr/common.hpp"
#include "ksr/decode.hpp"
#include "ksr/dsp.hpp"
#include "ksr/features.hpp"
#include "ksr/ksfm.hpp"
#include "ksr/metrics.hpp"
#include "ksr/rng.hpp"
#include "ksr/schedules.hpp"
#include "ksr/text.hpp"

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Small shared helpers.

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// A problem with how the tool was invoked (as opposed to what the data
// contained); mapped to exit code 1.
struct UsageError {
  std::string message;
};

struct ManifestRow {
  std::string id;
  std::string path;        // column 2 when present
  std::string transcript;  // column 3 when present
  int columns = 1;
  size_t line_no = 0;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ksr::raise(ksr::Errc::missing_file, "cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Parses the shared manifest shape and enforces unique non-empty ids.
std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::vector<ManifestRow> rows;
  std::unordered_set<std::string> seen;
  size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    ManifestRow row;
    row.line_no = line_no;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos
                                            ? std::string::npos
                                            : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() > 3)
      ksr::raise(ksr::Errc::ragged_input,
                 path + ":" + std::to_string(line_no) +
                     ": manifest rows have at most 3 tab-separated columns");
    row.columns = static_cast<int>(cols.size());
    row.id = cols[0];
    if (cols.size() > 1) row.path = cols[1];
    if (cols.size() > 2) row.transcript = cols[2];
    if (row.id.empty())
      ksr::raise(ksr::Errc::ragged_input,
                 path + ":" + std::to_string(line_no) + ": empty utterance id");
    if (row.id.find('/') != std::string::npos ||
        row.id.find('\\') != std::string::npos)
      ksr::raise(ksr::Errc::bad_argument,
                 path + ":" + std::to_string(line_no) +
                     ": utterance id must not contain path separators");
    if (!seen.insert(row.id).second)
      ksr::raise(ksr::Errc::bad_argument,
                 path + ":" + std::to_string(line_no) +
                     ": duplicate utterance id '" + row.id + "'");
    rows.push_back(std::move(row));
  }
  return rows;
}

void require_column(const ManifestRow& row, int column, const char* what) {
  if (row.columns < column)
    ksr::raise(ksr::Errc::ragged_input,
               "utterance '" + row.id + "' (line " +
                   std::to_string(row.line_no) + "): manifest row lacks a " +
                   what + " column");
}

std::ofstream open_out(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) ksr::raise(ksr::Errc::missing_file, "cannot write '" + path + "'");
  return out;
}

// Destination stream: "-" means stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path != "-") {
      file_ = open_out(path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (stream_ == &file_ && !file_)
      ksr::raise(ksr::Errc::missing_file, "short write on output file");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = &std::cout;
};

// Runs jobs 0..n-1 on a bounded pool; results land indexed so summaries can
// be emitted in manifest order no matter which thread ran what.
template <typename Fn>
void run_pool(size_t n, int jobs, Fn&& fn) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int workers = jobs > 0 ? jobs : std::max(1, std::min(hw, 8));
  workers = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(std::max(1, workers)), n ? n : 1));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

struct UttOutcome {
  bool ok = false;
  std::string detail;  // error message when !ok
  long long frames = 0;
  int dim = 0;
  std::string out_path;
  std::vector<ksr::MaskSpec> masks;
};

// Shared tail of the batch subcommands: failures listed individually, one
// summary line, and a chainable manifest of the successful outputs.
int finish_batch(const std::vector<ManifestRow>& rows,
                 const std::vector<UttOutcome>& outcomes,
                 const std::string& out_dir, const char* verb,
                 bool keep_going) {
  long long ok = 0, frames = 0, failures = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (outcomes[i].ok) {
      ++ok;
      frames += outcomes[i].frames;
      std::cout << rows[i].id << "\tok\tframes=" << outcomes[i].frames
                << "\tdim=" << outcomes[i].dim << "\t" << outcomes[i].out_path
                << "\n";
    } else {
      ++failures;
      std::cout << rows[i].id << "\tfail\t" << outcomes[i].detail << "\n";
    }
  }
  std::cout << "total\t" << verb << "=" << ok << "\tframes=" << frames
            << "\tfailures=" << failures << "\n";

  std::ofstream manifest = open_out(out_dir + "/manifest.tsv");
  for (size_t i = 0; i < rows.size(); ++i)
    if (outcomes[i].ok) manifest << rows[i].id << "\t" << outcomes[i].out_path << "\n";
  manifest.flush();
  if (!manifest)
    ksr::raise(ksr::Errc::missing_file, "short write on output manifest");

  if (failures > 0 && !keep_going) return 2;
  return 0;
}

ksr::WindowSpec window_by_name(const std::string& name) {
  if (name == "paper") return ksr::WindowSpec::hamming_paper();
  if (name == "standard") return ksr::WindowSpec::hamming_standard();
  if (name == "rect") return ksr::WindowSpec::rectangular();
  ksr::raise(ksr::Errc::bad_argument, "unknown window '" + name + "'");
}

ksr::TextUnit unit_by_name(const std::string& name) {
  return name == "jamo" ? ksr::TextUnit::jamo : ksr::TextUnit::character;
}

// ---------------------------------------------------------------------------
// featurize

struct FeaturizeOpts {
  std::string manifest;
  std::string out_dir;
  std::string feature = "fbank";
  std::string window = "paper";
  std::string format = "wav";
  double frame_ms = 20.0;
  double hop_ms = 10.0;
  int n_fft = 0;
  int n_mels = 0;
  int n_ceps = 13;
  bool no_energy = false;
  double f_min = 0.0;
  double f_max = 0.0;
  int rate = 0;
  bool exact_length = false;
  int jobs = 0;
  bool keep_going = false;
};

int run_featurize(const FeaturizeOpts& o) {
  if (o.manifest.empty() || o.out_dir.empty())
    throw UsageError{"featurize requires --manifest and --out-dir"};
  if (o.format == "raw" && o.rate <= 0)
    throw UsageError{"--format raw requires --rate"};
  const ksr::FeatureKind kind = ksr::feature_kind_from_name(o.feature);
  const ksr::WindowSpec win = window_by_name(o.window);
  ksr::FrameConfig cfg;
  cfg.frame_len_ms = o.frame_ms;
  cfg.hop_ms = o.hop_ms;
  cfg.pad_to_pow2 = !o.exact_length;
  ksr::FeatureParams params;
  params.n_fft = o.n_fft;
  params.n_mels = o.n_mels;
  params.n_ceps = o.n_ceps;
  params.mfcc_energy = !o.no_energy;
  params.f_min_hz = o.f_min;
  params.f_max_hz = o.f_max;
  const ksr::AudioFormat format = o.format == "raw" ? ksr::AudioFormat::raw_pcm16
                                                    : ksr::AudioFormat::wav_pcm16;

  const std::vector<ManifestRow> rows = read_manifest(o.manifest);
  for (const ManifestRow& row : rows) require_column(row, 2, "path");
  fs::create_directories(o.out_dir);

  std::vector<UttOutcome> outcomes(rows.size());
  run_pool(rows.size(), o.jobs, [&](size_t i) {
    UttOutcome& out = outcomes[i];
    try {
      const ksr::AudioBuffer buf = ksr::load_audio(rows[i].path, format, o.rate);
      const ksr::FeatureMatrix feats = ksr::extract(buf, kind, cfg, win, params);
      out.out_path = o.out_dir + "/" + rows[i].id + ".ksfm";
      ksr::write_ksfm(out.out_path, feats);
      out.frames = feats.frames();
      out.dim = feats.dim();
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = e.what();
    }
  });
  return finish_batch(rows, outcomes, o.out_dir, "featurized", o.keep_going);
}

// ---------------------------------------------------------------------------
// trim

struct TrimOpts {
  std::string manifest;
  std::string out_dir;
  std::string format = "wav";
  double threshold_db = 30.0;
  double window_ms = 20.0;
  int rate = 0;
  bool keep_going = false;
};

int run_trim(const TrimOpts& o) {
  if (o.manifest.empty() || o.out_dir.empty())
    throw UsageError{"trim requires --manifest and --out-dir"};
  if (o.format == "raw" && o.rate <= 0)
    throw UsageError{"--format raw requires --rate"};
  const ksr::AudioFormat format = o.format == "raw" ? ksr::AudioFormat::raw_pcm16
                                                    : ksr::AudioFormat::wav_pcm16;
  const std::vector<ManifestRow> rows = read_manifest(o.manifest);
  for (const ManifestRow& row : rows) require_column(row, 2, "path");
  fs::create_directories(o.out_dir);

  long long ok = 0, silent = 0, failures = 0;
  std::vector<std::string> kept_paths(rows.size());
  std::vector<bool> success(rows.size(), false);
  for (size_t i = 0; i < rows.size(); ++i) {
    try {
      const ksr::AudioBuffer buf = ksr::load_audio(rows[i].path, format, o.rate);
      auto [trimmed, report] =
          ksr::trim_silence(buf, o.threshold_db, o.window_ms);
      const std::string out_path = o.out_dir + "/" + rows[i].id + ".wav";
      ksr::save_wav(out_path, trimmed);
      success[i] = true;
      kept_paths[i] = out_path;
      ++ok;
      if (report.all_silent) ++silent;
      std::cout << rows[i].id << "\t"
                << (report.all_silent ? "all-silent" : "ok")
                << "\tleading=" << report.leading_samples_removed
                << "\ttrailing=" << report.trailing_samples_removed
                << "\tkept=" << trimmed.samples.size() << "\t" << out_path
                << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << rows[i].id << "\tfail\t" << e.what() << "\n";
    }
  }
  std::cout << "total\ttrimmed=" << ok << "\tall-silent=" << silent
            << "\tfailures=" << failures << "\n";

  std::ofstream manifest = open_out(o.out_dir + "/manifest.tsv");
  for (size_t i = 0; i < rows.size(); ++i)
    if (success[i]) manifest << rows[i].id << "\t" << kept_paths[i] << "\n";
  manifest.flush();
  if (!manifest)
    ksr::raise(ksr::Errc::missing_file, "short write on output manifest");
  return failures > 0 && !o.keep_going ? 2 : 0;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentOpts {
  std::string manifest;
  std::string out_dir;
  std::string mask_audit;
  std::uint64_t seed = 0;
  int freq_mask_param = 20;
  int n_freq_masks = 1;
  int time_mask_param = 100;
  int n_time_masks = 10;
  double max_time_ratio = 0.05;
  double mask_value = 0.0;
  int jobs = 0;
  bool keep_going = false;
};

int run_augment(const AugmentOpts& o) {
  if (o.manifest.empty() || o.out_dir.empty())
    throw UsageError{"augment requires --manifest and --out-dir"};
  const std::vector<ManifestRow> rows = read_manifest(o.manifest);
  for (const ManifestRow& row : rows) require_column(row, 2, "path");
  fs::create_directories(o.out_dir);

  std::vector<UttOutcome> outcomes(rows.size());
  run_pool(rows.size(), o.jobs, [&](size_t i) {
    UttOutcome& out = outcomes[i];
    try {
      const ksr::FeatureMatrix feats = ksr::read_ksfm(rows[i].path);
      ksr::AugmentPolicy policy;
      policy.freq_mask_param = o.freq_mask_param;
      policy.n_freq_masks = o.n_freq_masks;
      policy.time_mask_param = o.time_mask_param;
      policy.n_time_masks = o.n_time_masks;
      policy.max_time_mask_ratio = o.max_time_ratio;
      policy.mask_value = o.mask_value;
      // Per-utterance stream keyed by manifest position: any thread (or a
      // single-utterance re-run of the same manifest) sees the same draws.
      policy.seed = ksr::SplitMix64::derive(o.seed, static_cast<std::uint64_t>(i))
                        .next();
      auto [masked, masks] = ksr::augment(feats, policy);
      out.out_path = o.out_dir + "/" + rows[i].id + ".ksfm";
      ksr::write_ksfm(out.out_path, masked);
      out.frames = masked.frames();
      out.dim = masked.dim();
      out.masks = std::move(masks);
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = e.what();
    }
  });

  if (!o.mask_audit.empty()) {
    std::ofstream audit = open_out(o.mask_audit);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!outcomes[i].ok) continue;
      for (const ksr::MaskSpec& m : outcomes[i].masks)
        audit << rows[i].id << "\t"
              << (m.axis == ksr::MaskAxis::frequency ? "freq" : "time") << "\t"
              << m.offset << "\t" << m.width << "\n";
    }
    audit.flush();
    if (!audit)
      ksr::raise(ksr::Errc::missing_file, "short write on mask audit file");
  }
  return finish_batch(rows, outcomes, o.out_dir, "augmented", o.keep_going);
}

// ---------------------------------------------------------------------------
// prep

struct PrepOpts {
  std::string manifest;
  std::string out = "-";
  std::string transcription = "spelling";
  std::string unit = "char";
  std::string vocab_out;
  long long max_len = 0;
  bool keep_noise_markers = false;
  bool keep_specials = false;
  bool keep_whitespace = false;
};

long long unit_length(const std::string& text, ksr::TextUnit unit) {
  const std::u32string cps = ksr::decode_utf8(text);
  if (unit == ksr::TextUnit::character)
    return static_cast<long long>(cps.size());
  return static_cast<long long>(ksr::decompose_jamo(cps).size());
}

int run_prep(const PrepOpts& o) {
  if (o.manifest.empty()) throw UsageError{"prep requires --manifest"};
  ksr::CleanupRules rules;
  rules.transcription_choice = o.transcription == "phonetic"
                                   ? ksr::TranscriptionChoice::phonetic
                                   : ksr::TranscriptionChoice::spelling;
  rules.strip_noise_markers = !o.keep_noise_markers;
  rules.strip_special_chars = !o.keep_specials;
  rules.collapse_whitespace = !o.keep_whitespace;
  const ksr::TextUnit unit = unit_by_name(o.unit);

  const std::vector<ManifestRow> rows = read_manifest(o.manifest);
  OutputTarget out(o.out);
  std::vector<std::string> kept;
  long long dropped = 0;
  for (const ManifestRow& row : rows) {
    require_column(row, 2, "transcript");
    const std::string& raw = row.columns >= 3 ? row.transcript : row.path;
    std::string cleaned;
    try {
      cleaned = ksr::clean_transcript(raw, rules);
    } catch (const ksr::Error& e) {
      ksr::raise(e.code(), "utterance '" + row.id + "': " + e.what());
    }
    if (o.max_len > 0 && unit_length(cleaned, unit) > o.max_len) {
      ++dropped;
      continue;
    }
    kept.push_back(cleaned);
    out.get() << row.id << "\t";
    if (row.columns >= 3) out.get() << row.path << "\t";
    out.get() << cleaned << "\n";
  }
  out.finish();
  std::cerr << "prep: kept " << kept.size() << " of " << rows.size();
  if (o.max_len > 0) std::cerr << " (dropped " << dropped << " over --max-len)";
  std::cerr << "\n";

  if (!o.vocab_out.empty()) {
    const ksr::Vocabulary vocab = ksr::Vocabulary::build(kept, unit);
    vocab.save(o.vocab_out);
    std::cerr << "prep: wrote vocabulary of " << vocab.size() << " tokens\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
  std::string manifest;
  std::string unit = "char";
  long long max_len = 0;
};

int run_stats(const StatsOpts& o) {
  if (o.manifest.empty()) throw UsageError{"stats requires --manifest"};
  const ksr::TextUnit unit = unit_by_name(o.unit);
  const std::vector<ManifestRow> rows = read_manifest(o.manifest);
  std::vector<long long> lengths;
  lengths.reserve(rows.size());
  for (const ManifestRow& row : rows) {
    require_column(row, 2, "transcript");
    const std::string& text = row.columns >= 3 ? row.transcript : row.path;
    lengths.push_back(unit_length(text, unit));
  }
  const ksr::LengthStats st = ksr::corpus_length_stats(lengths);
  std::cout << "count\t" << st.count << "\n";
  std::cout << "min\t" << st.min << "\n";
  std::cout << "q1\t" << g6(st.q1) << "\n";
  std::cout << "median\t" << g6(st.median) << "\n";
  std::cout << "q3\t" << g6(st.q3) << "\n";
  std::cout << "max\t" << st.max << "\n";
  std::cout << "outlier_threshold\t" << g6(st.iqr_outlier_threshold) << "\n";
  if (o.max_len > 0) {
    long long kept = 0;
    for (long long len : lengths)
      if (len <= o.max_len) ++kept;
    std::cout << "retained\t" << kept << "\tof\t" << st.count << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeOpts {
  std::string utts;
  std::string mock_model;
  std::string out = "-";
  int order = 0;
  int max_len = 100;
  int beam = 0;
  bool greedy = false;
  bool length_norm = false;
};

int run_decode(const DecodeOpts& o) {
  if (o.utts.empty() || o.mock_model.empty())
    throw UsageError{"decode requires --utts and --mock-model"};
  if (o.greedy == (o.beam > 0))
    throw UsageError{"pass exactly one of --greedy or --beam K"};
  const ksr::MockModel model =
      ksr::MockModel::from_file(o.mock_model, o.max_len, o.order);
  const std::vector<ManifestRow> rows = read_manifest(o.utts);
  OutputTarget out(o.out);
  for (const ManifestRow& row : rows) {
    ksr::Hypothesis best;
    if (o.greedy) {
      best = ksr::greedy_decode(model);
    } else {
      const std::vector<ksr::Hypothesis> hyps =
          ksr::beam_decode(model, o.beam, o.length_norm);
      if (hyps.empty())
        ksr::raise(ksr::Errc::source_failure, "beam search returned no hypotheses");
      best = hyps.front();
    }
    out.get() << row.id << "\t";
    for (size_t t = 0; t < best.tokens.size(); ++t)
      out.get() << (t ? " " : "") << best.tokens[t];
    out.get() << "\t" << g6(best.log_prob) << "\n";
  }
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreOpts {
  std::string hyp;
  std::string ref;
  std::string out = "-";
  std::string unit = "char";
  bool ignore_spaces = false;
};

int run_score(const ScoreOpts& o) {
  if (o.hyp.empty() || o.ref.empty())
    throw UsageError{"score requires --hyp and --ref"};
  const ksr::TextUnit unit = unit_by_name(o.unit);
  const std::vector<ManifestRow> hyp_rows = read_manifest(o.hyp);
  const std::vector<ManifestRow> ref_rows = read_manifest(o.ref);
  std::unordered_map<std::string, std::string> hyp_by_id;
  for (const ManifestRow& row : hyp_rows) {
    require_column(row, 2, "hypothesis text");
    hyp_by_id.emplace(row.id, row.path);
  }

  OutputTarget out(o.out);
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(ref_rows.size());
  for (const ManifestRow& row : ref_rows) {
    require_column(row, 2, "reference text");
    const auto it = hyp_by_id.find(row.id);
    if (it == hyp_by_id.end())
      ksr::raise(ksr::Errc::bad_argument,
                 "utterance '" + row.id + "' has no hypothesis");
    pairs.emplace_back(it->second, row.path);
  }
  if (hyp_by_id.size() != ref_rows.size())
    ksr::raise(ksr::Errc::bad_argument,
               "hypothesis manifest has utterances absent from the reference");

  for (size_t i = 0; i < pairs.size(); ++i) {
    const ksr::CerResult r =
        ksr::cer(pairs[i].first, pairs[i].second, unit, o.ignore_spaces);
    out.get() << ref_rows[i].id << "\t" << r.distance << "\t" << r.ref_len
              << "\t" << g6(r.cer_percent) << "\n";
  }
  const ksr::CerResult total = ksr::corpus_cer(pairs, unit, o.ignore_spaces);
  out.get() << "TOTAL\t" << total.distance << "\t" << total.ref_len << "\t"
            << g6(total.cer_percent) << "\n";
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// schedule-trace

struct ScheduleOpts {
  int epochs = 0;
  int steps_per_epoch = 0;
  std::string val_loss;
  std::string out = "-";
  int warmup = 400;
  double peak_lr = 3e-4;
  double factor = 0.5;
  int patience = 1;
  double threshold = 1e-4;
};

int run_schedule_trace(const ScheduleOpts& o) {
  if (o.epochs <= 0 || o.steps_per_epoch <= 0)
    throw UsageError{"schedule-trace requires positive --epochs and "
                     "--steps-per-epoch"};
  std::vector<double> losses;
  if (!o.val_loss.empty()) {
    for (const std::string& line : read_lines(o.val_loss)) {
      if (line.empty() || line[0] == '#') continue;
      try {
        size_t pos = 0;
        const double v = std::stod(line, &pos);
        if (pos != line.size()) throw std::invalid_argument(line);
        losses.push_back(v);
      } catch (const std::exception&) {
        ksr::raise(ksr::Errc::bad_argument,
                   "validation-loss file: cannot parse '" + line + "'");
      }
    }
    if (losses.size() < static_cast<size_t>(o.epochs))
      ksr::raise(ksr::Errc::bad_argument,
                 "validation-loss file has " + std::to_string(losses.size()) +
                     " entries for " + std::to_string(o.epochs) + " epochs");
  }

  ksr::LrScheduleState state;
  state.warmup_steps = o.warmup;
  state.peak_lr = o.peak_lr;
  state.reduce_factor = o.factor;
  state.patience_epochs = o.patience;
  state.threshold = o.threshold;
  state.current_lr = o.peak_lr;

  OutputTarget out(o.out);
  out.get() << "# step\tepoch\tlr\ttf_ratio\n";
  long long step = 0;
  for (int epoch = 1; epoch <= o.epochs; ++epoch) {
    const double tf = ksr::teacher_forcing_ratio(epoch);
    for (int s = 0; s < o.steps_per_epoch; ++s) {
      ++step;
      out.get() << step << "\t" << epoch << "\t"
                << g6(ksr::lr_on_step(state, step)) << "\t" << g6(tf) << "\n";
    }
    if (!losses.empty())
      state = ksr::lr_on_epoch_end(state, losses[static_cast<size_t>(epoch - 1)]);
  }
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// selftest

double unit_draw(ksr::SplitMix64& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

ksr::Matrix random_matrix(int rows, int cols, ksr::SplitMix64& rng) {
  ksr::Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = 2.0 * unit_draw(rng) - 1.0;
  return m;
}

struct SuiteResult {
  long long checks = 0;
  long long failures = 0;
  void expect(bool cond) {
    ++checks;
    if (!cond) ++failures;
  }
};

SuiteResult selftest_transform(std::uint64_t seed, int trials) {
  SuiteResult r;
  ksr::SplitMix64 rng(seed);
  for (int t = 0; t < 12 * trials; ++t) {
    const int n = 1 << (4 + static_cast<int>(rng.below(4)));  // 16..256
    std::vector<double> frame(static_cast<size_t>(n));
    for (double& v : frame) v = 2.0 * unit_draw(rng) - 1.0;
    const ksr::ComplexSpectrum spec = ksr::fft_real(frame, n);
    // Direct transform sum, bin by bin.
    const double pi = std::acos(-1.0);
    double max_err = 0.0;
    for (int k = 0; k <= n / 2; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (int i = 0; i < n; ++i) {
        const double ang = -2.0 * pi * k * i / n;
        acc += frame[static_cast<size_t>(i)] *
               std::complex<double>(std::cos(ang), std::sin(ang));
      }
      max_err = std::max(max_err, std::abs(acc - spec.bins[static_cast<size_t>(k)]));
    }
    r.expect(max_err < 1e-6);
    // Energy balance between the two domains.
    double time_e = 0.0;
    for (double v : frame) time_e += v * v;
    double freq_e = std::norm(spec.bins.front()) + std::norm(spec.bins.back());
    for (int k = 1; k < n / 2; ++k)
      freq_e += 2.0 * std::norm(spec.bins[static_cast<size_t>(k)]);
    r.expect(std::abs(freq_e / n - time_e) <= 1e-9 * std::max(1.0, time_e));
  }
  return r;
}

SuiteResult selftest_attention(std::uint64_t seed, int trials) {
  SuiteResult r;
  ksr::SplitMix64 rng(seed + 1);
  for (int t = 0; t < 10 * trials; ++t) {
    const int n_q = 1 + static_cast<int>(rng.below(4));
    const int n_k = 1 + static_cast<int>(rng.below(4));
    const int d = 2 + static_cast<int>(rng.below(3));
    ksr::AttentionInput in{random_matrix(n_q, d, rng), random_matrix(n_k, d, rng),
                           random_matrix(n_k, d, rng)};
    const ksr::AttentionResult res = ksr::dot_attention(in, true);
    for (int q = 0; q < n_q; ++q) {
      double sum = 0.0;
      for (int k = 0; k < n_k; ++k) sum += res.weights(q, k);
      r.expect(std::abs(sum - 1.0) < 1e-9);
    }
    // Context rows stay inside the convex hull of the value rows.
    for (int q = 0; q < n_q; ++q) {
      for (int c = 0; c < d; ++c) {
        double lo = in.V(0, c), hi = in.V(0, c);
        for (int k = 1; k < n_k; ++k) {
          lo = std::min(lo, in.V(k, c));
          hi = std::max(hi, in.V(k, c));
        }
        r.expect(res.context(q, c) >= lo - 1e-9 && res.context(q, c) <= hi + 1e-9);
      }
    }
    // Single-head projectionless attention must agree bit for bit.
    const ksr::MultiHeadResult mh =
        ksr::multi_head_attention(in, ksr::MultiHeadParams::identity(d));
    bool identical = true;
    for (int q = 0; q < n_q && identical; ++q)
      for (int c = 0; c < d; ++c)
        if (mh.context(q, c) != res.context(q, c)) {
          identical = false;
          break;
        }
    r.expect(identical);
  }
  // Analytic gradient against central differences on one small instance.
  ksr::AttentionInput in{random_matrix(2, 3, rng), random_matrix(3, 3, rng),
                         random_matrix(3, 2, rng)};
  const ksr::Matrix upstream = random_matrix(2, 2, rng);
  const ksr::AttentionGradients grads = ksr::scaled_dot_backward(in, upstream);
  auto loss = [&](const ksr::AttentionInput& x) {
    const ksr::Matrix ctx = ksr::dot_attention(x, true).context;
    double acc = 0.0;
    for (int i = 0; i < ctx.rows(); ++i)
      for (int j = 0; j < ctx.cols(); ++j) acc += upstream(i, j) * ctx(i, j);
    return acc;
  };
  const double h = 1e-5;
  auto check_block = [&](ksr::Matrix ksr::AttentionInput::* field,
                         const ksr::Matrix& analytic) {
    const ksr::Matrix& base = in.*field;
    for (int i = 0; i < base.rows(); ++i) {
      for (int j = 0; j < base.cols(); ++j) {
        ksr::AttentionInput plus = in, minus = in;
        (plus.*field)(i, j) += h;
        (minus.*field)(i, j) -= h;
        const double fd = (loss(plus) - loss(minus)) / (2.0 * h);
        r.expect(std::abs(fd - analytic(i, j)) <
                 1e-6 + 1e-4 * std::abs(analytic(i, j)));
      }
    }
  };
  check_block(&ksr::AttentionInput::Q, grads.dQ);
  check_block(&ksr::AttentionInput::K, grads.dK);
  check_block(&ksr::AttentionInput::V, grads.dV);
  return r;
}

// Deterministic synthetic posterior table: every prefix hashes to a stream of
// pseudo-random probabilities, so beam width 1 has something nontrivial to
// agree with greedy on.
class HashedPosteriors : public ksr::PosteriorSource {
 public:
  HashedPosteriors(std::uint64_t seed, int vocab, int max_len)
      : seed_(seed), vocab_(vocab), max_len_(max_len) {}
  int vocab_size() const override { return vocab_; }
  int max_len() const override { return max_len_; }
  std::vector<double> log_probs(const std::vector<int>& prefix) const override {
    std::uint64_t h = seed_;
    for (int tok : prefix)
      h = ksr::SplitMix64::derive(h, static_cast<std::uint64_t>(tok) + 17).next();
    ksr::SplitMix64 rng(h);
    std::vector<double> w(static_cast<size_t>(vocab_));
    double total = 0.0;
    for (double& v : w) {
      v = 0.05 + unit_draw(rng);
      total += v;
    }
    std::vector<double> logs(w.size());
    for (size_t i = 0; i < w.size(); ++i) logs[i] = std::log(w[i] / total);
    return logs;
  }

 private:
  std::uint64_t seed_;
  int vocab_;
  int max_len_;
};

SuiteResult selftest_decode(std::uint64_t seed, int trials) {
  SuiteResult r;
  ksr::SplitMix64 rng(seed + 2);
  for (int t = 0; t < 40 * trials; ++t) {
    const int vocab = 3 + static_cast<int>(rng.below(3));
    const int cap = 2 + static_cast<int>(rng.below(3));
    const HashedPosteriors src(rng.next(), vocab, cap);
    const ksr::Hypothesis greedy = ksr::greedy_decode(src);
    const std::vector<ksr::Hypothesis> beam = ksr::beam_decode(src, 1);
    r.expect(beam.size() == 1);
    r.expect(beam.front().tokens == greedy.tokens);
    r.expect(beam.front().log_prob == greedy.log_prob);
    // Reported scores must re-derive from the source itself.
    for (const ksr::Hypothesis& hyp : ksr::beam_decode(src, 3))
      r.expect(std::abs(ksr::rescore(src, hyp.tokens) - hyp.log_prob) < 1e-9);
  }
  return r;
}

SuiteResult selftest_metrics(std::uint64_t seed, int trials) {
  SuiteResult r;
  ksr::SplitMix64 rng(seed + 3);
  auto random_word = [&rng] {
    std::string s;
    const int len = 1 + static_cast<int>(rng.below(9));
    for (int i = 0; i < len; ++i)
      s.push_back(static_cast<char>('a' + rng.below(2)));
    return s;
  };
  for (int t = 0; t < 150 * trials; ++t) {
    const std::string a = random_word(), b = random_word(), c = random_word();
    const auto unit = ksr::TextUnit::character;
    r.expect(ksr::cer(a, a, unit).distance == 0);
    r.expect(ksr::cer(a, b, unit).distance == ksr::cer(b, a, unit).distance);
    r.expect(ksr::cer(a, c, unit).distance <=
             ksr::cer(a, b, unit).distance + ksr::cer(b, c, unit).distance);
    const long long d = ksr::cer(a, b, unit).distance;
    const long long la = static_cast<long long>(a.size());
    const long long lb = static_cast<long long>(b.size());
    r.expect(d >= std::llabs(la - lb) && d <= std::max(la, lb));
  }
  return r;
}

SuiteResult selftest_masking(std::uint64_t seed, int trials) {
  SuiteResult r;
  ksr::SplitMix64 rng(seed + 4);
  for (int t = 0; t < 200 * trials; ++t) {
    ksr::FeatureMatrix m;
    m.kind = ksr::FeatureKind::fbank;
    const int frames = 20 + static_cast<int>(rng.below(180));
    const int dim = 8 + static_cast<int>(rng.below(120));
    m.data = ksr::Matrix(frames, dim);
    ksr::AugmentPolicy policy;
    policy.seed = rng.next();
    policy.freq_mask_param = 1 + static_cast<int>(rng.below(30));
    policy.time_mask_param = 1 + static_cast<int>(rng.below(50));
    policy.n_freq_masks = static_cast<int>(rng.below(2));
    policy.n_time_masks = static_cast<int>(rng.below(4));
    auto [masked, masks] = ksr::augment(m, policy);
    auto [masked2, masks2] = ksr::augment(m, policy);
    r.expect(masks.size() ==
             static_cast<size_t>(policy.n_freq_masks + policy.n_time_masks));
    bool same = masks.size() == masks2.size();
    for (size_t i = 0; same && i < masks.size(); ++i)
      same = masks[i].axis == masks2[i].axis &&
             masks[i].offset == masks2[i].offset &&
             masks[i].width == masks2[i].width;
    r.expect(same);
    const int t_cap = std::min(
        policy.time_mask_param,
        static_cast<int>(std::floor(policy.max_time_mask_ratio * frames)));
    for (const ksr::MaskSpec& mask : masks) {
      if (mask.axis == ksr::MaskAxis::frequency) {
        r.expect(mask.width <= std::min(policy.freq_mask_param, dim));
        r.expect(mask.offset >= 0 && mask.offset + mask.width <= dim);
      } else {
        r.expect(mask.width <= t_cap);
        r.expect(mask.offset >= 0 && mask.offset + mask.width <= frames);
      }
    }
  }
  return r;
}

struct SelftestOpts {
  std::uint64_t seed = 7;
  int trials = 1;
};

int run_selftest(const SelftestOpts& o) {
  const std::pair<const char*, SuiteResult> suites[] = {
      {"transform", selftest_transform(o.seed, o.trials)},
      {"attention", selftest_attention(o.seed, o.trials)},
      {"decode", selftest_decode(o.seed, o.trials)},
      {"metrics", selftest_metrics(o.seed, o.trials)},
      {"masking", selftest_masking(o.seed, o.trials)},
  };
  long long checks = 0, failures = 0;
  for (const auto& [name, result] : suites) {
    checks += result.checks;
    failures += result.failures;
    std::cout << name << "\t" << result.checks << "\t" << result.failures
              << "\n";
  }
  std::cout << "selftest\t" << checks << "\t" << failures << "\n";
  return failures == 0 ? 0 : 3;
}

// ---------------------------------------------------------------------------
// Wiring.

// The one named profile: 80-band fbank over 20 ms frames with 10 ms hop and
// the masking policy of one frequency mask (F=20) plus ten time masks capped
// at 5% of the utterance.  Profile values fill in only where the user (or the
// config file) said nothing, before any validation runs.
void apply_paper_baseline(const std::map<const CLI::Option*, std::function<void()>>&
                              defaults) {
  for (const auto& [opt, setter] : defaults)
    if (opt->count() == 0) setter();
}

std::string trim_ws(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Applies a flat "key = value" option file to the active subcommand.  Keys
// are the long option names without the leading dashes; unknown keys are
// rejected; values pass through the option's normal conversion and
// validation; anything given explicitly on the command line wins.  Throws
// CLI::ParseError for bad values, UsageError for bad structure.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::vector<std::string> lines;
  try {
    lines = read_lines(path);
  } catch (const ksr::Error&) {
    throw UsageError{"cannot open option file '" + path + "'"};
  }
  size_t line_no = 0;
  for (const std::string& raw : lines) {
    ++line_no;
    const std::string line = trim_ws(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (line[0] == '[')
      throw UsageError{where + ": sections are not allowed in a flat option file"};
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError{where + ": expected 'key = value'"};
    const std::string key = trim_ws(line.substr(0, eq));
    const std::string value = trim_ws(line.substr(eq + 1));
    if (key.empty()) throw UsageError{where + ": empty option name"};
    CLI::Option* op = sub->get_option_no_throw("--" + key);
    if (op == nullptr)
      throw UsageError{where + ": unknown option '" + key + "' for subcommand '" +
                       sub->get_name() + "'"};
    if (op->count() > 0) continue;  // explicit command line wins
    op->add_result(value);
    op->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ksr — batch speech front end: features, trimming, masking, transcript "
      "prep, decoding and scoring"};
  app.require_subcommand(1);

  FeaturizeOpts feat;
  AugmentOpts aug;
  TrimOpts trm;
  PrepOpts prep;
  StatsOpts stats;
  DecodeOpts dec;
  ScoreOpts score;
  ScheduleOpts sched;
  SelftestOpts self;
  std::string feat_profile, aug_profile;
  std::string config_path;  // shared: exactly one subcommand parses per run

  const std::vector<std::string> feature_names = {
      "spectrogram", "logspec", "melspec", "logmel", "fbank", "mfcc"};

  // -- featurize
  CLI::App* c_feat = app.add_subcommand(
      "featurize", "Extract features for every manifest entry into .ksfm files");
  c_feat->add_option("--config", config_path,
                     "Flat 'key = value' option file; explicit flags win");
  c_feat->add_option("--manifest", feat.manifest,
                     "Input manifest: utt_id<TAB>audio_path per line (required)");
  c_feat->add_option("--out-dir", feat.out_dir,
                     "Directory for .ksfm outputs and manifest.tsv (required)");
  CLI::Option* o_feature =
      c_feat->add_option("--feature", feat.feature, "Feature kind")
          ->check(CLI::IsMember(feature_names))
          ->capture_default_str();
  c_feat->add_option("--window", feat.window, "Analysis window")
      ->check(CLI::IsMember({"paper", "standard", "rect"}))
      ->capture_default_str();
  CLI::Option* o_frame =
      c_feat->add_option("--frame-ms", feat.frame_ms, "Frame length in ms")
          ->capture_default_str();
  CLI::Option* o_hop =
      c_feat->add_option("--hop-ms", feat.hop_ms, "Hop in ms")
          ->capture_default_str();
  c_feat->add_option("--n-fft", feat.n_fft,
                     "Transform length override (0 = derive from frame)")
      ->capture_default_str();
  CLI::Option* o_mels =
      c_feat->add_option("--n-mels", feat.n_mels,
                         "Mel bands (0 = kind default)")
          ->capture_default_str();
  c_feat->add_option("--n-ceps", feat.n_ceps, "Cepstral coefficients (mfcc)")
      ->capture_default_str();
  c_feat->add_flag("--no-energy", feat.no_energy,
                   "Drop the appended log-energy column (mfcc)");
  c_feat->add_option("--f-min", feat.f_min, "Filterbank lower edge in Hz")
      ->capture_default_str();
  c_feat->add_option("--f-max", feat.f_max,
                     "Filterbank upper edge in Hz (0 = Nyquist)")
      ->capture_default_str();
  c_feat->add_option("--format", feat.format, "Audio container")
      ->check(CLI::IsMember({"wav", "raw"}))
      ->capture_default_str();
  c_feat->add_option("--rate", feat.rate,
                     "Sample rate in Hz (mandatory for --format raw)")
      ->capture_default_str();
  c_feat->add_flag("--exact-length", feat.exact_length,
                   "Transform at the frame length instead of the next power "
                   "of two");
  c_feat->add_option("--jobs", feat.jobs,
                     "Worker threads (0 = automatic)")
      ->capture_default_str();
  c_feat->add_flag("--keep-going", feat.keep_going,
                   "Exit 0 even when some utterances fail");
  c_feat->add_option("--profile", feat_profile,
                     "Named option bundle applied to unset options ('custom' = none)")
      ->check(CLI::IsMember({"paper-baseline", "custom"}));

  // -- trim
  CLI::App* c_trim = app.add_subcommand(
      "trim", "Cut leading/trailing silence from every manifest entry");
  c_trim->add_option("--config", config_path,
                     "Flat 'key = value' option file; explicit flags win");
  c_trim->add_option("--manifest", trm.manifest,
                     "Input manifest: utt_id<TAB>audio_path per line (required)");
  c_trim->add_option("--out-dir", trm.out_dir,
                     "Directory for trimmed .wav outputs and manifest.tsv "
                     "(required)");
  c_trim->add_option("--threshold-db", trm.threshold_db,
                     "Windows this far below the loudest window are silence")
      ->capture_default_str();
  c_trim->add_option("--window-ms", trm.window_ms, "Analysis window in ms")
      ->capture_default_str();
  c_trim->add_option("--format", trm.format, "Audio container")
      ->check(CLI::IsMember({"wav", "raw"}))
      ->capture_default_str();
  c_trim->add_option("--rate", trm.rate,
                     "Sample rate in Hz (mandatory for --format raw)")
      ->capture_default_str();
  c_trim->add_flag("--keep-going", trm.keep_going,
                   "Exit 0 even when some utterances fail");

  // -- augment
  CLI::App* c_aug = app.add_subcommand(
      "augment", "Apply frequency/time masking to .ksfm feature files");
  c_aug->add_option("--config", config_path,
                    "Flat 'key = value' option file; explicit flags win");
  c_aug->add_option("--manifest", aug.manifest,
                    "Input manifest: utt_id<TAB>ksfm_path per line (required)");
  c_aug->add_option("--out-dir", aug.out_dir,
                    "Directory for masked .ksfm outputs and manifest.tsv "
                    "(required)");
  c_aug->add_option("--seed", aug.seed, "Base seed for all mask draws")
      ->capture_default_str();
  CLI::Option* o_fparam =
      c_aug->add_option("--freq-mask-param", aug.freq_mask_param,
                        "Max width of one frequency mask")
          ->capture_default_str();
  CLI::Option* o_fnum =
      c_aug->add_option("--n-freq-masks", aug.n_freq_masks,
                        "Frequency masks per utterance")
          ->capture_default_str();
  CLI::Option* o_tparam =
      c_aug->add_option("--time-mask-param", aug.time_mask_param,
                        "Max width of one time mask")
          ->capture_default_str();
  CLI::Option* o_tnum =
      c_aug->add_option("--n-time-masks", aug.n_time_masks,
                        "Time masks per utterance")
          ->capture_default_str();
  CLI::Option* o_ratio =
      c_aug->add_option("--max-time-ratio", aug.max_time_ratio,
                        "Time-mask width cap as a fraction of the frames")
          ->capture_default_str();
  c_aug->add_option("--mask-value", aug.mask_value, "Fill value for masks")
      ->capture_default_str();
  c_aug->add_option("--mask-audit", aug.mask_audit,
                    "Write every drawn mask as utt<TAB>axis<TAB>offset<TAB>"
                    "width");
  c_aug->add_option("--jobs", aug.jobs, "Worker threads (0 = automatic)")
      ->capture_default_str();
  c_aug->add_flag("--keep-going", aug.keep_going,
                  "Exit 0 even when some utterances fail");
  c_aug->add_option("--profile", aug_profile,
                    "Named option bundle applied to unset options ('custom' = none)")
      ->check(CLI::IsMember({"paper-baseline", "custom"}));

  // -- prep
  CLI::App* c_prep = app.add_subcommand(
      "prep", "Normalize raw transcripts; optionally build a vocabulary");
  c_prep->add_option("--config", config_path,
                     "Flat 'key = value' option file; explicit flags win");
  c_prep->add_option("--manifest", prep.manifest,
                     "Input: utt_id<TAB>[path<TAB>]raw_transcript per line "
                     "(required)");
  c_prep->add_option("--out", prep.out, "Output manifest path ('-' = stdout)")
      ->capture_default_str();
  c_prep->add_option("--transcription", prep.transcription,
                     "Which side of dual transcriptions to keep")
      ->check(CLI::IsMember({"spelling", "phonetic"}))
      ->capture_default_str();
  c_prep->add_option("--unit", prep.unit, "Unit for lengths and the vocabulary")
      ->check(CLI::IsMember({"char", "jamo"}))
      ->capture_default_str();
  c_prep->add_option("--max-len", prep.max_len,
                     "Drop cleaned transcripts longer than this (0 = keep all)")
      ->capture_default_str();
  c_prep->add_option("--vocab-out", prep.vocab_out,
                     "Write a vocabulary built from the kept transcripts");
  c_prep->add_flag("--keep-noise-markers", prep.keep_noise_markers,
                   "Do not strip noise markers like 'b/'");
  c_prep->add_flag("--keep-specials", prep.keep_specials,
                   "Do not strip '+', '*' and leftover '/'");
  c_prep->add_flag("--keep-whitespace", prep.keep_whitespace,
                   "Do not collapse whitespace runs");

  // -- stats
  CLI::App* c_stats = app.add_subcommand(
      "stats", "Corpus length statistics over a transcript manifest");
  c_stats->add_option("--config", config_path,
                      "Flat 'key = value' option file; explicit flags win");
  c_stats->add_option("--manifest", stats.manifest,
                      "Input: utt_id<TAB>[path<TAB>]transcript per line "
                      "(required)");
  c_stats->add_option("--unit", stats.unit, "Length unit")
      ->check(CLI::IsMember({"char", "jamo"}))
      ->capture_default_str();
  c_stats->add_option("--max-len", stats.max_len,
                      "Also report how many transcripts are at most this long")
      ->capture_default_str();

  // -- decode
  CLI::App* c_dec = app.add_subcommand(
      "decode", "Decode a posterior table for every listed utterance");
  c_dec->add_option("--config", config_path,
                    "Flat 'key = value' option file; explicit flags win");
  c_dec->add_option("--utts", dec.utts,
                    "Manifest naming the utterances; only ids are used "
                    "(required)");
  c_dec->add_option("--mock-model", dec.mock_model,
                    "Posterior table: 'prefix -> p_0 p_1 ...' per line "
                    "(required)");
  c_dec->add_option("--out", dec.out, "Output path ('-' = stdout)")
      ->capture_default_str();
  c_dec->add_option("--order", dec.order,
                    "Match only the last N prefix tokens (0 = whole prefix)")
      ->capture_default_str();
  c_dec->add_option("--max-len", dec.max_len, "Cap on generated tokens")
      ->capture_default_str();
  CLI::Option* o_beam = c_dec->add_option("--beam", dec.beam, "Beam width");
  c_dec->add_flag("--greedy", dec.greedy, "Follow the argmax at every step")
      ->excludes(o_beam);
  c_dec->add_flag("--length-norm", dec.length_norm,
                  "Rank beam hypotheses by per-token score");

  // -- score
  CLI::App* c_score = app.add_subcommand(
      "score", "Character error rate of a hypothesis manifest against a "
               "reference");
  c_score->add_option("--config", config_path,
                      "Flat 'key = value' option file; explicit flags win");
  c_score->add_option("--hyp", score.hyp,
                      "Hypotheses: utt_id<TAB>text per line (required)");
  c_score->add_option("--ref", score.ref,
                      "References: utt_id<TAB>text per line (required)");
  c_score->add_option("--out", score.out, "Output path ('-' = stdout)")
      ->capture_default_str();
  c_score->add_option("--unit", score.unit, "Comparison unit")
      ->check(CLI::IsMember({"char", "jamo"}))
      ->capture_default_str();
  c_score->add_flag("--ignore-spaces", score.ignore_spaces,
                    "Drop spaces before comparing");

  // -- schedule-trace
  CLI::App* c_sched = app.add_subcommand(
      "schedule-trace", "Print the (step, lr, teacher-forcing) training table");
  c_sched->add_option("--config", config_path,
                      "Flat 'key = value' option file; explicit flags win");
  c_sched->add_option("--epochs", sched.epochs, "Number of epochs (required)")
      ->check(CLI::PositiveNumber);
  c_sched->add_option("--steps-per-epoch", sched.steps_per_epoch,
                      "Optimizer steps per epoch (required)")
      ->check(CLI::PositiveNumber);
  c_sched->add_option("--val-loss", sched.val_loss,
                      "File with one validation loss per epoch (drives the "
                      "plateau rule)");
  c_sched->add_option("--out", sched.out, "Output path ('-' = stdout)")
      ->capture_default_str();
  c_sched->add_option("--warmup", sched.warmup, "Warmup steps")
      ->capture_default_str();
  c_sched->add_option("--peak-lr", sched.peak_lr, "Learning rate after warmup")
      ->capture_default_str();
  c_sched->add_option("--factor", sched.factor, "Plateau reduction factor")
      ->capture_default_str();
  c_sched->add_option("--patience", sched.patience,
                      "Bad epochs tolerated before reducing")
      ->capture_default_str();
  c_sched->add_option("--threshold", sched.threshold,
                      "Improvement below this does not reset patience")
      ->capture_default_str();

  // -- selftest
  CLI::App* c_self = app.add_subcommand(
      "selftest", "Run the built-in property suites and report counts");
  c_self->add_option("--config", config_path,
                     "Flat 'key = value' option file; explicit flags win");
  c_self->add_option("--seed", self.seed, "Base seed for the random draws")
      ->capture_default_str();
  c_self->add_option("--trials", self.trials, "Multiplier on the suite sizes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    // Option file first, then the profile: both touch only options that are
    // still unset, so explicit flags > config file > profile > defaults.
    if (!config_path.empty()) {
      CLI::App* active = app.get_subcommands().front();
      apply_config_file(active, config_path);
    }
    if (c_feat->parsed()) {
      if (feat_profile == "paper-baseline") {
        apply_paper_baseline({
            {o_feature, [&] { feat.feature = "fbank"; }},
            {o_mels, [&] { feat.n_mels = 80; }},
            {o_frame, [&] { feat.frame_ms = 20.0; }},
            {o_hop, [&] { feat.hop_ms = 10.0; }},
        });
      }
      return run_featurize(feat);
    }
    if (c_trim->parsed()) return run_trim(trm);
    if (c_aug->parsed()) {
      if (aug_profile == "paper-baseline") {
        apply_paper_baseline({
            {o_fparam, [&] { aug.freq_mask_param = 20; }},
            {o_fnum, [&] { aug.n_freq_masks = 1; }},
            {o_tparam, [&] { aug.time_mask_param = 100; }},
            {o_tnum, [&] { aug.n_time_masks = 10; }},
            {o_ratio, [&] { aug.max_time_ratio = 0.05; }},
        });
      }
      return run_augment(aug);
    }
    if (c_prep->parsed()) return run_prep(prep);
    if (c_stats->parsed()) return run_stats(stats);
    if (c_dec->parsed()) return run_decode(dec);
    if (c_score->parsed()) return run_score(score);
    if (c_sched->parsed()) return run_schedule_trace(sched);
    if (c_self->parsed()) return run_selftest(self);
    std::cerr << "usage error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ksr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
