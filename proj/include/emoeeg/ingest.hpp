#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "emoeeg/error.hpp"
#include "emoeeg/random.hpp"
#include "emoeeg/spectral.hpp"

namespace emoeeg {

inline constexpr std::size_t kDeapChannels = 32;
inline constexpr std::size_t kDeapSamples = 8064;
inline constexpr double kDeapSampleRate = 128.0;
/// 3 s pre-trial baseline at 128 Hz.
inline constexpr std::size_t kDeapBaselineSamples = 384;

inline const std::array<std::string_view, kDeapChannels>& deap_channel_names() {
  static constexpr std::array<std::string_view, kDeapChannels> names{
      "Fp1", "AF3", "F3", "F7", "FC5", "FC1", "C3", "T7", "CP5", "CP1", "P3",
      "P7",  "PO3", "O1", "Oz", "Pz",  "Fp2", "AF4", "Fz", "F4", "F8",  "FC6",
      "FC2", "Cz",  "C4", "T8", "CP6", "CP2", "P4",  "P8", "PO4", "O2"};
  return names;
}

/// Ordered list of the 32 EEG electrode labels with name lookup.
class ChannelMap {
 public:
  ChannelMap() : ChannelMap(std::vector<std::string>(deap_channel_names().begin(), deap_channel_names().end())) {}

  explicit ChannelMap(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() != kDeapChannels)
      throw Error(Errc::malformed_header,
                  "channel map must list " + std::to_string(kDeapChannels) + " channels, got " +
                      std::to_string(names_.size()));
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (!index_.emplace(names_[i], i).second)
        throw Error(Errc::malformed_header, "duplicate channel name '" + names_[i] + "'");
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw Error(Errc::unknown_channel, "unknown channel '" + std::string(name) + "'");
  }

  friend bool operator==(const ChannelMap& a, const ChannelMap& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct RatingRecord {
  double valence = 0.0;
  double arousal = 0.0;

  void validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 9.0; };
    if (!ok(valence) || !ok(arousal))
      throw Error(Errc::rating_out_of_range, "rating out of [0,9]: valence=" + std::to_string(valence) +
                                                 " arousal=" + std::to_string(arousal));
  }

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// Trial-major EEG tensor plus per-trial ratings. Immutable once built;
/// the constructor enforces every geometry and value invariant.
class Dataset {
 public:
  Dataset(double sample_rate_hz, std::size_t n_trials, std::size_t n_samples, std::vector<double> samples,
          std::vector<RatingRecord> ratings, ChannelMap channels = {}, std::string provenance = {})
      : sample_rate_hz_(sample_rate_hz),
        n_trials_(n_trials),
        n_samples_(n_samples),
        samples_(std::move(samples)),
        ratings_(std::move(ratings)),
        channels_(std::move(channels)),
        provenance_(std::move(provenance)) {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
      throw Error(Errc::malformed_header, "sample_rate_hz must be positive");
    if (n_samples_ == 0) throw Error(Errc::malformed_header, "n_samples must be positive");
    const std::size_t expected = n_trials_ * n_channels() * n_samples_;
    if (samples_.size() != expected)
      throw Error(Errc::length_mismatch, "payload length mismatch: expected " + std::to_string(expected) +
                                             " samples, found " + std::to_string(samples_.size()));
    if (ratings_.size() != n_trials_)
      throw Error(Errc::length_mismatch, "rating count " + std::to_string(ratings_.size()) +
                                             " does not match n_trials " + std::to_string(n_trials_));
    for (std::size_t i = 0; i < samples_.size(); ++i)
      if (!std::isfinite(samples_[i]))
        throw Error(Errc::non_finite, "non-finite sample at flat index " + std::to_string(i));
    for (const auto& r : ratings_) r.validate();
  }

  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t n_trials() const noexcept { return n_trials_; }
  std::size_t n_channels() const noexcept { return channels_.size(); }
  std::size_t n_samples() const noexcept { return n_samples_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  const std::vector<RatingRecord>& ratings() const noexcept { return ratings_; }
  const ChannelMap& channels() const noexcept { return channels_; }
  const std::string& provenance() const noexcept { return provenance_; }

  std::span<const double> signal(std::size_t trial, std::size_t channel) const {
    return {samples_.data() + (trial * n_channels() + channel) * n_samples_, n_samples_};
  }

  bool deap_shaped() const noexcept {
    return n_samples_ == kDeapSamples && sample_rate_hz_ == kDeapSampleRate;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  double sample_rate_hz_;
  std::size_t n_trials_;
  std::size_t n_samples_;
  std::vector<double> samples_;
  std::vector<RatingRecord> ratings_;
  ChannelMap channels_;
  std::string provenance_;
};

/// Drops the first `n` samples of every (trial, channel) signal.
inline Dataset trim_leading_samples(const Dataset& ds, std::size_t n) {
  if (n == 0) return ds;
  if (n >= ds.n_samples())
    throw Error(Errc::invalid_argument, "cannot trim " + std::to_string(n) + " samples from signals of length " +
                                            std::to_string(ds.n_samples()));
  const std::size_t keep = ds.n_samples() - n;
  std::vector<double> out;
  out.reserve(ds.n_trials() * ds.n_channels() * keep);
  for (std::size_t t = 0; t < ds.n_trials(); ++t)
    for (std::size_t c = 0; c < ds.n_channels(); ++c) {
      auto s = ds.signal(t, c).subspan(n);
      out.insert(out.end(), s.begin(), s.end());
    }
  return Dataset(ds.sample_rate_hz(), ds.n_trials(), keep, std::move(out), ds.ratings(), ds.channels(),
                 ds.provenance());
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

enum class Format { eegb, csv };

inline Format parse_format(std::string_view s) {
  if (s == "eegb" || s == "eegb-binary") return Format::eegb;
  if (s == "csv") return Format::csv;
  throw Error(Errc::invalid_argument, "unknown dataset format '" + std::string(s) + "'");
}

inline std::string_view format_name(Format f) { return f == Format::eegb ? "eegb" : "csv"; }

/// Format from the file extension; anything other than .csv is eegb.
inline Format guess_format(const std::filesystem::path& p) {
  return p.extension() == ".csv" ? Format::csv : Format::eegb;
}

namespace detail {

inline nlohmann::ordered_json header_json(const Dataset& ds) {
  nlohmann::ordered_json h;
  h["sample_rate_hz"] = ds.sample_rate_hz();
  h["n_trials"] = ds.n_trials();
  h["n_channels"] = ds.n_channels();
  h["n_samples"] = ds.n_samples();
  h["channels"] = ds.channels().names();
  auto ratings = nlohmann::ordered_json::array();
  for (const auto& r : ds.ratings()) ratings.push_back({{"valence", r.valence}, {"arousal", r.arousal}});
  h["ratings"] = std::move(ratings);
  h["provenance"] = ds.provenance();
  return h;
}

struct Header {
  double sample_rate_hz;
  std::size_t n_trials, n_channels, n_samples;
  ChannelMap channels;
  std::vector<RatingRecord> ratings;
  std::string provenance;
};

inline Header parse_header(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_header, std::string("malformed header: ") + e.what());
  }
  try {
    for (const char* key : {"sample_rate_hz", "n_trials", "n_channels", "n_samples", "channels", "ratings"})
      if (!j.contains(key)) throw Error(Errc::malformed_header, std::string("malformed header: missing key '") + key + "'");
    Header h{
        j.at("sample_rate_hz").get<double>(),
        j.at("n_trials").get<std::size_t>(),
        j.at("n_channels").get<std::size_t>(),
        j.at("n_samples").get<std::size_t>(),
        ChannelMap(j.at("channels").get<std::vector<std::string>>()),
        {},
        j.value("provenance", std::string{}),
    };
    if (h.n_channels != h.channels.size())
      throw Error(Errc::malformed_header, "malformed header: n_channels disagrees with channel list");
    for (const auto& r : j.at("ratings"))
      h.ratings.push_back({r.at("valence").get<double>(), r.at("arousal").get<double>()});
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_header, std::string("malformed header: ") + e.what());
  }
}

inline std::vector<char> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
    return r;
  }
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(Errc::malformed_header, "csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

}  // namespace detail

inline void write_eegb(const Dataset& ds, const std::filesystem::path& path) {
  const std::string header = detail::header_json(ds).dump();
  std::string out = "EEGB";
  out.push_back(static_cast<char>(1));
  detail::put_u32_le(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  const auto& s = ds.samples();
  const std::size_t base = out.size();
  out.resize(base + s.size() * 8);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::uint64_t bits = detail::to_le(std::bit_cast<std::uint64_t>(s[i]));
    std::memcpy(out.data() + base + i * 8, &bits, 8);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

inline Dataset read_eegb(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  if (bytes.size() < 9 || std::memcmp(bytes.data(), "EEGB", 4) != 0)
    throw Error(Errc::malformed_header, "malformed header: missing EEGB magic");
  if (bytes[4] != 1)
    throw Error(Errc::malformed_header, "malformed header: unsupported version " + std::to_string(int(bytes[4])));
  std::uint32_t hlen = 0;
  for (int i = 0; i < 4; ++i) hlen |= std::uint32_t(static_cast<unsigned char>(bytes[5 + i])) << (8 * i);
  if (bytes.size() < 9 + std::size_t{hlen})
    throw Error(Errc::malformed_header, "malformed header: file shorter than declared header length");
  auto h = detail::parse_header(std::string_view(bytes.data() + 9, hlen));

  const std::size_t count = h.n_trials * h.n_channels * h.n_samples;
  const std::size_t payload = bytes.size() - 9 - hlen;
  if (payload != count * 8)
    throw Error(Errc::length_mismatch, "payload length mismatch: header declares " + std::to_string(count) +
                                           " float64 values (" + std::to_string(count * 8) + " bytes), found " +
                                           std::to_string(payload) + " bytes");
  std::vector<double> samples(count);
  const char* p = bytes.data() + 9 + hlen;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, p + i * 8, 8);
    samples[i] = std::bit_cast<double>(detail::to_le(bits));
  }
  return Dataset(h.sample_rate_hz, h.n_trials, h.n_samples, std::move(samples), std::move(h.ratings),
                 std::move(h.channels), std::move(h.provenance));
}

/// CSV payload (one row per trial x channel) plus `<name>.meta.json` sidecar.
inline void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  {
    std::ofstream meta(detail::sidecar_path(path), std::ios::trunc);
    if (!meta) throw Error(Errc::io, "cannot write '" + detail::sidecar_path(path).string() + "'");
    meta << detail::header_json(ds).dump(2) << '\n';
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  f << "trial,channel";
  for (std::size_t s = 0; s < ds.n_samples(); ++s) f << ",s" << s;
  f << '\n';
  for (std::size_t t = 0; t < ds.n_trials(); ++t)
    for (std::size_t c = 0; c < ds.n_channels(); ++c) {
      f << t << ',' << ds.channels().name(c);
      for (double v : ds.signal(t, c)) f << ',' << detail::format_double(v);
      f << '\n';
    }
  if (!f) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

inline Dataset read_csv(const std::filesystem::path& path) {
  const auto meta = detail::read_file(detail::sidecar_path(path));
  auto h = detail::parse_header(std::string_view(meta.data(), meta.size()));

  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line) || !line.starts_with("trial,channel"))
    throw Error(Errc::malformed_header, "malformed header: csv must start with 'trial,channel'");
  const auto header_cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (header_cols != h.n_samples + 2)
    throw Error(Errc::length_mismatch, "payload length mismatch: csv header has " + std::to_string(header_cols - 2) +
                                           " sample columns, sidecar declares " + std::to_string(h.n_samples));

  std::vector<double> samples;
  samples.reserve(h.n_trials * h.n_channels * h.n_samples);
  std::size_t row = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const std::size_t lineno = row + 2;
    if (row >= h.n_trials * h.n_channels)
      throw Error(Errc::length_mismatch, "payload length mismatch: more csv rows than n_trials x n_channels");
    std::string_view rest(line);
    auto next_field = [&]() {
      auto pos = rest.find(',');
      auto field = rest.substr(0, pos);
      rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
      return field;
    };
    const auto trial = next_field();
    const auto channel = next_field();
    if (trial != std::to_string(row / h.n_channels) || channel != h.channels.name(row % h.n_channels))
      throw Error(Errc::malformed_header, "csv line " + std::to_string(lineno) + ": expected trial " +
                                              std::to_string(row / h.n_channels) + " channel " +
                                              h.channels.name(row % h.n_channels));
    const std::size_t n = rest.empty() ? 0 : static_cast<std::size_t>(std::count(rest.begin(), rest.end(), ',')) + 1;
    if (n != h.n_samples)
      throw Error(Errc::length_mismatch, "payload length mismatch: csv line " + std::to_string(lineno) + " has " +
                                             std::to_string(n) + " samples, expected " + std::to_string(h.n_samples));
    for (std::size_t i = 0; i < n; ++i) samples.push_back(detail::parse_double(next_field(), lineno));
    ++row;
  }
  if (row != h.n_trials * h.n_channels)
    throw Error(Errc::length_mismatch, "payload length mismatch: csv has " + std::to_string(row) + " rows, expected " +
                                           std::to_string(h.n_trials * h.n_channels));
  return Dataset(h.sample_rate_hz, h.n_trials, h.n_samples, std::move(samples), std::move(h.ratings),
                 std::move(h.channels), std::move(h.provenance));
}

inline Dataset load_dataset(const std::filesystem::path& path, Format format) {
  return format == Format::eegb ? read_eegb(path) : read_csv(path);
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path, Format format) {
  format == Format::eegb ? write_eegb(ds, path) : write_csv(ds, path);
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Quadrant classes, in label order.
enum Quadrant : int { HAHV = 0, LAHV = 1, HALV = 2, LALV = 3 };

inline constexpr bool quadrant_high_arousal(int q) { return q == HAHV || q == HALV; }
inline constexpr bool quadrant_high_valence(int q) { return q == HAHV || q == LAHV; }

/// Recipe for a deterministic synthetic dataset. Each signal is a sum of one
/// sinusoid per canonical band plus white Gaussian noise. Channels listed in
/// `modulated_channels` (all channels when empty) use the class-dependent
/// amplitudes; the others use `baseline_amplitudes`.
struct SynthSpec {
  std::size_t n_trials = 160;
  std::uint64_t seed = 0;
  /// [class][band], bands in canonical order theta, alpha, beta, gamma.
  std::array<std::array<double, 4>, 4> amplitudes{{
      {1.0, 2.0, 2.0, 1.0},  // HAHV
      {1.0, 2.0, 1.0, 1.0},  // LAHV
      {1.0, 1.0, 2.0, 1.0},  // HALV
      {1.0, 1.0, 1.0, 1.0},  // LALV
  }};
  std::array<double, 4> baseline_amplitudes{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> carriers_hz{6.0, 10.0, 20.0, 40.0};
  double noise_sigma = 1.0;
  std::array<double, 4> proportions{0.25, 0.25, 0.25, 0.25};
  std::vector<std::string> modulated_channels;
  std::size_t n_samples = kDeapSamples;
  double sample_rate_hz = kDeapSampleRate;

  void validate() const {
    const auto& bands = spectral::canonical_bands();
    for (const auto& row : amplitudes)
      for (double a : row)
        if (!(a >= 0.0) || !std::isfinite(a)) throw Error(Errc::invalid_argument, "synth: amplitudes must be >= 0");
    for (double a : baseline_amplitudes)
      if (!(a >= 0.0) || !std::isfinite(a)) throw Error(Errc::invalid_argument, "synth: amplitudes must be >= 0");
    for (std::size_t b = 0; b < 4; ++b)
      if (!(carriers_hz[b] > bands[b].low_hz && carriers_hz[b] < bands[b].high_hz))
        throw Error(Errc::invalid_argument, "synth: carrier for " + bands[b].name + " must lie strictly inside (" +
                                                detail::format_double(bands[b].low_hz) + ", " +
                                                detail::format_double(bands[b].high_hz) + ") Hz");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
      throw Error(Errc::invalid_argument, "synth: noise sigma must be >= 0");
    double sum = 0.0;
    for (double p : proportions) {
      if (!(p >= 0.0)) throw Error(Errc::invalid_argument, "synth: proportions must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(Errc::invalid_argument, "synth: proportions must sum to 1");
    if (n_samples == 0 || !(sample_rate_hz > 0.0))
      throw Error(Errc::invalid_argument, "synth: n_samples and sample rate must be positive");
    const ChannelMap channels;
    for (const auto& c : modulated_channels) channels.index(c);
  }
};

/// Trials per class by largest remainder; ties favour the lower class index.
inline std::array<std::size_t, 4> class_counts(const std::array<double, 4>& proportions, std::size_t n) {
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> rem{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    const double exact = proportions[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 4; ++c)
      if (rem[c] > rem[best]) best = c;
    ++counts[best];
    rem[best] = -1.0;
    ++assigned;
  }
  return counts;
}

/// Deterministic synthetic dataset. Draw order per trial: valence, arousal,
/// then per channel the four band phases followed by the noise samples.
/// High ratings are uniform on [5.5, 9], low ones on [0, 3.5], so a balanced
/// axis splits at its median exactly along the class boundary.
inline Dataset synth_dataset(const SynthSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);

  const auto counts = class_counts(spec.proportions, spec.n_trials);
  std::vector<int> classes;
  for (int c = 0; c < 4; ++c) classes.insert(classes.end(), counts[static_cast<std::size_t>(c)], c);
  rng.shuffle(std::span<int>(classes));

  const ChannelMap channels;
  std::vector<bool> modulated(channels.size(), spec.modulated_channels.empty());
  for (const auto& c : spec.modulated_channels) modulated[channels.index(c)] = true;

  std::vector<double> samples;
  samples.reserve(spec.n_trials * channels.size() * spec.n_samples);
  std::vector<RatingRecord> ratings;
  ratings.reserve(spec.n_trials);
  const double two_pi = 2.0 * std::numbers::pi;

  auto rating = [&](bool high) { return high ? rng.uniform(5.5, 9.0) : rng.uniform(0.0, 3.5); };

  for (std::size_t t = 0; t < spec.n_trials; ++t) {
    const int cls = classes[t];
    RatingRecord r;
    r.valence = rating(quadrant_high_valence(cls));
    r.arousal = rating(quadrant_high_arousal(cls));
    ratings.push_back(r);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const auto& amps = modulated[c] ? spec.amplitudes[static_cast<std::size_t>(cls)] : spec.baseline_amplitudes;
      std::array<double, 4> phase{};
      for (double& p : phase) p = rng.uniform(0.0, two_pi);
      for (std::size_t n = 0; n < spec.n_samples; ++n) {
        const double time = static_cast<double>(n) / spec.sample_rate_hz;
        double v = 0.0;
        for (std::size_t b = 0; b < 4; ++b)
          if (amps[b] != 0.0) v += amps[b] * std::sin(two_pi * spec.carriers_hz[b] * time + phase[b]);
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.gaussian();
        samples.push_back(v);
      }
    }
  }
  return Dataset(spec.sample_rate_hz, spec.n_trials, spec.n_samples, std::move(samples), std::move(ratings), channels,
                 "synthetic seed=" + std::to_string(spec.seed) + " trials=" + std::to_string(spec.n_trials));
}

}  // namespace emoeeg
