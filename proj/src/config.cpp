#include "hwsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace hwsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "': not a number: '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("config: key '" + key + "': trailing characters in '" + value + "'");
  return out;
}

// Accepts "a", "bi", "a+bi", "a-bi" (also with 'j').
cdouble parse_complex(const std::string& key, const std::string& value) {
  std::string v = trim(value);
  if (v.empty()) throw ConfigError("config: key '" + key + "': empty value");
  bool imag_unit = v.back() == 'i' || v.back() == 'j';
  if (!imag_unit) return cdouble(parse_double(key, v), 0.0);
  v.pop_back();
  // split at the last +/- that is not an exponent sign and not leading
  std::size_t split = std::string::npos;
  for (std::size_t p = v.size(); p-- > 1;) {
    if ((v[p] == '+' || v[p] == '-') && v[p - 1] != 'e' && v[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) {
    if (v.empty() || v == "+" || v == "-") v += "1";
    return cdouble(0.0, parse_double(key, v));
  }
  std::string im = v.substr(split);
  if (im == "+" || im == "-") im += "1";
  return cdouble(parse_double(key, v.substr(0, split)), parse_double(key, im));
}

std::string format_complex(cdouble v) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

class KeyValueBag {
 public:
  KeyValueBag(const std::string& text, const std::string& origin) : origin_(origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: " + origin_ + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config: " + origin_ + ":" + std::to_string(line_no) + ": empty key");
      if (!entries_.emplace(key, value).second)
        throw ConfigError("config: duplicate key '" + key + "'");
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string value = it->second;
    entries_.erase(it);
    return value;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError("config: missing required key '" + key + "'");
    return *v;
  }

  void reject_leftovers() const {
    if (!entries_.empty())
      throw ConfigError("config: unknown key '" + entries_.begin()->first + "'");
  }

 private:
  std::string origin_;
  std::map<std::string, std::string> entries_;
};

int parse_int(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  if (d != std::floor(d) || std::abs(d) > 1e15)
    throw ConfigError("config: key '" + key + "': expected an integer");
  return static_cast<int>(d);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("config: key '" + key + "': expected true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: key '" + key + "': empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "': empty list");
  return out;
}

}  // namespace

double ExperimentConfig::resolve_delta(double n0) const {
  if (adc_delta_rule == DeltaRule::fixed) return adc_delta;
  const double mean_power = static_cast<double>(n_users) * static_cast<double>(n_occupied) /
                                static_cast<double>(n_subcarriers) +
                            n0;
  return 0.086 * std::sqrt(mean_power);
}

HardwareChain ExperimentConfig::chain(double n0) const {
  HardwareChain chain;
  if (lna_enable) chain.lna = LnaParams{lna_alpha1, lna_alpha2};
  if (pn_enable) chain.phase_noise = PhaseNoiseParams{pn_lambda, pn_beta_hz, sample_period_s()};
  if (adc_enable) chain.adc = AdcParams{adc_bits, resolve_delta(n0)};
  return chain;
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "B = " << n_rx << "\n";
  out << "U = " << n_users << "\n";
  out << "N = " << n_subcarriers << "\n";
  out << "S = " << n_occupied << "\n";
  out << "L = " << n_taps << "\n";
  out << "f_sub = " << num(f_sub_hz) << "\n";
  out << "n0 = " << num(noise_psd) << "\n";
  out << "snr_db = ";
  for (std::size_t i = 0; i < snr_db.size(); ++i) out << (i ? "," : "") << num(snr_db[i]);
  out << "\n";
  out << "seed = " << seed << "\n";
  out << "symbols = " << (symbols == SymbolMode::qpsk ? "qpsk" : "gaussian") << "\n";
  out << "lna.enable = " << (lna_enable ? "true" : "false") << "\n";
  if (lna_enable) {
    out << "lna.alpha1 = " << format_complex(lna_alpha1) << "\n";
    out << "lna.alpha2 = " << format_complex(lna_alpha2) << "\n";
  }
  out << "pn.enable = " << (pn_enable ? "true" : "false") << "\n";
  if (pn_enable) {
    out << "pn.lambda = " << num(pn_lambda) << "\n";
    out << "pn.beta = " << num(pn_beta_hz) << "\n";
  }
  out << "adc.enable = " << (adc_enable ? "true" : "false") << "\n";
  if (adc_enable) {
    out << "adc.q = " << adc_bits << "\n";
    out << "adc.delta_rule = " << (adc_delta_rule == DeltaRule::paper ? "paper" : "fixed") << "\n";
    if (adc_delta_rule == DeltaRule::fixed) out << "adc.delta = " << num(adc_delta) << "\n";
  }
  out << "psd.frames = " << psd_frames << "\n";
  out << "psd.metric = " << (psd_metric == PsdMetric::trace ? "trace" : "diag_norm") << "\n";
  out << "ber.channels = " << ber_channels << "\n";
  out << "ber.frames_per_channel = " << ber_frames_per_channel << "\n";
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  KeyValueBag bag(text, origin);
  ExperimentConfig cfg;

  cfg.n_rx = parse_int("B", bag.require("B"));
  cfg.n_users = parse_int("U", bag.require("U"));
  cfg.n_subcarriers = parse_int("N", bag.require("N"));
  cfg.n_occupied = parse_int("S", bag.require("S"));
  cfg.n_taps = parse_int("L", bag.require("L"));
  if (auto v = bag.take("f_sub")) cfg.f_sub_hz = parse_double("f_sub", *v);
  if (auto v = bag.take("n0")) cfg.noise_psd = parse_double("n0", *v);
  cfg.snr_db = {-12, -10, -8, -6, -4, -2, 0};
  if (auto v = bag.take("snr_db")) cfg.snr_db = parse_list("snr_db", *v);
  if (auto v = bag.take("seed")) {
    const double d = parse_double("seed", *v);
    if (d < 0 || d != std::floor(d)) throw ConfigError("config: key 'seed': expected a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(d);
  }
  if (auto v = bag.take("symbols")) {
    if (*v == "qpsk") cfg.symbols = SymbolMode::qpsk;
    else if (*v == "gaussian") cfg.symbols = SymbolMode::gaussian;
    else throw ConfigError("config: key 'symbols': expected qpsk or gaussian");
  }

  if (auto v = bag.take("lna.enable")) cfg.lna_enable = parse_bool("lna.enable", *v);
  if (cfg.lna_enable) {
    cfg.lna_alpha1 = parse_complex("lna.alpha1", bag.require("lna.alpha1"));
    cfg.lna_alpha2 = parse_complex("lna.alpha2", bag.require("lna.alpha2"));
    if (cfg.lna_alpha1 == cdouble(0.0, 0.0))
      throw ConfigError("config: key 'lna.alpha1': must be nonzero");
  } else {
    bag.take("lna.alpha1");
    bag.take("lna.alpha2");
  }

  if (auto v = bag.take("pn.enable")) cfg.pn_enable = parse_bool("pn.enable", *v);
  if (cfg.pn_enable) {
    cfg.pn_lambda = parse_double("pn.lambda", bag.require("pn.lambda"));
    cfg.pn_beta_hz = parse_double("pn.beta", bag.require("pn.beta"));
    if (!(cfg.pn_lambda > 0.0 && cfg.pn_lambda < 1.0))
      throw ConfigError("config: key 'pn.lambda': must lie in (0,1)");
    if (cfg.pn_beta_hz < 0.0) throw ConfigError("config: key 'pn.beta': must be >= 0");
  } else {
    bag.take("pn.lambda");
    bag.take("pn.beta");
  }

  if (auto v = bag.take("adc.enable")) cfg.adc_enable = parse_bool("adc.enable", *v);
  if (cfg.adc_enable) {
    cfg.adc_bits = parse_int("adc.q", bag.require("adc.q"));
    if (cfg.adc_bits < 1 || cfg.adc_bits > 24)
      throw ConfigError("config: key 'adc.q': must lie in 1..24");
    if (auto v = bag.take("adc.delta_rule")) {
      if (*v == "paper") cfg.adc_delta_rule = DeltaRule::paper;
      else if (*v == "fixed") cfg.adc_delta_rule = DeltaRule::fixed;
      else throw ConfigError("config: key 'adc.delta_rule': expected paper or fixed");
    }
    if (cfg.adc_delta_rule == DeltaRule::fixed) {
      cfg.adc_delta = parse_double("adc.delta", bag.require("adc.delta"));
      if (!(cfg.adc_delta > 0.0)) throw ConfigError("config: key 'adc.delta': must be positive");
    } else {
      bag.take("adc.delta");
    }
  } else {
    bag.take("adc.q");
    bag.take("adc.delta_rule");
    bag.take("adc.delta");
  }

  if (auto v = bag.take("psd.frames")) cfg.psd_frames = parse_int("psd.frames", *v);
  if (auto v = bag.take("psd.metric")) {
    if (*v == "trace") cfg.psd_metric = PsdMetric::trace;
    else if (*v == "diag_norm") cfg.psd_metric = PsdMetric::diag_norm;
    else throw ConfigError("config: key 'psd.metric': expected trace or diag_norm");
  }
  if (auto v = bag.take("ber.channels")) cfg.ber_channels = parse_int("ber.channels", *v);
  if (auto v = bag.take("ber.frames_per_channel"))
    cfg.ber_frames_per_channel = parse_int("ber.frames_per_channel", *v);
  bag.reject_leftovers();

  if (cfg.n_rx < 1) throw ConfigError("config: key 'B': must be >= 1");
  if (cfg.n_users < 1) throw ConfigError("config: key 'U': must be >= 1");
  if (cfg.n_subcarriers < 1) throw ConfigError("config: key 'N': must be >= 1");
  if (cfg.n_occupied <= 0 || cfg.n_occupied % 2 != 0 || cfg.n_occupied >= cfg.n_subcarriers)
    throw ConfigError("config: key 'S': must be even, positive and < N");
  if (cfg.n_taps < 1 || cfg.n_taps > cfg.n_subcarriers)
    throw ConfigError("config: key 'L': must lie in 1..N");
  if (!(cfg.f_sub_hz > 0.0)) throw ConfigError("config: key 'f_sub': must be positive");
  if (cfg.noise_psd < 0.0) throw ConfigError("config: key 'n0': must be >= 0");
  if (cfg.psd_frames < 1) throw ConfigError("config: key 'psd.frames': must be >= 1");
  if (cfg.ber_channels < 1) throw ConfigError("config: key 'ber.channels': must be >= 1");
  if (cfg.ber_frames_per_channel < 1)
    throw ConfigError("config: key 'ber.frames_per_channel': must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace hwsim
